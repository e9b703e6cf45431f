use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use metroplex::constraints::check_schedule_with;
use metroplex::experiment::{
    ablation_jobs, comparison_jobs, parse_seeds, render_table, run_jobs, summarize, write_summary_csv,
};
use metroplex::io::{
    generate_instance, parse_schedule, read_instance, save_instance, scenario_counts, write_result, Template,
};
use metroplex::scenario::{classify_scenario, compute_thresholds, AltitudeMode};
use metroplex::solver::ModelOptions;
use metroplex::{solve, Algorithm, Instance, ScenarioState, SolverConfig};

#[derive(Parser)]
#[command(name = "metroplex", version, about = "Bi-level arrival/departure sequencing for multi-airport terminal areas")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic instance targeting a traffic scenario (1-6).
    Generate {
        #[arg(long, default_value = "shanghai")]
        template: String,
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=6))]
        scenario: u8,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Check an instance, and optionally a schedule against it.
    Validate { instance: PathBuf, schedule: Option<PathBuf> },
    /// Solve one instance with one algorithm.
    Solve {
        instance: PathBuf,
        #[arg(long, value_enum, default_value_t = Alg::BiEga)]
        algorithm: Alg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        ga: GaArgs,
        #[command(flatten)]
        model: ModelArgs,
        /// Result document; stdout when omitted.
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Convergence trace CSV.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Median comparison of several algorithms over seeds.
    Compare {
        instance: PathBuf,
        #[arg(long, value_enum, value_delimiter = ',', default_value = "fcfs,bi-ga,bi-ega,bi-sega")]
        algorithms: Vec<Alg>,
        #[arg(long, default_value = "1..20")]
        seeds: String,
        #[command(flatten)]
        ga: GaArgs,
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        out: TableArgs,
    },
    /// The four-way grid of same-path ordering and altitude staggering.
    Ablate {
        instance: PathBuf,
        #[arg(long, value_enum, default_value_t = Alg::BiEga)]
        algorithm: Alg,
        #[arg(long, default_value = "1..20")]
        seeds: String,
        #[command(flatten)]
        ga: GaArgs,
        #[command(flatten)]
        out: TableArgs,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Alg {
    Fcfs,
    Oracle,
    BiGa,
    BiEga,
    BiSega,
}

impl From<Alg> for Algorithm {
    fn from(a: Alg) -> Self {
        match a {
            Alg::Fcfs => Algorithm::Fcfs,
            Alg::Oracle => Algorithm::Oracle,
            Alg::BiGa => Algorithm::BiGa,
            Alg::BiEga => Algorithm::BiEga,
            Alg::BiSega => Algorithm::BiSega,
        }
    }
}

#[derive(Args)]
struct GaArgs {
    #[arg(long)]
    population: Option<usize>,
    #[arg(long)]
    co_iterations: Option<usize>,
    /// Generations per level per co-iteration.
    #[arg(long)]
    generations: Option<usize>,
    /// Stop after this many co-iterations without improvement at either level.
    #[arg(long)]
    stall: Option<usize>,
    /// Decision-time grid in seconds (the oracle defaults to 30).
    #[arg(long)]
    time_step: Option<i64>,
}

#[derive(Args)]
struct ModelArgs {
    /// Drop same-path order preservation.
    #[arg(long)]
    no_crsspf: bool,
    /// Staggered handover altitudes (the default).
    #[arg(long, conflicts_with = "no_saha")]
    saha: bool,
    /// Bind each airport to one altitude slot per fix instead of staggering.
    #[arg(long)]
    no_saha: bool,
}

#[derive(Args)]
struct TableArgs {
    /// Also write the summary as CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Worker threads; 0 uses all cores.
    #[arg(long, default_value_t = 0)]
    threads: usize,
}

impl GaArgs {
    fn apply(&self, mut c: SolverConfig) -> SolverConfig {
        if let Some(p) = self.population {
            c.population_size = p;
        }
        if let Some(m) = self.co_iterations {
            c.co_iterations = m;
        }
        if let Some(g) = self.generations {
            c.level_generations = g;
        }
        if let Some(s) = self.stall {
            c.stall_co_iterations = s;
        }
        if let Some(t) = self.time_step {
            c.time_step = t;
            c.oracle_grid = t;
        }
        c
    }
}

impl ModelArgs {
    fn apply(&self, mut c: SolverConfig) -> SolverConfig {
        c.enable_crsspf = !self.no_crsspf;
        c.saha_mode = if self.no_saha {
            AltitudeMode::FixedByAirport
        } else {
            AltitudeMode::Staggered
        };
        c
    }
}

fn load(path: &Path) -> metroplex::Result<(Instance, ScenarioState)> {
    let parsed = read_instance(path)?;
    for w in &parsed.warnings {
        eprintln!("warning: {w}");
    }
    let sc = classify_scenario(&parsed.instance, &compute_thresholds(&parsed.instance));
    Ok((parsed.instance, sc))
}

fn create(path: &Path) -> metroplex::Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

fn print_table(rows: &[metroplex::experiment::SummaryRow], out: &TableArgs) -> metroplex::Result<()> {
    print!("{}", render_table(rows));
    if let Some(p) = &out.csv {
        let mut w = create(p)?;
        write_summary_csv(rows, &mut w)?;
        w.flush()?;
    }
    Ok(())
}

fn run(cli: Cli) -> metroplex::Result<ExitCode> {
    match cli.command {
        Command::Generate {
            template,
            scenario,
            seed,
            output,
        } => {
            let template: Template = template.parse()?;
            let inst = generate_instance(template, &scenario_counts(template, scenario)?, seed)?;
            save_instance(&inst, &output)?;
            eprintln!("wrote {} flights to {}", inst.flights().len(), output.display());
        }
        Command::Validate { instance, schedule } => {
            let (inst, sc) = load(&instance)?;
            println!(
                "instance: {} airports, {} fixes, {} flights, scenario {}",
                inst.airports().len(),
                inst.fixes().len(),
                inst.flights().len(),
                sc.scenario_index
            );
            if let Some(path) = schedule {
                let doc = parse_schedule(&std::fs::read_to_string(path)?)?;
                let model = doc.model.unwrap_or_else(ModelOptions::default);
                let violations = check_schedule_with(&model.prepare(&inst), &doc.schedule(), &model.check_options())?;
                if violations.is_empty() {
                    println!("feasible");
                } else {
                    for v in &violations {
                        println!("{} {} deficit {} s", v.kind, v.flights.join(","), v.deficit_seconds);
                    }
                    println!("{} violations", violations.len());
                    return Ok(ExitCode::from(1));
                }
            }
        }
        Command::Solve {
            instance,
            algorithm,
            seed,
            ga,
            model,
            output,
            trace,
        } => {
            let (inst, sc) = load(&instance)?;
            let config = model.apply(ga.apply(SolverConfig {
                algorithm: algorithm.into(),
                rng_seed: seed,
                ..SolverConfig::default()
            }));
            let r = solve(&inst, &sc, &config)?;
            let mut trace_sink = trace.as_deref().map(create).transpose()?;
            let trace_dyn = trace_sink.as_mut().map(|w| w as &mut dyn Write);
            match &output {
                Some(p) => {
                    let mut w = create(p)?;
                    write_result(&r, &inst, &sc, &mut w, trace_dyn)?;
                    w.flush()?;
                }
                None => write_result(&r, &inst, &sc, &mut io::stdout().lock(), trace_dyn)?,
            }
            if let Some(w) = trace_sink.as_mut() {
                w.flush()?;
            }
            eprintln!(
                "{}: upper {} lower {} after {} co-iterations ({:.2} s)",
                r.algorithm,
                r.objective.upper,
                r.objective.lower,
                r.convergence.len(),
                r.wall_time
            );
        }
        Command::Compare {
            instance,
            algorithms,
            seeds,
            ga,
            model,
            out,
        } => {
            let (inst, sc) = load(&instance)?;
            let algorithms: Vec<Algorithm> = algorithms.into_iter().map(Algorithm::from).collect();
            let base = model.apply(ga.apply(SolverConfig::default()));
            let records = run_jobs(&inst, &sc, &comparison_jobs(&algorithms, &base), &parse_seeds(&seeds)?, out.threads)?;
            print_table(&summarize(&records), &out)?;
        }
        Command::Ablate {
            instance,
            algorithm,
            seeds,
            ga,
            out,
        } => {
            let (inst, sc) = load(&instance)?;
            let base = ga.apply(SolverConfig::with_algorithm(algorithm.into()));
            let records = run_jobs(&inst, &sc, &ablation_jobs(&base), &parse_seeds(&seeds)?, out.threads)?;
            print_table(&summarize(&records), &out)?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
