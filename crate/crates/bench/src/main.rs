use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use riga_bench::{
    aggregate, format_table, read_csv, run_experiment, workers_from_env, write_csv, BenchError,
    ExperimentConfig, Method, RigaParams,
};
use riga_core::{Family, Instance, ProblemKind};

#[derive(Parser)]
#[command(name = "riga-bench", about = "Interactive elicitation experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a seeded random instance in the plain-text format.
    Gen {
        #[arg(long)]
        problem: ProblemKind,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        size: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run an experiment and print the per-method means.
    Run(RunArgs),
    /// Aggregate a per-run CSV file.
    Report {
        #[arg(long)]
        csv: PathBuf,
    },
}

#[derive(Args)]
struct RunArgs {
    /// JSON experiment config; flags below override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    problem: Option<ProblemKind>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    size: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    families: Option<Vec<Family>>,
    #[arg(long, value_delimiter = ',')]
    methods: Option<Vec<String>>,
    #[arg(long)]
    runs: Option<usize>,
    #[arg(long)]
    first_seed: Option<u64>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long = "M")]
    generations: Option<usize>,
    #[arg(long = "S")]
    population: Option<usize>,
    #[arg(long = "K")]
    survivors: Option<usize>,
    #[arg(long)]
    mu: Option<f64>,
    #[arg(long)]
    sigma: Option<f64>,
    /// Per-run time limit in seconds.
    #[arg(long)]
    timeout: Option<f64>,
    /// Per-run CSV output.
    #[arg(long)]
    csv: Option<PathBuf>,
}

fn missing(field: &str) -> BenchError {
    BenchError::Config {
        field: field.into(),
        message: "required without --config".into(),
    }
}

fn build_config(args: &RunArgs) -> Result<ExperimentConfig, BenchError> {
    let mut config = match &args.config {
        Some(path) => {
            serde_json::from_reader(File::open(path)?).map_err(|e| BenchError::Config {
                field: "config".into(),
                message: e.to_string(),
            })?
        }
        None => ExperimentConfig::new(
            args.problem.ok_or_else(|| missing("problem"))?,
            args.n.ok_or_else(|| missing("n"))?,
            args.size.ok_or_else(|| missing("size"))?,
            vec![Family::WS, Family::OWA, Family::Choquet2],
            vec![Method::Riga],
        ),
    };
    if let Some(p) = args.problem {
        config.problem = p;
    }
    if let Some(n) = args.n {
        config.n = n;
    }
    if let Some(s) = args.size {
        config.size = s;
    }
    if let Some(f) = &args.families {
        config.families = f.clone();
    }
    if let Some(m) = &args.methods {
        config.methods = m.iter().map(|s| s.parse()).collect::<Result<_, _>>()?;
    }
    if let Some(r) = args.runs {
        config.runs = r;
    }
    if let Some(s) = args.first_seed {
        config.first_seed = s;
    }
    if let Some(d) = args.delta {
        config.delta = d;
    }
    if args.timeout.is_some() {
        config.timeout_s = args.timeout;
    }
    let p = &mut config.riga;
    *p = RigaParams {
        generations: args.generations.or(p.generations),
        population: args.population.or(p.population),
        survivors: args.survivors.or(p.survivors),
        mu: args.mu.or(p.mu),
        sigma: args.sigma.or(p.sigma),
    };
    config.validate()?;
    Ok(config)
}

fn run(args: RunArgs) -> Result<ExitCode, BenchError> {
    let config = build_config(&args)?;
    let workers = workers_from_env()?;
    let records = run_experiment(&config, workers)?;
    if let Some(path) = &args.csv {
        write_csv(&records, File::create(path)?)?;
    }
    print!("{}", format_table(&aggregate(&records)));
    let timeouts = records.iter().filter(|r| r.timed_out()).count();
    if timeouts > 0 {
        eprintln!("{timeouts} of {} runs timed out", records.len());
        return Ok(ExitCode::from(3));
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if e.use_stderr() => {
            let _ = e.print();
            return ExitCode::from(2);
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
    };
    let result = match cli.command {
        Command::Gen {
            problem,
            n,
            size,
            seed,
            out,
        } => Instance::generate(problem, size, n, seed)
            .map_err(|e| BenchError::Config {
                field: "size".into(),
                message: e.to_string(),
            })
            .and_then(|inst| {
                let text = inst.to_text();
                match out {
                    Some(path) => std::fs::write(path, text)?,
                    None => io::stdout().write_all(text.as_bytes())?,
                }
                Ok(ExitCode::SUCCESS)
            }),
        Command::Run(args) => run(args),
        Command::Report { csv } => File::open(csv)
            .map_err(BenchError::from)
            .and_then(read_csv)
            .map(|records| {
                print!("{}", format_table(&aggregate(&records)));
                ExitCode::SUCCESS
            }),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                BenchError::Config { .. } => ExitCode::from(2),
                _ => ExitCode::FAILURE,
            }
        }
    }
}
