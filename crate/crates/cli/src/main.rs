use std::process::ExitCode;

use clap::Parser;
use noether_cli::{run_file, Command, Flags, EXIT_INPUT};
use rayon::prelude::*;

/// Noether symmetries and conservation laws of polynomial Lagrangians.
#[derive(Debug, Parser)]
#[command(name = "noether", version)]
struct Cli {
    command: Command,
    /// Problem files.
    #[arg(required = true)]
    files: Vec<String>,
    /// Polynomial degree of generator and gauge coefficients.
    #[arg(long)]
    degree: Option<u32>,
    /// Highest derivative order allowed in generator coefficients.
    #[arg(long)]
    jet_order: Option<u32>,
    /// Solve without a gauge term.
    #[arg(long)]
    no_gauge: bool,
    /// Use generators with vanishing xi and derivative-dependent eta.
    #[arg(long)]
    evolutionary: bool,
    /// Print JSON instead of text.
    #[arg(long)]
    json: bool,
    /// Omit the timestamp so output is byte-for-byte reproducible.
    #[arg(long)]
    deterministic: bool,
    /// Worker threads for several files.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    #[arg(long)]
    step: Option<f64>,
    #[arg(long)]
    horizon: Option<f64>,
    #[arg(long = "tol")]
    tolerance: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let flags = Flags {
        degree: cli.degree,
        jet_order: cli.jet_order,
        no_gauge: cli.no_gauge,
        evolutionary: cli.evolutionary,
        step: cli.step,
        horizon: cli.horizon,
        tolerance: cli.tolerance,
        seed: cli.seed,
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.jobs.max(1)).build() {
        Ok(pool) => pool,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_INPUT as u8);
        }
    };
    let outcomes: Vec<_> = pool.install(|| {
        cli.files.par_iter().map(|f| run_file(cli.command, f, &flags, cli.deterministic)).collect()
    });
    if cli.json {
        let values: Vec<_> = outcomes.iter().map(|o| o.json.clone()).collect();
        let doc = match values.as_slice() {
            [one] => one.clone(),
            _ => serde_json::Value::Array(values),
        };
        println!("{}", serde_json::to_string_pretty(&doc).expect("JSON values serialize"));
    } else {
        let texts: Vec<&str> = outcomes.iter().map(|o| o.text.as_str()).collect();
        print!("{}", texts.join("\n"));
    }
    let code = outcomes.iter().map(|o| o.code).max().unwrap_or(0);
    ExitCode::from(code as u8)
}
