use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::Parser;
use modvertex::{run_suite, Level, Suite, SuiteConfig};

/// Run exact verification suites for modular affine vertex algebras.
#[derive(Parser, Debug)]
#[command(name = "modvertex", version)]
struct Args {
    /// lucas, restricted, state-field, iota-commute, centrality, wff-relations,
    /// pcenter-images, phi-pformula, character, singular, center-probe or all.
    #[arg(long)]
    suite: Suite,

    /// Comma-separated primes; each suite has its own default.
    #[arg(long, value_delimiter = ',')]
    p: Vec<u32>,

    /// Comma-separated levels: residues, `crit`, or `formal`.
    #[arg(long = "kappa", value_delimiter = ',', allow_hyphen_values = true)]
    kappa: Vec<Level>,

    #[arg(long)]
    depth: Option<u32>,

    #[arg(long, default_value_t = 8)]
    depth_cap: u32,

    #[arg(long)]
    mode_bound: Option<i64>,

    /// Comma-separated values of the highest weight on the coroots.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    lambda: Vec<i64>,

    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Random probe combinations added to the relation checks.
    #[arg(long, default_value_t = 0)]
    extra_probes: usize,

    /// Run pcenter-images at primes above 3.
    #[arg(long)]
    force: bool,

    /// Record wall-clock times in the JSON report.
    #[arg(long)]
    timings: bool,

    /// Where to write the JSON report.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

fn init_threads() -> Result<()> {
    if let Ok(n) = std::env::var("MODVERTEX_THREADS") {
        let n: usize = n
            .parse()
            .context("MODVERTEX_THREADS must be a positive integer")?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()?;
    }
    Ok(())
}

fn main() -> Result<ExitCode> {
    let args = Args::parse();
    init_threads()?;
    let mut cfg = SuiteConfig::new(args.suite);
    cfg.primes = args.p;
    cfg.levels = args.kappa;
    cfg.depth = args.depth;
    cfg.depth_cap = args.depth_cap;
    cfg.mode_bound = args.mode_bound;
    cfg.lambda = args.lambda;
    cfg.seed = args.seed;
    cfg.extra_probes = args.extra_probes;
    cfg.force = args.force;
    cfg.timings = args.timings;

    let start = std::time::Instant::now();
    let report = run_suite(&cfg)?;
    eprint!("{}", report.summary());
    eprintln!("elapsed: {:.2?}", start.elapsed());

    let json = serde_json::to_string_pretty(&report)?;
    match &args.output {
        Some(path) => {
            fs::write(path, json + "\n").with_context(|| format!("writing {}", path.display()))?
        }
        None => println!("{json}"),
    }
    Ok(if report.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}
