use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use helixlab_cli::{
    build_config, cmd_analyze, cmd_synthesize, cmd_verify, list_corpus, render_table, CliError, Family, Overrides,
    SynthesisSource, EXIT_OK, EXIT_VERIFY_FAILED,
};

/// Frenet frames, harmonic curvatures and slant-helix detection for curves
/// in flat pseudo-Euclidean space.
#[derive(Debug, Parser)]
#[command(name = "helixlab", version)]
struct Cli {
    #[command(flatten)]
    opts: Opts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Opts {
    /// JSON config file; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Analysis grid size for closed-form curves.
    #[arg(long, global = true)]
    samples: Option<usize>,
    /// Taylor jet order (at least n + 2).
    #[arg(long, global = true)]
    jet_order: Option<usize>,
    /// Tolerance override, e.g. const_tol=1e-7. Repeatable.
    #[arg(long = "tol", value_name = "KEY=VAL", global = true)]
    tol: Vec<String>,
    /// RK4 step for synthesized curves.
    #[arg(long, global = true)]
    step: Option<f64>,
    /// Seed for random initial frames.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Analyze a closed-form curve given as CurveSpec JSON.
    Analyze { curve_file: PathBuf },
    /// Integrate a curvature spec and analyze the resulting curve.
    Synthesize {
        #[arg(required_unless_present = "family")]
        curvature_file: Option<PathBuf>,
        /// Built-in family instead of a file: slant, ratio_linear or w_curve.
        #[arg(long, conflicts_with = "curvature_file")]
        family: Option<Family>,
        /// Dimension of the built-in family.
        #[arg(long, requires = "family")]
        dimension: Option<usize>,
    },
    /// Run the built-in corpus through every invariant.
    Verify {
        /// Print the corpus without running it.
        #[arg(long)]
        list: bool,
    },
}

fn run(cli: Cli) -> Result<i32, CliError> {
    let o = cli.opts;
    let cfg = build_config(&Overrides {
        config: o.config,
        samples: o.samples,
        jet_order: o.jet_order,
        tolerances: o.tol,
        step: o.step,
        seed: o.seed,
    })?;
    match cli.command {
        Command::Analyze { curve_file } => {
            let r = cmd_analyze(&curve_file, &cfg, &o.out)?;
            print_verdicts(&r);
        }
        Command::Synthesize {
            curvature_file,
            family,
            dimension,
        } => {
            let source = match (curvature_file, family) {
                (Some(path), _) => SynthesisSource::File(path),
                (None, Some(family)) => SynthesisSource::Family { family, dimension },
                (None, None) => unreachable!("clap requires one of them"),
            };
            let r = cmd_synthesize(&source, &cfg, &o.out)?;
            print_verdicts(&r);
        }
        Command::Verify { list: true } => print!("{}", list_corpus()),
        Command::Verify { list: false } => {
            let report = cmd_verify(&cfg, Some(&o.out))?;
            print!("{}", render_table(&report));
            if !report.passed {
                return Ok(EXIT_VERIFY_FAILED);
            }
        }
    }
    Ok(EXIT_OK)
}

fn print_verdicts(r: &helixlab_core::HelixReport) {
    println!(
        "verdict_theorem={} verdict_corollary={} confidence={:?} lemma_sum_mean={:.16e}",
        r.verdict_theorem, r.verdict_corollary, r.confidence, r.lemma_sum_stats.mean
    );
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("HELIXLAB_LOG", "warn")).init();
    let code = match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("{}", e.to_json());
            e.exit_code()
        }
    };
    ExitCode::from(code as u8)
}
