use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use yamabe_core::integrate::Tolerances;
use yamabe_core::Regime;
use yamabe_phase::{run, Command, Grid, RunConfig, Window};

#[derive(Parser)]
#[command(name = "yamabe-phase", version, about = "Phase-plane analysis of gradient Yamabe solitons")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// List and classify the rest points of every chart.
    Classify(Opts),
    /// Draw a phase portrait (one panel per lambda).
    Portrait(Opts),
    /// Sweep a grid of starts and certify that no steady soliton is complete.
    SteadyCertify(Opts),
    /// Find and certify the complete shrinker trajectory.
    ShrinkerFind(Opts),
    /// Shoot the rotationally symmetric soliton.
    Rotational(Opts),
    /// Integrate from a start point and rebuild the warping function.
    Reconstruct(Opts),
}

#[derive(Clone, Copy, ValueEnum)]
enum RegimeArg {
    Steady,
    Shrinking,
}

#[derive(Args)]
struct Opts {
    #[arg(long, default_value_t = 6)]
    n: u32,
    /// Defaults to shrinking when --lambda or --Rbar is given, else steady.
    #[arg(long, value_enum)]
    regime: Option<RegimeArg>,
    /// Normalized soliton constant; a comma list gives several panels.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    lambda: Vec<f64>,
    /// Scalar curvature of the fiber (unnormalized units).
    #[arg(long = "Rbar", conflicts_with = "lambda")]
    rbar: Option<f64>,
    /// Start grid, e.g. 10x10.
    #[arg(long)]
    grid: Option<Grid>,
    /// Viewport or sweep window, z0:z1,w0:w1.
    #[arg(long, allow_hyphen_values = true)]
    window: Option<Window>,
    #[arg(long)]
    tol_abs: Option<f64>,
    #[arg(long)]
    tol_rel: Option<f64>,
    /// Series terms for seeds.
    #[arg(long)]
    terms: Option<usize>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Start point z,w (reconstruct).
    #[arg(long, allow_hyphen_values = true)]
    start: Option<String>,
}

impl Opts {
    fn into_config(self, command: Command) -> Result<RunConfig, String> {
        let regime = match self.regime {
            Some(RegimeArg::Steady) => Regime::Steady,
            Some(RegimeArg::Shrinking) => Regime::Shrinking,
            None if !self.lambda.is_empty() || self.rbar.is_some() => Regime::Shrinking,
            None => Regime::Steady,
        };
        let mut cfg = RunConfig::new(command, self.n, regime);
        let d = Tolerances::default();
        cfg.tol = Tolerances { atol: self.tol_abs.unwrap_or(d.atol), rtol: self.tol_rel.unwrap_or(d.rtol) };
        cfg.lambda = self.lambda;
        cfg.rbar = self.rbar;
        cfg.grid = self.grid;
        cfg.window = self.window;
        cfg.terms = self.terms;
        cfg.out = self.out;
        if let Some(s) = &self.start {
            let v: Vec<f64> = s
                .split(',')
                .map(|t| t.trim().parse())
                .collect::<Result<_, _>>()
                .map_err(|e| format!("--start: {e}"))?;
            let [z, w] = v[..] else { return Err(String::from("--start must look like z,w")) };
            cfg.start = Some([z, w]);
        }
        Ok(cfg)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            // usage errors share status 1 with run errors; 2 means Inconclusive
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let cfg = match cli.command {
        Sub::Classify(o) => o.into_config(Command::Classify),
        Sub::Portrait(o) => o.into_config(Command::Portrait),
        Sub::SteadyCertify(o) => o.into_config(Command::SteadyCertify),
        Sub::ShrinkerFind(o) => o.into_config(Command::ShrinkerFind),
        Sub::Rotational(o) => o.into_config(Command::Rotational),
        Sub::Reconstruct(o) => o.into_config(Command::Reconstruct),
    };
    let cfg = match cfg {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    match run(&cfg) {
        Ok(outcome) => {
            print!("{}", outcome.summary);
            ExitCode::from(outcome.exit as u8)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
