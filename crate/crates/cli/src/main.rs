//! `vessel3d`: phantoms, noise, enhancement and evaluation from the shell.

mod commands;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use vessel3d::bowlerhat::{DEFAULT_DIRECTIONS, DEFAULT_D_MAX};
use vessel3d::eval::DEFAULT_THRESHOLDS;

#[derive(Parser, Debug)]
#[command(name = "vessel3d", version, about = "3D bowler-hat vessel enhancement and evaluation")]
pub struct Cli {
    /// Worker threads (default: all cores). Outputs are identical for any value.
    #[arg(long, global = true, value_name = "N")]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Render a phantom and its ground truth.
    Phantom(PhantomArgs),
    /// Corrupt a volume with seeded noise (intensities on the 0–255 scale).
    Noise(NoiseArgs),
    /// Run an enhancement filter; the output is normalized onto [0, 1].
    Enhance(EnhanceArgs),
    /// Score enhancer outputs against ground truth.
    Eval(EvalArgs),
}

#[derive(Args, Debug)]
pub struct PhantomArgs {
    /// Phantom description (JSON).
    pub spec: PathBuf,
    /// Output volume header; `<stem>.truth.json` and `<stem>.vessels.json`
    /// (balls counted as background) are written next to it.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum NoiseKind {
    Gaussian,
    Speckle,
    Saltpepper,
}

#[derive(Args, Debug)]
pub struct NoiseArgs {
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_enum)]
    pub model: NoiseKind,
    /// Standard deviation for gaussian and speckle, 0–255 units.
    #[arg(long)]
    pub sigma: Option<f64>,
    /// Fraction of voxels hit by salt-and-pepper, in [0, 1].
    #[arg(long)]
    pub rho: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Bowlerhat,
    Vesselness,
    Neuriteness,
    Volumeratio,
}

#[derive(Args, Debug)]
pub struct EnhanceArgs {
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_enum)]
    pub method: Method,
    /// Bowler-hat: largest element diameter, odd.
    #[arg(long, default_value_t = DEFAULT_D_MAX)]
    pub dmax: u32,
    /// Bowler-hat: number of line orientations.
    #[arg(long, default_value_t = DEFAULT_DIRECTIONS)]
    pub directions: usize,
    /// Hessian methods: Gaussian scales, comma separated [default: 1,1.5,2,3,4].
    #[arg(long, value_delimiter = ',')]
    pub scales: Option<Vec<f64>>,
    /// Vesselness plate sensitivity [default: 0.5]; neuriteness mixing [default: -1/3].
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<f64>,
    /// Vesselness blob sensitivity.
    #[arg(long, default_value_t = 0.5)]
    pub beta: f64,
    /// Vesselness structureness threshold [default: half the largest S per scale].
    #[arg(long)]
    pub c: Option<f64>,
    /// Volume ratio cut-off in (0, 1].
    #[arg(long, default_value_t = 0.5)]
    pub tau: f64,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum EvalMode {
    /// ROC curve of one score volume.
    Roc,
    /// AUC of each score volume, best first.
    Table,
    /// Line profile of one score volume.
    Profile,
    /// PSNR of each score volume against --reference.
    Psnr,
}

#[derive(Args, Debug)]
pub struct EvalArgs {
    /// Score volumes, as `path` or `name=path`.
    #[arg(long, required = true, num_args = 1..)]
    pub scores: Vec<String>,
    /// Binary ground truth (roc, table).
    #[arg(long)]
    pub truth: Option<PathBuf>,
    /// Reference volume (psnr).
    #[arg(long)]
    pub reference: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = EvalMode::Roc)]
    pub mode: EvalMode,
    /// Output CSV.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = DEFAULT_THRESHOLDS)]
    pub thresholds: usize,
    /// Profile start, `x,y,z` in voxels.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub p0: Option<Vec<f64>>,
    /// Profile end, `x,y,z` in voxels.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub p1: Option<Vec<f64>>,
    #[arg(long, default_value_t = 101)]
    pub samples: usize,
    /// PSNR peak value.
    #[arg(long, default_value_t = 255.0)]
    pub peak: f64,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                e.exit();
            }
            let text = e.render().to_string();
            let text = text.trim_start_matches("error: ").trim_end();
            eprintln!("error[usage]: {text}");
            return ExitCode::from(2);
        }
    };
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error[{}]: {e}", e.category());
            ExitCode::FAILURE
        }
    }
}
