use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Local extensions of bipartite states with exact certificates.
#[derive(Debug, Parser)]
#[command(name = "locext", version)]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub verb: Verb,
}

#[derive(Debug, Default, Args)]
pub struct Global {
    /// State file (JSON), `-` for stdin, or a name: rho3x3, rho4x3, rho4x4, rho4x5, tiles, family:K.
    #[arg(long, global = true)]
    pub state: Option<String>,
    /// Grid-graph file (JSON).
    #[arg(long, global = true)]
    pub graph: Option<PathBuf>,
    /// Scaling-family parameter; same as `--state family:K`.
    #[arg(long, global = true)]
    pub family: Option<usize>,
    /// Schmidt-number target for `certify-sn`; largest family parameter for `reproduce`.
    #[arg(long, global = true)]
    pub k: Option<usize>,
    /// Largest power tried by the lower-bound search.
    #[arg(long, global = true)]
    pub nmax: Option<u32>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    /// Gauss–Newton residual tolerance.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Print JSON instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    /// Write the output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Verb {
    /// Emit a state file.
    Build,
    /// Exact PPT decision with replayable factorizations.
    PptCheck,
    /// Apply one extension step, or report the space of admissible couplings.
    Extend(ExtendArgs),
    /// Lower and upper Schmidt-number certificates.
    CertifySn(CertifyArgs),
    /// Extremality of an extension in the PSD and PPT cones.
    Extremal(ExtendArgs),
    /// One Gauss–Newton sample of a fixed-birank PPT state.
    Sample(SampleArgs),
    /// Numerical extension counts over many samples.
    Survey(SurveyArgs),
    /// Replay a certificate file.
    Verify(VerifyArgs),
    /// Run every acceptance criterion and write a manifest.
    Reproduce,
    /// Grid diagram of a state's edge structure.
    Plot(PlotArgs),
}

#[derive(Debug, Default, Args)]
pub struct ExtendArgs {
    /// Extension step file (JSON).
    #[arg(long)]
    pub step: Option<PathBuf>,
}

#[derive(Debug, Default, Args)]
pub struct CertifyArgs {
    /// Witness vector file (JSON list of entries); defaults to Σ|ii⟩ or the family's witness.
    #[arg(long)]
    pub witness: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    /// Local dimensions, e.g. `3x3`.
    #[arg(long, default_value = "3x3")]
    pub dims: String,
    /// Target ranks of the state and its partial transpose, e.g. `4,4`.
    #[arg(long, default_value = "4,4")]
    pub birank: String,
}

#[derive(Debug, Args)]
pub struct SurveyArgs {
    /// `MxN:P,Q`; repeat for several cases.
    #[arg(long = "case", default_value = "3x3:4,4")]
    pub cases: Vec<String>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Certificate file; `-` for stdin.
    pub file: PathBuf,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum PlotFormat {
    #[default]
    Text,
    Svg,
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    #[arg(long, value_enum, default_value_t = PlotFormat::Text)]
    pub format: PlotFormat,
}
