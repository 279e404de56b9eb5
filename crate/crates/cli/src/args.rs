use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(
    name = "brjuno",
    version,
    about = "Brjuno functions and Siegel disk radii of z ↦ e^{2iπα}z + z²"
)]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Default)]
pub struct Common {
    /// Working precision in bits [default: 128]
    #[arg(long, global = true)]
    pub precision_bits: Option<u32>,
    /// Order of the linearizing series [default: 4096]
    #[arg(long, global = true)]
    pub series_n: Option<usize>,
    /// Tail tolerance for Brjuno sums [default: 1e-8]
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Largest period used for periodic points [default: 12]
    #[arg(long, global = true)]
    pub qcap: Option<u32>,
    /// Write CSV here instead of standard output
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Also write an SVG plot (sweep only)
    #[arg(long, global = true)]
    pub svg: Option<PathBuf>,
    /// key=value defaults; command-line flags take precedence
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Run on the calling thread only
    #[arg(long, global = true)]
    pub sequential: bool,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Evaluate Υ(α)
    Upsilon { alpha: String },
    /// Brjuno sum Φ(α) or its nearest-integer variant
    Phi {
        alpha: String,
        #[arg(long, value_enum, default_value_t = PhiFlavor::Gauss)]
        flavor: PhiFlavor,
    },
    /// Truncated sum Φ_trunc over both expansions of p/q
    Phitrunc { pq: String },
    /// Conformal radius of the Siegel disk from the linearizing series
    Radius {
        alpha: String,
        #[arg(long, value_enum, default_value_t = RadiusChoice::Slope)]
        method: RadiusChoice,
    },
    /// Υ over a grid, as CSV and optionally SVG
    Sweep(SweepArgs),
    /// Υ along a sequence tending to a target
    Probe {
        target: String,
        #[arg(long)]
        count: Option<usize>,
    },
    /// The cycle born from the parabolic point at p/q + eps
    Cycle {
        pq: String,
        #[arg(allow_hyphen_values = true)]
        eps: f64,
    },
    /// Distances d_n to the periodic points and Φ_n + log d_n
    Dn {
        alpha: String,
        #[arg(long)]
        n_max: Option<usize>,
    },
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub lo: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub hi: Option<String>,
    /// `farey:<max_q>` or `surd:<count>[:golden|silver]`; repeatable
    #[arg(long)]
    pub grid: Vec<String>,
    #[arg(long, value_enum)]
    pub flavor: Option<SweepFlavor>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum PhiFlavor {
    Gauss,
    Nearest,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum RadiusChoice {
    Slope,
    Hadamard,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SweepFlavor {
    Phi,
    #[value(name = "phi_tilde", alias = "phi-tilde")]
    PhiTilde,
}
