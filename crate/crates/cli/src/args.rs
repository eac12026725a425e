use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug, Clone)]
#[command(name = "resonance", version, about = "Resonances of delta-shell models with and without a Stark field")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Worker threads (defaults to the number of CPUs).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Write the artifact here instead of stdout.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,

    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
    Svg,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    Free,
    Stark,
    Dirichlet,
}

#[derive(Args, Debug, Clone)]
pub struct ModelArgs {
    #[arg(long, value_enum, default_value = "stark")]
    pub model: ModelKind,
    #[arg(long, default_value_t = 1.0)]
    pub kappa: f64,
    #[arg(long, default_value_t = 1.0)]
    pub eta: f64,
    /// Field strength; `census` and `dynamics` accept a comma separated list.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub f: Vec<f64>,
    /// Wall position for the Dirichlet model.
    #[arg(long)]
    pub l: Option<f64>,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Determinant values at given points of the model's plane.
    Eval {
        #[command(flatten)]
        model: ModelArgs,
        /// `re,im`; may be repeated.
        #[arg(long = "at", required = true, allow_hyphen_values = true)]
        points: Vec<String>,
    },
    /// Determinant sampled on a grid.
    Atlas {
        #[command(flatten)]
        model: ModelArgs,
        /// `x0,x1,y0,y1` in the model's plane.
        #[arg(long = "box", visible_alias = "wbox", allow_hyphen_values = true)]
        region: String,
        /// `NxM` samples along re and im.
        #[arg(long, default_value = "200x100")]
        grid: String,
    },
    /// Certified zeros inside a box.
    Zeros {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long = "box", visible_alias = "wbox", allow_hyphen_values = true)]
        region: String,
        #[arg(long, default_value_t = 1e-6)]
        resolution: f64,
    },
    /// Right half-plane annulus count against its envelope.
    Count {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = 0.5)]
        rl: f64,
        #[arg(long, default_value_t = 2.0)]
        ru: f64,
        #[arg(long, default_value_t = 0.5)]
        eps: f64,
    },
    /// Jensen integral of the normalized determinant at a safe radius.
    Jensen {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = 1.0)]
        r: f64,
        /// Also report the zero-count bound with this radius ratio.
        #[arg(long)]
        v: Option<f64>,
    },
    /// Carleman integral over the right half annulus.
    Carleman {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = 1.0)]
        rl: f64,
    },
    /// Zero census below a real segment for one or more fields.
    Census {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = 0.5)]
        a: f64,
        #[arg(long, default_value_t = 2.0)]
        b: f64,
        #[arg(long, default_value_t = 20.0001)]
        m: f64,
    },
    /// Survival amplitudes of a well eigenstate; with `--f`, compared with
    /// the Stark model at each field.
    Dynamics {
        #[command(flatten)]
        model: ModelArgs,
        /// Well eigenstate index.
        #[arg(long, default_value_t = 1)]
        n: u32,
        /// `a,b,delta`.
        #[arg(long, allow_hyphen_values = true)]
        window: String,
        #[arg(long)]
        t_max: f64,
        #[arg(long, default_value_t = 100)]
        steps: usize,
    },
    /// Zeros in a box checked against the strip description.
    Verify {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long = "box", allow_hyphen_values = true)]
        region: String,
        #[arg(long, default_value_t = 20.0001)]
        m: f64,
        /// Exponent of the near-origin annulus.
        #[arg(long, default_value_t = 0.8)]
        beta: f64,
        #[arg(long, default_value_t = 1e-6)]
        resolution: f64,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Eval { .. } => "eval",
            Command::Atlas { .. } => "atlas",
            Command::Zeros { .. } => "zeros",
            Command::Count { .. } => "count",
            Command::Jensen { .. } => "jensen",
            Command::Carleman { .. } => "carleman",
            Command::Census { .. } => "census",
            Command::Dynamics { .. } => "dynamics",
            Command::Verify { .. } => "verify",
        }
    }

    pub fn default_format(&self) -> Format {
        match self {
            Command::Atlas { .. } => Format::Csv,
            _ => Format::Json,
        }
    }
}
