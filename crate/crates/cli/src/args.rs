use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "bo", version, about = "Birkhoff coordinates and flows for the periodic Benjamin-Ono equation")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Truncation order N.
    #[arg(long, global = true)]
    pub modes: Option<usize>,
    /// Tail tolerance of the forward map.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Seed of the randomized fixtures.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// JSON file with parameters; flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

/// Where the potential comes from.
#[derive(Debug, Args, Default)]
pub struct InputArgs {
    /// One-gap family parameter q.
    #[arg(long)]
    pub q: Option<f64>,
    /// Amplitude ε of the one-gap family (default 1, the traveling wave).
    #[arg(long)]
    pub eps: Option<f64>,
    /// Field JSON file.
    #[arg(long)]
    pub field: Option<PathBuf>,
    /// JSON list of [gamma, phi] pairs.
    #[arg(long)]
    pub gaps: Option<PathBuf>,
    /// Birkhoff state JSON file.
    #[arg(long)]
    pub state: Option<PathBuf>,
    /// Mean added to the potential.
    #[arg(long, allow_hyphen_values = true)]
    pub mean: Option<f64>,
}

#[derive(Debug, Args)]
pub struct FlowArgs {
    /// quadrature or direct.
    #[arg(long)]
    pub method: Option<String>,
    #[arg(long)]
    pub tmax: Option<f64>,
    /// Number of output intervals.
    #[arg(long)]
    pub samples: Option<usize>,
    /// Step of the direct integrator.
    #[arg(long)]
    pub dt: Option<f64>,
    /// Comma-separated Sobolev exponents to record.
    #[arg(long, allow_hyphen_values = true)]
    pub s: Option<String>,
    /// Number of gaps tracked along the trajectory.
    #[arg(long)]
    pub track_gaps: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Birkhoff coordinates of a potential.
    Forward(InputArgs),
    /// Potential of a finite-gap state.
    Inverse(InputArgs),
    /// Lax spectrum and gaps.
    Spectrum {
        #[command(flatten)]
        input: InputArgs,
        /// Also dump the eigenvectors.
        #[arg(long)]
        vectors: bool,
    },
    /// Generating function by resolvent and by product.
    Genfun {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, allow_hyphen_values = true)]
        lambda_re: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        lambda_im: Option<f64>,
        /// Number of seeded evaluation points when no λ is given.
        #[arg(long)]
        points: Option<usize>,
    },
    /// Evolve a potential.
    Evolve {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        flow: FlowArgs,
    },
    /// Quadrature against direct integration.
    Compare {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        flow: FlowArgs,
    },
    /// Deep ground states u^(k) and the ξ_k witness.
    IllposedHalf {
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        eps: Option<f64>,
        /// Length of the ξ time series.
        #[arg(long)]
        tmax: Option<f64>,
        /// Step of the ξ time series.
        #[arg(long)]
        dt: Option<f64>,
        /// Integration window "a,b".
        #[arg(long)]
        window: Option<String>,
    },
    /// Two-gap family with diverging actions.
    IllposedDeep {
        #[arg(long)]
        gamma: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        t: Option<f64>,
        /// Length of the renormalization scan.
        #[arg(long)]
        count: Option<usize>,
        #[arg(long)]
        eta_points: Option<usize>,
    },
    /// Orbital stability of a traveling wave.
    Stability {
        #[arg(long)]
        q: Option<f64>,
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        s: Option<f64>,
        #[arg(long)]
        tmax: Option<f64>,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        band: Option<usize>,
        #[arg(long, allow_hyphen_values = true)]
        shift: Option<f64>,
    },
    /// Almost-periodic returns of finite-gap data.
    Recurrence {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        horizon: Option<f64>,
        /// Phase tolerance of a return.
        #[arg(long)]
        return_eps: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        s: Option<f64>,
    },
    /// Sobolev norms along the flow.
    Normtrack {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, allow_hyphen_values = true)]
        s: Option<String>,
        #[arg(long)]
        tmax: Option<f64>,
        #[arg(long)]
        samples: Option<usize>,
        /// Horizon of an additional direct run.
        #[arg(long)]
        direct_tmax: Option<f64>,
        #[arg(long)]
        dt: Option<f64>,
    },
    /// Forward/inverse consistency on seeded finite-gap states.
    Roundtrip {
        /// Largest number of gaps per state.
        #[arg(long)]
        gaps: Option<usize>,
        #[arg(long)]
        count: Option<usize>,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Forward(_) => "forward",
            Command::Inverse(_) => "inverse",
            Command::Spectrum { .. } => "spectrum",
            Command::Genfun { .. } => "genfun",
            Command::Evolve { .. } => "evolve",
            Command::Compare { .. } => "compare",
            Command::IllposedHalf { .. } => "illposed-half",
            Command::IllposedDeep { .. } => "illposed-deep",
            Command::Stability { .. } => "stability",
            Command::Recurrence { .. } => "recurrence",
            Command::Normtrack { .. } => "normtrack",
            Command::Roundtrip { .. } => "roundtrip",
        }
    }
}
