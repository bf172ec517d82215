//! Command-line grammar. Every argument struct is also serialisable so a run
//! can be recorded in its manifest and replayed later.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use entbound::Tolerances;
use serde::{Deserialize, Serialize};

use crate::range::{RangeSpec, SiteRange};

#[derive(Parser, Debug)]
#[command(name = "entbound", version, about = "Entanglement measures and bounds for quantum states and field theories")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GlobalArgs {
    /// Seed for every randomised optimiser or sampler.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Validation tolerances applied to input states.
    #[arg(long = "tol-profile", global = true, value_enum, default_value_t = TolProfile::Strict)]
    pub tol_profile: TolProfile,
    /// Output file; a manifest is written next to it. Defaults to stdout.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TolProfile {
    Strict,
    Lattice,
}

impl TolProfile {
    pub fn tolerances(self) -> Tolerances {
        match self {
            Self::Strict => Tolerances::STRICT,
            Self::Lattice => Tolerances::LATTICE,
        }
    }
}

#[derive(Subcommand, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "snake_case")]
pub enum Command {
    /// Entanglement measures of a bipartite state file.
    Measures(MeasuresArgs),
    /// Lattice Klein-Gordon decay of the bounds with the gap (CSV).
    Gaussian(GaussianArgs),
    /// Vacuum bound of an integrable model against mR (CSV).
    Integrable(IntegrableArgs),
    /// Dirac field bound against the corridor width ε (CSV).
    Dirac(DiracArgs),
    /// Conformal bounds: character sums, diamonds and chiral intervals.
    Cft(CftArgs),
    /// Statistical dimensions and charged-state entanglement shifts.
    Sectors(SectorsArgs),
    /// Lower-bound toolkit: s(x), correlator and area-law bounds.
    Lower(LowerArgs),
    /// Parameter sweep over one domain, or replay of a manifest.
    Sweep(SweepArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasureName {
    Ei,
    Er,
    En,
    Em,
    Eb,
}

impl MeasureName {
    pub fn label(self) -> &'static str {
        match self {
            Self::Ei => "E_I",
            Self::Er => "E_R",
            Self::En => "E_N",
            Self::Em => "E_M",
            Self::Eb => "E_B",
        }
    }
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasuresArgs {
    /// State file: {"dimA", "dimB", "re", "im"}.
    #[arg(long)]
    pub state: PathBuf,
    #[arg(long, value_enum, value_delimiter = ',', default_values_t = [MeasureName::Ei, MeasureName::Er, MeasureName::En, MeasureName::Em, MeasureName::Eb])]
    pub measures: Vec<MeasureName>,
    /// Random restarts of the relative-entropy optimiser.
    #[arg(long, default_value_t = 8)]
    pub restarts: usize,
    #[arg(long = "max-iterations", default_value_t = 5000)]
    pub max_iterations: usize,
    /// Product components per random start (default 2·dimA·dimB).
    #[arg(long)]
    pub components: Option<usize>,
    #[arg(long = "bell-restarts", default_value_t = 8)]
    pub bell_restarts: usize,
    #[arg(long = "bell-iterations", default_value_t = 500)]
    pub bell_iterations: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryArg {
    Dirichlet,
    Periodic,
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaussianArgs {
    #[arg(long, default_value_t = 96)]
    pub sites: usize,
    #[arg(long, default_value_t = 1.0)]
    pub mass: f64,
    #[arg(long, default_value_t = 0.25)]
    pub spacing: f64,
    /// Sites of region A, half-open `i..j`.
    #[arg(long = "regionA")]
    pub region_a: SiteRange,
    /// Gaps in sites: `g..G`, `g..G:n` or a list.
    #[arg(long)]
    pub gap: RangeSpec,
    /// Random test functions per gap for the correlator lower bound.
    #[arg(long, default_value_t = 64)]
    pub trials: usize,
    #[arg(long, value_enum, default_value_t = BoundaryArg::Dirichlet)]
    pub boundary: BoundaryArg,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelArg {
    SinhGordon,
    /// S-matrix given by `--poles`.
    Poles,
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntegrableArgs {
    #[arg(long, value_enum, default_value_t = ModelArg::SinhGordon)]
    pub model: ModelArg,
    /// Sinh-Gordon coupling.
    #[arg(long)]
    pub g: Option<f64>,
    /// Pole parameters b_k ∈ (0, π/2), comma separated, odd count.
    #[arg(long, value_delimiter = ',')]
    pub poles: Vec<f64>,
    /// Values of m·R.
    #[arg(long = "mR")]
    pub m_r: RangeSpec,
    /// Strip width κ, below the smallest pole.
    #[arg(long, default_value_t = 0.3)]
    pub kappa: f64,
    /// Fraction δ ∈ (0, 1) of the distance traded for convergence.
    #[arg(long, default_value_t = 0.1)]
    pub delta: f64,
    #[arg(long, default_value_t = 1.0)]
    pub mass: f64,
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiracArgs {
    /// Fermion mass.
    #[arg(long)]
    pub m: f64,
    /// Corridor widths, spaced logarithmically for spans.
    #[arg(long)]
    pub eps: RangeSpec,
    /// Radius of the transverse circle; omit for one spatial dimension.
    #[arg(long = "circle-radius")]
    pub circle_radius: Option<f64>,
    /// Mode cutoff slack δ.
    #[arg(long, default_value_t = 0.1)]
    pub delta: f64,
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CftArgs {
    /// `free-scalar-4d` or a CSV file with rows `delta,sL,sR,mult`.
    #[arg(long)]
    pub spectrum: Option<String>,
    /// Concentric radius ratio r/R.
    #[arg(long)]
    pub ratio: Option<RangeSpec>,
    #[arg(long)]
    pub tau: Option<f64>,
    #[arg(long, default_value_t = 0.0)]
    pub theta: f64,
    /// JSON file with `a_plus`, `a_minus`, `b_plus`, `b_minus` tips.
    #[arg(long)]
    pub diamonds: Option<PathBuf>,
    /// CSV file with rows `l0,degeneracy`.
    #[arg(long)]
    pub chiral: Option<PathBuf>,
    /// Chiral cross-ratio ξ.
    #[arg(long)]
    pub xi: Option<RangeSpec>,
    /// Chiral intervals `a1,a2,b2,b1`.
    #[arg(long, value_delimiter = ',')]
    pub intervals: Vec<f64>,
    /// Truncation level of the tabulated free-scalar spectrum.
    #[arg(long = "max-level", default_value_t = 60)]
    pub max_level: usize,
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SectorsArgs {
    /// Young diagram rows, e.g. `6,4,1`.
    #[arg(long)]
    pub young: Option<String>,
    /// Rank N of the symmetry group.
    #[arg(long = "N")]
    pub n: Option<u64>,
    /// Number of charges of this type.
    #[arg(long, default_value_t = 1)]
    pub count: u32,
    /// Minimal-model label `p,m,n`.
    #[arg(long = "minimal-model")]
    pub minimal_model: Option<String>,
    /// μ-index of the minimal model `p`.
    #[arg(long)]
    pub mu: Option<u32>,
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LowerArgs {
    /// Evaluate s(x).
    #[arg(long = "s-of")]
    pub s_of: Option<f64>,
    /// Area-law packing bound in dimension `d=<n>`.
    #[arg(long)]
    pub area: Option<String>,
    /// Boundary area |∂A| for d ≥ 2.
    #[arg(long, default_value_t = 1.0)]
    pub boundary: f64,
    /// Corridor width ε.
    #[arg(long, default_value_t = 0.01)]
    pub eps: f64,
    /// Distillable entanglement per region pair; no positive value is known.
    #[arg(long, default_value_t = 0.0)]
    pub d2: f64,
    /// Interval lengths `|A|,|B|` for d = 1.
    #[arg(long, value_delimiter = ',', default_values_t = [1.0, 1.0])]
    pub lengths: Vec<f64>,
    /// State file for the correlator lower bound on E_I.
    #[arg(long)]
    pub state: Option<PathBuf>,
    /// Random observables tried for the correlator bound.
    #[arg(long, default_value_t = 64)]
    pub trials: usize,
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepArgs {
    /// Replay the run recorded in this manifest.
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    #[command(subcommand)]
    pub domain: Option<SweepDomain>,
}

#[derive(Subcommand, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "domain", rename_all = "snake_case")]
pub enum SweepDomain {
    Gaussian(GaussianArgs),
    Integrable(IntegrableArgs),
    Dirac(DiracArgs),
    Cft(CftArgs),
}
