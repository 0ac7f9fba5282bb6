//! Exact and asymptotic laws of integer lattice random walks jointly with
//! their occupation measures.

pub mod asymptotics;
pub mod convolve;
pub mod decomposition;
pub mod error;
pub mod exact;
pub mod montecarlo;
pub mod pmf;
pub mod scalar;
pub mod studies;
pub mod walk_model;

pub use error::{Error, Result, WalkError};
pub use exact::Limits;
pub use scalar::Real;

/// Step law and validated walk in double precision.
pub type StepDistribution = walk_model::StepDistribution<f64>;
pub type WalkSpec = walk_model::WalkSpec<f64>;
pub type Pmf = pmf::Pmf<f64>;
pub type OmegaLaw = convolve::OmegaLaw<f64>;
pub type JointTable = exact::JointTable<f64>;
pub type ExactEngine<'a> = exact::ExactEngine<'a, f64>;
pub type KilledWalk<'a> = exact::KilledWalk<'a, f64>;
pub type Decomposer<'a> = decomposition::Decomposer<'a, f64>;
pub type Quadrature = asymptotics::Quadrature<f64>;
pub type LimitParams = asymptotics::LimitParams<f64>;

/// Single-precision counterparts.
pub type StepDistribution32 = walk_model::StepDistribution<f32>;
pub type WalkSpec32 = walk_model::WalkSpec<f32>;
pub type Pmf32 = pmf::Pmf<f32>;
pub type OmegaLaw32 = convolve::OmegaLaw<f32>;
pub type JointTable32 = exact::JointTable<f32>;
pub type ExactEngine32<'a> = exact::ExactEngine<'a, f32>;
pub type KilledWalk32<'a> = exact::KilledWalk<'a, f32>;
pub type Decomposer32<'a> = decomposition::Decomposer<'a, f32>;
pub type Quadrature32 = asymptotics::Quadrature<f32>;
pub type LimitParams32 = asymptotics::LimitParams<f32>;
