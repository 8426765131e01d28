//! Coverage planning for dense networks.
//!
//! * [`curve`]: Spirograph sampling, sequential point selection, quantized occupancy keys.
//! * [`coverage`]: density, isolation quantity, binomial and Poisson coverage mass.
//! * [`radiometry`]: Planck spectrum with underflow and long-wavelength guards.
//! * [`planner`]: sequential SpiroPlanck placement with a per-pass trace.
//! * [`oracle`]: seeded Monte Carlo deployments for checking the analytic model.
//!
//! Everything numeric is generic over [`Real`] (`f32` or `f64`); the aliases
//! below fix the scalar for callers that do not care.

pub mod coverage;
pub mod curve;
mod error;
mod num;
pub mod oracle;
pub mod planner;
pub mod radiometry;

pub use error::{Error, Result};
pub use num::Real;

pub type SpirographParams64 = curve::SpirographParams<f64>;
pub type CurvePoint64 = curve::CurvePoint<f64>;
pub type FieldSpec64 = coverage::FieldSpec<f64>;
pub type DensityState64 = coverage::DensityState<f64>;
pub type CoverageDistribution64 = coverage::CoverageDistribution<f64>;
pub type PhysicalConstants64 = radiometry::PhysicalConstants<f64>;
pub type SpectralParams64 = radiometry::SpectralParams<f64>;
pub type PlannerConfig64 = planner::PlannerConfig<f64>;
pub type PlanResult64 = planner::PlanResult<f64>;
pub type IterationRecord64 = planner::IterationRecord<f64>;
pub type TrialConfig64 = oracle::TrialConfig<f64>;
pub type TrialStats64 = oracle::TrialStats<f64>;

pub type SpirographParams32 = curve::SpirographParams<f32>;
pub type CurvePoint32 = curve::CurvePoint<f32>;
pub type FieldSpec32 = coverage::FieldSpec<f32>;
pub type CoverageDistribution32 = coverage::CoverageDistribution<f32>;
pub type PlannerConfig32 = planner::PlannerConfig<f32>;
pub type PlanResult32 = planner::PlanResult<f32>;
pub type TrialConfig32 = oracle::TrialConfig<f32>;
pub type TrialStats32 = oracle::TrialStats<f32>;
