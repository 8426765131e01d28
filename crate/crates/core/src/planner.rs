//! SpiroPlanck sequential node placement.
//!
//! Starting from a single node, points are drawn from the Spirograph curve
//! and occupied one at a time. Every new point raises the node count and the
//! density, and the isolation quantity is recomputed; the loop stops once it
//! reaches the threshold. Each pass also evaluates the Planck spectrum at a
//! wavelength proportional to the current density and records it in the
//! trace.

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::coverage::{density, isolation_probability, FieldSpec};
use crate::curve::{generate_curve, quantize, select_next, CurvePoint, QuantizedKey, SpirographParams};
use crate::error::{Error, Result};
use crate::num::{lit, Real};
use crate::radiometry::{spectral_radiance, PhysicalConstants, SpectralForm};

pub const DEFAULT_THRESHOLD: f64 = 0.1;
pub const DEFAULT_TEMPERATURE: f64 = 6000.0;
/// Metres of wavelength per unit of density.
pub const DEFAULT_WAVELENGTH_SCALE: f64 = 1e-6;
/// Default iteration cap, as a multiple of the curve length.
pub const DEFAULT_ITERATION_FACTOR: usize = 10;

/// How the next candidate point is drawn from the curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SelectPolicy {
    /// Walk the curve in ascending `t`; exhausts after the last sample.
    #[default]
    Sequential,
    /// Uniform index with replacement from a seeded ChaCha8 stream. Never
    /// exhausts, so runs end by convergence or the iteration cap.
    Random { seed: u64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlannerConfig<T> {
    pub field: FieldSpec<T>,
    pub curve: SpirographParams<T>,
    pub threshold: T,
    /// Deduplication quantum for the occupied set.
    pub epsilon: T,
    /// Temperature fed to the spectrum (K).
    pub temperature: T,
    pub wavelength_scale: T,
    pub constants: PhysicalConstants<T>,
    pub form: SpectralForm,
    /// `None` means ten times the curve length.
    pub max_iterations: Option<usize>,
    pub select: SelectPolicy,
}

impl<T: Real> PlannerConfig<T> {
    pub fn new(field: FieldSpec<T>, curve: SpirographParams<T>) -> Self {
        Self {
            field,
            curve,
            threshold: lit(DEFAULT_THRESHOLD),
            epsilon: lit(crate::curve::DEFAULT_EPSILON),
            temperature: lit(DEFAULT_TEMPERATURE),
            wavelength_scale: lit(DEFAULT_WAVELENGTH_SCALE),
            constants: PhysicalConstants::default(),
            form: SpectralForm::default(),
            max_iterations: None,
            select: SelectPolicy::default(),
        }
    }

    /// 100 m field, 7 m range, reference Spirograph, threshold 0.1.
    pub fn benchmark() -> Self {
        Self::new(FieldSpec::benchmark(), SpirographParams::figure_one())
    }

    pub fn validate(&self) -> Result<()> {
        self.field.validate()?;
        self.curve.validate()?;
        self.constants.validate()?;
        if !(self.threshold > T::zero() && self.threshold < T::one()) {
            return Err(Error::invalid("threshold", format!("must lie in (0, 1), got {}", self.threshold)));
        }
        if !(self.epsilon.is_finite() && self.epsilon > T::zero()) {
            return Err(Error::invalid("epsilon", format!("must be positive, got {}", self.epsilon)));
        }
        if !(self.temperature.is_finite() && self.temperature > T::zero()) {
            return Err(Error::invalid(
                "temperature",
                format!("must be positive, got {}", self.temperature),
            ));
        }
        if !(self.wavelength_scale.is_finite() && self.wavelength_scale > T::zero()) {
            return Err(Error::invalid(
                "wavelength_scale",
                format!("must be positive, got {}", self.wavelength_scale),
            ));
        }
        if self.max_iterations == Some(0) {
            return Err(Error::invalid("max_iterations", "must be at least 1"));
        }
        Ok(())
    }

    /// Iteration cap for a curve of `curve_len` samples.
    pub fn resolved_max_iterations(&self, curve_len: usize) -> usize {
        self.max_iterations
            .unwrap_or_else(|| DEFAULT_ITERATION_FACTOR.saturating_mul(curve_len).max(1))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Converged,
    CurveExhausted,
    IterationCapped,
}

impl Outcome {
    pub fn as_str(self) -> &'static str {
        match self {
            Outcome::Converged => "converged",
            Outcome::CurveExhausted => "curve-exhausted",
            Outcome::IterationCapped => "iteration-capped",
        }
    }
}

impl std::fmt::Display for Outcome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// State after one pass of the placement loop.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationRecord<T> {
    /// 1-based pass number.
    pub iteration: usize,
    pub n_nodes: usize,
    pub density: T,
    pub p_isolated: T,
    /// Spectrum at `density * wavelength_scale` (W m^-3 for the radiance form).
    pub radiance: T,
    /// Whether the selected point was unoccupied.
    pub accepted: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlanResult<T> {
    /// Occupied points in placement order.
    pub placed: Vec<CurvePoint<T>>,
    /// Node count, one more than `placed.len()` for the initial node.
    pub n_final: usize,
    pub density_final: T,
    pub p_final: T,
    pub trace: Vec<IterationRecord<T>>,
    pub outcome: Outcome,
}

/// Generates the configured curve and places nodes on it.
pub fn run<T: Real>(config: &PlannerConfig<T>) -> Result<PlanResult<T>> {
    config.validate()?;
    let curve = generate_curve(&config.curve)?;
    run_on_points(config, &curve)
}

/// Places nodes on an explicit point set, ignoring `config.curve`.
pub fn run_on_points<T: Real>(config: &PlannerConfig<T>, curve: &[CurvePoint<T>]) -> Result<PlanResult<T>> {
    config.validate()?;
    let max_iterations = config.resolved_max_iterations(curve.len());
    let mut selector = Selector::new(config.select);

    let mut n_nodes = 1;
    let mut lambda = density(&config.field, n_nodes);
    let mut p = isolation_probability(lambda, n_nodes)?;
    let mut closed: HashSet<QuantizedKey> = HashSet::new();
    let mut placed = Vec::new();
    let mut trace = Vec::new();

    let outcome = loop {
        if p >= config.threshold {
            break Outcome::Converged;
        }
        if trace.len() >= max_iterations {
            break Outcome::IterationCapped;
        }
        let Some(current) = selector.next(curve) else {
            break Outcome::CurveExhausted;
        };
        let accepted = closed.insert(quantize(&current, config.epsilon)?);
        if accepted {
            placed.push(current);
            n_nodes += 1;
            lambda = density(&config.field, n_nodes);
            p = isolation_probability(lambda, n_nodes)?;
        }
        let radiance = spectral_radiance(
            lambda * config.wavelength_scale,
            config.temperature,
            &config.constants,
            config.form,
        )?;
        trace.push(IterationRecord {
            iteration: trace.len() + 1,
            n_nodes,
            density: lambda,
            p_isolated: p,
            radiance,
            accepted,
        });
    };

    Ok(PlanResult {
        placed,
        n_final: n_nodes,
        density_final: lambda,
        p_final: p,
        trace,
        outcome,
    })
}

enum Selector {
    Sequential { cursor: usize },
    Random { rng: ChaCha8Rng },
}

impl Selector {
    fn new(policy: SelectPolicy) -> Self {
        match policy {
            SelectPolicy::Sequential => Selector::Sequential { cursor: 0 },
            SelectPolicy::Random { seed } => Selector::Random {
                rng: ChaCha8Rng::seed_from_u64(seed),
            },
        }
    }

    fn next<T: Copy>(&mut self, curve: &[CurvePoint<T>]) -> Option<CurvePoint<T>> {
        match self {
            Selector::Sequential { cursor } => {
                let (point, next) = select_next(curve, *cursor)?;
                *cursor = next;
                Some(point)
            }
            Selector::Random { rng } => {
                if curve.is_empty() {
                    None
                } else {
                    Some(curve[rng.gen_range(0..curve.len())])
                }
            }
        }
    }
}

pub const TRACE_COLUMNS: [&str; 6] = ["iteration", "N", "lambda", "p", "P_lambda", "accepted"];

/// One flat row per trace record, columns as in [`TRACE_COLUMNS`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow<T> {
    pub iteration: usize,
    pub n_nodes: usize,
    pub density: T,
    pub p_isolated: T,
    pub radiance: T,
    pub accepted: bool,
}

pub fn trace_to_rows<T: Real>(result: &PlanResult<T>) -> Vec<TraceRow<T>> {
    result
        .trace
        .iter()
        .map(|r| TraceRow {
            iteration: r.iteration,
            n_nodes: r.n_nodes,
            density: r.density,
            p_isolated: r.p_isolated,
            radiance: r.radiance,
            accepted: r.accepted,
        })
        .collect()
}
