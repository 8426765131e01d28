//! Analytic coverage model for a square deployment field.
//!
//! Density is the expected neighbour count `N pi R^2 / A`. The isolation
//! quantity `(1 - e^-lambda)^N` is evaluated exactly as the planner consumes
//! it; under uniform deployment it approximates the probability that *no*
//! node is isolated, which is what [`crate::oracle`] measures.

use crate::error::{Error, Result};
use crate::num::{count, lit, Real};

/// Cumulative mass the default Poisson truncation must exceed.
pub const POISSON_MASS_TARGET: f64 = 1.0 - 1e-9;

/// Square deployment field with a uniform node range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldSpec<T> {
    /// Side length `L` (m).
    pub side_length: T,
    /// Node sensing / communication radius `R` (m).
    pub range: T,
}

impl<T: Real> FieldSpec<T> {
    pub fn new(side_length: T, range: T) -> Result<Self> {
        let field = Self { side_length, range };
        field.validate()?;
        Ok(field)
    }

    /// 100 m x 100 m with a 7 m range.
    pub fn benchmark() -> Self {
        Self {
            side_length: lit(100.0),
            range: lit(7.0),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.side_length.is_finite() && self.side_length > T::zero()) {
            return Err(Error::invalid(
                "side_length",
                format!("must be positive, got {}", self.side_length),
            ));
        }
        if !(self.range.is_finite() && self.range > T::zero()) {
            return Err(Error::invalid("range", format!("must be positive, got {}", self.range)));
        }
        if self.range >= self.side_length {
            return Err(Error::invalid(
                "range",
                format!("must be smaller than the side length {}, got {}", self.side_length, self.range),
            ));
        }
        Ok(())
    }

    pub fn area(&self) -> T {
        self.side_length * self.side_length
    }

    /// Disc area covered by one node, `pi R^2`.
    pub fn footprint(&self) -> T {
        T::PI() * self.range * self.range
    }

    /// Density contributed by each node, `pi R^2 / A`.
    pub fn density_per_node(&self) -> T {
        self.footprint() / self.area()
    }
}

/// Snapshot of node count, density and isolation quantity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityState<T> {
    pub n_nodes: usize,
    pub density: T,
    pub p_isolated: T,
}

impl<T: Real> DensityState<T> {
    pub fn at(field: &FieldSpec<T>, n_nodes: usize) -> Result<Self> {
        let density = density(field, n_nodes);
        let p_isolated = isolation_probability(density, n_nodes)?;
        Ok(Self {
            n_nodes,
            density,
            p_isolated,
        })
    }
}

/// `N pi R^2 / A`.
pub fn density<T: Real>(field: &FieldSpec<T>, n_nodes: usize) -> T {
    count::<T>(n_nodes) * field.footprint() / field.area()
}

/// `(1 - e^-lambda)^N`.
pub fn isolation_probability<T: Real>(density: T, n_nodes: usize) -> Result<T> {
    if n_nodes == 0 {
        return Err(Error::invalid("n_nodes", "must be at least 1"));
    }
    if !(density >= T::zero()) {
        return Err(Error::invalid("density", format!("must be nonnegative, got {density}")));
    }
    // -expm1(-lambda) keeps full precision when lambda is tiny
    let covered = -(-density).exp_m1();
    Ok(covered.powf(count(n_nodes)))
}

/// Probability that a uniformly placed node covers a given point, `pi R^2 / L^2`.
pub fn p_r<T: Real>(field: &FieldSpec<T>) -> Result<T> {
    let p = field.footprint() / field.area();
    // a few ulps of slack so the exact boundary R = L / sqrt(pi) maps to 1
    if p > T::one() + lit::<T>(8.0) * T::epsilon() {
        return Err(Error::RangeTooLarge {
            p_r: p.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(p.min(T::one()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DistributionKind {
    Binomial,
    Poisson,
}

/// Probability mass over the number of covering nodes, indexed from 0.
#[derive(Debug, Clone, PartialEq)]
pub struct CoverageDistribution<T> {
    pub kind: DistributionKind,
    pub mass: Vec<T>,
}

impl<T: Real> CoverageDistribution<T> {
    pub fn total(&self) -> T {
        self.mass.iter().fold(T::zero(), |acc, &m| acc + m)
    }

    pub fn n_max(&self) -> usize {
        self.mass.len().saturating_sub(1)
    }
}

/// Binomial mass `C(N-1, n) P_R^n (1 - P_R)^(N-1-n)` for `n = 0 ..= N-1`.
///
/// Log-binomial coefficients are accumulated term by term so the mass stays
/// finite for node counts in the thousands; exponentiation happens last.
pub fn coverage_binomial<T: Real>(field: &FieldSpec<T>, n_nodes: usize) -> Result<CoverageDistribution<T>> {
    if n_nodes == 0 {
        return Err(Error::invalid("n_nodes", "must be at least 1"));
    }
    let p = p_r(field)?;
    Ok(CoverageDistribution {
        kind: DistributionKind::Binomial,
        mass: binomial_pmf(n_nodes - 1, p),
    })
}

pub(crate) fn binomial_pmf<T: Real>(trials: usize, p: T) -> Vec<T> {
    if p <= T::zero() || p >= T::one() {
        let at = if p <= T::zero() { 0 } else { trials };
        return (0..=trials).map(|n| if n == at { T::one() } else { T::zero() }).collect();
    }
    let ln_p = p.ln();
    let ln_q = (-p).ln_1p();
    let n_total = count::<T>(trials);
    let mut ln_choose = T::zero();
    (0..=trials)
        .map(|n| {
            if n > 0 {
                let k = count::<T>(n);
                ln_choose = ln_choose + ((n_total - k + T::one()) / k).ln();
            }
            let k = count::<T>(n);
            (ln_choose + k * ln_p + (n_total - k) * ln_q).exp()
        })
        .collect()
}

/// Poisson mass `e^-lambda lambda^n / n!` for `n = 0 ..= n_max`, by the
/// recurrence `mass[n] = mass[n-1] lambda / n`.
pub fn coverage_poisson<T: Real>(lambda: T, n_max: usize) -> Result<CoverageDistribution<T>> {
    if !(lambda >= T::zero() && lambda.is_finite()) {
        return Err(Error::invalid("lambda", format!("must be finite and nonnegative, got {lambda}")));
    }
    let first = (-lambda).exp();
    let mut mass = Vec::with_capacity(n_max + 1);
    if first > T::zero() {
        let mut m = first;
        mass.push(m);
        for n in 1..=n_max {
            m = m * lambda / count(n);
            mass.push(m);
        }
    } else {
        // e^-lambda underflows; run the same recurrence on logarithms
        let ln_lambda = lambda.ln();
        let mut ln_m = -lambda;
        mass.push(T::zero());
        for n in 1..=n_max {
            ln_m = ln_m + ln_lambda - count::<T>(n).ln();
            mass.push(ln_m.exp());
        }
    }
    Ok(CoverageDistribution {
        kind: DistributionKind::Poisson,
        mass,
    })
}

/// Default truncation: the smallest `n` whose cumulative mass exceeds
/// `1 - 1e-9`, capped at `floor(lambda + 12 sqrt(lambda) + 20)`.
pub fn poisson_default_n_max<T: Real>(lambda: T) -> Result<usize> {
    let lambda = lambda
        .to_f64()
        .filter(|l| l.is_finite() && *l >= 0.0)
        .ok_or_else(|| Error::invalid("lambda", format!("must be finite and nonnegative, got {lambda}")))?;
    let cap = (lambda + 12.0 * lambda.sqrt() + 20.0).floor() as usize;
    let dist = coverage_poisson(lambda, cap)?;
    let mut cumulative = 0.0;
    for (n, m) in dist.mass.iter().enumerate() {
        cumulative += m;
        if cumulative > POISSON_MASS_TARGET {
            return Ok(n);
        }
    }
    Ok(cap)
}

/// [`coverage_poisson`] truncated by [`poisson_default_n_max`].
pub fn coverage_poisson_default<T: Real>(lambda: T) -> Result<CoverageDistribution<T>> {
    coverage_poisson(lambda, poisson_default_n_max(lambda)?)
}

/// Total variation distance `0.5 sum |p_n - q_n|` over the union of supports.
///
/// Mass missing from a truncated input (one minus its total) is counted as
/// disagreement, so the result is an upper bound on the distance between
/// the untruncated distributions.
pub fn total_variation<T: Real>(p: &[T], q: &[T]) -> T {
    let len = p.len().max(q.len());
    let at = |v: &[T], i: usize| v.get(i).copied().unwrap_or_else(T::zero);
    let body = (0..len).fold(T::zero(), |acc, i| acc + (at(p, i) - at(q, i)).abs());
    let missing = |v: &[T]| (T::one() - v.iter().fold(T::zero(), |a, &m| a + m)).max(T::zero());
    let half: T = lit(0.5);
    (half * (body + missing(p) + missing(q))).min(T::one())
}

/// Le Cam's bound on the binomial-to-Poisson total variation, `trials p^2`.
pub fn le_cam_bound<T: Real>(trials: usize, p: T) -> T {
    count::<T>(trials) * p * p
}
