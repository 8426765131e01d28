//! Spirograph curve sampling, point selection and coordinate quantization.
//!
//! The curve is the two-arm parametric form
//!
//! ```text
//! x = (r1 + r2) cos t - (r2 + a) cos(((r1 + r2) / r2) t)
//! y = (r1 + r2) sin t - (r2 + a) sin(((r1 + r2) / r2) t)
//! ```
//!
//! evaluated literally with the sum `r1 + r2`. Planner placement walks the
//! sampled curve in ascending `t` and uses [`QuantizedKey`] for occupancy.

use crate::error::{Error, Result};
use crate::num::{count, lit, Real};

/// Default parameter increment per sample, in radians.
pub const DEFAULT_T_STEP: f64 = 0.01;

/// Default deduplication quantum, in model units.
pub const DEFAULT_EPSILON: f64 = 1e-6;

/// Largest closure multiple searched when deriving the default `t_max`.
/// Ratios with no denominator up to this bound get `t_max = 64 pi`.
const MAX_CLOSURE_DENOMINATOR: u32 = 32;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpirographParams<T> {
    /// Fixed-circle radius.
    pub r1: T,
    /// Rolling-circle radius. Must be nonzero.
    pub r2: T,
    /// Pen offset from the rolling circle's centre.
    pub a: T,
    /// Parameter increment per sample (radians).
    pub t_step: T,
    /// Parameter upper bound (radians), inclusive.
    pub t_max: T,
}

impl<T: Real> SpirographParams<T> {
    /// Geometry with the default sampling: `t_step = 0.01` and `t_max` one
    /// full closure of the curve.
    pub fn new(r1: T, r2: T, a: T) -> Self {
        let t_max = default_t_max(r1, r2);
        Self {
            r1,
            r2,
            a,
            t_step: lit(DEFAULT_T_STEP),
            t_max,
        }
    }

    pub fn with_sampling(mut self, t_step: T, t_max: T) -> Self {
        self.t_step = t_step;
        self.t_max = t_max;
        self
    }

    /// Geometry of the reference figure: `r1 = 180, r2 = 40, a = 15`.
    pub fn figure_one() -> Self {
        Self::new(lit(180.0), lit(40.0), lit(15.0))
    }

    pub fn validate(&self) -> Result<()> {
        self.validate_geometry()?;
        if !(self.t_step.is_finite() && self.t_step > T::zero()) {
            return Err(Error::invalid("t_step", format!("must be positive, got {}", self.t_step)));
        }
        if !(self.t_max.is_finite() && self.t_max > T::zero()) {
            return Err(Error::invalid("t_max", format!("must be positive, got {}", self.t_max)));
        }
        Ok(())
    }

    fn validate_geometry(&self) -> Result<()> {
        for (name, v) in [("r1", self.r1), ("r2", self.r2), ("a", self.a)] {
            if !v.is_finite() {
                return Err(Error::invalid(name, format!("must be finite, got {v}")));
            }
        }
        if self.r2 == T::zero() {
            return Err(Error::invalid("r2", "must be nonzero (divides the frequency ratio)"));
        }
        Ok(())
    }

    /// Angular frequency of the second arm, `(r1 + r2) / r2`.
    pub fn frequency_ratio(&self) -> T {
        (self.r1 + self.r2) / self.r2
    }

    /// Radius every sample stays within: `|r1 + r2| + |r2 + a|`.
    pub fn bounding_radius(&self) -> T {
        (self.r1 + self.r2).abs() + (self.r2 + self.a).abs()
    }

    /// Reduced denominator `q` of the frequency ratio, when one exists up to 32.
    /// The curve repeats with period `2 pi q`.
    pub fn closure_denominator(&self) -> Option<u32> {
        closure_denominator(self.r1, self.r2)
    }
}

fn closure_denominator<T: Real>(r1: T, r2: T) -> Option<u32> {
    if r2 == T::zero() {
        return None;
    }
    let ratio = ((r1 + r2) / r2).to_f64()?;
    if !ratio.is_finite() {
        return None;
    }
    (1..=MAX_CLOSURE_DENOMINATOR).find(|&q| {
        let scaled = ratio * f64::from(q);
        (scaled - scaled.round()).abs() <= 1e-9 * scaled.abs().max(1.0)
    })
}

/// `2 pi q` for the reduced denominator `q` of `(r1 + r2) / r2`, or `64 pi`
/// when the ratio has no small denominator.
pub fn default_t_max<T: Real>(r1: T, r2: T) -> T {
    let turns = closure_denominator(r1, r2).unwrap_or(MAX_CLOSURE_DENOMINATOR);
    T::TAU() * lit(f64::from(turns))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint<T> {
    pub x: T,
    pub y: T,
    /// Generating parameter (radians).
    pub t: T,
}

/// Integer grid cell of a point, `(round(x / eps), round(y / eps))`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QuantizedKey {
    pub qx: i64,
    pub qy: i64,
}

/// Evaluates the curve at parameter `t`.
pub fn spirograph_point<T: Real>(params: &SpirographParams<T>, t: T) -> Result<CurvePoint<T>> {
    params.validate_geometry()?;
    if !t.is_finite() {
        return Err(Error::invalid("t", format!("must be finite, got {t}")));
    }
    Ok(eval(params, t))
}

#[inline]
fn eval<T: Real>(params: &SpirographParams<T>, t: T) -> CurvePoint<T> {
    let outer = params.r1 + params.r2;
    let pen = params.r2 + params.a;
    let inner_t = (outer / params.r2) * t;
    CurvePoint {
        x: outer * t.cos() - pen * inner_t.cos(),
        y: outer * t.sin() - pen * inner_t.sin(),
        t,
    }
}

/// Number of samples `generate_curve` produces: `floor(t_max / t_step) + 1`.
///
/// A relative slack of 1e-9 absorbs rounding in the quotient so that, for
/// example, `t_max = 2 pi, t_step = pi` yields three samples.
pub fn sample_count<T: Real>(params: &SpirographParams<T>) -> Result<usize> {
    params.validate()?;
    let quotient = (params.t_max / params.t_step).to_f64().unwrap_or(f64::INFINITY);
    let steps = (quotient * (1.0 + 1e-9)).floor();
    if !(steps < 1e9) {
        return Err(Error::invalid(
            "t_step",
            format!("yields too many samples ({quotient:.3e}) for t_max {}", params.t_max),
        ));
    }
    Ok(steps as usize + 1)
}

/// Samples the curve at `t = i * t_step` for `i = 0 ..= floor(t_max / t_step)`.
pub fn generate_curve<T: Real>(params: &SpirographParams<T>) -> Result<Vec<CurvePoint<T>>> {
    let n = sample_count(params)?;
    Ok((0..n).map(|i| eval(params, count::<T>(i) * params.t_step)).collect())
}

/// Sequential SELECT: the point under `cursor` and the advanced cursor, or
/// `None` once the curve is exhausted.
pub fn select_next<T: Copy>(curve: &[CurvePoint<T>], cursor: usize) -> Option<(CurvePoint<T>, usize)> {
    curve.get(cursor).map(|p| (*p, cursor + 1))
}

pub fn quantize<T: Real>(p: &CurvePoint<T>, epsilon: T) -> Result<QuantizedKey> {
    if !(epsilon.is_finite() && epsilon > T::zero()) {
        return Err(Error::invalid("epsilon", format!("must be positive, got {epsilon}")));
    }
    let cell = |v: T, name: &'static str| {
        (v / epsilon)
            .round()
            .to_i64()
            .ok_or_else(|| Error::invalid(name, format!("coordinate {v} overflows the quantization grid")))
    };
    Ok(QuantizedKey {
        qx: cell(p.x, "x")?,
        qy: cell(p.y, "y")?,
    })
}
