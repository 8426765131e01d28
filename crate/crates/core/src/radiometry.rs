//! Planck black-body spectrum.

use crate::error::{Error, Result};
use crate::num::{count, lit, Real};

/// Exponent `hc / (lambda k T)` above which the spectrum is reported as 0.
pub const UNDERFLOW_EXPONENT: f64 = 700.0;

/// Exponent below which `e^x - 1` is replaced by `x (1 + x / 2)`.
pub const SMALL_EXPONENT: f64 = 1e-4;

/// Root of `(x - 5) e^x + 5 = 0`, the Wien displacement exponent.
pub const WIEN_EXPONENT: f64 = 4.965_114_231_744_276;

/// Reference temperatures of the three-curve spectrum plot (K).
pub const REFERENCE_TEMPERATURES: [f64; 3] = [4500.0, 6000.0, 7500.0];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants<T> {
    /// Planck constant (J s).
    pub h: T,
    /// Speed of light (m/s).
    pub c: T,
    /// Boltzmann constant (J/K).
    pub k: T,
}

impl<T: Real> PhysicalConstants<T> {
    /// Three-significant-figure set: h = 6.626e-34, c = 3e8, k = 1.38e-23.
    pub fn rounded() -> Self {
        Self {
            h: lit(6.626e-34),
            c: lit(3e8),
            k: lit(1.38e-23),
        }
    }

    /// Five-significant-figure set: h = 6.6261e-34, c = 2.9979e8, k = 1.3807e-23.
    pub fn precise() -> Self {
        Self {
            h: lit(6.6261e-34),
            c: lit(2.9979e8),
            k: lit(1.3807e-23),
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("h", self.h), ("c", self.c), ("k", self.k)] {
            if !(v.is_finite() && v > T::zero()) {
                return Err(Error::invalid(name, format!("physical constant must be positive, got {v}")));
            }
        }
        Ok(())
    }
}

impl<T: Real> Default for PhysicalConstants<T> {
    fn default() -> Self {
        Self::rounded()
    }
}

/// Prefactor of the spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SpectralForm {
    /// `2 pi h c^2 / (lambda^5 (e^x - 1))`, emitted power per m^2 per m of wavelength.
    #[default]
    Radiance,
    /// `8 pi h c / (lambda^5 (e^x - 1))`, energy density per m of wavelength.
    EnergyDensity,
}

/// Wavelength grid `start, start + step, ...` up to and including `end`.
pub fn wavelength_grid<T: Real>(start: T, step: T, end: T) -> Result<Vec<T>> {
    if !(start.is_finite() && start > T::zero()) {
        return Err(Error::invalid("lambda_start", format!("must be positive, got {start}")));
    }
    if !(step.is_finite() && step > T::zero()) {
        return Err(Error::invalid("lambda_step", format!("must be positive, got {step}")));
    }
    if !(end.is_finite() && end >= start) {
        return Err(Error::invalid("lambda_end", format!("must be at least lambda_start, got {end}")));
    }
    let steps = ((end - start) / step).to_f64().unwrap_or(f64::INFINITY);
    let steps = (steps * (1.0 + 1e-9)).floor();
    if !(steps < 1e8) {
        return Err(Error::invalid("lambda_step", "grid too large"));
    }
    Ok((0..=steps as usize).map(|i| start + count::<T>(i) * step).collect())
}

/// The 1 nm to 3000 nm grid in 10 nm steps (300 wavelengths, last 2991 nm).
pub fn listing_grid<T: Real>() -> Vec<T> {
    wavelength_grid(lit(1e-9), lit(10e-9), lit(3000e-9)).expect("static grid is valid")
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralParams<T> {
    pub temperature: T,
    pub grid: Vec<T>,
    pub constants: PhysicalConstants<T>,
    pub form: SpectralForm,
}

impl<T: Real> SpectralParams<T> {
    pub fn new(temperature: T) -> Self {
        Self {
            temperature,
            grid: listing_grid(),
            constants: PhysicalConstants::default(),
            form: SpectralForm::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_temperature(self.temperature)?;
        self.constants.validate()?;
        if let Some(bad) = self.grid.iter().find(|w| !(w.is_finite() && **w > T::zero())) {
            return Err(Error::invalid("grid", format!("wavelengths must be positive, got {bad}")));
        }
        if self.grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid("grid", "wavelengths must be strictly increasing"));
        }
        Ok(())
    }
}

fn check_temperature<T: Real>(t: T) -> Result<()> {
    if t.is_finite() && t > T::zero() {
        Ok(())
    } else {
        Err(Error::invalid("temperature", format!("must be positive, got {t}")))
    }
}

/// Planck spectrum at `wavelength` (m) and `temperature` (K).
///
/// Returns exactly 0 once `hc / (lambda k T)` exceeds 700, and switches to
/// `x (1 + x/2)` for `e^x - 1` below `x = 1e-4`.
pub fn spectral_radiance<T: Real>(
    wavelength: T,
    temperature: T,
    constants: &PhysicalConstants<T>,
    form: SpectralForm,
) -> Result<T> {
    if !(wavelength.is_finite() && wavelength > T::zero()) {
        return Err(Error::invalid("wavelength", format!("must be positive, got {wavelength}")));
    }
    check_temperature(temperature)?;
    let PhysicalConstants { h, c, k } = *constants;
    let x = h * c / (wavelength * k * temperature);
    if x > lit(UNDERFLOW_EXPONENT) {
        return Ok(T::zero());
    }
    let denom = if x < lit(SMALL_EXPONENT) {
        x * (T::one() + x / lit(2.0))
    } else {
        x.exp() - T::one()
    };
    let numerator = match form {
        SpectralForm::Radiance => lit::<T>(2.0) * T::PI() * h * c * c,
        SpectralForm::EnergyDensity => lit::<T>(8.0) * T::PI() * h * c,
    };
    // divide in stages: lambda^5 alone underflows single precision
    let l2 = wavelength * wavelength;
    Ok(numerator / l2 / l2 / wavelength / denom)
}

/// One `(wavelength, value)` pair per grid point, in grid order.
pub fn spectral_curve<T: Real>(params: &SpectralParams<T>) -> Result<Vec<(T, T)>> {
    params.validate()?;
    params
        .grid
        .iter()
        .map(|&w| spectral_radiance(w, params.temperature, &params.constants, params.form).map(|v| (w, v)))
        .collect()
}

/// Root of `(x - 5) e^x + 5` on `[4, 5]` by bisection to 1e-12.
pub fn wien_exponent() -> f64 {
    let f = |x: f64| (x - 5.0) * x.exp() + 5.0;
    let (mut lo, mut hi) = (4.0, 5.0);
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Wavelength of the spectral peak, `hc / (k T x*)`.
pub fn wien_peak<T: Real>(temperature: T, constants: &PhysicalConstants<T>) -> Result<T> {
    check_temperature(temperature)?;
    constants.validate()?;
    Ok(constants.h * constants.c / (constants.k * temperature * lit(wien_exponent())))
}

/// Index of the largest value; the first one on ties.
pub fn argmax<T: Real>(curve: &[(T, T)]) -> Option<usize> {
    curve
        .iter()
        .enumerate()
        .fold(None, |best: Option<(usize, T)>, (i, &(_, v))| match best {
            Some((_, b)) if b >= v => best,
            _ => Some((i, v)),
        })
        .map(|(i, _)| i)
}

/// Number of strict interior local maxima after collapsing plateaus.
pub fn local_maxima<T: Real>(values: &[T]) -> usize {
    let mut collapsed: Vec<T> = Vec::with_capacity(values.len());
    for &v in values {
        if collapsed.last() != Some(&v) {
            collapsed.push(v);
        }
    }
    collapsed
        .windows(3)
        .filter(|w| w[1] > w[0] && w[1] > w[2])
        .count()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rounded() -> PhysicalConstants<f64> {
        PhysicalConstants::rounded()
    }

    #[test]
    fn point_value_at_500nm() {
        let v = spectral_radiance(500e-9, 6000.0, &rounded(), SpectralForm::Radiance).unwrap();
        // 9.93492e13 from a 40-digit evaluation
        assert!(((v - 9.934_924_365_85e13) / 9.934_924_365_85e13).abs() < 1e-9, "{v:e}");
        assert!(((v - 9.94e13) / 9.94e13).abs() < 0.01);
    }

    #[test]
    fn underflow_guard() {
        let v = spectral_radiance(1e-9, 4500.0, &rounded(), SpectralForm::Radiance).unwrap();
        assert_eq!(v, 0.0);
    }

    #[test]
    fn rayleigh_jeans_limit() {
        let c = rounded();
        let v = spectral_radiance(1.0, 6000.0, &c, SpectralForm::Radiance).unwrap();
        let rj = 2.0 * std::f64::consts::PI * c.c * c.k * 6000.0;
        assert!(((v - rj) / rj).abs() < 1e-3);
    }

    #[test]
    fn rejects_nonpositive_inputs() {
        let c = rounded();
        assert!(spectral_radiance(0.0, 6000.0, &c, SpectralForm::Radiance).is_err());
        assert!(spectral_radiance(-1e-9, 6000.0, &c, SpectralForm::Radiance).is_err());
        assert!(spectral_radiance(500e-9, 0.0, &c, SpectralForm::Radiance).is_err());
        assert!(wien_peak(-1.0, &c).is_err());
    }

    #[test]
    fn listing_grid_shape() {
        let g: Vec<f64> = listing_grid();
        assert_eq!(g.len(), 300);
        assert_eq!(g[0], 1e-9);
        assert!((g[299] - 2991e-9).abs() < 1e-18);
    }

    #[test]
    fn grid_validation() {
        assert!(wavelength_grid(0.0, 1e-9, 1e-6).is_err());
        assert!(wavelength_grid(1e-9, 0.0, 1e-6).is_err());
        assert!(wavelength_grid(1e-6, 1e-9, 1e-7).is_err());
        assert_eq!(wavelength_grid(1e-9, 1e-9, 1e-9).unwrap().len(), 1);
        let mut p = SpectralParams::new(6000.0);
        p.grid = vec![2e-9, 1e-9];
        assert!(spectral_curve(&p).is_err());
    }

    #[test]
    fn single_point_curve_matches_radiance() {
        let mut p = SpectralParams::new(6000.0);
        p.grid = vec![500e-9];
        let curve = spectral_curve(&p).unwrap();
        let direct = spectral_radiance(500e-9, 6000.0, &rounded(), SpectralForm::Radiance).unwrap();
        assert_eq!(curve, vec![(500e-9, direct)]);
    }

    #[test]
    fn wien_root() {
        let x = wien_exponent();
        assert!((x - WIEN_EXPONENT).abs() < 1e-11);
        let peak = wien_peak(6000.0, &rounded()).unwrap();
        assert!((peak - 483.5e-9).abs() < 0.1e-9, "{peak:e}");
        let doubled = wien_peak(12000.0, &rounded()).unwrap();
        assert!((doubled - 0.5 * peak).abs() <= 1e-15 * peak);
    }

    #[test]
    fn energy_density_ratio() {
        let c = rounded();
        for w in [300e-9, 500e-9, 1e-6, 1.0] {
            let r = spectral_radiance(w, 6000.0, &c, SpectralForm::Radiance).unwrap();
            let e = spectral_radiance(w, 6000.0, &c, SpectralForm::EnergyDensity).unwrap();
            assert!(((e / r) - 4.0 / c.c).abs() < 1e-12 * (4.0 / c.c));
        }
    }

    #[test]
    fn argmax_first_on_ties() {
        assert_eq!(argmax(&[(1.0, 0.0), (2.0, 3.0), (3.0, 3.0)]), Some(1));
        assert_eq!(argmax::<f64>(&[]), None);
    }

    #[test]
    fn maxima_counting() {
        assert_eq!(local_maxima(&[0.0, 0.0, 1.0, 3.0, 3.0, 2.0]), 1);
        assert_eq!(local_maxima(&[0.0, 2.0, 1.0, 2.0, 0.0]), 2);
        assert_eq!(local_maxima(&[1.0, 2.0, 3.0]), 0);
    }

    #[test]
    fn single_precision_stays_finite() {
        let c = PhysicalConstants::<f32>::rounded();
        let v = spectral_radiance(500e-9f32, 6000.0, &c, SpectralForm::Radiance).unwrap();
        assert!(v.is_finite() && ((v - 9.9349e13) / 9.9349e13).abs() < 1e-3, "{v:e}");
    }
}
