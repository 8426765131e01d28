use proptest::prelude::*;

use spiroplanck::coverage::{
    coverage_binomial, coverage_poisson_default, density, isolation_probability, le_cam_bound, p_r,
    total_variation, FieldSpec,
};
use spiroplanck::curve::{generate_curve, select_next, spirograph_point, SpirographParams};
use spiroplanck::planner::{run, run_on_points, Outcome, PlannerConfig};
use spiroplanck::radiometry::{
    local_maxima, spectral_radiance, wavelength_grid, PhysicalConstants, SpectralForm,
};

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn field_strategy() -> impl Strategy<Value = FieldSpec<f64>> {
    (10.0f64..500.0, 0.01f64..0.5).prop_map(|(side, frac)| FieldSpec {
        side_length: side,
        range: side * frac,
    })
}

proptest! {
    #[test]
    fn curve_stays_inside_bounding_disc(
        r1 in 1.0f64..300.0, r2 in 1.0f64..100.0, a in -50.0f64..50.0, t in -100.0f64..100.0,
    ) {
        let params = SpirographParams::new(r1, r2, a);
        let p = spirograph_point(&params, t).unwrap();
        let bound = params.bounding_radius();
        prop_assert!(p.x.hypot(p.y) <= bound * (1.0 + 1e-12));
    }

    #[test]
    fn curve_repeats_after_closure(p in 1u32..20, q in 1u32..8, a in 0.0f64..30.0, t in 0.0f64..20.0) {
        // (r1 + r2) / r2 = p / q in lowest terms with r2 = q, r1 = p - q
        prop_assume!(gcd(p, q) == 1 && p != q);
        let params = SpirographParams::new(f64::from(p) - f64::from(q), f64::from(q), a);
        prop_assert_eq!(params.closure_denominator(), Some(q));
        let period = std::f64::consts::TAU * f64::from(q);
        let u = spirograph_point(&params, t).unwrap();
        let v = spirograph_point(&params, t + period).unwrap();
        prop_assert!((u.x - v.x).abs() < 1e-9 && (u.y - v.y).abs() < 1e-9);
    }

    #[test]
    fn curve_generation_is_deterministic(r1 in 1.0f64..300.0, r2 in 1.0f64..100.0, step in 0.005f64..0.5) {
        let params = SpirographParams::new(r1, r2, 3.0).with_sampling(step, 20.0);
        let a = generate_curve(&params).unwrap();
        let b = generate_curve(&params).unwrap();
        prop_assert_eq!(a.len(), b.len());
        for (u, v) in a.iter().zip(&b) {
            prop_assert_eq!(u.x.to_bits(), v.x.to_bits());
            prop_assert_eq!(u.y.to_bits(), v.y.to_bits());
        }
    }

    #[test]
    fn select_visits_every_index_once(step in 0.05f64..1.0, t_max in 0.1f64..30.0) {
        let curve = generate_curve(&SpirographParams::new(180.0, 40.0, 15.0).with_sampling(step, t_max)).unwrap();
        let mut cursor = 0;
        let mut seen = Vec::new();
        while let Some((point, next)) = select_next(&curve, cursor) {
            prop_assert_eq!(next, cursor + 1);
            seen.push(point.t);
            cursor = next;
        }
        prop_assert_eq!(seen.len(), curve.len());
        prop_assert!(seen.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn density_is_linear(field in field_strategy(), a in 0usize..5000, b in 0usize..5000) {
        let sum = density(&field, a + b);
        let parts = density(&field, a) + density(&field, b);
        prop_assert!((sum - parts).abs() <= 1e-12 * sum.abs().max(1e-300));
    }

    #[test]
    fn isolation_monotone_in_density(l1 in 0.0f64..20.0, dl in 0.0f64..5.0, n in 1usize..2000) {
        let lo = isolation_probability(l1, n).unwrap();
        let hi = isolation_probability(l1 + dl, n).unwrap();
        prop_assert!((0.0..=1.0).contains(&lo));
        prop_assert!(lo <= hi);
    }

    #[test]
    fn isolation_eventually_crosses(field in field_strategy(), threshold in 0.01f64..0.99) {
        let c = field.density_per_node();
        let crossed = (1usize..2_000_000).step_by(97).any(|n| {
            isolation_probability(c * n as f64, n).unwrap() >= threshold
        });
        prop_assert!(crossed);
    }

    #[test]
    fn binomial_within_le_cam(field in field_strategy(), n in 1usize..1500) {
        let p = p_r(&field).unwrap();
        let bin = coverage_binomial(&field, n).unwrap();
        prop_assert!(bin.mass.iter().all(|m| (0.0..=1.0).contains(m)));
        prop_assert!((bin.total() - 1.0).abs() < 1e-9);
        let lambda = (n - 1) as f64 * p;
        let poi = coverage_poisson_default(lambda).unwrap();
        prop_assert!(poi.mass.iter().all(|m| *m >= 0.0));
        let tv = total_variation(&bin.mass, &poi.mass);
        prop_assert!(tv <= le_cam_bound(n - 1, p) + 1e-9, "tv {} bound {}", tv, le_cam_bound(n - 1, p));
    }

    #[test]
    fn radiance_positive_and_monotone_in_temperature(
        wl_nm in 1.0f64..100_000.0, t1 in 100.0f64..20_000.0, dt in 0.0f64..5000.0,
    ) {
        let c = PhysicalConstants::rounded();
        let w = wl_nm * 1e-9;
        let lo = spectral_radiance(w, t1, &c, SpectralForm::Radiance).unwrap();
        let hi = spectral_radiance(w, t1 + dt, &c, SpectralForm::Radiance).unwrap();
        prop_assert!(lo >= 0.0);
        prop_assert!(lo <= hi);
        let x = c.h * c.c / (w * c.k * t1);
        if x <= 700.0 {
            prop_assert!(lo > 0.0);
        }
    }

    #[test]
    fn energy_density_is_four_over_c_radiance(wl_nm in 10.0f64..1e7, t in 100.0f64..20_000.0) {
        let c = PhysicalConstants::precise();
        let w = wl_nm * 1e-9;
        let r = spectral_radiance(w, t, &c, SpectralForm::Radiance).unwrap();
        let e = spectral_radiance(w, t, &c, SpectralForm::EnergyDensity).unwrap();
        prop_assume!(r > 0.0);
        prop_assert!((e / r - 4.0 / c.c).abs() <= 1e-12 * 4.0 / c.c);
    }

    #[test]
    fn planner_trace_invariants(
        threshold in 0.001f64..0.5, frac in 0.03f64..0.12, step in 0.005f64..0.05,
    ) {
        let mut config = PlannerConfig::benchmark();
        config.threshold = threshold;
        config.field.range = config.field.side_length * frac;
        config.curve = config.curve.with_sampling(step, config.curve.t_max);
        let result = run(&config).unwrap();

        prop_assert!(matches!(
            result.outcome,
            Outcome::Converged | Outcome::CurveExhausted | Outcome::IterationCapped
        ));
        prop_assert_eq!(result.n_final, result.placed.len() + 1);
        prop_assert_eq!(result.p_final >= threshold, result.outcome == Outcome::Converged);
        for w in result.trace.windows(2) {
            prop_assert!(w[0].n_nodes <= w[1].n_nodes);
            if w[1].accepted {
                prop_assert!(w[1].density > w[0].density);
            }
        }
        let last = result.trace.len().saturating_sub(1);
        for (i, r) in result.trace.iter().enumerate() {
            let lambda = density(&config.field, r.n_nodes);
            let p = isolation_probability(lambda, r.n_nodes).unwrap();
            prop_assert!((r.density - lambda).abs() <= 1e-12 * lambda);
            prop_assert!((r.p_isolated - p).abs() <= 1e-12 * p.max(1e-300));
            if !(i == last && result.outcome == Outcome::Converged) {
                prop_assert!(r.p_isolated < threshold);
            }
        }
        let mut keys: Vec<_> = result
            .placed
            .iter()
            .map(|p| spiroplanck::curve::quantize(p, config.epsilon).unwrap())
            .collect();
        keys.sort();
        keys.dedup();
        prop_assert_eq!(keys.len(), result.placed.len());
    }
}

#[test]
fn radiance_unimodal_on_sub_nanometre_grid() {
    let c = PhysicalConstants::rounded();
    let grid = wavelength_grid(50e-9, 0.5e-9, 5000e-9).unwrap();
    for t in [3000.0, 4500.0, 6000.0, 7500.0] {
        let values: Vec<f64> = grid
            .iter()
            .map(|&w| spectral_radiance(w, t, &c, SpectralForm::Radiance).unwrap())
            .collect();
        assert_eq!(local_maxima(&values), 1, "T = {t}");
    }
}

#[test]
fn planner_is_deterministic() {
    let config = PlannerConfig::<f64>::benchmark();
    assert_eq!(run(&config).unwrap(), run(&config).unwrap());
}

#[test]
fn planner_on_empty_point_set_exhausts_immediately() {
    let result = run_on_points(&PlannerConfig::<f64>::benchmark(), &[]).unwrap();
    assert_eq!(result.outcome, Outcome::CurveExhausted);
    assert_eq!(result.n_final, 1);
    assert!(result.trace.is_empty());
}
