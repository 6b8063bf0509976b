use std::f64::consts::PI;

use num_complex::Complex;
use num_rational::Ratio;
use positivity::base::{BaseHermitianForm, BasePoint, Chart};
use positivity::bundle::chern_curvature;
use positivity::numerics::{fiber_integrate, ComplexHessianStencil, FiberQuadratureRule};
use positivity::verifier::epsilon;
use positivity::{HermitianMetric64, ScenarioConfig};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn direct_sum_curvature_is_its_degrees(
        degrees in prop::collection::vec(-4i64..10, 1..4),
        r in 0.0f64..1.8,
        t in 0.0f64..6.3,
        at_infinity in any::<bool>(),
    ) {
        let h = HermitianMetric64::direct_sum(&degrees).unwrap();
        let chart = if at_infinity { Chart::Infinity } else { Chart::Origin };
        let p = BasePoint::new(chart, Complex::from_polar(r, t));
        let omega = BaseHermitianForm::<f64>::fubini_study(1.0).unwrap();
        let mut got = chern_curvature(&h, &p, &ComplexHessianStencil::default()).unwrap().eigenvalues().unwrap();
        let fs = omega.coefficient(&p).unwrap();
        got.iter_mut().for_each(|v| *v /= fs);
        got.sort_by(f64::total_cmp);
        let mut want: Vec<f64> = degrees.iter().map(|&a| a as f64).collect();
        want.sort_by(f64::total_cmp);
        for (g, w) in got.iter().zip(&want) {
            prop_assert!((g - w).abs() < 1e-5, "{got:?} vs {want:?}");
        }
    }

    #[test]
    fn weighted_volume_integrals(c0 in 0.2f64..5.0, c1 in 0.2f64..5.0, c2 in 0.2f64..5.0) {
        // ∫ (c₀ + Σ cᵢ|wᵢ|²)^{-(d+1)} dλ = π^d / (d! c₀ Π cᵢ)
        let one = fiber_integrate(
            |w: &[Complex<f64>]| Ok((c0 + c1 * w[0].norm_sqr()).powi(-2)),
            &FiberQuadratureRule::default_for_rank(2),
        ).unwrap();
        prop_assert!((one * c0 * c1 / PI - 1.0).abs() < 1e-8, "{one}");
        let two = fiber_integrate(
            |w: &[Complex<f64>]| Ok((c0 + c1 * w[0].norm_sqr() + c2 * w[1].norm_sqr()).powi(-3)),
            &FiberQuadratureRule::default_for_rank(3),
        ).unwrap();
        prop_assert!((two * 2.0 * c0 * c1 * c2 / (PI * PI) - 1.0).abs() < 1e-6, "{two}");
    }

    #[test]
    fn odd_integrands_vanish(c1 in 0.2f64..5.0, p in 1u32..4) {
        let rule = FiberQuadratureRule::default_for_rank(3);
        let v = fiber_integrate(
            |w: &[Complex<f64>]| Ok((w[0].powu(p) * w[1].conj()).re * (1.0 + c1 * w[0].norm_sqr() + w[1].norm_sqr()).powi(-6)),
            &rule,
        ).unwrap();
        prop_assert!(v.abs() < 1e-12, "{v}");
    }

    #[test]
    fn epsilon_is_a_small_positive_rational(r in 2i64..8, num in 0i64..1000) {
        // M ranges over [1, r)
        let m = Ratio::new(1, 1) + Ratio::new(num * (r - 1), 1000);
        let e = epsilon(Ratio::from_integer(r), m);
        prop_assert!(e > Ratio::from_integer(0) && e < Ratio::new(1, 5));
        prop_assert_eq!(e * Ratio::from_integer(5) * (Ratio::from_integer(r) + m), Ratio::from_integer(r) - m);
    }

    #[test]
    fn configuration_round_trips(
        degrees in prop::collection::vec(-3i64..12, 2..4),
        omega in 0.5f64..9.0,
        k_max in prop::option::of(1usize..8),
    ) {
        let text = format!(
            "[bundle]\nrank = {}\ndegrees = {:?}\n[metrics]\nomega = {omega}\n[run]\ntheorems = [1, 3]\n{}",
            degrees.len(),
            degrees,
            k_max.map(|k| format!("k_max = {k}\n")).unwrap_or_default(),
        );
        let cfg = ScenarioConfig::parse(&text).unwrap();
        prop_assert_eq!(ScenarioConfig::parse(&cfg.to_toml()).unwrap(), cfg);
    }
}
