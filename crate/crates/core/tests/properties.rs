use std::f64::consts::TAU;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use robin_core::effective::{assemble_effective, bloch_bands, effective_eigs, harmonic_levels};
use robin_core::geometry::{build_arc_curve, build_cell, min_layer_width, CellSpec, CurveSpec};
use robin_core::harness::{fit_exponent, gap_report, Figure, Series};
use robin_core::layer::{bracket_eigenvalues, LayerConfig};
use robin_core::linalg::{dense_eigvalsh, lanczos_lowest, LanczosOptions, SparseSym, SymBuilder};
use robin_core::model1d::{solve_dirichlet_model, solve_robin_model};
use robin_core::oracles::{disk_shooting, ShootingProblem};

fn random_sparse(n: usize, seed: u64) -> SparseSym<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut b = SymBuilder::new(n);
    for i in 0..n {
        b.add(i, i, rng.gen_range(-3.0..3.0));
        for _ in 0..2 {
            let j = rng.gen_range(0..n);
            if j != i {
                b.add(i.min(j), i.max(j), rng.gen_range(-1.0..1.0));
            }
        }
    }
    b.build()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn lanczos_agrees_with_dense(n in 20usize..120, seed in any::<u64>()) {
        let a = random_sparse(n, seed);
        let k = 5.min(n);
        let l = lanczos_lowest(&a, k, &LanczosOptions::default()).unwrap();
        let d = dense_eigvalsh(&a.to_dense()).unwrap();
        prop_assert!(l.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
        for j in 0..k {
            let tol = 1e-8f64.max(1e-10 * d[j].abs());
            prop_assert!((l.eigenvalues[j] - d[j]).abs() <= tol, "j={} {} vs {}", j, l.eigenvalues[j], d[j]);
            if l.converged[j] {
                prop_assert!(l.residuals[j] <= LanczosOptions::<f64>::default().tol);
            }
        }
        let again = lanczos_lowest(&a, k, &LanczosOptions::default()).unwrap();
        prop_assert_eq!(
            l.eigenvalues.iter().map(|v| v.to_bits()).collect::<Vec<_>>(),
            again.eigenvalues.iter().map(|v| v.to_bits()).collect::<Vec<_>>()
        );
    }

    #[test]
    fn model_operators_satisfy_their_boundary_conditions(alpha in 0.5f64..200.0, ad in 2.0f64..30.0, beta_frac in 0.0f64..0.5) {
        let delta = ad / alpha;
        let beta = beta_frac * alpha;
        let d = solve_dirichlet_model(alpha, delta).unwrap();
        let n = solve_robin_model(alpha, delta, 0.0).unwrap();
        let r = solve_robin_model(alpha, delta, beta).unwrap();
        for m in [&d, &n, &r] {
            let (near, far) = m.bc_residuals();
            prop_assert!(near <= 1e-12 && far <= 1e-12, "{} {}", near, far);
            prop_assert!((m.norm_sq() - 1.0).abs() <= 1e-12);
            for i in 1..=10 {
                let t = delta * i as f64 / 11.0;
                let h = 1e-4 * delta;
                let psi2 = (m.dpsi(t + h) - m.dpsi(t - h)) / (2.0 * h);
                let res = (-psi2 - m.e * m.psi(t)).abs();
                prop_assert!(res <= 1e-5 * m.e.abs() * m.psi(0.0).abs().max(1.0));
            }
        }
        prop_assert!(d.e >= n.e);
        prop_assert!(d.e_plus_alpha_sq() > 0.0 && d.e >= -alpha * alpha);
    }

    #[test]
    fn ellipse_turning_number_and_layer_width(a in 0.5f64..3.0, ratio in 0.3f64..1.0) {
        let c = build_arc_curve::<f64>(&CurveSpec::Ellipse { a, b: a * ratio }, 512).unwrap();
        prop_assert!((c.total_curvature() - TAU).abs() < 1e-6);
        let w = min_layer_width(&c);
        prop_assert!(w > 0.0 && w.is_finite());
        prop_assert!((w - 0.5 / c.kappa_max()).abs() < 1e-9);
    }

    #[test]
    fn perturbed_circle_turning_number(eps in 0.0f64..0.05, mode in 2u32..6) {
        let c = build_arc_curve::<f64>(&CurveSpec::PerturbedCircle { radius: 1.0, amplitude: eps, mode }, 512).unwrap();
        prop_assert!((c.total_curvature() - TAU).abs() < 1e-6);
        prop_assert!(min_layer_width(&c) > 0.0);
    }

    #[test]
    fn circle_effective_ground_state_is_minus_alpha_over_r(r in 0.3f64..3.0, alpha in 0.0f64..500.0) {
        let c = build_arc_curve::<f64>(&CurveSpec::Circle { radius: r }, 256).unwrap();
        let s = effective_eigs(&assemble_effective(&c, alpha, 256).unwrap(), 1).unwrap();
        prop_assert!((s.eigenvalues[0] + alpha / r).abs() <= 1e-9 * alpha.max(1.0));
    }

    #[test]
    fn effective_ground_state_is_concave(a0 in 1.0f64..200.0, h in 0.1f64..5.0) {
        let c = build_arc_curve::<f64>(&CurveSpec::Ellipse { a: 2.0, b: 1.0 }, 256).unwrap();
        let e = |a: f64| effective_eigs(&assemble_effective(&c, a, 256).unwrap(), 1).unwrap().eigenvalues[0];
        let d2 = e(a0 - h.min(a0)) - 2.0 * e(a0) + e(a0 + h.min(a0));
        prop_assert!(d2 <= 1e-8 * a0, "{}", d2);
    }

    #[test]
    fn bloch_bands_are_symmetric_in_theta(alpha in 0.0f64..300.0, amp in 0.0f64..2.0) {
        let cell = build_cell::<f64>(&CellSpec::Cosine { mean: 1.0, amplitude: amp, period: TAU }, 128).unwrap();
        let bs = bloch_bands(&cell, alpha, 18, 3).unwrap();
        let m = bs.theta.len();
        for b in &bs.bands {
            for i in 1..m {
                // θ_i and 2π − θ_i sit at mirrored indices
                let j = m - i;
                prop_assert!((b[i] - b[j]).abs() <= 1e-8 * alpha.max(1.0) + 1e-9, "{} {}", b[i], b[j]);
            }
        }
        for g in &bs.gaps {
            prop_assert!(g.upper > g.lower);
        }
    }

    #[test]
    fn harmonic_levels_start_at_the_sum(mu in proptest::collection::vec(0.1f64..50.0, 1..4), count in 1usize..20) {
        let lv = harmonic_levels(&mu, count).unwrap();
        prop_assert_eq!(lv.levels.len(), count);
        prop_assert!(lv.levels.windows(2).all(|w| w[0] <= w[1]));
        let ground: f64 = mu.iter().map(|m| (m / 2.0).sqrt()).sum();
        prop_assert!((lv.levels[0] - ground).abs() <= 1e-12 * ground.max(1.0));
    }

    #[test]
    fn fit_exponent_recovers_power_laws(gamma in -1.0f64..2.0, c in 0.01f64..100.0, lo in 0.0f64..3.0) {
        let pts: Vec<(f64, f64)> = (0..6).map(|i| 10f64.powf(lo + 0.5 * i as f64)).map(|a| (a, c * a.powf(gamma))).collect();
        let f = fit_exponent(&pts).unwrap();
        prop_assert!((f.slope - gamma).abs() < 1e-10);
        prop_assert!((f.intercept_prefactor / c - 1.0).abs() < 1e-9);
    }

    #[test]
    fn certified_gaps_exceed_twice_the_budget(alpha in 10.0f64..400.0, budget in 0.0f64..20.0) {
        let cell = build_cell::<f64>(&CellSpec::Cosine { mean: 1.0, amplitude: 1.0, period: TAU }, 128).unwrap();
        let rep = gap_report(&cell, &[alpha], 17, 3, Some(budget)).unwrap();
        for g in &rep.entries[0].gaps {
            prop_assert_eq!(g.certified, g.length > 2.0 * budget);
            if let Some((lo, hi)) = g.window {
                prop_assert!(lo < hi && lo >= g.lower && hi <= g.upper);
            }
        }
    }

    #[test]
    fn svg_rendering_is_deterministic(points in proptest::collection::vec((0.1f64..1e4, -1e3f64..1e3), 0..30), log_x in any::<bool>()) {
        let f = Figure {
            title: "t".into(),
            log_x,
            series: vec![Series { label: "s".into(), points: points.clone(), line: true }],
            ..Figure::default()
        };
        let svg = f.render();
        prop_assert_eq!(&svg, &f.render());
        // every finite point gets a marker, plus one legend marker
        prop_assert_eq!(svg.matches("<circle").count(), points.len() + 1);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn layer_bracket_is_ordered(r in 0.8f64..2.0, alpha in 5.0f64..30.0) {
        let c = build_arc_curve::<f64>(&CurveSpec::Circle { radius: r }, 256).unwrap();
        let cfg = LayerConfig::new(c, alpha, 32, 16).unwrap();
        let b = bracket_eigenvalues(&cfg, 3).unwrap();
        for j in 0..b.len() {
            prop_assert!(b.lower[j] <= b.upper[j] + 1e-9 * b.upper[j].abs());
            prop_assert!(b.upper[j] < 0.0);
            prop_assert!(b.contains(j, b.midpoint(j), 0.0));
        }
    }

    #[test]
    fn shooting_levels_increase_with_m(alpha in 4.0f64..40.0) {
        let e: Vec<f64> = (0..=3).map(|m| disk_shooting(&ShootingProblem::new(1.0, alpha, m)).unwrap()).collect();
        prop_assert!(e.windows(2).all(|w| w[0] < w[1]), "{:?}", e);
    }
}
