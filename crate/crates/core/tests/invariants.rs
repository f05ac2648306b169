use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;

use qgtile::characteristic::{assemble, determinant, hadamard_bound};
use qgtile::dispersion::{dispersion_form, trig_invariants};
use qgtile::interval::{zero_basis, IntervalSolver};
use qgtile::oracles::m_xi_eta;
use qgtile::potential::{Potential, PotentialKind};
use qgtile::spectrum::bands_zero_potential;
use qgtile::tiling::{build_tiling, QuasiMomentum, TilingName};

fn theta() -> impl Strategy<Value = QuasiMomentum> {
    (-PI..=PI, -PI..=PI).prop_map(|(a, b)| QuasiMomentum::new(a, b))
}

fn tiling() -> impl Strategy<Value = TilingName> {
    proptest::sample::select(TilingName::ALL.to_vec())
}

fn assembled() -> impl Strategy<Value = TilingName> {
    proptest::sample::select(TilingName::ASSEMBLED.to_vec())
}

/// An even piecewise-linear potential on a uniform grid whose kinks sit on
/// integrator nodes (2 * half intervals divides the default step count).
fn even_table() -> impl Strategy<Value = Potential> {
    (
        0.5f64..2.0,
        proptest::sample::select(vec![2usize, 4, 8, 16]),
    )
        .prop_flat_map(|(a, half)| {
            (
                Just(a),
                Just(half),
                proptest::collection::vec(-5.0f64..5.0, half + 1),
            )
        })
        .prop_map(|(a, half, left)| {
            let n = 2 * half;
            let xs: Vec<f64> = (0..=n)
                .map(|i| if i == n { a } else { a * i as f64 / n as f64 })
                .collect();
            let qs: Vec<f64> = (0..=n).map(|i| left[i.min(n - i)]).collect();
            Potential::new(
                PotentialKind::SampledTable {
                    abscissae: xs,
                    values: qs,
                },
                a,
            )
            .unwrap()
        })
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn wronskian_and_evenness_for_even_tables(q in even_table(), l in 0.1f64..60.0) {
        let b = IntervalSolver::new(&q).basis(l).unwrap();
        let scale = b.c.abs().max(b.s.abs()).max(b.cp.abs()).max(b.sp.abs()).max(1.0);
        prop_assert!(b.lagrange_residual() <= 1e-9 * scale * scale, "{:e}", b.lagrange_residual());
        prop_assert!((b.c - b.sp).abs() <= 1e-9 * scale, "{} {}", b.c, b.sp);
    }

    #[test]
    fn wronskian_for_graphene(a in 0.5f64..2.0, l in 0.1f64..900.0) {
        let b = IntervalSolver::new(&Potential::graphene(a).unwrap()).basis(l).unwrap();
        prop_assert!(b.lagrange_residual() <= 1e-10);
        prop_assert!((b.c - b.sp).abs() <= 1e-9);
    }

    #[test]
    fn zero_potential_scaling(a in 0.2f64..5.0, l in -20.0f64..400.0) {
        let b = zero_basis(a, l);
        let u = zero_basis(1.0, l * a * a);
        prop_assert!(close(b.sp, u.sp, 1e-12));
        prop_assert!(close(b.c, u.c, 1e-12));
        prop_assert!(close(b.s, a * u.s, 1e-12));
        prop_assert!(close(b.cp, u.cp / a, 1e-12));
    }

    #[test]
    fn dispersion_is_even_in_theta(name in tiling(), x in -1.5f64..1.5, k in theta()) {
        let f = dispersion_form(name);
        let (p, m) = (f.evaluate(x, &k), f.evaluate(x, &k.neg()));
        prop_assert!((p - m).abs() <= 1e-12 * f.scale(x, &k), "{} {}", p, m);
    }

    #[test]
    fn determinant_conjugates_under_theta_reflection(name in assembled(), l in 0.05f64..40.0, k in theta()) {
        let spec = build_tiling(name);
        let b = zero_basis(1.0, l);
        let d = determinant(&assemble(&spec, &b, &k).unwrap()).unwrap();
        let sys = assemble(&spec, &b, &k.neg()).unwrap();
        let dm = determinant(&sys).unwrap();
        prop_assert!((dm - d.conj()).norm() <= 1e-10 * hadamard_bound(&sys.entries));
    }

    #[test]
    fn determinant_vanishes_on_dirichlet_levels(name in assembled(), m in 1u32..6, k in theta()) {
        let b = zero_basis(1.0, (m as f64 * PI).powi(2));
        let sys = assemble(&build_tiling(name), &b, &k).unwrap();
        let d = determinant(&sys).unwrap();
        prop_assert!(d.norm() <= 1e-10 * hadamard_bound(&sys.entries), "{:e}", d.norm());
    }

    #[test]
    fn bands_rescale_with_edge_length(name in assembled(), a in 0.25f64..4.0) {
        let one = bands_zero_potential(name, 1.0, 3).unwrap();
        let scaled = bands_zero_potential(name, a, 3).unwrap();
        prop_assert_eq!(one.len(), scaled.len());
        for (u, s) in one.iter().zip(&scaled) {
            prop_assert!(close(s.lambda_lo * a * a, u.lambda_lo, 1e-12));
            prop_assert!(close(s.lambda_hi * a * a, u.lambda_hi, 1e-12));
        }
    }

    #[test]
    fn truncated_hexagonal_bracket(x in -1.5f64..1.5, k in theta()) {
        let (t1, t2) = (k.theta1, k.theta2);
        let (c, s) = (x, x);
        let bracket = -6.0 * (s * (3.0 * c + 1.0) + c) * (t2 - t1).cos()
            - 2.0 * (3.0 * s * s + (6.0 * c + 4.0) * s + 2.0 * c) * t1.cos()
            - 2.0 * (s * (6.0 * c + 2.0) + c * (3.0 * c + 4.0)) * t2.cos()
            + 162.0 * c * c * s.powi(4)
            + 81.0 * c * s.powi(3) * (5.0 * c * c - 2.0)
            + s * s * (162.0 * c.powi(4) - 405.0 * c * c - 54.0 * c + 32.0)
            + s * (18.0 + 98.0 * c - 54.0 * c * c - 162.0 * c.powi(3))
            + 2.0 * c * (16.0 * c + 9.0);
        let f = dispersion_form(TilingName::TrH);
        let rhs = 3.0 * x * (3.0 * x + 2.0) * f.evaluate(x, &k);
        prop_assert!((bracket - rhs).abs() <= 1e-11 * (1.0 + f.scale(x, &k) * 20.0));
    }

    #[test]
    fn snub_trihexagonal_expanded_form(x in -1.5f64..1.5, k in theta()) {
        let w = trig_invariants(&k);
        let (w1, w2, w3) = (w.omega1, w.omega2, w.omega3);
        let lhs = 15625.0 * x.powi(6) - 9375.0 * x.powi(4) - (4000.0 * w2 + 1000.0) * x.powi(3)
            - (2400.0 * w2 - 1275.0) * x * x
            - (240.0 * w2 + 80.0 * w3 - 200.0) * x
            + 8.0 * w1 + 32.0 * w2 - 32.0 * w3 - 13.0;
        let f = dispersion_form(TilingName::Sth);
        prop_assert!((lhs - f.evaluate(x, &k)).abs() <= 1e-12 * f.scale(x, &k));
    }

    #[test]
    fn truncated_trihexagonal_expanded_form(x in -1.5f64..1.5, k in theta()) {
        let w = trig_invariants(&k);
        let (w1, w2, w3) = (w.omega_t1, w.omega_t2, w.omega_t3);
        let xx = 9.0 * x * x;
        let lhs = xx.powi(6) - 18.0 * xx.powi(5) + 111.0 * xx.powi(4) - (48.0 * w2 + 268.0) * xx.powi(3)
            + (240.0 * w2 + 207.0) * xx * xx
            - (32.0 * w3 + 240.0 * w2 + 34.0) * xx
            + 8.0 * w1 + 64.0 * w2 + 16.0 * w3 - 7.0;
        let f = dispersion_form(TilingName::TrTh);
        prop_assert!((lhs - f.evaluate(x, &k)).abs() <= 1e-12 * f.scale(x, &k));
    }

    #[test]
    fn m2_and_m6_factorisations(x in -1.0f64..1.0, y in -1.0f64..1.0) {
        let m2 = (4.0 * x * x - 4.0 * x * y - 3.0).powi(2) + 20.0 * (2.0 * x + y).powi(2) + 36.0 * (1.0 - y * y);
        prop_assert!((m_xi_eta(2, x, y) - m2).abs() <= 1e-12);
        let m6 = (4.0 * x * x + 4.0 * x * y + 1.0).powi(2);
        prop_assert!((m_xi_eta(6, x, y) - m6).abs() <= 1e-12);
    }

    #[test]
    fn graphene_determinant_matches_closed_form(name in assembled(), l in 0.05f64..40.0, k in theta()) {
        let q = Potential::graphene(1.0).unwrap();
        let b = IntervalSolver::new(&q).basis(l).unwrap();
        let r = qgtile::characteristic::check_equivalence(&build_tiling(name), &b, &k).unwrap();
        prop_assert!(r <= 1e-8, "{:e}", r);
    }
}

#[test]
fn conjugate_sample_is_not_trivially_real() {
    // guards the reflection property against a determinant that is always real
    let b = zero_basis(1.0, 2.0);
    let d = determinant(
        &assemble(
            &build_tiling(TilingName::TrH),
            &b,
            &QuasiMomentum::new(0.3, -0.8),
        )
        .unwrap(),
    )
    .unwrap();
    assert!(d.im.abs() > 1e-6 * d.norm() || d == Complex64::new(0.0, 0.0));
}
