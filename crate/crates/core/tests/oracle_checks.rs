mod common;

use std::f64::consts::PI;

use common::{arccos_bands, clip, merge, reference_endpoint, reference_level};
use qgtile::interval::IntervalSolver;
use qgtile::potential::Potential;
use qgtile::spectrum::{ac_bounds, bands_general, bands_zero_potential, point_spectrum};
use qgtile::tiling::TilingName;

fn merged_bands(name: TilingName, a: f64, k_max: usize) -> Vec<(f64, f64)> {
    let b = bands_zero_potential(name, a, k_max).unwrap();
    merge(
        b.iter().map(|b| (b.lambda_lo, b.lambda_hi)).collect(),
        1e-12,
    )
}

#[test]
fn zero_potential_bands_match_arccos_lists() {
    for name in TilingName::ASSEMBLED {
        for a in [1.0, 2.0] {
            let hi = (12.0 * PI / a).powi(2);
            let ours = clip(&merged_bands(name, a, 5), hi);
            let oracle = clip(&arccos_bands(name, a, 12), hi);
            assert_eq!(
                ours.len(),
                oracle.len(),
                "{name} a={a}: {ours:?} vs {oracle:?}"
            );
            for (u, v) in ours.iter().zip(&oracle) {
                assert!(
                    (u.0 - v.0).abs() <= 1e-9 * v.0.max(1.0),
                    "{name} a={a}: {u:?} vs {v:?}"
                );
                assert!(
                    (u.1 - v.1).abs() <= 1e-9 * v.1.max(1.0),
                    "{name} a={a}: {u:?} vs {v:?}"
                );
            }
        }
    }
}

#[test]
fn graphene_basis_matches_reference_integrator() {
    let q = Potential::graphene(1.0).unwrap();
    let solver = IntervalSolver::new(&q);
    for l in [0.1, 1.0, 7.5, 40.0, 250.0, 900.0] {
        let b = solver.basis(l).unwrap();
        let r = reference_endpoint(&q, l, 3000);
        for (got, want) in [b.c, b.s, b.cp, b.sp].into_iter().zip(r) {
            assert!(
                (got - want).abs() <= 1e-9 * want.abs().max(1.0),
                "lambda {l}: {got} vs {want}"
            );
        }
    }
}

#[test]
fn graphene_edge_length_two() {
    let q = Potential::graphene(2.0).unwrap();
    let b = IntervalSolver::new(&q).basis(3.3).unwrap();
    let r = reference_endpoint(&q, 3.3, 3000);
    assert!((b.sp - r[3]).abs() < 1e-9 && (b.s - r[1]).abs() < 1e-9);
}

#[test]
fn snub_square_graphene_band_edges() {
    let q = Potential::graphene(1.0).unwrap();
    let bands = bands_general(TilingName::Ss, &q, 100.0).unwrap();
    assert!(!bands.is_empty());
    let (lo, hi) = ac_bounds(TilingName::Ss)[0];
    for b in &bands {
        for edge in [b.lambda_lo, b.lambda_hi] {
            let s = IntervalSolver::new(&q).sprime(edge).unwrap();
            let level = if (s - lo).abs() < (s - hi).abs() {
                lo
            } else {
                hi
            };
            if edge < 100.0 - 1e-9 {
                let want = reference_level(&q, level, edge - 1e-4, edge + 1e-4);
                assert!(
                    (edge - want).abs() <= 1e-8 * want.max(1.0),
                    "{edge} vs {want}"
                );
            }
        }
    }
}

// Flat-band eigenvalues sit at a band edge or in a gap: S' never lies in the
// interior of the absolutely continuous range there.
#[test]
fn point_spectrum_avoids_band_interiors() {
    for q in [
        Potential::zero(1.0).unwrap(),
        Potential::graphene(1.0).unwrap(),
    ] {
        let solver = IntervalSolver::new(&q);
        for name in TilingName::ALL {
            let range = ac_bounds(name);
            for p in point_spectrum(name, &q, 120.0).unwrap() {
                for l in p.lambdas {
                    let s = solver.sprime(l).unwrap();
                    let inside = range.iter().any(|&(lo, hi)| s > lo + 1e-8 && s < hi - 1e-8);
                    assert!(!inside, "{name} {}: S'({l}) = {s}", p.generator.as_str());
                }
            }
        }
    }
}

#[test]
fn general_bands_agree_with_closed_form_for_zero_potential() {
    let q = Potential::zero(1.0).unwrap();
    for name in TilingName::ASSEMBLED {
        let g = merge(
            bands_general(name, &q, 400.0)
                .unwrap()
                .iter()
                .map(|b| (b.lambda_lo, b.lambda_hi))
                .collect(),
            1e-9,
        );
        let z = clip(&merged_bands(name, 1.0, 4), 400.0);
        assert_eq!(g.len(), z.len(), "{name}");
        for (u, v) in g.iter().zip(&z) {
            assert!(
                (u.0 - v.0).abs() < 1e-8 * v.0.max(1.0) && (u.1 - v.1).abs() < 1e-8 * v.1.max(1.0),
                "{name}: {u:?} {v:?}"
            );
        }
    }
}
