//! Closed-form dispersion relations `S^i S'^j (2S'+1)^k (3S'+2)^l p(S', theta) = 0`.
//!
//! p is stored as a sum of integer polynomials in x = S' times products of
//! half-angle cosines cos((m1 theta1 + m2 theta2) / 2), so p(x, 0, 0) can be
//! evaluated in exact rational arithmetic.

use num_rational::Ratio;
use serde::Serialize;

use crate::interval::EdgeSolutionBasis;
use crate::roots::{abs_scale, horner, real_roots, RootOptions};
use crate::tiling::{QuasiMomentum, TilingName};

/// Trigonometric quantities appearing in the dispersion relations.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TrigInvariants {
    /// cos(t1/2) cos(t2/2) cos((t1-t2)/2)
    pub omega: f64,
    /// cos t1 cos t2 cos(t1+t2)
    pub omega1: f64,
    /// cos(t1/2) cos(t2/2) cos((t1+t2)/2)
    pub omega2: f64,
    /// cos((2t1+t2)/2) cos((t2-t1)/2) cos((t1+2t2)/2)
    pub omega3: f64,
    /// cos t1 cos t2 cos(t1-t2)
    pub omega_t1: f64,
    /// cos(t1/2) cos(t2/2) cos((t1-t2)/2)
    pub omega_t2: f64,
    /// cos((2t1-t2)/2) cos((t1+t2)/2) cos((t1-2t2)/2)
    pub omega_t3: f64,
    /// cos((t1+t2)/2)
    pub xi: f64,
    /// cos((t1-t2)/2)
    pub eta: f64,
    pub c: f64,
    pub d: f64,
}

pub fn trig_invariants(k: &QuasiMomentum) -> TrigInvariants {
    let (t1, t2) = (k.theta1, k.theta2);
    let h = |x: f64| (0.5 * x).cos();
    let (c, d) = (t1.cos(), t2.cos());
    TrigInvariants {
        omega: h(t1) * h(t2) * h(t1 - t2),
        omega1: c * d * (t1 + t2).cos(),
        omega2: h(t1) * h(t2) * h(t1 + t2),
        omega3: h(2.0 * t1 + t2) * h(t2 - t1) * h(t1 + 2.0 * t2),
        omega_t1: c * d * (t1 - t2).cos(),
        omega_t2: h(t1) * h(t2) * h(t1 - t2),
        omega_t3: h(2.0 * t1 - t2) * h(t1 + t2) * h(t1 - 2.0 * t2),
        xi: h(t1 + t2),
        eta: h(t1 - t2),
        c,
        d,
    }
}

/// Powers of the point-spectrum prefactor S^i S'^j (2S'+1)^k (3S'+2)^l.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Prefactor {
    pub i: u32,
    pub j: u32,
    pub k: u32,
    pub l: u32,
}

impl Prefactor {
    pub fn evaluate(&self, b: &EdgeSolutionBasis) -> f64 {
        let x = b.sp;
        b.s.powi(self.i as i32)
            * x.powi(self.j as i32)
            * (2.0 * x + 1.0).powi(self.k as i32)
            * (3.0 * x + 2.0).powi(self.l as i32)
    }
}

/// One summand: an integer polynomial in x times a product of half-angle cosines.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Term {
    /// Ascending coefficients in x.
    pub poly: Vec<i64>,
    /// Each (m1, m2) stands for cos((m1 theta1 + m2 theta2) / 2).
    pub cosines: Vec<(i32, i32)>,
}

impl Term {
    fn trig(&self, k: &QuasiMomentum) -> f64 {
        self.cosines
            .iter()
            .map(|&(m1, m2)| (0.5 * (m1 as f64 * k.theta1 + m2 as f64 * k.theta2)).cos())
            .product()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DispersionForm {
    pub tiling: TilingName,
    pub prefactor: Prefactor,
    pub terms: Vec<Term>,
}

impl DispersionForm {
    /// Degree of p in x.
    pub fn degree(&self) -> usize {
        self.terms
            .iter()
            .map(|t| t.poly.len().saturating_sub(1))
            .max()
            .unwrap_or(0)
    }

    /// Coefficients of p(., theta) as a polynomial in x, ascending.
    pub fn coefficients(&self, k: &QuasiMomentum) -> Vec<f64> {
        let mut out = vec![0.0; self.degree() + 1];
        for t in &self.terms {
            let w = t.trig(k);
            for (c, &p) in out.iter_mut().zip(&t.poly) {
                *c += p as f64 * w;
            }
        }
        out
    }

    pub fn evaluate(&self, x: f64, k: &QuasiMomentum) -> f64 {
        horner(&self.coefficients(k), x)
    }

    /// Size of the individual contributions at (x, theta), for relative tolerances.
    pub fn scale(&self, x: f64, k: &QuasiMomentum) -> f64 {
        abs_scale(&self.coefficients(k), x)
    }

    /// p(x, 0, 0) in exact rational arithmetic (every cosine equals 1 there).
    pub fn exact_at_zero(&self, x: Ratio<i128>) -> Ratio<i128> {
        let mut acc = Ratio::from_integer(0);
        for t in &self.terms {
            let mut pw = Ratio::from_integer(1);
            for &c in &t.poly {
                acc += pw * Ratio::from_integer(c as i128);
                pw *= x;
            }
        }
        acc
    }

    /// The full left-hand side: prefactor times p.
    pub fn full(&self, b: &EdgeSolutionBasis, k: &QuasiMomentum) -> f64 {
        self.prefactor.evaluate(b) * self.evaluate(b.sp, k)
    }
}

fn t(poly: &[i64], cosines: &[(i32, i32)]) -> Term {
    Term {
        poly: poly.to_vec(),
        cosines: cosines.to_vec(),
    }
}

/// cos(t1/2) cos(t2/2) cos((t1-t2)/2)
const OMEGA: [(i32, i32); 3] = [(1, 0), (0, 1), (1, -1)];

fn pf(i: u32, j: u32, k: u32, l: u32) -> Prefactor {
    Prefactor { i, j, k, l }
}

/// The dispersion relation of `name`.
pub fn dispersion_form(name: TilingName) -> DispersionForm {
    use TilingName::*;
    let (prefactor, terms) = match name {
        S => (
            pf(2, 0, 0, 0),
            vec![
                t(&[0, 0, 1], &[]),
                t(&[-1], &[(1, 0), (1, 0), (0, 1), (0, 1)]),
            ],
        ),
        H => (pf(2, 0, 0, 0), vec![t(&[-1, 0, 9], &[]), t(&[-8], &OMEGA)]),
        T => (
            pf(2, 0, 0, 0),
            vec![t(&[1, 3], &[]), t(&[-4], &[(1, 0), (0, 1), (-1, 1)])],
        ),
        Et => (
            pf(3, 0, 0, 0),
            vec![
                t(&[-1, 0, 25], &[]),
                t(&[0, -20], &[(2, 0)]),
                t(&[-8], &OMEGA),
                t(&[4], &[(2, 0), (2, 0)]),
            ],
        ),
        TrS => (
            pf(2, 0, 0, 0),
            vec![
                t(&[1, 0, -54, 0, 81], &[]),
                t(&[0, -12], &[(2, 0)]),
                t(&[0, -12], &[(0, 2)]),
                t(&[-4], &[(2, 0), (0, 2)]),
            ],
        ),
        // read as 2x^2 - x - omega
        Th => (pf(3, 0, 1, 0), vec![t(&[0, -1, 2], &[]), t(&[-1], &OMEGA)]),
        TrH => (
            pf(3, 1, 0, 1),
            vec![t(&[8, 18, -45, -54, 81], &[]), t(&[-8], &OMEGA)],
        ),
        Ss => {
            let (c, d) = ((2, 0), (0, 2));
            (
                pf(6, 0, 0, 0),
                vec![
                    t(&[1, -40, -250, 0, 625], &[]),
                    t(&[-4, -40, -100], &[c]),
                    t(&[-4, -40, -100], &[d]),
                    t(&[-16, -40], &[c, d]),
                    t(&[4], &[c, c]),
                    t(&[4], &[d, d]),
                ],
            )
        }
        Rth => {
            let mut v = vec![t(&[-3, 0, 192, -128, -1536, 0, 2048], &[])];
            for m in [(2, 0), (2, 2), (0, 2)] {
                v.push(t(&[2, 0, -64, -128], &[m]));
            }
            for m in [(4, 4), (4, 0), (0, 4)] {
                v.push(t(&[1], &[m]));
            }
            for m in [(4, 2), (2, -2), (2, 4)] {
                v.push(t(&[-2], &[m]));
            }
            (pf(6, 0, 0, 0), v)
        }
        Sth => {
            let mut v = vec![t(&[-11, 120, 675, -2000, -9375, 0, 15625], &[])];
            for m in [(4, 0), (0, 4), (4, 4)] {
                v.push(t(&[2], &[m]));
            }
            for m in [(4, 2), (2, 4), (-2, 2)] {
                v.push(t(&[-8, -20], &[m]));
            }
            for m in [(2, 0), (0, 2), (2, 2)] {
                v.push(t(&[8, -60, -600, -1000], &[m]));
            }
            (pf(9, 0, 0, 0), v)
        }
        TrTh => {
            let mut v = vec![t(
                &[
                    15, 0, -918, 0, 21627, 0, -204120, 0, 728271, 0, -1062882, 0, 531441,
                ],
                &[],
            )];
            for m in [(4, 0), (0, 4), (4, -4)] {
                v.push(t(&[2], &[m]));
            }
            for m in [(4, -2), (2, 2), (2, -4)] {
                v.push(t(&[4, 0, -72], &[m]));
            }
            for m in [(2, 0), (2, -2), (0, 2)] {
                v.push(t(&[16, 0, -540, 0, 4860, 0, -8748], &[m]));
            }
            (pf(6, 0, 0, 0), v)
        }
    };
    DispersionForm {
        tiling: name,
        prefactor,
        terms,
    }
}

pub fn evaluate_dispersion(name: TilingName, x: f64, k: &QuasiMomentum) -> f64 {
    dispersion_form(name).evaluate(x, k)
}

/// Lower and upper end of the S' window searched for roots.
pub const ROOT_WINDOW: (f64, f64) = (-1.5, 1.5);

/// Real roots of p(., theta) in [-1.5, 1.5], ascending.
pub fn dispersion_root_set(form: &DispersionForm, k: &QuasiMomentum) -> Vec<f64> {
    real_roots(
        &form.coefficients(k),
        ROOT_WINDOW.0,
        ROOT_WINDOW.1,
        &RootOptions::default(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn invariants_at_special_points() {
        let z = trig_invariants(&QuasiMomentum::zero());
        assert_eq!(z.omega, 1.0);
        assert_eq!(1.0 + 8.0 * z.omega, 9.0);
        let p = trig_invariants(&QuasiMomentum::new(PI, PI));
        assert!(p.omega.abs() < 1e-15);
        let w = trig_invariants(&QuasiMomentum::new(2.0 * PI / 3.0, -2.0 * PI / 3.0));
        assert!((w.omega + 0.125).abs() < 1e-15);
    }

    #[test]
    fn trh_quartic() {
        let f = dispersion_form(TilingName::TrH);
        let k = QuasiMomentum::new(0.4, -1.1);
        let w = trig_invariants(&k).omega;
        let x: f64 = 0.37;
        let want = 81.0 * x.powi(4) - 54.0 * x.powi(3) - 45.0 * x * x + 18.0 * x - 8.0 * w + 8.0;
        assert!((f.evaluate(x, &k) - want).abs() < 1e-12);
        assert_eq!(f.exact_at_zero(Ratio::new(-2, 3)), Ratio::from_integer(0));
        assert_eq!(f.prefactor, pf(3, 1, 0, 1));
    }

    #[test]
    fn exact_zero_at_one_for_all() {
        for name in TilingName::ALL {
            let f = dispersion_form(name);
            assert_eq!(
                f.exact_at_zero(Ratio::from_integer(1)),
                Ratio::from_integer(0),
                "{name}"
            );
        }
    }

    #[test]
    fn root_sets_at_origin() {
        let z = QuasiMomentum::zero();
        let has = |r: &[f64], x: f64, tol: f64| r.iter().any(|y| (y - x).abs() < tol);
        let r = dispersion_root_set(&dispersion_form(TilingName::TrH), &z);
        assert!(has(&r, -2.0 / 3.0, 1e-12) && has(&r, 1.0, 1e-12), "{r:?}");
        let r = dispersion_root_set(&dispersion_form(TilingName::Ss), &z);
        assert!(has(&r, 1.0, 1e-9), "{r:?}");
        let r = dispersion_root_set(&dispersion_form(TilingName::TrTh), &z);
        let s3 = 1.0 / 3f64.sqrt();
        for x in [-1.0, -s3, -1.0 / 3.0, 1.0 / 3.0, s3, 1.0] {
            assert!(has(&r, x, 1e-6), "{x} missing from {r:?}");
        }
    }

    #[test]
    fn ss_value_at_minus_three_fifths() {
        let f = dispersion_form(TilingName::Ss);
        assert_eq!(f.exact_at_zero(Ratio::new(-3, 5)), Ratio::from_integer(0));
        assert!((f.evaluate(-0.6, &QuasiMomentum::new(PI, 0.0)) - 16.0).abs() < 1e-12);
    }
}
