//! Fundamental solutions C, S of `-y'' + q y = lambda y` on [0, a].
//!
//! C(0) = S'(0) = 1 and C'(0) = S(0) = 0. Everything is written in terms of
//! lambda so that rho -> 0 and negative lambda need no special casing in the
//! integrator. For q = 0 the closed forms are used instead.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};
use crate::potential::Potential;

pub const DEFAULT_STEPS: usize = 4096;

/// The four endpoint values C(a), S(a), C'(a), S'(a) at one energy.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeSolutionBasis {
    /// `sign(lambda) * sqrt(|lambda|)`; a negative value stands for the imaginary rho.
    pub rho: f64,
    pub lambda: f64,
    #[serde(rename = "C")]
    pub c: f64,
    #[serde(rename = "S")]
    pub s: f64,
    #[serde(rename = "Cp")]
    pub cp: f64,
    #[serde(rename = "Sp")]
    pub sp: f64,
}

impl EdgeSolutionBasis {
    /// Build a basis from raw values (handy for tests and calibration).
    pub fn from_values(lambda: f64, c: f64, s: f64, cp: f64, sp: f64) -> Self {
        Self {
            rho: signed_sqrt(lambda),
            lambda,
            c,
            s,
            cp,
            sp,
        }
    }

    /// C S' - S C' - 1.
    pub fn lagrange_residual(&self) -> f64 {
        self.c * self.sp - self.s * self.cp - 1.0
    }

    /// C - S', which vanishes for even potentials.
    pub fn symmetry_residual(&self) -> f64 {
        self.c - self.sp
    }
}

pub(crate) fn signed_sqrt(lambda: f64) -> f64 {
    lambda.signum() * lambda.abs().sqrt()
}

/// Solver bound to one potential and step count. Potential samples at the RK4
/// nodes are cached, so repeated calls at different energies are cheap.
#[derive(Clone, Debug)]
pub struct IntervalSolver {
    q: Potential,
    steps: usize,
    /// q at x = k h / 2, k = 0..=2N.
    nodes: Vec<f64>,
}

impl IntervalSolver {
    pub fn new(q: &Potential) -> Self {
        Self::with_steps(q, DEFAULT_STEPS).expect("default step count is valid")
    }

    pub fn with_steps(q: &Potential, steps: usize) -> Result<Self> {
        if steps == 0 {
            return Err(Error::InvalidInput("step count must be positive".into()));
        }
        let nodes = if q.is_zero() {
            Vec::new()
        } else {
            let h2 = q.a / (2 * steps) as f64;
            (0..=2 * steps).map(|k| q.value(k as f64 * h2)).collect()
        };
        Ok(Self {
            q: q.clone(),
            steps,
            nodes,
        })
    }

    pub fn potential(&self) -> &Potential {
        &self.q
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn basis(&self, lambda: f64) -> Result<EdgeSolutionBasis> {
        ensure_finite("lambda", lambda)?;
        if self.q.is_zero() {
            return Ok(zero_basis(self.q.a, lambda));
        }
        let [c, cp, s, sp] = self.integrate(lambda, [1.0, 0.0, 0.0, 1.0], |m, y| {
            [y[1], m * y[0], y[3], m * y[2]]
        });
        Ok(EdgeSolutionBasis {
            rho: signed_sqrt(lambda),
            lambda,
            c,
            s,
            cp,
            sp,
        })
    }

    /// The basis together with dS'(a)/dlambda.
    pub fn basis_with_derivative(&self, lambda: f64) -> Result<(EdgeSolutionBasis, f64)> {
        ensure_finite("lambda", lambda)?;
        if self.q.is_zero() {
            let b = zero_basis(self.q.a, lambda);
            return Ok((b, -0.5 * self.q.a * b.s));
        }
        // dS/dlambda solves z'' = (q - lambda) z - S with zero data.
        let y = self.integrate(lambda, [1.0, 0.0, 0.0, 1.0, 0.0, 0.0], |m, y| {
            [y[1], m * y[0], y[3], m * y[2], y[5], m * y[4] - y[2]]
        });
        let b = EdgeSolutionBasis {
            rho: signed_sqrt(lambda),
            lambda,
            c: y[0],
            s: y[2],
            cp: y[1],
            sp: y[3],
        };
        Ok((b, y[5]))
    }

    /// S'(a) alone.
    pub fn sprime(&self, lambda: f64) -> Result<f64> {
        Ok(self.basis(lambda)?.sp)
    }

    /// Values S(x_k) at `points` equally spaced x_k in [0, a], endpoints included.
    pub fn sample_s(&self, lambda: f64, points: usize) -> Result<Vec<f64>> {
        ensure_finite("lambda", lambda)?;
        if points < 2 {
            return Err(Error::InvalidInput(
                "need at least two sample points".into(),
            ));
        }
        let a = self.q.a;
        if self.q.is_zero() {
            return Ok((0..points)
                .map(|k| zero_basis(a * k as f64 / (points - 1) as f64, lambda).s)
                .collect());
        }
        // Refine so that every sample lands on an integrator node.
        let per = self.steps.div_ceil(points - 1);
        let fine = IntervalSolver::with_steps(&self.q, per * (points - 1))?;
        let mut out = Vec::with_capacity(points);
        out.push(0.0);
        let mut k = 0usize;
        fine.walk(
            lambda,
            [0.0, 1.0],
            |m, y| [y[1], m * y[0]],
            |_, y| {
                k += 1;
                if k.is_multiple_of(per) {
                    out.push(y[0]);
                }
            },
        );
        Ok(out)
    }

    fn integrate<const K: usize>(
        &self,
        lambda: f64,
        y0: [f64; K],
        rhs: impl Fn(f64, &[f64; K]) -> [f64; K],
    ) -> [f64; K] {
        self.walk(lambda, y0, rhs, |_, _| {})
    }

    /// Classical RK4 with fixed step a/N; `rhs(q - lambda, y)`.
    fn walk<const K: usize>(
        &self,
        lambda: f64,
        mut y: [f64; K],
        rhs: impl Fn(f64, &[f64; K]) -> [f64; K],
        mut visit: impl FnMut(usize, &[f64; K]),
    ) -> [f64; K] {
        let h = self.q.a / self.steps as f64;
        let axpy = |y: &[f64; K], k: &[f64; K], t: f64| {
            let mut out = *y;
            for i in 0..K {
                out[i] += t * k[i];
            }
            out
        };
        for n in 0..self.steps {
            let m0 = self.nodes[2 * n] - lambda;
            let m1 = self.nodes[2 * n + 1] - lambda;
            let m2 = self.nodes[2 * n + 2] - lambda;
            let k1 = rhs(m0, &y);
            let k2 = rhs(m1, &axpy(&y, &k1, 0.5 * h));
            let k3 = rhs(m1, &axpy(&y, &k2, 0.5 * h));
            let k4 = rhs(m2, &axpy(&y, &k3, h));
            for i in 0..K {
                y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            }
            visit(n, &y);
        }
        y
    }
}

/// Closed forms for q = 0 at edge length `a`.
///
/// The sine solution is sin(rho a) / rho. Near lambda = 0 a power series in
/// lambda a^2 replaces the trigonometric / hyperbolic branches.
pub fn zero_basis(a: f64, lambda: f64) -> EdgeSolutionBasis {
    let z = lambda * a * a;
    let (c, s, cp, sp);
    if z.abs() < 0.25 {
        // C = sum (-z)^n / (2n)!,  S = a sum (-z)^n / (2n+1)!
        let (mut ce, mut so) = (0.0, 0.0);
        let mut term = 1.0;
        for n in 0..20 {
            let k = 2 * n;
            ce += term;
            let odd = term / (k + 1) as f64;
            so += odd;
            term = -odd * z / (k + 2) as f64;
        }
        c = ce;
        s = a * so;
        cp = -lambda * s;
        sp = ce;
    } else if lambda > 0.0 {
        let rho = lambda.sqrt();
        let (sn, cs) = (rho * a).sin_cos();
        c = cs;
        s = sn / rho;
        cp = -rho * sn;
        sp = cs;
    } else {
        let kappa = (-lambda).sqrt();
        let (sh, ch) = ((kappa * a).sinh(), (kappa * a).cosh());
        c = ch;
        s = sh / kappa;
        cp = kappa * sh;
        sp = ch;
    }
    EdgeSolutionBasis {
        rho: signed_sqrt(lambda),
        lambda,
        c,
        s,
        cp,
        sp,
    }
}

/// One-shot convenience wrapper around [`IntervalSolver`].
pub fn solve_basis(q: &Potential, lambda: f64) -> Result<EdgeSolutionBasis> {
    if q.is_zero() {
        ensure_finite("lambda", lambda)?;
        return Ok(zero_basis(q.a, lambda));
    }
    IntervalSolver::new(q).basis(lambda)
}

/// [`solve_basis`] over a sorted grid, evaluated in parallel.
pub fn discriminant_scan(q: &Potential, lambda_grid: &[f64]) -> Result<Vec<EdgeSolutionBasis>> {
    if lambda_grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidInput("lambda grid must be sorted".into()));
    }
    let solver = IntervalSolver::new(q);
    lambda_grid.par_iter().map(|&l| solver.basis(l)).collect()
}
