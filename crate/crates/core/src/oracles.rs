//! Brute-force checks: Brillouin-zone range recovery, the polynomial
//! inequalities behind the ac-spectrum ranges, and the trigonometric
//! identities used to simplify the dispersion relations.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::characteristic::check_equivalence;
use crate::dispersion::{dispersion_form, dispersion_root_set, trig_invariants, TrigInvariants};
use crate::eigenfunction::{build_eigenfunction, EigenKind, EigenOptions};
use crate::error::{Error, Result};
use crate::interval::IntervalSolver;
use crate::potential::Potential;
use crate::spectrum::{ac_bounds, ac_range, AcInterval, DiscriminantProfile, ScanOptions};
use crate::tiling::{build_tiling, QuasiMomentum, TilingName};

pub const DEFAULT_GRID: usize = 201;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GridKind {
    /// theta = 2 pi j / n, j centred on 0. Contains 0 and, when 3 | n, +-2pi/3.
    Periodic,
    /// n equispaced points on [-pi, pi], both ends included.
    Closed,
    /// Union of the two. Closed alone misses 2pi/3 and an odd periodic grid
    /// misses pi; band edges sit at both.
    Combined,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ThetaGrid {
    pub n: usize,
    pub kind: GridKind,
}

impl ThetaGrid {
    pub fn periodic(n: usize) -> Self {
        Self {
            n,
            kind: GridKind::Periodic,
        }
    }

    pub fn closed(n: usize) -> Self {
        Self {
            n,
            kind: GridKind::Closed,
        }
    }

    pub fn combined(n: usize) -> Self {
        Self {
            n,
            kind: GridKind::Combined,
        }
    }

    /// The one-dimensional node set.
    pub fn values(&self) -> Vec<f64> {
        let n = self.n.max(1);
        match self.kind {
            GridKind::Periodic => {
                let lo = -(n as i64 / 2);
                (0..n as i64)
                    .map(|j| 2.0 * PI * (lo + j) as f64 / n as f64)
                    .collect()
            }
            GridKind::Closed => symmetric_nodes(n, PI),
            GridKind::Combined => {
                let mut v = ThetaGrid::periodic(n).values();
                v.extend(symmetric_nodes(n, PI));
                v.sort_by(f64::total_cmp);
                v.dedup_by(|b, a| (*b - *a).abs() < 1e-14);
                v
            }
        }
    }

    pub fn points(&self) -> Vec<QuasiMomentum> {
        let v = self.values();
        v.iter()
            .flat_map(|&t1| v.iter().map(move |&t2| QuasiMomentum::new(t1, t2)))
            .collect()
    }
}

/// n equispaced nodes on [-h, h], mirrored so that x and -x are both exact.
fn symmetric_nodes(n: usize, h: f64) -> Vec<f64> {
    if n == 1 {
        return vec![0.0];
    }
    let m = (n - 1) as f64;
    (0..n)
        .map(|i| {
            let j = 2 * i as i64 - (n as i64 - 1);
            if j < 0 {
                -h * (-j) as f64 / m
            } else {
                h * j as f64 / m
            }
        })
        .collect()
}

// ---------------------------------------------------------------- ranges

#[derive(Clone, Debug, Serialize)]
pub struct RangeRecovery {
    pub tiling: TilingName,
    pub grid: ThetaGrid,
    /// Sorted S' roots over the grid, near-duplicates merged.
    #[serde(skip)]
    pub roots: Vec<f64>,
    pub root_count: usize,
    pub reference: Vec<AcInterval>,
    pub hausdorff: f64,
    /// Largest distance from a recovered root to the reference set.
    pub soundness: f64,
    /// Largest distance from a reference endpoint to the recovered set.
    pub endpoint_attainment: f64,
    pub recovered_min: f64,
    pub recovered_max: f64,
}

fn dist_to_union(x: f64, set: &[(f64, f64)]) -> f64 {
    set.iter()
        .map(|&(lo, hi)| {
            if x < lo {
                lo - x
            } else if x > hi {
                x - hi
            } else {
                0.0
            }
        })
        .fold(f64::INFINITY, f64::min)
}

fn dist_to_sorted(x: f64, pts: &[f64]) -> f64 {
    let i = pts.partition_point(|&p| p < x);
    let mut d = f64::INFINITY;
    if i < pts.len() {
        d = d.min(pts[i] - x);
    }
    if i > 0 {
        d = d.min(x - pts[i - 1]);
    }
    d
}

/// sup over the union of the distance to `pts`. The distance function is
/// piecewise linear, so the sup sits at an interval end or at a gap midpoint.
fn coverage_gap(set: &[(f64, f64)], pts: &[f64]) -> f64 {
    let mut worst: f64 = 0.0;
    for &(lo, hi) in set {
        worst = worst
            .max(dist_to_sorted(lo, pts))
            .max(dist_to_sorted(hi, pts));
        for w in pts.windows(2) {
            let m = 0.5 * (w[0] + w[1]);
            if m > lo && m < hi {
                worst = worst.max(dist_to_sorted(m, pts));
            }
        }
    }
    worst
}

pub fn recover_ac_range(name: TilingName, n: usize) -> Result<RangeRecovery> {
    recover_ac_range_on(name, ThetaGrid::combined(n))
}

pub fn recover_ac_range_on(name: TilingName, grid: ThetaGrid) -> Result<RangeRecovery> {
    if grid.n < 51 {
        return Err(Error::InvalidInput(format!(
            "range recovery needs n >= 51, got {}",
            grid.n
        )));
    }
    let form = dispersion_form(name);
    let mut roots: Vec<f64> = grid
        .points()
        .par_iter()
        .flat_map_iter(|k| dispersion_root_set(&form, k))
        .collect();
    roots.sort_by(f64::total_cmp);
    roots.dedup_by(|a, b| (*a - *b).abs() < 1e-12);

    let set = ac_bounds(name);
    let soundness = roots
        .iter()
        .map(|&x| dist_to_union(x, &set))
        .fold(0.0, f64::max);
    let endpoint_attainment = set
        .iter()
        .flat_map(|&(lo, hi)| [lo, hi])
        .map(|e| dist_to_sorted(e, &roots))
        .fold(0.0, f64::max);
    let hausdorff = soundness.max(coverage_gap(&set, &roots));
    Ok(RangeRecovery {
        tiling: name,
        grid,
        root_count: roots.len(),
        recovered_min: roots.first().copied().unwrap_or(f64::NAN),
        recovered_max: roots.last().copied().unwrap_or(f64::NAN),
        roots,
        reference: ac_range(name),
        hausdorff,
        soundness,
        endpoint_attainment,
    })
}

// ---------------------------------------------------------------- nonnegative forms

/// The nonnegative forms, in theta variables.
pub fn m_theta(index: usize, w: &TrigInvariants) -> f64 {
    let s3 = 3f64.sqrt();
    let (w1, w2, w3) = (w.omega1, w.omega2, w.omega3);
    let (v1, v2, v3) = (w.omega_t1, w.omega_t2, w.omega_t3);
    match index {
        1 => w1 - 2.0 * w3 - 190.0 * w2 + 191.0,
        2 => 8.0 * w1 - 16.0 * w3 + 160.0 * w2 + 37.0,
        3 => w1 - 14.0 * w3 - 826.0 * w2 + 839.0,
        4 => 8.0 * w1 - 16.0 * w3 + 16.0 * w2 + 16.0 * s3 * w3 + 48.0 * s3 * w2 - 10.0 * s3 + 19.0,
        5 => 8.0 * v1 - 272.0 * v3 - 17648.0 * v2 + 17912.0,
        6 => 16.0 * v3 + 8.0 * v1 + 64.0 * v2 - 7.0,
        _ => panic!("no form M{index}"),
    }
}

/// The same forms after the half-angle substitution.
pub fn m_xi_eta(index: usize, x: f64, y: f64) -> f64 {
    let s3 = 3f64.sqrt();
    let (x2, y2) = (x * x, y * y);
    match index {
        1 => 2.0 * (x2 * x2 - 2.0 * x2 * x * y + x2 * y2 - 46.0 * x * y - 49.0 * x2 - y2 + 96.0),
        2 => {
            16.0 * x2 * x2 - 32.0 * x2 * x * y + 16.0 * x2 * y2 + 56.0 * x2 + 104.0 * x * y
                - 16.0 * y2
                + 45.0
        }
        3 => {
            2.0 * x2 * x2 - 28.0 * x2 * x * y + 2.0 * x2 * y2
                - 416.0 * x2
                - 392.0 * x * y
                - 8.0 * y2
                + 840.0
        }
        4 => {
            16.0 * x2 * x2
                + (32.0 * s3 - 32.0) * x2 * x * y
                + 16.0 * x2 * y2
                + (24.0 * s3 - 16.0) * x2
                + 32.0 * x * y
                + (8.0 * s3 - 16.0) * y2
                + 27.0
                - 10.0 * s3
        }
        5 => {
            16.0 * (x2 * x2 - 34.0 * x2 * x * y + x2 * y2 - 526.0 * x * y - 553.0 * x2 - 9.0 * y2
                + 1120.0)
        }
        6 => 16.0 * x2 * x2 + 32.0 * x2 * x * y + 16.0 * x2 * y2 + 8.0 * x2 + 8.0 * x * y + 1.0,
        _ => panic!("no form M{index}"),
    }
}

/// (xi, eta) used by M_index: M1..M4 take (cos((t1+t2)/2), cos((t1-t2)/2)),
/// M5, M6 and g the swapped pair.
pub fn substitution(index: usize, k: &QuasiMomentum) -> (f64, f64) {
    let p = (0.5 * (k.theta1 + k.theta2)).cos();
    let m = (0.5 * (k.theta1 - k.theta2)).cos();
    if index <= 4 {
        (p, m)
    } else {
        (m, p)
    }
}

pub fn g_theta(t: f64, w: &TrigInvariants) -> f64 {
    let (v1, v2, v3) = (w.omega_t1, w.omega_t2, w.omega_t3);
    let c = [
        8.0 * v1 - 48.0 * v3 + 160.0 * v2 - 127.0,
        144.0 * v2 - 32.0 * v3 - 118.0,
        63.0 - 48.0 * v2,
        60.0 - 48.0 * v2,
        -9.0,
        -6.0,
        1.0,
    ];
    crate::roots::horner(&c, t)
}

pub fn g_xi_eta(t: f64, x: f64, y: f64) -> f64 {
    let (x2, y2) = (x * x, y * y);
    let c = [
        16.0 * x2 * x2 - 96.0 * x2 * x * y + 16.0 * x2 * y2 + 56.0 * x2 + 152.0 * x * y
            - 32.0 * y2
            - 119.0,
        -(64.0 * x2 * x * y - 72.0 * x2 - 120.0 * x * y + 16.0 * y2 + 118.0),
        -(24.0 * x2 + 24.0 * x * y - 63.0),
        -(24.0 * x2 + 24.0 * x * y - 60.0),
        -9.0,
        -6.0,
        1.0,
    ];
    crate::roots::horner(&c, t)
}

/// t values at which g < 0 is sampled.
pub fn g_parameters() -> Vec<f64> {
    let mut t = vec![-0.99];
    t.extend((-9..=9).map(|i| i as f64 / 10.0));
    t.push(0.99);
    t
}

pub const APPENDIX_B_TOL: f64 = 1e-12;
pub const M4_ZERO_TOL: f64 = 1e-10;

#[derive(Clone, Debug, Serialize)]
pub struct FormExtremum {
    pub form: String,
    pub variables: &'static str,
    /// "min" for the M forms, "max" for g.
    pub kind: &'static str,
    pub value: f64,
    /// (theta1, theta2) or (xi, eta); g carries t as a third entry.
    pub at: Vec<f64>,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct AppendixBReport {
    pub n: usize,
    pub extrema: Vec<FormExtremum>,
    pub m4_at_zero_locus: [f64; 2],
    pub m2_factorization_residual: f64,
    pub substitution_residual: f64,
    pub pass: bool,
}

fn argmin_by(items: impl ParallelIterator<Item = (f64, Vec<f64>)>) -> (f64, Vec<f64>) {
    items.reduce(
        || (f64::INFINITY, Vec::new()),
        |a, b| {
            if b.0 < a.0 || (b.0 == a.0 && b.1 < a.1) {
                b
            } else {
                a
            }
        },
    )
}

fn m2_factored(x: f64, y: f64) -> f64 {
    (4.0 * x * x - 4.0 * x * y - 3.0).powi(2) + 20.0 * (2.0 * x + y).powi(2) + 36.0 * (1.0 - y * y)
}

pub fn appendix_b_suite(n: usize) -> Result<AppendixBReport> {
    if n < 101 {
        return Err(Error::InvalidInput(format!(
            "form grid needs n >= 101, got {n}"
        )));
    }
    let grid = ThetaGrid::combined(n);
    let thetas: Vec<(QuasiMomentum, TrigInvariants)> = grid
        .points()
        .into_iter()
        .map(|k| (k, trig_invariants(&k)))
        .collect();
    let nodes = symmetric_nodes(n, 1.0);
    let xe: Vec<(f64, f64)> = nodes
        .iter()
        .flat_map(|&x| nodes.iter().map(move |&y| (x, y)))
        .collect();
    let mut extrema = Vec::new();

    for i in 1..=6 {
        let (v, at) = argmin_by(
            thetas
                .par_iter()
                .map(|(k, w)| (m_theta(i, w), vec![k.theta1, k.theta2])),
        );
        extrema.push(FormExtremum {
            form: format!("M{i}"),
            variables: "theta",
            kind: "min",
            value: v,
            at,
            pass: v >= -APPENDIX_B_TOL,
        });
        let (v, at) = argmin_by(xe.par_iter().map(|&(x, y)| (m_xi_eta(i, x, y), vec![x, y])));
        extrema.push(FormExtremum {
            form: format!("M{i}"),
            variables: "xi_eta",
            kind: "min",
            value: v,
            at,
            pass: v >= -APPENDIX_B_TOL,
        });
    }

    let ts = g_parameters();
    let (v, at) = argmin_by(thetas.par_iter().flat_map_iter(|(k, w)| {
        ts.iter()
            .map(move |&t| (-g_theta(t, w), vec![k.theta1, k.theta2, t]))
    }));
    extrema.push(FormExtremum {
        form: "g".into(),
        variables: "theta",
        kind: "max",
        value: -v,
        at,
        pass: -v < 0.0,
    });
    let (v, at) = argmin_by(
        xe.par_iter()
            .flat_map_iter(|&(x, y)| ts.iter().map(move |&t| (-g_xi_eta(t, x, y), vec![x, y, t]))),
    );
    extrema.push(FormExtremum {
        form: "g".into(),
        variables: "xi_eta",
        kind: "max",
        value: -v,
        at,
        pass: -v < 0.0,
    });

    let m4_at_zero_locus = [m_xi_eta(4, 0.5, -1.0), m_xi_eta(4, -0.5, 1.0)];

    let mut rng = ChaCha8Rng::seed_from_u64(0x4d32);
    let mut m2_factorization_residual: f64 = 0.0;
    let mut substitution_residual: f64 = 0.0;
    for _ in 0..1000 {
        let (x, y) = (rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0));
        m2_factorization_residual =
            m2_factorization_residual.max((m_xi_eta(2, x, y) - m2_factored(x, y)).abs());
        let k = QuasiMomentum::new(rng.gen_range(-PI..=PI), rng.gen_range(-PI..=PI));
        let w = trig_invariants(&k);
        for i in 1..=6 {
            let (x, y) = substitution(i, &k);
            substitution_residual =
                substitution_residual.max((m_theta(i, &w) - m_xi_eta(i, x, y)).abs());
        }
        let (x, y) = substitution(5, &k);
        let t = rng.gen_range(-1.0..1.0);
        substitution_residual =
            substitution_residual.max((g_theta(t, &w) - g_xi_eta(t, x, y)).abs());
    }

    // polynomial values reach ~2e4, so identities hold to a few ulps of that
    let pass = extrema.iter().all(|e| e.pass)
        && m4_at_zero_locus.iter().all(|v| v.abs() <= M4_ZERO_TOL)
        && m2_factorization_residual <= APPENDIX_B_TOL
        && substitution_residual <= 1e-9;
    Ok(AppendixBReport {
        n,
        extrema,
        m4_at_zero_locus,
        m2_factorization_residual,
        substitution_residual,
        pass,
    })
}

// ---------------------------------------------------------------- identities

pub const IDENTITY_TOL: f64 = 1e-12;

#[derive(Clone, Debug, Serialize)]
pub struct IdentityResidual {
    pub identity: &'static str,
    pub max_residual: f64,
    pub at: [f64; 2],
}

#[derive(Clone, Debug, Serialize)]
pub struct IdentityReport {
    pub n: usize,
    pub identities: Vec<IdentityResidual>,
    pub pass: bool,
}

const IDENTITIES: [&str; 4] = [
    "1+8*omega = |1+e^{i t1}+e^{i t2}|^2",
    "1+8*omega2 = |1+e^{i t1}+e^{-i t2}|^2",
    "cos(t1+2t2)+cos(2t1+t2)+cos(t2-t1) = 4*omega3-1",
    "cos(t1-2t2)+cos(2t1-t2)+cos(t1+t2) = 4*omega_t3-1",
];

/// Residuals of the four identities at one point.
pub fn identity_residuals(k: &QuasiMomentum) -> [f64; 4] {
    let (t1, t2) = (k.theta1, k.theta2);
    let w = trig_invariants(k);
    let mod2 = |a: f64, b: f64| {
        let re = 1.0 + a.cos() + b.cos();
        let im = a.sin() + b.sin();
        re * re + im * im
    };
    [
        (1.0 + 8.0 * w.omega - mod2(t1, t2)).abs(),
        (1.0 + 8.0 * w.omega2 - mod2(t1, -t2)).abs(),
        ((t1 + 2.0 * t2).cos() + (2.0 * t1 + t2).cos() + (t2 - t1).cos() - (4.0 * w.omega3 - 1.0))
            .abs(),
        ((t1 - 2.0 * t2).cos() + (2.0 * t1 - t2).cos() + (t1 + t2).cos()
            - (4.0 * w.omega_t3 - 1.0))
            .abs(),
    ]
}

pub fn identity_suite(n: usize) -> Result<IdentityReport> {
    if n < 101 {
        return Err(Error::InvalidInput(format!(
            "identity grid needs n >= 101, got {n}"
        )));
    }
    let pts = ThetaGrid::combined(n).points();
    let identities = (0..IDENTITIES.len())
        .map(|i| {
            let (v, at) = argmin_by(
                pts.par_iter()
                    .map(|k| (-identity_residuals(k)[i], vec![k.theta1, k.theta2])),
            );
            IdentityResidual {
                identity: IDENTITIES[i],
                max_residual: -v,
                at: [at[0], at[1]],
            }
        })
        .collect::<Vec<_>>();
    let pass = identities.iter().all(|r| r.max_residual <= IDENTITY_TOL);
    Ok(IdentityReport {
        n,
        identities,
        pass,
    })
}

// ---------------------------------------------------------------- suites

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    All,
    Equivalence,
    Ranges,
    #[serde(rename = "appendixb")]
    AppendixB,
    Identities,
    Eigenfunctions,
}

impl Suite {
    pub const EACH: [Suite; 5] = [
        Suite::Equivalence,
        Suite::Ranges,
        Suite::AppendixB,
        Suite::Identities,
        Suite::Eigenfunctions,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Suite::All => "all",
            Suite::Equivalence => "equivalence",
            Suite::Ranges => "ranges",
            Suite::AppendixB => "appendixb",
            Suite::Identities => "identities",
            Suite::Eigenfunctions => "eigenfunctions",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.to_ascii_lowercase();
        [Suite::All].into_iter().chain(Suite::EACH).find(|x| x.as_str() == s).ok_or_else(|| {
            Error::InvalidInput(format!(
                "unknown suite `{s}` (expected all, equivalence, ranges, appendixb, identities, eigenfunctions)"
            ))
        })
    }
}

#[derive(Clone, Copy, Debug)]
pub struct VerifyOptions {
    pub grid: usize,
    pub equivalence_samples: usize,
    pub seed: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            grid: DEFAULT_GRID,
            equivalence_samples: 100,
            seed: 20240601,
        }
    }
}

pub const EQUIVALENCE_TOL: f64 = 1e-8;
pub const RANGE_TOL: f64 = 1e-6;
pub const EIGEN_TOL: f64 = 1e-10;

#[derive(Clone, Debug, Serialize)]
pub struct EquivalenceCase {
    pub tiling: TilingName,
    pub potential: &'static str,
    pub samples: usize,
    pub max_residual: f64,
    pub worst_lambda: f64,
    pub worst_theta: [f64; 2],
    pub pass: bool,
}

pub fn equivalence_suite(opts: &VerifyOptions) -> Result<Vec<EquivalenceCase>> {
    let potentials = [
        ("zero", Potential::zero(1.0)?),
        ("graphene", Potential::graphene(1.0)?),
    ];
    let mut out = Vec::new();
    for (ti, name) in TilingName::ASSEMBLED.into_iter().enumerate() {
        let spec = build_tiling(name);
        for (pi, (label, q)) in potentials.iter().enumerate() {
            let solver = IntervalSolver::new(q);
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ ((ti as u64) << 8) ^ pi as u64);
            let samples: Vec<(f64, QuasiMomentum)> = (0..opts.equivalence_samples)
                .map(|_| {
                    let l = rng.gen_range(0.05..=40.0);
                    (
                        l,
                        QuasiMomentum::new(rng.gen_range(-PI..=PI), rng.gen_range(-PI..=PI)),
                    )
                })
                .collect();
            let residuals: Vec<f64> = samples
                .par_iter()
                .map(|(l, k)| check_equivalence(&spec, &solver.basis(*l)?, k))
                .collect::<Result<_>>()?;
            let (mut worst, mut at) = (0.0, 0);
            for (i, &r) in residuals.iter().enumerate() {
                if r > worst || r.is_nan() {
                    worst = r;
                    at = i;
                }
            }
            let (l, k) = samples
                .get(at)
                .copied()
                .unwrap_or((f64::NAN, QuasiMomentum::zero()));
            out.push(EquivalenceCase {
                tiling: name,
                potential: label,
                samples: samples.len(),
                max_residual: worst,
                worst_lambda: l,
                worst_theta: [k.theta1, k.theta2],
                pass: worst <= EQUIVALENCE_TOL,
            });
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct RangeCase {
    #[serde(flatten)]
    pub recovery: RangeRecovery,
    pub hausdorff_bound: f64,
    /// Endpoint attainment is gated for the five assembled tilings only. The
    /// ET lower endpoint -13/20 is reached at cos(t1/2) = 1/4, which no
    /// rational grid hits, so for the older tilings it is reported.
    pub attainment_gated: bool,
    pub pass: bool,
}

pub fn ranges_suite(n: usize) -> Result<Vec<RangeCase>> {
    TilingName::ALL
        .iter()
        .map(|&name| {
            let r = recover_ac_range(name, n)?;
            let bound = 5.0 / n as f64 + 1e-6;
            let gated = name.has_attachments();
            let pass = r.hausdorff <= bound
                && r.soundness <= RANGE_TOL
                && (!gated || r.endpoint_attainment <= RANGE_TOL);
            Ok(RangeCase {
                recovery: r,
                hausdorff_bound: bound,
                attainment_gated: gated,
                pass,
            })
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct EigenCase {
    pub tiling: TilingName,
    pub kind: EigenKind,
    pub potential: &'static str,
    pub lambda: f64,
    pub support_edges: usize,
    pub continuity: f64,
    pub kirchhoff: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// The first eigenvalue of `kind` below `lambda_max` that admits a construction.
pub fn first_eigenfunction(
    tiling: TilingName,
    kind: EigenKind,
    q: &Potential,
    lambda_max: f64,
) -> Result<crate::eigenfunction::EdgewiseFunction> {
    let profile = DiscriminantProfile::build(q, lambda_max, &ScanOptions::default())?;
    let g = kind.generator();
    let candidates = crate::spectrum::point_spectrum_from(tiling, &profile)
        .into_iter()
        .find(|p| p.generator == g)
        .map(|p| p.lambdas)
        .unwrap_or_else(|| profile.roots_of(move |b| g.residual(b)));
    let mut last = Error::NoSupport(format!("no {kind} level for {tiling} below {lambda_max}"));
    for l in candidates {
        match build_eigenfunction(tiling, kind, q, l, &EigenOptions::default()) {
            Ok(f) => return Ok(f),
            Err(e) => last = e,
        }
    }
    Err(last)
}

pub fn eigenfunction_cases() -> Vec<(TilingName, EigenKind)> {
    use TilingName::*;
    vec![
        (TrH, EigenKind::PolygonDirichlet),
        (TrH, EigenKind::DodecagonSprimeZero),
        (TrH, EigenKind::TriangleRingSprimeMinus23),
        (Ss, EigenKind::PolygonDirichlet),
        (Rth, EigenKind::PolygonDirichlet),
        (Sth, EigenKind::PolygonDirichlet),
        (TrTh, EigenKind::PolygonDirichlet),
    ]
}

pub fn eigenfunctions_suite() -> Result<Vec<EigenCase>> {
    let potentials = [
        ("zero", Potential::zero(1.0)?),
        ("graphene", Potential::graphene(1.0)?),
    ];
    let jobs: Vec<_> = eigenfunction_cases()
        .into_iter()
        .flat_map(|(t, k)| potentials.iter().map(move |(label, q)| (t, k, *label, q)))
        .collect();
    Ok(jobs
        .par_iter()
        .map(|&(tiling, kind, label, q)| {
            let built =
                first_eigenfunction(tiling, kind, q, 60.0).and_then(|f| Ok((f.residuals()?, f)));
            match built {
                Ok((r, f)) => EigenCase {
                    tiling,
                    kind,
                    potential: label,
                    lambda: f.lambda,
                    support_edges: f.edges.len(),
                    continuity: r.continuity,
                    kirchhoff: r.kirchhoff,
                    pass: r.continuity <= EIGEN_TOL && r.kirchhoff <= EIGEN_TOL,
                    error: None,
                },
                Err(e) => EigenCase {
                    tiling,
                    kind,
                    potential: label,
                    lambda: f64::NAN,
                    support_edges: 0,
                    continuity: f64::NAN,
                    kirchhoff: f64::NAN,
                    pass: false,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect())
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteResult {
    pub suite: Suite,
    pub pass: bool,
    pub details: serde_json::Value,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub requested: Suite,
    pub grid: usize,
    pub pass: bool,
    pub suites: Vec<SuiteResult>,
}

impl VerifyReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

fn run_one(suite: Suite, opts: &VerifyOptions) -> Result<SuiteResult> {
    let (pass, details) = match suite {
        Suite::Equivalence => {
            let c = equivalence_suite(opts)?;
            (c.iter().all(|x| x.pass), serde_json::to_value(c)?)
        }
        Suite::Ranges => {
            let c = ranges_suite(opts.grid)?;
            (c.iter().all(|x| x.pass), serde_json::to_value(c)?)
        }
        Suite::AppendixB => {
            let r = appendix_b_suite(opts.grid)?;
            (r.pass, serde_json::to_value(r)?)
        }
        Suite::Identities => {
            let r = identity_suite(opts.grid)?;
            (r.pass, serde_json::to_value(r)?)
        }
        Suite::Eigenfunctions => {
            let c = eigenfunctions_suite()?;
            (c.iter().all(|x| x.pass), serde_json::to_value(c)?)
        }
        Suite::All => unreachable!("expanded by run_verify"),
    };
    Ok(SuiteResult {
        suite,
        pass,
        details,
    })
}

pub fn run_verify(suite: Suite, opts: &VerifyOptions) -> Result<VerifyReport> {
    let list: Vec<Suite> = if suite == Suite::All {
        Suite::EACH.to_vec()
    } else {
        vec![suite]
    };
    let suites = list
        .into_iter()
        .map(|s| run_one(s, opts))
        .collect::<Result<Vec<_>>>()?;
    Ok(VerifyReport {
        requested: suite,
        grid: opts.grid,
        pass: suites.iter().all(|s| s.pass),
        suites,
    })
}
