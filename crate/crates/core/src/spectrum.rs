//! Absolutely continuous bands and point spectra.
//!
//! Bands are reported per monotone branch of lambda -> S'(a, lambda): a band
//! never straddles a critical point of S'. Neighbouring bands may therefore
//! share an endpoint, which is where the point spectrum {S = 0} sits for q = 0.

use std::f64::consts::PI;
use std::fmt;

use num_rational::Ratio;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::dispersion::dispersion_form;
use crate::error::{ensure_finite, Error, Result};
use crate::interval::{EdgeSolutionBasis, IntervalSolver};
use crate::potential::Potential;
use crate::roots::bisect;
use crate::tiling::TilingName;

/// A number r + c sqrt(d) with rational r, c.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Surd {
    pub rational: Ratio<i64>,
    pub coeff: Ratio<i64>,
    pub radicand: u32,
}

impl Surd {
    pub fn rational(n: i64, d: i64) -> Self {
        Self {
            rational: Ratio::new(n, d),
            coeff: Ratio::from_integer(0),
            radicand: 1,
        }
    }

    pub fn with_root(r: Ratio<i64>, c: Ratio<i64>, radicand: u32) -> Self {
        Self {
            rational: r,
            coeff: c,
            radicand,
        }
    }

    pub fn value(&self) -> f64 {
        let f = |q: Ratio<i64>| *q.numer() as f64 / *q.denom() as f64;
        f(self.rational) + f(self.coeff) * (self.radicand as f64).sqrt()
    }
}

impl fmt::Display for Surd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if *self.coeff.numer() == 0 {
            return write!(f, "{}", self.rational);
        }
        if *self.rational.numer() != 0 {
            write!(f, "{}", self.rational)?;
            f.write_str(if *self.coeff.numer() < 0 {
                " - "
            } else {
                " + "
            })?;
        } else if *self.coeff.numer() < 0 {
            f.write_str("-")?;
        }
        let c = if *self.coeff.numer() < 0 {
            -self.coeff
        } else {
            self.coeff
        };
        write!(f, "{}*sqrt({})", c, self.radicand)
    }
}

impl Serialize for Surd {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// A closed interval of S' values with exact endpoints.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AcInterval {
    pub lo: Surd,
    pub hi: Surd,
}

impl AcInterval {
    pub fn bounds(&self) -> (f64, f64) {
        (self.lo.value(), self.hi.value())
    }
}

/// The S' ranges making up the absolutely continuous spectrum.
pub fn ac_range(name: TilingName) -> Vec<AcInterval> {
    use TilingName::*;
    let q = |n, d| Surd::rational(n, d);
    let iv = |lo, hi| AcInterval { lo, hi };
    let one = q(1, 1);
    let inv_sqrt3 = |s: i64| Surd::with_root(Ratio::from_integer(0), Ratio::new(s, 3), 3);
    match name {
        TrH => vec![iv(q(-2, 3), q(0, 1)), iv(q(1, 3), one)],
        Ss => vec![iv(q(-3, 5), one)],
        // min of (2 cos t1 - sqrt(1 + 8 omega)) / 5 is -13/20, at cos(t1/2) = 1/4
        Et => vec![iv(q(-13, 20), one)],
        Rth => vec![iv(q(-3, 4), one)],
        Sth => vec![iv(
            Surd::with_root(Ratio::new(-1, 5), Ratio::new(-1, 5), 3),
            one,
        )],
        TrTh => vec![
            iv(q(-1, 1), inv_sqrt3(-1)),
            iv(q(-1, 3), q(1, 3)),
            iv(inv_sqrt3(1), one),
        ],
        T | Th => vec![iv(q(-1, 2), one)],
        S | H | TrS => vec![iv(q(-1, 1), one)],
    }
}

pub fn ac_bounds(name: TilingName) -> Vec<(f64, f64)> {
    ac_range(name).iter().map(AcInterval::bounds).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SpectralBand {
    pub band_index: usize,
    pub lambda_lo: f64,
    pub lambda_hi: f64,
}

fn index_bands(mut raw: Vec<(f64, f64)>) -> Vec<SpectralBand> {
    raw.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    raw.into_iter()
        .enumerate()
        .map(|(i, (lo, hi))| SpectralBand {
            band_index: i,
            lambda_lo: lo,
            lambda_hi: hi,
        })
        .collect()
}

/// Bands for q = 0 with S' = cos(rho a), for rho a in [0, 2 pi (k_max + 1)].
pub fn bands_zero_potential(name: TilingName, a: f64, k_max: usize) -> Result<Vec<SpectralBand>> {
    ensure_finite("edge length", a)?;
    if a <= 0.0 {
        return Err(Error::InvalidInput(format!(
            "edge length must be positive, got {a}"
        )));
    }
    let mut raw = Vec::new();
    for m in 0..2 * (k_max + 1) {
        let base = m as f64 * PI;
        for (lo, hi) in ac_bounds(name) {
            // cos decreases on even branches and increases on odd ones
            let (r0, r1) = if m % 2 == 0 {
                (base + hi.acos(), base + lo.acos())
            } else {
                (base + PI - lo.acos(), base + PI - hi.acos())
            };
            if r1 > r0 {
                raw.push(((r0 / a).powi(2), (r1 / a).powi(2)));
            }
        }
    }
    Ok(index_bands(raw))
}

/// Tuning knobs for the lambda-space scans.
#[derive(Clone, Copy, Debug)]
pub struct ScanOptions {
    /// Grid points per pi/a in rho.
    pub points_per_half_period: usize,
    /// Integrator steps.
    pub steps: usize,
    /// Relative evenness tolerance.
    pub even_tol: f64,
}

impl Default for ScanOptions {
    fn default() -> Self {
        Self {
            points_per_half_period: 50,
            steps: crate::interval::DEFAULT_STEPS,
            even_tol: 1e-6,
        }
    }
}

/// |S' - level| below which a level counts as touching a branch end.
const SNAP: f64 = 1e-12;

/// One stretch of lambda on which S' is monotone.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Branch {
    pub lambda_lo: f64,
    pub lambda_hi: f64,
    pub sp_lo: f64,
    pub sp_hi: f64,
}

/// S'(a, lambda) sampled on a rho grid and split into monotone branches.
#[derive(Clone, Debug)]
pub struct DiscriminantProfile {
    solver: IntervalSolver,
    grid: Vec<f64>,
    samples: Vec<EdgeSolutionBasis>,
    branches: Vec<Branch>,
}

impl DiscriminantProfile {
    /// Scan lambda from below min q up to `lambda_max`. Requires an even q.
    pub fn build(q: &Potential, lambda_max: f64, opts: &ScanOptions) -> Result<Self> {
        ensure_finite("lambda_max", lambda_max)?;
        q.require_even(opts.even_tol)?;
        let solver = IntervalSolver::with_steps(q, opts.steps)?;
        let a = q.a;
        // Below min q the solution S is convex and S'(a) > 1.
        let lambda_start = q.min_value().min(0.0) - 1.0 / (a * a);
        let r0 = -(-lambda_start).sqrt();
        let r1 = lambda_max.max(0.0).sqrt();
        let dr = PI / (a * opts.points_per_half_period.max(2) as f64);
        let mut grid = Vec::new();
        if lambda_max > lambda_start {
            let n = ((r1 - r0) / dr).ceil().max(1.0) as usize;
            for i in 0..=n {
                let r = if i == n { r1 } else { r0 + dr * i as f64 };
                let l = r * r.abs();
                grid.push(if i == n { lambda_max } else { l });
            }
        }
        let with_d: Vec<(EdgeSolutionBasis, f64)> = grid
            .par_iter()
            .map(|&l| solver.basis_with_derivative(l))
            .collect::<Result<_>>()?;
        let samples: Vec<EdgeSolutionBasis> = with_d.iter().map(|p| p.0).collect();

        // critical points of S' between grid nodes
        let mut breaks = grid.first().map(|&l| vec![l]).unwrap_or_default();
        for i in 0..grid.len().saturating_sub(1) {
            let (d0, d1) = (with_d[i].1, with_d[i + 1].1);
            if (d0 < 0.0) != (d1 < 0.0) {
                let f = |l: f64| {
                    solver
                        .basis_with_derivative(l)
                        .map(|p| p.1)
                        .unwrap_or(f64::NAN)
                };
                let c = bisect(f, grid[i], grid[i + 1], d0, lambda_tol(grid[i + 1]));
                breaks.push(c);
            }
        }
        if let Some(&last) = grid.last() {
            if breaks.last() != Some(&last) {
                breaks.push(last);
            }
        }
        let sp_at: Vec<f64> = breaks
            .iter()
            .map(|&l| solver.sprime(l))
            .collect::<Result<_>>()?;
        let branches = breaks
            .windows(2)
            .zip(sp_at.windows(2))
            .filter(|(b, _)| b[1] > b[0])
            .map(|(b, s)| Branch {
                lambda_lo: b[0],
                lambda_hi: b[1],
                sp_lo: s[0],
                sp_hi: s[1],
            })
            .collect();
        Ok(Self {
            solver,
            grid,
            samples,
            branches,
        })
    }

    pub fn solver(&self) -> &IntervalSolver {
        &self.solver
    }

    pub fn branches(&self) -> &[Branch] {
        &self.branches
    }

    /// The lambda on `b` where S' equals `level` (assumed within the branch range).
    fn at_level(&self, b: &Branch, level: f64) -> f64 {
        if (level - b.sp_lo).abs() <= SNAP {
            return b.lambda_lo;
        }
        if (level - b.sp_hi).abs() <= SNAP {
            return b.lambda_hi;
        }
        let f = |l: f64| self.solver.sprime(l).unwrap_or(f64::NAN) - level;
        bisect(
            f,
            b.lambda_lo,
            b.lambda_hi,
            b.sp_lo - level,
            lambda_tol(b.lambda_hi),
        )
    }

    /// Every lambda in the scanned window with S'(lambda) = level, ascending.
    pub fn level_crossings(&self, level: f64) -> Vec<f64> {
        let mut out: Vec<f64> = Vec::new();
        for b in &self.branches {
            let (m, mx) = (b.sp_lo.min(b.sp_hi), b.sp_lo.max(b.sp_hi));
            if level < m - SNAP || level > mx + SNAP {
                continue;
            }
            let l = self.at_level(b, level.clamp(m, mx));
            if out.last().is_none_or(|&p| l - p > lambda_tol(l)) {
                out.push(l);
            }
        }
        out
    }

    /// Closure of {lambda : S'(lambda) in one of `intervals`}, split per branch.
    pub fn bands(&self, intervals: &[(f64, f64)]) -> Vec<SpectralBand> {
        let mut raw = Vec::new();
        for b in &self.branches {
            let (m, mx) = (b.sp_lo.min(b.sp_hi), b.sp_lo.max(b.sp_hi));
            for &(lo, hi) in intervals {
                let (v0, v1) = (lo.max(m), hi.min(mx));
                if v1 <= v0 {
                    continue;
                }
                let (l0, l1) = (self.at_level(b, v0), self.at_level(b, v1));
                let (l0, l1) = (l0.min(l1), l0.max(l1));
                if l1 > l0 {
                    raw.push((l0, l1));
                }
            }
        }
        index_bands(raw)
    }

    /// Sign-change roots of `g(basis)` over the scanned window.
    pub fn roots_of(&self, g: impl Fn(&EdgeSolutionBasis) -> f64) -> Vec<f64> {
        let mut out = Vec::new();
        for i in 0..self.grid.len().saturating_sub(1) {
            let (g0, g1) = (g(&self.samples[i]), g(&self.samples[i + 1]));
            if g0 == 0.0 {
                out.push(self.grid[i]);
            } else if (g0 < 0.0) != (g1 < 0.0) && g1 != 0.0 {
                let f = |l: f64| self.solver.basis(l).map(|b| g(&b)).unwrap_or(f64::NAN);
                out.push(bisect(
                    f,
                    self.grid[i],
                    self.grid[i + 1],
                    g0,
                    lambda_tol(self.grid[i + 1]),
                ));
            }
        }
        if let (Some(&l), Some(s)) = (self.grid.last(), self.samples.last()) {
            if g(s) == 0.0 {
                out.push(l);
            }
        }
        out
    }
}

fn lambda_tol(l: f64) -> f64 {
    1e-14 * l.abs().max(1.0)
}

/// Bands of `name` for an even potential, up to `lambda_max`.
pub fn bands_general(
    name: TilingName,
    q: &Potential,
    lambda_max: f64,
) -> Result<Vec<SpectralBand>> {
    let profile = DiscriminantProfile::build(q, lambda_max, &ScanOptions::default())?;
    Ok(profile.bands(&ac_bounds(name)))
}

/// Theta-independent factors of the dispersion relation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Generator {
    #[serde(rename = "S_zero")]
    SZero,
    #[serde(rename = "Sprime_zero")]
    SprimeZero,
    #[serde(rename = "Sprime_minus_two_thirds")]
    SprimeMinusTwoThirds,
    #[serde(rename = "TwoSprimePlusOne_zero")]
    TwoSprimePlusOneZero,
}

impl Generator {
    pub fn as_str(self) -> &'static str {
        match self {
            Generator::SZero => "S_zero",
            Generator::SprimeZero => "Sprime_zero",
            Generator::SprimeMinusTwoThirds => "Sprime_minus_two_thirds",
            Generator::TwoSprimePlusOneZero => "TwoSprimePlusOne_zero",
        }
    }

    /// The quantity that vanishes on this part of the point spectrum.
    pub fn residual(self, b: &EdgeSolutionBasis) -> f64 {
        match self {
            Generator::SZero => b.s,
            Generator::SprimeZero => b.sp,
            Generator::SprimeMinusTwoThirds => b.sp + 2.0 / 3.0,
            Generator::TwoSprimePlusOneZero => 2.0 * b.sp + 1.0,
        }
    }

    /// S' level for the generators that fix S'.
    fn level(self) -> Option<f64> {
        match self {
            Generator::SZero => None,
            Generator::SprimeZero => Some(0.0),
            Generator::SprimeMinusTwoThirds => Some(-2.0 / 3.0),
            Generator::TwoSprimePlusOneZero => Some(-0.5),
        }
    }
}

/// The generators present in the prefactor of `name`.
pub fn generators(name: TilingName) -> Vec<Generator> {
    let p = dispersion_form(name).prefactor;
    let mut g = Vec::new();
    if p.i > 0 {
        g.push(Generator::SZero);
    }
    if p.j > 0 {
        g.push(Generator::SprimeZero);
    }
    if p.l > 0 {
        g.push(Generator::SprimeMinusTwoThirds);
    }
    if p.k > 0 {
        g.push(Generator::TwoSprimePlusOneZero);
    }
    g
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PointSpectrum {
    pub generator: Generator,
    pub lambdas: Vec<f64>,
}

pub fn point_spectrum_from(name: TilingName, profile: &DiscriminantProfile) -> Vec<PointSpectrum> {
    generators(name)
        .into_iter()
        .map(|g| {
            let lambdas = match g.level() {
                Some(level) => profile.level_crossings(level),
                None => profile.roots_of(move |b| g.residual(b)),
            };
            PointSpectrum {
                generator: g,
                lambdas,
            }
        })
        .collect()
}

pub fn point_spectrum(
    name: TilingName,
    q: &Potential,
    lambda_max: f64,
) -> Result<Vec<PointSpectrum>> {
    let profile = DiscriminantProfile::build(q, lambda_max, &ScanOptions::default())?;
    Ok(point_spectrum_from(name, &profile))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectrumReport {
    pub tiling: TilingName,
    pub ac_range: Vec<AcInterval>,
    pub ac_bands: Vec<SpectralBand>,
    pub point_spectrum: Vec<PointSpectrum>,
}

pub fn spectrum_report(name: TilingName, q: &Potential, lambda_max: f64) -> Result<SpectrumReport> {
    let profile = DiscriminantProfile::build(q, lambda_max, &ScanOptions::default())?;
    Ok(SpectrumReport {
        tiling: name,
        ac_range: ac_range(name),
        ac_bands: profile.bands(&ac_bounds(name)),
        point_spectrum: point_spectrum_from(name, &profile),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn surd_values_and_text() {
        let s = ac_range(TilingName::Sth)[0].lo;
        assert!((s.value() + (1.0 + 3f64.sqrt()) / 5.0).abs() < 1e-15);
        assert_eq!(s.to_string(), "-1/5 - 1/5*sqrt(3)");
        assert_eq!(ac_range(TilingName::TrTh)[0].hi.to_string(), "-1/3*sqrt(3)");
        assert_eq!(ac_range(TilingName::TrH)[0].lo.to_string(), "-2/3");
    }

    #[test]
    fn ss_leading_band() {
        let b = bands_zero_potential(TilingName::Ss, 1.0, 0).unwrap();
        assert_eq!(b[0].lambda_lo, 0.0);
        assert!((b[0].lambda_hi - (-0.6f64).acos().powi(2)).abs() < 1e-15);
        let b2 = bands_zero_potential(TilingName::Ss, 2.0, 0).unwrap();
        for (x, y) in b.iter().zip(&b2) {
            assert!((x.lambda_hi / 4.0 - y.lambda_hi).abs() < 1e-14);
        }
    }

    #[test]
    fn general_matches_closed_form_for_zero_potential() {
        let q = Potential::zero(1.0).unwrap();
        let lm = 100.0;
        let g = bands_general(TilingName::Ss, &q, lm).unwrap();
        let z: Vec<_> = bands_zero_potential(TilingName::Ss, 1.0, 3)
            .unwrap()
            .into_iter()
            .filter(|b| b.lambda_lo < lm)
            .collect();
        assert_eq!(g.len(), z.len());
        assert_eq!(g.len(), 3);
        for (x, y) in g.iter().zip(&z) {
            assert!((x.lambda_lo - y.lambda_lo).abs() < 1e-9, "{x:?} {y:?}");
            assert!(
                (x.lambda_hi - y.lambda_hi.min(lm)).abs() < 1e-9,
                "{x:?} {y:?}"
            );
        }
    }

    #[test]
    fn trh_gap_below_quarter_pi_squared() {
        let q = Potential::zero(1.0).unwrap();
        let g = bands_general(TilingName::TrH, &q, 50.0).unwrap();
        let xi1 = (1.0f64 / 3.0).acos().powi(2);
        let quarter = (PI / 2.0).powi(2);
        assert!((g[0].lambda_lo).abs() < 1e-12 && (g[0].lambda_hi - xi1).abs() < 1e-9);
        assert!((g[1].lambda_lo - quarter).abs() < 1e-9);
    }

    #[test]
    fn zero_potential_point_spectrum() {
        let q = Potential::zero(1.0).unwrap();
        let ps = point_spectrum(TilingName::Ss, &q, 100.0).unwrap();
        assert_eq!(ps.len(), 1);
        let want = [PI * PI, 4.0 * PI * PI, 9.0 * PI * PI];
        assert_eq!(ps[0].lambdas.len(), 3);
        for (l, w) in ps[0].lambdas.iter().zip(want) {
            assert!((l - w).abs() < 1e-10 * w);
        }
        let ps = point_spectrum(TilingName::TrH, &q, 30.0).unwrap();
        let gens: Vec<_> = ps.iter().map(|p| p.generator).collect();
        assert_eq!(
            gens,
            [
                Generator::SZero,
                Generator::SprimeZero,
                Generator::SprimeMinusTwoThirds
            ]
        );
        assert!((ps[1].lambdas[0] - (PI / 2.0).powi(2)).abs() < 1e-10);
        assert!((ps[2].lambdas[0] - (-2.0f64 / 3.0).acos().powi(2)).abs() < 1e-10);
    }

    #[test]
    fn odd_potential_is_rejected() {
        let q = Potential::new(
            crate::potential::PotentialKind::SampledTable {
                abscissae: vec![0.0, 1.0],
                values: vec![0.0, 1.0],
            },
            1.0,
        )
        .unwrap();
        assert!(matches!(
            bands_general(TilingName::Ss, &q, 10.0),
            Err(Error::NotEven { .. })
        ));
    }
}
