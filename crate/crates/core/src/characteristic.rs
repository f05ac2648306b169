//! The 2I x 2I Floquet vertex system in (A_1..A_I, B_1..B_I) and its determinant.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::dispersion::dispersion_form;
use crate::error::{Error, Result};
use crate::interval::{zero_basis, EdgeSolutionBasis};
use crate::tiling::{build_tiling, EdgeEnd, QuasiMomentum, TilingName, TilingSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RowKind {
    Continuity,
    Kirchhoff,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct RowTag {
    pub vertex: usize,
    pub kind: RowKind,
}

#[derive(Clone, Debug)]
pub struct CharacteristicSystem {
    pub tiling: TilingName,
    pub dim: usize,
    pub entries: DMatrix<Complex64>,
    pub rows: Vec<RowTag>,
}

/// Fill the vertex system. A Start endpoint contributes value A_j and
/// derivative B_j; an End endpoint contributes A_j C + B_j S and
/// A_j C' + B_j S'. Each is multiplied by its phase. Continuity rows are
/// consecutive differences of endpoint values; the Kirchhoff row sums the
/// signed derivatives.
pub fn assemble(
    spec: &TilingSpec,
    b: &EdgeSolutionBasis,
    k: &QuasiMomentum,
) -> Result<CharacteristicSystem> {
    if !spec.has_attachments() {
        return Err(Error::UnsupportedTiling(spec.name.to_string()));
    }
    let n = spec.edge_count;
    let dim = 2 * n;
    let zero = Complex64::new(0.0, 0.0);
    let mut m = DMatrix::from_element(dim, dim, zero);
    let mut rows = Vec::with_capacity(dim);
    let mut r = 0;
    for v in &spec.vertices {
        // (column, coefficient) lists for the value and derivative at each endpoint
        let endpoint = |at: &crate::tiling::Attachment| {
            let ph = k.phase(at.phase);
            let (ca, cb) = (at.edge - 1, n + at.edge - 1);
            let sign = at.kirchhoff_sign as f64;
            match at.end {
                EdgeEnd::Start => (vec![(ca, ph)], vec![(cb, ph * sign)]),
                EdgeEnd::End => (
                    vec![(ca, ph * b.c), (cb, ph * b.s)],
                    vec![(ca, ph * (b.cp * sign)), (cb, ph * (b.sp * sign))],
                ),
            }
        };
        let ends: Vec<_> = v.attachments.iter().map(endpoint).collect();
        for w in ends.windows(2) {
            for &(c, x) in &w[0].0 {
                m[(r, c)] += x;
            }
            for &(c, x) in &w[1].0 {
                m[(r, c)] -= x;
            }
            rows.push(RowTag {
                vertex: v.id,
                kind: RowKind::Continuity,
            });
            r += 1;
        }
        for e in &ends {
            for &(c, x) in &e.1 {
                m[(r, c)] += x;
            }
        }
        rows.push(RowTag {
            vertex: v.id,
            kind: RowKind::Kirchhoff,
        });
        r += 1;
    }
    debug_assert_eq!(r, dim);
    Ok(CharacteristicSystem {
        tiling: spec.name,
        dim,
        entries: m,
        rows,
    })
}

/// Determinant by LU with partial pivoting.
pub fn determinant(sys: &CharacteristicSystem) -> Result<Complex64> {
    determinant_of(&sys.entries)
}

pub fn determinant_of(m: &DMatrix<Complex64>) -> Result<Complex64> {
    if !m.is_square() {
        return Err(Error::InvalidInput(
            "determinant of a non-square matrix".into(),
        ));
    }
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::InvalidInput("matrix has non-finite entries".into()));
    }
    Ok(m.clone().lu().determinant())
}

/// Product of row 2-norms; bounds |det| from above.
pub fn hadamard_bound(m: &DMatrix<Complex64>) -> f64 {
    m.row_iter()
        .map(|r| r.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
        .product()
}

/// How the determinant of the assembled system relates to the closed form:
/// det = kappa * exp(i (m1 t1 + m2 t2)) * F * p(S', s1 t1, t2).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Calibration {
    pub kappa: f64,
    pub monomial: (i32, i32),
    /// Sign applied to theta1 before evaluating p. The snub trihexagonal
    /// relation is written in the alpha-tilde = exp(-i theta1) convention.
    pub theta1_sign: f64,
}

pub fn calibration(name: TilingName) -> Result<Calibration> {
    let (kappa, monomial, theta1_sign) = match name {
        TilingName::TrH => (-3.0, (-1, 1), 1.0),
        TilingName::Ss => (-1.0, (3, 3), 1.0),
        TilingName::Rth => (-2.0, (2, 2), 1.0),
        TilingName::Sth => (1.0, (-6, 6), -1.0),
        TilingName::TrTh => (-1.0, (2, 2), 1.0),
        other => return Err(Error::UnsupportedTiling(other.to_string())),
    };
    Ok(Calibration {
        kappa,
        monomial,
        theta1_sign,
    })
}

/// Point used to pin the constants in [`calibration`].
pub const CALIBRATION_POINT: (f64, f64, f64) = (2.0, 0.3, -0.8);

/// Re-derive kappa at [`CALIBRATION_POINT`] (q = 0, a = 1): the ratio of the
/// determinant to monomial * F * p there.
pub fn calibrate(name: TilingName) -> Result<Complex64> {
    let (lambda, t1, t2) = CALIBRATION_POINT;
    let spec = build_tiling(name);
    let b = zero_basis(1.0, lambda);
    let k = QuasiMomentum::new(t1, t2);
    let cal = calibration(name)?;
    let det = determinant(&assemble(&spec, &b, &k)?)?;
    let form = dispersion_form(name);
    let kp = QuasiMomentum::new(cal.theta1_sign * t1, t2);
    Ok(det / (k.phase(cal.monomial) * form.prefactor.evaluate(&b) * form.evaluate(b.sp, &kp)))
}

/// kappa * monomial * F * p for the basis and quasi-momentum.
pub fn closed_form(
    name: TilingName,
    b: &EdgeSolutionBasis,
    k: &QuasiMomentum,
) -> Result<Complex64> {
    let cal = calibration(name)?;
    let form = dispersion_form(name);
    let kp = QuasiMomentum::new(cal.theta1_sign * k.theta1, k.theta2);
    Ok(k.phase(cal.monomial) * (cal.kappa * form.prefactor.evaluate(b) * form.evaluate(b.sp, &kp)))
}

/// Largest |C - S'| (relative to max(1, |C|)) accepted as an even-potential basis.
pub const EVEN_BASIS_TOL: f64 = 1e-8;

const DET_FLOOR: f64 = 1e-30;

/// |det - closed form| / max(|det|, 1e-30). When the closed form is exactly
/// zero and |det| is at rounding level, both sides vanish and 0 is returned.
pub fn check_equivalence(
    spec: &TilingSpec,
    b: &EdgeSolutionBasis,
    k: &QuasiMomentum,
) -> Result<f64> {
    let cf = closed_form(spec.name, b, k)?;
    if (b.c - b.sp).abs() > EVEN_BASIS_TOL * b.c.abs().max(1.0) {
        return Err(Error::InvalidInput(format!(
            "basis is not even: |C - S'| = {:e}",
            (b.c - b.sp).abs()
        )));
    }
    let sys = assemble(spec, b, k)?;
    let det = determinant(&sys)?;
    if cf == Complex64::new(0.0, 0.0) && det.norm() <= 1e-12 * hadamard_bound(&sys.entries) {
        return Ok(0.0);
    }
    Ok((det - cf).norm() / det.norm().max(DET_FLOOR))
}

#[derive(Serialize)]
pub struct MatrixDump<'a> {
    pub tiling: TilingName,
    pub dim: usize,
    pub basis: &'a EdgeSolutionBasis,
    pub theta: (f64, f64),
    /// Row-major [re, im] pairs.
    pub entries: Vec<Vec<[f64; 2]>>,
    pub rows: &'a [RowTag],
    pub determinant: [f64; 2],
}

pub fn matrix_json(
    sys: &CharacteristicSystem,
    b: &EdgeSolutionBasis,
    k: &QuasiMomentum,
) -> Result<String> {
    let det = determinant(sys)?;
    let entries = (0..sys.dim)
        .map(|i| {
            (0..sys.dim)
                .map(|j| [sys.entries[(i, j)].re, sys.entries[(i, j)].im])
                .collect()
        })
        .collect();
    let dump = MatrixDump {
        tiling: sys.tiling,
        dim: sys.dim,
        basis: b,
        theta: (k.theta1, k.theta2),
        entries,
        rows: &sys.rows,
        determinant: [det.re, det.im],
    };
    Ok(serde_json::to_string_pretty(&dump)?)
}
