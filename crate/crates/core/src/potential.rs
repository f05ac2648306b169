//! Edge potentials q on [0, a].

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};

/// Shape of the potential.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum PotentialKind {
    Zero,
    /// `depth + (scale / 1.34) * sin^2(pi x / scale)`, the graphene-type profile.
    GrapheneSine {
        depth: f64,
        scale: f64,
    },
    /// Piecewise-linear interpolant through `(abscissae[i], values[i])`.
    SampledTable {
        abscissae: Vec<f64>,
        values: Vec<f64>,
    },
}

/// A potential together with the edge length it lives on.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Potential {
    pub kind: PotentialKind,
    pub a: f64,
}

/// Number of sample intervals used by [`Potential::evenness_residual`] and
/// [`Potential::min_value`].
const CHECK_SAMPLES: usize = 2048;

impl Potential {
    pub fn zero(a: f64) -> Result<Self> {
        Self::new(PotentialKind::Zero, a)
    }

    /// The graphene-type potential with depth -0.85 and period equal to the edge length.
    pub fn graphene(a: f64) -> Result<Self> {
        Self::new(
            PotentialKind::GrapheneSine {
                depth: -0.85,
                scale: a,
            },
            a,
        )
    }

    pub fn new(kind: PotentialKind, a: f64) -> Result<Self> {
        ensure_finite("edge length", a)?;
        if a <= 0.0 {
            return Err(Error::InvalidInput(format!(
                "edge length must be positive, got {a}"
            )));
        }
        match &kind {
            PotentialKind::Zero => {}
            PotentialKind::GrapheneSine { depth, scale } => {
                ensure_finite("depth", *depth)?;
                ensure_finite("scale", *scale)?;
                if *scale <= 0.0 {
                    return Err(Error::InvalidInput(
                        "graphene scale must be positive".into(),
                    ));
                }
            }
            PotentialKind::SampledTable { abscissae, values } => {
                validate_table(abscissae, values, a)?
            }
        }
        Ok(Self { kind, a })
    }

    /// Read a two-column `x,q` CSV. A non-numeric first row is treated as a header.
    /// When `a` is `None` the edge length is taken from the last abscissa.
    pub fn from_csv_path(path: impl AsRef<Path>, a: Option<f64>) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        Self::from_csv_reader(file, a)
    }

    pub fn from_csv_reader(reader: impl std::io::Read, a: Option<f64>) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .from_reader(reader);
        let mut xs = Vec::new();
        let mut qs = Vec::new();
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec?;
            if rec.len() < 2 {
                return Err(Error::InvalidInput(format!(
                    "row {} has {} columns, need 2",
                    i + 1,
                    rec.len()
                )));
            }
            match (rec[0].parse::<f64>(), rec[1].parse::<f64>()) {
                (Ok(x), Ok(q)) => {
                    xs.push(x);
                    qs.push(q);
                }
                _ if i == 0 => continue,
                _ => return Err(Error::InvalidInput(format!("row {} is not numeric", i + 1))),
            }
        }
        let a = match a {
            Some(a) => a,
            None => *xs
                .last()
                .ok_or_else(|| Error::InvalidInput("empty potential table".into()))?,
        };
        Self::new(
            PotentialKind::SampledTable {
                abscissae: xs,
                values: qs,
            },
            a,
        )
    }

    #[inline]
    pub fn value(&self, x: f64) -> f64 {
        match &self.kind {
            PotentialKind::Zero => 0.0,
            PotentialKind::GrapheneSine { depth, scale } => {
                let s = (std::f64::consts::PI * x / scale).sin();
                depth + scale / 1.34 * s * s
            }
            PotentialKind::SampledTable { abscissae, values } => interpolate(abscissae, values, x),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.kind, PotentialKind::Zero)
    }

    /// max |q(x) - q(a-x)| over a uniform grid.
    pub fn evenness_residual(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        (0..=CHECK_SAMPLES)
            .map(|i| {
                let x = self.a * i as f64 / CHECK_SAMPLES as f64;
                (self.value(x) - self.value(self.a - x)).abs()
            })
            .fold(0.0, f64::max)
    }

    /// max |q| over the check grid, at least 1. Used to scale tolerances.
    pub fn scale(&self) -> f64 {
        self.samples().map(f64::abs).fold(1.0, f64::max)
    }

    pub fn min_value(&self) -> f64 {
        self.samples().fold(f64::INFINITY, f64::min)
    }

    /// Fails with [`Error::NotEven`] unless the evenness residual is below `rel_tol * scale`.
    pub fn require_even(&self, rel_tol: f64) -> Result<()> {
        let residual = self.evenness_residual();
        let tolerance = rel_tol * self.scale();
        if residual > tolerance {
            Err(Error::NotEven {
                residual,
                tolerance,
            })
        } else {
            Ok(())
        }
    }

    fn samples(&self) -> impl Iterator<Item = f64> + '_ {
        let table_nodes = match &self.kind {
            PotentialKind::SampledTable { values, .. } => values.as_slice(),
            _ => &[],
        };
        (0..=CHECK_SAMPLES)
            .map(move |i| self.value(self.a * i as f64 / CHECK_SAMPLES as f64))
            .chain(table_nodes.iter().copied())
    }
}

fn validate_table(xs: &[f64], qs: &[f64], a: f64) -> Result<()> {
    if xs.len() != qs.len() {
        return Err(Error::InvalidInput(
            "abscissae and values differ in length".into(),
        ));
    }
    if xs.len() < 2 {
        return Err(Error::InvalidInput(
            "potential table needs at least two rows".into(),
        ));
    }
    if xs.iter().chain(qs).any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput(
            "potential table contains non-finite entries".into(),
        ));
    }
    if xs.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidInput(
            "potential table abscissae must be strictly increasing".into(),
        ));
    }
    let tol = 1e-12 * a.max(1.0);
    if xs[0].abs() > tol || (xs[xs.len() - 1] - a).abs() > tol {
        return Err(Error::InvalidInput(format!(
            "potential table must span [0, {a}], got [{}, {}]",
            xs[0],
            xs[xs.len() - 1]
        )));
    }
    Ok(())
}

fn interpolate(xs: &[f64], qs: &[f64], x: f64) -> f64 {
    let n = xs.len();
    if x <= xs[0] {
        return qs[0];
    }
    if x >= xs[n - 1] {
        return qs[n - 1];
    }
    let hi = xs.partition_point(|&v| v <= x).min(n - 1);
    let lo = hi - 1;
    let t = (x - xs[lo]) / (xs[hi] - xs[lo]);
    qs[lo] + t * (qs[hi] - qs[lo])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graphene_is_even_and_bounded() {
        let q = Potential::graphene(1.0).unwrap();
        assert!(q.evenness_residual() < 1e-14);
        assert!((q.value(0.0) + 0.85).abs() < 1e-15);
        assert!((q.value(0.5) - (-0.85 + 1.0 / 1.34)).abs() < 1e-15);
        assert!((q.min_value() + 0.85).abs() < 1e-15);
    }

    #[test]
    fn table_interpolates_linearly() {
        let q = Potential::new(
            PotentialKind::SampledTable {
                abscissae: vec![0.0, 0.5, 1.0],
                values: vec![1.0, 3.0, 1.0],
            },
            1.0,
        )
        .unwrap();
        assert_eq!(q.value(0.25), 2.0);
        assert_eq!(q.value(0.75), 2.0);
        assert_eq!(q.value(1.0), 1.0);
        assert_eq!(q.evenness_residual(), 0.0);
    }

    #[test]
    fn table_rejects_bad_abscissae() {
        let bad = |xs: Vec<f64>| {
            let qs = vec![0.0; xs.len()];
            Potential::new(
                PotentialKind::SampledTable {
                    abscissae: xs,
                    values: qs,
                },
                1.0,
            )
            .is_err()
        };
        assert!(bad(vec![0.0, 0.6, 0.5, 1.0]));
        assert!(bad(vec![0.0, 0.5, 0.5, 1.0]));
        assert!(bad(vec![0.1, 0.5, 1.0]));
        assert!(bad(vec![0.0, 0.5, 0.9]));
    }

    #[test]
    fn csv_header_is_optional() {
        let with = "x,q\n0,1\n0.5,2\n1,1\n";
        let without = "0,1\n0.5,2\n1,1\n";
        let a = Potential::from_csv_reader(with.as_bytes(), None).unwrap();
        let b = Potential::from_csv_reader(without.as_bytes(), None).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.a, 1.0);
        assert!(Potential::from_csv_reader("0,1\nfoo,2\n".as_bytes(), None).is_err());
    }

    #[test]
    fn odd_table_is_reported() {
        let q = Potential::new(
            PotentialKind::SampledTable {
                abscissae: vec![0.0, 1.0],
                values: vec![0.0, 1.0],
            },
            1.0,
        )
        .unwrap();
        assert!(matches!(q.require_even(1e-6), Err(Error::NotEven { .. })));
    }
}
