//! Combinatorial fundamental domains: edges, vertex attachments, Floquet
//! phases and Kirchhoff signs.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The eleven Archimedean tilings.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TilingName {
    /// triangular (3^6)
    T,
    /// snub trihexagonal (3^4,6)
    #[serde(rename = "STH")]
    Sth,
    /// elongated triangular (3^3,4^2)
    #[serde(rename = "ET")]
    Et,
    /// snub square (3^2,4,3,4)
    #[serde(rename = "SS")]
    Ss,
    /// trihexagonal (3,6,3,6)
    #[serde(rename = "TH")]
    Th,
    /// rhombitrihexagonal (3,4,6,4)
    #[serde(rename = "RTH")]
    Rth,
    /// truncated hexagonal (3,12^2)
    #[serde(rename = "trH")]
    TrH,
    /// square (4^4)
    S,
    /// truncated trihexagonal (4,6,12)
    #[serde(rename = "trTH")]
    TrTh,
    /// truncated square (4,8^2)
    #[serde(rename = "trS")]
    TrS,
    /// hexagonal (6^3)
    H,
}

impl TilingName {
    pub const ALL: [TilingName; 11] = [
        TilingName::T,
        TilingName::S,
        TilingName::H,
        TilingName::Et,
        TilingName::TrS,
        TilingName::Th,
        TilingName::TrH,
        TilingName::Ss,
        TilingName::Rth,
        TilingName::Sth,
        TilingName::TrTh,
    ];

    /// The tilings whose vertex systems are tabulated here.
    pub const ASSEMBLED: [TilingName; 5] = [
        TilingName::TrH,
        TilingName::Ss,
        TilingName::Rth,
        TilingName::Sth,
        TilingName::TrTh,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TilingName::T => "T",
            TilingName::Sth => "STH",
            TilingName::Et => "ET",
            TilingName::Ss => "SS",
            TilingName::Th => "TH",
            TilingName::Rth => "RTH",
            TilingName::TrH => "trH",
            TilingName::S => "S",
            TilingName::TrTh => "trTH",
            TilingName::TrS => "trS",
            TilingName::H => "H",
        }
    }

    pub fn has_attachments(self) -> bool {
        Self::ASSEMBLED.contains(&self)
    }
}

impl fmt::Display for TilingName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TilingName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let name = match s.to_ascii_lowercase().as_str() {
            "t" => TilingName::T,
            "st" | "sth" => TilingName::Sth,
            "et" => TilingName::Et,
            "ss" => TilingName::Ss,
            "th" => TilingName::Th,
            "rth" => TilingName::Rth,
            "trh" => TilingName::TrH,
            "s" => TilingName::S,
            "trth" => TilingName::TrTh,
            "trs" => TilingName::TrS,
            "h" => TilingName::H,
            _ => return Err(Error::UnknownTiling(s.to_string())),
        };
        Ok(name)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeEnd {
    /// x = 0
    Start,
    /// x = a
    End,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Attachment {
    /// 1-based edge id.
    pub edge: usize,
    pub end: EdgeEnd,
    /// Exponents (p1, p2) of the factor exp(i (p1 theta1 + p2 theta2)).
    pub phase: (i32, i32),
    pub kirchhoff_sign: i8,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VertexSpec {
    /// 1-based vertex id.
    pub id: usize,
    pub attachments: Vec<Attachment>,
}

impl VertexSpec {
    pub fn degree(&self) -> usize {
        self.attachments.len()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TilingSpec {
    pub name: TilingName,
    /// Number of edges in the fundamental domain; 0 for tilings without a table.
    pub edge_count: usize,
    pub vertices: Vec<VertexSpec>,
    /// Translation vectors in units of the edge length (for plotting only).
    pub lattice_vectors: [[f64; 2]; 2],
}

impl TilingSpec {
    pub fn matrix_dim(&self) -> usize {
        2 * self.edge_count
    }

    pub fn has_attachments(&self) -> bool {
        !self.vertices.is_empty()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Quasi-momentum (theta1, theta2).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuasiMomentum {
    pub theta1: f64,
    pub theta2: f64,
}

impl QuasiMomentum {
    pub fn new(theta1: f64, theta2: f64) -> Self {
        Self { theta1, theta2 }
    }

    pub fn zero() -> Self {
        Self::new(0.0, 0.0)
    }

    pub fn alpha(&self) -> Complex64 {
        Complex64::cis(self.theta1)
    }

    pub fn beta(&self) -> Complex64 {
        Complex64::cis(self.theta2)
    }

    pub fn alpha_tilde(&self) -> Complex64 {
        Complex64::cis(-self.theta1)
    }

    /// exp(i (p1 theta1 + p2 theta2)).
    pub fn phase(&self, p: (i32, i32)) -> Complex64 {
        if p == (0, 0) {
            return Complex64::new(1.0, 0.0);
        }
        Complex64::cis(p.0 as f64 * self.theta1 + p.1 as f64 * self.theta2)
    }

    pub fn neg(&self) -> Self {
        Self::new(-self.theta1, -self.theta2)
    }
}

macro_rules! att {
    ($e:expr, S) => {
        att!($e, S, (0, 0), 1)
    };
    ($e:expr, E) => {
        att!($e, E, (0, 0), 1)
    };
    ($e:expr, S, $s:expr) => {
        att!($e, S, (0, 0), $s)
    };
    ($e:expr, E, $s:expr) => {
        att!($e, E, (0, 0), $s)
    };
    ($e:expr, S, $p:expr, $s:expr) => {
        Attachment {
            edge: $e,
            end: EdgeEnd::Start,
            phase: $p,
            kirchhoff_sign: $s,
        }
    };
    ($e:expr, E, $p:expr, $s:expr) => {
        Attachment {
            edge: $e,
            end: EdgeEnd::End,
            phase: $p,
            kirchhoff_sign: $s,
        }
    };
}

fn vertices(rows: Vec<Vec<Attachment>>) -> Vec<VertexSpec> {
    rows.into_iter()
        .enumerate()
        .map(|(i, attachments)| VertexSpec {
            id: i + 1,
            attachments,
        })
        .collect()
}

fn hex_lattice(len: f64) -> [[f64; 2]; 2] {
    [[len, 0.0], [0.5 * len, 0.5 * 3f64.sqrt() * len]]
}

/// The hard-coded fundamental domain of `name`.
///
/// Attachment order within a vertex follows the order of the equalities in
/// the vertex conditions; the continuity rows are chained in that order.
pub fn build_tiling(name: TilingName) -> TilingSpec {
    let r3 = 3f64.sqrt();
    let (edge_count, rows, lattice): (usize, Vec<Vec<Attachment>>, [[f64; 2]; 2]) = match name {
        TilingName::TrH => (
            9,
            vec![
                vec![att!(6, S), att!(1, S), att!(5, S)],
                vec![att!(1, E), att!(2, E), att!(7, E)],
                vec![att!(7, S), att!(4, S, (0, 1), 1), att!(6, E, -1)],
                vec![att!(2, S), att!(3, S), att!(8, S)],
                vec![att!(3, E), att!(4, E), att!(9, E)],
                vec![att!(8, E), att!(5, E, (-1, 0), 1), att!(9, S, -1)],
            ],
            hex_lattice(2.0 + r3),
        ),
        TilingName::Ss => (
            10,
            vec![
                vec![
                    att!(1, E),
                    att!(2, E),
                    att!(5, E),
                    att!(6, S, -1),
                    att!(9, S, (1, 0), -1),
                ],
                vec![
                    att!(2, S, -1),
                    att!(3, E),
                    att!(6, E, (0, 1), 1),
                    att!(8, S, (1, 1), -1),
                    att!(10, E, (1, 0), 1),
                ],
                vec![
                    att!(1, S),
                    att!(3, S),
                    att!(4, S),
                    att!(7, S, (0, 1), 1),
                    att!(10, S),
                ],
                vec![
                    att!(4, E),
                    att!(5, S, -1),
                    att!(7, E),
                    att!(8, E),
                    att!(9, E),
                ],
            ],
            {
                let l = (2.0 + r3).sqrt();
                [[l, 0.0], [0.0, l]]
            },
        ),
        TilingName::Rth => (
            12,
            vec![
                vec![
                    att!(2, S, -1),
                    att!(3, E),
                    att!(4, E),
                    att!(7, S, (0, 1), -1),
                ],
                vec![att!(1, E), att!(2, E), att!(12, E), att!(9, E, (0, 1), 1)],
                vec![att!(1, S), att!(3, S), att!(5, S), att!(6, S)],
                vec![att!(6, E), att!(7, E), att!(8, E), att!(11, E)],
                vec![att!(4, S, (1, 0), 1), att!(10, S), att!(11, S), att!(12, S)],
                vec![
                    att!(8, S, -1),
                    att!(9, S, -1),
                    att!(10, E),
                    att!(5, E, (1, 0), 1),
                ],
            ],
            hex_lattice(1.0 + r3),
        ),
        TilingName::Sth => (
            15,
            vec![
                vec![
                    att!(1, E),
                    att!(6, E),
                    att!(15, E),
                    att!(12, E),
                    att!(13, E),
                ],
                vec![
                    att!(6, S),
                    att!(5, S),
                    att!(10, S, (0, 1), 1),
                    att!(14, E, -1),
                    att!(9, E, (0, 1), -1),
                ],
                vec![
                    att!(4, E),
                    att!(5, E),
                    att!(7, E, (-1, 1), 1),
                    att!(15, S, (-1, 1), -1),
                    att!(11, S, (0, 1), -1),
                ],
                vec![
                    att!(3, S),
                    att!(4, S),
                    att!(13, S, (-1, 0), 1),
                    att!(14, S, (-1, 0), 1),
                    att!(8, E, (-1, 1), -1),
                ],
                vec![
                    att!(2, E),
                    att!(3, E),
                    att!(10, E),
                    att!(11, E),
                    att!(12, S, (-1, 0), -1),
                ],
                vec![att!(1, S), att!(2, S), att!(7, S), att!(8, S), att!(9, S)],
            ],
            hex_lattice(7f64.sqrt()),
        ),
        TilingName::TrTh => (
            18,
            vec![
                vec![att!(1, S), att!(2, S), att!(10, S)],
                vec![att!(2, E), att!(3, E), att!(9, E)],
                vec![att!(3, S), att!(4, S), att!(5, S)],
                vec![att!(1, E), att!(4, E), att!(14, E)],
                vec![att!(18, S), att!(13, S), att!(14, S)],
                vec![att!(12, E), att!(13, E), att!(17, E)],
                vec![att!(15, S), att!(12, S), att!(11, S)],
                vec![att!(16, E), att!(11, E), att!(10, E)],
                vec![att!(9, S), att!(17, S, (1, 0), 1), att!(8, S)],
                vec![att!(8, E), att!(7, E), att!(18, E, (1, 0), 1)],
                vec![att!(7, S), att!(16, S, (0, 1), 1), att!(6, S)],
                vec![att!(5, E), att!(6, E), att!(15, E, (0, 1), 1)],
            ],
            hex_lattice(3.0 + r3),
        ),
        TilingName::T => (0, vec![], hex_lattice(1.0)),
        TilingName::S => (0, vec![], [[1.0, 0.0], [0.0, 1.0]]),
        TilingName::H => (0, vec![], hex_lattice(r3)),
        TilingName::Et => (0, vec![], [[1.0, 0.0], [0.5, 1.0 + 0.5 * r3]]),
        TilingName::TrS => (
            0,
            vec![],
            [[1.0 + 2f64.sqrt(), 0.0], [0.0, 1.0 + 2f64.sqrt()]],
        ),
        TilingName::Th => (0, vec![], hex_lattice(2.0)),
    };
    TilingSpec {
        name,
        edge_count,
        vertices: vertices(rows),
        lattice_vectors: lattice,
    }
}

/// Result of [`validate_tiling`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TilingReport {
    pub degree_sum: usize,
    pub expected_degree_sum: usize,
    /// Per edge: phase(Start) - phase(End), the lattice translation from the
    /// edge's Start vertex cell to its End vertex cell.
    pub edge_translations: Vec<(usize, (i32, i32))>,
    pub diagnostics: Vec<String>,
}

impl TilingReport {
    pub fn is_clean(&self) -> bool {
        self.diagnostics.is_empty()
    }
}

pub fn validate_tiling(spec: &TilingSpec) -> TilingReport {
    let n = spec.edge_count;
    let mut diagnostics = Vec::new();
    let mut seen: Vec<[Vec<(i32, i32)>; 2]> = vec![[Vec::new(), Vec::new()]; n + 1];
    let mut degree_sum = 0;
    for v in &spec.vertices {
        degree_sum += v.degree();
        for at in &v.attachments {
            if at.edge == 0 || at.edge > n {
                diagnostics.push(format!(
                    "vertex {} references unknown edge {}",
                    v.id, at.edge
                ));
                continue;
            }
            let slot = match at.end {
                EdgeEnd::Start => 0,
                EdgeEnd::End => 1,
            };
            seen[at.edge][slot].push(at.phase);
            if at.kirchhoff_sign != 1 && at.kirchhoff_sign != -1 {
                diagnostics.push(format!(
                    "vertex {} edge {}: kirchhoff sign must be +1 or -1",
                    v.id, at.edge
                ));
            }
            if ![at.phase.0, at.phase.1]
                .iter()
                .all(|p| (-1..=2).contains(p))
            {
                diagnostics.push(format!(
                    "vertex {} edge {}: phase {:?} outside {{-1,0,1,2}}",
                    v.id, at.edge, at.phase
                ));
            }
        }
        // Outward derivative signs: Start is +, End is -, up to one sign per vertex.
        let orient = |at: &Attachment| match at.end {
            EdgeEnd::Start => at.kirchhoff_sign,
            EdgeEnd::End => -at.kirchhoff_sign,
        };
        if let Some(first) = v.attachments.first() {
            let s = orient(first);
            if v.attachments.iter().any(|at| orient(at) != s) {
                diagnostics.push(format!(
                    "vertex {}: Kirchhoff signs are not a multiple of outward derivatives",
                    v.id
                ));
            }
        }
    }
    let mut edge_translations = Vec::new();
    for (e, ends) in seen.iter().enumerate().skip(1) {
        for (slot, label) in [(0, "Start"), (1, "End")] {
            match ends[slot].len() {
                1 => {}
                0 => diagnostics.push(format!("edge {e} endpoint {label} unattached")),
                k => diagnostics.push(format!("edge {e} endpoint {label} attached {k} times")),
            }
        }
        if let (Some(ps), Some(pe)) = (ends[0].first(), ends[1].first()) {
            edge_translations.push((e, (ps.0 - pe.0, ps.1 - pe.1)));
        }
    }
    if degree_sum != 2 * n {
        diagnostics.push(format!(
            "degree sum {degree_sum} differs from 2I = {}",
            2 * n
        ));
    }
    TilingReport {
        degree_sum,
        expected_degree_sum: 2 * n,
        edge_translations,
        diagnostics,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sizes() {
        let cases = [
            (TilingName::TrH, 9, 6, 3),
            (TilingName::Ss, 10, 4, 5),
            (TilingName::Rth, 12, 6, 4),
            (TilingName::Sth, 15, 6, 5),
            (TilingName::TrTh, 18, 12, 3),
        ];
        for (name, i, nv, deg) in cases {
            let spec = build_tiling(name);
            assert_eq!(spec.edge_count, i);
            assert_eq!(spec.matrix_dim(), 2 * i);
            assert_eq!(spec.vertices.len(), nv);
            assert!(spec.vertices.iter().all(|v| v.degree() == deg), "{name}");
        }
    }

    #[test]
    fn builtin_specs_validate() {
        for name in TilingName::ALL {
            let r = validate_tiling(&build_tiling(name));
            assert!(r.is_clean(), "{name}: {:?}", r.diagnostics);
            assert_eq!(r.degree_sum, r.expected_degree_sum);
        }
        assert_eq!(
            validate_tiling(&build_tiling(TilingName::Rth)).degree_sum,
            24
        );
    }

    #[test]
    fn missing_endpoint_is_reported() {
        let mut spec = build_tiling(TilingName::TrH);
        // drop edge 3's End from v5
        spec.vertices[4].attachments.retain(|a| a.edge != 3);
        let r = validate_tiling(&spec);
        assert!(
            r.diagnostics
                .iter()
                .any(|d| d == "edge 3 endpoint End unattached"),
            "{:?}",
            r.diagnostics
        );
    }

    #[test]
    fn trh_vertex_three_carries_beta_on_edge_four() {
        let spec = build_tiling(TilingName::TrH);
        let a = spec.vertices[2].attachments[1];
        assert_eq!((a.edge, a.end, a.phase), (4, EdgeEnd::Start, (0, 1)));
    }

    #[test]
    fn names_round_trip() {
        for name in TilingName::ALL {
            assert_eq!(name.as_str().parse::<TilingName>().unwrap(), name);
        }
        assert_eq!("st".parse::<TilingName>().unwrap(), TilingName::Sth);
        assert!("penrose".parse::<TilingName>().is_err());
    }

    #[test]
    fn json_export_has_attachments() {
        let js = build_tiling(TilingName::TrH).to_json().unwrap();
        let v: serde_json::Value = serde_json::from_str(&js).unwrap();
        assert_eq!(v["name"], "trH");
        assert_eq!(
            v["vertices"][2]["attachments"][1]["phase"],
            serde_json::json!([0, 1])
        );
    }
}
