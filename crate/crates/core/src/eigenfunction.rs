//! Compactly supported eigenfunctions for the flat bands.
//!
//! On every supported edge the function is alpha f(t) + beta f(a - t) with
//! f = S(., rho) and t measured from the edge's Start. An even potential makes
//! f(a - t) a solution as well, so only the vertex conditions need checking.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{ensure_finite, Error, Result};
use crate::interval::{EdgeSolutionBasis, IntervalSolver, DEFAULT_STEPS};
use crate::periodic::{EdgeId, PeriodicGraph, Step, VertexId};
use crate::potential::Potential;
use crate::roots::bisect;
use crate::spectrum::Generator;
use crate::tiling::{build_tiling, EdgeEnd, TilingName};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EigenKind {
    /// c_e S(t) around a cycle, at S(a) = 0. Any tiling.
    PolygonDirichlet,
    /// Ring of six triangles around a dodecagon at S' = 0 (trH).
    DodecagonSprimeZero,
    /// The same ring at S' = -2/3 (trH).
    TriangleRingSprimeMinus23,
}

impl EigenKind {
    pub fn generator(self) -> Generator {
        match self {
            EigenKind::PolygonDirichlet => Generator::SZero,
            EigenKind::DodecagonSprimeZero => Generator::SprimeZero,
            EigenKind::TriangleRingSprimeMinus23 => Generator::SprimeMinusTwoThirds,
        }
    }
}

impl fmt::Display for EigenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EigenKind::PolygonDirichlet => "polygon_dirichlet",
            EigenKind::DodecagonSprimeZero => "dodecagon_sprime_zero",
            EigenKind::TriangleRingSprimeMinus23 => "triangle_ring_sprime_minus23",
        })
    }
}

impl FromStr for EigenKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "polygon_dirichlet" => Ok(EigenKind::PolygonDirichlet),
            "dodecagon_sprime_zero" => Ok(EigenKind::DodecagonSprimeZero),
            "triangle_ring_sprime_minus23" => Ok(EigenKind::TriangleRingSprimeMinus23),
            _ => Err(Error::InvalidInput(format!(
                "unknown eigenfunction kind `{s}`"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct EigenOptions {
    /// Samples per edge, endpoints included. 257 keeps the sample nodes on the
    /// default integrator grid.
    pub points: usize,
    pub steps: usize,
    /// Accepted |generator(lambda)| on input.
    pub generator_tol: f64,
    /// For polygon_dirichlet: force a cycle length instead of searching 3..=14.
    pub cycle_len: Option<usize>,
}

impl Default for EigenOptions {
    fn default() -> Self {
        Self {
            points: 257,
            steps: DEFAULT_STEPS,
            generator_tol: 1e-10,
            cycle_len: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EdgeSamples {
    pub edge: EdgeId,
    pub alpha: f64,
    pub beta: f64,
    pub recipe: String,
    pub values: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct VertexResiduals {
    pub vertices: usize,
    pub continuity: f64,
    pub kirchhoff: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct EdgewiseFunction {
    pub tiling: TilingName,
    pub kind: EigenKind,
    pub lambda: f64,
    pub basis: EdgeSolutionBasis,
    pub x: Vec<f64>,
    pub edges: Vec<EdgeSamples>,
}

fn recipe_tag(alpha: f64, beta: f64) -> String {
    let term = |c: f64, f: &str| -> Option<String> {
        if c == 0.0 {
            None
        } else if c == 1.0 {
            Some(f.to_string())
        } else if c == -1.0 {
            Some(format!("-{f}"))
        } else {
            Some(format!("{c}*{f}"))
        }
    };
    match (term(alpha, "f(x)"), term(beta, "f(a-x)")) {
        (Some(a), Some(b)) if b.starts_with('-') => format!("{a}{b}"),
        (Some(a), Some(b)) => format!("{a}+{b}"),
        (Some(a), None) => a,
        (None, Some(b)) => b,
        (None, None) => "0".into(),
    }
}

impl EdgewiseFunction {
    /// Continuity spread and Kirchhoff sum, maximised over every vertex touched
    /// by the support. Edges outside the support count as identically zero.
    pub fn residuals(&self) -> Result<VertexResiduals> {
        let graph = PeriodicGraph::new(&build_tiling(self.tiling))?;
        let support: BTreeMap<EdgeId, &EdgeSamples> =
            self.edges.iter().map(|e| (e.edge, e)).collect();
        let mut verts = BTreeSet::new();
        for e in support.keys() {
            verts.insert(graph.endpoint(*e, EdgeEnd::Start));
            verts.insert(graph.endpoint(*e, EdgeEnd::End));
        }
        let s = self.basis.sp;
        let (mut cont, mut kirch) = (0.0f64, 0.0f64);
        for v in &verts {
            let (mut lo, mut hi, mut sum) = (f64::INFINITY, f64::NEG_INFINITY, 0.0);
            for (e, end) in graph.incident(*v) {
                let (val, out) = match support.get(&e) {
                    None => (0.0, 0.0),
                    Some(es) => match end {
                        EdgeEnd::Start => (es.values[0], es.alpha - es.beta * s),
                        EdgeEnd::End => (*es.values.last().unwrap(), -(es.alpha * s - es.beta)),
                    },
                };
                lo = lo.min(val);
                hi = hi.max(val);
                sum += out;
            }
            cont = cont.max(hi - lo);
            kirch = kirch.max(sum.abs());
        }
        Ok(VertexResiduals {
            vertices: verts.len(),
            continuity: cont,
            kirchhoff: kirch,
        })
    }
}

/// Support recipes keyed by edge copy: (alpha, beta) in the edge's own orientation.
type Recipes = BTreeMap<EdgeId, (f64, f64)>;

/// Record alpha f(t) + beta f(a-t) with t measured from `step.from`.
fn place(r: &mut Recipes, step: &Step, alpha: f64, beta: f64) {
    let v = if step.forward {
        (alpha, beta)
    } else {
        (beta, alpha)
    };
    r.insert(step.edge, v);
}

fn step_between(g: &PeriodicGraph, from: VertexId, to: VertexId) -> Option<Step> {
    g.steps_from(from).into_iter().find(|s| s.to == to)
}

fn common_neighbour(g: &PeriodicGraph, u: VertexId, w: VertexId) -> Option<VertexId> {
    let nu: BTreeSet<VertexId> = g.steps_from(u).iter().map(|s| s.to).collect();
    g.steps_from(w)
        .iter()
        .map(|s| s.to)
        .find(|p| *p != u && nu.contains(p))
}

/// Coefficients c_i of c_i S(t) on each step of a cycle, if the Kirchhoff
/// conditions close around it. `s` is S'(a) (= +-1 at Dirichlet energies).
fn dirichlet_coefficients(cycle: &[Step], s: f64) -> Option<Vec<f64>> {
    // outward derivative of S(t) per unit coefficient at the arriving / leaving end
    let arriving = |st: &Step| if st.forward { -s } else { 1.0 };
    let leaving = |st: &Step| if st.forward { 1.0 } else { -s };
    let mut c = vec![1.0];
    for i in 0..cycle.len() - 1 {
        c.push(-c[i] * arriving(&cycle[i]) / leaving(&cycle[i + 1]));
    }
    let closure =
        c[cycle.len() - 1] * arriving(&cycle[cycle.len() - 1]) + c[0] * leaving(&cycle[0]);
    (closure.abs() <= 1e-6).then_some(c)
}

fn polygon_recipes(g: &PeriodicGraph, s: f64, cycle_len: Option<usize>) -> Result<Recipes> {
    let v0 = VertexId {
        vertex: 1,
        cell: (0, 0),
    };
    let lens: Vec<usize> = match cycle_len {
        Some(l) => vec![l],
        None => (3..=14).collect(),
    };
    for l in lens {
        let mut coeffs = None;
        if let Some(cycle) = g.find_cycle(v0, l, |c| {
            coeffs = dirichlet_coefficients(c, s);
            coeffs.is_some()
        }) {
            let mut r = Recipes::new();
            // c_i multiplies S(t) in the edge's own orientation
            for (st, c) in cycle.iter().zip(coeffs.unwrap()) {
                r.insert(st.edge, (c, 0.0));
            }
            return Ok(r);
        }
    }
    Err(Error::NoSupport(format!(
        "no cycle closes the Dirichlet recipe with S'(a) = {s:.6}{}",
        cycle_len
            .map(|l| format!(" at length {l}"))
            .unwrap_or_default()
    )))
}

/// The dodecagon with a triangle on every other side. `alternate` flips the
/// sign of consecutive triangles (the S' = 0 pattern).
fn ring_recipes(g: &PeriodicGraph, alternate: bool) -> Result<Recipes> {
    let on_triangle = |st: &Step| common_neighbour(g, st.from, st.to).is_some();
    let v0 = VertexId {
        vertex: 1,
        cell: (0, 0),
    };
    let ring = g
        .find_cycle(v0, 12, |c| {
            c.iter()
                .enumerate()
                .all(|(i, st)| on_triangle(st) == on_triangle(&c[0]) ^ (i % 2 == 1))
        })
        .ok_or_else(|| Error::NoSupport("no dodecagon with alternating triangle sides".into()))?;
    let first = if on_triangle(&ring[0]) { 0 } else { 1 };
    let ring: Vec<Step> = ring[first..]
        .iter()
        .chain(&ring[..first])
        .copied()
        .collect();
    let mut r = Recipes::new();
    for k in 0..6 {
        let sigma = if alternate && k % 2 == 1 { -1.0 } else { 1.0 };
        let sigma_next = if alternate && (k + 1) % 2 == 1 {
            -1.0
        } else {
            1.0
        };
        let base = ring[2 * k];
        let (u, w) = (base.from, base.to);
        let p = common_neighbour(g, u, w).expect("base lies on a triangle");
        place(&mut r, &base, sigma, -sigma);
        place(&mut r, &step_between(g, p, w).unwrap(), sigma, 0.0);
        place(&mut r, &step_between(g, u, p).unwrap(), 0.0, -sigma);
        // connector from w_k to u_{k+1}, written from u_{k+1}
        let conn = ring[2 * k + 1];
        let back = step_between(g, conn.to, conn.from).unwrap();
        if alternate {
            place(&mut r, &back, -sigma_next, -sigma_next);
        } else {
            place(&mut r, &back, sigma_next, -sigma_next);
        }
    }
    Ok(r)
}

/// Re-solve generator(lambda) = 0 on `solver` near `lambda0`.
fn polish_lambda(solver: &IntervalSolver, g: Generator, lambda0: f64) -> Result<f64> {
    let f = |l: f64| solver.basis(l).map(|b| g.residual(&b)).unwrap_or(f64::NAN);
    let f0 = f(lambda0);
    if f0 == 0.0 {
        return Ok(lambda0);
    }
    let mut d = 1e-12 * lambda0.abs().max(1.0);
    for _ in 0..40 {
        for other in [lambda0 - d, lambda0 + d] {
            let fo = f(other);
            if (fo < 0.0) != (f0 < 0.0) {
                let tol = 1e-15 * lambda0.abs().max(1.0);
                return Ok(bisect(f, lambda0, other, f0, tol));
            }
        }
        d *= 2.0;
    }
    Ok(lambda0)
}

pub fn build_eigenfunction(
    tiling: TilingName,
    kind: EigenKind,
    q: &Potential,
    lambda: f64,
    opts: &EigenOptions,
) -> Result<EdgewiseFunction> {
    ensure_finite("lambda", lambda)?;
    q.require_even(1e-6)?;
    if kind != EigenKind::PolygonDirichlet && tiling != TilingName::TrH {
        return Err(Error::InvalidInput(format!(
            "{kind} is only defined for trH"
        )));
    }
    let graph = PeriodicGraph::new(&build_tiling(tiling))?;
    let n = opts.points.max(2) - 1;
    let steps = opts.steps.div_ceil(n) * n;
    let solver = IntervalSolver::with_steps(q, steps)?;
    let gen = kind.generator();
    let residual = gen.residual(&solver.basis(lambda)?);
    if residual.abs() > opts.generator_tol {
        return Err(Error::GeneratorMismatch { lambda, residual });
    }
    let lambda = polish_lambda(&solver, gen, lambda)?;
    let basis = solver.basis(lambda)?;
    let recipes = match kind {
        EigenKind::PolygonDirichlet => polygon_recipes(&graph, basis.sp, opts.cycle_len)?,
        EigenKind::DodecagonSprimeZero => ring_recipes(&graph, true)?,
        EigenKind::TriangleRingSprimeMinus23 => ring_recipes(&graph, false)?,
    };
    let f = solver.sample_s(lambda, n + 1)?;
    let x: Vec<f64> = (0..=n).map(|i| q.a * i as f64 / n as f64).collect();
    let edges = recipes
        .into_iter()
        .map(|(edge, (alpha, beta))| EdgeSamples {
            edge,
            alpha,
            beta,
            recipe: recipe_tag(alpha, beta),
            values: (0..=n).map(|i| alpha * f[i] + beta * f[n - i]).collect(),
        })
        .collect();
    Ok(EdgewiseFunction {
        tiling,
        kind,
        lambda,
        basis,
        x,
        edges,
    })
}
