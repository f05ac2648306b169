//! The infinite periodic graph obtained by unfolding a fundamental domain.
//!
//! An attachment of edge j with phase p at vertex v means that vertex v of
//! cell 0 meets the copy of edge j living in cell p. Equivalently the copy of
//! edge j in cell c has its endpoint at vertex v of cell c - p.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::tiling::{EdgeEnd, TilingSpec};

pub type Cell = (i32, i32);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct VertexId {
    pub vertex: usize,
    pub cell: Cell,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct EdgeId {
    pub edge: usize,
    pub cell: Cell,
}

/// A step along an edge copy, from `from` to `to`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Step {
    pub edge: EdgeId,
    pub from: VertexId,
    pub to: VertexId,
    /// True when walking from the edge's Start to its End.
    pub forward: bool,
}

#[derive(Clone, Debug)]
pub struct PeriodicGraph {
    spec: TilingSpec,
    /// For each edge (1-based): (vertex, phase) of its Start and End attachments.
    ends: Vec<[(usize, (i32, i32)); 2]>,
}

fn shift(c: Cell, p: (i32, i32), sign: i32) -> Cell {
    (c.0 + sign * p.0, c.1 + sign * p.1)
}

impl PeriodicGraph {
    pub fn new(spec: &TilingSpec) -> Result<Self> {
        if !spec.has_attachments() {
            return Err(Error::UnsupportedTiling(spec.name.to_string()));
        }
        let mut ends = vec![[(0, (0, 0)); 2]; spec.edge_count + 1];
        for v in &spec.vertices {
            for at in &v.attachments {
                let slot = if at.end == EdgeEnd::Start { 0 } else { 1 };
                ends[at.edge][slot] = (v.id, at.phase);
            }
        }
        Ok(Self {
            spec: spec.clone(),
            ends,
        })
    }

    pub fn spec(&self) -> &TilingSpec {
        &self.spec
    }

    pub fn endpoint(&self, e: EdgeId, end: EdgeEnd) -> VertexId {
        let (v, p) = self.ends[e.edge][if end == EdgeEnd::Start { 0 } else { 1 }];
        VertexId {
            vertex: v,
            cell: shift(e.cell, p, -1),
        }
    }

    /// Edge copies meeting `v`, with the end that touches it.
    pub fn incident(&self, v: VertexId) -> Vec<(EdgeId, EdgeEnd)> {
        self.spec.vertices[v.vertex - 1]
            .attachments
            .iter()
            .map(|at| {
                (
                    EdgeId {
                        edge: at.edge,
                        cell: shift(v.cell, at.phase, 1),
                    },
                    at.end,
                )
            })
            .collect()
    }

    /// Steps leaving `v`.
    pub fn steps_from(&self, v: VertexId) -> Vec<Step> {
        self.incident(v)
            .into_iter()
            .map(|(e, end)| {
                let forward = end == EdgeEnd::Start;
                let other = if forward {
                    EdgeEnd::End
                } else {
                    EdgeEnd::Start
                };
                Step {
                    edge: e,
                    from: v,
                    to: self.endpoint(e, other),
                    forward,
                }
            })
            .collect()
    }

    /// Simple cycles of length `len` through `start`, in a deterministic order,
    /// passed to `visit` until it returns true. Returns the accepted cycle.
    pub fn find_cycle(
        &self,
        start: VertexId,
        len: usize,
        mut accept: impl FnMut(&[Step]) -> bool,
    ) -> Option<Vec<Step>> {
        let mut path: Vec<Step> = Vec::with_capacity(len);
        self.dfs(start, len, &mut path, &mut accept).then_some(path)
    }

    fn dfs(
        &self,
        start: VertexId,
        len: usize,
        path: &mut Vec<Step>,
        accept: &mut impl FnMut(&[Step]) -> bool,
    ) -> bool {
        let here = path.last().map_or(start, |s| s.to);
        for step in self.steps_from(here) {
            if path.iter().any(|s| s.edge == step.edge) {
                continue;
            }
            let closing = step.to == start;
            if path.len() + 1 == len {
                if closing {
                    path.push(step);
                    if accept(path) {
                        return true;
                    }
                    path.pop();
                }
                continue;
            }
            if closing || path.iter().any(|s| s.from == step.to) {
                continue;
            }
            path.push(step);
            if self.dfs(start, len, path, accept) {
                return true;
            }
            path.pop();
        }
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tiling::{build_tiling, TilingName};

    fn girth_and_face(name: TilingName) -> usize {
        let g = PeriodicGraph::new(&build_tiling(name)).unwrap();
        let v0 = VertexId {
            vertex: 1,
            cell: (0, 0),
        };
        (3..=12)
            .find(|&l| g.find_cycle(v0, l, |_| true).is_some())
            .unwrap()
    }

    #[test]
    fn shortest_cycles() {
        assert_eq!(girth_and_face(TilingName::TrH), 3);
        assert_eq!(girth_and_face(TilingName::Ss), 3);
        assert_eq!(girth_and_face(TilingName::Sth), 3);
        assert_eq!(girth_and_face(TilingName::TrTh), 4);
    }

    #[test]
    fn incidence_round_trips() {
        for name in TilingName::ASSEMBLED {
            let g = PeriodicGraph::new(&build_tiling(name)).unwrap();
            for v in 1..=g.spec().vertices.len() {
                let vid = VertexId {
                    vertex: v,
                    cell: (2, -1),
                };
                for (e, end) in g.incident(vid) {
                    assert_eq!(g.endpoint(e, end), vid);
                }
            }
        }
    }

    #[test]
    fn trh_has_no_four_to_eleven_cycles() {
        let g = PeriodicGraph::new(&build_tiling(TilingName::TrH)).unwrap();
        let v0 = VertexId {
            vertex: 1,
            cell: (0, 0),
        };
        for l in 4..12 {
            assert!(g.find_cycle(v0, l, |_| true).is_none(), "{l}");
        }
        assert!(g.find_cycle(v0, 12, |_| true).is_some());
    }
}
