//! Manipulation graphs and agent best responses.
//!
//! An agent at vertex `x` facing classifier `h` stays put when `h(x) = +1` or
//! when nothing in its closed neighborhood is labeled positive. Otherwise it
//! moves to the smallest-id positive neighbor. That single tie-breaking rule
//! is used everywhere, including the lower-bound construction, whose layout
//! assigns ascending ids to the `p` layer so the rule coincides with
//! "smallest `p` index".

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypothesis::{Hypothesis, Label};

pub type VertexId = usize;

/// Undirected manipulation graph. Immutable once built.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManipulationGraph {
    adjacency: Vec<Vec<VertexId>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BestResponseOutcome {
    pub landed: VertexId,
    pub moved: bool,
}

impl ManipulationGraph {
    pub fn edgeless(vertex_count: usize) -> Result<Self> {
        Self::from_edges(vertex_count, &[])
    }

    /// Builds a graph from unordered pairs. Duplicate pairs collapse;
    /// self-loops and out-of-range endpoints are rejected.
    pub fn from_edges(vertex_count: usize, edges: &[(VertexId, VertexId)]) -> Result<Self> {
        if vertex_count == 0 {
            return Err(Error::InvalidGraph("vertex_count must be positive".into()));
        }
        let mut adjacency = vec![Vec::new(); vertex_count];
        for &(a, b) in edges {
            for v in [a, b] {
                if v >= vertex_count {
                    return Err(Error::InvalidVertex {
                        vertex: v,
                        vertex_count,
                    });
                }
            }
            if a == b {
                return Err(Error::InvalidGraph(format!("self-loop at vertex {a}")));
            }
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
        for list in &mut adjacency {
            list.sort_unstable();
            list.dedup();
        }
        Ok(Self { adjacency })
    }

    /// Validates a raw adjacency structure: symmetric, strictly ascending, loop-free.
    pub fn from_adjacency(adjacency: Vec<Vec<VertexId>>) -> Result<Self> {
        let n = adjacency.len();
        if n == 0 {
            return Err(Error::InvalidGraph("vertex_count must be positive".into()));
        }
        for (v, list) in adjacency.iter().enumerate() {
            if list.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::InvalidGraph(format!(
                    "adjacency of {v} is not strictly ascending"
                )));
            }
            for &u in list {
                if u >= n {
                    return Err(Error::InvalidVertex {
                        vertex: u,
                        vertex_count: n,
                    });
                }
                if u == v {
                    return Err(Error::InvalidGraph(format!("self-loop at vertex {v}")));
                }
                if adjacency[u].binary_search(&v).is_err() {
                    return Err(Error::InvalidGraph(format!(
                        "edge {v}-{u} is not symmetric"
                    )));
                }
            }
        }
        Ok(Self { adjacency })
    }

    pub fn vertex_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn neighbors(&self, x: VertexId) -> Result<&[VertexId]> {
        self.check(x)?;
        Ok(&self.adjacency[x])
    }

    pub fn edges(&self) -> Vec<(VertexId, VertexId)> {
        let mut out = Vec::new();
        for (a, list) in self.adjacency.iter().enumerate() {
            out.extend(list.iter().filter(|&&b| b > a).map(|&b| (a, b)));
        }
        out
    }

    fn check(&self, x: VertexId) -> Result<()> {
        if x < self.vertex_count() {
            Ok(())
        } else {
            Err(Error::InvalidVertex {
                vertex: x,
                vertex_count: self.vertex_count(),
            })
        }
    }

    fn check_hypothesis(&self, h: &Hypothesis) -> Result<()> {
        if h.len() == self.vertex_count() {
            Ok(())
        } else {
            Err(Error::LengthMismatch {
                expected: self.vertex_count(),
                got: h.len(),
            })
        }
    }

    /// `N[x]`, ascending.
    pub fn closed_neighborhood(&self, x: VertexId) -> Result<Vec<VertexId>> {
        self.check(x)?;
        let open = &self.adjacency[x];
        let mut out = Vec::with_capacity(open.len() + 1);
        let split = open.partition_point(|&v| v < x);
        out.extend_from_slice(&open[..split]);
        out.push(x);
        out.extend_from_slice(&open[split..]);
        Ok(out)
    }

    pub fn closed_neighborhood_size(&self, x: VertexId) -> Result<usize> {
        self.check(x)?;
        Ok(self.adjacency[x].len() + 1)
    }

    pub fn max_degree(&self) -> usize {
        self.adjacency.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn best_response(&self, h: &Hypothesis, x: VertexId) -> Result<BestResponseOutcome> {
        self.check(x)?;
        self.check_hypothesis(h)?;
        Ok(self.best_response_unchecked(h, x))
    }

    /// Hot-path variant for callers that already validated `x` and `h`.
    #[inline]
    pub(crate) fn best_response_unchecked(
        &self,
        h: &Hypothesis,
        x: VertexId,
    ) -> BestResponseOutcome {
        if h.label(x).is_positive() {
            return BestResponseOutcome {
                landed: x,
                moved: false,
            };
        }
        match self.adjacency[x]
            .iter()
            .find(|&&v| h.label(v).is_positive())
        {
            Some(&v) => BestResponseOutcome {
                landed: v,
                moved: true,
            },
            None => BestResponseOutcome {
                landed: x,
                moved: false,
            },
        }
    }

    pub fn strategic_loss(&self, h: &Hypothesis, x: VertexId, y: Label) -> Result<u8> {
        self.check(x)?;
        self.check_hypothesis(h)?;
        Ok(self.strategic_loss_unchecked(h, x, y))
    }

    #[inline]
    pub(crate) fn strategic_loss_unchecked(&self, h: &Hypothesis, x: VertexId, y: Label) -> u8 {
        let z = self.best_response_unchecked(h, x).landed;
        u8::from(h.label(z) != y)
    }

    /// True iff `h` labels all of `N[x]` negative, i.e. `h ∈ R_t` when `x = x_t`.
    pub fn labels_all_negative(&self, h: &Hypothesis, x: VertexId) -> Result<bool> {
        self.check(x)?;
        self.check_hypothesis(h)?;
        Ok(self.labels_all_negative_unchecked(h, x))
    }

    #[inline]
    pub(crate) fn labels_all_negative_unchecked(&self, h: &Hypothesis, x: VertexId) -> bool {
        !h.label(x).is_positive() && self.adjacency[x].iter().all(|&v| !h.label(v).is_positive())
    }

    /// Vertices of `other` are shifted by `self.vertex_count()`; no cross edges.
    pub fn disjoint_union(&self, other: &ManipulationGraph) -> ManipulationGraph {
        let offset = self.vertex_count();
        let mut adjacency = self.adjacency.clone();
        adjacency.extend(
            other
                .adjacency
                .iter()
                .map(|list| list.iter().map(|&v| v + offset).collect::<Vec<_>>()),
        );
        ManipulationGraph { adjacency }
    }
}

/// On-disk form: vertex count plus unordered edge list.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphFile {
    pub vertex_count: usize,
    pub edges: Vec<[VertexId; 2]>,
}

impl From<&ManipulationGraph> for GraphFile {
    fn from(g: &ManipulationGraph) -> Self {
        GraphFile {
            vertex_count: g.vertex_count(),
            edges: g.edges().into_iter().map(|(a, b)| [a, b]).collect(),
        }
    }
}

impl TryFrom<GraphFile> for ManipulationGraph {
    type Error = Error;

    fn try_from(file: GraphFile) -> Result<Self> {
        let edges: Vec<_> = file.edges.iter().map(|e| (e[0], e[1])).collect();
        ManipulationGraph::from_edges(file.vertex_count, &edges)
    }
}

impl Serialize for ManipulationGraph {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        GraphFile::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for ManipulationGraph {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let file = GraphFile::deserialize(d)?;
        ManipulationGraph::try_from(file).map_err(serde::de::Error::custom)
    }
}
