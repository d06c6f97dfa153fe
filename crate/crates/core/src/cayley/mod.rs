//! Underlying undirected graphs of Cayley digraphs `Cay(Γ, A)` and exact
//! chromatic / independence solvers.

mod clique;
mod coloring;
mod graph;

pub use clique::{independence_number_exact, max_clique, CliqueResult, IndependenceResult};
pub use coloring::{
    chromatic_number_exact, chromatic_number_with_cap, dsatur_greedy, greedy_bounds, greedy_clique,
    ChromaticResult, LowerCertificate, SolverBudget, EXACT_VERTEX_CAP,
};
pub use graph::{BitGraph, Coloring, VertexSet, MATERIALIZE_VERTEX_CAP};

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::group::{ElementSet, GroupElement, GroupSpec};

/// `Cay(Γ, A)` with the symmetric connection set `A ∪ (−A) \ {0}`.
#[derive(Clone, Debug)]
pub struct CayleyView {
    connection: ElementSet,
    symmetric: ElementSet,
}

pub fn build_cayley(group: &GroupSpec, connection: &ElementSet) -> Result<CayleyView> {
    CayleyView::new(group, connection)
}

impl CayleyView {
    pub fn new(group: &GroupSpec, connection: &ElementSet) -> Result<Self> {
        if connection.group() != group {
            return Err(Error::GroupMismatch);
        }
        let mut connection = connection.clone();
        if connection.contains(0) {
            log::warn!("connection set contains 0; dropping it (self-loops do not affect χ or α)");
            connection.remove(0);
        }
        let symmetric = connection.union(&connection.negated())?;
        Ok(CayleyView {
            connection,
            symmetric,
        })
    }

    pub fn group(&self) -> &GroupSpec {
        self.connection.group()
    }

    pub fn order(&self) -> usize {
        self.group().order()
    }

    pub fn connection(&self) -> &ElementSet {
        &self.connection
    }

    pub fn symmetric_connection(&self) -> &ElementSet {
        &self.symmetric
    }

    /// Every vertex has this degree.
    pub fn degree(&self) -> usize {
        self.symmetric.len()
    }

    #[inline]
    pub fn adjacent(&self, u: usize, v: usize) -> bool {
        u != v && self.symmetric.contains(self.group().sub_index(v, u))
    }

    pub fn neighbors(&self, u: usize) -> impl Iterator<Item = usize> + '_ {
        self.symmetric
            .iter()
            .map(move |s| self.group().add_index(u, s))
    }

    pub fn to_bitgraph(&self) -> Result<BitGraph> {
        let mut g = BitGraph::empty(self.order())?;
        for u in 0..self.order() {
            for v in self.neighbors(u) {
                g.add_edge(u, v);
            }
        }
        Ok(g)
    }

    /// Graph induced on the given vertices (relabelled in the given order).
    pub fn induced(&self, vertices: &[usize]) -> Result<BitGraph> {
        BitGraph::from_fn(vertices.len(), |i, j| {
            self.adjacent(vertices[i], vertices[j])
        })
    }
}

/// Membership predicate for a connection set on a group too large to materialize.
pub type ConnectionPredicate = Arc<dyn Fn(&GroupElement) -> bool + Send + Sync>;

/// Implicit Cayley graph: adjacency is answered by testing `v − u` and `u − v`
/// against a predicate, with no per-vertex storage.
#[derive(Clone)]
pub struct ImplicitCayley {
    group: GroupSpec,
    predicate: ConnectionPredicate,
}

impl ImplicitCayley {
    pub fn new(group: &GroupSpec, predicate: ConnectionPredicate) -> Self {
        ImplicitCayley {
            group: group.clone(),
            predicate,
        }
    }

    pub fn group(&self) -> &GroupSpec {
        &self.group
    }

    pub fn adjacent(&self, u: &GroupElement, v: &GroupElement) -> Result<bool> {
        let d = self.group.sub(v, u)?;
        if d.coords.iter().all(|&c| c == 0) {
            return Ok(false);
        }
        Ok((self.predicate)(&d) || (self.predicate)(&self.group.neg(&d)?))
    }

    pub fn in_connection(&self, x: &GroupElement) -> bool {
        (self.predicate)(x)
    }
}
