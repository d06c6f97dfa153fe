use serde::Serialize;

use crate::bits::BitSet;

use super::coloring::{dsatur_greedy, SolverBudget};
use super::graph::{BitGraph, VertexSet};

#[derive(Clone, Debug, Serialize)]
pub struct CliqueResult {
    /// Best clique found, in original vertex labels.
    pub vertices: Vec<usize>,
    /// Upper bound on the clique number (equals `vertices.len()` when exact).
    pub upper: usize,
    pub exact: bool,
    pub nodes: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct IndependenceResult {
    pub lower: usize,
    pub upper: usize,
    pub exact: bool,
    pub set: VertexSet,
    pub nodes: u64,
}

/// Branch-and-bound maximum clique with greedy-coloring bounds.
///
/// Vertices are relabelled by non-increasing degree (ties by index) and the
/// candidate set is re-colored at every node; a branch is cut when the clique
/// so far plus the color bound cannot beat the incumbent.
pub fn max_clique(g: &BitGraph, budget: &SolverBudget) -> CliqueResult {
    let n = g.order();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| (std::cmp::Reverse(g.degree(v)), v));
    let h = g.induced(&order);
    let mut search = CliqueSearch {
        g: &h,
        best: Vec::new(),
        current: Vec::new(),
        nodes: 0,
        budget: budget.start(),
        aborted: false,
    };
    let upper_root = dsatur_greedy(g).num_colors;
    search.expand(BitSet::full(n));
    let exact = !search.aborted;
    let vertices: Vec<usize> = {
        let mut v: Vec<usize> = search.best.iter().map(|&i| order[i]).collect();
        v.sort_unstable();
        v
    };
    CliqueResult {
        upper: if exact { vertices.len() } else { upper_root },
        vertices,
        exact,
        nodes: search.nodes,
    }
}

/// `α(G)` as the clique number of the complement.
pub fn independence_number_exact(g: &BitGraph, budget: &SolverBudget) -> IndependenceResult {
    let r = max_clique(&g.complement(), budget);
    IndependenceResult {
        lower: r.vertices.len(),
        upper: r.upper,
        exact: r.exact,
        set: VertexSet::from_vertices(g.order(), &r.vertices),
        nodes: r.nodes,
    }
}

struct CliqueSearch<'a> {
    g: &'a BitGraph,
    best: Vec<usize>,
    current: Vec<usize>,
    nodes: u64,
    budget: super::coloring::BudgetClock,
    aborted: bool,
}

impl CliqueSearch<'_> {
    /// Sequential greedy coloring of `p`; returns vertices with their color
    /// numbers (1-based), ordered by color.
    fn color_sort(&self, p: &BitSet) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(p.count());
        let mut rest = p.clone();
        let mut color = 0;
        while !rest.is_empty() {
            color += 1;
            let mut avail = rest.clone();
            while let Some(v) = avail.first() {
                avail.remove(v);
                rest.remove(v);
                avail.difference_with(self.g.row(v));
                out.push((v, color));
            }
        }
        out
    }

    fn expand(&mut self, mut p: BitSet) {
        self.nodes += 1;
        if self.budget.exhausted(self.nodes) {
            self.aborted = true;
            return;
        }
        let colored = self.color_sort(&p);
        for &(v, bound) in colored.iter().rev() {
            if self.current.len() + bound <= self.best.len() {
                return;
            }
            self.current.push(v);
            let mut next = p.clone();
            next.intersect_with(self.g.row(v));
            if next.is_empty() {
                if self.current.len() > self.best.len() {
                    self.best = self.current.clone();
                }
            } else {
                self.expand(next);
            }
            self.current.pop();
            if self.aborted {
                return;
            }
            p.remove(v);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle(n: usize) -> BitGraph {
        BitGraph::from_edges(n, (0..n).map(|i| (i, (i + 1) % n))).unwrap()
    }

    fn petersen() -> BitGraph {
        let outer = (0..5).map(|i| (i, (i + 1) % 5));
        let spokes = (0..5).map(|i| (i, i + 5));
        let inner = (0..5).map(|i| (5 + i, 5 + (i + 2) % 5));
        BitGraph::from_edges(10, outer.chain(spokes).chain(inner)).unwrap()
    }

    /// Subset enumeration oracle.
    fn alpha_brute(g: &BitGraph) -> usize {
        let n = g.order();
        (0u32..1 << n)
            .filter(|&mask| {
                (0..n).all(|u| {
                    (mask >> u) & 1 == 0
                        || (u + 1..n).all(|v| (mask >> v) & 1 == 0 || !g.adjacent(u, v))
                })
            })
            .map(|m| m.count_ones() as usize)
            .max()
            .unwrap()
    }

    #[test]
    fn small_graphs() {
        let b = SolverBudget::default();
        let c5 = cycle(5);
        let r = independence_number_exact(&c5, &b);
        assert_eq!((r.lower, r.exact), (2, true));
        assert!(r.set.is_independent(|u, v| c5.adjacent(u, v)));
        let k5 = BitGraph::from_fn(5, |_, _| true).unwrap();
        assert_eq!(independence_number_exact(&k5, &b).lower, 1);
        assert_eq!(max_clique(&k5, &b).vertices, vec![0, 1, 2, 3, 4]);
        let p = petersen();
        assert_eq!(alpha_brute(&p), 4);
        assert_eq!(independence_number_exact(&p, &b).lower, 4);
        assert_eq!(max_clique(&p, &b).vertices.len(), 2);
    }

    #[test]
    fn random_graphs_match_brute_force() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..30 {
            let n = rng.random_range(1..15);
            let density: f64 = rng.random();
            let g = BitGraph::from_fn(n, |_, _| rng.random::<f64>() < density).unwrap();
            let r = independence_number_exact(&g, &SolverBudget::default());
            assert_eq!(r.lower, alpha_brute(&g));
            assert!(r.set.is_independent(|u, v| g.adjacent(u, v)));
        }
    }

    #[test]
    fn budget_is_flagged() {
        let g = BitGraph::from_fn(60, |u, v| (u * 7 + v * 3) % 5 != 0).unwrap();
        let r = max_clique(&g, &SolverBudget::nodes(3));
        assert!(!r.exact);
        assert!(r.upper >= r.vertices.len());
    }
}
