use std::time::{Duration, Instant};

use serde::Serialize;

use super::clique::max_clique;
use super::graph::{BitGraph, Coloring};

/// Default vertex cap for the exact chromatic solver.
pub const EXACT_VERTEX_CAP: usize = 2000;
const DEFAULT_MAX_NODES: u64 = 20_000_000;
/// Nodes spent on the clique lower bound before coloring starts.
const CLIQUE_NODES: u64 = 200_000;

/// Search limits for the exact solvers. Exhaustion is reported, never an error.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SolverBudget {
    pub max_nodes: Option<u64>,
    pub time_limit: Option<Duration>,
}

impl Default for SolverBudget {
    fn default() -> Self {
        SolverBudget {
            max_nodes: Some(DEFAULT_MAX_NODES),
            time_limit: None,
        }
    }
}

impl SolverBudget {
    pub fn nodes(n: u64) -> Self {
        SolverBudget {
            max_nodes: Some(n),
            time_limit: None,
        }
    }

    pub fn unlimited() -> Self {
        SolverBudget {
            max_nodes: None,
            time_limit: None,
        }
    }

    pub fn with_time(mut self, t: Duration) -> Self {
        self.time_limit = Some(t);
        self
    }

    pub(crate) fn start(&self) -> BudgetClock {
        BudgetClock {
            max_nodes: self.max_nodes,
            deadline: self.time_limit.map(|t| Instant::now() + t),
        }
    }
}

pub(crate) struct BudgetClock {
    max_nodes: Option<u64>,
    deadline: Option<Instant>,
}

impl BudgetClock {
    pub(crate) fn exhausted(&self, nodes: u64) -> bool {
        if self.max_nodes.is_some_and(|m| nodes > m) {
            return true;
        }
        // checking the clock on every node is measurably slow
        nodes % 1024 == 0 && self.deadline.is_some_and(|d| Instant::now() >= d)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LowerCertificate {
    /// A clique of size `lower`.
    Clique,
    /// The search tree for `upper - 1` colors was exhausted.
    ExhaustedSearch,
    /// No certificate beyond the clique bound (budget ran out).
    None,
}

#[derive(Clone, Debug, Serialize)]
pub struct ChromaticResult {
    pub lower: usize,
    pub upper: usize,
    pub exact: bool,
    pub coloring: Coloring,
    pub clique: Vec<usize>,
    pub certificate: LowerCertificate,
    pub nodes: u64,
    pub budget_exhausted: bool,
}

/// Per-vertex color bookkeeping shared by the greedy and exact DSATUR runs.
struct SatState<'a> {
    g: &'a BitGraph,
    width: usize,
    colors: Vec<u32>,
    nbr_count: Vec<u32>,
    sat: Vec<u32>,
    degree: Vec<u32>,
}

const UNCOLORED: u32 = u32::MAX;

impl<'a> SatState<'a> {
    fn new(g: &'a BitGraph, width: usize) -> Self {
        let n = g.order();
        SatState {
            g,
            width,
            colors: vec![UNCOLORED; n],
            nbr_count: vec![0; n * width],
            sat: vec![0; n],
            degree: (0..n).map(|v| g.degree(v) as u32).collect(),
        }
    }

    fn assign(&mut self, v: usize, c: u32) {
        self.colors[v] = c;
        for u in self.g.row(v).iter() {
            let slot = &mut self.nbr_count[u * self.width + c as usize];
            if *slot == 0 {
                self.sat[u] += 1;
            }
            *slot += 1;
        }
    }

    fn unassign(&mut self, v: usize) {
        let c = self.colors[v];
        self.colors[v] = UNCOLORED;
        for u in self.g.row(v).iter() {
            let slot = &mut self.nbr_count[u * self.width + c as usize];
            *slot -= 1;
            if *slot == 0 {
                self.sat[u] -= 1;
            }
        }
    }

    #[inline]
    fn blocked(&self, v: usize, c: u32) -> bool {
        self.nbr_count[v * self.width + c as usize] > 0
    }

    /// Uncolored vertex of maximum saturation, then degree, then lowest index.
    fn pick(&self) -> Option<usize> {
        let mut best: Option<usize> = None;
        for v in 0..self.colors.len() {
            if self.colors[v] != UNCOLORED {
                continue;
            }
            best = match best {
                Some(b) if (self.sat[b], self.degree[b]) >= (self.sat[v], self.degree[v]) => {
                    Some(b)
                }
                _ => Some(v),
            };
        }
        best
    }
}

/// DSATUR greedy coloring.
pub fn dsatur_greedy(g: &BitGraph) -> Coloring {
    let width = g.max_degree() + 1;
    let mut st = SatState::new(g, width);
    while let Some(v) = st.pick() {
        let c = (0..width as u32)
            .find(|&c| !st.blocked(v, c))
            .expect("Δ+1 colors suffice");
        st.assign(v, c);
    }
    Coloring::new(st.colors)
}

/// Clique grown from a maximum-degree vertex, always adding the candidate
/// with the most candidate neighbours (lowest index on ties).
pub fn greedy_clique(g: &BitGraph) -> Vec<usize> {
    let n = g.order();
    let Some(start) = (0..n).max_by_key(|&v| (g.degree(v), std::cmp::Reverse(v))) else {
        return vec![];
    };
    let mut clique = vec![start];
    let mut cand = g.row(start).clone();
    while !cand.is_empty() {
        let v = cand
            .iter()
            .max_by_key(|&v| (g.row(v).intersection_count(&cand), std::cmp::Reverse(v)))
            .expect("nonempty");
        clique.push(v);
        cand.intersect_with(g.row(v));
    }
    clique.sort_unstable();
    clique
}

/// Greedy clique size and DSATUR color count, bracketing `χ`.
pub fn greedy_bounds(g: &BitGraph) -> (usize, usize) {
    let n = g.order();
    if n == 0 {
        return (0, 0);
    }
    let clique = max_clique(g, &SolverBudget::nodes(CLIQUE_NODES))
        .vertices
        .len();
    (clique, dsatur_greedy(g).num_colors)
}

/// Exact chromatic number by DSATUR branch and bound.
///
/// A large clique is fixed to colors `0..q` first (lower bound and symmetry
/// breaking); then uncolored vertices are branched in DSATUR order, trying
/// existing colors before opening a new one. When the budget runs out, or the
/// graph exceeds [`EXACT_VERTEX_CAP`], the result is the interval
/// `[lower, upper]` with `exact = false`.
pub fn chromatic_number_exact(g: &BitGraph, budget: &SolverBudget) -> ChromaticResult {
    chromatic_number_with_cap(g, budget, EXACT_VERTEX_CAP)
}

pub fn chromatic_number_with_cap(
    g: &BitGraph,
    budget: &SolverBudget,
    cap: usize,
) -> ChromaticResult {
    let n = g.order();
    if n == 0 {
        return ChromaticResult {
            lower: 0,
            upper: 0,
            exact: true,
            coloring: Coloring::new(vec![]),
            clique: vec![],
            certificate: LowerCertificate::Clique,
            nodes: 0,
            budget_exhausted: false,
        };
    }
    let greedy = dsatur_greedy(g);
    let mut clique = greedy_clique(g);
    if clique.len() < greedy.num_colors {
        let better = max_clique(g, &SolverBudget::nodes(CLIQUE_NODES).min_with(budget)).vertices;
        if better.len() > clique.len() {
            clique = better;
        }
    }
    let lower = clique.len();
    let mut result = ChromaticResult {
        lower,
        upper: greedy.num_colors,
        exact: lower == greedy.num_colors,
        coloring: greedy,
        clique,
        certificate: LowerCertificate::Clique,
        nodes: 0,
        budget_exhausted: false,
    };
    if result.exact {
        return result;
    }
    if n > cap {
        result.certificate = LowerCertificate::None;
        result.budget_exhausted = true;
        return result;
    }

    let mut bb = BranchAndBound {
        st: SatState::new(g, result.upper),
        ub: result.upper as u32,
        lb: lower as u32,
        best: result.coloring.colors.clone(),
        nodes: 0,
        clock: budget.start(),
        aborted: false,
    };
    for (i, &v) in result.clique.iter().enumerate() {
        bb.st.assign(v, i as u32);
    }
    bb.search(lower, lower as u32);

    result.nodes = bb.nodes;
    result.upper = bb.ub as usize;
    result.coloring = Coloring::new(bb.best);
    if bb.aborted {
        result.exact = result.lower == result.upper;
        result.budget_exhausted = true;
        if !result.exact {
            result.certificate = LowerCertificate::None;
        }
    } else {
        result.exact = true;
        if result.upper > result.lower {
            result.certificate = LowerCertificate::ExhaustedSearch;
            result.lower = result.upper;
        }
    }
    result
}

impl SolverBudget {
    fn min_with(self, other: &SolverBudget) -> SolverBudget {
        SolverBudget {
            max_nodes: match (self.max_nodes, other.max_nodes) {
                (Some(a), Some(b)) => Some(a.min(b)),
                (a, b) => a.or(b),
            },
            time_limit: other.time_limit.or(self.time_limit),
        }
    }
}

struct BranchAndBound<'a> {
    st: SatState<'a>,
    ub: u32,
    lb: u32,
    best: Vec<u32>,
    nodes: u64,
    clock: BudgetClock,
    aborted: bool,
}

impl BranchAndBound<'_> {
    fn search(&mut self, colored: usize, used: u32) {
        if self.aborted || self.ub <= self.lb || used >= self.ub {
            return;
        }
        let Some(v) = self.st.pick() else {
            debug_assert_eq!(colored, self.st.colors.len());
            if used < self.ub {
                self.ub = used;
                self.best = self.st.colors.clone();
            }
            return;
        };
        self.nodes += 1;
        if self.clock.exhausted(self.nodes) {
            self.aborted = true;
            return;
        }
        for c in 0..used {
            if self.st.blocked(v, c) {
                continue;
            }
            self.st.assign(v, c);
            self.search(colored + 1, used);
            self.st.unassign(v);
            if self.aborted || self.ub <= self.lb || used >= self.ub {
                return;
            }
        }
        if used + 1 < self.ub {
            self.st.assign(v, used);
            self.search(colored + 1, used + 1);
            self.st.unassign(v);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cayley::clique::independence_number_exact;
    use rand::{Rng, SeedableRng};

    fn cycle(n: usize) -> BitGraph {
        BitGraph::from_edges(n, (0..n).map(|i| (i, (i + 1) % n))).unwrap()
    }

    /// Tries every assignment of `k` colors.
    fn colorable_brute(g: &BitGraph, k: usize) -> bool {
        let n = g.order();
        let mut colors = vec![0usize; n];
        fn rec(g: &BitGraph, k: usize, v: usize, colors: &mut [usize]) -> bool {
            if v == colors.len() {
                return true;
            }
            for c in 0..k {
                if (0..v).all(|u| !g.adjacent(u, v) || colors[u] != c) {
                    colors[v] = c;
                    if rec(g, k, v + 1, colors) {
                        return true;
                    }
                }
            }
            false
        }
        rec(g, k, 0, &mut colors)
    }

    #[test]
    fn small_graphs() {
        let b = SolverBudget::default();
        let r = chromatic_number_exact(&cycle(5), &b);
        assert_eq!((r.lower, r.upper, r.exact), (3, 3, true));
        assert_eq!(r.certificate, LowerCertificate::ExhaustedSearch);
        assert!(r.coloring.is_proper(&cycle(5)));
        let k5 = BitGraph::from_fn(5, |_, _| true).unwrap();
        let r = chromatic_number_exact(&k5, &b);
        assert_eq!((r.upper, r.certificate), (5, LowerCertificate::Clique));
        assert_eq!(greedy_bounds(&k5), (5, 5));
        let (lo, hi) = greedy_bounds(&cycle(5));
        assert!(lo <= 3 && 3 <= hi);
        assert_eq!(chromatic_number_exact(&cycle(6), &b).upper, 2);
    }

    #[test]
    fn random_graphs_match_brute_force() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..40 {
            let n = rng.random_range(1..12);
            let density: f64 = rng.random();
            let g = BitGraph::from_fn(n, |_, _| rng.random::<f64>() < density).unwrap();
            let r = chromatic_number_exact(&g, &SolverBudget::default());
            assert!(r.exact);
            assert!(r.coloring.is_proper(&g));
            assert_eq!(r.coloring.num_colors, r.upper);
            assert!(colorable_brute(&g, r.upper));
            assert!(r.upper == 1 || !colorable_brute(&g, r.upper - 1));
            let a = independence_number_exact(&g, &SolverBudget::default());
            assert!(r.upper * a.lower >= n);
        }
    }

    #[test]
    fn budget_gives_interval() {
        // Mycielski graph of the 5-cycle (Grötzsch): clique 2, chromatic 4
        let mut edges: Vec<(usize, usize)> = (0..5).map(|i| (i, (i + 1) % 5)).collect();
        for i in 0..5 {
            edges.push((i + 5, (i + 1) % 5));
            edges.push((i + 5, (i + 4) % 5));
            edges.push((i + 5, 10));
        }
        let g = BitGraph::from_edges(11, edges).unwrap();
        let r = chromatic_number_exact(&g, &SolverBudget::default());
        assert_eq!((r.upper, r.exact), (4, true));
        let r = chromatic_number_exact(&g, &SolverBudget::nodes(1));
        assert!(r.lower <= 4 && 4 <= r.upper);
        assert!(r.coloring.is_proper(&g));
        if !r.exact {
            assert!(r.budget_exhausted);
        }
    }
}
