use std::fmt::Write as _;
use std::io::BufRead;

use serde::Serialize;

use crate::bits::BitSet;
use crate::error::{Error, Result};

/// Largest vertex count for materialized adjacency rows.
pub const MATERIALIZE_VERTEX_CAP: usize = 1 << 16;

/// Simple undirected graph stored as one bitset row per vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BitGraph {
    rows: Vec<BitSet>,
}

impl BitGraph {
    pub fn empty(n: usize) -> Result<Self> {
        if n > MATERIALIZE_VERTEX_CAP {
            return Err(Error::CapExceeded {
                what: "materialized graph vertices",
                size: n as u128,
                cap: MATERIALIZE_VERTEX_CAP as u128,
            });
        }
        Ok(BitGraph {
            rows: vec![BitSet::new(n); n],
        })
    }

    /// Builds the graph from a symmetric adjacency predicate evaluated on `u < v`.
    pub fn from_fn(n: usize, mut adj: impl FnMut(usize, usize) -> bool) -> Result<Self> {
        let mut g = Self::empty(n)?;
        for u in 0..n {
            for v in u + 1..n {
                if adj(u, v) {
                    g.add_edge(u, v);
                }
            }
        }
        Ok(g)
    }

    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut g = Self::empty(n)?;
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::IndexOutOfRange(u.max(v)));
            }
            if u != v {
                g.add_edge(u, v);
            }
        }
        Ok(g)
    }

    pub fn add_edge(&mut self, u: usize, v: usize) {
        self.rows[u].insert(v);
        self.rows[v].insert(u);
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.rows.len()
    }

    #[inline]
    pub fn adjacent(&self, u: usize, v: usize) -> bool {
        self.rows[u].contains(v)
    }

    #[inline]
    pub fn row(&self, u: usize) -> &BitSet {
        &self.rows[u]
    }

    pub fn degree(&self, u: usize) -> usize {
        self.rows[u].count()
    }

    pub fn max_degree(&self) -> usize {
        (0..self.order()).map(|u| self.degree(u)).max().unwrap_or(0)
    }

    pub fn edge_count(&self) -> usize {
        self.rows.iter().map(|r| r.count()).sum::<usize>() / 2
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.order()).flat_map(move |u| {
            self.rows[u]
                .iter()
                .filter(move |&v| v > u)
                .map(move |v| (u, v))
        })
    }

    pub fn complement(&self) -> BitGraph {
        let n = self.order();
        let rows = (0..n)
            .map(|u| {
                let mut r = BitSet::full(n);
                r.difference_with(&self.rows[u]);
                r.remove(u);
                r
            })
            .collect();
        BitGraph { rows }
    }

    /// Subgraph induced on `vertices`, relabelled `0..vertices.len()` in the given order.
    pub fn induced(&self, vertices: &[usize]) -> BitGraph {
        let n = vertices.len();
        let mut rows = vec![BitSet::new(n); n];
        for (i, &u) in vertices.iter().enumerate() {
            for (j, &v) in vertices.iter().enumerate() {
                if self.adjacent(u, v) {
                    rows[i].insert(j);
                }
            }
        }
        BitGraph { rows }
    }

    /// DIMACS edge format with 1-based vertices.
    pub fn to_dimacs(&self, comment: &str) -> String {
        let mut s = String::new();
        for line in comment.lines() {
            let _ = writeln!(s, "c {line}");
        }
        let _ = writeln!(s, "p edge {} {}", self.order(), self.edge_count());
        for (u, v) in self.edges() {
            let _ = writeln!(s, "e {} {}", u + 1, v + 1);
        }
        s
    }

    pub fn from_dimacs<R: BufRead>(r: R) -> Result<BitGraph> {
        let mut g: Option<BitGraph> = None;
        for line in r.lines() {
            let line = line.map_err(|e| Error::Parse(format!("read failure: {e}")))?;
            let toks: Vec<&str> = line.split_whitespace().collect();
            match toks.first() {
                None | Some(&"c") => {}
                Some(&"p") => {
                    let n: usize = toks
                        .get(2)
                        .and_then(|t| t.parse().ok())
                        .ok_or_else(|| Error::Parse(format!("bad problem line {line:?}")))?;
                    g = Some(BitGraph::empty(n)?);
                }
                Some(&"e") => {
                    let g = g
                        .as_mut()
                        .ok_or_else(|| Error::Parse("edge before problem line".into()))?;
                    let parse = |t: Option<&&str>| -> Result<usize> {
                        t.and_then(|t| t.parse::<usize>().ok())
                            .filter(|&v| v >= 1 && v <= g.order())
                            .map(|v| v - 1)
                            .ok_or_else(|| Error::Parse(format!("bad edge line {line:?}")))
                    };
                    let (u, v) = (parse(toks.get(1))?, parse(toks.get(2))?);
                    if u != v {
                        g.add_edge(u, v);
                    }
                }
                Some(t) => return Err(Error::Parse(format!("unknown DIMACS line type {t:?}"))),
            }
        }
        g.ok_or_else(|| Error::Parse("missing problem line".into()))
    }

    /// CNF (DIMACS) encoding of "this graph is `colors`-colorable".
    /// Variable `v*colors + c + 1` means vertex `v` gets color `c`.
    pub fn to_coloring_cnf(&self, colors: usize) -> String {
        let n = self.order();
        let var = |v: usize, c: usize| v * colors + c + 1;
        let mut clauses: Vec<String> = Vec::new();
        for v in 0..n {
            let at_least: Vec<String> = (0..colors).map(|c| var(v, c).to_string()).collect();
            clauses.push(format!("{} 0", at_least.join(" ")));
            for c in 0..colors {
                for d in c + 1..colors {
                    clauses.push(format!("-{} -{} 0", var(v, c), var(v, d)));
                }
            }
        }
        for (u, v) in self.edges() {
            for c in 0..colors {
                clauses.push(format!("-{} -{} 0", var(u, c), var(v, c)));
            }
        }
        let mut s = format!(
            "c {colors}-colorability of a {n}-vertex graph\np cnf {} {}\n",
            n * colors,
            clauses.len()
        );
        for c in clauses {
            s.push_str(&c);
            s.push('\n');
        }
        s
    }
}

/// Vertex coloring; color ids are `0..num_colors`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Coloring {
    pub colors: Vec<u32>,
    pub num_colors: usize,
}

impl Coloring {
    /// Wraps raw ids, counting the distinct ones.
    pub fn new(colors: Vec<u32>) -> Self {
        let mut seen: Vec<u32> = colors.clone();
        seen.sort_unstable();
        seen.dedup();
        Coloring {
            num_colors: seen.len(),
            colors,
        }
    }

    /// First monochromatic edge, if any, under an arbitrary adjacency oracle.
    pub fn conflict(
        &self,
        n: usize,
        adjacent: impl Fn(usize, usize) -> bool,
    ) -> Option<(usize, usize)> {
        for u in 0..n {
            for v in u + 1..n {
                if self.colors[u] == self.colors[v] && adjacent(u, v) {
                    return Some((u, v));
                }
            }
        }
        None
    }

    pub fn is_proper(&self, g: &BitGraph) -> bool {
        self.colors.len() == g.order() && g.edges().all(|(u, v)| self.colors[u] != self.colors[v])
    }
}

/// Vertex subset of a graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexSet {
    pub bits: BitSet,
}

impl VertexSet {
    pub fn from_vertices(n: usize, vs: &[usize]) -> Self {
        let mut bits = BitSet::new(n);
        for &v in vs {
            bits.insert(v);
        }
        VertexSet { bits }
    }

    pub fn len(&self) -> usize {
        self.bits.count()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.bits.iter().collect()
    }

    pub fn is_independent(&self, adjacent: impl Fn(usize, usize) -> bool) -> bool {
        let vs = self.to_vec();
        vs.iter()
            .enumerate()
            .all(|(i, &u)| vs[i + 1..].iter().all(|&v| !adjacent(u, v)))
    }

    pub fn is_clique(&self, adjacent: impl Fn(usize, usize) -> bool) -> bool {
        let vs = self.to_vec();
        vs.iter()
            .enumerate()
            .all(|(i, &u)| vs[i + 1..].iter().all(|&v| adjacent(u, v)))
    }
}

impl Serialize for VertexSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.bits.iter())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c5() -> BitGraph {
        BitGraph::from_edges(5, (0..5).map(|i| (i, (i + 1) % 5))).unwrap()
    }

    #[test]
    fn basic_queries() {
        let g = c5();
        assert_eq!(g.edge_count(), 5);
        assert!(g.adjacent(0, 4));
        assert_eq!(g.complement().edge_count(), 5);
        let h = g.induced(&[0, 1, 2]);
        assert_eq!(h.edge_count(), 2);
    }

    #[test]
    fn dimacs_round_trip() {
        let g = c5();
        let text = g.to_dimacs("five cycle");
        assert!(text.starts_with("c five cycle\np edge 5 5\n"));
        let back = BitGraph::from_dimacs(text.as_bytes()).unwrap();
        assert_eq!(back, g);
        assert!(BitGraph::from_dimacs("e 1 2\n".as_bytes()).is_err());
        assert!(BitGraph::from_dimacs("p edge 2 1\ne 1 3\n".as_bytes()).is_err());
    }

    #[test]
    fn cnf_counts() {
        let g = c5();
        let cnf = g.to_coloring_cnf(3);
        // 5 at-least-one + 5*3 at-most-one + 5*3 edge clauses
        assert!(cnf.contains("p cnf 15 35\n"));
    }

    #[test]
    fn validators() {
        let g = c5();
        assert!(Coloring::new(vec![0, 1, 0, 1, 2]).is_proper(&g));
        assert!(!Coloring::new(vec![0, 1, 0, 1, 0]).is_proper(&g));
        assert_eq!(
            Coloring::new(vec![0, 1, 0, 1, 0]).conflict(5, |u, v| g.adjacent(u, v)),
            Some((0, 4))
        );
        assert!(VertexSet::from_vertices(5, &[0, 2]).is_independent(|u, v| g.adjacent(u, v)));
        assert!(!VertexSet::from_vertices(5, &[0, 1]).is_independent(|u, v| g.adjacent(u, v)));
    }
}
