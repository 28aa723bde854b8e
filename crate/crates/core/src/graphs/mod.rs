//! Directed graphs with possibly infinite edge multiplicities, following the
//! convention that sinks and infinite emitters are the singular vertices.

mod analysis;
mod staged;

use std::collections::HashMap;
use std::fmt;

pub use analysis::{
    classify_simple, condition_k, hereditary_saturated_subsets, hs_closure, subgraph_and_quotient, Simplicity,
    SUBSET_ENUMERATION_CAP,
};
pub use staged::{StagedGraph, StationaryBlock, Tail, TailDirection};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GraphError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("duplicate vertex `{0}`")]
    DuplicateVertex(String),
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("graph has {n} vertices; subset enumeration is capped at {cap}")]
    TooLarge { n: usize, cap: usize },
    #[error("vertex set is not hereditary and saturated: {0}")]
    NotHereditarySaturated(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
}

/// Number of edges from one vertex to another.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mult {
    Finite(u64),
    Infinite,
}

impl Mult {
    pub fn is_zero(self) -> bool {
        self == Mult::Finite(0)
    }

    pub fn finite(self) -> Option<u64> {
        match self {
            Mult::Finite(k) => Some(k),
            Mult::Infinite => None,
        }
    }

    pub fn saturating_add(self, other: Mult) -> Mult {
        match (self, other) {
            (Mult::Finite(a), Mult::Finite(b)) => Mult::Finite(a.saturating_add(b)),
            _ => Mult::Infinite,
        }
    }
}

impl fmt::Display for Mult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mult::Finite(k) => write!(f, "{k}"),
            Mult::Infinite => f.write_str("inf"),
        }
    }
}

impl std::str::FromStr for Mult {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "inf" | "ω" => Ok(Mult::Infinite),
            _ => s
                .parse::<u64>()
                .map(Mult::Finite)
                .map_err(|_| format!("bad multiplicity `{s}` (expected a positive integer or `inf`)")),
        }
    }
}

/// Finite directed graph stored as a dense multiplicity matrix.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct Graph {
    names: Vec<String>,
    index: HashMap<String, usize>,
    mult: Vec<Mult>,
}

impl Graph {
    pub fn new() -> Self {
        Self::default()
    }

    /// Graph on `n` vertices named `v0, v1, ...` with the given multiplicities.
    pub fn from_adjacency(adj: &[Vec<Mult>]) -> Self {
        let mut g = Graph::new();
        for i in 0..adj.len() {
            g.add_vertex(&format!("v{i}")).expect("generated names are distinct");
        }
        for (i, row) in adj.iter().enumerate() {
            assert_eq!(row.len(), adj.len(), "adjacency must be square");
            for (j, &m) in row.iter().enumerate() {
                g.set_mult(i, j, m);
            }
        }
        g
    }

    pub fn from_counts<R: AsRef<[u64]>>(adj: &[R]) -> Self {
        let rows: Vec<Vec<Mult>> = adj.iter().map(|r| r.as_ref().iter().map(|&k| Mult::Finite(k)).collect()).collect();
        Self::from_adjacency(&rows)
    }

    pub fn add_vertex(&mut self, name: &str) -> Result<usize, GraphError> {
        if self.index.contains_key(name) {
            return Err(GraphError::DuplicateVertex(name.to_string()));
        }
        let n = self.names.len();
        let mut mult = Vec::with_capacity((n + 1) * (n + 1));
        for i in 0..=n {
            for j in 0..=n {
                mult.push(if i < n && j < n { self.mult[i * n + j] } else { Mult::Finite(0) });
            }
        }
        self.mult = mult;
        self.names.push(name.to_string());
        self.index.insert(name.to_string(), n);
        Ok(n)
    }

    /// Adds `m` parallel edges from `v` to `w`.
    pub fn add_edges(&mut self, v: usize, w: usize, m: Mult) {
        let cur = self.mult(v, w);
        self.set_mult(v, w, cur.saturating_add(m));
    }

    pub fn set_mult(&mut self, v: usize, w: usize, m: Mult) {
        let n = self.names.len();
        self.mult[v * n + w] = m;
    }

    pub fn vertex_count(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, v: usize) -> &str {
        &self.names[v]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn require(&self, name: &str) -> Result<usize, GraphError> {
        self.index_of(name).ok_or_else(|| GraphError::UnknownVertex(name.to_string()))
    }

    pub fn mult(&self, v: usize, w: usize) -> Mult {
        self.mult[v * self.names.len() + w]
    }

    pub fn has_edge(&self, v: usize, w: usize) -> bool {
        !self.mult(v, w).is_zero()
    }

    pub fn successors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.vertex_count()).filter(move |&w| self.has_edge(v, w))
    }

    pub fn out_mult(&self, v: usize) -> Mult {
        (0..self.vertex_count()).fold(Mult::Finite(0), |acc, w| acc.saturating_add(self.mult(v, w)))
    }

    pub fn is_sink(&self, v: usize) -> bool {
        self.out_mult(v).is_zero()
    }

    pub fn is_infinite_emitter(&self, v: usize) -> bool {
        self.out_mult(v) == Mult::Infinite
    }

    pub fn is_regular(&self, v: usize) -> bool {
        matches!(self.out_mult(v), Mult::Finite(k) if k >= 1)
    }

    pub fn regular_vertices(&self) -> Vec<usize> {
        (0..self.vertex_count()).filter(|&v| self.is_regular(v)).collect()
    }

    pub fn singular_vertices(&self) -> Vec<usize> {
        (0..self.vertex_count()).filter(|&v| !self.is_regular(v)).collect()
    }

    /// Adjacency with `ω` entries kept symbolic.
    pub fn adjacency(&self) -> Vec<Vec<Mult>> {
        let n = self.vertex_count();
        (0..n).map(|v| (0..n).map(|w| self.mult(v, w)).collect()).collect()
    }

    pub fn adjacency_text(&self) -> String {
        self.adjacency()
            .iter()
            .map(|row| row.iter().map(|m| m.to_string()).collect::<Vec<_>>().join(" "))
            .collect::<Vec<_>>()
            .join("\n")
    }

    /// Restriction to the given vertices, in the given order.
    pub fn induced_subgraph(&self, vertices: &[usize]) -> Graph {
        let mut g = Graph::new();
        for &v in vertices {
            g.add_vertex(self.name(v)).expect("vertex names are distinct");
        }
        for (i, &v) in vertices.iter().enumerate() {
            for (j, &w) in vertices.iter().enumerate() {
                g.set_mult(i, j, self.mult(v, w));
            }
        }
        g
    }

    pub fn has_cycle(&self) -> bool {
        // Kahn's algorithm: a cycle exists iff some vertex is never freed.
        let n = self.vertex_count();
        let mut indeg = vec![0usize; n];
        for v in 0..n {
            for w in self.successors(v) {
                indeg[w] += 1;
            }
        }
        let mut stack: Vec<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
        let mut seen = 0;
        while let Some(v) = stack.pop() {
            seen += 1;
            for w in self.successors(v) {
                indeg[w] -= 1;
                if indeg[w] == 0 {
                    stack.push(w);
                }
            }
        }
        seen < n
    }

    /// Vertices reachable from `start` by paths of length ≥ 0.
    pub fn reachable_from(&self, start: &[usize]) -> Vec<bool> {
        let mut seen = vec![false; self.vertex_count()];
        let mut stack = start.to_vec();
        while let Some(v) = stack.pop() {
            if std::mem::replace(&mut seen[v], true) {
                continue;
            }
            stack.extend(self.successors(v).filter(|&w| !seen[w]));
        }
        seen
    }

    /// Parses the line-oriented text form. Staged declarations are rejected
    /// here; see [`StagedGraph::parse`].
    pub fn parse(text: &str) -> Result<Graph, GraphError> {
        let staged = StagedGraph::parse(text)?;
        if !staged.is_finite() {
            return Err(GraphError::Unsupported(
                "tail/stationary declarations describe an infinite graph; parse it as a staged graph".into(),
            ));
        }
        Ok(staged.core)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for name in &self.names {
            out.push_str(&format!("v {name}\n"));
        }
        let n = self.vertex_count();
        for v in 0..n {
            for w in 0..n {
                let m = self.mult(v, w);
                if !m.is_zero() {
                    out.push_str(&format!("e {} {} {m}\n", self.names[v], self.names[w]));
                }
            }
        }
        out
    }
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Graph{:?}\n{}", self.names, self.adjacency_text())
    }
}

/// Subset of the vertices of a graph.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexSet {
    mask: Vec<bool>,
}

impl VertexSet {
    pub fn empty(n: usize) -> Self {
        VertexSet { mask: vec![false; n] }
    }

    pub fn full(n: usize) -> Self {
        VertexSet { mask: vec![true; n] }
    }

    pub fn from_mask(mask: Vec<bool>) -> Self {
        VertexSet { mask }
    }

    pub fn from_indices(n: usize, members: &[usize]) -> Self {
        let mut s = Self::empty(n);
        for &v in members {
            s.mask[v] = true;
        }
        s
    }

    pub fn from_names(g: &Graph, names: &[&str]) -> Result<Self, GraphError> {
        let idx = names.iter().map(|n| g.require(n)).collect::<Result<Vec<_>, _>>()?;
        Ok(Self::from_indices(g.vertex_count(), &idx))
    }

    pub fn contains(&self, v: usize) -> bool {
        self.mask[v]
    }

    pub fn insert(&mut self, v: usize) {
        self.mask[v] = true;
    }

    pub fn len(&self) -> usize {
        self.mask.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn universe(&self) -> usize {
        self.mask.len()
    }

    pub fn is_full(&self) -> bool {
        self.mask.iter().all(|&b| b)
    }

    pub fn members(&self) -> Vec<usize> {
        (0..self.mask.len()).filter(|&v| self.mask[v]).collect()
    }

    pub fn complement(&self) -> VertexSet {
        VertexSet { mask: self.mask.iter().map(|b| !b).collect() }
    }

    pub fn is_hereditary(&self, g: &Graph) -> bool {
        self.members().into_iter().all(|v| g.successors(v).all(|w| self.contains(w)))
    }

    pub fn is_saturated(&self, g: &Graph) -> bool {
        (0..g.vertex_count())
            .filter(|&v| !self.contains(v) && g.is_regular(v))
            .all(|v| g.successors(v).any(|w| !self.contains(w)))
    }

    pub fn is_hereditary_saturated(&self, g: &Graph) -> bool {
        self.is_hereditary(g) && self.is_saturated(g)
    }

    /// Infinite emitters outside the set that emit finitely many (but some)
    /// edges to the complement.
    pub fn breaking_vertices(&self, g: &Graph) -> Vec<usize> {
        (0..g.vertex_count())
            .filter(|&v| !self.contains(v) && g.is_infinite_emitter(v))
            .filter(|&v| {
                let out = (0..g.vertex_count())
                    .filter(|&w| !self.contains(w))
                    .fold(Mult::Finite(0), |acc, w| acc.saturating_add(g.mult(v, w)));
                matches!(out, Mult::Finite(k) if k >= 1)
            })
            .collect()
    }

    pub fn names<'a>(&self, g: &'a Graph) -> Vec<&'a str> {
        self.members().into_iter().map(|v| g.name(v)).collect()
    }
}
