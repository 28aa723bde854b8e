//! Six-term invariants of one-ideal extensions and the augmented invariant
//! with its scaled short exact top row.

mod build;
mod exact;
mod format;
mod iso;

use std::fmt;

use num_bigint::BigInt;
use num_traits::Signed;

use crate::graphs::GraphError;
use crate::ktheory::{ConeCert, KtheoryError, ScaleCert, Tri, DEFAULT_CAP};
use crate::zlin::{Element, FgAbelianGroup, GroupHom, IntMatrix, ZlinError};

pub use build::{augmented_from_graph, augmented_from_staged, ksix_from_graph};
pub use exact::{verify_exactness, verify_top_row, ExactnessReport};
pub use iso::{iso_search, iso_verify, CheckStatus, IsoCertificate, IsoReport, SearchOutcome};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SixtermError {
    #[error("not a one-ideal extension: {0}")]
    NotOneIdeal(String),
    #[error("exactness failure (internal): {0}")]
    ExactnessFailure(String),
    #[error("quotient is not unital")]
    QuotientNotUnital,
    #[error("malformed invariant: {0}")]
    Malformed(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Ktheory(#[from] KtheoryError),
    #[error(transparent)]
    Zlin(#[from] ZlinError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InvariantKind {
    SixTerm,
    Augmented,
}

impl InvariantKind {
    pub fn node_names(self) -> &'static [&'static str] {
        match self {
            InvariantKind::SixTerm => &SIX_NODES,
            InvariantKind::Augmented => &AUG_NODES,
        }
    }

    pub fn edge_specs(self) -> &'static [(&'static str, &'static str, &'static str)] {
        match self {
            InvariantKind::SixTerm => &SIX_EDGES,
            InvariantKind::Augmented => &AUG_EDGES,
        }
    }

    /// Edge names of the cyclic six-term sequence, in order.
    pub fn cycle(self) -> [&'static str; 6] {
        match self {
            InvariantKind::SixTerm => ["iota0", "pi0", "d0", "iota1", "pi1", "d1"],
            InvariantKind::Augmented => ["eps", "gamma", "delta0", "eps1", "gamma1", "delta1"],
        }
    }

    pub fn keyword(self) -> &'static str {
        match self {
            InvariantKind::SixTerm => "sixterm",
            InvariantKind::Augmented => "augmented",
        }
    }
}

pub const SIX_NODES: [&str; 6] = ["K0I", "K0A", "K0Q", "K1I", "K1A", "K1Q"];
pub const SIX_EDGES: [(&str, &str, &str); 6] = [
    ("iota0", "K0I", "K0A"),
    ("pi0", "K0A", "K0Q"),
    ("d0", "K0Q", "K1I"),
    ("iota1", "K1I", "K1A"),
    ("pi1", "K1A", "K1Q"),
    ("d1", "K1Q", "K0I"),
];
pub const AUG_NODES: [&str; 9] = ["H1", "H2", "H3", "G1", "G2", "G3", "F1", "F2", "F3"];
pub const AUG_EDGES: [(&str, &str, &str); 11] = [
    ("eps_t", "H1", "H2"),
    ("gamma_t", "H2", "H3"),
    ("eta1", "H1", "G1"),
    ("eta2", "H2", "G2"),
    ("eta3", "H3", "G3"),
    ("eps", "G1", "G2"),
    ("gamma", "G2", "G3"),
    ("delta0", "G3", "F1"),
    ("eps1", "F1", "F2"),
    ("gamma1", "F2", "F3"),
    ("delta1", "F3", "G1"),
];

/// Rank declared for a group that is not finitely generated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum DeclaredRank {
    Finite(usize),
    Infinite,
}

impl fmt::Display for DeclaredRank {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DeclaredRank::Finite(r) => write!(f, "{r}"),
            DeclaredRank::Infinite => f.write_str("inf"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Node {
    pub name: String,
    pub group: FgAbelianGroup,
    /// set when the group is declared not finitely generated; `group` is
    /// then a placeholder
    pub nfg: Option<DeclaredRank>,
    pub cone: Option<ConeCert>,
    pub scale: Option<ScaleCert>,
}

impl Node {
    pub fn rank(&self) -> DeclaredRank {
        self.nfg.unwrap_or(DeclaredRank::Finite(self.group.free_rank()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub name: String,
    pub from: usize,
    pub to: usize,
    pub hom: GroupHom,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NamedElement {
    pub name: String,
    pub node: usize,
    pub value: Element,
}

/// A diagram of finitely generated abelian groups of one of the two fixed
/// shapes, with order, scale and unit data attached to nodes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Invariant {
    pub kind: InvariantKind,
    pub nodes: Vec<Node>,
    pub edges: Vec<Edge>,
    pub elements: Vec<NamedElement>,
    /// 0: neither algebra unital, 1: only the quotient, 2: both
    pub unitality: Option<u8>,
}

impl Invariant {
    /// Builds an invariant from groups (in the kind's node order) and map
    /// matrices (in the kind's edge order).
    pub fn from_parts(
        kind: InvariantKind,
        groups: Vec<FgAbelianGroup>,
        maps: Vec<IntMatrix>,
    ) -> Result<Self, SixtermError> {
        let names = kind.node_names();
        let specs = kind.edge_specs();
        if groups.len() != names.len() || maps.len() != specs.len() {
            return Err(SixtermError::Malformed("wrong number of groups or maps".into()));
        }
        let nodes: Vec<Node> = names
            .iter()
            .zip(groups)
            .map(|(n, g)| Node { name: n.to_string(), group: g, nfg: None, cone: None, scale: None })
            .collect();
        let mut inv = Invariant { kind, nodes, edges: Vec::new(), elements: Vec::new(), unitality: None };
        for ((name, from, to), m) in specs.iter().zip(maps) {
            let (f, t) = (inv.node_index(from).unwrap(), inv.node_index(to).unwrap());
            let hom = GroupHom::new(inv.nodes[f].group.clone(), inv.nodes[t].group.clone(), m)
                .map_err(|e| SixtermError::Malformed(format!("map {name}: {e}")))?;
            inv.edges.push(Edge { name: name.to_string(), from: f, to: t, hom });
        }
        Ok(inv)
    }

    pub fn node_index(&self, name: &str) -> Option<usize> {
        self.nodes.iter().position(|n| n.name == name)
    }

    pub fn node(&self, name: &str) -> &Node {
        let i = self.node_index(name).unwrap_or_else(|| panic!("invariant has no node {name}"));
        &self.nodes[i]
    }

    pub fn node_mut(&mut self, name: &str) -> &mut Node {
        let i = self.node_index(name).unwrap_or_else(|| panic!("invariant has no node {name}"));
        &mut self.nodes[i]
    }

    pub fn group(&self, name: &str) -> &FgAbelianGroup {
        &self.node(name).group
    }

    pub fn edge(&self, name: &str) -> &Edge {
        self.edges.iter().find(|e| e.name == name).unwrap_or_else(|| panic!("invariant has no map {name}"))
    }

    pub fn hom(&self, name: &str) -> &GroupHom {
        &self.edge(name).hom
    }

    pub fn set_hom(&mut self, name: &str, m: IntMatrix) -> Result<(), SixtermError> {
        let i = self
            .edges
            .iter()
            .position(|e| e.name == name)
            .ok_or_else(|| SixtermError::Malformed(format!("no map {name}")))?;
        let (f, t) = (self.edges[i].from, self.edges[i].to);
        self.edges[i].hom = GroupHom::new(self.nodes[f].group.clone(), self.nodes[t].group.clone(), m)
            .map_err(|e| SixtermError::Malformed(format!("map {name}: {e}")))?;
        Ok(())
    }

    pub fn element(&self, name: &str) -> Option<&Element> {
        self.elements.iter().find(|e| e.name == name).map(|e| &e.value)
    }

    pub fn set_element(&mut self, name: &str, node: &str, value: Element) {
        let node = self.node_index(node).unwrap_or_else(|| panic!("invariant has no node {node}"));
        let value = self.nodes[node].group.reduce_coords(&value);
        match self.elements.iter_mut().find(|e| e.name == name) {
            Some(e) => {
                e.node = node;
                e.value = value;
            }
            None => self.elements.push(NamedElement { name: name.to_string(), node, value }),
        }
    }

    /// Checks that all nodes and maps of the kind are present with matching
    /// endpoints and groups.
    pub fn validate(&self) -> Result<(), SixtermError> {
        for n in self.kind.node_names() {
            if self.node_index(n).is_none() {
                return Err(SixtermError::Malformed(format!("missing group {n}")));
            }
        }
        if self.nodes.len() != self.kind.node_names().len() {
            return Err(SixtermError::Malformed("unexpected extra groups".into()));
        }
        for (name, from, to) in self.kind.edge_specs() {
            let e = self
                .edges
                .iter()
                .find(|e| e.name == *name)
                .ok_or_else(|| SixtermError::Malformed(format!("missing map {name}")))?;
            if self.nodes[e.from].name != *from || self.nodes[e.to].name != *to {
                return Err(SixtermError::Malformed(format!("map {name} must go from {from} to {to}")));
            }
            if !e.hom.source().same_canonical_form(&self.nodes[e.from].group)
                || !e.hom.target().same_canonical_form(&self.nodes[e.to].group)
            {
                return Err(SixtermError::Malformed(format!("map {name} does not match its groups")));
            }
        }
        if self.edges.len() != self.kind.edge_specs().len() {
            return Err(SixtermError::Malformed("unexpected extra maps".into()));
        }
        for e in &self.elements {
            if e.value.len() != self.nodes[e.node].group.ngens() {
                return Err(SixtermError::Malformed(format!("element {} has the wrong length", e.name)));
            }
        }
        Ok(())
    }

    /// Cone membership at a node, resolving lexicographic cones through the
    /// top row.
    pub fn cone_contains(&self, node: &str, x: &[BigInt], cap: usize) -> Tri {
        let n = self.node(node);
        match &n.cone {
            None => Tri::Unknown,
            Some(ConeCert::Lexicographic) => self.lex_contains(x, cap),
            Some(c) => c.contains(&n.group, x, cap),
        }
    }

    fn lex_contains(&self, x: &[BigInt], cap: usize) -> Tri {
        if self.kind != InvariantKind::Augmented {
            return Tri::Unknown;
        }
        let h2 = self.group("H2");
        if h2.is_zero(x) {
            return Tri::Yes;
        }
        let Some(t) = self.gamma_t_value(x) else {
            return Tri::Unknown;
        };
        if t.is_positive() {
            return Tri::Yes;
        }
        if t.is_negative() {
            return Tri::No;
        }
        match self.hom("eps_t").preimage(x) {
            Some(h) => self.cone_contains("H1", &h, cap),
            None => Tri::No,
        }
    }

    /// `γ̃(x)` as an integer, when `H₃` is `Z`.
    pub fn gamma_t_value(&self, x: &[BigInt]) -> Option<BigInt> {
        let h3 = self.group("H3");
        if h3.ngens() != 1 || !h3.is_free() {
            return None;
        }
        Some(self.hom("gamma_t").apply(x)[0].clone())
    }

    /// Scale membership at a node.
    pub fn scale_contains(&self, node: &str, x: &[BigInt], cap: usize) -> Tri {
        let n = self.node(node);
        let pos = |y: &[BigInt]| self.cone_contains(node, y, cap);
        match &n.scale {
            None => Tri::Unknown,
            Some(ScaleCert::Shifted { base, sub }) => self.shifted_contains(node, base, sub, x, cap),
            Some(ScaleCert::Induced { base }) => {
                if self.kind != InvariantKind::Augmented || node != "H1" {
                    return Tri::Unknown;
                }
                let up = self.group("H2").add(base, &self.hom("eps_t").apply(x));
                pos(x).and(self.scale_contains("H2", &up, cap))
            }
            Some(s) => s.contains_with(&n.group, x, cap, &pos),
        }
    }

    fn shifted_contains(&self, node: &str, base: &[BigInt], sub: &ScaleCert, x: &[BigInt], cap: usize) -> Tri {
        if self.kind != InvariantKind::Augmented || node != "H2" {
            return Tri::Unknown;
        }
        let h2 = self.group("H2");
        let eps = self.hom("eps_t");
        let nonneg = self.cone_contains(node, x, cap);
        if nonneg == Tri::No {
            return Tri::No;
        }
        let below = |q: &[BigInt]| self.cone_contains(node, &h2.sub(&h2.add(base, &eps.apply(q)), x), cap);
        let found = match sub {
            ScaleCert::Unit(u) => below(u),
            ScaleCert::BoundedBy(list) => Tri::any(list.iter().map(|q| below(q))),
            ScaleCert::OrbitOf { seed, matrix } => {
                let h1 = self.group("H1");
                let mut q = h1.reduce_coords(seed);
                let mut out = Tri::Unknown;
                for _ in 0..=cap {
                    if below(&q) == Tri::Yes {
                        out = Tri::Yes;
                        break;
                    }
                    q = h1.reduce_coords(&matrix.mul_vec(&q));
                }
                out
            }
            ScaleCert::Full => {
                let zero = self.group("H1").zero();
                match below(&zero) {
                    Tri::Yes => Tri::Yes,
                    _ if self.node("H2").cone == Some(ConeCert::Lexicographic) => self.shifted_full_lex(base, x),
                    _ => Tri::Unknown,
                }
            }
            ScaleCert::Shifted { .. } | ScaleCert::Induced { .. } => Tri::Unknown,
        };
        nonneg.and(found)
    }

    /// With a lexicographic cone and `q` free in `H₁⁺`: `base + ε̃(q) − x` is
    /// positive for some `q` iff `γ̃(base − x) ≥ 1`, or it is `0` and `H₁` is
    /// directed (every element lies below a positive one).
    fn shifted_full_lex(&self, base: &[BigInt], x: &[BigInt]) -> Tri {
        let h2 = self.group("H2");
        let d = h2.sub(base, x);
        let Some(t) = self.gamma_t_value(&d) else {
            return Tri::Unknown;
        };
        if t.is_positive() {
            return Tri::Yes;
        }
        if t.is_negative() {
            return Tri::No;
        }
        match &self.node("H1").cone {
            Some(ConeCert::Full | ConeCert::Declared(true) | ConeCert::Simplicial | ConeCert::StationaryDG(_)) => {
                Tri::Yes
            }
            _ => Tri::Unknown,
        }
    }

    pub fn default_cap() -> usize {
        DEFAULT_CAP
    }
}
