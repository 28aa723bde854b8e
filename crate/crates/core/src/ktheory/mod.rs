//! K₀ and K₁ of graph C*-algebras as the cokernel and kernel of `Aᵗ − I`
//! restricted to regular columns, together with order and scale
//! certificates.

mod cert;
mod staged;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::graphs::{classify_simple, Graph, GraphError, Mult, Simplicity, StagedGraph, VertexSet};
use crate::zlin::{kernel_basis, snf, Element, FgAbelianGroup, IntMatrix, ZlinError};

pub use cert::{dg_positive, is_primitive, ConeCert, Positivity, ScaleCert, Tri, DEFAULT_CAP};
pub use staged::{staged_cone_certificate, staged_k_groups, StagedK};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum KtheoryError {
    #[error("matrix is not primitive: {0}")]
    NotPrimitive(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("no stabilization up to depth {0}")]
    NoStabilization(usize),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Zlin(#[from] ZlinError),
}

/// `Aᵗ − I` with rows indexed by all vertices and columns by the regular
/// vertices (in vertex order).
pub fn kmap_matrix(g: &Graph) -> IntMatrix {
    let reg = g.regular_vertices();
    IntMatrix::from_fn(g.vertex_count(), reg.len(), |w, j| {
        let v = reg[j];
        let k = match g.mult(v, w) {
            Mult::Finite(k) => BigInt::from(k),
            Mult::Infinite => unreachable!("regular vertices emit finitely many edges"),
        };
        if v == w {
            k - 1
        } else {
            k
        }
    })
}

/// K-theory of a finite graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KPair {
    pub k0: FgAbelianGroup,
    pub k1: FgAbelianGroup,
    /// class of each vertex projection, in vertex order
    pub vertex_classes: Vec<Element>,
    pub unit_class: Option<Element>,
    pub kmap: IntMatrix,
    /// lattice basis of `ker(kmap)`; K₁ coordinates are coefficients in it
    pub k1_basis: Vec<Vec<BigInt>>,
}

impl KPair {
    /// Vector in `Z^reg` represented by K₁ coordinates.
    pub fn k1_vector(&self, coords: &[BigInt]) -> Vec<BigInt> {
        let n = self.kmap.cols();
        let mut out = vec![BigInt::zero(); n];
        for (c, b) in coords.iter().zip(&self.k1_basis) {
            for (o, x) in out.iter_mut().zip(b) {
                *o += c * x;
            }
        }
        out
    }
}

pub fn k_groups(g: &Graph) -> KPair {
    let m = kmap_matrix(g);
    let s = snf(&m);
    let k0 = FgAbelianGroup::from_presentation(&m);
    let r = s.rank();
    let k1_basis: Vec<Vec<BigInt>> = (r..m.cols()).map(|j| s.v.column(j)).collect();
    let k1 = FgAbelianGroup::free(k1_basis.len());
    let n = g.vertex_count();
    let vertex_classes: Vec<Element> = (0..n)
        .map(|v| {
            let mut e = vec![BigInt::zero(); n];
            e[v] = BigInt::one();
            k0.class_of(&e)
        })
        .collect();
    let unit_class = Some(k0.class_of(&vec![BigInt::one(); n]));
    KPair { k0, k1, vertex_classes, unit_class, kmap: m, k1_basis }
}

/// Class of `Σ p_v` (the unit) in K₀.
pub fn unit_class(g: &Graph) -> Element {
    let m = kmap_matrix(g);
    let k0 = FgAbelianGroup::from_presentation(&m);
    k0.class_of(&vec![BigInt::one(); g.vertex_count()])
}

/// Cone certificate for a finite graph with simple C*-algebra.
pub fn cone_certificate(g: &Graph) -> Result<ConeCert, KtheoryError> {
    match classify_simple(g) {
        Simplicity::SimplePurelyInfinite => Ok(ConeCert::Full),
        Simplicity::SimpleAF => Ok(ConeCert::Simplicial),
        Simplicity::NotSimple => {
            Err(KtheoryError::Unsupported("no cone certificate for a non-simple graph; supply a declared flag".into()))
        }
    }
}

/// Scale of the ideal generated by `h` inside `C*(g)`, in the K₀ of the
/// ideal's own graph. The ideal's approximate unit is `p_H` plus the range
/// projections of paths entering `H` from outside; with finitely many such
/// paths the scale is the order interval below their total class.
pub fn ideal_scale(g: &Graph, h: &VertexSet, ideal: &KPair, cone: &ConeCert) -> ScaleCert {
    if matches!(cone, ConeCert::Full) {
        return ScaleCert::Full;
    }
    let n = g.vertex_count();
    let members = h.members();
    // count paths that start outside H and end at their first vertex in H
    let outside: Vec<usize> = (0..n).filter(|&v| !h.contains(v)).collect();
    let sub = g.induced_subgraph(&outside);
    let mut weights = vec![BigInt::one(); members.len()];
    // a cycle outside H that can enter H gives infinitely many paths
    let reaches_h: Vec<bool> = outside.iter().map(|&v| members.iter().any(|&w| g.has_edge(v, w))).collect();
    let can_enter: Vec<bool> = {
        let mut ok = reaches_h.clone();
        loop {
            let mut changed = false;
            for i in 0..outside.len() {
                if !ok[i] && (0..outside.len()).any(|j| ok[j] && sub.has_edge(i, j)) {
                    ok[i] = true;
                    changed = true;
                }
            }
            if !changed {
                break ok;
            }
        }
    };
    let relevant: Vec<usize> = (0..outside.len()).filter(|&i| can_enter[i]).collect();
    let relevant_graph = sub.induced_subgraph(&relevant);
    let infinite_edge = relevant.iter().any(|&i| {
        let v = outside[i];
        (0..n).any(|w| g.mult(v, w) == Mult::Infinite && (h.contains(w) || can_enter_outside(&outside, &can_enter, w)))
    });
    if relevant_graph.has_cycle() || infinite_edge {
        return ScaleCert::Full;
    }
    // into[i]: number of paths outside H ending at outside[i]
    let mut into = vec![BigInt::zero(); outside.len()];
    let order = topo_order(&relevant_graph);
    for &ri in &order {
        let i = relevant[ri];
        let mut c = BigInt::one();
        for (rj, &j) in relevant.iter().enumerate() {
            if rj != ri {
                if let Some(k) = sub.mult(j, i).finite() {
                    c += BigInt::from(k) * &into[j];
                }
            }
        }
        into[i] = c;
    }
    for &i in &relevant {
        let v = outside[i];
        for (j, &w) in members.iter().enumerate() {
            if let Some(k) = g.mult(v, w).finite() {
                weights[j] += BigInt::from(k) * &into[i];
            }
        }
    }
    let mut total = ideal.k0.zero();
    for (j, wgt) in weights.iter().enumerate() {
        total = ideal.k0.add(&total, &ideal.k0.scale(wgt, &ideal.vertex_classes[j]));
    }
    ScaleCert::Unit(total)
}

fn can_enter_outside(outside: &[usize], can_enter: &[bool], w: usize) -> bool {
    outside.iter().position(|&o| o == w).is_some_and(|i| can_enter[i])
}

/// Topological order of an acyclic graph (sources first).
fn topo_order(g: &Graph) -> Vec<usize> {
    let n = g.vertex_count();
    let mut indeg = vec![0usize; n];
    for v in 0..n {
        for w in g.successors(v) {
            if w != v {
                indeg[w] += 1;
            }
        }
    }
    let mut stack: Vec<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
    let mut out = Vec::with_capacity(n);
    while let Some(v) = stack.pop() {
        out.push(v);
        for w in g.successors(v) {
            if w != v {
                indeg[w] -= 1;
                if indeg[w] == 0 {
                    stack.push(w);
                }
            }
        }
    }
    out
}

/// K-theory of a staged graph at truncation depth 0, the coordinates used
/// by staged certificates.
pub fn stage_zero_k_groups(s: &StagedGraph) -> Result<KPair, KtheoryError> {
    Ok(k_groups(&s.truncate(0)?))
}

pub fn kernel_of(m: &IntMatrix) -> Vec<Vec<BigInt>> {
    kernel_basis(m)
}
