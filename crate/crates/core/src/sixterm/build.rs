use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::{verify_exactness, verify_top_row, Invariant, InvariantKind, SixtermError};
use crate::graphs::{classify_simple, hs_closure, Graph, Simplicity, StagedGraph, StationaryBlock, Tail, VertexSet};
use crate::ktheory::{cone_certificate, ideal_scale, k_groups, staged_cone_certificate, ConeCert, KPair, ScaleCert};
use crate::zlin::{induced_hom, solve, FgAbelianGroup, IntMatrix};

/// Graph data of a one-ideal extension with the ideal's vertices first.
struct Pieces {
    /// the graph with vertices reordered as `H` then `E⁰ ∖ H`
    graph: Graph,
    nh: usize,
    ideal: KPair,
    whole: KPair,
    quotient: KPair,
    y: IntMatrix,
    ideal_graph: Graph,
    quotient_graph: Graph,
}

fn not_one(msg: impl Into<String>) -> SixtermError {
    SixtermError::NotOneIdeal(msg.into())
}

fn pieces(g: &Graph, h: &VertexSet, check_lattice: bool) -> Result<Pieces, SixtermError> {
    if h.universe() != g.vertex_count() {
        return Err(not_one("vertex set has the wrong size"));
    }
    if h.is_empty() || h.is_full() {
        return Err(not_one("the ideal's vertex set must be nonempty and proper"));
    }
    if !h.is_hereditary_saturated(g) {
        return Err(not_one(format!("{{{}}} is not hereditary and saturated", h.names(g).join(","))));
    }
    let breaking = h.breaking_vertices(g);
    if !breaking.is_empty() {
        let names: Vec<&str> = breaking.iter().map(|&v| g.name(v)).collect();
        return Err(not_one(format!("breaking vertices {} give further ideals", names.join(","))));
    }
    if check_lattice {
        // nonempty hereditary saturated sets are unions of single-vertex closures
        for v in 0..g.vertex_count() {
            let c = hs_closure(g, &[v]);
            let expected = if h.contains(v) { h.clone() } else { VertexSet::full(g.vertex_count()) };
            if c != expected {
                return Err(not_one(format!("vertex {} generates the ideal {{{}}}", g.name(v), c.names(g).join(","))));
            }
        }
    }
    let mut order = h.members();
    let nh = order.len();
    order.extend(h.complement().members());
    let graph = g.induced_subgraph(&order);
    let ideal_graph = graph.induced_subgraph(&(0..nh).collect::<Vec<_>>());
    let quotient_graph = graph.induced_subgraph(&(nh..graph.vertex_count()).collect::<Vec<_>>());
    if check_lattice && classify_simple(&ideal_graph) == Simplicity::NotSimple {
        return Err(not_one("the ideal's graph is not simple"));
    }
    if classify_simple(&quotient_graph) == Simplicity::NotSimple {
        return Err(not_one("the quotient graph is not simple"));
    }
    let whole = k_groups(&graph);
    let ideal = k_groups(&ideal_graph);
    let quotient = k_groups(&quotient_graph);
    let ra = ideal.kmap.cols();
    let rb = quotient.kmap.cols();
    if whole.kmap.cols() != ra + rb {
        return Err(SixtermError::ExactnessFailure("regular vertices do not split".into()));
    }
    let y = whole.kmap.submatrix(&(0..nh).collect::<Vec<_>>(), &(ra..ra + rb).collect::<Vec<_>>());
    Ok(Pieces { graph, nh, ideal, whole, quotient, y, ideal_graph, quotient_graph })
}

fn columns_in_basis(basis: &[Vec<BigInt>], dim: usize, vectors: &[Vec<BigInt>]) -> Result<IntMatrix, SixtermError> {
    let b = IntMatrix::from_columns(dim, basis);
    let cols = vectors
        .iter()
        .map(|v| solve(&b, v).ok_or_else(|| SixtermError::ExactnessFailure("kernel vector outside the lattice".into())))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(IntMatrix::from_columns(basis.len(), &cols))
}

fn six_term(p: &Pieces) -> Result<Invariant, SixtermError> {
    let n = p.graph.vertex_count();
    let nh = p.nh;
    let ra = p.ideal.kmap.cols();
    let rb = p.quotient.kmap.cols();
    let incl = IntMatrix::from_fn(n, nh, |i, j| if i == j { BigInt::one() } else { BigInt::zero() });
    let proj = IntMatrix::from_fn(n - nh, n, |i, j| if j == i + nh { BigInt::one() } else { BigInt::zero() });
    let iota0 = induced_hom(&p.ideal.kmap, &p.whole.kmap, &incl)?;
    let pi0 = induced_hom(&p.whole.kmap, &p.quotient.kmap, &proj)?;

    let ext: Vec<Vec<BigInt>> = p
        .ideal
        .k1_basis
        .iter()
        .map(|x| x.iter().cloned().chain(std::iter::repeat_n(BigInt::zero(), rb)).collect())
        .collect();
    let iota1 = columns_in_basis(&p.whole.k1_basis, ra + rb, &ext)?;
    let tails: Vec<Vec<BigInt>> = p.whole.k1_basis.iter().map(|x| x[ra..].to_vec()).collect();
    let pi1 = columns_in_basis(&p.quotient.k1_basis, rb, &tails)?;
    let d1_cols: Vec<Vec<BigInt>> = p.quotient.k1_basis.iter().map(|y| p.ideal.k0.class_of(&p.y.mul_vec(y))).collect();
    let d1 = IntMatrix::from_columns(p.ideal.k0.ngens(), &d1_cols);
    let d0 = IntMatrix::zeros(p.ideal.k1.ngens(), p.quotient.k0.ngens());

    let groups = vec![
        p.ideal.k0.clone(),
        p.whole.k0.clone(),
        p.quotient.k0.clone(),
        p.ideal.k1.clone(),
        p.whole.k1.clone(),
        p.quotient.k1.clone(),
    ];
    let maps = vec![iota0.matrix().clone(), pi0.matrix().clone(), d0, iota1, pi1, d1];
    let mut inv = Invariant::from_parts(InvariantKind::SixTerm, groups, maps)?;
    let unit_a = p.whole.unit_class.clone().expect("finite graph has a unit");
    let unit_q = p.quotient.unit_class.clone().expect("finite graph has a unit");
    inv.set_element("unitA", "K0A", unit_a);
    inv.set_element("unitQ", "K0Q", unit_q.clone());
    let quotient_cone = cone_certificate(&p.quotient_graph)?;
    inv.node_mut("K0Q").scale = Some(ScaleCert::Unit(unit_q));
    inv.node_mut("K0A").cone = Some(middle_cone(&quotient_cone));
    inv.node_mut("K0Q").cone = Some(quotient_cone);
    inv.unitality = Some(2);
    Ok(inv)
}

/// Graph algebras satisfy "full quotient cone forces a full middle cone";
/// with an AF quotient the middle cone is proper.
fn middle_cone(quotient: &ConeCert) -> ConeCert {
    match quotient {
        ConeCert::Full => ConeCert::Full,
        _ => ConeCert::Declared(false),
    }
}

fn check_exact(inv: &Invariant) -> Result<(), SixtermError> {
    let report = verify_exactness(inv);
    if !report.passed() {
        return Err(SixtermError::ExactnessFailure(format!("fails at {}", report.failing.join(", "))));
    }
    Ok(())
}

/// Six-term invariant of the extension given by the ideal of `h` in `C*(g)`.
pub fn ksix_from_graph(g: &Graph, h: &VertexSet) -> Result<Invariant, SixtermError> {
    let p = pieces(g, h, true)?;
    let mut inv = six_term(&p)?;
    let ideal_cone = cone_certificate(&p.ideal_graph)?;
    let hh = VertexSet::from_indices(p.graph.vertex_count(), &(0..p.nh).collect::<Vec<_>>());
    inv.node_mut("K0I").scale = Some(ideal_scale(&p.graph, &hh, &p.ideal, &ideal_cone));
    inv.node_mut("K0I").cone = Some(ideal_cone);
    check_exact(&inv)?;
    Ok(inv)
}

/// Augmented invariant with `H₂ = K₀(I) ⊕ Z·[p]`, `p` the sum of the
/// quotient's vertex projections.
fn augment(p: &Pieces, six: &Invariant) -> Result<Invariant, SixtermError> {
    let h1 = six.group("K0I").clone();
    let h2 = FgAbelianGroup::canonical(h1.torsion(), h1.free_rank() + 1)?;
    let h3 = FgAbelianGroup::free(1);
    let k = h1.ngens();
    let eps_t = IntMatrix::from_fn(k + 1, k, |i, j| if i == j { BigInt::one() } else { BigInt::zero() });
    let gamma_t = IntMatrix::from_fn(1, k + 1, |_, j| if j == k { BigInt::one() } else { BigInt::zero() });
    let n = p.graph.vertex_count();
    let p_ambient: Vec<BigInt> = (0..n).map(|v| if v >= p.nh { BigInt::one() } else { BigInt::zero() }).collect();
    let g2 = p.whole.k0.class_of(&p_ambient);
    let iota0 = six.hom("iota0").matrix();
    let eta2 = iota0.hstack(&IntMatrix::column_vector(&g2));
    let unit_q = six.element("unitQ").cloned().expect("quotient unit");
    let eta3 = IntMatrix::column_vector(&unit_q);
    let groups = vec![
        h1.clone(),
        h2,
        h3,
        six.group("K0I").clone(),
        six.group("K0A").clone(),
        six.group("K0Q").clone(),
        six.group("K1I").clone(),
        six.group("K1A").clone(),
        six.group("K1Q").clone(),
    ];
    let maps = vec![
        eps_t,
        gamma_t,
        IntMatrix::identity(k),
        eta2,
        eta3,
        iota0.clone(),
        six.hom("pi0").matrix().clone(),
        six.hom("d0").matrix().clone(),
        six.hom("iota1").matrix().clone(),
        six.hom("pi1").matrix().clone(),
        six.hom("d1").matrix().clone(),
    ];
    let mut inv = Invariant::from_parts(InvariantKind::Augmented, groups, maps)?;
    let mut h2_elem = vec![BigInt::zero(); k + 1];
    h2_elem[k] = BigInt::one();
    let ideal = six.node("K0I");
    inv.node_mut("H1").cone = ideal.cone.clone();
    inv.node_mut("H1").scale = ideal.scale.clone();
    inv.node_mut("G1").cone = ideal.cone.clone();
    inv.node_mut("G1").scale = ideal.scale.clone();
    inv.node_mut("H2").cone = Some(ConeCert::Lexicographic);
    inv.node_mut("H2").scale = Some(ScaleCert::Shifted {
        base: h2_elem.clone(),
        sub: Box::new(ideal.scale.clone().unwrap_or(ScaleCert::Full)),
    });
    inv.node_mut("H3").cone = Some(ConeCert::Simplicial);
    inv.node_mut("H3").scale = Some(ScaleCert::Unit(vec![BigInt::one()]));
    inv.node_mut("G2").cone = six.node("K0A").cone.clone();
    inv.node_mut("G3").cone = six.node("K0Q").cone.clone();
    inv.node_mut("G3").scale = six.node("K0Q").scale.clone();
    inv.set_element("h2", "H2", h2_elem);
    inv.set_element("g2", "G2", g2);
    inv.set_element("g3", "G3", unit_q);
    inv.unitality = six.unitality;
    check_exact(&inv)?;
    let top = verify_top_row(&inv);
    if !top.passed() {
        return Err(SixtermError::ExactnessFailure(format!("top row fails at {}", top.failing.join(", "))));
    }
    Ok(inv)
}

/// Augmented invariant of a finite graph with one ideal.
pub fn augmented_from_graph(g: &Graph, h: &VertexSet) -> Result<Invariant, SixtermError> {
    let six = ksix_from_graph(g, h)?;
    let p = pieces(g, h, true)?;
    augment(&p, &six)
}

/// Augmented invariant of a staged graph whose infinite parts all belong to
/// the ideal `h` (a set of core vertices). Groups are computed at truncation
/// depth 0; the ideal's order comes from the staged certificate and its
/// scale is the full cone (the infinite parts make the ideal stable).
pub fn augmented_from_staged(s: &StagedGraph, h: &VertexSet) -> Result<Invariant, SixtermError> {
    if h.universe() != s.core.vertex_count() {
        return Err(not_one("vertex set has the wrong size"));
    }
    let attached: Vec<usize> =
        s.tails.iter().map(|t| t.attach).chain(s.blocks.iter().flat_map(|b| b.level0.iter().copied())).collect();
    if attached.iter().any(|&v| !h.contains(v)) {
        return Err(not_one("every tail and stationary block must attach inside the ideal"));
    }
    let g0 = s.truncate(0)?;
    let p = pieces(&g0, h, false)?;
    if classify_simple(&p.quotient_graph) != Simplicity::SimplePurelyInfinite
        && classify_simple(&p.quotient_graph) != Simplicity::SimpleAF
    {
        return Err(not_one("the quotient graph is not simple"));
    }
    // every quotient vertex must reach the ideal, or the quotient would be a
    // complemented summand
    let reach_ideal = (p.nh..g0.vertex_count()).all(|v| {
        let r = p.graph.reachable_from(&[v]);
        (0..p.nh).any(|w| r[w])
    });
    if !reach_ideal {
        return Err(not_one("some quotient vertex does not reach the ideal"));
    }
    let ideal_part = ideal_staged(s, h);
    let ideal_cone = staged_cone_certificate(&ideal_part)?;
    let mut six = six_term(&p)?;
    six.node_mut("K0I").cone = Some(ideal_cone);
    six.node_mut("K0I").scale = Some(ScaleCert::Full);
    six.unitality = Some(1);
    check_exact(&six)?;
    augment(&p, &six)
}

/// The ideal's own staged graph: core restricted to `h` with the infinite
/// parts carried over.
fn ideal_staged(s: &StagedGraph, h: &VertexSet) -> StagedGraph {
    let members = h.members();
    let core = s.core.induced_subgraph(&members);
    let map = |v: usize| members.iter().position(|&m| m == v).expect("attached inside the ideal");
    StagedGraph {
        core,
        tails: s.tails.iter().map(|t| Tail { attach: map(t.attach), direction: t.direction }).collect(),
        blocks: s
            .blocks
            .iter()
            .map(|b| StationaryBlock { matrix: b.matrix.clone(), level0: b.level0.iter().map(|&v| map(v)).collect() })
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ktheory::Tri;
    use crate::zlin::vec_from_i64;

    /// ideal vertex with three loops, quotient E3, `y` edges from `a` into it
    fn glued(y: u64) -> (Graph, VertexSet) {
        let g =
            Graph::parse(&format!("v i\nv a\nv b\ne i i 3\ne a a 2\ne b b 2\ne a b 1\ne b a 1\ne a i {y}\n")).unwrap();
        (g, VertexSet::from_indices(3, &[0]))
    }

    #[test]
    fn boundary_map_detects_odd_connection() {
        let (g, h) = glued(1);
        let inv = ksix_from_graph(&g, &h).unwrap();
        assert_eq!(inv.group("K0I").describe(), "Z/2");
        assert_eq!(inv.group("K1Q").describe(), "Z");
        assert!(!inv.hom("d1").is_zero());
        assert!(inv.hom("d0").is_zero());
        let (g, h) = glued(2);
        let inv = ksix_from_graph(&g, &h).unwrap();
        assert!(inv.hom("d1").is_zero());
    }

    #[test]
    fn not_one_ideal_inputs() {
        let (g, _) = glued(1);
        assert!(matches!(ksix_from_graph(&g, &VertexSet::from_indices(3, &[1])), Err(SixtermError::NotOneIdeal(_))));
        // two independent ideals below a common quotient
        let g = Graph::parse("v i\nv j\nv a\ne i i 2\ne j j 2\ne a a 2\ne a i 1\ne a j 1\n").unwrap();
        assert!(matches!(ksix_from_graph(&g, &VertexSet::from_indices(3, &[0, 1])), Err(SixtermError::NotOneIdeal(_))));
    }

    #[test]
    fn augmented_top_row_shape() {
        let (g, h) = glued(1);
        let inv = augmented_from_graph(&g, &h).unwrap();
        assert_eq!(inv.group("H2").describe(), "Z/2 + Z");
        assert_eq!(inv.element("h2").unwrap(), &vec_from_i64(&[0, 1]));
        assert_eq!(inv.hom("gamma_t").apply(&vec_from_i64(&[0, 1])), vec_from_i64(&[1]));
        assert_eq!(inv.group("H3").describe(), "Z");
        assert_eq!(inv.node("H3").scale, Some(ScaleCert::Unit(vec_from_i64(&[1]))));
        assert_eq!(inv.scale_contains("H2", &vec_from_i64(&[1, 1]), 8), Tri::Yes);
        assert_eq!(inv.scale_contains("H2", &vec_from_i64(&[0, 2]), 8), Tri::No);
    }

    #[test]
    fn staged_ideal_with_tail() {
        // K-type ideal: a sink with an infinite backward tail, under O3-type quotient
        let s = StagedGraph::parse("v i0\nv q\ne q q 3\ne q i0 1\ntail i0\n").unwrap();
        let h = VertexSet::from_indices(2, &[0]);
        let inv = augmented_from_staged(&s, &h).unwrap();
        assert_eq!(inv.group("H1").describe(), "Z");
        assert_eq!(inv.node("H1").cone, Some(ConeCert::Simplicial));
        assert_eq!(inv.unitality, Some(1));
        assert_eq!(inv.scale_contains("H2", &vec_from_i64(&[7, 1]), 8), Tri::Yes);
        assert_eq!(inv.scale_contains("H2", &vec_from_i64(&[7, 0]), 8), Tri::Yes);
        assert_eq!(inv.scale_contains("H2", &vec_from_i64(&[-1, 0]), 8), Tri::No);
    }
}
