//! From an augmented invariant to a staged graph with one ideal realizing it.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::af::{induced_scale, realize_af_named};
use super::glue::{glue, GlueProblem};
use super::pi::{realize_pi_named, PiRealization};
use super::SynthError;
use crate::extension::{check_synthesis_hypotheses, Status};
use crate::graphs::{Graph, Mult, StagedGraph, Tail, TailDirection, VertexSet};
use crate::ktheory::{k_groups, ConeCert, ScaleCert, Tri, DEFAULT_CAP};
use crate::sixterm::{
    augmented_from_graph, augmented_from_staged, iso_verify, CheckStatus, Invariant, InvariantKind, IsoCertificate,
    IsoReport,
};
use crate::zlin::{format_vector, solve, Element, FgAbelianGroup, GroupHom, IntMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SynthOptions {
    pub cap: usize,
    /// recorded in the log; the construction itself is deterministic
    pub seed: u64,
}

impl Default for SynthOptions {
    fn default() -> Self {
        SynthOptions { cap: DEFAULT_CAP, seed: 0 }
    }
}

#[derive(Debug, Clone)]
pub struct SynthesisResult {
    pub graph: StagedGraph,
    pub ideal: VertexSet,
    /// from the recomputed invariant to the requested one
    pub certificate: IsoCertificate,
    pub recomputed: Invariant,
    pub report: IsoReport,
    /// vertices of the quotient part, in core order
    pub quotient: Vec<usize>,
    pub log: Vec<String>,
}

pub fn synthesize(a: &Invariant) -> Result<SynthesisResult, SynthError> {
    synthesize_with(a, &SynthOptions::default())
}

fn cf(e: impl std::fmt::Display) -> SynthError {
    SynthError::ConstructionFailed(e.to_string())
}

struct IdealPart {
    graph: Graph,
    staged_tails: Vec<Tail>,
    block: Option<IntMatrix>,
    /// ambient `Z^{n₁}` to `H₁`
    to_h1: IntMatrix,
}

fn realize_ideal(a: &Invariant, log: &mut Vec<String>) -> Result<IdealPart, SynthError> {
    let h1 = a.group("H1");
    let cone = a.node("H1").cone.clone().ok_or_else(|| SynthError::UnsupportedCertificate("H1 has no cone".into()))?;
    let unitality = a.unitality.unwrap_or(1);
    match cone {
        ConeCert::Full | ConeCert::Declared(true) => {
            log.push(format!("ideal: purely infinite block for {}", h1.describe()));
            let r: PiRealization = realize_pi_named(h1, &h1.zero(), 0, "i")?;
            let staged_tails =
                if unitality == 1 { vec![Tail { attach: 0, direction: TailDirection::In }] } else { Vec::new() };
            Ok(IdealPart { graph: r.graph, staged_tails, block: None, to_h1: r.alpha })
        }
        ConeCert::Simplicial | ConeCert::StationaryDG(_) => {
            if unitality != 1 {
                return Err(SynthError::UnsupportedCertificate(
                    "an AF ideal with unital extension is not realized".into(),
                ));
            }
            let s = realize_af_named(h1, &cone, &ScaleCert::Full, "i")?;
            log.push(format!("ideal: staged AF part with cone {cone}"));
            let n = s.core.vertex_count();
            Ok(IdealPart {
                graph: s.core,
                staged_tails: s.tails,
                block: s.blocks.first().map(|b| b.matrix.clone()),
                to_h1: IntMatrix::identity(n),
            })
        }
        other => Err(SynthError::UnsupportedCertificate(format!("no realization for an ideal with cone {other}"))),
    }
}

pub fn synthesize_with(a: &Invariant, opts: &SynthOptions) -> Result<SynthesisResult, SynthError> {
    let cap = opts.cap;
    if a.kind != InvariantKind::Augmented {
        return Err(SynthError::Malformed("synthesis needs an augmented invariant".into()));
    }
    if let Some(n) = a.nodes.iter().find(|n| n.nfg.is_some()) {
        return Err(SynthError::UnsupportedCertificate(format!("{} is not finitely generated", n.name)));
    }
    let mut log = vec![format!("seed {}", opts.seed)];
    let hyp = check_synthesis_hypotheses(a, cap)?;
    let fails = hyp.failing();
    if !fails.is_empty() {
        return Err(SynthError::HypothesisFailure(fails.join(" ")));
    }
    for item in hyp.items.iter().filter(|i| i.status == Status::Inconclusive) {
        log.push(format!("assumed {}: {}", item.name, item.explanation));
    }
    if !matches!(a.unitality, Some(1 | 2)) {
        return Err(SynthError::UnsupportedCertificate("the quotient must be unital".into()));
    }

    // (1) base point and the ideal
    let h2_t = a.element("h2").ok_or_else(|| SynthError::BadBasePoint("no element h2".into()))?.clone();
    let induced = induced_scale(a, &h2_t, cap)?;
    log.extend(induced.report.iter().map(|l| format!("induced scale: {l}")));
    if induced.full != Tri::Yes {
        return Err(SynthError::UnsupportedCertificate("the pulled-back scale is not known to be full".into()));
    }
    let ideal = realize_ideal(a, &mut log)?;
    let n1 = ideal.graph.vertex_count();
    let (g1, g2, g3) = (a.group("G1"), a.group("G2"), a.group("G3"));
    let t1 = a.hom("eta1").matrix().mul(&ideal.to_h1);
    let t1_cols: Vec<Element> = t1.columns().iter().map(|c| g1.reduce_coords(c)).collect();
    let lift1 = |x: &[BigInt]| -> Result<Vec<BigInt>, SynthError> {
        g1.express_in(&t1_cols, x).ok_or_else(|| cf("ideal realization does not reach G1"))
    };

    // (2) the quotient
    let g2_t = a.hom("eta2").apply(&h2_t);
    let g3_t = a.hom("gamma").apply(&g2_t);
    let f3 = a.group("F3");
    let quot = realize_pi_named(g3, &g3_t, f3.free_rank(), "q")?;
    log.push(format!("quotient: {} vertices, unit {}", quot.graph.vertex_count(), format_vector(&g3_t)));
    let b = quot.kmap.clone();
    let (n3, n3p) = b.shape();
    let kq = k_groups(&quot.graph);

    // (3) initial connecting block making the map to G2 well defined
    let gamma = a.hom("gamma");
    let eps = a.hom("eps");
    let s: Vec<Element> = (0..n3)
        .map(|j| {
            let img = g3.reduce_coords(&quot.alpha.column(j));
            gamma.preimage(&img).ok_or_else(|| SynthError::HypothesisFailure("gamma is not onto G3".into()))
        })
        .collect::<Result<_, _>>()?;
    let mut y = IntMatrix::zeros(n1, n3p);
    for k in 0..n3p {
        let mut w = g2.zero();
        for (j, sj) in s.iter().enumerate() {
            w = g2.add(&w, &g2.scale(&b[(j, k)], sj));
        }
        let t = eps
            .preimage(&w)
            .ok_or_else(|| SynthError::HypothesisFailure("im gamma-lift relation not in im eps".into()))?;
        let col = lift1(&g1.neg(&t))?;
        for r in 0..n1 {
            y[(r, k)] = col[r].clone();
        }
    }
    // match the index map on the kernel basis of B
    let delta1 = a.hom("delta1");
    let f = kq.k1_basis.len();
    if f > 0 {
        let basis = IntMatrix::from_columns(n3p, &kq.k1_basis);
        let mut r_cols = Vec::with_capacity(f);
        for (m, bm) in kq.k1_basis.iter().enumerate() {
            let current = g1.class_of(&t1.mul_vec(&y.mul_vec(bm)));
            let want = delta1.apply(&f3.generator(m));
            r_cols.push(lift1(&g1.sub(&want, &current))?);
        }
        let r = IntMatrix::from_columns(n1, &r_cols);
        let bt = basis.transpose();
        let mut left_rows = Vec::with_capacity(f);
        for m in 0..f {
            let e: Vec<BigInt> = (0..f).map(|i| if i == m { BigInt::one() } else { BigInt::zero() }).collect();
            left_rows.push(solve(&bt, &e).ok_or_else(|| cf("kernel basis is not saturated"))?);
        }
        let left = IntMatrix::from_columns(n3p, &left_rows).transpose();
        y = y.add(&r.mul(&left));
    }

    let mut pi2_cols: Vec<Vec<BigInt>> = t1_cols.iter().map(|c| eps.apply(c)).collect();
    pi2_cols.extend(s.iter().cloned());
    let problem = GlueProblem {
        a: k_groups(&ideal.graph).kmap,
        b: b.clone(),
        y,
        z: IntMatrix::from_fn(n1, n3p, |_, _| BigInt::one()),
        x: vec![BigInt::zero(); n1],
        dominance: quot.dominance,
        g2: g2.clone(),
        pi2: IntMatrix::from_columns(g2.ngens(), &pi2_cols),
        target_g2: g2_t.clone(),
    };
    let glued = glue(&problem)?;
    log.extend(glued.log.iter().map(|l| format!("glue: {l}")));

    // (4) assemble
    let mut core = Graph::new();
    for name in ideal.graph.names().iter().chain(quot.graph.names()) {
        core.add_vertex(name).map_err(cf)?;
    }
    for v in 0..n1 {
        for w in 0..n1 {
            core.set_mult(v, w, ideal.graph.mult(v, w));
        }
    }
    for v in 0..n3 {
        for w in 0..n3 {
            core.set_mult(n1 + v, n1 + w, quot.graph.mult(v, w));
        }
    }
    let regular = quot.graph.regular_vertices();
    for v in 0..n3 {
        let col = regular.iter().position(|&r| r == v);
        for i in 0..n1 {
            let m = match col {
                Some(k) => Mult::Finite(glued.y_prime[(i, k)].clone().try_into().map_err(|_| cf("edge count"))?),
                None => Mult::Finite(1),
            };
            core.set_mult(n1 + v, i, m);
        }
    }
    let mut staged = StagedGraph::from_graph(core.clone());
    staged.tails = ideal.staged_tails.clone();
    if let Some(m) = &ideal.block {
        staged.blocks.push(crate::graphs::StationaryBlock { matrix: m.clone(), level0: (0..n1).collect() });
    }
    let total = n1 + n3;
    let hset = VertexSet::from_indices(total, &(0..n1).collect::<Vec<_>>());
    let rec =
        if staged.is_finite() { augmented_from_graph(&core, &hset)? } else { augmented_from_staged(&staged, &hset)? };

    // (5) certificate from the recomputed invariant to the requested one
    let mut cert = IsoCertificate::default();
    let hom = |src: &FgAbelianGroup, tgt: &FgAbelianGroup, m: &IntMatrix| {
        GroupHom::from_images(src.clone(), tgt.clone(), m).map_err(cf)
    };
    let alpha1 = hom(rec.group("G1"), g1, &t1)?;
    let alpha2 = hom(rec.group("G2"), g2, &glued.pi2_prime)?;
    let alpha3 = hom(rec.group("G3"), g3, &quot.alpha)?;
    let kq_rec = k_groups(&core.induced_subgraph(&(n1..total).collect::<Vec<_>>()));
    let basis = IntMatrix::from_columns(n3p, &kq.k1_basis);
    let beta3_cols: Vec<Vec<BigInt>> = kq_rec
        .k1_basis
        .iter()
        .map(|v| solve(&basis, v).ok_or_else(|| cf("kernel bases disagree")))
        .collect::<Result<_, _>>()?;
    let beta3 = GroupHom::new(rec.group("F3").clone(), f3.clone(), IntMatrix::from_columns(f3.ngens(), &beta3_cols))
        .map_err(cf)?;
    let g1_rec = rec.hom("gamma1");
    let f2 = a.group("F2");
    let beta2_cols: Vec<Vec<BigInt>> = (0..rec.group("F2").ngens())
        .map(|i| {
            let v = beta3.apply(&g1_rec.apply(&rec.group("F2").generator(i)));
            a.hom("gamma1").preimage(&v).ok_or_else(|| cf("F2 image outside gamma1"))
        })
        .collect::<Result<_, _>>()?;
    let beta2 = IntMatrix::from_columns(f2.ngens(), &beta2_cols);
    if !rec.group("F1").is_trivial() || !a.group("F1").is_trivial() {
        return Err(cf("F1 is not zero"));
    }
    let eta1_t_inv =
        a.hom("eta1").inverse().ok_or_else(|| SynthError::HypothesisFailure("eta1 is not invertible".into()))?;
    let at1 = eta1_t_inv.after(&alpha1.after(rec.hom("eta1")).map_err(cf)?).map_err(cf)?;
    let (h2r_g, h2t_g) = (rec.group("H2"), a.group("H2"));
    let h2_r = rec.element("h2").ok_or_else(|| cf("recomputed invariant has no h2"))?.clone();
    let mut at2_cols = Vec::new();
    for i in 0..h2r_g.ngens() {
        let gen = h2r_g.generator(i);
        let n = rec.gamma_t_value(&gen).ok_or_else(|| cf("recomputed H3 is not Z"))?;
        let rest = h2r_g.sub(&gen, &h2r_g.scale(&n, &h2_r));
        let h = rec.hom("eps_t").preimage(&rest).ok_or_else(|| cf("top row not exact"))?;
        let img = h2t_g.add(&a.hom("eps_t").apply(&at1.apply(&h)), &h2t_g.scale(&n, &h2_t));
        at2_cols.push(img);
    }
    let at3 = a.hom("gamma_t").apply(&h2_t);
    cert.set("H1", at1.matrix().clone());
    cert.set("H2", IntMatrix::from_columns(h2t_g.ngens(), &at2_cols));
    cert.set("H3", IntMatrix::column_vector(&at3));
    cert.set("G1", alpha1.matrix().clone());
    cert.set("G2", alpha2.matrix().clone());
    cert.set("G3", alpha3.matrix().clone());
    cert.set("F1", IntMatrix::zeros(0, 0));
    cert.set("F2", beta2);
    cert.set("F3", beta3.matrix().clone());

    let report = iso_verify(&rec, a, &cert, cap);
    if report.overall() != CheckStatus::Pass {
        return Err(SynthError::VerificationFailed(report.to_string()));
    }
    log.push("round trip: iso_verify passes".into());
    Ok(SynthesisResult {
        graph: staged,
        ideal: hset,
        certificate: cert,
        recomputed: rec,
        report,
        quotient: (n1..total).collect(),
        log,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::targets::{standard_suite, AfIdeal, TargetSpec};

    #[test]
    fn standard_suite_round_trips() {
        for spec in standard_suite() {
            let target = spec.build().unwrap();
            match synthesize(&target) {
                Ok(r) => assert_eq!(r.report.overall(), CheckStatus::Pass),
                Err(e) => panic!("{}: {e}", spec.describe()),
            }
        }
    }

    #[test]
    fn purely_infinite_ideal_round_trips() {
        let g = Graph::parse("v i\nv a\nv b\ne i i 3\ne a a 2\ne b b 2\ne a b 1\ne b a 1\ne a i 1\n").unwrap();
        let h = VertexSet::from_indices(3, &[0]);
        let target = augmented_from_graph(&g, &h).unwrap();
        let r = synthesize(&target).unwrap();
        assert!(r.graph.is_finite());
        assert_eq!(r.report.overall(), CheckStatus::Pass);
    }

    #[test]
    fn nonzero_f1_is_a_hypothesis_failure() {
        let mut t = TargetSpec::new(AfIdeal::Tail, &[], 0).build().unwrap();
        let z = FgAbelianGroup::free(1);
        let i = t.node_index("F1").unwrap();
        t.nodes[i].group = z;
        for (name, rows, cols) in [("delta0", 1, 0), ("eps1", 0, 1)] {
            t.edges.iter_mut().find(|e| e.name == name).unwrap().hom =
                GroupHom::zero(&FgAbelianGroup::free(cols), &FgAbelianGroup::free(rows));
        }
        match synthesize(&t) {
            Err(SynthError::HypothesisFailure(items)) => assert!(items.contains("(viii)"), "{items}"),
            other => panic!("{other:?}"),
        }
    }
}
