//! The scale pulled back to the ideal group, and staged AF graphs realizing
//! it.

use num_bigint::BigInt;
use num_traits::One;

use super::SynthError;
use crate::graphs::{Graph, StagedGraph, StationaryBlock, Tail, TailDirection};
use crate::ktheory::{is_primitive, ConeCert, ScaleCert, Tri};
use crate::sixterm::{Invariant, InvariantKind};
use crate::zlin::{format_vector, FgAbelianGroup};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InducedScale {
    pub cert: ScaleCert,
    /// whether the pulled-back scale is all of `H₁⁺`
    pub full: Tri,
    pub report: Vec<String>,
}

fn directed(c: &Option<ConeCert>) -> bool {
    matches!(c, Some(ConeCert::Full | ConeCert::Declared(true) | ConeCert::Simplicial | ConeCert::StationaryDG(_)))
}

/// `{h ∈ H₁⁺ : h₂ + ε̃(h) ∈ Σ_{H₂}}` for an augmented invariant.
pub fn induced_scale(inv: &Invariant, h2: &[BigInt], cap: usize) -> Result<InducedScale, SynthError> {
    if inv.kind != InvariantKind::Augmented {
        return Err(SynthError::Malformed("induced scale needs an augmented invariant".into()));
    }
    let g = inv.group("H2");
    if h2.len() != g.ngens() {
        return Err(SynthError::BadBasePoint("wrong number of coordinates".into()));
    }
    let h2 = g.reduce_coords(h2);
    match inv.gamma_t_value(&h2) {
        Some(t) if t.is_one() => {}
        Some(t) => return Err(SynthError::BadBasePoint(format!("gamma_t(h2) = {t}, expected 1"))),
        None => return Err(SynthError::BadBasePoint("H3 is not Z".into())),
    }
    let mut report = Vec::new();
    match inv.scale_contains("H2", &h2, cap) {
        Tri::No => return Err(SynthError::BadBasePoint(format!("{} is not in the scale of H2", format_vector(&h2)))),
        Tri::Unknown => report.push("h2 in scale of H2: undecided, assumed".to_string()),
        Tri::Yes => report.push("h2 in scale of H2: yes".to_string()),
    }
    let cert = ScaleCert::Induced { base: h2.clone() };
    let h1_cone = &inv.node("H1").cone;
    let h1 = inv.group("H1");
    let full = if h1.is_trivial() {
        Tri::Yes
    } else {
        match &inv.node("H2").scale {
            Some(ScaleCert::Full) => Tri::Yes,
            Some(ScaleCert::Shifted { base, sub }) if **sub == ScaleCert::Full => {
                let lex = inv.node("H2").cone == Some(ConeCert::Lexicographic);
                match inv.gamma_t_value(base) {
                    Some(t) if lex && t >= BigInt::one() && directed(h1_cone) => Tri::Yes,
                    _ => Tri::Unknown,
                }
            }
            Some(ScaleCert::OrbitOf { seed, matrix }) => orbit_unbounded(inv, &h2, seed, matrix, cap),
            _ => Tri::Unknown,
        }
    };
    report.push(format!("contains 0: {}", tri_word(inv.scale_contains_induced(&h2, &h1.zero(), cap))));
    match full {
        Tri::Yes => {
            report.push("generating, hereditary, upward directed: yes (all of the positive cone)".into());
            let unbounded = matches!(h1_cone, Some(ConeCert::Simplicial | ConeCert::StationaryDG(_) | ConeCert::Full));
            report.push(format!("no largest element: {}", if unbounded { "yes" } else { "undecided" }));
        }
        _ => report.push("structure of the pulled-back scale: undecided".into()),
    }
    Ok(InducedScale { cert, full, report })
}

fn tri_word(t: Tri) -> &'static str {
    match t {
        Tri::Yes => "yes",
        Tri::No => "no",
        Tri::Unknown => "undecided",
    }
}

impl Invariant {
    /// Membership in `{h ∈ H₁⁺ : base + ε̃(h) ∈ Σ_{H₂}}`.
    pub fn scale_contains_induced(&self, base: &[BigInt], h: &[BigInt], cap: usize) -> Tri {
        let up = self.group("H2").add(base, &self.hom("eps_t").apply(h));
        self.cone_contains("H1", h, cap).and(self.scale_contains("H2", &up, cap))
    }
}

/// For `H₁ = Z` with the standard order, an orbit scale on `H₂` pulls back to
/// all of `H₁⁺` iff the orbit's elements at height one reach arbitrarily far
/// along `ε̃`. At height one the orbit moves by an affine map of `Z`, so two
/// consecutive strict increases settle it.
fn orbit_unbounded(
    inv: &Invariant,
    h2: &[BigInt],
    seed: &[BigInt],
    matrix: &crate::zlin::IntMatrix,
    cap: usize,
) -> Tri {
    let h1 = inv.group("H1");
    if h1.ngens() != 1 || !h1.is_free() || !matches!(inv.node("H1").cone, Some(ConeCert::Simplicial)) {
        return Tri::Unknown;
    }
    let g = inv.group("H2");
    let eps = inv.hom("eps_t");
    let mut o = g.reduce_coords(seed);
    let mut heights: Vec<BigInt> = Vec::new();
    for _ in 0..=cap {
        match inv.gamma_t_value(&o) {
            Some(t) if t > BigInt::one() => return Tri::Yes,
            Some(t) if t.is_one() => match eps.preimage(&g.sub(&o, h2)) {
                Some(p) => heights.push(p[0].clone()),
                None => return Tri::Unknown,
            },
            _ => heights.clear(),
        }
        if let [.., a, b, c] = heights.as_slice() {
            if a < b && b < c {
                return Tri::Yes;
            }
        }
        o = g.reduce_coords(&matrix.mul_vec(&o));
    }
    Tri::Unknown
}

/// Staged AF graph with the given ideal group, order certificate and scale;
/// vertices of the core are named `{prefix}0, {prefix}1, ...`.
pub fn realize_af_scaled(h1: &FgAbelianGroup, cone: &ConeCert, scale: &ScaleCert) -> Result<StagedGraph, SynthError> {
    realize_af_named(h1, cone, scale, "i")
}

pub(crate) fn realize_af_named(
    h1: &FgAbelianGroup,
    cone: &ConeCert,
    scale: &ScaleCert,
    prefix: &str,
) -> Result<StagedGraph, SynthError> {
    if *scale != ScaleCert::Full {
        return Err(SynthError::UnsupportedCertificate(format!("only the full scale is realized, got {scale}")));
    }
    if !h1.is_free() || h1.free_rank() == 0 {
        return Err(SynthError::UnsupportedCertificate(format!("{} is not a nonzero free group", h1.describe())));
    }
    let m = h1.free_rank();
    let mut core = Graph::new();
    for i in 0..m {
        core.add_vertex(&format!("{prefix}{i}")).map_err(|e| SynthError::ConstructionFailed(e.to_string()))?;
    }
    let mut s = StagedGraph::from_graph(core);
    match cone {
        ConeCert::Simplicial => {
            s.tails = (0..m).map(|attach| Tail { attach, direction: TailDirection::In }).collect();
        }
        ConeCert::StationaryDG(a) => {
            if a.shape() != (m, m) || !is_primitive(a) {
                return Err(SynthError::UnsupportedCertificate(format!(
                    "stationary matrix {a} is not primitive of size {m}"
                )));
            }
            if a.entries().iter().any(|x| x.sign() == num_bigint::Sign::Minus) {
                return Err(SynthError::UnsupportedCertificate("stationary matrix has negative entries".into()));
            }
            s.blocks.push(StationaryBlock { matrix: a.clone(), level0: (0..m).collect() });
        }
        other => return Err(SynthError::UnsupportedCertificate(format!("no AF realization for cone {other}"))),
    }
    Ok(s)
}
