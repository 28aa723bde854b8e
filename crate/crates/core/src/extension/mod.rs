//! Decision procedures for when a one-ideal extension of simple graph
//! algebras is again a graph algebra, and the hypotheses of the range
//! result for the augmented invariant.

use std::fmt;
use std::fmt::Write as _;

use num_traits::One;

use crate::ktheory::{is_primitive, ConeCert, ScaleCert, Tri};
use crate::sixterm::{DeclaredRank, Invariant, InvariantKind, Node, SixtermError};
use crate::zlin::{Element, GroupHom};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExtensionError {
    #[error("inconsistent data: {0}")]
    InconsistentData(String),
    #[error("hypotheses not met: {0}")]
    HypothesesNotMet(String),
    #[error(transparent)]
    Sixterm(#[from] SixtermError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    /// the condition does not apply to this input
    Vacuous,
    Inconclusive,
}

impl Status {
    fn from_tri(t: Tri) -> Status {
        match t {
            Tri::Yes => Status::Pass,
            Tri::No => Status::Fail,
            Tri::Unknown => Status::Inconclusive,
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Vacuous => "VACUOUS",
            Status::Inconclusive => "INCONCLUSIVE",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Item {
    pub name: String,
    pub status: Status,
    pub explanation: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Verdict {
    pub items: Vec<Item>,
    /// input flags the verdict relies on without checking them
    pub assumptions: Vec<String>,
}

impl Verdict {
    fn push(&mut self, name: &str, status: Status, explanation: impl Into<String>) {
        self.items.push(Item { name: name.to_string(), status, explanation: explanation.into() });
    }

    /// `Fail` if any item fails, else `Inconclusive` if any item is, else
    /// `Pass` (vacuous items do not count against the verdict).
    pub fn overall(&self) -> Status {
        if self.items.iter().any(|i| i.status == Status::Fail) {
            Status::Fail
        } else if self.items.iter().any(|i| i.status == Status::Inconclusive) {
            Status::Inconclusive
        } else {
            Status::Pass
        }
    }

    pub fn failing(&self) -> Vec<&str> {
        self.items.iter().filter(|i| i.status == Status::Fail).map(|i| i.name.as_str()).collect()
    }

    pub fn item(&self, name: &str) -> Option<&Item> {
        self.items.iter().find(|i| i.name == name)
    }

    pub fn status_of(&self, name: &str) -> Option<Status> {
        self.item(name).map(|i| i.status)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for i in &self.items {
            let _ = writeln!(s, "{:<7} {:<12} {}", i.name, i.status, i.explanation);
        }
        for a in &self.assumptions {
            let _ = writeln!(s, "assume  {a}");
        }
        let fails = self.failing();
        if fails.is_empty() {
            let _ = writeln!(s, "overall {}", self.overall());
        } else {
            let _ = writeln!(s, "overall {} (fails {})", self.overall(), fails.join(" "));
        }
        s
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// AF or purely infinite (Kirchberg), the two possibilities for a simple
/// graph algebra.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PieceType {
    Af,
    Kirchberg,
}

impl PieceType {
    fn tag(self) -> &'static str {
        match self {
            PieceType::Af => "1",
            PieceType::Kirchberg => "inf",
        }
    }

    fn parse(s: &str) -> Option<PieceType> {
        match s {
            "1" | "af" | "AF" => Some(PieceType::Af),
            "inf" | "kirchberg" | "∞" => Some(PieceType::Kirchberg),
            _ => None,
        }
    }
}

/// A six-term invariant together with the case it belongs to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtensionData {
    pub invariant: Invariant,
    pub unitality: u8,
    pub ideal: Option<PieceType>,
    pub quotient: Option<PieceType>,
}

fn fullness(n: &Node) -> Tri {
    match (&n.cone, n.nfg) {
        // the placeholder group of an nfg node is trivial; only the flag counts
        (Some(ConeCert::Full | ConeCert::Declared(true)), Some(_)) => Tri::Yes,
        (Some(ConeCert::Declared(false)), Some(_)) => Tri::No,
        (Some(_), Some(_)) => Tri::Unknown,
        (Some(c), None) => c.is_full(&n.group),
        (None, _) => Tri::Unknown,
    }
}

impl ExtensionData {
    pub fn new(
        invariant: Invariant,
        ideal: Option<PieceType>,
        quotient: Option<PieceType>,
    ) -> Result<ExtensionData, ExtensionError> {
        if invariant.kind != InvariantKind::SixTerm {
            return Err(ExtensionError::InconsistentData("expected a six-term invariant".into()));
        }
        invariant.validate()?;
        let unitality = invariant
            .unitality
            .ok_or_else(|| ExtensionError::InconsistentData("unitality case not recorded".into()))?;
        for (node, tag) in [("K0I", ideal), ("K0Q", quotient)] {
            let Some(tag) = tag else { continue };
            let full = fullness(invariant.node(node));
            let clash = match tag {
                PieceType::Kirchberg => full == Tri::No,
                PieceType::Af => full == Tri::Yes && !invariant.group(node).is_trivial(),
            };
            if clash {
                return Err(ExtensionError::InconsistentData(format!(
                    "{node}: tag {} contradicts the cone certificate",
                    tag.tag()
                )));
            }
        }
        Ok(ExtensionData { invariant, unitality, ideal, quotient })
    }

    /// Invariant text with an optional `dichotomy <1|inf> <1|inf>` line.
    pub fn parse(text: &str) -> Result<ExtensionData, ExtensionError> {
        let mut tags = (None, None);
        let mut rest = String::new();
        for (i, line) in text.lines().enumerate() {
            let toks: Vec<&str> = line.split('#').next().unwrap_or("").split_whitespace().collect();
            if toks.first() == Some(&"dichotomy") {
                let bad = || {
                    ExtensionError::Sixterm(SixtermError::Parse {
                        line: i + 1,
                        msg: "expected `dichotomy <1|inf> <1|inf>`".into(),
                    })
                };
                let [_, a, b] = toks.as_slice() else { return Err(bad()) };
                tags = (Some(PieceType::parse(a).ok_or_else(bad)?), Some(PieceType::parse(b).ok_or_else(bad)?));
                rest.push('\n');
            } else {
                rest.push_str(line);
                rest.push('\n');
            }
        }
        ExtensionData::new(Invariant::parse(&rest)?, tags.0, tags.1)
    }

    pub fn to_text(&self) -> String {
        let mut s = self.invariant.to_text();
        if let (Some(a), Some(b)) = (self.ideal, self.quotient) {
            let _ = writeln!(s, "dichotomy {} {}", a.tag(), b.tag());
        }
        s
    }
}

fn rank_text(r: DeclaredRank) -> String {
    match r {
        DeclaredRank::Finite(n) => n.to_string(),
        DeclaredRank::Infinite => "infinite".into(),
    }
}

fn is_integers(n: &Node) -> bool {
    n.nfg.is_none() && n.group.is_free() && n.group.ngens() == 1
}

/// Conditions (1), (2), (3)(a)–(c) for the extension to be a graph algebra.
pub fn check_main_theorem(d: &ExtensionData) -> Verdict {
    let inv = &d.invariant;
    let mut v = Verdict::default();
    let d0 = inv.edge("d0");
    if inv.nodes[d0.from].nfg.is_some() || inv.nodes[d0.to].nfg.is_some() {
        v.push("(1)", Status::Inconclusive, "exponential map involves a group that is not finitely generated");
    } else if d0.hom.is_zero() {
        v.push("(1)", Status::Pass, "exponential map K0(Q) -> K1(I) is zero");
    } else {
        v.push("(1)", Status::Fail, "exponential map K0(Q) -> K1(I) is nonzero");
    }

    let (q, a) = (inv.node("K0Q"), inv.node("K0A"));
    match fullness(q) {
        Tri::No => v.push("(2)", Status::Vacuous, "quotient cone is not full"),
        Tri::Unknown => v.push("(2)", Status::Inconclusive, "fullness of the quotient cone unknown"),
        Tri::Yes => {
            if let Some(ConeCert::Declared(flag)) = &a.cone {
                v.assumptions
                    .push(format!("middle cone declared {} by the input", if *flag { "full" } else { "not full" }));
            }
            match fullness(a) {
                Tri::Yes => v.push("(2)", Status::Pass, "quotient and middle cones are full"),
                Tri::No => v.push("(2)", Status::Fail, "quotient cone is full but the middle cone is not"),
                Tri::Unknown => v.push("(2)", Status::Inconclusive, "fullness of the middle cone unknown"),
            }
        }
    }

    if d.unitality != 2 {
        let why = format!("case {}: the extension is not unital", d.unitality);
        for n in ["(3)(a)", "(3)(b)", "(3)(c)"] {
            v.push(n, Status::Vacuous, why.clone());
        }
        return v;
    }
    let (k0i, k1i) = (inv.node("K0I"), inv.node("K1I"));
    if k0i.nfg.is_some() {
        v.push("(3)(a)", Status::Fail, "K0(I) is not finitely generated");
    } else {
        v.push("(3)(a)", Status::Pass, format!("K0(I) = {}", k0i.group));
    }
    let (r1, r0) = (k1i.rank(), k0i.rank());
    let rank_ok = k1i.nfg.is_none() && r1 <= r0;
    v.push(
        "(3)(b)",
        if rank_ok { Status::Pass } else { Status::Fail },
        format!("rank K1(I) = {} {} rank K0(I) = {}", rank_text(r1), if rank_ok { "<=" } else { ">" }, rank_text(r0)),
    );
    match fullness(k0i) {
        Tri::Yes => v.push("(3)(c)", Status::Vacuous, "K0(I) has full cone"),
        Tri::Unknown => v.push("(3)(c)", Status::Inconclusive, "fullness of the K0(I) cone unknown"),
        Tri::No if is_integers(k0i) => v.push("(3)(c)", Status::Pass, "K0(I) has a proper cone and is Z"),
        Tri::No => v.push("(3)(c)", Status::Fail, format!("K0(I) has a proper cone but is {}, not Z", k0i.group)),
    }
    v
}

/// For a unital extension of simple unital graph algebras with stabilized
/// ideal, the extension is a graph algebra (equivalently, semiprojective)
/// exactly when the exponential map vanishes.
pub fn check_corollary(d: &ExtensionData) -> Result<Verdict, ExtensionError> {
    let inv = &d.invariant;
    if d.unitality != 2 {
        return Err(ExtensionError::HypothesesNotMet(format!(
            "case {}: needs a unital extension of a unital quotient",
            d.unitality
        )));
    }
    let (k0i, k1i, k0q) = (inv.node("K0I"), inv.node("K1I"), inv.node("K0Q"));
    if k0i.nfg.is_some() || k1i.nfg.is_some() || k0q.nfg.is_some() {
        return Err(ExtensionError::HypothesesNotMet(
            "the pieces must be unital graph algebras, whose K-groups are finitely generated".into(),
        ));
    }
    if k1i.rank() > k0i.rank() {
        return Err(ExtensionError::HypothesesNotMet(
            "a unital graph algebra has rank K1 <= rank K0; the ideal is not of this form".into(),
        ));
    }
    if fullness(k0i) == Tri::No && !is_integers(k0i) {
        return Err(ExtensionError::HypothesesNotMet(
            "a simple unital AF graph algebra is a matrix algebra with K0 = Z".into(),
        ));
    }
    let mut v = Verdict::default();
    let zero = inv.hom("d0").is_zero();
    v.push(
        "(c)",
        if zero { Status::Pass } else { Status::Fail },
        if zero {
            "exponential map vanishes; the extension is a graph algebra and semiprojective"
        } else {
            "exponential map is nonzero; the extension is neither a graph algebra nor semiprojective"
        },
    );
    Ok(v)
}

fn standard_cone(n: &Node) -> Option<Vec<Element>> {
    if n.nfg.is_some() || !n.group.is_free() {
        return None;
    }
    match &n.cone {
        Some(ConeCert::Simplicial) => Some((0..n.group.ngens()).map(|i| n.group.generator(i)).collect()),
        Some(ConeCert::StationaryDG(m)) if m.shape() == (1, 1) && n.group.ngens() == 1 => {
            Some(vec![n.group.generator(0)])
        }
        _ => None,
    }
}

/// Whether `f` is an order isomorphism between two nodes of `inv`.
fn order_iso(inv: &Invariant, from: &str, to: &str, f: &GroupHom, cap: usize) -> (Status, String) {
    let Some(finv) = f.inverse() else {
        return (Status::Fail, "not a group isomorphism".into());
    };
    let (a, b) = (inv.node(from), inv.node(to));
    match (fullness(a), fullness(b)) {
        (Tri::Yes, Tri::Yes) => return (Status::Pass, "isomorphism between full cones".into()),
        (Tri::Yes, Tri::No) | (Tri::No, Tri::Yes) => return (Status::Fail, "cone full on one side only".into()),
        _ => {}
    }
    if a.cone.is_some() && a.cone == b.cone && f.same_map(&GroupHom::identity(&a.group)) {
        return (Status::Pass, "identity between equal cone certificates".into());
    }
    if let (Some(ga), Some(gb)) = (standard_cone(a), standard_cone(b)) {
        let fwd = Tri::all(ga.iter().map(|x| inv.cone_contains(to, &f.apply(x), cap)));
        let bwd = Tri::all(gb.iter().map(|y| inv.cone_contains(from, &finv.apply(y), cap)));
        return (Status::from_tri(fwd.and(bwd)), "cone generators correspond".into());
    }
    (Status::Inconclusive, "order comparison not supported for these certificates".into())
}

/// Hypotheses (i)–(ix) of the range result for the augmented invariant.
pub fn check_synthesis_hypotheses(a: &Invariant, cap: usize) -> Result<Verdict, ExtensionError> {
    if a.kind != InvariantKind::Augmented {
        return Err(ExtensionError::InconsistentData("expected an augmented invariant".into()));
    }
    a.validate()?;
    let mut v = Verdict::default();
    let h1 = a.node("H1");

    // (i) simple dimension group with scale equal to the cone
    let (st, why) = match (&h1.cone, &h1.scale) {
        _ if h1.nfg.is_some() => (Status::Inconclusive, "H1 is not finitely generated".to_string()),
        (Some(ConeCert::Simplicial), Some(s)) => {
            if !h1.group.is_free() || h1.group.ngens() != 1 {
                (Status::Fail, format!("simplicial {} is not a simple dimension group", h1.group))
            } else if *s == ScaleCert::Full {
                (Status::Pass, "Z with its usual order and full scale".into())
            } else if matches!(s, ScaleCert::Unit(_) | ScaleCert::BoundedBy(_)) {
                (Status::Fail, "bounded scale is smaller than the cone".into())
            } else {
                (Status::Inconclusive, format!("scale `{s}` not compared with the cone"))
            }
        }
        (Some(ConeCert::StationaryDG(m)), Some(s)) => {
            if !is_primitive(m) || !h1.group.is_free() || h1.group.ngens() != m.rows() {
                (Status::Inconclusive, "stationary certificate is not primitive on a free group".into())
            } else if *s == ScaleCert::Full {
                (Status::Pass, "stationary primitive dimension group with full scale".into())
            } else if matches!(s, ScaleCert::Unit(_) | ScaleCert::BoundedBy(_)) {
                (Status::Fail, "bounded scale is smaller than the cone".into())
            } else {
                (Status::Inconclusive, format!("scale `{s}` not compared with the cone"))
            }
        }
        (Some(ConeCert::Full), _) | (Some(ConeCert::Declared(true)), _) => {
            (Status::Inconclusive, "full cone: H1 is not shown to be a dimension group".into())
        }
        _ => (Status::Inconclusive, "no decidable certificate for H1".into()),
    };
    v.push("(i)", st, why);

    // (ii) lexicographic cone and a scale element over 1
    let h2_elem = a.element("h2").cloned();
    let (st, why) = match (&a.node("H2").cone, &h2_elem) {
        (Some(ConeCert::Lexicographic), Some(h2)) => match a.gamma_t_value(h2) {
            Some(t) if t.is_one() => match a.scale_contains("H2", h2, cap) {
                Tri::Yes => (Status::Pass, "lexicographic cone; h2 is in the scale with gamma(h2) = 1".to_string()),
                Tri::No => (Status::Fail, "h2 is not in the scale of H2".into()),
                Tri::Unknown => (Status::Inconclusive, "scale membership of h2 undecided".into()),
            },
            Some(t) => (Status::Fail, format!("gamma(h2) = {t}, not 1")),
            None => (Status::Fail, "H3 is not Z".into()),
        },
        (Some(ConeCert::Lexicographic), None) => (Status::Inconclusive, "no witness h2 recorded".into()),
        (Some(c), _) => (Status::Inconclusive, format!("cone `{c}` not compared with the lexicographic cone")),
        (None, _) => (Status::Inconclusive, "H2 has no cone certificate".into()),
    };
    v.push("(ii)", st, why);

    // (iii) the scale of H2 is generating, hereditary, directed, without a largest element
    let directed_h1 = matches!(h1.cone, Some(ConeCert::Simplicial | ConeCert::StationaryDG(_)));
    let (st, why) = match &a.node("H2").scale {
        Some(ScaleCert::Shifted { sub, .. }) => match sub.as_ref() {
            ScaleCert::Full if directed_h1 => {
                (Status::Pass, "shifted by the full cone of an unperforated unbounded H1".to_string())
            }
            ScaleCert::Full => (Status::Inconclusive, "largest element undecided for this H1 cone".into()),
            ScaleCert::Unit(_) | ScaleCert::BoundedBy(_) => {
                (Status::Fail, "a bounded shift has a largest element".into())
            }
            ScaleCert::OrbitOf { .. } => (Status::Pass, "orbit certificate has no largest element".into()),
            _ => (Status::Inconclusive, "nested certificate".into()),
        },
        Some(ScaleCert::OrbitOf { .. }) => (Status::Pass, "orbit certificate has no largest element".into()),
        Some(ScaleCert::Full) => (Status::Pass, "full scale".into()),
        Some(ScaleCert::Unit(_) | ScaleCert::BoundedBy(_)) => {
            (Status::Fail, "bounded scale has a largest element or is not directed".into())
        }
        _ => (Status::Inconclusive, "no decidable scale certificate for H2".into()),
    };
    v.push("(iii)", st, why);

    // (iv) (Z, N, {0,1})
    let h3 = a.node("H3");
    let one = crate::zlin::vec_from_i64(&[1]);
    let ok = is_integers(h3)
        && matches!(h3.cone, Some(ConeCert::Simplicial))
        && matches!(&h3.scale, Some(ScaleCert::Unit(u)) if *u == one);
    v.push(
        "(iv)",
        if ok { Status::Pass } else { Status::Fail },
        if ok { "H3 is Z with scale {0,1}" } else { "H3 is not Z with its usual order and scale {0,1}" },
    );

    // (v) eta1 order isomorphism
    let (st, why) = if h1.nfg.is_some() || a.node("G1").nfg.is_some() {
        (Status::Inconclusive, "not finitely generated".to_string())
    } else {
        order_iso(a, "H1", "G1", a.hom("eta1"), cap)
    };
    v.push("(v)", st, why);

    // (vi), (vii)
    let g2 = a.node("G2");
    let st = Status::from_tri(fullness(g2));
    v.push("(vi)", st, format!("cone of G2 {}", full_word(st)));
    let g3 = a.node("G3");
    if g3.nfg.is_some() {
        v.push("(vii)", Status::Fail, "G3 is not finitely generated");
    } else {
        let st = Status::from_tri(fullness(g3));
        v.push("(vii)", st, format!("G3 = {} finitely generated, cone {}", g3.group, full_word(st)));
    }

    // (viii), (ix)
    let f1 = a.node("F1");
    let ok = f1.nfg.is_none() && f1.group.is_trivial();
    v.push("(viii)", if ok { Status::Pass } else { Status::Fail }, format!("F1 = {}", describe(f1)));
    let f3 = a.node("F3");
    let free = f3.nfg.is_none() && f3.group.is_free();
    let rank_ok = f3.rank() <= g3.rank();
    v.push(
        "(ix)",
        if free && rank_ok { Status::Pass } else { Status::Fail },
        format!(
            "F3 = {}{}, rank {} vs rank G3 = {}",
            describe(f3),
            if free { "" } else { " (not free)" },
            rank_text(f3.rank()),
            rank_text(g3.rank())
        ),
    );
    Ok(v)
}

fn full_word(st: Status) -> &'static str {
    match st {
        Status::Pass => "is full",
        Status::Fail => "is not full",
        _ => "undecided",
    }
}

fn describe(n: &Node) -> String {
    match n.nfg {
        Some(r) => format!("not finitely generated (rank {})", rank_text(r)),
        None => n.group.describe(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::{Graph, VertexSet};
    use crate::sixterm::{augmented_from_graph, ksix_from_graph};

    fn glued(y: u64) -> (Graph, VertexSet) {
        let g =
            Graph::parse(&format!("v i\nv a\nv b\ne i i 3\ne a a 2\ne b b 2\ne a b 1\ne b a 1\ne a i {y}\n")).unwrap();
        (g, VertexSet::from_indices(3, &[0]))
    }

    #[test]
    fn graph_derived_extensions_meet_condition_one() {
        let (g, h) = glued(1);
        let d = ExtensionData::new(ksix_from_graph(&g, &h).unwrap(), None, None).unwrap();
        let v = check_main_theorem(&d);
        assert_eq!(v.status_of("(1)"), Some(Status::Pass));
        assert_eq!(v.overall(), Status::Pass, "{v}");
        assert_eq!(check_corollary(&d).unwrap().overall(), Status::Pass);
    }

    #[test]
    fn hypotheses_on_glued_fixture() {
        let (g, h) = glued(1);
        let inv = augmented_from_graph(&g, &h).unwrap();
        let v = check_synthesis_hypotheses(&inv, 16).unwrap();
        assert!(v.failing().is_empty(), "{v}");
        for item in ["(ii)", "(iv)", "(v)", "(vi)", "(vii)", "(viii)", "(ix)"] {
            assert_eq!(v.status_of(item), Some(Status::Pass), "{item}: {v}");
        }
        // a Kirchberg ideal is not a dimension group
        assert_eq!(v.status_of("(i)"), Some(Status::Inconclusive));
    }

    #[test]
    fn modified_lower_row_fails() {
        let (g, h) = glued(1);
        let inv = augmented_from_graph(&g, &h).unwrap();
        let mut text = inv.to_text().replace("group F1 tors - free 0", "group F1 tors - free 1");
        text = text.replace("map delta0 G3 F1 0,1:", "map delta0 G3 F1 1,1:0");
        text = text.replace("map eps1 F1 F2 1,0:", "map eps1 F1 F2 1,1:0");
        let bad = Invariant::parse(&text).unwrap();
        let v = check_synthesis_hypotheses(&bad, 16).unwrap();
        assert_eq!(v.status_of("(viii)"), Some(Status::Fail), "{v}");
    }

    #[test]
    fn dichotomy_tags_must_match_cones() {
        let (g, h) = glued(1);
        let inv = ksix_from_graph(&g, &h).unwrap();
        assert!(ExtensionData::new(inv.clone(), Some(PieceType::Kirchberg), Some(PieceType::Kirchberg)).is_ok());
        assert!(matches!(ExtensionData::new(inv, Some(PieceType::Af), None), Err(ExtensionError::InconsistentData(_))));
    }
}
