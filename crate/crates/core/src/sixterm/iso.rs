//! Isomorphisms of invariants: verification of explicit certificates and a
//! bounded search for one.

use std::fmt;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::{Invariant, InvariantKind, SixtermError};
use crate::ktheory::{ConeCert, ScaleCert, Tri};
use crate::zlin::{Element, FgAbelianGroup, GroupHom, IntMatrix};

/// One matrix per node, mapping the first invariant's group to the second's
/// in canonical coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct IsoCertificate {
    pub components: Vec<(String, IntMatrix)>,
}

impl IsoCertificate {
    pub fn get(&self, node: &str) -> Option<&IntMatrix> {
        self.components.iter().find(|(n, _)| n == node).map(|(_, m)| m)
    }

    pub fn set(&mut self, node: &str, m: IntMatrix) {
        match self.components.iter_mut().find(|(n, _)| n == node) {
            Some(slot) => slot.1 = m,
            None => self.components.push((node.to_string(), m)),
        }
    }

    /// Identity components for an invariant compared with itself.
    pub fn identity(inv: &Invariant) -> Self {
        IsoCertificate {
            components: inv.nodes.iter().map(|n| (n.name.clone(), IntMatrix::identity(n.group.ngens()))).collect(),
        }
    }

    /// Componentwise inverse of a certificate from `a` to `b`; `None` when
    /// some component is not invertible.
    pub fn inverse(&self, a: &Invariant, b: &Invariant) -> Option<IsoCertificate> {
        let mut out = IsoCertificate::default();
        for (name, m) in &self.components {
            let (i, j) = (a.node_index(name)?, b.node_index(name)?);
            let h = GroupHom::new(a.nodes[i].group.clone(), b.nodes[j].group.clone(), m.clone()).ok()?;
            out.set(name, h.inverse()?.matrix().clone());
        }
        Some(out)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (n, m) in &self.components {
            let _ = writeln!(s, "comp {n} {m}");
        }
        s
    }

    pub fn parse(text: &str) -> Result<Self, SixtermError> {
        let mut cert = IsoCertificate::default();
        for (i, raw) in text.lines().enumerate() {
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let toks: Vec<&str> = content.split_whitespace().collect();
            match toks.as_slice() {
                ["comp", node, m] => {
                    let m: IntMatrix = m.parse().map_err(|e| SixtermError::Parse { line: i + 1, msg: e })?;
                    cert.set(node, m);
                }
                _ => {
                    return Err(SixtermError::Parse {
                        line: i + 1,
                        msg: "expected `comp <node> <matrix>`".to_string(),
                    });
                }
            }
        }
        Ok(cert)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckStatus {
    Pass,
    Fail,
    Inconclusive,
}

impl CheckStatus {
    fn from_tri(t: Tri) -> CheckStatus {
        match t {
            Tri::Yes => CheckStatus::Pass,
            Tri::No => CheckStatus::Fail,
            Tri::Unknown => CheckStatus::Inconclusive,
        }
    }
}

impl fmt::Display for CheckStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CheckStatus::Pass => "PASS",
            CheckStatus::Fail => "FAIL",
            CheckStatus::Inconclusive => "INCONCLUSIVE",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReportLine {
    pub check: String,
    pub status: CheckStatus,
    pub detail: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IsoReport {
    pub lines: Vec<ReportLine>,
}

impl IsoReport {
    fn push(&mut self, check: impl Into<String>, status: CheckStatus, detail: impl Into<String>) {
        self.lines.push(ReportLine { check: check.into(), status, detail: detail.into() });
    }

    pub fn overall(&self) -> CheckStatus {
        if self.lines.iter().any(|l| l.status == CheckStatus::Fail) {
            CheckStatus::Fail
        } else if self.lines.iter().any(|l| l.status == CheckStatus::Inconclusive) {
            CheckStatus::Inconclusive
        } else {
            CheckStatus::Pass
        }
    }

    fn status_of(&self, check: &str) -> Option<CheckStatus> {
        self.lines.iter().find(|l| l.check == check).map(|l| l.status)
    }
}

impl fmt::Display for IsoReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.lines {
            writeln!(f, "{:<14} {:<12} {}", l.check, l.status, l.detail)?;
        }
        write!(f, "overall: {}", self.overall())
    }
}

/// Box half-width for sampled cone comparisons.
const SAMPLE_BOUND: i64 = 2;
const SAMPLE_MAX_GENS: usize = 3;

struct Ctx<'a> {
    a: &'a Invariant,
    b: &'a Invariant,
    cap: usize,
    /// per node: forward and inverse maps, when the component is an iso
    comps: Vec<Option<(GroupHom, GroupHom)>>,
}

/// Checks that `cert` is an isomorphism of invariants from `a` to `b`.
pub fn iso_verify(a: &Invariant, b: &Invariant, cert: &IsoCertificate, cap: usize) -> IsoReport {
    let mut r = IsoReport::default();
    if a.kind != b.kind {
        r.push("kind", CheckStatus::Fail, format!("{} vs {}", a.kind.keyword(), b.kind.keyword()));
        return r;
    }
    match (a.unitality, b.unitality) {
        (Some(x), Some(y)) if x == y => r.push("unitality", CheckStatus::Pass, format!("{x}")),
        (Some(x), Some(y)) => r.push("unitality", CheckStatus::Fail, format!("{x} vs {y}")),
        _ => r.push("unitality", CheckStatus::Inconclusive, "not recorded"),
    }
    let mut ctx = Ctx { a, b, cap, comps: Vec::new() };
    for (na, nb) in a.nodes.iter().zip(&b.nodes) {
        let check = format!("iso {}", na.name);
        if na.nfg.is_some() || nb.nfg.is_some() {
            if na.nfg == nb.nfg {
                r.push(check, CheckStatus::Inconclusive, "not finitely generated; declared ranks agree");
            } else {
                r.push(check, CheckStatus::Fail, "finite generation or declared rank differs");
            }
            ctx.comps.push(None);
            continue;
        }
        let Some(m) = cert.get(&na.name) else {
            r.push(check, CheckStatus::Fail, "no component");
            ctx.comps.push(None);
            continue;
        };
        match GroupHom::new(na.group.clone(), nb.group.clone(), m.clone()) {
            Ok(h) => match h.inverse() {
                Some(inv) => {
                    r.push(check, CheckStatus::Pass, format!("{} with two-sided inverse", na.group));
                    ctx.comps.push(Some((h, inv)));
                }
                None => {
                    r.push(check, CheckStatus::Fail, "component is not invertible");
                    ctx.comps.push(None);
                }
            },
            Err(e) => {
                r.push(check, CheckStatus::Fail, e.to_string());
                ctx.comps.push(None);
            }
        }
    }
    for (ea, eb) in a.edges.iter().zip(&b.edges) {
        let check = format!("square {}", ea.name);
        let (Some((src, _)), Some((tgt, _))) = (&ctx.comps[ea.from], &ctx.comps[ea.to]) else {
            let nfg = a.nodes[ea.from].nfg.is_some() || a.nodes[ea.to].nfg.is_some();
            let st = if nfg { CheckStatus::Inconclusive } else { CheckStatus::Fail };
            r.push(check, st, "a component is missing");
            continue;
        };
        let ok = match (tgt.after(&ea.hom), eb.hom.after(src)) {
            (Ok(l), Ok(rr)) => l.same_map(&rr),
            _ => false,
        };
        r.push(check, if ok { CheckStatus::Pass } else { CheckStatus::Fail }, "");
    }
    for i in 0..a.nodes.len() {
        if a.nodes[i].cone.is_some() || b.nodes[i].cone.is_some() {
            let (st, detail) = ctx.cone_check(i, &r);
            r.push(format!("cone {}", a.nodes[i].name), st, detail);
        }
    }
    for i in 0..a.nodes.len() {
        if a.nodes[i].scale.is_some() || b.nodes[i].scale.is_some() {
            let (st, detail) = ctx.scale_check(i, &r);
            r.push(format!("scale {}", a.nodes[i].name), st, detail);
        }
    }
    ctx.element_checks(&mut r);
    r
}

fn standard_generators(g: &FgAbelianGroup, c: &ConeCert) -> Option<Vec<Element>> {
    if !g.is_free() {
        return None;
    }
    match c {
        ConeCert::Simplicial => Some((0..g.ngens()).map(|i| g.generator(i)).collect()),
        ConeCert::StationaryDG(m) if g.ngens() == 1 && m.shape() == (1, 1) && m[(0, 0)].is_positive() => {
            Some(vec![g.generator(0)])
        }
        _ => None,
    }
}

/// All elements with free coordinates in `[-b, b]` and torsion coordinates
/// in `[0, d)`.
fn box_elements(g: &FgAbelianGroup, b: i64) -> Vec<Element> {
    let moduli = g.moduli();
    let ranges: Vec<(BigInt, BigInt)> = moduli
        .iter()
        .map(|m| if m.is_zero() { (BigInt::from(-b), BigInt::from(b)) } else { (BigInt::zero(), m - 1) })
        .collect();
    let mut out = Vec::new();
    let mut cur: Vec<BigInt> = ranges.iter().map(|r| r.0.clone()).collect();
    loop {
        out.push(cur.clone());
        let mut k = 0;
        loop {
            if k == cur.len() {
                return out;
            }
            if cur[k] < ranges[k].1 {
                cur[k] += 1;
                break;
            }
            cur[k] = ranges[k].0.clone();
            k += 1;
        }
    }
}

impl Ctx<'_> {
    fn cone_check(&self, i: usize, r: &IsoReport) -> (CheckStatus, String) {
        let (na, nb) = (&self.a.nodes[i], &self.b.nodes[i]);
        let (Some(ca), Some(cb)) = (&na.cone, &nb.cone) else {
            return (CheckStatus::Inconclusive, "cone recorded on one side only".into());
        };
        let Some((f, finv)) = &self.comps[i] else {
            if na.nfg.is_some() && nb.nfg.is_some() {
                return match (ca.is_full(&na.group), cb.is_full(&nb.group)) {
                    (Tri::Yes, Tri::Yes) => (CheckStatus::Pass, "both full".into()),
                    (Tri::Yes, Tri::No) | (Tri::No, Tri::Yes) => (CheckStatus::Fail, "fullness differs".into()),
                    _ => (CheckStatus::Inconclusive, "not finitely generated".into()),
                };
            }
            return (CheckStatus::Fail, "no component".into());
        };
        if *ca == ConeCert::Lexicographic && *cb == ConeCert::Lexicographic {
            // the lexicographic cone is determined by the row and the end cones
            let deps = ["square eps_t", "square gamma_t", "cone H1", "cone H3"];
            let st = deps.iter().map(|d| r.status_of(d).unwrap_or(CheckStatus::Pass)).fold(CheckStatus::Pass, worse);
            return (st, "determined by the top row".into());
        }
        match (ca.is_full(&na.group), cb.is_full(&nb.group)) {
            (Tri::Yes, Tri::Yes) => return (CheckStatus::Pass, "both full".into()),
            (Tri::Yes, Tri::No) | (Tri::No, Tri::Yes) => return (CheckStatus::Fail, "fullness differs".into()),
            _ => {}
        }
        if let (Some(ga), Some(gb)) = (standard_generators(&na.group, ca), standard_generators(&nb.group, cb)) {
            let fwd = Tri::all(ga.iter().map(|x| self.b.cone_contains(&nb.name, &f.apply(x), self.cap)));
            let bwd = Tri::all(gb.iter().map(|y| self.a.cone_contains(&na.name, &finv.apply(y), self.cap)));
            return (CheckStatus::from_tri(fwd.and(bwd)), "generators map to positives both ways".into());
        }
        if na.group.ngens() > SAMPLE_MAX_GENS {
            return (CheckStatus::Inconclusive, "cone comparison not supported for this group".into());
        }
        let mut unknown = false;
        for x in box_elements(&na.group, SAMPLE_BOUND) {
            let pa = self.a.cone_contains(&na.name, &x, self.cap);
            let pb = self.b.cone_contains(&nb.name, &f.apply(&x), self.cap);
            match (pa, pb) {
                (Tri::Yes, Tri::No) | (Tri::No, Tri::Yes) => {
                    return (CheckStatus::Fail, format!("positivity of {:?} not preserved", x));
                }
                (Tri::Unknown, _) | (_, Tri::Unknown) => unknown = true,
                _ => {}
            }
        }
        let why = if unknown { "sampled, some memberships undecided" } else { "sampled box agrees; not a proof" };
        (CheckStatus::Inconclusive, why.into())
    }

    fn scale_check(&self, i: usize, r: &IsoReport) -> (CheckStatus, String) {
        let (na, nb) = (&self.a.nodes[i], &self.b.nodes[i]);
        let (Some(sa), Some(sb)) = (&na.scale, &nb.scale) else {
            return (CheckStatus::Inconclusive, "scale recorded on one side only".into());
        };
        let Some((f, finv)) = &self.comps[i] else {
            return match (sa, sb) {
                (ScaleCert::Full, ScaleCert::Full) => (CheckStatus::Inconclusive, "not finitely generated".into()),
                _ => (CheckStatus::Fail, "no component".into()),
            };
        };
        let cone = r.status_of(&format!("cone {}", na.name)).unwrap_or(CheckStatus::Inconclusive);
        let st = match (sa, sb) {
            (ScaleCert::Full, ScaleCert::Full) => (cone, "both the full positive cone".to_string()),
            (ScaleCert::Unit(u), ScaleCert::Unit(v)) => {
                let ok = nb.group.eq_elements(&f.apply(u), v);
                (worse(cone, pass_if(ok)), "order units correspond".to_string())
            }
            (ScaleCert::Shifted { base: ba, sub: xa }, ScaleCert::Shifted { base: bb, sub: xb }) => {
                self.shifted_check(f, ba, xa, bb, xb, r)
            }
            (ScaleCert::Induced { .. }, ScaleCert::Induced { .. }) => {
                let dep = ["scale H2", "square eps_t", "cone H1"]
                    .iter()
                    .map(|d| r.status_of(d).unwrap_or(CheckStatus::Pass))
                    .fold(CheckStatus::Pass, worse);
                (dep, "induced from H2".to_string())
            }
            _ => {
                let gens_a = bound_list(sa);
                let gens_b = bound_list(sb);
                match (gens_a, gens_b) {
                    (Some(ga), Some(gb)) => {
                        let fwd = Tri::all(ga.iter().map(|x| self.b.scale_contains(&nb.name, &f.apply(x), self.cap)));
                        let bwd =
                            Tri::all(gb.iter().map(|y| self.a.scale_contains(&na.name, &finv.apply(y), self.cap)));
                        (worse(cone, CheckStatus::from_tri(fwd.and(bwd))), "bounds map into the scale both ways".into())
                    }
                    _ => (CheckStatus::Inconclusive, format!("cannot compare `{sa}` with `{sb}`")),
                }
            }
        };
        st
    }

    fn shifted_check(
        &self,
        f: &GroupHom,
        ba: &[BigInt],
        xa: &ScaleCert,
        bb: &[BigInt],
        xb: &ScaleCert,
        r: &IsoReport,
    ) -> (CheckStatus, String) {
        let deps = ["cone H2", "square eps_t", "square gamma_t"]
            .iter()
            .map(|d| r.status_of(d).unwrap_or(CheckStatus::Pass))
            .fold(CheckStatus::Pass, worse);
        let h2b = self.b.group("H2");
        match (xa, xb) {
            (ScaleCert::Full, ScaleCert::Full) => {
                // the scale is {x >= 0 : γ̃(x) <= γ̃(base)} when H₁ is directed
                let ta = self.a.gamma_t_value(ba);
                let tb = self.b.gamma_t_value(bb);
                let directed = |inv: &Invariant| {
                    matches!(
                        inv.node("H1").cone,
                        Some(
                            ConeCert::Full
                                | ConeCert::Declared(true)
                                | ConeCert::Simplicial
                                | ConeCert::StationaryDG(_)
                        )
                    )
                };
                match (ta, tb) {
                    (Some(ta), Some(tb)) if directed(self.a) && directed(self.b) => {
                        (worse(deps, pass_if(ta == tb)), format!("gamma of base points: {ta} vs {tb}"))
                    }
                    _ => (CheckStatus::Inconclusive, "base points not comparable".into()),
                }
            }
            (ScaleCert::Unit(ua), ScaleCert::Unit(ub)) => {
                let ea = self.a.hom("eps_t");
                let eb = self.b.hom("eps_t");
                let top_a = self.a.group("H2").add(ba, &ea.apply(ua));
                let top_b = h2b.add(bb, &eb.apply(ub));
                let ok = h2b.eq_elements(&f.apply(&top_a), &top_b);
                (worse(deps, pass_if(ok)), "order intervals correspond".into())
            }
            _ => {
                if h2b.eq_elements(&f.apply(ba), bb) && xa == xb {
                    let dep = r.status_of("scale H1").unwrap_or(CheckStatus::Inconclusive);
                    (worse(deps, dep), "base points correspond".into())
                } else {
                    (CheckStatus::Inconclusive, "shifted scales not comparable".into())
                }
            }
        }
    }

    fn element_checks(&self, r: &mut IsoReport) {
        for ea in &self.a.elements {
            let check = format!("elem {}", ea.name);
            let Some(eb) = self.b.elements.iter().find(|e| e.name == ea.name) else {
                continue;
            };
            if ea.node != eb.node {
                r.push(check, CheckStatus::Fail, "elements live in different groups");
                continue;
            }
            let Some((f, _)) = &self.comps[ea.node] else {
                r.push(check, CheckStatus::Inconclusive, "no component");
                continue;
            };
            let ok = self.b.nodes[eb.node].group.eq_elements(&f.apply(&ea.value), &eb.value);
            r.push(check, pass_if(ok), "");
        }
        let wants_unit = |inv: &Invariant| {
            inv.unitality == Some(2) && inv.kind == InvariantKind::SixTerm && inv.element("unitA").is_none()
        };
        if wants_unit(self.a) || wants_unit(self.b) {
            r.push("elem unitA", CheckStatus::Inconclusive, "unit of the extension not recorded; skipped");
        }
    }
}

fn bound_list(s: &ScaleCert) -> Option<Vec<Element>> {
    match s {
        ScaleCert::BoundedBy(list) => Some(list.clone()),
        ScaleCert::Unit(u) => Some(vec![u.clone()]),
        ScaleCert::OrbitOf { seed, .. } => Some(vec![seed.clone()]),
        _ => None,
    }
}

fn pass_if(ok: bool) -> CheckStatus {
    if ok {
        CheckStatus::Pass
    } else {
        CheckStatus::Fail
    }
}

fn worse(a: CheckStatus, b: CheckStatus) -> CheckStatus {
    match (a, b) {
        (CheckStatus::Fail, _) | (_, CheckStatus::Fail) => CheckStatus::Fail,
        (CheckStatus::Inconclusive, _) | (_, CheckStatus::Inconclusive) => CheckStatus::Inconclusive,
        _ => CheckStatus::Pass,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SearchOutcome {
    /// a certificate whose verification passes
    Found(IsoCertificate),
    /// a certificate passing every decidable check, with some checks
    /// inconclusive
    Unverified(IsoCertificate, IsoReport),
    /// no isomorphism exists
    Refuted(String),
    NotFoundWithinBound,
}

/// Candidates per node before the search gives up on that node.
const NODE_CANDIDATE_CAP: usize = 50_000;
/// Complete assignments verified before giving up.
const LEAF_CAP: usize = 20_000;

/// Searches for an isomorphism from `a` to `b` whose components have free
/// entries in `[-bound, bound]`. Differences in canonical forms, unitality
/// or cone fullness refute directly; an exhausted search over groups where
/// the bound covers every automorphism also refutes.
pub fn iso_search(a: &Invariant, b: &Invariant, bound: i64, cap: usize) -> SearchOutcome {
    if a.kind != b.kind {
        return SearchOutcome::Refuted("different kinds of invariant".into());
    }
    if let (Some(x), Some(y)) = (a.unitality, b.unitality) {
        if x != y {
            return SearchOutcome::Refuted(format!("unitality {x} vs {y}"));
        }
    }
    for (na, nb) in a.nodes.iter().zip(&b.nodes) {
        if na.nfg != nb.nfg || (na.nfg.is_none() && !na.group.same_canonical_form(&nb.group)) {
            return SearchOutcome::Refuted(format!(
                "{}: {} vs {}",
                na.name,
                na.nfg.map(|r| format!("nfg rank {r}")).unwrap_or_else(|| na.group.describe()),
                nb.nfg.map(|r| format!("nfg rank {r}")).unwrap_or_else(|| nb.group.describe())
            ));
        }
        if let (Some(ca), Some(cb)) = (&na.cone, &nb.cone) {
            let (fa, fb) = (ca.is_full(&na.group), cb.is_full(&nb.group));
            if matches!((fa, fb), (Tri::Yes, Tri::No) | (Tri::No, Tri::Yes)) {
                return SearchOutcome::Refuted(format!("{}: cone is full on one side only", na.name));
            }
        }
    }
    // maps that are zero on one side only cannot be intertwined
    for (ea, eb) in a.edges.iter().zip(&b.edges) {
        let nfg = a.nodes[ea.from].nfg.is_some() || a.nodes[ea.to].nfg.is_some();
        if !nfg && ea.hom.is_zero() != eb.hom.is_zero() {
            return SearchOutcome::Refuted(format!("{} is zero on one side only", ea.name));
        }
    }
    let exhaustive_groups = a.nodes.iter().all(|n| n.nfg.is_some() || n.group.free_rank() <= 1) && bound >= 1;
    let mut s = Search {
        a,
        b,
        cap,
        bound,
        chosen: vec![None; a.nodes.len()],
        leaves: 0,
        truncated: !exhaustive_groups,
        fallback: None,
    };
    if let Some(c) = s.dfs(0) {
        return SearchOutcome::Found(c);
    }
    if let Some((c, r)) = s.fallback {
        return SearchOutcome::Unverified(c, r);
    }
    if s.truncated {
        SearchOutcome::NotFoundWithinBound
    } else {
        SearchOutcome::Refuted("exhaustive search found no isomorphism".into())
    }
}

struct Search<'a> {
    a: &'a Invariant,
    b: &'a Invariant,
    cap: usize,
    bound: i64,
    chosen: Vec<Option<GroupHom>>,
    leaves: usize,
    truncated: bool,
    fallback: Option<(IsoCertificate, IsoReport)>,
}

impl Search<'_> {
    fn dfs(&mut self, i: usize) -> Option<IsoCertificate> {
        if i == self.a.nodes.len() {
            return self.leaf();
        }
        if self.leaves >= LEAF_CAP {
            self.truncated = true;
            return None;
        }
        let (na, nb) = (&self.a.nodes[i], &self.b.nodes[i]);
        if na.nfg.is_some() {
            self.chosen[i] = Some(GroupHom::zero(&na.group, &nb.group));
            let r = self.dfs(i + 1);
            self.chosen[i] = None;
            return r;
        }
        let candidates = match self.forced(i) {
            Some(h) => vec![h],
            None => self.candidates(&na.group, &nb.group),
        };
        for h in candidates {
            self.chosen[i] = Some(h);
            if self.squares_ok(i) {
                if let Some(c) = self.dfs(i + 1) {
                    self.chosen[i] = None;
                    return Some(c);
                }
            }
            if self.leaves >= LEAF_CAP {
                self.truncated = true;
                break;
            }
        }
        self.chosen[i] = None;
        None
    }

    fn leaf(&mut self) -> Option<IsoCertificate> {
        self.leaves += 1;
        let mut cert = IsoCertificate::default();
        for (n, h) in self.a.nodes.iter().zip(&self.chosen) {
            if n.nfg.is_none() {
                cert.set(&n.name, h.as_ref().expect("assigned").matrix().clone());
            }
        }
        let report = iso_verify(self.a, self.b, &cert, self.cap);
        match report.overall() {
            CheckStatus::Pass => Some(cert),
            CheckStatus::Inconclusive => {
                if self.fallback.is_none() {
                    self.fallback = Some((cert, report));
                }
                None
            }
            CheckStatus::Fail => None,
        }
    }

    /// Component forced through an edge that is an isomorphism on both sides.
    fn forced(&self, i: usize) -> Option<GroupHom> {
        for (ea, eb) in self.a.edges.iter().zip(&self.b.edges) {
            if ea.to == i && ea.from != i {
                if let Some(src) = &self.chosen[ea.from] {
                    if let (Some(ainv), true) = (ea.hom.inverse(), eb.hom.is_isomorphism()) {
                        if let Ok(h) = eb.hom.after(src).and_then(|x| x.after(&ainv)) {
                            return Some(h);
                        }
                    }
                }
            }
            if ea.from == i && ea.to != i {
                if let Some(tgt) = &self.chosen[ea.to] {
                    if let (Some(binv), true) = (eb.hom.inverse(), ea.hom.is_isomorphism()) {
                        if let Ok(h) = binv.after(tgt).and_then(|x| x.after(&ea.hom)) {
                            return Some(h);
                        }
                    }
                }
            }
        }
        None
    }

    fn squares_ok(&self, i: usize) -> bool {
        for (ea, eb) in self.a.edges.iter().zip(&self.b.edges) {
            if ea.from != i && ea.to != i {
                continue;
            }
            let (Some(src), Some(tgt)) = (&self.chosen[ea.from], &self.chosen[ea.to]) else {
                continue;
            };
            if self.a.nodes[ea.from].nfg.is_some() || self.a.nodes[ea.to].nfg.is_some() {
                continue;
            }
            let ok = match (tgt.after(&ea.hom), eb.hom.after(src)) {
                (Ok(l), Ok(r)) => l.same_map(&r),
                _ => false,
            };
            if !ok {
                return false;
            }
        }
        true
    }

    /// Isomorphisms `ga → gb` with free entries in `[-bound, bound]` and
    /// torsion entries reduced.
    fn candidates(&mut self, ga: &FgAbelianGroup, gb: &FgAbelianGroup) -> Vec<GroupHom> {
        let n = ga.ngens();
        if n == 0 {
            return vec![GroupHom::zero(ga, gb)];
        }
        let moduli = gb.moduli();
        let ranges: Vec<(BigInt, BigInt)> = (0..n * n)
            .map(|k| {
                let m = &moduli[k / n];
                if m.is_zero() {
                    (BigInt::from(-self.bound), BigInt::from(self.bound))
                } else {
                    (BigInt::zero(), m - BigInt::one())
                }
            })
            .collect();
        let mut cur: Vec<BigInt> = ranges.iter().map(|r| r.0.clone()).collect();
        let mut out = Vec::new();
        let mut visited = 0usize;
        loop {
            visited += 1;
            if visited > NODE_CANDIDATE_CAP {
                self.truncated = true;
                break;
            }
            let m = IntMatrix::from_fn(n, n, |r, c| cur[r * n + c].clone());
            if let Ok(h) = GroupHom::new(ga.clone(), gb.clone(), m) {
                if h.is_isomorphism() {
                    out.push(h);
                }
            }
            let mut k = 0;
            loop {
                if k == cur.len() {
                    return out;
                }
                if cur[k] < ranges[k].1 {
                    cur[k] += 1;
                    break;
                }
                cur[k] = ranges[k].0.clone();
                k += 1;
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::{Graph, VertexSet};
    use crate::sixterm::{augmented_from_graph, ksix_from_graph};

    fn glued(y: u64, loops: u64) -> (Graph, VertexSet) {
        let g = Graph::parse(&format!("v i\nv a\nv b\ne i i {loops}\ne a a 2\ne b b 2\ne a b 1\ne b a 1\ne a i {y}\n"))
            .unwrap();
        (g, VertexSet::from_indices(3, &[0]))
    }

    #[test]
    fn identity_certificate_verifies() {
        let (g, h) = glued(1, 3);
        let inv = augmented_from_graph(&g, &h).unwrap();
        let r = iso_verify(&inv, &inv, &IsoCertificate::identity(&inv), 16);
        assert_eq!(r.overall(), CheckStatus::Pass, "{r}");
    }

    #[test]
    fn text_round_trip_keeps_identity_valid() {
        let (g, h) = glued(1, 3);
        let inv = ksix_from_graph(&g, &h).unwrap();
        let again = Invariant::parse(&inv.to_text()).unwrap();
        let r = iso_verify(&inv, &again, &IsoCertificate::identity(&inv), 16);
        assert_eq!(r.overall(), CheckStatus::Pass, "{r}");
        let cert = IsoCertificate::parse(&IsoCertificate::identity(&inv).to_text()).unwrap();
        assert_eq!(cert, IsoCertificate::identity(&inv));
    }

    #[test]
    fn search_separates_boundary_maps() {
        let (g1, h) = glued(1, 3);
        let (g2, _) = glued(2, 3);
        let a = ksix_from_graph(&g1, &h).unwrap();
        let b = ksix_from_graph(&g2, &h).unwrap();
        assert!(matches!(iso_search(&a, &b, 2, 16), SearchOutcome::Refuted(_)));
        let (g3, _) = glued(3, 3);
        let c = ksix_from_graph(&g3, &h).unwrap();
        assert!(matches!(iso_search(&a, &c, 2, 16), SearchOutcome::Found(_)));
    }

    #[test]
    fn k1_negation_is_free_when_the_index_map_vanishes() {
        let (g, h) = glued(2, 3);
        let inv = ksix_from_graph(&g, &h).unwrap();
        let mut cert = IsoCertificate::identity(&inv);
        for n in ["K1I", "K1A", "K1Q"] {
            let k = inv.group(n).ngens();
            cert.set(n, IntMatrix::identity(k).scale(&BigInt::from(-1)));
        }
        let r = iso_verify(&inv, &inv, &cert, 16);
        assert_eq!(r.overall(), CheckStatus::Pass, "{r}");
        let back = cert.inverse(&inv, &inv).unwrap();
        assert_eq!(iso_verify(&inv, &inv, &back, 16).overall(), CheckStatus::Pass);
    }

    #[test]
    fn different_k_data_is_refuted() {
        let e3 = Graph::parse("v a\nv b\ne a a 2\ne b b 2\ne a b 1\ne b a 1\nv i\ne a i 1\n").unwrap();
        let h = VertexSet::from_indices(3, &[2]);
        let o3 = Graph::parse("v a\ne a a 3\nv i\ne a i 1\n").unwrap();
        let h3 = VertexSet::from_indices(2, &[1]);
        let (a, b) = (ksix_from_graph(&e3, &h), ksix_from_graph(&o3, &h3));
        // quotients E3 and the three-loop graph: (Z,Z) against (Z/2,0)
        let (a, b) = (a.unwrap(), b.unwrap());
        assert!(matches!(iso_search(&a, &b, 2, 16), SearchOutcome::Refuted(_)));
    }

    #[test]
    fn wrong_component_fails_a_square() {
        let (g, h) = glued(1, 3);
        let inv = ksix_from_graph(&g, &h).unwrap();
        let mut cert = IsoCertificate::identity(&inv);
        cert.set("K1Q", IntMatrix::from_rows(&[[-1]]));
        let r = iso_verify(&inv, &inv, &cert, 16);
        assert_eq!(r.overall(), CheckStatus::Fail);
    }
}
