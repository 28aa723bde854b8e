//! Line-oriented text format for invariants.
//!
//! ```text
//! kind augmented
//! unitality 1
//! group H1 tors - free 1
//! group G1 nfg rank inf
//! map eps_t H1 H2 2,1:1,0
//! cone H2 lex
//! scale H2 shifted (0,1) full
//! elem h2 H2 (0,1)
//! ```
//!
//! Elements and map matrices use the canonical coordinates of the groups
//! (torsion generators first). Maps touching a group declared not finitely
//! generated may be omitted.

use std::collections::HashMap;
use std::fmt::Write as _;

use num_bigint::BigInt;

use super::{DeclaredRank, Invariant, InvariantKind, NamedElement, SixtermError};
use crate::ktheory::{ConeCert, ScaleCert};
use crate::zlin::{format_vector, parse_vector, FgAbelianGroup, IntMatrix};

fn perr(line: usize, msg: impl Into<String>) -> SixtermError {
    SixtermError::Parse { line, msg: msg.into() }
}

struct GroupDecl {
    group: FgAbelianGroup,
    nfg: Option<DeclaredRank>,
}

fn parse_group(line: usize, toks: &[&str]) -> Result<GroupDecl, SixtermError> {
    match toks {
        ["tors", t, "free", f] => {
            let torsion: Vec<BigInt> = if *t == "-" {
                Vec::new()
            } else {
                t.split(',')
                    .map(|x| x.parse::<BigInt>().map_err(|e| perr(line, format!("torsion `{x}`: {e}"))))
                    .collect::<Result<_, _>>()?
            };
            let free: usize = f.parse().map_err(|_| perr(line, format!("free rank `{f}`")))?;
            let group = FgAbelianGroup::canonical(&torsion, free).map_err(|e| perr(line, e.to_string()))?;
            Ok(GroupDecl { group, nfg: None })
        }
        ["nfg", "rank", r] => {
            let rank = if *r == "inf" {
                DeclaredRank::Infinite
            } else {
                DeclaredRank::Finite(r.parse().map_err(|_| perr(line, format!("rank `{r}`")))?)
            };
            Ok(GroupDecl { group: FgAbelianGroup::trivial(), nfg: Some(rank) })
        }
        _ => Err(perr(line, "expected `tors <list|-> free <n>` or `nfg rank <n|inf>`")),
    }
}

impl Invariant {
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "kind {}", self.kind.keyword());
        if let Some(u) = self.unitality {
            let _ = writeln!(s, "unitality {u}");
        }
        for n in &self.nodes {
            match n.nfg {
                Some(r) => {
                    let _ = writeln!(s, "group {} nfg rank {r}", n.name);
                }
                None => {
                    let t: Vec<String> = n.group.torsion().iter().map(|d| d.to_string()).collect();
                    let t = if t.is_empty() { "-".to_string() } else { t.join(",") };
                    let _ = writeln!(s, "group {} tors {t} free {}", n.name, n.group.free_rank());
                }
            }
        }
        for e in &self.edges {
            if self.nodes[e.from].nfg.is_some() || self.nodes[e.to].nfg.is_some() {
                continue;
            }
            let _ =
                writeln!(s, "map {} {} {} {}", e.name, self.nodes[e.from].name, self.nodes[e.to].name, e.hom.matrix());
        }
        for n in &self.nodes {
            if let Some(c) = &n.cone {
                let _ = writeln!(s, "cone {} {c}", n.name);
            }
            if let Some(sc) = &n.scale {
                let _ = writeln!(s, "scale {} {sc}", n.name);
            }
        }
        for e in &self.elements {
            let _ = writeln!(s, "elem {} {} {}", e.name, self.nodes[e.node].name, format_vector(&e.value));
        }
        s
    }

    pub fn parse(text: &str) -> Result<Invariant, SixtermError> {
        let mut kind = None;
        let mut unitality = None;
        let mut groups: HashMap<String, GroupDecl> = HashMap::new();
        let mut maps: Vec<(usize, String, String, String, IntMatrix)> = Vec::new();
        let mut cones: Vec<(usize, String, ConeCert)> = Vec::new();
        let mut scales: Vec<(usize, String, ScaleCert)> = Vec::new();
        let mut elems: Vec<(usize, String, String, Vec<BigInt>)> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let toks: Vec<&str> = content.split_whitespace().collect();
            match toks.as_slice() {
                ["kind", "sixterm"] => kind = Some(InvariantKind::SixTerm),
                ["kind", "augmented"] => kind = Some(InvariantKind::Augmented),
                ["kind", other] => return Err(perr(line, format!("unknown kind `{other}`"))),
                ["unitality", u] => {
                    let u: u8 = u.parse().map_err(|_| perr(line, format!("unitality `{u}`")))?;
                    if u > 2 {
                        return Err(perr(line, "unitality must be 0, 1 or 2"));
                    }
                    unitality = Some(u);
                }
                ["group", name, rest @ ..] => {
                    if groups.insert(name.to_string(), parse_group(line, rest)?).is_some() {
                        return Err(perr(line, format!("group {name} declared twice")));
                    }
                }
                ["map", name, src, tgt, m] => {
                    let m: IntMatrix = m.parse().map_err(|e: String| perr(line, e))?;
                    maps.push((line, name.to_string(), src.to_string(), tgt.to_string(), m));
                }
                ["cone", node, rest @ ..] => {
                    cones.push((line, node.to_string(), ConeCert::parse_tokens(rest).map_err(|e| perr(line, e))?));
                }
                ["scale", node, rest @ ..] => {
                    scales.push((line, node.to_string(), ScaleCert::parse_tokens(rest).map_err(|e| perr(line, e))?));
                }
                ["elem", name, node, v] => {
                    elems.push((line, name.to_string(), node.to_string(), parse_vector(v).map_err(|e| perr(line, e))?));
                }
                _ => return Err(perr(line, format!("unrecognised line `{content}`"))),
            }
        }
        let kind = kind.ok_or_else(|| perr(0, "missing `kind` line"))?;
        for name in groups.keys() {
            if !kind.node_names().contains(&name.as_str()) {
                return Err(SixtermError::Malformed(format!("unknown group {name} for kind {}", kind.keyword())));
            }
        }
        let mut decls = Vec::new();
        for n in kind.node_names() {
            decls.push(groups.remove(*n).ok_or_else(|| SixtermError::Malformed(format!("missing group {n}")))?);
        }
        let nfg: Vec<Option<DeclaredRank>> = decls.iter().map(|d| d.nfg).collect();
        let node_groups: Vec<FgAbelianGroup> = decls.into_iter().map(|d| d.group).collect();
        let mut matrices = Vec::new();
        for (name, from, to) in kind.edge_specs() {
            let fi = kind.node_names().iter().position(|n| n == from).unwrap();
            let ti = kind.node_names().iter().position(|n| n == to).unwrap();
            let found: Vec<_> = maps.iter().filter(|m| m.1 == *name).collect();
            let m = match found.as_slice() {
                [] if nfg[fi].is_some() || nfg[ti].is_some() => {
                    IntMatrix::zeros(node_groups[ti].ngens(), node_groups[fi].ngens())
                }
                [] => return Err(SixtermError::Malformed(format!("missing map {name}"))),
                [(line, _, src, tgt, m)] => {
                    if src != from || tgt != to {
                        return Err(perr(*line, format!("map {name} must go from {from} to {to}")));
                    }
                    m.clone()
                }
                [_, (line, ..), ..] => return Err(perr(*line, format!("map {name} given twice"))),
            };
            matrices.push(m);
        }
        for m in &maps {
            if !kind.edge_specs().iter().any(|(n, _, _)| *n == m.1) {
                return Err(perr(m.0, format!("unknown map {}", m.1)));
            }
        }
        let mut inv = Invariant::from_parts(kind, node_groups, matrices)?;
        for (node, r) in inv.nodes.iter_mut().zip(nfg) {
            node.nfg = r;
        }
        inv.unitality = unitality;
        for (line, node, c) in cones {
            let i = inv.node_index(&node).ok_or_else(|| perr(line, format!("unknown group {node}")))?;
            inv.nodes[i].cone = Some(c);
        }
        for (line, node, sc) in scales {
            let i = inv.node_index(&node).ok_or_else(|| perr(line, format!("unknown group {node}")))?;
            inv.nodes[i].scale = Some(sc);
        }
        for (line, name, node, v) in elems {
            let i = inv.node_index(&node).ok_or_else(|| perr(line, format!("unknown group {node}")))?;
            if v.len() != inv.nodes[i].group.ngens() {
                return Err(perr(line, format!("element {name} needs {} coordinates", inv.nodes[i].group.ngens())));
            }
            let value = inv.nodes[i].group.reduce_coords(&v);
            inv.elements.push(NamedElement { name, node: i, value });
        }
        Ok(inv)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const ROW3A: &str = "\
kind sixterm
unitality 2
group K0I nfg rank inf
group K0A nfg rank inf
group K0Q tors - free 1
group K1I tors - free 0
group K1A tors - free 0
group K1Q tors - free 0
map pi0 K0A K0Q 1,0:
map d0 K0Q K1I 0,1:
map iota1 K1I K1A 0,0:
map pi1 K1A K1Q 0,0:
cone K0I full
cone K0Q simplicial
scale K0Q unit (1)
elem unitQ K0Q (1)
";

    #[test]
    fn round_trip_with_nfg_groups() {
        let inv = Invariant::parse(ROW3A).unwrap();
        assert_eq!(inv.node("K0I").nfg, Some(DeclaredRank::Infinite));
        let again = Invariant::parse(&inv.to_text()).unwrap();
        assert_eq!(again.to_text(), inv.to_text());
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let bad = ROW3A.replace("group K1Q tors - free 0", "group K1Q tors 1 free 0");
        assert!(matches!(Invariant::parse(&bad), Err(SixtermError::Parse { line: 8, .. })));
        let missing = ROW3A.replace("map pi1 K1A K1Q 0,0:\n", "");
        assert!(matches!(Invariant::parse(&missing), Err(SixtermError::Malformed(_))));
    }
}
