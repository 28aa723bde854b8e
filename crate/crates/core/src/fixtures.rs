//! The example graphs `E1`–`E8` and five extension invariants, each of which
//! violates exactly one of the conditions checked by
//! [`check_main_theorem`](crate::extension::check_main_theorem).

use std::io;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FixtureData {
    /// finite graph text
    Graph(&'static str),
    /// staged graph text
    Staged(&'static str),
    /// declared `(K₀, K₁)` only
    Declared { k0: &'static str, k1: &'static str },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Fixture {
    pub name: &'static str,
    pub algebra: &'static str,
    pub data: FixtureData,
}

impl Fixture {
    pub fn file_name(&self) -> String {
        let ext = match self.data {
            FixtureData::Graph(_) => "graph",
            FixtureData::Staged(_) => "staged",
            FixtureData::Declared { .. } => "meta",
        };
        format!("{}.{ext}", self.name)
    }

    pub fn file_text(&self) -> String {
        match self.data {
            FixtureData::Graph(t) | FixtureData::Staged(t) => t.to_string(),
            FixtureData::Declared { k0, k1 } => {
                format!("# declared K-theory only; not computed\nalgebra {}\nk0 {k0}\nk1 {k1}\n", self.algebra)
            }
        }
    }
}

const E3: &str = "v a\nv b\ne a a 2\ne a b 1\ne b a 1\ne b b 2\n";

pub const FIGURE: [Fixture; 8] = [
    Fixture { name: "E1", algebra: "C", data: FixtureData::Graph("v a\n") },
    Fixture { name: "E2", algebra: "O_2", data: FixtureData::Graph("v a\ne a a 2\n") },
    Fixture { name: "E3", algebra: "unital Kirchberg, K = (Z, Z), [1] = 0", data: FixtureData::Graph(E3) },
    Fixture {
        name: "E4",
        algebra: "stable Kirchberg, K = (Z, Z)",
        data: FixtureData::Staged("v a\nv b\ne a a 2\ne a b 1\ne b a 1\ne b b 2\ntail a in\n"),
    },
    Fixture { name: "E5", algebra: "M_{2^inf} (x) K", data: FixtureData::Staged("v x\nstationary 1,1:2 x\n") },
    Fixture {
        name: "E6",
        algebra: "stable AF, K0 = Z + phi Z (golden mean)",
        data: FixtureData::Staged("v t\nv b\nstationary 2,2:1,1,1,0 t b\n"),
    },
    Fixture { name: "E7", algebra: "stable Kirchberg, K = (0, Z)", data: FixtureData::Declared { k0: "0", k1: "Z" } },
    Fixture {
        name: "E8",
        algebra: "stable Kirchberg, K = (Z^inf, 0)",
        data: FixtureData::Declared { k0: "nfg rank inf", k1: "0" },
    },
];

pub fn figure(name: &str) -> Option<&'static Fixture> {
    FIGURE.iter().find(|f| f.name == name)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TableRow {
    pub file: &'static str,
    /// the single condition this row violates
    pub fails: &'static str,
    pub ideal: &'static str,
    pub quotient: &'static str,
    pub text: &'static str,
}

pub const TABLE: [TableRow; 5] = [
    TableRow {
        file: "row-1.inv",
        fails: "(1)",
        ideal: "E4",
        quotient: "E3",
        text: "\
# ideal E4, quotient E3, nonzero exponential map
kind sixterm
unitality 2
group K0I tors - free 1
group K0A tors - free 1
group K0Q tors - free 1
group K1I tors - free 1
group K1A tors - free 1
group K1Q tors - free 1
map iota0 K0I K0A 1,1:1
map pi0 K0A K0Q 1,1:0
map d0 K0Q K1I 1,1:1
map iota1 K1I K1A 1,1:0
map pi1 K1A K1Q 1,1:1
map d1 K1Q K0I 1,1:0
cone K0I full
cone K0A full
cone K0Q full
scale K0Q unit (0)
elem unitQ K0Q (0)
dichotomy inf inf
",
    },
    TableRow {
        file: "row-2.inv",
        fails: "(2)",
        ideal: "E5",
        quotient: "E2",
        text: "\
# ideal E5, quotient E2; the middle order is declared, not computed
kind sixterm
unitality 1
group K0I nfg rank 1
group K0A nfg rank 1
group K0Q tors - free 0
group K1I tors - free 0
group K1A tors - free 0
group K1Q tors - free 0
map d0 K0Q K1I 0,0:
map iota1 K1I K1A 0,0:
map pi1 K1A K1Q 0,0:
cone K0I declared notfull
cone K0A declared notfull
cone K0Q full
scale K0Q unit ()
elem unitQ K0Q ()
dichotomy 1 inf
",
    },
    TableRow {
        file: "row-3a.inv",
        fails: "(3)(a)",
        ideal: "E8",
        quotient: "E1",
        text: "\
# ideal E8 (K0 not finitely generated), quotient E1
kind sixterm
unitality 2
group K0I nfg rank inf
group K0A nfg rank inf
group K0Q tors - free 1
group K1I tors - free 0
group K1A tors - free 0
group K1Q tors - free 0
map d0 K0Q K1I 0,1:
map iota1 K1I K1A 0,0:
map pi1 K1A K1Q 0,0:
cone K0I full
cone K0Q simplicial
scale K0Q unit (1)
elem unitQ K0Q (1)
dichotomy inf 1
",
    },
    TableRow {
        file: "row-3b.inv",
        fails: "(3)(b)",
        ideal: "E7",
        quotient: "E1",
        text: "\
# ideal E7, quotient E1
kind sixterm
unitality 2
group K0I tors - free 0
group K0A tors - free 1
group K0Q tors - free 1
group K1I tors - free 1
group K1A tors - free 1
group K1Q tors - free 0
map iota0 K0I K0A 1,0:
map pi0 K0A K0Q 1,1:1
map d0 K0Q K1I 1,1:0
map iota1 K1I K1A 1,1:1
map pi1 K1A K1Q 0,1:
map d1 K1Q K0I 0,0:
cone K0I full
cone K0A simplicial
cone K0Q simplicial
scale K0Q unit (1)
elem unitQ K0Q (1)
elem unitA K0A (1)
dichotomy inf 1
",
    },
    TableRow {
        file: "row-3c.inv",
        fails: "(3)(c)",
        ideal: "E6",
        quotient: "E1",
        text: "\
# ideal E6, quotient E1
kind sixterm
unitality 2
group K0I tors - free 2
group K0A tors - free 3
group K0Q tors - free 1
group K1I tors - free 0
group K1A tors - free 0
group K1Q tors - free 0
map iota0 K0I K0A 3,2:1,0,0,1,0,0
map pi0 K0A K0Q 1,3:0,0,1
map d0 K0Q K1I 0,1:
map iota1 K1I K1A 0,0:
map pi1 K1A K1Q 0,0:
map d1 K1Q K0I 2,0:
cone K0I stationary 2,2:1,1,1,0
cone K0A declared notfull
cone K0Q simplicial
scale K0Q unit (1)
elem unitQ K0Q (1)
elem unitA K0A (0,0,1)
dichotomy 1 1
",
    },
];

/// Augmented invariants accepted by the synthesis pipeline.
pub fn synthesis_targets() -> Vec<(&'static str, crate::synth::targets::TargetSpec)> {
    use crate::synth::targets::{AfIdeal, TargetSpec};
    let mut compact = TargetSpec::new(AfIdeal::Tail, &[2], 0);
    compact.unit = vec![1];
    compact.ext = vec![1];
    let mut doubling = TargetSpec::new(AfIdeal::Doubling, &[], 1);
    doubling.f3 = 1;
    doubling.index = 3;
    doubling.unit = vec![2];
    vec![("compact-ideal-z2.inv", compact), ("doubling-ideal-z.inv", doubling)]
}

/// Writes `fixtures/`, `example-table/` and `synthesis/` under `dir`.
pub fn write_corpus(dir: &Path) -> io::Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    let figs = dir.join("fixtures");
    std::fs::create_dir_all(&figs)?;
    for f in &FIGURE {
        let p = figs.join(f.file_name());
        std::fs::write(&p, f.file_text())?;
        out.push(p);
    }
    let rows = dir.join("example-table");
    std::fs::create_dir_all(&rows)?;
    for r in &TABLE {
        let p = rows.join(r.file);
        std::fs::write(&p, r.text)?;
        out.push(p);
    }
    let synth = dir.join("synthesis");
    std::fs::create_dir_all(&synth)?;
    for (name, spec) in synthesis_targets() {
        let inv = spec.build().map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e.to_string()))?;
        let p = synth.join(name);
        std::fs::write(&p, format!("# {}\n{}", spec.describe(), inv.to_text()))?;
        out.push(p);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extension::{check_main_theorem, ExtensionData};
    use crate::graphs::StagedGraph;

    #[test]
    fn each_table_row_fails_exactly_its_condition() {
        for r in &TABLE {
            let d = ExtensionData::parse(r.text).unwrap_or_else(|e| panic!("{}: {e}", r.file));
            let v = check_main_theorem(&d);
            assert_eq!(v.failing(), vec![r.fails], "{}:\n{v}", r.file);
        }
    }

    #[test]
    fn graph_fixtures_parse_and_round_trip() {
        for f in &FIGURE {
            if let FixtureData::Graph(t) | FixtureData::Staged(t) = f.data {
                let s = StagedGraph::parse(t).unwrap();
                assert_eq!(StagedGraph::parse(&s.to_text()).unwrap(), s, "{}", f.name);
            }
        }
    }
}
