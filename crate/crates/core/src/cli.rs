//! The `gck` command line.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use num_bigint::BigInt;

use crate::extension::{
    check_corollary, check_main_theorem, check_synthesis_hypotheses, ExtensionData, ExtensionError, Status,
};
use crate::fixtures::{self, FIGURE, TABLE};
use crate::graphs::{classify_simple, hereditary_saturated_subsets, Graph, Simplicity, StagedGraph, VertexSet};
use crate::ktheory::{cone_certificate, k_groups, staged_cone_certificate, staged_k_groups, DEFAULT_CAP};
use crate::sixterm::{
    augmented_from_graph, augmented_from_staged, iso_search, iso_verify, ksix_from_graph, CheckStatus, Invariant,
    IsoCertificate, SearchOutcome,
};
use crate::synth::{glue, synthesize_with, GlueProblem, SynthError, SynthOptions};
use crate::zlin::{format_vector, group_from_presentation, parse_vector, IntMatrix};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INCONCLUSIVE: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "gck", version, about = "K-theory, extension criteria and graph synthesis for graph C*-algebras")]
struct Cli {
    /// recorded in synthesis logs; every construction is deterministic
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// truncation depth for staged graphs
    #[arg(long, global = true, default_value_t = 0)]
    depth: usize,
    /// coefficient bound for isomorphism search
    #[arg(long, global = true, default_value_t = 2)]
    bound: i64,
    /// iteration cap for positivity and stabilization
    #[arg(long, global = true, default_value_t = DEFAULT_CAP)]
    cap: usize,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// K₀, K₁, unit class and order of a graph
    Kth { graph: PathBuf },
    /// hereditary saturated subsets
    Ideals { graph: PathBuf },
    /// simple AF, simple purely infinite, or not simple
    Classify { graph: PathBuf },
    /// six-term invariant of a graph with one ideal
    Sixterm {
        graph: PathBuf,
        /// comma-separated vertex names of the ideal
        #[arg(long)]
        ideal: Option<String>,
    },
    /// augmented invariant of a graph with one ideal
    Augmented {
        graph: PathBuf,
        #[arg(long)]
        ideal: Option<String>,
    },
    /// conditions (1), (2), (3)(a)-(c) on a six-term invariant
    Check { invariant: PathBuf },
    /// the single condition of the finitely generated unital case
    CheckCorollary { invariant: PathBuf },
    /// hypotheses (i)-(ix) on an augmented invariant
    CheckHypotheses { invariant: PathBuf },
    /// adjust a connecting block
    Glue { problem: PathBuf },
    /// build a graph realizing an augmented invariant
    Synthesize {
        invariant: PathBuf,
        /// directory for the graph, certificate and log
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// verify a certificate, or search for one
    Iso {
        a: PathBuf,
        b: PathBuf,
        #[arg(long)]
        cert: Option<PathBuf>,
    },
    /// list or write the example corpus
    Fixtures {
        #[arg(long)]
        list: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

struct Failure {
    code: i32,
    msg: String,
}

fn usage(msg: impl std::fmt::Display) -> Failure {
    Failure { code: EXIT_USAGE, msg: msg.to_string() }
}

type Out<'a> = &'a mut dyn Write;

/// Runs the CLI on `args` (including the program name) and returns the exit
/// code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { write!(err, "{text}") } else { write!(out, "{text}") };
            return code;
        }
    };
    match dispatch(&cli, out) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "gck: {}", f.msg);
            f.code
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn load_staged(path: &Path) -> Result<StagedGraph, Failure> {
    StagedGraph::parse(&read(path)?).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn load_finite(path: &Path) -> Result<Graph, Failure> {
    let s = load_staged(path)?;
    if !s.is_finite() {
        return Err(usage(format!("{}: this command needs a finite graph", path.display())));
    }
    Ok(s.core)
}

fn load_invariant(path: &Path) -> Result<Invariant, Failure> {
    Invariant::parse(&read(path)?).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn w(out: Out, s: impl std::fmt::Display) -> Result<(), Failure> {
    writeln!(out, "{s}").map_err(usage)
}

fn io_fail(e: impl std::fmt::Display) -> Failure {
    Failure { code: EXIT_FAIL, msg: e.to_string() }
}

fn status_code(s: Status) -> i32 {
    match s {
        Status::Pass | Status::Vacuous => EXIT_PASS,
        Status::Fail => EXIT_FAIL,
        Status::Inconclusive => EXIT_INCONCLUSIVE,
    }
}

fn check_code(s: CheckStatus) -> i32 {
    match s {
        CheckStatus::Pass => EXIT_PASS,
        CheckStatus::Fail => EXIT_FAIL,
        CheckStatus::Inconclusive => EXIT_INCONCLUSIVE,
    }
}

/// The named ideal, or the only nontrivial proper one.
fn choose_ideal(g: &Graph, names: &Option<String>) -> Result<VertexSet, Failure> {
    if let Some(list) = names {
        let names: Vec<&str> = list.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
        return VertexSet::from_names(g, &names).map_err(usage);
    }
    let all = hereditary_saturated_subsets(g).map_err(usage)?;
    let proper: Vec<VertexSet> = all.into_iter().filter(|h| !h.is_empty() && !h.is_full()).collect();
    match proper.as_slice() {
        [h] => Ok(h.clone()),
        _ => Err(usage(format!("graph has {} proper nonzero ideals; pass --ideal", proper.len()))),
    }
}

fn staged_ideal(s: &StagedGraph, names: &Option<String>) -> Result<VertexSet, Failure> {
    let Some(list) = names else {
        return Err(usage("staged graphs need --ideal"));
    };
    let names: Vec<&str> = list.split(',').map(str::trim).collect();
    VertexSet::from_names(&s.core, &names).map_err(usage)
}

fn dispatch(cli: &Cli, out: Out) -> Result<i32, Failure> {
    match &cli.cmd {
        Cmd::Kth { graph } => {
            let s = load_staged(graph)?;
            if s.is_finite() {
                let kp = k_groups(&s.core);
                w(out, format!("K0 = {}", kp.k0))?;
                w(out, format!("K1 = {}", kp.k1))?;
                if let Some(u) = &kp.unit_class {
                    w(out, format!("unit class = {}", format_vector(u)))?;
                }
                match cone_certificate(&s.core) {
                    Ok(c) => w(out, format!("cone: {c}"))?,
                    Err(e) => w(out, format!("cone: {e}"))?,
                }
            } else {
                let k = staged_k_groups(&s, cli.cap.max(cli.depth))
                    .map_err(|e| Failure { code: EXIT_INCONCLUSIVE, msg: e.to_string() })?;
                w(out, format!("{} (stable from depth {})", k.describe(), k.depth))?;
                match staged_cone_certificate(&s) {
                    Ok(c) => w(out, format!("cone: {c}"))?,
                    Err(e) => w(out, format!("cone: {e}"))?,
                }
            }
            Ok(EXIT_PASS)
        }
        Cmd::Ideals { graph } => {
            let g = load_finite(graph)?;
            for h in hereditary_saturated_subsets(&g).map_err(usage)? {
                w(out, format!("{{{}}}", h.names(&g).join(",")))?;
            }
            Ok(EXIT_PASS)
        }
        Cmd::Classify { graph } => {
            let g = load_finite(graph)?;
            let c = classify_simple(&g);
            w(
                out,
                match c {
                    Simplicity::NotSimple => "not simple",
                    Simplicity::SimpleAF => "simple AF",
                    Simplicity::SimplePurelyInfinite => "simple purely infinite",
                },
            )?;
            Ok(EXIT_PASS)
        }
        Cmd::Sixterm { graph, ideal } => {
            let g = load_finite(graph)?;
            let h = choose_ideal(&g, ideal)?;
            let inv = ksix_from_graph(&g, &h).map_err(usage)?;
            write!(out, "{}", inv.to_text()).map_err(usage)?;
            Ok(EXIT_PASS)
        }
        Cmd::Augmented { graph, ideal } => {
            let s = load_staged(graph)?;
            let inv = if s.is_finite() {
                let h = choose_ideal(&s.core, ideal)?;
                augmented_from_graph(&s.core, &h)
            } else {
                let h = staged_ideal(&s, ideal)?;
                augmented_from_staged(&s, &h)
            }
            .map_err(usage)?;
            write!(out, "{}", inv.to_text()).map_err(usage)?;
            Ok(EXIT_PASS)
        }
        Cmd::Check { invariant } => {
            let d = ExtensionData::parse(&read(invariant)?).map_err(usage)?;
            let v = check_main_theorem(&d);
            write!(out, "{v}").map_err(usage)?;
            Ok(status_code(v.overall()))
        }
        Cmd::CheckCorollary { invariant } => {
            let d = ExtensionData::parse(&read(invariant)?).map_err(usage)?;
            match check_corollary(&d) {
                Ok(v) => {
                    write!(out, "{v}").map_err(usage)?;
                    Ok(status_code(v.overall()))
                }
                Err(ExtensionError::HypothesesNotMet(m)) => {
                    w(out, format!("not applicable: {m}"))?;
                    Ok(EXIT_INCONCLUSIVE)
                }
                Err(e) => Err(usage(e)),
            }
        }
        Cmd::CheckHypotheses { invariant } => {
            let inv = load_invariant(invariant)?;
            let v = check_synthesis_hypotheses(&inv, cli.cap).map_err(usage)?;
            write!(out, "{v}").map_err(usage)?;
            Ok(status_code(v.overall()))
        }
        Cmd::Glue { problem } => run_glue(&read(problem)?, out),
        Cmd::Synthesize { invariant, out: dir } => {
            let inv = load_invariant(invariant)?;
            let opts = SynthOptions { cap: cli.cap, seed: cli.seed };
            let r = match synthesize_with(&inv, &opts) {
                Ok(r) => r,
                Err(e) => {
                    let code = match e {
                        SynthError::UnsupportedCertificate(_) | SynthError::BadBasePoint(_) => EXIT_INCONCLUSIVE,
                        SynthError::Malformed(_) | SynthError::Sixterm(_) => EXIT_USAGE,
                        _ => EXIT_FAIL,
                    };
                    return Err(Failure { code, msg: e.to_string() });
                }
            };
            let names: Vec<&str> = r.ideal.names(&r.graph.core);
            let log = r.log.join("\n") + "\n";
            match dir {
                Some(d) => {
                    std::fs::create_dir_all(d).map_err(io_fail)?;
                    std::fs::write(d.join("synth.staged"), r.graph.to_text()).map_err(io_fail)?;
                    std::fs::write(d.join("synth.cert"), r.certificate.to_text()).map_err(io_fail)?;
                    std::fs::write(d.join("synth.inv"), r.recomputed.to_text()).map_err(io_fail)?;
                    std::fs::write(d.join("synth.log"), &log).map_err(io_fail)?;
                    w(out, format!("wrote {}", d.display()))?;
                }
                None => {
                    write!(out, "{}", r.graph.to_text()).map_err(usage)?;
                    w(out, format!("# ideal {}", names.join(",")))?;
                    for l in r.certificate.to_text().lines() {
                        w(out, format!("# {l}"))?;
                    }
                }
            }
            w(out, format!("ideal: {}", names.join(",")))?;
            w(out, format!("verification: {}", r.report.overall()))?;
            Ok(EXIT_PASS)
        }
        Cmd::Iso { a, b, cert } => {
            let (ia, ib) = (load_invariant(a)?, load_invariant(b)?);
            match cert {
                Some(c) => {
                    let cert = IsoCertificate::parse(&read(c)?).map_err(usage)?;
                    let rep = iso_verify(&ia, &ib, &cert, cli.cap);
                    w(out, &rep)?;
                    Ok(check_code(rep.overall()))
                }
                None => match iso_search(&ia, &ib, cli.bound, cli.cap) {
                    SearchOutcome::Found(c) => {
                        write!(out, "{}", c.to_text()).map_err(usage)?;
                        w(out, "isomorphic")?;
                        Ok(EXIT_PASS)
                    }
                    SearchOutcome::Unverified(c, rep) => {
                        write!(out, "{}", c.to_text()).map_err(usage)?;
                        w(out, &rep)?;
                        Ok(EXIT_INCONCLUSIVE)
                    }
                    SearchOutcome::Refuted(why) => {
                        w(out, format!("not isomorphic: {why}"))?;
                        Ok(EXIT_FAIL)
                    }
                    SearchOutcome::NotFoundWithinBound => {
                        w(out, format!("no certificate with entries bounded by {}", cli.bound))?;
                        Ok(EXIT_INCONCLUSIVE)
                    }
                },
            }
        }
        Cmd::Fixtures { list, out: dir } => {
            if *list || dir.is_none() {
                for f in &FIGURE {
                    w(out, format!("{:<3} {:<8} {}", f.name, f.file_name(), f.algebra))?;
                }
                for r in &TABLE {
                    w(out, format!("{:<11} ideal {} quotient {} fails {}", r.file, r.ideal, r.quotient, r.fails))?;
                }
            }
            if let Some(d) = dir {
                for p in fixtures::write_corpus(d).map_err(io_fail)? {
                    w(out, format!("wrote {}", p.display()))?;
                }
            }
            Ok(EXIT_PASS)
        }
    }
}

/// Problem file:
///
/// ```text
/// A 1,1:1
/// B 2,2:1,1,2,2
/// Y 1,2:0,0
/// Z 1,2:3,3
/// dominance 0 1
/// x (0)        # optional, default 0
/// lift (0)     # optional: the class of y moves by -(lift, 0)
/// ```
fn run_glue(text: &str, out: Out) -> Result<i32, Failure> {
    let mut fields: std::collections::HashMap<&str, (usize, &str)> = Default::default();
    let mut dominance = None;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        match toks.as_slice() {
            ["dominance", a, b] => {
                let p = |s: &str| s.parse::<usize>().map_err(|_| usage(format!("line {}: bad row index `{s}`", i + 1)));
                dominance = Some((p(a)?, p(b)?));
            }
            [k @ ("A" | "B" | "Y" | "Z" | "x" | "lift"), v] => {
                fields.insert(k, (i + 1, v));
            }
            _ => return Err(usage(format!("line {}: unrecognised `{line}`", i + 1))),
        }
    }
    let mat = |k: &str| -> Result<IntMatrix, Failure> {
        let (line, v) = fields.get(k).ok_or_else(|| usage(format!("missing {k}")))?;
        v.parse::<IntMatrix>().map_err(|e| usage(format!("line {line}: {e}")))
    };
    let vecf = |k: &str, n: usize| -> Result<Vec<BigInt>, Failure> {
        match fields.get(k) {
            None => Ok(vec![BigInt::from(0); n]),
            Some((line, v)) => {
                let x = parse_vector(v).map_err(|e| usage(format!("line {line}: {e}")))?;
                if x.len() != n {
                    return Err(usage(format!("line {line}: {k} needs {n} entries")));
                }
                Ok(x)
            }
        }
    };
    let (a, b, y, z) = (mat("A")?, mat("B")?, mat("Y")?, mat("Z")?);
    let n1 = a.rows();
    if y.rows() != n1 || y.cols() != b.cols() {
        return Err(usage("Y must be rows(A) x cols(B)"));
    }
    let x = vecf("x", n1)?;
    let lift = vecf("lift", n1)?;
    let m = IntMatrix::block_upper(&a, &y, &b);
    let g2 = group_from_presentation(&m);
    let pi2 = g2.reduce_matrix().clone();
    let mut yv = x.clone();
    yv.extend(std::iter::repeat_n(BigInt::from(1), b.rows()));
    let mut shift = lift.clone();
    shift.extend(std::iter::repeat_n(BigInt::from(0), b.rows()));
    let target = g2.class_of(&yv.iter().zip(&shift).map(|(p, q)| p - q).collect::<Vec<_>>());
    let problem = GlueProblem {
        a,
        b,
        y,
        z,
        x,
        dominance: dominance.ok_or_else(|| usage("missing dominance"))?,
        g2,
        pi2,
        target_g2: target,
    };
    match glue(&problem) {
        Ok(r) => {
            w(out, format!("c = {}", r.c))?;
            w(out, format!("Q = {}", r.q))?;
            w(out, format!("Y' = {}", r.y_prime))?;
            for l in &r.log {
                w(out, format!("# {l}"))?;
            }
            Ok(EXIT_PASS)
        }
        Err(e @ (SynthError::NoDominance(_) | SynthError::Malformed(_) | SynthError::Infeasible(_))) => Err(usage(e)),
        Err(e) => Err(Failure { code: EXIT_FAIL, msg: e.to_string() }),
    }
}
