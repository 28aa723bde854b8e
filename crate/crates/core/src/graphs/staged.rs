use std::fmt::Write as _;

use num_traits::{Signed, ToPrimitive};

use super::{Graph, GraphError, Mult};
use crate::zlin::IntMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TailDirection {
    /// `... -> t2 -> t1 -> attach`
    In,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tail {
    pub attach: usize,
    pub direction: TailDirection,
}

/// Repeating Bratteli-type block: level `n` vertex `i` emits `matrix[i][j]`
/// edges to level `n+1` vertex `j`. Level 0 consists of core vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StationaryBlock {
    pub matrix: IntMatrix,
    pub level0: Vec<usize>,
}

impl StationaryBlock {
    pub fn width(&self) -> usize {
        self.level0.len()
    }
}

/// A countable graph given as a finite core plus eventually periodic
/// infinite parts attached at core vertices.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct StagedGraph {
    pub core: Graph,
    pub tails: Vec<Tail>,
    pub blocks: Vec<StationaryBlock>,
}

fn perr(line: usize, msg: impl Into<String>) -> GraphError {
    GraphError::Parse { line, msg: msg.into() }
}

fn at_line(line: usize, e: GraphError) -> GraphError {
    match e {
        GraphError::UnknownVertex(_) | GraphError::DuplicateVertex(_) => perr(line, e.to_string()),
        other => other,
    }
}

impl StagedGraph {
    pub fn from_graph(core: Graph) -> Self {
        StagedGraph { core, tails: Vec::new(), blocks: Vec::new() }
    }

    pub fn is_finite(&self) -> bool {
        self.tails.is_empty() && self.blocks.is_empty()
    }

    /// Parses `v`, `e`, `tail` and `stationary` declarations; `#` starts a
    /// comment.
    pub fn parse(text: &str) -> Result<StagedGraph, GraphError> {
        let mut s = StagedGraph::default();
        for (i, raw) in text.lines().enumerate() {
            let ln = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let toks: Vec<&str> = line.split_whitespace().collect();
            match toks[0] {
                "v" => {
                    let [_, name] = toks[..] else {
                        return Err(perr(ln, "expected `v <name>`"));
                    };
                    if name.contains(['~', '@']) {
                        return Err(perr(ln, "vertex names may not contain `~` or `@`"));
                    }
                    s.core.add_vertex(name).map_err(|e| at_line(ln, e))?;
                }
                "e" => {
                    let [_, src, dst, m] = toks[..] else {
                        return Err(perr(ln, "expected `e <src> <dst> <mult>`"));
                    };
                    let m: Mult = m.parse().map_err(|e: String| perr(ln, e))?;
                    if m.is_zero() {
                        return Err(perr(ln, "multiplicity must be positive"));
                    }
                    let (v, w) = (
                        s.core.require(src).map_err(|e| at_line(ln, e))?,
                        s.core.require(dst).map_err(|e| at_line(ln, e))?,
                    );
                    s.core.add_edges(v, w, m);
                }
                "tail" => {
                    let (attach, dir) = match toks[..] {
                        [_, a] => (a, "in"),
                        [_, a, d] => (a, d),
                        _ => return Err(perr(ln, "expected `tail <vertex> [in]`")),
                    };
                    match dir {
                        "in" => {}
                        "out" => return Err(GraphError::Unsupported("outgoing tails".into())),
                        _ => return Err(perr(ln, format!("bad tail direction `{dir}`"))),
                    }
                    let attach = s.core.require(attach).map_err(|e| at_line(ln, e))?;
                    s.tails.push(Tail { attach, direction: TailDirection::In });
                }
                "stationary" => {
                    if toks.len() < 3 {
                        return Err(perr(ln, "expected `stationary <matrix> <level-0 vertices...>`"));
                    }
                    let matrix: IntMatrix = toks[1].parse().map_err(|e: String| perr(ln, e))?;
                    let level0 = toks[2..]
                        .iter()
                        .map(|n| s.core.require(n))
                        .collect::<Result<Vec<_>, _>>()
                        .map_err(|e| at_line(ln, e))?;
                    if !matrix.is_square() || matrix.rows() != level0.len() {
                        return Err(perr(ln, "block matrix must be square with one row per level-0 vertex"));
                    }
                    if !matrix.is_nonnegative() {
                        return Err(perr(ln, "block matrix must be nonnegative"));
                    }
                    let mut sorted = level0.clone();
                    sorted.sort_unstable();
                    sorted.dedup();
                    if sorted.len() != level0.len() {
                        return Err(perr(ln, "level-0 vertices must be distinct"));
                    }
                    s.blocks.push(StationaryBlock { matrix, level0 });
                }
                other => return Err(perr(ln, format!("unknown declaration `{other}`"))),
            }
        }
        Ok(s)
    }

    pub fn to_text(&self) -> String {
        let mut out = self.core.to_text();
        for t in &self.tails {
            let _ = writeln!(out, "tail {} in", self.core.name(t.attach));
        }
        for b in &self.blocks {
            let names: Vec<&str> = b.level0.iter().map(|&v| self.core.name(v)).collect();
            let _ = writeln!(out, "stationary {} {}", b.matrix, names.join(" "));
        }
        out
    }

    pub fn tail_vertex_name(&self, tail: usize, step: usize) -> String {
        format!("{}~{}.{}", self.core.name(self.tails[tail].attach), tail, step)
    }

    pub fn block_vertex_name(&self, block: usize, i: usize, level: usize) -> String {
        let b = &self.blocks[block];
        if level == 0 {
            self.core.name(b.level0[i]).to_string()
        } else {
            format!("{}@{}", self.core.name(b.level0[i]), level)
        }
    }

    /// Finite subgraph: the core, `depth` vertices of every tail, and levels
    /// `1..=depth` of every block (the last level consists of sinks).
    /// Vertices of a shallower truncation keep their positions.
    pub fn truncate(&self, depth: usize) -> Result<Graph, GraphError> {
        let mut g = self.core.clone();
        // depth-major insertion keeps shallower truncations as prefixes
        for step in 1..=depth {
            for t in 0..self.tails.len() {
                g.add_vertex(&self.tail_vertex_name(t, step))?;
            }
            for b in 0..self.blocks.len() {
                for i in 0..self.blocks[b].width() {
                    g.add_vertex(&self.block_vertex_name(b, i, step))?;
                }
            }
        }
        for step in 1..=depth {
            for (t, tail) in self.tails.iter().enumerate() {
                let v = g.require(&self.tail_vertex_name(t, step))?;
                let w = if step == 1 { tail.attach } else { g.require(&self.tail_vertex_name(t, step - 1))? };
                g.add_edges(v, w, Mult::Finite(1));
            }
            for (b, block) in self.blocks.iter().enumerate() {
                for i in 0..block.width() {
                    for j in 0..block.width() {
                        let k = block.matrix[(i, j)].abs().to_u64().expect("block entries fit in u64");
                        if k > 0 {
                            let v = g.require(&self.block_vertex_name(b, i, step - 1))?;
                            let w = g.require(&self.block_vertex_name(b, j, step))?;
                            g.add_edges(v, w, Mult::Finite(k));
                        }
                    }
                }
            }
        }
        Ok(g)
    }
}
