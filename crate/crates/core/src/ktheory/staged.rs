use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::{cone_certificate, is_primitive, k_groups, ConeCert, KPair, KtheoryError};
use crate::graphs::StagedGraph;
use crate::zlin::{induced_hom, solve, FgAbelianGroup, GroupHom, IntMatrix};

/// Stable K-theory data of a staged graph.
#[derive(Debug, Clone)]
pub struct StagedK {
    /// K-theory of the truncation at `depth`
    pub kpair: KPair,
    pub depth: usize,
    /// map induced by the inclusion of the `depth` truncation into the next
    pub k0_connecting: GroupHom,
    pub k1_connecting: GroupHom,
    /// whether the connecting maps are isomorphisms, so the colimit is the
    /// stage group itself
    pub colimit_is_stage: bool,
}

impl StagedK {
    pub fn describe(&self) -> String {
        if self.colimit_is_stage {
            format!("K0 = {}, K1 = {}", self.kpair.k0, self.kpair.k1)
        } else {
            format!(
                "K0 = colim({} via {:?}), K1 = colim({} via {:?})",
                self.kpair.k0,
                self.k0_connecting.matrix().to_i64_rows().unwrap_or_default(),
                self.kpair.k1,
                self.k1_connecting.matrix().to_i64_rows().unwrap_or_default()
            )
        }
    }
}

fn inclusion(rows: usize, cols: usize) -> IntMatrix {
    IntMatrix::from_fn(rows, cols, |i, j| if i == j { BigInt::one() } else { BigInt::zero() })
}

/// Map on K₁ induced by the inclusion of one truncation into the next:
/// regular vertices stay regular, so kernel vectors extend by zero.
fn k1_connecting(a: &KPair, b: &KPair, a_reg: &[usize], b_reg: &[usize]) -> Result<GroupHom, KtheoryError> {
    let basis_b = IntMatrix::from_columns(b.kmap.cols(), &b.k1_basis);
    let mut cols = Vec::with_capacity(a.k1_basis.len());
    for v in &a.k1_basis {
        let mut ext = vec![BigInt::zero(); b.kmap.cols()];
        for (i, x) in v.iter().enumerate() {
            let pos = b_reg.iter().position(|&r| r == a_reg[i]).expect("regular vertices stay regular");
            ext[pos] = x.clone();
        }
        let c = solve(&basis_b, &ext)
            .ok_or_else(|| KtheoryError::Unsupported("kernel vector does not extend to the next truncation".into()))?;
        cols.push(c);
    }
    Ok(GroupHom::new(a.k1.clone(), b.k1.clone(), IntMatrix::from_columns(b.k1.ngens(), &cols))?)
}

/// Coarse invariant of a homomorphism: canonical forms of its cokernel and
/// kernel.
fn signature(h: &GroupHom) -> (Vec<BigInt>, usize, Vec<BigInt>, usize) {
    let coker = FgAbelianGroup::from_presentation(&h.matrix().hstack(&h.target().relation_matrix()));
    let ker_gens = h.kernel();
    let ker = if ker_gens.is_empty() {
        FgAbelianGroup::trivial()
    } else {
        // subgroup of the source generated by the kernel generators
        let g = IntMatrix::from_columns(h.source().ngens(), &ker_gens);
        let rel = h.source().relation_matrix();
        let sys = g.hstack(&rel);
        let k = crate::zlin::kernel_basis(&sys);
        // relations among the generators: first ker_gens.len() coordinates
        let rels: Vec<Vec<BigInt>> = k.into_iter().map(|v| v[..ker_gens.len()].to_vec()).collect();
        FgAbelianGroup::from_presentation(&IntMatrix::from_columns(ker_gens.len(), &rels))
    };
    (coker.torsion().to_vec(), coker.free_rank(), ker.torsion().to_vec(), ker.free_rank())
}

/// K-theory of a staged graph by truncation: stops at the first depth `d`
/// where the groups at `d`, `d+1`, `d+2` share canonical forms and the two
/// connecting maps share their kernel/cokernel invariants.
pub fn staged_k_groups(s: &StagedGraph, cap: usize) -> Result<StagedK, KtheoryError> {
    if s.blocks.len() > 1 {
        return Err(KtheoryError::Unsupported("at most one stationary block is supported".into()));
    }
    let mut stages: Vec<(KPair, Vec<usize>)> = Vec::new();
    let mut maps: Vec<(GroupHom, GroupHom)> = Vec::new();
    for d in 0..=cap + 2 {
        let g = s.truncate(d)?;
        stages.push((k_groups(&g), g.regular_vertices()));
        if d == 0 {
            continue;
        }
        let (a, a_reg) = &stages[d - 1];
        let (b, b_reg) = &stages[d];
        let f = inclusion(b.kmap.rows(), a.kmap.rows());
        let h0 = induced_hom(&a.kmap, &b.kmap, &f)?;
        let h1 = k1_connecting(a, b, a_reg, b_reg)?;
        maps.push((h0, h1));
        if d < 2 {
            continue;
        }
        let base = d - 2;
        let same_groups = (base..d).all(|i| {
            stages[i].0.k0.same_canonical_form(&stages[i + 1].0.k0)
                && stages[i].0.k1.same_canonical_form(&stages[i + 1].0.k1)
        });
        let (m0, m1) = (&maps[base], &maps[base + 1]);
        if same_groups && signature(&m0.0) == signature(&m1.0) && signature(&m0.1) == signature(&m1.1) {
            let colimit_is_stage = m0.0.is_isomorphism() && m0.1.is_isomorphism();
            return Ok(StagedK {
                kpair: stages[base].0.clone(),
                depth: base,
                k0_connecting: m0.0.clone(),
                k1_connecting: m0.1.clone(),
                colimit_is_stage,
            });
        }
    }
    Err(KtheoryError::NoStabilization(cap))
}

/// Cone certificate for a staged graph: a lone stationary block whose
/// level-0 vertices are exactly the core gives `StationaryDG`; tails over a
/// simple core inherit the core's certificate.
pub fn staged_cone_certificate(s: &StagedGraph) -> Result<ConeCert, KtheoryError> {
    match s.blocks.as_slice() {
        [] => cone_certificate(&s.core),
        [block] => {
            let n = s.core.vertex_count();
            let in_order = block.level0 == (0..n).collect::<Vec<_>>();
            let no_core_edges = (0..n).all(|v| s.core.is_sink(v));
            if !s.tails.is_empty() || !in_order || !no_core_edges {
                return Err(KtheoryError::Unsupported(
                    "stationary certificate needs a core consisting of the level-0 vertices in order, without edges"
                        .into(),
                ));
            }
            if !is_primitive(&block.matrix) {
                return Err(KtheoryError::NotPrimitive(format!("{}", block.matrix)));
            }
            Ok(ConeCert::StationaryDG(block.matrix.clone()))
        }
        _ => Err(KtheoryError::Unsupported("at most one stationary block is supported".into())),
    }
}
