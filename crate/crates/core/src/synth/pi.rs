//! Finite transitive graphs with prescribed `(K₀, [1], rank K₁)`.
//!
//! Start from the diagonal presentation `D₀` with two padding ones, the
//! torsion orders and `rank F₃` zero columns; rows for the remaining free
//! summands have no column and become infinite emitters. A unimodular row
//! transformation `U` with `U·u = 𝟙` steers the unit class, and adding a
//! multiple of the first column to the others makes every entry positive and
//! row 1 dominate row 0.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::SynthError;
use crate::graphs::{Graph, Mult};
use crate::ktheory::k_groups;
use crate::zlin::{unimodular_inverse, Element, FgAbelianGroup, GroupHom, IntMatrix};

#[derive(Debug, Clone)]
pub struct PiRealization {
    pub graph: Graph,
    /// `B = Aᵗ − I` restricted to regular columns
    pub kmap: IntMatrix,
    /// ambient `Z^n` to the requested group; induces the isomorphism on `K₀`
    pub alpha: IntMatrix,
    /// rows `(i, j)` of `kmap` with row `i` strictly below row `j`
    pub dominance: (usize, usize),
}

pub fn realize_pi_simple(g3: &FgAbelianGroup, unit: &[BigInt], f3_rank: usize) -> Result<PiRealization, SynthError> {
    realize_pi_named(g3, unit, f3_rank, "q")
}

pub(crate) fn realize_pi_named(
    g3: &FgAbelianGroup,
    unit: &[BigInt],
    f3_rank: usize,
    prefix: &str,
) -> Result<PiRealization, SynthError> {
    let tors = g3.torsion().to_vec();
    let t = tors.len();
    let r = g3.free_rank();
    if f3_rank > r {
        return Err(SynthError::Infeasible(format!("rank K1 = {f3_rank} exceeds rank K0 = {r}")));
    }
    if unit.len() != g3.ngens() {
        return Err(SynthError::Malformed("unit element has the wrong length".into()));
    }
    let unit = g3.reduce_coords(unit);
    let n = 2 + t + r;
    let nreg = 2 + t + f3_rank;

    // u with P·S·u = unit, all entries after the first ≤ 0
    let mut u = vec![BigInt::one(), -BigInt::one()];
    for (k, d) in tors.iter().enumerate() {
        let g = unit[k].mod_floor(d);
        u.push(if g.is_zero() { g } else { g - d });
    }
    let mut sign = Vec::with_capacity(r);
    for k in 0..r {
        let g = &unit[t + k];
        sign.push(if g.is_positive() { -BigInt::one() } else { BigInt::one() });
        u.push(-g.abs());
    }

    let d0 = IntMatrix::from_fn(n, nreg, |i, j| {
        if i != j {
            BigInt::zero()
        } else if j < 2 {
            BigInt::one()
        } else if j < 2 + t {
            tors[j - 2].clone()
        } else {
            BigInt::zero()
        }
    });
    // M₁·u = e₀ and M₂·e₀ = 𝟙, both unit lower triangular
    let m1 = IntMatrix::from_fn(n, n, |i, j| {
        if j == 0 && i > 0 {
            -u[i].clone()
        } else if i == j {
            BigInt::one()
        } else {
            BigInt::zero()
        }
    });
    let m2 = IntMatrix::from_fn(n, n, |i, j| if i == j || j == 0 { BigInt::one() } else { BigInt::zero() });
    let uu = m2.mul(&m1);
    debug_assert_eq!(uu.mul_vec(&u), vec![BigInt::one(); n]);
    let b0 = uu.mul(&d0);
    let c = b0.column(0);

    let mut lambda = BigInt::zero();
    for k in 1..nreg {
        for row in 0..n {
            let need = BigInt::one() - &b0[(row, k)];
            if need.is_positive() {
                lambda = lambda.max(need.div_ceil(&c[row]));
            }
        }
        lambda = lambda.max(&b0[(0, k)] - &b0[(1, k)] + 1);
    }
    let mut b = b0.clone();
    for k in 1..nreg {
        b.add_col_multiple(k, 0, &lambda);
    }

    let uinv = unimodular_inverse(&uu).expect("triangular with unit diagonal");
    let pick = IntMatrix::from_fn(g3.ngens(), n, |row, col| {
        if row < t {
            if col == 2 + row {
                BigInt::one()
            } else {
                BigInt::zero()
            }
        } else if col == 2 + row {
            sign[row - t].clone()
        } else {
            BigInt::zero()
        }
    });
    let alpha = pick.mul(&uinv);

    let mut graph = Graph::new();
    for v in 0..n {
        graph.add_vertex(&format!("{prefix}{v}")).map_err(|e| SynthError::ConstructionFailed(e.to_string()))?;
    }
    for v in 0..n {
        for w in 0..n {
            let m = if v < nreg {
                let k = &b[(w, v)] + if v == w { BigInt::one() } else { BigInt::zero() };
                Mult::Finite(k.to_u64().ok_or_else(|| SynthError::ConstructionFailed("negative entry".into()))?)
            } else {
                Mult::Infinite
            };
            graph.set_mult(v, w, m);
        }
    }
    let out = PiRealization { graph, kmap: b, alpha, dominance: (0, 1) };
    verify_pi(&out, g3, &unit, f3_rank)?;
    Ok(out)
}

/// Recomputes K-theory and the combinatorial properties of a realization.
pub fn verify_pi(p: &PiRealization, g3: &FgAbelianGroup, unit: &[BigInt], f3_rank: usize) -> Result<(), SynthError> {
    let fail = |m: String| Err(SynthError::ConstructionFailed(m));
    let g = &p.graph;
    let n = g.vertex_count();
    for v in 0..n {
        for w in 0..n {
            let m = g.mult(v, w);
            let need = if v == w { 2 } else { 1 };
            if let Mult::Finite(k) = m {
                if k < need {
                    return fail(format!("entry ({v},{w}) = {k} below {need}"));
                }
            }
        }
    }
    let kp = k_groups(g);
    if kp.kmap != p.kmap {
        return fail("kmap differs from the construction".into());
    }
    let (i, j) = p.dominance;
    if !(0..kp.kmap.cols()).all(|k| kp.kmap[(i, k)] < kp.kmap[(j, k)]) {
        return fail(format!("row {i} is not strictly below row {j}"));
    }
    if !kp.k1.is_free() || kp.k1.free_rank() != f3_rank {
        return fail(format!("K1 is {}", kp.k1.describe()));
    }
    let alpha = GroupHom::from_images(kp.k0.clone(), g3.clone(), &p.alpha)
        .map_err(|e| SynthError::ConstructionFailed(e.to_string()))?;
    if !alpha.is_isomorphism() {
        return fail(format!("K0 = {} is not carried onto {}", kp.k0.describe(), g3.describe()));
    }
    let got: Element = alpha.apply(kp.unit_class.as_ref().expect("finite graph"));
    if !g3.eq_elements(&got, unit) {
        return fail("unit class is not carried onto the requested element".into());
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zlin::vec_from_i64;

    #[test]
    fn cyclic_of_order_two_with_generator_as_unit() {
        let g = FgAbelianGroup::cyclic(2);
        let p = realize_pi_simple(&g, &vec_from_i64(&[1]), 0).unwrap();
        assert!(k_groups(&p.graph).k0.same_canonical_form(&g));
    }

    #[test]
    fn trivial_group_gives_vanishing_k_theory() {
        let p = realize_pi_simple(&FgAbelianGroup::trivial(), &[], 0).unwrap();
        let kp = k_groups(&p.graph);
        assert!(kp.k0.is_trivial() && kp.k1.is_trivial());
    }

    #[test]
    fn free_group_with_kernel_and_zero_unit() {
        let p = realize_pi_simple(&FgAbelianGroup::free(1), &vec_from_i64(&[0]), 1).unwrap();
        let kp = k_groups(&p.graph);
        assert_eq!((kp.k0.free_rank(), kp.k1.free_rank()), (1, 1));
        assert!(kp.k0.is_zero(kp.unit_class.as_ref().unwrap()));
    }

    #[test]
    fn rank_deficit_uses_infinite_emitters() {
        let p = realize_pi_simple(&FgAbelianGroup::free(2), &vec_from_i64(&[3, -1]), 0).unwrap();
        assert_eq!(p.graph.singular_vertices().len(), 2);
        assert!(matches!(
            realize_pi_simple(&FgAbelianGroup::free(1), &vec_from_i64(&[0]), 2),
            Err(SynthError::Infeasible(_))
        ));
    }
}
