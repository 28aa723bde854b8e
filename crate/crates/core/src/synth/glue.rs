//! Adjusting the connecting block of a two-block presentation so that it
//! dominates a prescribed lower bound and the class of `y = (x, 𝟙)` lands on a
//! prescribed element, without changing the cokernel or kernel.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::SynthError;
use crate::zlin::{group_from_presentation, Element, FgAbelianGroup, GroupHom, IntMatrix};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GlueProblem {
    /// ideal block, `n₁ × n₁′`
    pub a: IntMatrix,
    /// quotient block, `n₃ × n₃′`
    pub b: IntMatrix,
    /// connecting block, `n₁ × n₃′`
    pub y: IntMatrix,
    /// entrywise lower bound for the new connecting block
    pub z: IntMatrix,
    pub x: Vec<BigInt>,
    /// rows `(i, j)` of `B` with `B[i][k] < B[j][k]` for every column `k`
    pub dominance: (usize, usize),
    pub g2: FgAbelianGroup,
    /// images of the `n₁ + n₃` ambient generators in `g2`
    pub pi2: IntMatrix,
    pub target_g2: Element,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GlueResult {
    pub y_prime: IntMatrix,
    pub q: IntMatrix,
    pub c: BigInt,
    /// the lift solved for in the ideal coordinates
    pub lift: Vec<BigInt>,
    /// images of the ambient generators under the adjusted map
    pub pi2_prime: IntMatrix,
    pub alpha2: GroupHom,
    pub log: Vec<String>,
}

impl GlueProblem {
    pub fn n1(&self) -> usize {
        self.a.rows()
    }

    pub fn n3(&self) -> usize {
        self.b.rows()
    }

    pub fn presentation(&self) -> IntMatrix {
        IntMatrix::block_upper(&self.a, &self.y, &self.b)
    }

    /// `y = (x, 𝟙)`.
    pub fn y_vector(&self) -> Vec<BigInt> {
        let mut v = self.x.clone();
        v.extend(std::iter::repeat_n(BigInt::one(), self.n3()));
        v
    }

    fn check_shapes(&self) -> Result<(), SynthError> {
        let n1 = self.a.rows();
        let (n3, n3p) = self.b.shape();
        let bad = |m: &str| Err(SynthError::Malformed(m.to_string()));
        if self.y.shape() != (n1, n3p) || self.z.shape() != (n1, n3p) {
            return bad("Y and Z must be n1 x n3'");
        }
        if self.x.len() != n1 {
            return bad("x must have length n1");
        }
        if self.pi2.shape() != (self.g2.ngens(), n1 + n3) {
            return bad("pi2 must send the n1+n3 generators into G2");
        }
        if self.target_g2.len() != self.g2.ngens() {
            return bad("target element has the wrong length");
        }
        Ok(())
    }
}

fn dominance_gaps(b: &IntMatrix, (i, j): (usize, usize)) -> Result<Vec<BigInt>, SynthError> {
    if i >= b.rows() || j >= b.rows() || i == j {
        return Err(SynthError::NoDominance(format!("rows ({i}, {j}) are not two distinct rows of B")));
    }
    let gaps: Vec<BigInt> = (0..b.cols()).map(|k| &b[(j, k)] - &b[(i, k)]).collect();
    if let Some(k) = gaps.iter().position(|d| !d.is_positive()) {
        return Err(SynthError::NoDominance(format!("B[{i}][{k}] is not below B[{j}][{k}]")));
    }
    Ok(gaps)
}

fn ceil_div(a: &BigInt, b: &BigInt) -> BigInt {
    a.div_ceil(b)
}

/// Runs the adjustment and checks its postconditions before returning.
pub fn glue(p: &GlueProblem) -> Result<GlueResult, SynthError> {
    p.check_shapes()?;
    let n1 = p.n1();
    let n3 = p.n3();
    let n3p = p.b.cols();
    if n3 == 0 {
        return Err(SynthError::Infeasible("the quotient block needs at least one row".into()));
    }
    let gaps = dominance_gaps(&p.b, p.dominance)?;
    let m = p.presentation();
    for (k, col) in m.columns().iter().enumerate() {
        if !p.g2.is_zero(&p.pi2.mul_vec(col)) {
            return Err(SynthError::Malformed(format!("pi2 does not kill relation column {k}")));
        }
    }
    let mut log = Vec::new();

    let y = p.y_vector();
    let g2_prime = p.g2.sub(&p.g2.reduce_coords(&p.pi2.mul_vec(&y)), &p.target_g2);
    let ideal_images: Vec<Element> = (0..n1).map(|i| p.g2.reduce_coords(&p.pi2.column(i))).collect();
    let lift = p
        .g2
        .express_in(&ideal_images, &g2_prime)
        .ok_or_else(|| SynthError::UnsolvableZ(format!("{} is not in the image of the ideal part", p.g2.describe())))?;
    log.push(format!("lift z = {}", crate::zlin::format_vector(&lift)));

    // Q′ carries z in its first column, so Q′·𝟙 = z.
    let q1 = IntMatrix::from_fn(n1, n3, |r, k| if k == 0 { lift[r].clone() } else { BigInt::zero() });
    // Rows of Q″ are e_j − e_i, so every row of Q″B is the positive gap B_j − B_i.
    let (i, j) = p.dominance;
    let q2 = IntMatrix::from_fn(n1, n3, |_, k| {
        if k == j {
            BigInt::one()
        } else if k == i {
            -BigInt::one()
        } else {
            BigInt::zero()
        }
    });
    log.push(format!("Q'' rows are e_{j} - e_{i} (positive orientation)"));

    let base = p.y.add(&q1.mul(&p.b));
    let mut c = BigInt::one();
    for r in 0..n1 {
        for k in 0..n3p {
            let need = &p.z[(r, k)] - &base[(r, k)];
            if need.is_positive() {
                c = c.max(ceil_div(&need, &gaps[k]));
            }
        }
    }
    log.push(format!("c = {c}"));
    let q = q2.scale(&c).add(&q1);
    let y_prime = p.y.add(&q.mul(&p.b));

    // α₂′ = α₂ ∘ [[I, −Q], [0, I]]
    let shift = IntMatrix::from_fn(n1 + n3, n1 + n3, |r, s| {
        if r == s {
            BigInt::one()
        } else if r < n1 && s >= n1 {
            -q[(r, s - n1)].clone()
        } else {
            BigInt::zero()
        }
    });
    let pi2_prime = p.pi2.mul(&shift);

    let out_ok = (0..n1).all(|r| (0..n3p).all(|k| y_prime[(r, k)] >= p.z[(r, k)]));
    let ones = vec![BigInt::one(); n3];
    let sum_ok = q.mul_vec(&ones) == lift;
    let unit_ok = p.g2.eq_elements(&pi2_prime.mul_vec(&y), &p.target_g2);
    let m_prime = IntMatrix::block_upper(&p.a, &y_prime, &p.b);
    let kills = m_prime.columns().iter().all(|col| p.g2.is_zero(&pi2_prime.mul_vec(col)));
    if !(out_ok && sum_ok && unit_ok && kills) {
        return Err(SynthError::ConstructionFailed(format!(
            "glue postconditions: Y'>=Z {out_ok}, Q1=z {sum_ok}, class of y {unit_ok}, relations {kills}"
        )));
    }
    let alpha2 = GroupHom::from_images(group_from_presentation(&m_prime), p.g2.clone(), &pi2_prime)
        .map_err(|e| SynthError::ConstructionFailed(e.to_string()))?;
    Ok(GlueResult { y_prime, q, c, lift, pi2_prime, alpha2, log })
}
