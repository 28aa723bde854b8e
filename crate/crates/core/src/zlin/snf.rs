use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::matrix::IntMatrix;

/// `u * m * v == d` with `u`, `v` unimodular and `d` in Smith normal form.
///
/// The inverses of `u` and `v` are carried along so that cokernel
/// coordinates can be lifted back to the ambient lattice without a
/// separate inversion.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmithDecomposition {
    pub u: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
    pub u_inv: IntMatrix,
    pub v_inv: IntMatrix,
}

impl SmithDecomposition {
    /// Diagonal entries `d_1 | d_2 | ...` (length `min(rows, cols)`).
    pub fn diagonal(&self) -> Vec<BigInt> {
        let k = self.d.rows().min(self.d.cols());
        (0..k).map(|i| self.d[(i, i)].clone()).collect()
    }

    /// Number of nonzero invariant factors.
    pub fn rank(&self) -> usize {
        self.diagonal().iter().filter(|x| !x.is_zero()).count()
    }
}

struct Work {
    d: IntMatrix,
    u: IntMatrix,
    u_inv: IntMatrix,
    v: IntMatrix,
    v_inv: IntMatrix,
}

impl Work {
    fn row_add(&mut self, dst: usize, src: usize, c: &BigInt) {
        self.d.add_row_multiple(dst, src, c);
        self.u.add_row_multiple(dst, src, c);
        self.u_inv.add_col_multiple(src, dst, &-c);
    }

    fn col_add(&mut self, dst: usize, src: usize, c: &BigInt) {
        self.d.add_col_multiple(dst, src, c);
        self.v.add_col_multiple(dst, src, c);
        self.v_inv.add_row_multiple(src, dst, &-c);
    }

    fn row_swap(&mut self, a: usize, b: usize) {
        self.d.swap_rows(a, b);
        self.u.swap_rows(a, b);
        self.u_inv.swap_cols(a, b);
    }

    fn col_swap(&mut self, a: usize, b: usize) {
        self.d.swap_cols(a, b);
        self.v.swap_cols(a, b);
        self.v_inv.swap_rows(a, b);
    }

    fn row_negate(&mut self, i: usize) {
        self.d.negate_row(i);
        self.u.negate_row(i);
        self.u_inv.negate_col(i);
    }

    fn min_abs_in(&self, t: usize) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize)> = None;
        for i in t..self.d.rows() {
            for j in t..self.d.cols() {
                let x = &self.d[(i, j)];
                if x.is_zero() {
                    continue;
                }
                if best.is_none_or(|(bi, bj)| x.abs() < self.d[(bi, bj)].abs()) {
                    best = Some((i, j));
                }
            }
        }
        best
    }

    fn min_abs_cross(&self, t: usize) -> (usize, usize) {
        let mut best = (t, t);
        let consider = |i: usize, j: usize, best: &mut (usize, usize)| {
            let x = &self.d[(i, j)];
            if !x.is_zero() && (self.d[*best].is_zero() || x.abs() < self.d[*best].abs()) {
                *best = (i, j);
            }
        };
        for i in t..self.d.rows() {
            consider(i, t, &mut best);
        }
        for j in t..self.d.cols() {
            consider(t, j, &mut best);
        }
        best
    }
}

/// Smith normal form with minimal-absolute-value pivoting.
pub fn snf(m: &IntMatrix) -> SmithDecomposition {
    let (rows, cols) = m.shape();
    let mut w = Work {
        d: m.clone(),
        u: IntMatrix::identity(rows),
        u_inv: IntMatrix::identity(rows),
        v: IntMatrix::identity(cols),
        v_inv: IntMatrix::identity(cols),
    };
    let steps = rows.min(cols);
    for t in 0..steps {
        let Some((pi, pj)) = w.min_abs_in(t) else {
            break;
        };
        w.row_swap(t, pi);
        w.col_swap(t, pj);
        loop {
            let pivot = w.d[(t, t)].clone();
            let mut clean = true;
            for i in t + 1..rows {
                if w.d[(i, t)].is_zero() {
                    continue;
                }
                let q = &w.d[(i, t)] / &pivot;
                w.row_add(i, t, &-q);
                if !w.d[(i, t)].is_zero() {
                    clean = false;
                }
            }
            for j in t + 1..cols {
                if w.d[(t, j)].is_zero() {
                    continue;
                }
                let q = &w.d[(t, j)] / &pivot;
                w.col_add(j, t, &-q);
                if !w.d[(t, j)].is_zero() {
                    clean = false;
                }
            }
            if !clean {
                let (i, j) = w.min_abs_cross(t);
                w.row_swap(t, i);
                w.col_swap(t, j);
                continue;
            }
            // Divisibility: pull an offending row into the pivot row.
            let offending = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| !(&w.d[(i, j)] % &pivot).is_zero()));
            match offending {
                Some(i) => w.row_add(t, i, &BigInt::one()),
                None => break,
            }
        }
        if w.d[(t, t)].is_negative() {
            w.row_negate(t);
        }
    }
    SmithDecomposition { u: w.u, d: w.d, v: w.v, u_inv: w.u_inv, v_inv: w.v_inv }
}

/// A free basis of `{x : m x = 0}`, read off from the columns of `V` that
/// meet zero invariant factors.
pub fn kernel_basis(m: &IntMatrix) -> Vec<Vec<BigInt>> {
    let s = snf(m);
    let r = s.rank();
    (r..m.cols()).map(|j| s.v.column(j)).collect()
}

/// Returns some `x` with `m x = b` over the integers, or `None` when `b` is
/// not in the image lattice.
pub fn solve(m: &IntMatrix, b: &[BigInt]) -> Option<Vec<BigInt>> {
    assert_eq!(m.rows(), b.len(), "right-hand side length mismatch");
    let s = snf(m);
    solve_with(&s, b)
}

pub(crate) fn solve_with(s: &SmithDecomposition, b: &[BigInt]) -> Option<Vec<BigInt>> {
    let c = s.u.mul_vec(b);
    let diag = s.diagonal();
    let mut w = vec![BigInt::zero(); s.d.cols()];
    for (i, ci) in c.iter().enumerate() {
        let di = diag.get(i).cloned().unwrap_or_else(BigInt::zero);
        if di.is_zero() {
            if !ci.is_zero() {
                return None;
            }
        } else {
            if !(ci % &di).is_zero() {
                return None;
            }
            w[i] = ci / &di;
        }
    }
    Some(s.v.mul_vec(&w))
}

/// Inverse of a unimodular matrix, or `None` if it is not unimodular.
pub fn unimodular_inverse(m: &IntMatrix) -> Option<IntMatrix> {
    if !m.is_square() {
        return None;
    }
    let s = snf(m);
    if s.diagonal().iter().any(|d| !d.is_one()) {
        return None;
    }
    // u m v = I  =>  m^{-1} = v u
    Some(s.v.mul(&s.u))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zlin::matrix::vec_from_i64;

    fn check(m: &IntMatrix) -> SmithDecomposition {
        let s = snf(m);
        assert_eq!(s.u.mul(m).mul(&s.v), s.d);
        assert!(s.u.is_unimodular() && s.v.is_unimodular());
        assert_eq!(s.u.mul(&s.u_inv), IntMatrix::identity(m.rows()));
        assert_eq!(s.v.mul(&s.v_inv), IntMatrix::identity(m.cols()));
        s
    }

    #[test]
    fn identity_is_its_own_normal_form() {
        let s = check(&IntMatrix::identity(2));
        assert_eq!(s.d, IntMatrix::identity(2));
    }

    #[test]
    fn gcd_of_minors_example() {
        // d1 = gcd(2,4,6,8) = 2, d1*d2 = |det| = 8
        let s = check(&IntMatrix::from_rows(&[[2, 4], [6, 8]]));
        assert_eq!(s.diagonal(), vec_from_i64(&[2, 4]));
    }

    #[test]
    fn rank_one_all_ones() {
        let s = check(&IntMatrix::from_rows(&[[1, 1], [1, 1]]));
        assert_eq!(s.diagonal(), vec_from_i64(&[1, 0]));
    }

    #[test]
    fn empty_shapes() {
        let s = check(&IntMatrix::zeros(0, 3));
        assert_eq!(s.v, IntMatrix::identity(3));
        let s = check(&IntMatrix::zeros(2, 0));
        assert_eq!(s.u, IntMatrix::identity(2));
    }

    #[test]
    fn kernel_examples() {
        assert!(kernel_basis(&IntMatrix::identity(2)).is_empty());
        for m in [IntMatrix::from_rows(&[[1, 1], [1, 1]]), IntMatrix::from_rows(&[[1, 1]])] {
            let k = kernel_basis(&m);
            assert_eq!(k.len(), 1);
            assert!(m.mul_vec(&k[0]).iter().all(Zero::is_zero));
            // generator of the kernel lattice is +-(1,-1)
            assert_eq!(k[0][0].abs(), BigInt::one());
            assert_eq!(&k[0][0], &-&k[0][1]);
        }
    }

    #[test]
    fn solve_examples() {
        let two = IntMatrix::from_rows(&[[2]]);
        assert_eq!(solve(&two, &vec_from_i64(&[4])), Some(vec_from_i64(&[2])));
        assert_eq!(solve(&two, &vec_from_i64(&[3])), None);
        let ones = IntMatrix::from_rows(&[[1, 1], [1, 1]]);
        let b = vec_from_i64(&[1, 1]);
        let x = solve(&ones, &b).unwrap();
        assert_eq!(ones.mul_vec(&x), b);
        assert_eq!(solve(&ones, &vec_from_i64(&[1, 0])), None);
    }

    #[test]
    fn unimodular_inverse_roundtrip() {
        let m = IntMatrix::from_rows(&[[2, 1], [1, 1]]);
        let inv = unimodular_inverse(&m).unwrap();
        assert_eq!(m.mul(&inv), IntMatrix::identity(2));
        assert!(unimodular_inverse(&IntMatrix::from_rows(&[[2]])).is_none());
    }
}
