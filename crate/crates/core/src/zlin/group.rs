use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::matrix::IntMatrix;
use super::snf::{kernel_basis, snf, solve, SmithDecomposition};
use super::ZlinError;

/// Element of a group in canonical coordinates: torsion coordinates first
/// (reduced into `[0, d_i)`), then free coordinates.
pub type Element = Vec<BigInt>;

/// Finitely generated abelian group presented as the cokernel of an integer
/// matrix, normalized to invariant factors plus free rank.
#[derive(Clone, PartialEq, Eq)]
pub struct FgAbelianGroup {
    presentation: IntMatrix,
    torsion: Vec<BigInt>,
    free_rank: usize,
    /// ambient coordinates -> canonical coordinates (before reduction)
    reduce: IntMatrix,
    /// canonical generator -> ambient representative
    lift: IntMatrix,
}

impl FgAbelianGroup {
    /// Cokernel of `m`, viewed as a map from its column space to its row
    /// space.
    pub fn from_presentation(m: &IntMatrix) -> Self {
        let s = snf(m);
        Self::from_smith(m, &s)
    }

    pub(crate) fn from_smith(m: &IntMatrix, s: &SmithDecomposition) -> Self {
        let diag = s.diagonal();
        let mut torsion = Vec::new();
        let mut keep = Vec::new();
        let mut free_rank = 0;
        for i in 0..m.rows() {
            let d = diag.get(i).cloned().unwrap_or_else(BigInt::zero);
            if d.is_one() {
                continue;
            }
            keep.push(i);
            if d.is_zero() {
                free_rank += 1;
            } else {
                torsion.push(d);
            }
        }
        FgAbelianGroup {
            presentation: m.clone(),
            torsion,
            free_rank,
            reduce: s.u.select_rows(&keep),
            lift: s.u_inv.select_columns(&keep),
        }
    }

    /// The group `Z/d_1 + ... + Z/d_t + Z^free` with identity coordinates.
    pub fn canonical(torsion: &[BigInt], free_rank: usize) -> Result<Self, ZlinError> {
        for (i, d) in torsion.iter().enumerate() {
            if *d < BigInt::from(2) {
                return Err(ZlinError::BadInvariantFactors(format!("invariant factor {d} must be at least 2")));
            }
            if i > 0 && !(d % &torsion[i - 1]).is_zero() {
                return Err(ZlinError::BadInvariantFactors(format!("{} does not divide {d}", torsion[i - 1])));
            }
        }
        let t = torsion.len();
        let n = t + free_rank;
        let presentation = IntMatrix::from_fn(n, t, |i, j| if i == j { torsion[i].clone() } else { BigInt::zero() });
        Ok(FgAbelianGroup {
            presentation,
            torsion: torsion.to_vec(),
            free_rank,
            reduce: IntMatrix::identity(n),
            lift: IntMatrix::identity(n),
        })
    }

    pub fn free(rank: usize) -> Self {
        Self::canonical(&[], rank).expect("free group is always canonical")
    }

    pub fn trivial() -> Self {
        Self::free(0)
    }

    pub fn cyclic(order: i64) -> Self {
        if order == 0 {
            return Self::free(1);
        }
        if order.abs() == 1 {
            return Self::trivial();
        }
        Self::canonical(&[BigInt::from(order.abs())], 0).expect("cyclic group")
    }

    pub fn presentation(&self) -> &IntMatrix {
        &self.presentation
    }

    pub fn torsion(&self) -> &[BigInt] {
        &self.torsion
    }

    pub fn free_rank(&self) -> usize {
        self.free_rank
    }

    /// Number of canonical generators.
    pub fn ngens(&self) -> usize {
        self.torsion.len() + self.free_rank
    }

    /// Dimension of the ambient lattice of the presentation.
    pub fn ambient_dim(&self) -> usize {
        self.presentation.rows()
    }

    pub fn is_trivial(&self) -> bool {
        self.ngens() == 0
    }

    pub fn is_free(&self) -> bool {
        self.torsion.is_empty()
    }

    pub fn same_canonical_form(&self, other: &FgAbelianGroup) -> bool {
        self.torsion == other.torsion && self.free_rank == other.free_rank
    }

    /// Modulus of each canonical coordinate (0 for free coordinates).
    pub fn moduli(&self) -> Vec<BigInt> {
        self.torsion.iter().cloned().chain(std::iter::repeat_n(BigInt::zero(), self.free_rank)).collect()
    }

    pub fn reduce_matrix(&self) -> &IntMatrix {
        &self.reduce
    }

    pub fn lift_matrix(&self) -> &IntMatrix {
        &self.lift
    }

    pub fn zero(&self) -> Element {
        vec![BigInt::zero(); self.ngens()]
    }

    pub fn generator(&self, i: usize) -> Element {
        let mut e = self.zero();
        e[i] = BigInt::one();
        self.reduce_coords(&e)
    }

    /// Reduces torsion coordinates into `[0, d)`.
    pub fn reduce_coords(&self, x: &[BigInt]) -> Element {
        assert_eq!(x.len(), self.ngens(), "element has wrong number of coordinates");
        x.iter()
            .enumerate()
            .map(|(i, v)| match self.torsion.get(i) {
                Some(d) => v.mod_floor(d),
                None => v.clone(),
            })
            .collect()
    }

    /// Class of an ambient lattice vector.
    pub fn class_of(&self, ambient: &[BigInt]) -> Element {
        self.reduce_coords(&self.reduce.mul_vec(ambient))
    }

    /// Ambient representative of an element.
    pub fn lift(&self, x: &[BigInt]) -> Vec<BigInt> {
        self.lift.mul_vec(x)
    }

    pub fn is_zero(&self, x: &[BigInt]) -> bool {
        self.reduce_coords(x).iter().all(Zero::is_zero)
    }

    pub fn eq_elements(&self, a: &[BigInt], b: &[BigInt]) -> bool {
        self.reduce_coords(a) == self.reduce_coords(b)
    }

    pub fn add(&self, a: &[BigInt], b: &[BigInt]) -> Element {
        let s: Vec<BigInt> = a.iter().zip(b).map(|(x, y)| x + y).collect();
        self.reduce_coords(&s)
    }

    pub fn sub(&self, a: &[BigInt], b: &[BigInt]) -> Element {
        let s: Vec<BigInt> = a.iter().zip(b).map(|(x, y)| x - y).collect();
        self.reduce_coords(&s)
    }

    pub fn neg(&self, a: &[BigInt]) -> Element {
        let s: Vec<BigInt> = a.iter().map(|x| -x).collect();
        self.reduce_coords(&s)
    }

    pub fn scale(&self, c: &BigInt, a: &[BigInt]) -> Element {
        let s: Vec<BigInt> = a.iter().map(|x| c * x).collect();
        self.reduce_coords(&s)
    }

    /// `ngens x torsion-count` matrix whose columns are the torsion relations
    /// `d_i e_i`.
    pub fn relation_matrix(&self) -> IntMatrix {
        let k = self.ngens();
        let t = self.torsion.len();
        IntMatrix::from_fn(k, t, |i, j| if i == j { self.torsion[j].clone() } else { BigInt::zero() })
    }

    /// Coefficients `c` with `sum c_i gens_i == x` in the group, if any.
    pub fn express_in(&self, gens: &[Element], x: &[BigInt]) -> Option<Vec<BigInt>> {
        let g = IntMatrix::from_columns(self.ngens(), gens);
        let sys = g.hstack(&self.relation_matrix());
        solve(&sys, x).map(|c| c[..gens.len()].to_vec())
    }

    pub fn in_subgroup(&self, gens: &[Element], x: &[BigInt]) -> bool {
        self.is_zero(x) || self.express_in(gens, x).is_some()
    }

    /// Equality of the subgroups generated by `a` and `b`, by double inclusion.
    pub fn subgroups_equal(&self, a: &[Element], b: &[Element]) -> bool {
        a.iter().all(|x| self.in_subgroup(b, x)) && b.iter().all(|x| self.in_subgroup(a, x))
    }

    pub fn describe(&self) -> String {
        let mut parts: Vec<String> = self.torsion.iter().map(|d| format!("Z/{d}")).collect();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        if parts.is_empty() {
            "0".to_string()
        } else {
            parts.join(" + ")
        }
    }
}

impl fmt::Debug for FgAbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FgAbelianGroup({})", self.describe())
    }
}

impl fmt::Display for FgAbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.describe())
    }
}

/// Homomorphism between finitely generated abelian groups, acting on
/// canonical coordinates.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GroupHom {
    source: FgAbelianGroup,
    target: FgAbelianGroup,
    matrix: IntMatrix,
}

impl GroupHom {
    /// Validates shape and well-definedness (torsion generators of order `d`
    /// must land on elements killed by `d`).
    pub fn new(source: FgAbelianGroup, target: FgAbelianGroup, matrix: IntMatrix) -> Result<Self, ZlinError> {
        if matrix.shape() != (target.ngens(), source.ngens()) {
            return Err(ZlinError::ShapeMismatch(format!(
                "map matrix is {}x{}, expected {}x{}",
                matrix.rows(),
                matrix.cols(),
                target.ngens(),
                source.ngens()
            )));
        }
        let cols: Vec<Element> = matrix.columns().iter().map(|c| target.reduce_coords(c)).collect();
        for (i, d) in source.torsion().iter().enumerate() {
            if !target.is_zero(&target.scale(d, &cols[i])) {
                return Err(ZlinError::NotWellDefined(format!("generator {i} has order {d} but its image does not")));
            }
        }
        let matrix = IntMatrix::from_columns(target.ngens(), &cols);
        Ok(GroupHom { source, target, matrix })
    }

    /// Map determined by an ambient-level matrix `f: Z^{n_src} -> Z^{n_tgt}`.
    pub fn from_ambient(source: FgAbelianGroup, target: FgAbelianGroup, f: &IntMatrix) -> Result<Self, ZlinError> {
        let m = target.reduce_matrix().mul(f).mul(source.lift_matrix());
        Self::new(source, target, m)
    }

    /// Map given by the images of the source's ambient generators, in target
    /// coordinates. The caller is responsible for the images killing the
    /// source's relations.
    pub fn from_images(source: FgAbelianGroup, target: FgAbelianGroup, f: &IntMatrix) -> Result<Self, ZlinError> {
        let m = f.mul(source.lift_matrix());
        Self::new(source, target, m)
    }

    pub fn identity(g: &FgAbelianGroup) -> Self {
        GroupHom::new(g.clone(), g.clone(), IntMatrix::identity(g.ngens())).expect("identity is well defined")
    }

    pub fn zero(source: &FgAbelianGroup, target: &FgAbelianGroup) -> Self {
        GroupHom::new(source.clone(), target.clone(), IntMatrix::zeros(target.ngens(), source.ngens()))
            .expect("zero map is well defined")
    }

    pub fn source(&self) -> &FgAbelianGroup {
        &self.source
    }

    pub fn target(&self) -> &FgAbelianGroup {
        &self.target
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    pub fn apply(&self, x: &[BigInt]) -> Element {
        self.target.reduce_coords(&self.matrix.mul_vec(&self.source.reduce_coords(x)))
    }

    /// `self ∘ first`
    pub fn after(&self, first: &GroupHom) -> Result<GroupHom, ZlinError> {
        if !first.target.same_canonical_form(&self.source) {
            return Err(ZlinError::ShapeMismatch("composition of non-composable maps".into()));
        }
        GroupHom::new(first.source.clone(), self.target.clone(), self.matrix.mul(&first.matrix))
    }

    pub fn is_zero(&self) -> bool {
        (0..self.source.ngens()).all(|i| self.target.is_zero(&self.matrix.column(i)))
    }

    pub fn images_of_generators(&self) -> Vec<Element> {
        (0..self.source.ngens()).map(|i| self.apply(&self.source.generator(i))).collect()
    }

    /// Generators of the kernel, as elements of the source.
    pub fn kernel(&self) -> Vec<Element> {
        let sys = self.matrix.hstack(&self.target.relation_matrix());
        let k = self.source.ngens();
        kernel_basis(&sys)
            .into_iter()
            .map(|v| self.source.reduce_coords(&v[..k]))
            .filter(|v| !self.source.is_zero(v))
            .collect()
    }

    /// Generators of the image, as elements of the target.
    pub fn image(&self) -> Vec<Element> {
        self.images_of_generators()
    }

    /// Some `x` with `self(x) == y`, if `y` is in the image.
    pub fn preimage(&self, y: &[BigInt]) -> Option<Element> {
        let sys = self.matrix.hstack(&self.target.relation_matrix());
        solve(&sys, y).map(|c| self.source.reduce_coords(&c[..self.source.ngens()]))
    }

    pub fn is_surjective(&self) -> bool {
        let sys = self.matrix.hstack(&self.target.relation_matrix());
        FgAbelianGroup::from_presentation(&sys).is_trivial()
    }

    /// Bijectivity: equal canonical forms plus surjectivity (finitely
    /// generated abelian groups are Hopfian).
    pub fn is_isomorphism(&self) -> bool {
        self.source.same_canonical_form(&self.target) && self.is_surjective()
    }

    pub fn inverse(&self) -> Option<GroupHom> {
        if !self.is_isomorphism() {
            return None;
        }
        let cols: Option<Vec<Element>> =
            (0..self.target.ngens()).map(|j| self.preimage(&self.target.generator(j))).collect();
        let m = IntMatrix::from_columns(self.source.ngens(), &cols?);
        let inv = GroupHom::new(self.target.clone(), self.source.clone(), m).ok()?;
        verify_certificate(self, &inv).then_some(inv)
    }

    /// Equality as maps (columns compared after reduction).
    pub fn same_map(&self, other: &GroupHom) -> bool {
        self.source.same_canonical_form(&other.source)
            && self.target.same_canonical_form(&other.target)
            && (0..self.source.ngens())
                .all(|i| self.target.eq_elements(&self.matrix.column(i), &other.matrix.column(i)))
    }
}

pub fn is_isomorphism(h: &GroupHom) -> bool {
    h.is_isomorphism()
}

/// Checks that `hinv` is a two-sided inverse of `h`.
pub fn verify_certificate(h: &GroupHom, hinv: &GroupHom) -> bool {
    let (Ok(a), Ok(b)) = (hinv.after(h), h.after(hinv)) else {
        return false;
    };
    a.same_map(&GroupHom::identity(h.source())) && b.same_map(&GroupHom::identity(h.target()))
}

pub fn group_from_presentation(m: &IntMatrix) -> FgAbelianGroup {
    FgAbelianGroup::from_presentation(m)
}

/// Map `coker(m) -> coker(n)` induced by `f`, provided `f` carries the
/// relations of `m` into the relations of `n`.
pub fn induced_hom(m: &IntMatrix, n: &IntMatrix, f: &IntMatrix) -> Result<GroupHom, ZlinError> {
    if f.shape() != (n.rows(), m.rows()) {
        return Err(ZlinError::ShapeMismatch(format!(
            "ambient map is {}x{}, expected {}x{}",
            f.rows(),
            f.cols(),
            n.rows(),
            m.rows()
        )));
    }
    let image = f.mul(m);
    let ns = snf(n);
    for j in 0..image.cols() {
        if super::snf::solve_with(&ns, &image.column(j)).is_none() {
            return Err(ZlinError::NotWellDefined(format!(
                "relation {j} is not carried into the image of the target presentation"
            )));
        }
    }
    let src = FgAbelianGroup::from_presentation(m);
    let tgt = FgAbelianGroup::from_smith(n, &ns);
    GroupHom::from_ambient(src, tgt, f)
}
