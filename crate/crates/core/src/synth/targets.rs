//! Augmented invariants of the shape the pipeline accepts, assembled from a
//! few integers. Used by the CLI `fixtures` command and by tests.

use num_bigint::BigInt;
use num_traits::Zero;

use crate::ktheory::{ConeCert, ScaleCert};
use crate::sixterm::{Invariant, InvariantKind, SixtermError};
use crate::zlin::{group_from_presentation, kernel_basis, vec_from_i64, FgAbelianGroup, GroupHom, IntMatrix};

/// Order on an AF ideal with `K₀ = Z`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AfIdeal {
    /// `Z` with the usual order (compact operators)
    Tail,
    /// the stationary doubling order
    Doubling,
}

impl AfIdeal {
    fn cone(self) -> ConeCert {
        match self {
            AfIdeal::Tail => ConeCert::Simplicial,
            AfIdeal::Doubling => ConeCert::StationaryDG(IntMatrix::from_rows(&[[2]])),
        }
    }
}

/// Data for an extension `0 → Z → G₂ → G₃ → 0` with `G₃ = ⊕Z/dₖ ⊕ Z^free`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TargetSpec {
    pub ideal: AfIdeal,
    pub torsion: Vec<i64>,
    pub free: usize,
    /// rank of `F₃`, at most `free`
    pub f3: usize,
    /// each basis vector of `F₃` goes to this multiple of the generator of `G₁`
    pub index: i64,
    /// `dₖ` times a lift of the `k`-th torsion generator is `ext[k]` in `G₁`
    pub ext: Vec<i64>,
    /// the unit class in `G₃`
    pub unit: Vec<i64>,
    /// ideal coordinate of the lifted unit in `G₂`
    pub shift: i64,
}

impl TargetSpec {
    pub fn new(ideal: AfIdeal, torsion: &[i64], free: usize) -> Self {
        TargetSpec {
            ideal,
            torsion: torsion.to_vec(),
            free,
            f3: 0,
            index: 0,
            ext: vec![0; torsion.len()],
            unit: vec![0; torsion.len() + free],
            shift: 0,
        }
    }

    pub fn describe(&self) -> String {
        format!(
            "{:?} G3 tors {:?} free {} F3 {} index {} ext {:?} unit {:?} shift {}",
            self.ideal, self.torsion, self.free, self.f3, self.index, self.ext, self.unit, self.shift
        )
    }

    pub fn build(&self) -> Result<Invariant, SixtermError> {
        let bad = |m: &str| Err(SixtermError::Malformed(m.to_string()));
        let t = self.torsion.len();
        let r = self.free;
        if self.f3 > r || self.ext.len() != t || self.unit.len() != t + r {
            return bad("inconsistent target data");
        }
        if self.f3 == 0 && self.index != 0 {
            return bad("a nonzero index map needs F3 of positive rank");
        }
        let tors: Vec<BigInt> = self.torsion.iter().map(|&d| BigInt::from(d)).collect();
        let g1 = FgAbelianGroup::free(1);
        let g3 = FgAbelianGroup::canonical(&tors, r).map_err(SixtermError::Zlin)?;
        // G₂ on generators (ideal, torsion lifts, free lifts)
        let dim = 1 + t + r;
        let mut rels: Vec<Vec<BigInt>> = Vec::new();
        if self.index != 0 {
            let mut c = vec![BigInt::zero(); dim];
            c[0] = BigInt::from(self.index);
            rels.push(c);
        }
        for k in 0..t {
            let mut c = vec![BigInt::zero(); dim];
            c[0] = BigInt::from(self.ext[k]);
            c[1 + k] = tors[k].clone();
            rels.push(c);
        }
        let g2 = group_from_presentation(&IntMatrix::from_columns(dim, &rels));
        let e0 = IntMatrix::from_fn(dim, 1, |i, _| if i == 0 { 1.into() } else { BigInt::zero() });
        let eps = GroupHom::from_ambient(g1.clone(), g2.clone(), &e0).map_err(SixtermError::Zlin)?;
        let drop = IntMatrix::from_fn(t + r, dim, |i, j| if j == i + 1 { 1.into() } else { BigInt::zero() });
        let gamma = GroupHom::from_ambient(g2.clone(), g3.clone(), &drop).map_err(SixtermError::Zlin)?;

        let f3 = FgAbelianGroup::free(self.f3);
        let d1 = IntMatrix::from_fn(1, self.f3, |_, _| BigInt::from(self.index));
        let f2_basis = kernel_basis(&d1);
        let f2 = FgAbelianGroup::free(f2_basis.len());
        let gamma1 = IntMatrix::from_columns(self.f3, &f2_basis);
        let f1 = FgAbelianGroup::trivial();

        let h1 = FgAbelianGroup::free(1);
        let h2 = FgAbelianGroup::free(2);
        let h3 = FgAbelianGroup::free(1);
        let h2_elem = vec_from_i64(&[self.shift, 1]);
        let mut lift = vec![BigInt::from(self.shift)];
        lift.extend(self.unit.iter().map(|&x| BigInt::from(x)));
        let g2_elem = g2.class_of(&lift);
        let g3_elem = g3.reduce_coords(&vec_from_i64(&self.unit));
        let eta2 = IntMatrix::from_columns(
            g2.ngens(),
            &[
                eps.apply(&vec_from_i64(&[1])),
                g2.class_of(&{
                    let mut v = vec![BigInt::zero()];
                    v.extend(self.unit.iter().map(|&x| BigInt::from(x)));
                    v
                }),
            ],
        );
        let maps = vec![
            IntMatrix::from_rows(&[[1], [0]]),
            IntMatrix::from_rows(&[[0, 1]]),
            IntMatrix::identity(1),
            eta2,
            IntMatrix::column_vector(&g3_elem),
            eps.matrix().clone(),
            gamma.matrix().clone(),
            IntMatrix::zeros(0, g3.ngens()),
            IntMatrix::zeros(f2.ngens(), 0),
            gamma1,
            d1,
        ];
        let groups = vec![h1, h2, h3, g1, g2, g3.clone(), f1, f2, f3];
        let mut inv = Invariant::from_parts(InvariantKind::Augmented, groups, maps)?;
        inv.unitality = Some(1);
        let cone = self.ideal.cone();
        inv.node_mut("H1").cone = Some(cone.clone());
        inv.node_mut("H1").scale = Some(ScaleCert::Full);
        inv.node_mut("G1").cone = Some(cone);
        inv.node_mut("G1").scale = Some(ScaleCert::Full);
        inv.node_mut("H2").cone = Some(ConeCert::Lexicographic);
        inv.node_mut("H2").scale = Some(ScaleCert::Shifted { base: h2_elem.clone(), sub: Box::new(ScaleCert::Full) });
        inv.node_mut("H3").cone = Some(ConeCert::Simplicial);
        inv.node_mut("H3").scale = Some(ScaleCert::Unit(vec_from_i64(&[1])));
        inv.node_mut("G2").cone = Some(ConeCert::Full);
        inv.node_mut("G3").cone = Some(ConeCert::Full);
        inv.node_mut("G3").scale = Some(ScaleCert::Unit(g3_elem.clone()));
        inv.set_element("h2", "H2", h2_elem);
        inv.set_element("g2", "G2", g2_elem);
        inv.set_element("g3", "G3", g3_elem);
        inv.validate()?;
        Ok(inv)
    }
}

/// A fixed suite covering the supported shapes.
pub fn standard_suite() -> Vec<TargetSpec> {
    let mut out = Vec::new();
    for ideal in [AfIdeal::Tail, AfIdeal::Doubling] {
        out.push(TargetSpec::new(ideal, &[], 0));
        let mut s = TargetSpec::new(ideal, &[2], 0);
        s.unit = vec![1];
        s.ext = vec![1];
        out.push(s);
        let mut s = TargetSpec::new(ideal, &[2, 4], 0);
        s.unit = vec![1, 3];
        s.ext = vec![0, 1];
        s.shift = -2;
        out.push(s);
        let mut s = TargetSpec::new(ideal, &[], 1);
        s.f3 = 1;
        out.push(s);
        let mut s = TargetSpec::new(ideal, &[], 1);
        s.f3 = 1;
        s.index = 3;
        s.unit = vec![2];
        out.push(s);
        let mut s = TargetSpec::new(ideal, &[], 1);
        s.unit = vec![-1];
        s.shift = 1;
        out.push(s);
    }
    out
}
