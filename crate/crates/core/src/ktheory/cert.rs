use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use super::KtheoryError;
use crate::zlin::{format_vector, parse_vector, Element, FgAbelianGroup, IntMatrix};

/// Iteration cap used for positivity and stabilization unless overridden.
pub const DEFAULT_CAP: usize = 64;

/// Three-valued truth.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Tri {
    Yes,
    No,
    Unknown,
}

impl Tri {
    pub fn from_bool(b: bool) -> Tri {
        if b {
            Tri::Yes
        } else {
            Tri::No
        }
    }

    pub fn and(self, other: Tri) -> Tri {
        match (self, other) {
            (Tri::No, _) | (_, Tri::No) => Tri::No,
            (Tri::Yes, Tri::Yes) => Tri::Yes,
            _ => Tri::Unknown,
        }
    }

    pub fn or(self, other: Tri) -> Tri {
        match (self, other) {
            (Tri::Yes, _) | (_, Tri::Yes) => Tri::Yes,
            (Tri::No, Tri::No) => Tri::No,
            _ => Tri::Unknown,
        }
    }

    pub fn any(items: impl IntoIterator<Item = Tri>) -> Tri {
        items.into_iter().fold(Tri::No, Tri::or)
    }

    pub fn all(items: impl IntoIterator<Item = Tri>) -> Tri {
        items.into_iter().fold(Tri::Yes, Tri::and)
    }
}

impl std::ops::Not for Tri {
    type Output = Tri;

    fn not(self) -> Tri {
        match self {
            Tri::Yes => Tri::No,
            Tri::No => Tri::Yes,
            Tri::Unknown => Tri::Unknown,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Positivity {
    Positive,
    NotPositive,
    Inconclusive,
}

impl From<Positivity> for Tri {
    fn from(p: Positivity) -> Tri {
        match p {
            Positivity::Positive => Tri::Yes,
            Positivity::NotPositive => Tri::No,
            Positivity::Inconclusive => Tri::Unknown,
        }
    }
}

/// Positive cone certificate for a K₀ group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConeCert {
    /// every element is positive
    Full,
    /// `Z^n` with the coordinatewise order
    Simplicial,
    /// stationary dimension group `lim (Z^n, Aᵗ)` in stage coordinates
    StationaryDG(IntMatrix),
    /// abstract input: only the flag "cone is everything" is known
    Declared(bool),
    /// `ε̃(H₁⁺) ∪ γ̃⁻¹({1,2,...})`, evaluated against the surrounding
    /// short exact row
    Lexicographic,
}

impl ConeCert {
    /// Whether the certificate asserts `K₀⁺ = K₀`; `Unknown` when it
    /// cannot tell without more context.
    pub fn is_full(&self, g: &FgAbelianGroup) -> Tri {
        match self {
            ConeCert::Full | ConeCert::Declared(true) => Tri::Yes,
            _ if g.is_trivial() => Tri::Yes,
            ConeCert::Declared(false) | ConeCert::Simplicial | ConeCert::StationaryDG(_) => Tri::No,
            ConeCert::Lexicographic => Tri::No,
        }
    }

    /// Cone membership; `Lexicographic` and non-full declared cones answer
    /// `Unknown` here.
    pub fn contains(&self, g: &FgAbelianGroup, x: &[BigInt], cap: usize) -> Tri {
        if g.is_zero(x) {
            return Tri::Yes;
        }
        match self {
            ConeCert::Full | ConeCert::Declared(true) => Tri::Yes,
            ConeCert::Simplicial => Tri::from_bool(g.reduce_coords(x).iter().all(|v| !v.is_negative())),
            ConeCert::StationaryDG(a) => match dg_positive(a, x, cap) {
                Ok(p) => p.into(),
                Err(_) => Tri::Unknown,
            },
            ConeCert::Declared(false) | ConeCert::Lexicographic => Tri::Unknown,
        }
    }
}

impl fmt::Display for ConeCert {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConeCert::Full => f.write_str("full"),
            ConeCert::Simplicial => f.write_str("simplicial"),
            ConeCert::StationaryDG(a) => write!(f, "stationary {a}"),
            ConeCert::Declared(true) => f.write_str("declared full"),
            ConeCert::Declared(false) => f.write_str("declared notfull"),
            ConeCert::Lexicographic => f.write_str("lex"),
        }
    }
}

impl ConeCert {
    pub fn parse_tokens(toks: &[&str]) -> Result<ConeCert, String> {
        match toks {
            ["full"] => Ok(ConeCert::Full),
            ["simplicial"] => Ok(ConeCert::Simplicial),
            ["stationary", m] => Ok(ConeCert::StationaryDG(m.parse()?)),
            ["declared", "full"] => Ok(ConeCert::Declared(true)),
            ["declared", "notfull"] => Ok(ConeCert::Declared(false)),
            ["lex"] => Ok(ConeCert::Lexicographic),
            _ => Err(format!("bad cone certificate `{}`", toks.join(" "))),
        }
    }
}

/// Scale certificate for a K₀ group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ScaleCert {
    /// the scale is the whole positive cone
    Full,
    /// `{x : 0 ≤ x ≤ s}` for some listed `s`
    BoundedBy(Vec<Element>),
    /// `{x : 0 ≤ x ≤ Aⁿ·seed}` for some `n` (`A` acting on canonical
    /// coordinates)
    OrbitOf { seed: Element, matrix: IntMatrix },
    /// `{x : 0 ≤ x ≤ u}`
    Unit(Element),
    /// `{x : 0 ≤ x ≤ base + ε̃(q)}` with `q` in the given scale of the
    /// subgroup (the middle term of a short exact row)
    Shifted { base: Element, sub: Box<ScaleCert> },
    /// `{h ≥ 0 : base + ε̃(h) ∈ Σ}` pulled back from the middle term
    Induced { base: Element },
}

impl ScaleCert {
    /// Membership for the self-contained certificates. `pos` decides cone
    /// membership in the ambient group; `Shifted` and `Induced` need the
    /// surrounding diagram and answer `Unknown` here.
    pub fn contains_with(&self, g: &FgAbelianGroup, x: &[BigInt], cap: usize, pos: &dyn Fn(&[BigInt]) -> Tri) -> Tri {
        let le = |a: &[BigInt], b: &[BigInt]| pos(&g.sub(b, a));
        let nonneg = pos(x);
        match self {
            ScaleCert::Full => nonneg,
            ScaleCert::Unit(u) => nonneg.and(le(x, u)),
            ScaleCert::BoundedBy(list) => nonneg.and(Tri::any(list.iter().map(|s| le(x, s)))),
            ScaleCert::OrbitOf { seed, matrix } => {
                if nonneg == Tri::No {
                    return Tri::No;
                }
                let mut s = g.reduce_coords(seed);
                for _ in 0..=cap {
                    if le(x, &s) == Tri::Yes {
                        return nonneg;
                    }
                    s = g.reduce_coords(&matrix.mul_vec(&s));
                }
                Tri::Unknown
            }
            ScaleCert::Shifted { .. } | ScaleCert::Induced { .. } => Tri::Unknown,
        }
    }

    pub fn parse_tokens(toks: &[&str]) -> Result<ScaleCert, String> {
        match toks {
            ["full"] => Ok(ScaleCert::Full),
            ["bounded", list] => Ok(ScaleCert::BoundedBy(list.split('|').map(parse_vector).collect::<Result<_, _>>()?)),
            ["orbit", seed, m] => Ok(ScaleCert::OrbitOf { seed: parse_vector(seed)?, matrix: m.parse()? }),
            ["unit", u] => Ok(ScaleCert::Unit(parse_vector(u)?)),
            ["shifted", base, rest @ ..] => {
                Ok(ScaleCert::Shifted { base: parse_vector(base)?, sub: Box::new(ScaleCert::parse_tokens(rest)?) })
            }
            ["induced", base] => Ok(ScaleCert::Induced { base: parse_vector(base)? }),
            _ => Err(format!("bad scale certificate `{}`", toks.join(" "))),
        }
    }
}

impl fmt::Display for ScaleCert {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScaleCert::Full => f.write_str("full"),
            ScaleCert::BoundedBy(list) => {
                let parts: Vec<String> = list.iter().map(|v| format_vector(v)).collect();
                write!(f, "bounded {}", parts.join("|"))
            }
            ScaleCert::OrbitOf { seed, matrix } => write!(f, "orbit {} {matrix}", format_vector(seed)),
            ScaleCert::Unit(u) => write!(f, "unit {}", format_vector(u)),
            ScaleCert::Shifted { base, sub } => write!(f, "shifted {} {sub}", format_vector(base)),
            ScaleCert::Induced { base } => write!(f, "induced {}", format_vector(base)),
        }
    }
}

/// Primitivity by the Wielandt bound: a nonnegative `n×n` matrix is
/// primitive iff its `((n−1)²+1)`-th power is strictly positive.
pub fn is_primitive(a: &IntMatrix) -> bool {
    if !a.is_square() || a.rows() == 0 || !a.is_nonnegative() {
        return false;
    }
    let n = a.rows();
    let pattern: Vec<Vec<bool>> = (0..n).map(|i| (0..n).map(|j| !a[(i, j)].is_zero()).collect()).collect();
    let mut p = pattern.clone();
    for _ in 1..((n - 1) * (n - 1) + 1) {
        p = (0..n).map(|i| (0..n).map(|j| (0..n).any(|k| p[i][k] && pattern[k][j])).collect()).collect();
    }
    p.iter().all(|row| row.iter().all(|&b| b))
}

/// Positivity of `x` in the stationary dimension group `lim (Z^n, Aᵗ)`,
/// decided by iterating `Aᵗ` up to `cap` times.
pub fn dg_positive(a: &IntMatrix, x: &[BigInt], cap: usize) -> Result<Positivity, KtheoryError> {
    if !is_primitive(a) {
        return Err(KtheoryError::NotPrimitive(format!("{a}")));
    }
    assert_eq!(x.len(), a.rows(), "vector length must match the matrix");
    let at = a.transpose();
    let mut y = x.to_vec();
    for _ in 0..=cap {
        if y.iter().all(|v| !v.is_negative()) {
            return Ok(Positivity::Positive);
        }
        if y.iter().all(|v| !v.is_positive()) {
            return Ok(Positivity::NotPositive);
        }
        y = at.mul_vec(&y);
    }
    Ok(Positivity::Inconclusive)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zlin::vec_from_i64;

    #[test]
    fn golden_mean_in_phi_coordinates() {
        // (a, b) stands for a + bφ; multiplication by φ is (a, b) -> (b, a + b)
        let a = IntMatrix::from_rows(&[[0, 1], [1, 1]]);
        assert_eq!(dg_positive(&a, &vec_from_i64(&[-1, 2]), 64).unwrap(), Positivity::Positive);
        assert_eq!(dg_positive(&a, &vec_from_i64(&[1, -1]), 64).unwrap(), Positivity::NotPositive);
        assert_eq!(dg_positive(&a, &vec_from_i64(&[0, 0]), 64).unwrap(), Positivity::Positive);
    }

    #[test]
    fn fibonacci_matrix_in_vertex_coordinates() {
        // [[1,1],[1,0]] sends (1,-1) to (0,1), so it is positive there
        let a = IntMatrix::from_rows(&[[1, 1], [1, 0]]);
        assert_eq!(dg_positive(&a, &vec_from_i64(&[1, -1]), 64).unwrap(), Positivity::Positive);
        assert_eq!(dg_positive(&a, &vec_from_i64(&[-1, 2]), 64).unwrap(), Positivity::Positive);
        assert_eq!(dg_positive(&a, &vec_from_i64(&[-2, 1]), 64).unwrap(), Positivity::NotPositive);
    }

    #[test]
    fn primitivity() {
        assert!(is_primitive(&IntMatrix::from_rows(&[[2]])));
        assert!(is_primitive(&IntMatrix::from_rows(&[[1, 1], [1, 0]])));
        assert!(!is_primitive(&IntMatrix::from_rows(&[[1, 1], [0, 1]])));
        assert!(!is_primitive(&IntMatrix::from_rows(&[[0, 1], [1, 0]])));
        assert!(matches!(
            dg_positive(&IntMatrix::from_rows(&[[0]]), &vec_from_i64(&[1]), 4),
            Err(KtheoryError::NotPrimitive(_))
        ));
    }

    #[test]
    fn certificate_text_round_trip() {
        for s in ["full", "simplicial", "stationary 2,2:1,1,1,0", "declared full", "declared notfull", "lex"] {
            let toks: Vec<&str> = s.split_whitespace().collect();
            assert_eq!(ConeCert::parse_tokens(&toks).unwrap().to_string(), s);
        }
        for s in [
            "full",
            "bounded (1,2)|(3,0)",
            "orbit (1,1) 2,2:2,0,0,1",
            "unit (0)",
            "shifted (0,1) unit (2)",
            "induced (0,1)",
        ] {
            let toks: Vec<&str> = s.split_whitespace().collect();
            assert_eq!(ScaleCert::parse_tokens(&toks).unwrap().to_string(), s);
        }
    }

    #[test]
    fn scale_membership() {
        let z = FgAbelianGroup::free(1);
        let pos = |x: &[BigInt]| Tri::from_bool(!x[0].is_negative());
        let unit = ScaleCert::Unit(vec_from_i64(&[3]));
        assert_eq!(unit.contains_with(&z, &vec_from_i64(&[2]), 8, &pos), Tri::Yes);
        assert_eq!(unit.contains_with(&z, &vec_from_i64(&[4]), 8, &pos), Tri::No);
        let orbit = ScaleCert::OrbitOf { seed: vec_from_i64(&[1]), matrix: IntMatrix::from_rows(&[[2]]) };
        assert_eq!(orbit.contains_with(&z, &vec_from_i64(&[100]), 8, &pos), Tri::Yes);
        assert_eq!(orbit.contains_with(&z, &vec_from_i64(&[1000]), 8, &pos), Tri::Unknown);
        assert_eq!(orbit.contains_with(&z, &vec_from_i64(&[-1]), 8, &pos), Tri::No);
    }
}
