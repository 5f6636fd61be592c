//! Real linear algebra on projective vectors.
//!
//! Vectors are kept unnormalised wherever the data allows; a vector and any
//! nonzero multiple of it denote the same rank-1 projector.

use std::cmp::Ordering;

use num_integer::Integer;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{QSqrt2, Scalar};

/// Relative threshold below which a float cross product counts as zero.
const PARALLEL_TOL: f64 = 1e-12;

/// A real vector, normally of dimension 3. Dimension 4 is accepted so the
/// bundled 18-observable set can be handled by the same diagram code.
///
/// All coordinates share one backend: building from a mix converts the whole
/// vector to floats.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Scalar>", into = "Vec<Scalar>")]
pub struct Vector {
    coords: Vec<Scalar>,
}

impl Vector {
    pub fn new(coords: Vec<Scalar>) -> Result<Self> {
        if coords.len() < 2 {
            return Err(Error::Malformed(format!("vector of dimension {}", coords.len())));
        }
        if coords.iter().any(|c| !c.is_exact() && !c.to_f64().is_finite()) {
            return Err(Error::Malformed("non-finite coordinate".into()));
        }
        let coords = if coords.iter().all(Scalar::is_exact) {
            coords
        } else {
            coords.iter().map(Scalar::to_float).collect()
        };
        Ok(Vector { coords })
    }

    pub fn exact(coords: Vec<QSqrt2>) -> Self {
        Vector { coords: coords.into_iter().map(Scalar::Exact).collect() }
    }

    pub fn ints(coords: &[i64]) -> Self {
        Vector { coords: coords.iter().map(|&c| Scalar::int(c)).collect() }
    }

    pub fn from_f64(coords: &[f64]) -> Self {
        Vector { coords: coords.iter().map(|&c| Scalar::Float(c)).collect() }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[Scalar] {
        &self.coords
    }

    pub fn is_exact(&self) -> bool {
        self.coords.iter().all(Scalar::is_exact)
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Scalar::is_zero)
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.coords.iter().map(Scalar::to_f64).collect()
    }

    pub fn to_float(&self) -> Vector {
        Vector { coords: self.coords.iter().map(Scalar::to_float).collect() }
    }

    pub fn norm(&self) -> f64 {
        self.to_f64().iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// Unit-length float copy.
    pub fn unit(&self) -> Result<Vector> {
        let n = self.norm();
        if n == 0.0 {
            return Err(Error::ZeroVector);
        }
        Ok(Vector::from_f64(&self.to_f64().iter().map(|x| x / n).collect::<Vec<_>>()))
    }

    pub fn neg(&self) -> Vector {
        Vector { coords: self.coords.iter().map(|c| -c.clone()).collect() }
    }

    pub(crate) fn to_v3(&self) -> Result<V3> {
        match self.to_f64()[..] {
            [x, y, z] => Ok([x, y, z]),
            _ => Err(Error::DimensionMismatch { expected: 3, found: self.dim() }),
        }
    }
}

impl TryFrom<Vec<Scalar>> for Vector {
    type Error = Error;
    fn try_from(coords: Vec<Scalar>) -> Result<Self> {
        Vector::new(coords)
    }
}

impl From<Vector> for Vec<Scalar> {
    fn from(v: Vector) -> Self {
        v.coords
    }
}

/// Real dot product `Σ uᵢvᵢ`.
///
/// Panics if the dimensions differ.
pub fn inner(u: &Vector, v: &Vector) -> Scalar {
    assert_eq!(u.dim(), v.dim(), "inner product of vectors with different dimensions");
    u.coords
        .iter()
        .zip(&v.coords)
        .map(|(a, b)| a * b)
        .fold(if u.is_exact() && v.is_exact() { Scalar::int(0) } else { Scalar::Float(0.0) }, |acc, x| acc + x)
}

/// Exact pairs test `⟨u,v⟩ = 0`; anything involving floats tests
/// `|⟨u,v⟩| ≤ eps·‖u‖·‖v‖`.
pub fn is_orthogonal(u: &Vector, v: &Vector, eps: f64) -> bool {
    match inner(u, v) {
        Scalar::Exact(q) => q.is_zero(),
        Scalar::Float(x) => x.abs() <= eps * u.norm() * v.norm(),
    }
}

/// Relative orthogonality residual `|⟨u,v⟩| / (‖u‖‖v‖)`.
pub fn orthogonality_residual(u: &Vector, v: &Vector) -> f64 {
    inner(u, v).to_f64().abs() / (u.norm() * v.norm())
}

/// `|⟨u,v⟩| / (‖u‖‖v‖)`, the overlap of the two projectors' unit vectors.
pub fn overlap(u: &Vector, v: &Vector) -> f64 {
    orthogonality_residual(u, v)
}

/// Standard 3-D cross product; exact inputs give an exact result.
pub fn cross(u: &Vector, v: &Vector) -> Result<Vector> {
    if u.dim() != 3 || v.dim() != 3 {
        return Err(Error::DimensionMismatch { expected: 3, found: u.dim().max(v.dim()) });
    }
    let c = |i: usize, j: usize| &(&u.coords[i] * &v.coords[j]) - &(&u.coords[j] * &v.coords[i]);
    let out = Vector::new(vec![c(1, 2), c(2, 0), c(0, 1)])?;
    let degenerate = if out.is_exact() {
        out.is_zero()
    } else {
        out.norm() <= PARALLEL_TOL * u.norm() * v.norm()
    };
    if degenerate {
        return Err(Error::DegenerateInput("cross product of parallel vectors"));
    }
    Ok(out)
}

/// True when `u` and `v` span the same line (exactly, or with sine of the
/// angle at most `eps` for floats).
pub fn same_ray(u: &Vector, v: &Vector, eps: f64) -> bool {
    if u.dim() != v.dim() {
        return false;
    }
    if u.is_exact() && v.is_exact() {
        return match (normalize_canonical(u), normalize_canonical(v)) {
            (Ok(a), Ok(b)) => a == b,
            _ => false,
        };
    }
    let (a, b) = (u.to_f64(), v.to_f64());
    let (na, nb) = (u.norm(), v.norm());
    if na == 0.0 || nb == 0.0 {
        return false;
    }
    let d: f64 = a.iter().zip(&b).map(|(x, y)| x * y).sum::<f64>() / (na * nb);
    // ‖â − (â·b̂)b̂‖ = sin θ
    let residual: f64 = a
        .iter()
        .zip(&b)
        .map(|(x, y)| (x / na - d * y / nb).powi(2))
        .sum::<f64>()
        .sqrt();
    residual <= eps
}

/// Canonical representative of a projective class.
///
/// The first nonzero coordinate is made positive. Exact vectors are divided
/// by that coordinate (which pins the class uniquely), then rescaled to the
/// integral form with the smallest coefficients, trying an extra factor of
/// √2 so that Table-style entries such as `(√8,1,−1)` survive unchanged.
/// Float vectors are scaled to unit length.
pub fn normalize_canonical(v: &Vector) -> Result<Vector> {
    if v.is_zero() {
        return Err(Error::ZeroVector);
    }
    if !v.is_exact() {
        let unit = v.unit()?.to_f64();
        let lead = unit.iter().copied().find(|x| x.abs() > PARALLEL_TOL).ok_or(Error::ZeroVector)?;
        let sign = lead.signum();
        return Ok(Vector::from_f64(&unit.iter().map(|x| x * sign).collect::<Vec<_>>()));
    }
    let exact: Vec<QSqrt2> = v
        .coords
        .iter()
        .map(|c| match c {
            Scalar::Exact(q) => q.clone(),
            Scalar::Float(_) => unreachable!("checked exact"),
        })
        .collect();
    let lead = exact.iter().find(|q| !q.is_zero()).ok_or(Error::ZeroVector)?.recip()?;
    let monic: Vec<QSqrt2> = exact.iter().map(|q| q.clone() * lead.clone()).collect();
    let plain = integral_form(&monic);
    let rooted = integral_form(&monic.iter().map(|q| q.clone() * QSqrt2::sqrt2()).collect::<Vec<_>>());
    let pick = if height(&rooted) < height(&plain) { rooted } else { plain };
    Ok(Vector::exact(pick))
}

/// Clears denominators and divides out the integer content.
fn integral_form(coords: &[QSqrt2]) -> Vec<QSqrt2> {
    let parts = coords.iter().flat_map(|q| [q.rational_part(), q.sqrt2_part()]);
    let lcm = parts.clone().fold(BigInt::one(), |acc, p| acc.lcm(p.denom()));
    let scaled: Vec<QSqrt2> = coords.iter().map(|q| q.scale(&BigRational::from_integer(lcm.clone()))).collect();
    let gcd = scaled
        .iter()
        .flat_map(|q| [q.rational_part().numer().clone(), q.sqrt2_part().numer().clone()])
        .fold(BigInt::zero(), |acc, n| acc.gcd(&n));
    if gcd.is_zero() || gcd.is_one() {
        return scaled;
    }
    let inv = BigRational::new(BigInt::one(), gcd);
    scaled.iter().map(|q| q.scale(&inv)).collect()
}

fn height(coords: &[QSqrt2]) -> BigInt {
    coords
        .iter()
        .flat_map(|q| [q.rational_part().numer().abs(), q.sqrt2_part().numer().abs()])
        .max()
        .unwrap_or_default()
}

/// Total order used to assign observable ids: exact values compare exactly,
/// floats by `total_cmp`.
pub(crate) fn cmp_vectors(u: &Vector, v: &Vector) -> Ordering {
    for (a, b) in u.coords.iter().zip(&v.coords) {
        let ord = match (a, b) {
            (Scalar::Exact(x), Scalar::Exact(y)) => x.cmp(y),
            _ => a.to_f64().total_cmp(&b.to_f64()),
        };
        if ord != Ordering::Equal {
            return ord;
        }
    }
    u.dim().cmp(&v.dim())
}

pub(crate) type V3 = [f64; 3];

pub(crate) fn dot3(a: &V3, b: &V3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub(crate) fn cross3(a: &V3, b: &V3) -> V3 {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

pub(crate) fn unit3(a: &V3) -> Result<V3> {
    let n = dot3(a, a).sqrt();
    if n == 0.0 || !n.is_finite() {
        return Err(Error::ZeroVector);
    }
    Ok([a[0] / n, a[1] / n, a[2] / n])
}

/// Right-handed orthonormal frame `(e₁, e₂, e₃)` stored as rows.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Frame {
    pub rows: [V3; 3],
}

impl Frame {
    pub fn vectors(&self) -> [Vector; 3] {
        self.rows.map(|r| Vector::from_f64(&r))
    }
}

/// Gram-Schmidt frame with `e₁ ∥ a` and `b` in span(e₁, e₂) with a positive
/// `e₂` component.
pub fn frame_from_pair(a: &Vector, b: &Vector) -> Result<Frame> {
    let e1 = unit3(&a.to_v3()?)?;
    let b = unit3(&b.to_v3()?)?;
    let d = dot3(&e1, &b);
    let perp = [b[0] - d * e1[0], b[1] - d * e1[1], b[2] - d * e1[2]];
    if dot3(&perp, &perp).sqrt() <= PARALLEL_TOL {
        return Err(Error::DegenerateInput("frame from parallel vectors"));
    }
    let e2 = unit3(&perp)?;
    let e3 = cross3(&e1, &e2);
    Ok(Frame { rows: [e1, e2, e3] })
}

/// Orthogonal 3×3 matrix acting on column vectors.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Transform {
    pub m: [[f64; 3]; 3],
}

impl Transform {
    pub fn identity() -> Self {
        Transform { m: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]] }
    }

    pub(crate) fn apply3(&self, v: &V3) -> V3 {
        let m = &self.m;
        [dot3(&m[0], v), dot3(&m[1], v), dot3(&m[2], v)]
    }

    /// Applies the transform; the result is always a float vector.
    pub fn apply(&self, v: &Vector) -> Result<Vector> {
        Ok(Vector::from_f64(&self.apply3(&v.to_v3()?)))
    }

    pub fn transpose(&self) -> Transform {
        let m = &self.m;
        Transform { m: [0, 1, 2].map(|i| [m[0][i], m[1][i], m[2][i]]) }
    }

    pub fn compose(&self, other: &Transform) -> Transform {
        let t = other.transpose();
        Transform { m: self.m.map(|row| [dot3(&row, &t.m[0]), dot3(&row, &t.m[1]), dot3(&row, &t.m[2])]) }
    }

    /// Largest entry of `|RᵀR − I|`.
    pub fn orthogonality_defect(&self) -> f64 {
        let p = self.transpose().compose(self);
        let id = Transform::identity();
        (0..3)
            .flat_map(|i| (0..3).map(move |j| (i, j)))
            .map(|(i, j)| (p.m[i][j] - id.m[i][j]).abs())
            .fold(0.0, f64::max)
    }
}

/// Orthogonal `R` with `R·a = a′` and `R·b = b′`, built as
/// `F(a′,b′)ᵀ·F(a,b)`.
///
/// Requires `|⟨a,b⟩| = |⟨a′,b′⟩|` (unit vectors, within `eps`). When the two
/// signed overlaps have opposite signs the target `b′` is taken as `−b′`,
/// which names the same projector, so then `R·b = −b′`.
pub fn map_pair(a: &Vector, b: &Vector, a2: &Vector, b2: &Vector, eps: f64) -> Result<Transform> {
    let (ua, ub) = (unit3(&a.to_v3()?)?, unit3(&b.to_v3()?)?);
    let (ua2, mut ub2) = (unit3(&a2.to_v3()?)?, unit3(&b2.to_v3()?)?);
    let (d, d2) = (dot3(&ua, &ub), dot3(&ua2, &ub2));
    if (d.abs() - d2.abs()).abs() > eps {
        return Err(Error::OverlapMismatch { expected: d.abs(), found: d2.abs() });
    }
    if d * d2 < 0.0 {
        ub2 = ub2.map(|x| -x);
    }
    let src = frame_from_pair(&Vector::from_f64(&ua), &Vector::from_f64(&ub))?;
    let dst = frame_from_pair(&Vector::from_f64(&ua2), &Vector::from_f64(&ub2))?;
    Ok(Transform { m: dst.rows }.transpose().compose(&Transform { m: src.rows }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ex(s: &[&str]) -> Vector {
        Vector::exact(s.iter().map(|c| QSqrt2::parse(c).unwrap()).collect())
    }

    #[test]
    fn inner_examples() {
        assert_eq!(inner(&Vector::ints(&[1, 0, 0]), &Vector::ints(&[0, 1, 1])), Scalar::int(0));
        assert_eq!(inner(&ex(&["sqrt2", "1", "1"]), &ex(&["sqrt2", "-1", "-1"])), Scalar::int(0));
        assert_eq!(inner(&Vector::ints(&[1, 0, 0]), &Vector::ints(&[1, 0, 0])), Scalar::int(1));
    }

    #[test]
    fn orthogonality_examples() {
        assert!(is_orthogonal(&Vector::ints(&[0, 1, 1]), &Vector::ints(&[0, 1, -1]), 0.0));
        let a = Vector::ints(&[1, 0, 0]);
        let b = ex(&["sqrt2", "1", "1"]);
        assert!(!is_orthogonal(&a, &b, 1e-10));
        assert!((overlap(&a, &b) - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        for u in [a.clone(), b.clone(), Vector::from_f64(&[0.3, -0.2, 0.9])] {
            assert!(!is_orthogonal(&u, &u, 1e-10));
        }
    }

    #[test]
    fn cross_examples() {
        let (x, y, z) = (0.3, -0.4, 0.5);
        let c = Vector::from_f64(&[x, y, z]);
        assert_eq!(cross(&Vector::ints(&[0, 0, 1]), &c).unwrap().to_f64(), vec![-y, x, 0.0]);
        let (q, p) = (0.6, 0.8);
        let got = cross(&Vector::from_f64(&[q, 0.0, p]), &c).unwrap().to_f64();
        let want = [-p * y, p * x - q * z, q * y];
        for (g, w) in got.iter().zip(want) {
            assert!((g - w).abs() < 1e-15);
        }
        assert!(matches!(
            cross(&Vector::ints(&[1, 0, 0]), &Vector::ints(&[2, 0, 0])),
            Err(Error::DegenerateInput(_))
        ));
    }

    #[test]
    fn canonical_examples() {
        assert_eq!(normalize_canonical(&Vector::ints(&[0, -2, 2])).unwrap(), Vector::ints(&[0, 1, -1]));
        assert_eq!(normalize_canonical(&ex(&["-sqrt2", "-1", "-1"])).unwrap(), ex(&["sqrt2", "1", "1"]));
        assert_eq!(normalize_canonical(&ex(&["sqrt8", "1", "-1"])).unwrap(), ex(&["2*sqrt2", "1", "-1"]));
        assert_eq!(normalize_canonical(&ex(&["1", "-sqrt2", "0"])).unwrap(), ex(&["1", "-sqrt2", "0"]));
        assert_eq!(normalize_canonical(&ex(&["1/2", "1/3", "0"])).unwrap(), Vector::ints(&[3, 2, 0]));
        assert!(matches!(normalize_canonical(&Vector::ints(&[0, 0, 0])), Err(Error::ZeroVector)));
        let f = normalize_canonical(&Vector::from_f64(&[0.0, -3.0, 4.0])).unwrap().to_f64();
        assert_eq!(f, vec![0.0, 0.6, -0.8]);
    }

    #[test]
    fn frame_examples() {
        let f = frame_from_pair(&Vector::ints(&[1, 0, 0]), &Vector::from_f64(&[0.6, 0.8, 0.0])).unwrap();
        assert_eq!(f.rows, [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]);
        // Gram-Schmidt by hand: e₂ = b − p·e₁ normalised = (1,0,0); e₃ = e₁×e₂ = (0,1,0).
        let (q, p) = (0.6, 0.8);
        let f = frame_from_pair(&Vector::ints(&[0, 0, 1]), &Vector::from_f64(&[q, 0.0, p])).unwrap();
        let want = [[0.0, 0.0, 1.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]];
        for (row, w) in f.rows.iter().zip(want) {
            for (a, b) in row.iter().zip(w) {
                assert!((a - b).abs() < 1e-15);
            }
        }
        let a = Vector::ints(&[1, 2, 3]);
        assert!(matches!(frame_from_pair(&a, &a), Err(Error::DegenerateInput(_))));
    }

    #[test]
    fn map_pair_examples() {
        let a = Vector::ints(&[1, 0, 0]);
        let b = Vector::from_f64(&[std::f64::consts::FRAC_1_SQRT_2, 0.5, 0.5]);
        let r = map_pair(&a, &b, &a, &b, 1e-10).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert!((r.m[i][j] - Transform::identity().m[i][j]).abs() < 1e-15);
            }
        }
        // rotate the pair by a known rotation, then recover it
        let rot = Transform { m: [[0.0, -1.0, 0.0], [0.6, 0.0, -0.8], [0.8, 0.0, 0.6]] };
        let b1 = Vector::from_f64(&[0.5, std::f64::consts::FRAC_1_SQRT_2, 0.5]);
        let (a2, b2) = (rot.apply(&a).unwrap(), rot.apply(&b1).unwrap());
        let r = map_pair(&a, &b1, &a2, &b2, 1e-10).unwrap();
        assert!(r.orthogonality_defect() < 1e-12);
        for (x, y) in r.apply(&a).unwrap().to_f64().iter().zip(a2.to_f64()) {
            assert!((x - y).abs() < 1e-12);
        }
        for (x, y) in r.apply(&b1).unwrap().to_f64().iter().zip(b2.to_f64()) {
            assert!((x - y).abs() < 1e-12);
        }
        let c = Vector::from_f64(&[0.5, (0.75f64).sqrt(), 0.0]);
        let d = Vector::from_f64(&[0.6, 0.8, 0.0]);
        assert!(matches!(map_pair(&a, &c, &a, &d, 1e-10), Err(Error::OverlapMismatch { .. })));
    }

    fn q_strategy() -> impl Strategy<Value = QSqrt2> {
        (-10i64..=10, 1i64..=10, -10i64..=10, 1i64..=10).prop_map(|(a, b, c, d)| {
            QSqrt2::new(BigRational::new(a.into(), b.into()), BigRational::new(c.into(), d.into()))
        })
    }

    fn exact_vec() -> impl Strategy<Value = Vector> {
        proptest::collection::vec(q_strategy(), 3)
            .prop_filter("nonzero", |v| v.iter().any(|q| !q.is_zero()))
            .prop_map(Vector::exact)
    }

    fn float_vec() -> impl Strategy<Value = Vector> {
        proptest::collection::vec(-1.0f64..1.0, 3)
            .prop_filter("not tiny", |v| v.iter().map(|x| x * x).sum::<f64>() > 1e-3)
            .prop_map(|v| Vector::from_f64(&v))
    }

    proptest! {
        #[test]
        fn cross_is_orthogonal_exact(u in exact_vec(), v in exact_vec()) {
            if let Ok(c) = cross(&u, &v) {
                prop_assert!(inner(&c, &u).is_zero());
                prop_assert!(inner(&c, &v).is_zero());
            }
        }

        #[test]
        fn cross_is_orthogonal_float(u in float_vec(), v in float_vec()) {
            if let Ok(c) = cross(&u, &v) {
                prop_assert!(is_orthogonal(&c, &u, 1e-12));
                prop_assert!(is_orthogonal(&c, &v, 1e-12));
            }
        }

        #[test]
        fn canonical_is_projective_invariant(v in exact_vec(), k in q_strategy()) {
            prop_assume!(!k.is_zero());
            let scaled = Vector::exact(v.coords().iter().map(|c| match c {
                Scalar::Exact(q) => q.clone() * k.clone(),
                Scalar::Float(_) => unreachable!(),
            }).collect());
            let n = normalize_canonical(&v).unwrap();
            prop_assert_eq!(&normalize_canonical(&scaled).unwrap(), &n);
            prop_assert_eq!(&normalize_canonical(&n).unwrap(), &n);
        }

        #[test]
        fn exact_matches_float(a in q_strategy(), b in q_strategy()) {
            let (fa, fb) = (a.to_f64(), b.to_f64());
            let (ea, eb) = (Scalar::Exact(a), Scalar::Exact(b));
            prop_assert!(((&ea + &eb).to_f64() - (fa + fb)).abs() <= 1e-12);
            prop_assert!(((&ea - &eb).to_f64() - (fa - fb)).abs() <= 1e-12);
            prop_assert!(((&ea * &eb).to_f64() - (fa * fb)).abs() <= 1e-12);
        }

        #[test]
        fn map_pair_preserves_inner_products(
            theta in 0.05f64..3.0, phi in 0.0f64..6.2, psi in 0.0f64..6.2,
            u in float_vec(), v in float_vec(),
        ) {
            let a = Vector::from_f64(&[theta.cos(), theta.sin(), 0.0]);
            let b = Vector::ints(&[1, 0, 0]).to_float();
            let a2 = Vector::from_f64(&[phi.cos() * psi.sin(), phi.sin() * psi.sin(), psi.cos()]);
            let f = frame_from_pair(&a2, &Vector::from_f64(&[0.3, 0.1, -0.7])).unwrap();
            let (e1, e2) = (f.rows[0], f.rows[1]);
            let c = theta.cos();
            let s = theta.sin();
            let b2 = Vector::from_f64(&[c * e1[0] + s * e2[0], c * e1[1] + s * e2[1], c * e1[2] + s * e2[2]]);
            let r = map_pair(&a, &b, &a2, &b2, 1e-9).unwrap();
            prop_assert!(r.orthogonality_defect() < 1e-12);
            let (ru, rv) = (r.apply(&u).unwrap(), r.apply(&v).unwrap());
            prop_assert!((inner(&ru, &rv).to_f64() - inner(&u, &v).to_f64()).abs() < 1e-12);
            prop_assert!(same_ray(&r.apply(&a).unwrap(), &a2, 1e-12));
            prop_assert!(same_ray(&r.apply(&b).unwrap(), &b2, 1e-12));
        }
    }
}
