//! Numeric backends: exact elements of Q(√2) and tolerance-compared floats.
//!
//! Every entry of the canonical 37-vector set lives in Q(√2), so its
//! orthogonality structure can be decided with no rounding at all. The
//! gadget constructions need nested radicals and fall back to `f64`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// `r + s·√2` with rational `r` and `s`.
///
/// Equality is exact: `1` and `√2` are linearly independent over Q, so two
/// values are equal iff both coordinates are.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QSqrt2 {
    r: BigRational,
    s: BigRational,
}

impl QSqrt2 {
    pub fn new(r: BigRational, s: BigRational) -> Self {
        QSqrt2 { r, s }
    }

    pub fn from_ints(r: i64, s: i64) -> Self {
        QSqrt2::new(BigRational::from_integer(r.into()), BigRational::from_integer(s.into()))
    }

    pub fn zero() -> Self {
        QSqrt2::from_ints(0, 0)
    }

    pub fn one() -> Self {
        QSqrt2::from_ints(1, 0)
    }

    pub fn sqrt2() -> Self {
        QSqrt2::from_ints(0, 1)
    }

    pub fn rational_part(&self) -> &BigRational {
        &self.r
    }

    pub fn sqrt2_part(&self) -> &BigRational {
        &self.s
    }

    pub fn is_zero(&self) -> bool {
        self.r.is_zero() && self.s.is_zero()
    }

    /// Sign of `r + s√2` decided without leaving Q: when the two parts have
    /// opposite signs, compare `r²` against `2s²` (never equal unless both vanish).
    pub fn signum(&self) -> i32 {
        let sr = sign_of(&self.r);
        let ss = sign_of(&self.s);
        if ss == 0 {
            return sr;
        }
        if sr == 0 || sr == ss {
            return ss;
        }
        let r2 = &self.r * &self.r;
        let s2 = &self.s * &self.s * BigRational::from_integer(2.into());
        if r2 > s2 {
            sr
        } else {
            ss
        }
    }

    pub fn abs(&self) -> Self {
        if self.signum() < 0 {
            -self.clone()
        } else {
            self.clone()
        }
    }

    /// Multiplicative inverse via the conjugate: `1/(r+s√2) = (r−s√2)/(r²−2s²)`.
    pub fn recip(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DegenerateInput("division by zero in Q(√2)"));
        }
        let norm = &self.r * &self.r - &self.s * &self.s * BigRational::from_integer(2.into());
        Ok(QSqrt2::new(&self.r / &norm, -(&self.s / &norm)))
    }

    pub fn scale(&self, k: &BigRational) -> Self {
        QSqrt2::new(&self.r * k, &self.s * k)
    }

    pub fn to_f64(&self) -> f64 {
        let r = self.r.to_f64().unwrap_or(f64::NAN);
        let s = self.s.to_f64().unwrap_or(f64::NAN);
        r + s * std::f64::consts::SQRT_2
    }

    /// Parses the exact scalar grammar: a signed sum of terms, each a rational
    /// (`3`, `-1/2`, `0.25`) or a rational multiple of `sqrt2`
    /// (`sqrt2`, `3/4*sqrt2`, `-sqrt2`). `sqrt8` is accepted as `2*sqrt2`.
    pub fn parse(text: &str) -> Result<Self> {
        let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(Error::Parse("empty scalar".into()));
        }
        let mut out = QSqrt2::zero();
        let bytes = compact.as_bytes();
        let mut start = 0;
        for i in 1..=bytes.len() {
            let boundary = i == bytes.len() || matches!(bytes[i], b'+' | b'-') && bytes[i - 1] != b'/';
            if boundary {
                out = out + parse_term(&compact[start..i])?;
                start = i;
            }
        }
        Ok(out)
    }
}

fn sign_of(q: &BigRational) -> i32 {
    if q.is_positive() {
        1
    } else if q.is_negative() {
        -1
    } else {
        0
    }
}

fn parse_term(term: &str) -> Result<QSqrt2> {
    let (negative, body) = match term.as_bytes().first() {
        Some(b'+') => (false, &term[1..]),
        Some(b'-') => (true, &term[1..]),
        _ => (false, term),
    };
    if body.is_empty() {
        return Err(Error::Parse(format!("dangling sign in `{term}`")));
    }
    let radical = [("sqrt2", 1), ("sqrt(2)", 1), ("sqrt8", 2), ("sqrt(8)", 2)]
        .iter()
        .find(|(suffix, _)| body.ends_with(suffix));
    let value = match radical {
        Some((suffix, mult)) => {
            let coeff = body[..body.len() - suffix.len()].trim_end_matches('*');
            let c = if coeff.is_empty() {
                BigRational::one()
            } else {
                parse_rational(coeff)?
            };
            QSqrt2::new(BigRational::zero(), c * BigRational::from_integer((*mult).into()))
        }
        None => QSqrt2::new(parse_rational(body)?, BigRational::zero()),
    };
    Ok(if negative { -value } else { value })
}

/// `p`, `p/q`, or a plain decimal `12.375` (read exactly).
pub(crate) fn parse_rational(text: &str) -> Result<BigRational> {
    let bad = || Error::Parse(format!("not a rational: `{text}`"));
    if let Some((int, frac)) = text.split_once('.') {
        if text.contains('/') || frac.is_empty() && int.is_empty() {
            return Err(bad());
        }
        let digits = format!("{int}{frac}");
        let numer = BigInt::from_str(if digits == "-" { "-0" } else { &digits }).map_err(|_| bad())?;
        let denom = num_traits::pow(BigInt::from(10), frac.len());
        return Ok(BigRational::new(numer, denom));
    }
    if let Some((p, q)) = text.split_once('/') {
        let p = BigInt::from_str(p).map_err(|_| bad())?;
        let q = BigInt::from_str(q).map_err(|_| bad())?;
        if q.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(p, q));
    }
    Ok(BigRational::from_integer(BigInt::from_str(text).map_err(|_| bad())?))
}

impl fmt::Display for QSqrt2 {
    /// `r+s*sqrt2`, dropping a zero part.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.r.is_zero(), self.s.is_zero()) {
            (_, true) => write!(f, "{}", self.r),
            (true, false) => write!(f, "{}*sqrt2", self.s),
            (false, false) if self.s.is_negative() => write!(f, "{}-{}*sqrt2", self.r, -&self.s),
            (false, false) => write!(f, "{}+{}*sqrt2", self.r, self.s),
        }
    }
}

impl PartialOrd for QSqrt2 {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for QSqrt2 {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.clone() - other.clone()).signum().cmp(&0)
    }
}

impl Add for QSqrt2 {
    type Output = QSqrt2;
    fn add(self, rhs: QSqrt2) -> QSqrt2 {
        QSqrt2::new(self.r + rhs.r, self.s + rhs.s)
    }
}

impl Sub for QSqrt2 {
    type Output = QSqrt2;
    fn sub(self, rhs: QSqrt2) -> QSqrt2 {
        QSqrt2::new(self.r - rhs.r, self.s - rhs.s)
    }
}

impl Mul for QSqrt2 {
    type Output = QSqrt2;
    fn mul(self, rhs: QSqrt2) -> QSqrt2 {
        let two = BigRational::from_integer(2.into());
        QSqrt2::new(
            &self.r * &rhs.r + &self.s * &rhs.s * two,
            &self.r * &rhs.s + &self.s * &rhs.r,
        )
    }
}

impl Neg for QSqrt2 {
    type Output = QSqrt2;
    fn neg(self) -> QSqrt2 {
        QSqrt2::new(-self.r, -self.s)
    }
}

/// A coordinate: exact Q(√2) or binary floating point.
///
/// Mixed arithmetic degrades to `Float`. Tolerances are never applied here;
/// callers that compare floats pass their own epsilon.
#[derive(Clone, Debug, PartialEq)]
pub enum Scalar {
    Exact(QSqrt2),
    Float(f64),
}

impl Scalar {
    pub fn int(v: i64) -> Self {
        Scalar::Exact(QSqrt2::from_ints(v, 0))
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Scalar::Exact(_))
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Exact(q) => q.to_f64(),
            Scalar::Float(x) => *x,
        }
    }

    pub fn to_float(&self) -> Scalar {
        Scalar::Float(self.to_f64())
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Exact(q) => q.is_zero(),
            Scalar::Float(x) => *x == 0.0,
        }
    }

    /// Approximate equality. Exact pairs ignore `eps`.
    pub fn approx_eq(&self, other: &Scalar, eps: f64) -> bool {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a == b,
            _ => (self.to_f64() - other.to_f64()).abs() <= eps,
        }
    }

    /// Exact grammar first (see [`QSqrt2::parse`]), then any `f64` literal.
    pub fn parse(text: &str) -> Result<Scalar> {
        match QSqrt2::parse(text) {
            Ok(q) => Ok(Scalar::Exact(q)),
            Err(err) => text.trim().parse::<f64>().map(Scalar::Float).map_err(|_| err),
        }
    }
}

impl From<QSqrt2> for Scalar {
    fn from(q: QSqrt2) -> Self {
        Scalar::Exact(q)
    }
}

impl From<f64> for Scalar {
    fn from(x: f64) -> Self {
        Scalar::Float(x)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(q) => q.fmt(f),
            Scalar::Float(x) => x.fmt(f),
        }
    }
}

macro_rules! scalar_binop {
    ($trait:ident, $method:ident, $op:tt) => {
        impl $trait for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                match (self, rhs) {
                    (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a $op b),
                    (a, b) => Scalar::Float(a.to_f64() $op b.to_f64()),
                }
            }
        }

        impl<'a> $trait<&'a Scalar> for &'a Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &'a Scalar) -> Scalar {
                match (self, rhs) {
                    (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a.clone() $op b.clone()),
                    (a, b) => Scalar::Float(a.to_f64() $op b.to_f64()),
                }
            }
        }
    };
}

scalar_binop!(Add, add, +);
scalar_binop!(Sub, sub, -);
scalar_binop!(Mul, mul, *);

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Exact(q) => Scalar::Exact(-q),
            Scalar::Float(x) => Scalar::Float(-x),
        }
    }
}

/// Exact scalars serialize as strings (`"1/2+3*sqrt2"`), floats as JSON numbers.
impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Scalar::Exact(q) => serializer.serialize_str(&q.to_string()),
            Scalar::Float(x) => serializer.serialize_f64(*x),
        }
    }
}

/// Strings parse as exact; integer literals are exact; other numbers are floats.
impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        match serde_json::Value::deserialize(deserializer)? {
            serde_json::Value::String(s) => Scalar::parse(&s).map_err(D::Error::custom),
            serde_json::Value::Number(n) => match n.as_i64() {
                Some(i) => Ok(Scalar::int(i)),
                None => n.as_f64().map(Scalar::Float).ok_or_else(|| D::Error::custom("bad number")),
            },
            other => Err(D::Error::custom(format!("expected scalar, found {other}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> QSqrt2 {
        QSqrt2::parse(s).unwrap()
    }

    #[test]
    fn parses_grammar() {
        assert_eq!(q("1"), QSqrt2::one());
        assert_eq!(q("sqrt2"), QSqrt2::sqrt2());
        assert_eq!(q("-sqrt2"), -QSqrt2::sqrt2());
        assert_eq!(q("sqrt8"), QSqrt2::from_ints(0, 2));
        assert_eq!(q("2*sqrt2"), QSqrt2::from_ints(0, 2));
        let mixed = q("1/2+3/4*sqrt2");
        assert_eq!(mixed.rational_part(), &BigRational::new(1.into(), 2.into()));
        assert_eq!(mixed.sqrt2_part(), &BigRational::new(3.into(), 4.into()));
        assert_eq!(q("-1/3-sqrt2"), QSqrt2::new(BigRational::new((-1).into(), 3.into()), -BigRational::one()));
        assert_eq!(q("0.25"), QSqrt2::new(BigRational::new(1.into(), 4.into()), BigRational::zero()));
        assert!(QSqrt2::parse("").is_err());
        assert!(QSqrt2::parse("1/0").is_err());
        assert!(QSqrt2::parse("abc").is_err());
        assert!(QSqrt2::parse("1+").is_err());
    }

    #[test]
    fn display_round_trips() {
        for s in ["0", "3", "-1/2", "sqrt2", "-7/3*sqrt2", "1/2+3/4*sqrt2", "5-2*sqrt2"] {
            let v = q(s);
            assert_eq!(q(&v.to_string()), v, "{s}");
        }
        assert_eq!(q("1/2+3/4*sqrt2").to_string(), "1/2+3/4*sqrt2");
        assert_eq!(q("5-2*sqrt2").to_string(), "5-2*sqrt2");
    }

    #[test]
    fn sign_is_exact_near_cancellation() {
        // 99² = 9801 > 9800 = 2·70², 41² = 1681 < 1682 = 2·29².
        assert_eq!(QSqrt2::from_ints(99, -70).signum(), 1);
        assert_eq!(QSqrt2::from_ints(-99, 70).signum(), -1);
        assert_eq!(QSqrt2::from_ints(41, -29).signum(), -1);
        assert_eq!(QSqrt2::from_ints(1, -1).signum(), -1);
        assert_eq!(QSqrt2::zero().signum(), 0);
        assert!(QSqrt2::sqrt2() > QSqrt2::from_ints(1, 0));
        assert!(QSqrt2::sqrt2() < QSqrt2::parse("3/2").unwrap());
    }

    #[test]
    fn reciprocal() {
        let x = QSqrt2::from_ints(3, 2);
        assert_eq!(x.clone() * x.recip().unwrap(), QSqrt2::one());
        assert!(QSqrt2::zero().recip().is_err());
    }

    #[test]
    fn scalar_mixed_arithmetic_degrades_to_float() {
        let e = Scalar::Exact(QSqrt2::sqrt2());
        let f = Scalar::Float(2.0);
        assert!(matches!(&e * &e, Scalar::Exact(ref v) if *v == QSqrt2::from_ints(2, 0)));
        match &e * &f {
            Scalar::Float(x) => assert!((x - 2.0 * std::f64::consts::SQRT_2).abs() < 1e-15),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn scalar_json() {
        let v: Vec<Scalar> = serde_json::from_str(r#"["sqrt2", 1, 0.5, "-1/2"]"#).unwrap();
        assert_eq!(v[0], Scalar::Exact(QSqrt2::sqrt2()));
        assert_eq!(v[1], Scalar::int(1));
        assert_eq!(v[2], Scalar::Float(0.5));
        assert_eq!(serde_json::to_string(&v).unwrap(), r#"["1*sqrt2","1",0.5,"-1/2"]"#);
    }
}
