//! Exact arithmetic in the quadratic field ℚ(√2).
//!
//! Every amplitude that appears in the beam-splitter networks simulated by this
//! crate (1/√2 splitting, Bell-state normalizations, bosonic double-occupancy
//! normalizers) lives in ℚ(√2). A [`Scalar`] stores `rat + sqrt2·√2` with two
//! arbitrary-precision rationals, so equality is exact and canonical.

use std::cmp::Ordering;
use std::fmt;
use std::iter::{Product, Sum};
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::Error;

/// An element `rat + sqrt2·√2` of ℚ(√2).
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Scalar {
    rat: BigRational,
    sqrt2: BigRational,
}

impl Scalar {
    pub fn new(rat: BigRational, sqrt2: BigRational) -> Self {
        Scalar { rat, sqrt2 }
    }

    pub fn zero() -> Self {
        Scalar::default()
    }

    pub fn one() -> Self {
        Scalar::from_integer(1)
    }

    pub fn from_integer(n: i64) -> Self {
        Scalar::new(BigRational::from_integer(n.into()), BigRational::zero())
    }

    pub fn from_ratio(numer: i64, denom: i64) -> Self {
        assert!(denom != 0, "zero denominator");
        Scalar::new(
            BigRational::new(numer.into(), denom.into()),
            BigRational::zero(),
        )
    }

    pub fn from_rational(r: BigRational) -> Self {
        Scalar::new(r, BigRational::zero())
    }

    /// √2 itself.
    pub fn sqrt2() -> Self {
        Scalar::new(BigRational::zero(), BigRational::one())
    }

    /// 1/√2 = √2/2.
    pub fn inv_sqrt2() -> Self {
        Scalar::new(
            BigRational::zero(),
            BigRational::new(1.into(), 2.into()),
        )
    }

    pub fn rational_part(&self) -> &BigRational {
        &self.rat
    }

    pub fn sqrt2_part(&self) -> &BigRational {
        &self.sqrt2
    }

    pub fn is_zero(&self) -> bool {
        self.rat.is_zero() && self.sqrt2.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.rat.is_one() && self.sqrt2.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.sqrt2.is_zero()
    }

    /// The rational value, if the √2 component vanishes.
    pub fn to_rational(&self) -> Option<&BigRational> {
        self.is_rational().then_some(&self.rat)
    }

    /// Galois conjugate `rat − sqrt2·√2`.
    pub fn conjugate(&self) -> Self {
        Scalar::new(self.rat.clone(), -self.sqrt2.clone())
    }

    /// Field norm `rat² − 2·sqrt2²`; zero only for the zero element.
    pub fn field_norm(&self) -> BigRational {
        &self.rat * &self.rat - BigRational::from_integer(2.into()) * &self.sqrt2 * &self.sqrt2
    }

    /// `a·a`. Amplitudes here are real, so this is the modulus squared.
    pub fn abs_square(&self) -> Self {
        self * self
    }

    pub fn inverse(&self) -> Result<Self, Error> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let norm = self.field_norm();
        let conj = self.conjugate();
        Ok(Scalar::new(conj.rat / &norm, conj.sqrt2 / norm))
    }

    pub fn checked_div(&self, rhs: &Scalar) -> Result<Self, Error> {
        Ok(self * &rhs.inverse()?)
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        Scalar::new(&self.rat * r, &self.sqrt2 * r)
    }

    /// Exact sign of the real number represented.
    pub fn signum(&self) -> Ordering {
        let a = self.rat.numer().sign();
        let b = self.sqrt2.numer().sign();
        use Sign::*;
        match (a, b) {
            (NoSign, NoSign) => Ordering::Equal,
            (Plus, Plus) | (Plus, NoSign) | (NoSign, Plus) => Ordering::Greater,
            (Minus, Minus) | (Minus, NoSign) | (NoSign, Minus) => Ordering::Less,
            // opposite signs: compare rat² with 2·sqrt2²
            (Plus, Minus) => self.field_norm().numer().sign().cmp_zero(),
            (Minus, Plus) => (-self.field_norm()).numer().sign().cmp_zero(),
        }
    }

    pub fn is_negative(&self) -> bool {
        self.signum() == Ordering::Less
    }

    pub fn is_positive(&self) -> bool {
        self.signum() == Ordering::Greater
    }

    pub fn abs(&self) -> Self {
        if self.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    /// Non-negative square root within ℚ(√2), if one exists.
    pub fn sqrt(&self) -> Option<Self> {
        if self.is_negative() {
            return None;
        }
        if self.is_zero() {
            return Some(Scalar::zero());
        }
        // (p + q√2)² = p² + 2q² + 2pq√2
        let a = &self.rat;
        let b = &self.sqrt2;
        let two = BigRational::from_integer(2.into());
        let candidates: Vec<Scalar> = if b.is_zero() {
            let mut out = Vec::new();
            if let Some(p) = rational_sqrt(a) {
                out.push(Scalar::from_rational(p));
            }
            if let Some(q) = rational_sqrt(&(a / &two)) {
                out.push(Scalar::new(BigRational::zero(), q));
            }
            out
        } else {
            // p² = (a ± √(a² − 2b²)) / 2, q = b / (2p)
            let disc = a * a - &two * b * b;
            let root = rational_sqrt(&disc)?;
            let mut out = Vec::new();
            for p_sq in [(a + &root) / &two, (a - &root) / &two] {
                if let Some(p) = rational_sqrt(&p_sq) {
                    if p.is_zero() {
                        continue;
                    }
                    let q = b / (&two * &p);
                    out.push(Scalar::new(p, q));
                }
            }
            out
        };
        candidates
            .into_iter()
            .map(|c| c.abs())
            .find(|c| &(c * c) == self)
    }

    /// Nearest `f64`. Values with opposite-sign components are evaluated through
    /// the conjugate to avoid cancellation.
    pub fn to_f64(&self) -> f64 {
        let r = self.rat.to_f64().unwrap_or(f64::NAN);
        let s = self.sqrt2.to_f64().unwrap_or(f64::NAN) * std::f64::consts::SQRT_2;
        if self.rat.is_zero() || self.sqrt2.is_zero() || (r >= 0.0) == (s >= 0.0) {
            return r + s;
        }
        let norm = self.field_norm().to_f64().unwrap_or(f64::NAN);
        norm / (r - s)
    }

    /// Exact `p/q` string. Fails when the √2 part is nonzero.
    pub fn to_rational_string(&self) -> Option<String> {
        self.to_rational().map(|r| r.to_string())
    }
}

fn rational_sqrt(r: &BigRational) -> Option<BigRational> {
    if r.is_negative() {
        return None;
    }
    let n = integer_sqrt(r.numer())?;
    let d = integer_sqrt(r.denom())?;
    Some(BigRational::new(n, d))
}

fn integer_sqrt(n: &BigInt) -> Option<BigInt> {
    let s = n.sqrt();
    (&s * &s == *n).then_some(s)
}

trait CmpZero {
    fn cmp_zero(self) -> Ordering;
}

impl CmpZero for Sign {
    fn cmp_zero(self) -> Ordering {
        match self {
            Sign::Minus => Ordering::Less,
            Sign::NoSign => Ordering::Equal,
            Sign::Plus => Ordering::Greater,
        }
    }
}

impl PartialOrd for Scalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Scalar {
    fn cmp(&self, other: &Self) -> Ordering {
        (self - other).signum()
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.rat.is_zero(), self.sqrt2.is_zero()) {
            (_, true) => write!(f, "{}", self.rat),
            (true, false) => write!(f, "{}√2", self.sqrt2),
            (false, false) => {
                if self.sqrt2.is_negative() {
                    write!(f, "{} - {}√2", self.rat, -self.sqrt2.clone())
                } else {
                    write!(f, "{} + {}√2", self.rat, self.sqrt2)
                }
            }
        }
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Scalar({self})")
    }
}

/// Parses `p`, `p/q`, `s√2`, `p/q+s√2` and the ASCII spelling `sqrt2`.
impl FromStr for Scalar {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let cleaned: String = s
            .replace("sqrt2", "√2")
            .chars()
            .filter(|c| !c.is_whitespace())
            .collect();
        if cleaned.is_empty() {
            return Err(Error::Parse(s.to_string()));
        }
        let mut total = Scalar::zero();
        // split into signed summands
        let mut start = 0;
        let bytes: Vec<(usize, char)> = cleaned.char_indices().collect();
        let mut pieces = Vec::new();
        for (pos, (i, c)) in bytes.iter().enumerate() {
            if pos > 0 && (*c == '+' || *c == '-') {
                pieces.push(&cleaned[start..*i]);
                start = *i;
            }
        }
        pieces.push(&cleaned[start..]);
        for piece in pieces {
            let (body, irrational) = match piece.strip_suffix("√2") {
                Some(b) => (b.trim_end_matches('*').trim_end_matches('·'), true),
                None => (piece, false),
            };
            let coeff = match body {
                "" | "+" => BigRational::one(),
                "-" => -BigRational::one(),
                b => parse_rational(b).ok_or_else(|| Error::Parse(s.to_string()))?,
            };
            total += if irrational {
                Scalar::new(BigRational::zero(), coeff)
            } else {
                Scalar::from_rational(coeff)
            };
        }
        Ok(total)
    }
}

fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.strip_prefix('+').unwrap_or(s);
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.parse().ok()?;
            let d: BigInt = d.parse().ok()?;
            (!d.is_zero()).then(|| BigRational::new(n, d))
        }
        None => s.parse::<BigInt>().ok().map(BigRational::from_integer),
    }
}

/// Wire form: both components as `p/q` strings.
#[derive(Serialize, Deserialize)]
struct ScalarRepr {
    rat: String,
    sqrt2: String,
}

impl Serialize for Scalar {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        ScalarRepr {
            rat: self.rat.to_string(),
            sqrt2: self.sqrt2.to_string(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = ScalarRepr::deserialize(deserializer)?;
        let rat = parse_rational(&repr.rat)
            .ok_or_else(|| serde::de::Error::custom(format!("bad rational {:?}", repr.rat)))?;
        let sqrt2 = parse_rational(&repr.sqrt2)
            .ok_or_else(|| serde::de::Error::custom(format!("bad rational {:?}", repr.sqrt2)))?;
        Ok(Scalar::new(rat, sqrt2))
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::from_integer(n)
    }
}

impl From<BigRational> for Scalar {
    fn from(r: BigRational) -> Self {
        Scalar::from_rational(r)
    }
}

impl<'a> Add<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn add(self, rhs: &'a Scalar) -> Scalar {
        Scalar::new(&self.rat + &rhs.rat, &self.sqrt2 + &rhs.sqrt2)
    }
}

impl<'a> Sub<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &'a Scalar) -> Scalar {
        Scalar::new(&self.rat - &rhs.rat, &self.sqrt2 - &rhs.sqrt2)
    }
}

impl<'a> Mul<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &'a Scalar) -> Scalar {
        let two = BigRational::from_integer(2.into());
        Scalar::new(
            &self.rat * &rhs.rat + two * &self.sqrt2 * &rhs.sqrt2,
            &self.rat * &rhs.sqrt2 + &self.sqrt2 * &rhs.rat,
        )
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar::new(-self.rat.clone(), -self.sqrt2.clone())
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar::new(-self.rat, -self.sqrt2)
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident) => {
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                (&self).$method(&rhs)
            }
        }
        impl<'a> $tr<&'a Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &'a Scalar) -> Scalar {
                (&self).$method(rhs)
            }
        }
        impl<'a> $tr<Scalar> for &'a Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                self.$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &Scalar) {
        self.rat += &rhs.rat;
        self.sqrt2 += &rhs.sqrt2;
    }
}

impl AddAssign for Scalar {
    fn add_assign(&mut self, rhs: Scalar) {
        *self += &rhs;
    }
}

impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, rhs: &Scalar) {
        self.rat -= &rhs.rat;
        self.sqrt2 -= &rhs.sqrt2;
    }
}

impl SubAssign for Scalar {
    fn sub_assign(&mut self, rhs: Scalar) {
        *self -= &rhs;
    }
}

impl MulAssign<&Scalar> for Scalar {
    fn mul_assign(&mut self, rhs: &Scalar) {
        *self = &*self * rhs;
    }
}

impl MulAssign for Scalar {
    fn mul_assign(&mut self, rhs: Scalar) {
        *self = &*self * &rhs;
    }
}

impl Sum for Scalar {
    fn sum<I: Iterator<Item = Scalar>>(iter: I) -> Scalar {
        iter.fold(Scalar::zero(), |acc, x| acc + x)
    }
}

impl<'a> Sum<&'a Scalar> for Scalar {
    fn sum<I: Iterator<Item = &'a Scalar>>(iter: I) -> Scalar {
        iter.fold(Scalar::zero(), |mut acc, x| {
            acc += x;
            acc
        })
    }
}

impl Product for Scalar {
    fn product<I: Iterator<Item = Scalar>>(iter: I) -> Scalar {
        iter.fold(Scalar::one(), |acc, x| acc * x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> Scalar {
        Scalar::from_ratio(n, d)
    }

    #[test]
    fn inv_sqrt2_squares_to_half() {
        let h = Scalar::inv_sqrt2();
        assert_eq!(&h * &h, q(1, 2));
    }

    #[test]
    fn conjugate_product_is_minus_one() {
        let a = Scalar::one() + Scalar::sqrt2();
        let b = Scalar::one() - Scalar::sqrt2();
        assert_eq!(a * b, Scalar::from_integer(-1));
    }

    #[test]
    fn rational_inverse() {
        assert_eq!(q(3, 4).inverse().unwrap(), q(4, 3));
    }

    #[test]
    fn inverse_of_irrational() {
        let a = q(3, 2) + Scalar::sqrt2();
        let inv = a.inverse().unwrap();
        assert!((&a * &inv).is_one());
    }

    #[test]
    fn division_by_zero_is_an_error() {
        assert!(matches!(
            Scalar::one().checked_div(&Scalar::zero()),
            Err(Error::DivisionByZero)
        ));
        assert!(Scalar::zero().inverse().is_err());
    }

    #[test]
    fn square_roots_in_field() {
        assert_eq!(q(9, 16).sqrt(), Some(q(3, 4)));
        assert_eq!(q(25, 16).sqrt(), Some(q(5, 4)));
        assert_eq!(q(1, 2).sqrt(), Some(Scalar::inv_sqrt2()));
        assert_eq!(q(2, 9).sqrt(), Some(Scalar::sqrt2().scale(&BigRational::new(1.into(), 3.into()))));
        // (1 + √2)² = 3 + 2√2
        let x = Scalar::from_integer(3) + Scalar::sqrt2() + Scalar::sqrt2();
        assert_eq!(x.sqrt(), Some(Scalar::one() + Scalar::sqrt2()));
        // (√2 − 1)² = 3 − 2√2, positive root must be returned
        let y = Scalar::from_integer(3) - Scalar::sqrt2() - Scalar::sqrt2();
        assert_eq!(y.sqrt(), Some(Scalar::sqrt2() - Scalar::one()));
        assert_eq!(q(6, 25).sqrt(), None);
        assert_eq!(q(3, 1).sqrt(), None);
        assert_eq!(q(-1, 4).sqrt(), None);
    }

    #[test]
    fn exact_sign() {
        // 7 − 5√2 ≈ -0.0711
        let x = Scalar::from_integer(7) - Scalar::sqrt2().scale(&BigRational::from_integer(5.into()));
        assert!(x.is_negative());
        // 17 − 12√2 ≈ 0.0294
        let y = Scalar::from_integer(17) - Scalar::sqrt2().scale(&BigRational::from_integer(12.into()));
        assert!(y.is_positive());
        assert!(y.to_f64() > 0.0);
        assert!((y.to_f64() - (17.0 - 12.0 * 2f64.sqrt())).abs() < 1e-12);
    }

    #[test]
    fn parse_and_display() {
        let x: Scalar = "1/2 + 3/4√2".parse().unwrap();
        assert_eq!(x, q(1, 2) + Scalar::sqrt2().scale(&BigRational::new(3.into(), 4.into())));
        assert_eq!(x.to_string(), "1/2 + 3/4√2");
        assert_eq!("2/9".parse::<Scalar>().unwrap(), q(2, 9));
        assert_eq!("-sqrt2".parse::<Scalar>().unwrap(), -Scalar::sqrt2());
        assert!("abc".parse::<Scalar>().is_err());
        assert_eq!(q(2, 9).to_rational_string().as_deref(), Some("2/9"));
        assert_eq!(Scalar::sqrt2().to_rational_string(), None);
    }

    #[test]
    fn serde_roundtrip() {
        let x = q(-5, 7) + Scalar::inv_sqrt2();
        let json = serde_json::to_string(&x).unwrap();
        assert_eq!(json, r#"{"rat":"-5/7","sqrt2":"1/2"}"#);
        let back: Scalar = serde_json::from_str(&json).unwrap();
        assert_eq!(back, x);
    }

    fn arb_scalar() -> impl Strategy<Value = Scalar> {
        (-20i64..20, 1i64..9, -20i64..20, 1i64..9)
            .prop_map(|(a, b, c, d)| Scalar::from_ratio(a, b) + Scalar::sqrt2() * Scalar::from_ratio(c, d))
    }

    proptest! {
        #[test]
        fn field_axioms(a in arb_scalar(), b in arb_scalar(), c in arb_scalar()) {
            prop_assert_eq!(&a + &b, &b + &a);
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!((&a + &b) + &c, &a + (&b + &c));
            prop_assert_eq!((&a * &b) * &c, &a * (&b * &c));
            prop_assert_eq!(&a * (&b + &c), &a * &b + &a * &c);
            if !a.is_zero() {
                prop_assert!((&a * &a.inverse().unwrap()).is_one());
            }
        }

        #[test]
        fn float_agrees(a in arb_scalar()) {
            let exact = a.rational_part().to_f64().unwrap()
                + a.sqrt2_part().to_f64().unwrap() * std::f64::consts::SQRT_2;
            let approx = a.to_f64();
            prop_assert!((approx - exact).abs() <= 1e-12 * exact.abs().max(1e-300) + 1e-15);
        }

        #[test]
        fn order_matches_floats(a in arb_scalar(), b in arb_scalar()) {
            let (x, y) = (a.to_f64(), b.to_f64());
            if (x - y).abs() > 1e-9 {
                prop_assert_eq!(a.cmp(&b), x.partial_cmp(&y).unwrap());
            }
        }

        #[test]
        fn sqrt_of_square(a in arb_scalar()) {
            let sq = &a * &a;
            prop_assert_eq!(sq.sqrt(), Some(a.abs()));
        }
    }
}
