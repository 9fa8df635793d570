//! Exact arithmetic in the field ℚ(√2).
//!
//! A [`QSqrt2`] is `rat + irr·√2` with both coefficients arbitrary-precision
//! rationals. Internally it is stored over a common denominator as
//! `(num_rat + num_irr·√2) / den` with `den > 0` and
//! `gcd(num_rat, num_irr, den) = 1`. That form is unique, √2 being
//! irrational, so derived equality is value equality, and it costs a single
//! gcd normalization per operation.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::de::{self, Deserializer};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ScalarError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("{0} is not an integer")]
    NonIntegral(String),
}

/// `rat + irr·√2`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QSqrt2 {
    num_rat: BigInt,
    num_irr: BigInt,
    den: BigInt,
}

impl Default for QSqrt2 {
    fn default() -> Self {
        QSqrt2 {
            num_rat: BigInt::zero(),
            num_irr: BigInt::zero(),
            den: BigInt::one(),
        }
    }
}

impl QSqrt2 {
    /// Builds from raw numerators over a nonzero denominator and normalizes.
    fn from_raw(mut num_rat: BigInt, mut num_irr: BigInt, mut den: BigInt) -> Self {
        debug_assert!(!den.is_zero());
        if den.is_negative() {
            num_rat = -num_rat;
            num_irr = -num_irr;
            den = -den;
        }
        if !den.is_one() {
            let g = num_rat.gcd(&num_irr).gcd(&den);
            if !g.is_one() {
                num_rat /= &g;
                num_irr /= &g;
                den /= &g;
            }
        }
        QSqrt2 {
            num_rat,
            num_irr,
            den,
        }
    }

    pub fn new(rat: BigRational, irr: BigRational) -> Self {
        let (rn, rd) = rat.into_raw();
        let (inn, id) = irr.into_raw();
        if rd == id {
            return Self::from_raw(rn, inn, rd);
        }
        let l = rd.lcm(&id);
        let num_rat = rn * (&l / &rd);
        let num_irr = inn * (&l / &id);
        Self::from_raw(num_rat, num_irr, l)
    }

    /// `(p/q) + (r/s)·√2` from machine integers. Panics on a zero denominator.
    pub fn from_parts(p: i64, q: i64, r: i64, s: i64) -> Self {
        assert!(q != 0 && s != 0, "zero denominator");
        Self::new(
            BigRational::new(p.into(), q.into()),
            BigRational::new(r.into(), s.into()),
        )
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_integer(n.into())
    }

    pub fn from_integer(n: BigInt) -> Self {
        QSqrt2 {
            num_rat: n,
            ..Self::default()
        }
    }

    pub fn from_rational(rat: BigRational) -> Self {
        Self::new(rat, BigRational::zero())
    }

    pub fn sqrt2() -> Self {
        QSqrt2 {
            num_irr: BigInt::one(),
            ..Self::default()
        }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    /// Coefficient of 1, in lowest terms.
    pub fn rat(&self) -> BigRational {
        BigRational::new(self.num_rat.clone(), self.den.clone())
    }

    /// Coefficient of √2, in lowest terms.
    pub fn irr(&self) -> BigRational {
        BigRational::new(self.num_irr.clone(), self.den.clone())
    }

    /// Least common denominator of both coefficients.
    pub fn denominator(&self) -> &BigInt {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num_rat.is_zero() && self.num_irr.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num_irr.is_zero() && self.den.is_one() && self.num_rat.is_one()
    }

    /// `rat - irr·√2`.
    pub fn conjugate(&self) -> Self {
        QSqrt2 {
            num_irr: -&self.num_irr,
            ..self.clone()
        }
    }

    /// Field norm `rat² - 2·irr²`; zero only for zero input.
    pub fn norm(&self) -> BigRational {
        let n = &self.num_rat * &self.num_rat - (&self.num_irr * &self.num_irr) * 2;
        BigRational::new(n, &self.den * &self.den)
    }

    pub fn square(&self) -> Self {
        self * self
    }

    /// Multiplicative inverse `(a - b√2)/(a² - 2b²)`.
    pub fn inv(&self) -> Result<Self, ScalarError> {
        if self.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        // d/(a + b√2) = d(a - b√2)/(a² - 2b²)
        let n = &self.num_rat * &self.num_rat - (&self.num_irr * &self.num_irr) * 2;
        Ok(Self::from_raw(
            &self.num_rat * &self.den,
            -&self.num_irr * &self.den,
            n,
        ))
    }

    /// Division by √2: `(a + b√2)/√2 = b + (a/2)√2`.
    pub fn div_exact_sqrt2(&self) -> Self {
        Self::from_raw(
            &self.num_irr * 2,
            self.num_rat.clone(),
            &self.den * 2,
        )
    }

    /// Multiplication by `3^k`; `k` may be negative.
    pub fn scale_pow3(&self, k: i32) -> Self {
        let p = BigInt::from(3).pow(k.unsigned_abs());
        if k >= 0 {
            Self::from_raw(&self.num_rat * &p, &self.num_irr * &p, self.den.clone())
        } else {
            Self::from_raw(self.num_rat.clone(), self.num_irr.clone(), &self.den * &p)
        }
    }

    /// The integer value, if this is an integer.
    pub fn as_integer(&self) -> Result<BigInt, ScalarError> {
        if self.num_irr.is_zero() && self.den.is_one() {
            Ok(self.num_rat.clone())
        } else {
            Err(ScalarError::NonIntegral(self.to_string()))
        }
    }

    /// `Σ xs[i]·ys[i]` with one normalization at the end.
    pub fn dot3(xs: [&QSqrt2; 3], ys: [&QSqrt2; 3]) -> QSqrt2 {
        let mut acc: Option<(BigInt, BigInt, BigInt)> = None;
        for (x, y) in xs.into_iter().zip(ys) {
            if x.is_zero() || y.is_zero() {
                continue;
            }
            let (r, i, d) = raw_mul(x, y);
            acc = Some(match acc {
                None => (r, i, d),
                Some((ar, ai, ad)) if ad == d => (ar + r, ai + i, ad),
                Some((ar, ai, ad)) => (ar * &d + r * &ad, ai * &d + i * &ad, ad * d),
            });
        }
        match acc {
            None => QSqrt2::zero(),
            Some((r, i, d)) => QSqrt2::from_raw(r, i, d),
        }
    }

    /// Floating-point approximation for display only; never used in checks.
    pub fn approx_f64(&self) -> f64 {
        use num_traits::ToPrimitive;
        let r = self.rat().to_f64().unwrap_or(f64::NAN);
        let i = self.irr().to_f64().unwrap_or(f64::NAN);
        r + i * std::f64::consts::SQRT_2
    }

    /// Compact form used in aligned matrix output, e.g. `1/3-2/3√2`.
    pub fn compact(&self) -> String {
        let (rat, irr) = (self.rat(), self.irr());
        let irr_part = |c: &BigRational| {
            if c.abs().is_one() {
                "√2".to_string()
            } else {
                format!("{}√2", c.abs())
            }
        };
        match (rat.is_zero(), irr.is_zero()) {
            (true, true) => "0".into(),
            (false, true) => rat.to_string(),
            (true, false) => {
                let sign = if irr.is_negative() { "-" } else { "" };
                format!("{sign}{}", irr_part(&irr))
            }
            (false, false) => {
                let sign = if irr.is_negative() { '-' } else { '+' };
                format!("{rat}{sign}{}", irr_part(&irr))
            }
        }
    }
}

// (a + b√2)/d · (c + e√2)/f, unnormalized
fn raw_mul(x: &QSqrt2, y: &QSqrt2) -> (BigInt, BigInt, BigInt) {
    let r = &x.num_rat * &y.num_rat + (&x.num_irr * &y.num_irr) * 2;
    let i = &x.num_rat * &y.num_irr + &x.num_irr * &y.num_rat;
    (r, i, &x.den * &y.den)
}

fn raw_add(x: &QSqrt2, y: &QSqrt2) -> QSqrt2 {
    if x.den == y.den {
        QSqrt2::from_raw(&x.num_rat + &y.num_rat, &x.num_irr + &y.num_irr, x.den.clone())
    } else {
        QSqrt2::from_raw(
            &x.num_rat * &y.den + &y.num_rat * &x.den,
            &x.num_irr * &y.den + &y.num_irr * &x.den,
            &x.den * &y.den,
        )
    }
}

/// `p/q + r/s*sqrt2`; zero terms are dropped, integers print without `/1`,
/// and a negative √2 coefficient prints as ` - `.
impl fmt::Display for QSqrt2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (rat, irr) = (self.rat(), self.irr());
        match (rat.is_zero(), irr.is_zero()) {
            (true, true) => write!(f, "0"),
            (false, true) => write!(f, "{rat}"),
            (true, false) => write!(f, "{irr}*sqrt2"),
            (false, false) if irr.is_negative() => write!(f, "{rat} - {}*sqrt2", -irr),
            (false, false) => write!(f, "{rat} + {irr}*sqrt2"),
        }
    }
}

impl From<i64> for QSqrt2 {
    fn from(n: i64) -> Self {
        QSqrt2::from_int(n)
    }
}

impl<'a> Add<&'a QSqrt2> for &'a QSqrt2 {
    type Output = QSqrt2;
    fn add(self, rhs: &QSqrt2) -> QSqrt2 {
        raw_add(self, rhs)
    }
}

impl Add for QSqrt2 {
    type Output = QSqrt2;
    fn add(self, rhs: QSqrt2) -> QSqrt2 {
        raw_add(&self, &rhs)
    }
}

impl AddAssign<&QSqrt2> for QSqrt2 {
    fn add_assign(&mut self, rhs: &QSqrt2) {
        *self = raw_add(self, rhs);
    }
}

impl<'a> Sub<&'a QSqrt2> for &'a QSqrt2 {
    type Output = QSqrt2;
    fn sub(self, rhs: &QSqrt2) -> QSqrt2 {
        raw_add(self, &-rhs)
    }
}

impl Sub for QSqrt2 {
    type Output = QSqrt2;
    fn sub(self, rhs: QSqrt2) -> QSqrt2 {
        &self - &rhs
    }
}

impl<'a> Mul<&'a QSqrt2> for &'a QSqrt2 {
    type Output = QSqrt2;
    fn mul(self, rhs: &QSqrt2) -> QSqrt2 {
        let (r, i, d) = raw_mul(self, rhs);
        QSqrt2::from_raw(r, i, d)
    }
}

impl Mul for QSqrt2 {
    type Output = QSqrt2;
    fn mul(self, rhs: QSqrt2) -> QSqrt2 {
        &self * &rhs
    }
}

impl Neg for &QSqrt2 {
    type Output = QSqrt2;
    fn neg(self) -> QSqrt2 {
        QSqrt2 {
            num_rat: -&self.num_rat,
            num_irr: -&self.num_irr,
            den: self.den.clone(),
        }
    }
}

impl Neg for QSqrt2 {
    type Output = QSqrt2;
    fn neg(self) -> QSqrt2 {
        QSqrt2 {
            num_rat: -self.num_rat,
            num_irr: -self.num_irr,
            den: self.den,
        }
    }
}

type JsonPair = [String; 2];

fn pair_of(r: &BigRational) -> JsonPair {
    [r.numer().to_string(), r.denom().to_string()]
}

fn rational_of<E: de::Error>(pair: &JsonPair) -> Result<BigRational, E> {
    let num: BigInt = pair[0].parse().map_err(E::custom)?;
    let den: BigInt = pair[1].parse().map_err(E::custom)?;
    if den.is_zero() {
        return Err(E::custom("zero denominator"));
    }
    Ok(BigRational::new(num, den))
}

/// JSON form `[["p","q"],["r","s"]]`, decimal strings so that width is
/// unbounded.
impl Serialize for QSqrt2 {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        [pair_of(&self.rat()), pair_of(&self.irr())].serialize(s)
    }
}

impl<'de> Deserialize<'de> for QSqrt2 {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let [rat, irr] = <[JsonPair; 2]>::deserialize(d)?;
        Ok(QSqrt2::new(rational_of(&rat)?, rational_of(&irr)?))
    }
}

/// An integer triple.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Int3 {
    pub x: BigInt,
    pub y: BigInt,
    pub z: BigInt,
}

impl Int3 {
    pub fn new(x: impl Into<BigInt>, y: impl Into<BigInt>, z: impl Into<BigInt>) -> Self {
        Int3 {
            x: x.into(),
            y: y.into(),
            z: z.into(),
        }
    }

    /// Componentwise residues in `0..3`.
    pub fn mod3(&self) -> [u8; 3] {
        let m = |v: &BigInt| {
            let r = v.mod_floor(&BigInt::from(3));
            // always 0, 1 or 2
            u8::try_from(&r).unwrap()
        };
        [m(&self.x), m(&self.y), m(&self.z)]
    }
}

impl fmt::Display for Int3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.x, self.y, self.z)
    }
}

impl Serialize for Int3 {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        [self.x.to_string(), self.y.to_string(), self.z.to_string()].serialize(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(p: i64, qd: i64, r: i64, s: i64) -> QSqrt2 {
        QSqrt2::from_parts(p, qd, r, s)
    }

    #[test]
    fn defining_relation() {
        assert_eq!(&QSqrt2::sqrt2() * &QSqrt2::sqrt2(), QSqrt2::from_int(2));
        assert_eq!(&q(1, 1, 1, 1) * &q(1, 1, -1, 1), QSqrt2::from_int(-1));
        assert_eq!(&q(1, 3, 0, 1) + &q(2, 3, 0, 1), QSqrt2::one());
    }

    #[test]
    fn inverses() {
        assert_eq!(QSqrt2::sqrt2().inv().unwrap(), q(0, 1, 1, 2));
        assert_eq!(q(1, 3, 0, 1).inv().unwrap(), QSqrt2::from_int(3));
        // (1+√2)(−1+√2) = 1
        assert_eq!(q(1, 1, 1, 1).inv().unwrap(), q(-1, 1, 1, 1));
        assert_eq!(QSqrt2::zero().inv(), Err(ScalarError::DivisionByZero));
    }

    #[test]
    fn sqrt2_division_and_pow3_scaling() {
        assert_eq!(q(0, 1, 2, 3).div_exact_sqrt2(), q(2, 3, 0, 1));
        assert_eq!(q(2, 3, 0, 1).scale_pow3(1), QSqrt2::from_int(2));
        assert_eq!(q(0, 1, -2, 3).div_exact_sqrt2().scale_pow3(1), QSqrt2::from_int(-2));
        assert_eq!(QSqrt2::from_int(9).scale_pow3(-2), QSqrt2::one());
        assert_eq!(q(5, 1, 0, 1).scale_pow3(0), q(5, 1, 0, 1));
    }

    #[test]
    fn integer_extraction() {
        assert_eq!(QSqrt2::from_int(5).as_integer().unwrap(), BigInt::from(5));
        assert!(matches!(q(1, 3, 0, 1).as_integer(), Err(ScalarError::NonIntegral(_))));
        assert!(matches!(QSqrt2::sqrt2().as_integer(), Err(ScalarError::NonIntegral(_))));
    }

    #[test]
    fn canonical_storage() {
        let x = q(2, -6, 4, 8);
        assert_eq!(x.rat().numer(), &BigInt::from(-1));
        assert_eq!(x.rat().denom(), &BigInt::from(3));
        assert_eq!(x.irr().denom(), &BigInt::from(2));
        assert_eq!(x, q(-1, 3, 1, 2));
    }

    #[test]
    fn text_rendering() {
        assert_eq!(QSqrt2::zero().to_string(), "0");
        assert_eq!(q(1, 3, 0, 1).to_string(), "1/3");
        assert_eq!(q(0, 1, -2, 3).to_string(), "-2/3*sqrt2");
        assert_eq!(q(1, 3, -2, 3).to_string(), "1/3 - 2/3*sqrt2");
        assert_eq!(q(-7, 1, 1, 2).to_string(), "-7 + 1/2*sqrt2");
        assert_eq!(q(1, 3, -2, 3).compact(), "1/3-2/3√2");
        assert_eq!(q(0, 1, 1, 1).compact(), "√2");
    }

    #[test]
    fn json_rendering() {
        let v = serde_json::to_string(&q(1, 3, -2, 3)).unwrap();
        assert_eq!(v, r#"[["1","3"],["-2","3"]]"#);
        let back: QSqrt2 = serde_json::from_str(&v).unwrap();
        assert_eq!(back, q(1, 3, -2, 3));
        assert!(serde_json::from_str::<QSqrt2>(r#"[["1","0"],["0","1"]]"#).is_err());
    }

    #[test]
    fn int3_residues() {
        assert_eq!(Int3::new(-2, 1, 0).mod3(), [1, 1, 0]);
        assert_eq!(Int3::new(0, 9, -4).mod3(), [0, 0, 2]);
    }

    fn small() -> impl Strategy<Value = QSqrt2> {
        (-50i64..50, 1i64..30, -50i64..50, 1i64..30).prop_map(|(p, a, r, b)| q(p, a, r, b))
    }

    proptest! {
        #[test]
        fn field_axioms(x in small(), y in small(), z in small()) {
            prop_assert_eq!(&(&x + &y) + &z, &x + &(&y + &z));
            prop_assert_eq!(&(&x * &y) * &z, &x * &(&y * &z));
            prop_assert_eq!(&x + &y, &y + &x);
            prop_assert_eq!(&x * &y, &y * &x);
            prop_assert_eq!(&x * &(&y + &z), &(&x * &y) + &(&x * &z));
            prop_assert_eq!(&x + &QSqrt2::zero(), x.clone());
            prop_assert_eq!(&x * &QSqrt2::one(), x.clone());
            prop_assert!((&x + &(-&x)).is_zero());
            if !x.is_zero() {
                prop_assert!((&x * &x.inv().unwrap()).is_one());
            }
        }

        #[test]
        fn dot3_matches_naive_sum(a in small(), b in small(), c in small(), x in small(), y in small(), z in small()) {
            let naive = &(&(&a * &x) + &(&b * &y)) + &(&c * &z);
            prop_assert_eq!(QSqrt2::dot3([&a, &b, &c], [&x, &y, &z]), naive);
        }

        #[test]
        fn rational_round_trip(x in small()) {
            prop_assert_eq!(QSqrt2::new(x.rat(), x.irr()), x);
        }

        #[test]
        fn norm_vanishes_only_at_zero(x in small()) {
            prop_assert_eq!(x.norm().is_zero(), x.is_zero());
            prop_assert_eq!(QSqrt2::from_rational(x.norm()), &x * &x.conjugate());
        }

        #[test]
        fn results_stay_canonical(x in small(), y in small()) {
            for v in [&x * &y, &x + &y, &x - &y] {
                for c in [v.rat(), v.irr()] {
                    prop_assert!(c.denom() > &BigInt::zero());
                    prop_assert!(c.numer().gcd(c.denom()).is_one());
                }
                prop_assert_eq!(v.denominator(), &num_integer::lcm(v.rat().denom().clone(), v.irr().denom().clone()));
            }
        }

        #[test]
        fn sqrt2_division_inverts_multiplication(x in small(), k in -5i32..5) {
            prop_assert_eq!((&x.div_exact_sqrt2()) * &QSqrt2::sqrt2(), x.clone());
            prop_assert_eq!(x.scale_pow3(k).scale_pow3(-k), x);
        }
    }
}
