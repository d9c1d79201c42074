//! Exact arithmetic in `ℤ[1/a][z] / (a z² − b z + a)`, where `z = e^{iθ}` and
//! `cos θ = b / 2a`.

mod angle;
mod diophantine;
mod embed;

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub use angle::{AngleSpec, NumericAngle};
pub use diophantine::{diophantine_scan, DiophantineReport, DiophantineStep};
pub use embed::{embed, EmbeddingContext, HpComplex};

use crate::error::{Error, Result};

/// `(u + v z) / a^k`. Only [`Ring`] builds non-trivial points, which keeps
/// every value in canonical form.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RingPoint {
    u: BigInt,
    v: BigInt,
    k: u32,
}

impl RingPoint {
    pub fn zero() -> Self {
        RingPoint {
            u: BigInt::zero(),
            v: BigInt::zero(),
            k: 0,
        }
    }

    pub fn one() -> Self {
        Self::int(1)
    }

    /// The integer `n`, canonical for every ring.
    pub fn int(n: impl Into<BigInt>) -> Self {
        RingPoint {
            u: n.into(),
            v: BigInt::zero(),
            k: 0,
        }
    }

    /// `z` itself.
    pub fn z() -> Self {
        RingPoint {
            u: BigInt::zero(),
            v: BigInt::one(),
            k: 0,
        }
    }

    pub fn u(&self) -> &BigInt {
        &self.u
    }

    pub fn v(&self) -> &BigInt {
        &self.v
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn is_zero(&self) -> bool {
        self.u.is_zero() && self.v.is_zero()
    }
}

impl fmt::Display for RingPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.v.is_negative() { '-' } else { '+' };
        write!(f, "({}{}{}*z)/a^{}", self.u, sign, self.v.abs(), self.k)
    }
}

/// Parses the textual form `(u+v*z)/a^k`. The result is raw: pass it through
/// [`Ring::canon`] before use.
impl FromStr for RingPoint {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::invalid(format!("expected (u+v*z)/a^k, got {s:?}"));
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let body = s.strip_prefix('(').ok_or_else(bad)?;
        let close = body.find(')').ok_or_else(bad)?;
        let (inner, tail) = body.split_at(close);
        let k: u32 = tail
            .strip_prefix(")/a^")
            .ok_or_else(bad)?
            .parse()
            .map_err(|_| bad())?;
        let inner = inner.strip_suffix("*z").ok_or_else(bad)?;
        let split = inner
            .char_indices()
            .skip(1)
            .filter(|&(_, c)| c == '+' || c == '-')
            .map(|(i, _)| i)
            .last()
            .ok_or_else(bad)?;
        let u: BigInt = inner[..split].parse().map_err(|_| bad())?;
        let v: BigInt = inner[split..]
            .trim_start_matches('+')
            .parse()
            .map_err(|_| bad())?;
        Ok(RingPoint { u, v, k })
    }
}

impl Serialize for RingPoint {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for RingPoint {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// The ring attached to a rational-cosine angle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ring {
    a: BigInt,
    b: BigInt,
    ai: i64,
    bi: i64,
}

impl Ring {
    pub(crate) fn new(a: i64, b: i64) -> Self {
        Ring {
            a: a.into(),
            b: b.into(),
            ai: a,
            bi: b,
        }
    }

    pub fn a(&self) -> i64 {
        self.ai
    }

    pub fn b(&self) -> i64 {
        self.bi
    }

    pub fn a_big(&self) -> &BigInt {
        &self.a
    }

    pub fn b_big(&self) -> &BigInt {
        &self.b
    }

    /// Canonical representative of `(u + v z) / a^k`.
    pub fn canon(&self, mut u: BigInt, mut v: BigInt, mut k: u32) -> RingPoint {
        if u.is_zero() && v.is_zero() {
            return RingPoint::zero();
        }
        while k > 0 {
            let (qu, ru) = u.div_rem(&self.a);
            if !ru.is_zero() {
                break;
            }
            let (qv, rv) = v.div_rem(&self.a);
            if !rv.is_zero() {
                break;
            }
            u = qu;
            v = qv;
            k -= 1;
        }
        RingPoint { u, v, k }
    }

    pub fn point(&self, u: impl Into<BigInt>, v: impl Into<BigInt>, k: u32) -> RingPoint {
        self.canon(u.into(), v.into(), k)
    }

    /// Re-canonicalize a point of unknown provenance (e.g. parsed text).
    pub fn normalize(&self, x: &RingPoint) -> RingPoint {
        self.canon(x.u.clone(), x.v.clone(), x.k)
    }

    fn lift(&self, x: &RingPoint, k: u32) -> (BigInt, BigInt) {
        let f = self.a.pow(k - x.k);
        (&x.u * &f, &x.v * &f)
    }

    pub fn add(&self, x: &RingPoint, y: &RingPoint) -> RingPoint {
        let k = x.k.max(y.k);
        let (xu, xv) = self.lift(x, k);
        let (yu, yv) = self.lift(y, k);
        self.canon(xu + yu, xv + yv, k)
    }

    pub fn neg(&self, x: &RingPoint) -> RingPoint {
        RingPoint {
            u: -&x.u,
            v: -&x.v,
            k: x.k,
        }
    }

    pub fn sub(&self, x: &RingPoint, y: &RingPoint) -> RingPoint {
        self.add(x, &self.neg(y))
    }

    pub fn scale(&self, x: &RingPoint, n: &BigInt) -> RingPoint {
        self.canon(&x.u * n, &x.v * n, x.k)
    }

    /// `x / a`.
    pub fn div_a(&self, x: &RingPoint) -> RingPoint {
        self.canon(x.u.clone(), x.v.clone(), x.k + 1)
    }

    pub fn mul(&self, x: &RingPoint, y: &RingPoint) -> RingPoint {
        let (a, b) = (&self.a, &self.b);
        let vv = &x.v * &y.v;
        let u = a * (&x.u * &y.u - &vv);
        let v = a * (&x.u * &y.v + &y.u * &x.v) + b * &vv;
        self.canon(u, v, x.k + y.k + 1)
    }

    /// `x · z^power`.
    pub fn mul_z(&self, x: &RingPoint, power: i64) -> RingPoint {
        let (a, b) = (&self.a, &self.b);
        let (mut u, mut v, mut k) = (x.u.clone(), x.v.clone(), x.k);
        if x.is_zero() {
            return RingPoint::zero();
        }
        for _ in 0..power.unsigned_abs() {
            let (nu, nv) = if power > 0 {
                (-(a * &v), a * &u + b * &v)
            } else {
                (b * &u + a * &v, -(a * &u))
            };
            u = nu;
            v = nv;
            k += 1;
            // Keep the numbers small; the divisibility test is cheap.
            if u.is_multiple_of(a) && v.is_multiple_of(a) {
                u /= a;
                v /= a;
                k -= 1;
            }
        }
        self.canon(u, v, k)
    }

    pub fn z_pow(&self, j: i64) -> RingPoint {
        self.mul_z(&RingPoint::one(), j)
    }

    /// Complex conjugate, using `z̄ = (b − a z)/a`.
    pub fn conj(&self, x: &RingPoint) -> RingPoint {
        let (a, b) = (&self.a, &self.b);
        self.canon(a * &x.u + b * &x.v, -(a * &x.v), x.k + 1)
    }

    /// Real part, an exact rational.
    pub fn re(&self, x: &RingPoint) -> BigRational {
        let num = BigInt::from(2) * &self.a * &x.u + &self.b * &x.v;
        let den = BigInt::from(2) * self.a.pow(x.k + 1);
        BigRational::new(num, den)
    }

    /// `|x|²`, an exact rational.
    pub fn norm2(&self, x: &RingPoint) -> BigRational {
        let (a, b) = (&self.a, &self.b);
        let num = a * &x.u * &x.u + b * &x.u * &x.v + a * &x.v * &x.v;
        BigRational::new(num, self.a.pow(2 * x.k + 1))
    }

    /// `Re(ξ̄ z^j)`: the pairing of ξ with the unit vector `z^j`.
    pub fn real_pairing(&self, xi: &RingPoint, j: i64) -> BigRational {
        self.re(&self.mul_z(&self.conj(xi), j))
    }

    /// `c_0 + c_1 z + … + c_D z^D` by Horner's rule.
    pub fn eval_poly<T: Clone + Into<BigInt>>(&self, coeffs: &[T]) -> RingPoint {
        let mut acc = RingPoint::zero();
        for c in coeffs.iter().rev() {
            acc = self.add(&self.mul_z(&acc, 1), &RingPoint::int(c.clone().into()));
        }
        acc
    }
}

/// `cos(jθ)` exactly, by the Chebyshev recurrence `c_{j+1} = (b/a) c_j − c_{j−1}`.
pub fn cos_multiple(angle: &AngleSpec, j: i64) -> Result<BigRational> {
    let ring = angle.ring()?;
    Ok(cos_multiple_ring(&ring, j))
}

pub(crate) fn cos_multiple_ring(ring: &Ring, j: i64) -> BigRational {
    // c_j = C_j / (2 a^j) with integer C_{j+1} = b C_j − a² C_{j−1}.
    let j = j.unsigned_abs();
    let (a, b) = (ring.a_big(), ring.b_big());
    let a2 = a * a;
    let mut prev = BigInt::from(2);
    let mut cur = b.clone();
    if j == 0 {
        return BigRational::one();
    }
    for _ in 1..j {
        let next = b * &cur - &a2 * &prev;
        prev = cur;
        cur = next;
    }
    BigRational::new(cur, BigInt::from(2) * a.pow(j as u32))
}

/// Free-function form of [`Ring::real_pairing`].
pub fn real_pairing(angle: &AngleSpec, xi: &RingPoint, j: i64) -> Result<BigRational> {
    Ok(angle.ring()?.real_pairing(xi, j))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r56() -> Ring {
        Ring::new(5, 6)
    }

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn add_examples() {
        let r = r56();
        assert!(r.add(&RingPoint::int(1), &RingPoint::int(-1)).is_zero());
        assert_eq!(r.add(&RingPoint::z(), &RingPoint::z()), r.point(0, 2, 0));
        let x = r.point(-5, 6, 1);
        assert_eq!(r.add(&x, &RingPoint::one()), r.point(0, 6, 1));
        assert_eq!(r.point(0, 6, 1).k(), 1);
    }

    #[test]
    fn z_powers() {
        let r = r56();
        assert_eq!(r.mul_z(&RingPoint::z(), 1), r.point(-5, 6, 1));
        let zinv = r.mul_z(&RingPoint::one(), -1);
        assert_eq!(zinv, r.point(6, -5, 1));
        assert_eq!(r.mul_z(&zinv, 1), RingPoint::one());
        let x = r.point(7, -3, 2);
        assert_eq!(r.mul_z(&x, 0), x);
        assert_eq!(r.mul_z(&r.mul_z(&x, 9), -9), x);
    }

    #[test]
    fn general_product_matches_rotation() {
        let r = r56();
        let x = r.point(3, 11, 1);
        assert_eq!(r.mul(&x, &RingPoint::z()), r.mul_z(&x, 1));
        assert_eq!(r.mul(&r.z_pow(3), &r.z_pow(-5)), r.z_pow(-2));
    }

    #[test]
    fn cosines() {
        let ang = AngleSpec::rational(5, 6).unwrap();
        assert_eq!(cos_multiple(&ang, 0).unwrap(), q(1, 1));
        assert_eq!(cos_multiple(&ang, 1).unwrap(), q(3, 5));
        assert_eq!(cos_multiple(&ang, 2).unwrap(), q(-7, 25));
        assert_eq!(cos_multiple(&ang, 3).unwrap(), q(-117, 125));
        assert_eq!(cos_multiple(&ang, -3).unwrap(), q(-117, 125));
    }

    #[test]
    fn cos_multiple_even_b() {
        // b = 2: cos θ = 1/a, and the fraction must come out reduced.
        let ang = AngleSpec::rational(3, 2).unwrap();
        assert_eq!(cos_multiple(&ang, 1).unwrap(), q(1, 3));
        assert_eq!(cos_multiple(&ang, 2).unwrap(), q(-7, 9));
    }

    #[test]
    fn pairings() {
        let r = r56();
        let one = RingPoint::one();
        assert_eq!(r.real_pairing(&one, 0), q(1, 1));
        let x = RingPoint::int(25);
        assert_eq!(r.real_pairing(&x, 2), q(-7, 1));
        assert_eq!(r.real_pairing(&x, 3), q(-117, 5));
    }

    #[test]
    fn norms_and_conjugates() {
        let r = r56();
        let zm1 = r.sub(&RingPoint::z(), &RingPoint::one());
        assert_eq!(r.norm2(&zm1), q(4, 5));
        assert_eq!(r.norm2(&r.z_pow(17)), q(1, 1));
        let x = r.point(4, -9, 3);
        assert_eq!(r.conj(&r.conj(&x)), x);
        let prod = r.mul(&x, &r.conj(&x));
        assert_eq!(r.re(&prod), r.norm2(&x));
        assert!(r.sub(&prod, &r.conj(&prod)).is_zero());
    }

    #[test]
    fn text_form() {
        let r = r56();
        let x = r.point(-5, 6, 1);
        assert_eq!(x.to_string(), "(-5+6*z)/a^1");
        assert_eq!("(-5+6*z)/a^1".parse::<RingPoint>().unwrap(), x);
        assert_eq!(
            "( 3 - 4*z ) / a^0".parse::<RingPoint>().unwrap(),
            r.point(3, -4, 0)
        );
        assert!("(3-4z)/a^0".parse::<RingPoint>().is_err());
        let raw: RingPoint = "(25+0*z)/a^2".parse().unwrap();
        assert_eq!(r.normalize(&raw), RingPoint::one());
    }

    #[test]
    fn poly_eval() {
        let r = r56();
        assert_eq!(
            r.eval_poly(&[-1i64, 1]),
            r.sub(&RingPoint::z(), &RingPoint::one())
        );
        assert_eq!(r.eval_poly(&[0i64, 0, 1]), r.point(-5, 6, 1));
        assert!(r.eval_poly::<i64>(&[]).is_zero());
    }
}
