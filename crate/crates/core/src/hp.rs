//! Binary fixed-point reals on big integers, and phase reduction to turns.
//!
//! A [`Fixed`] is `m / 2^bits`. Operations truncate toward negative infinity,
//! so each one contributes at most one unit in the last place.
//!
//! A *turn* is a phase expressed as a fraction of the full circle, stored in a
//! `u128`. Wrapping integer arithmetic on turns is arithmetic modulo `2π`.

use std::cmp::Ordering;
use std::f64::consts::TAU;
use std::sync::Mutex;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fixed {
    m: BigInt,
    bits: u32,
}

impl Fixed {
    pub fn zero(bits: u32) -> Self {
        Fixed {
            m: BigInt::zero(),
            bits,
        }
    }

    pub fn from_int(n: impl Into<BigInt>, bits: u32) -> Self {
        Fixed {
            m: n.into() << bits,
            bits,
        }
    }

    /// `num / den`, truncated.
    pub fn from_ratio(num: &BigInt, den: &BigInt, bits: u32) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        Fixed {
            m: (num << bits).div_floor(den),
            bits,
        }
    }

    pub fn from_raw(m: BigInt, bits: u32) -> Self {
        Fixed { m, bits }
    }

    pub fn raw(&self) -> &BigInt {
        &self.m
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    /// Re-express at another precision.
    pub fn with_bits(&self, bits: u32) -> Self {
        let m = match bits.cmp(&self.bits) {
            Ordering::Equal => self.m.clone(),
            Ordering::Greater => &self.m << (bits - self.bits),
            Ordering::Less => &self.m >> (self.bits - bits),
        };
        Fixed { m, bits }
    }

    pub fn is_negative(&self) -> bool {
        self.m.is_negative()
    }

    pub fn is_zero(&self) -> bool {
        self.m.is_zero()
    }

    pub fn abs(&self) -> Self {
        Fixed {
            m: self.m.abs(),
            bits: self.bits,
        }
    }

    pub fn neg(&self) -> Self {
        Fixed {
            m: -&self.m,
            bits: self.bits,
        }
    }

    pub fn add(&self, o: &Fixed) -> Self {
        debug_assert_eq!(self.bits, o.bits);
        Fixed {
            m: &self.m + &o.m,
            bits: self.bits,
        }
    }

    pub fn sub(&self, o: &Fixed) -> Self {
        debug_assert_eq!(self.bits, o.bits);
        Fixed {
            m: &self.m - &o.m,
            bits: self.bits,
        }
    }

    pub fn mul(&self, o: &Fixed) -> Self {
        debug_assert_eq!(self.bits, o.bits);
        Fixed {
            m: (&self.m * &o.m) >> self.bits,
            bits: self.bits,
        }
    }

    pub fn div(&self, o: &Fixed) -> Self {
        debug_assert_eq!(self.bits, o.bits);
        assert!(!o.m.is_zero(), "division by zero");
        Fixed {
            m: (&self.m << self.bits).div_floor(&o.m),
            bits: self.bits,
        }
    }

    pub fn mul_int(&self, n: &BigInt) -> Self {
        Fixed {
            m: &self.m * n,
            bits: self.bits,
        }
    }

    pub fn div_int(&self, n: &BigInt) -> Self {
        Fixed {
            m: self.m.div_floor(n),
            bits: self.bits,
        }
    }

    pub fn shl(&self, k: u32) -> Self {
        Fixed {
            m: &self.m << k,
            bits: self.bits,
        }
    }

    pub fn shr(&self, k: u32) -> Self {
        Fixed {
            m: &self.m >> k,
            bits: self.bits,
        }
    }

    pub fn sqrt(&self) -> Self {
        assert!(!self.m.is_negative(), "sqrt of negative");
        Fixed {
            m: (&self.m << self.bits).sqrt(),
            bits: self.bits,
        }
    }

    pub fn to_f64(&self) -> f64 {
        big_to_f64_scaled(&self.m, -(self.bits as i64))
    }

    /// Decimal expansion with `digits` fractional digits, rounded.
    pub fn to_decimal(&self, digits: usize) -> String {
        let scale = BigInt::from(10u32).pow(digits as u32);
        let half = if self.bits > 0 {
            BigInt::one() << (self.bits - 1)
        } else {
            BigInt::zero()
        };
        let n = (&self.m.abs() * &scale + half) >> self.bits;
        let s = n.to_string();
        let s = if s.len() <= digits {
            format!("{}{}", "0".repeat(digits + 1 - s.len()), s)
        } else {
            s
        };
        let (int, frac) = s.split_at(s.len() - digits);
        let sign = if self.m.is_negative() { "-" } else { "" };
        if digits == 0 {
            format!("{sign}{int}")
        } else {
            format!("{sign}{int}.{frac}")
        }
    }

    /// Phase `self` (radians) reduced modulo `2π`, as turns.
    ///
    /// The result carries the absolute error of `self` divided by `2π`, plus
    /// a few units of `2^-bits`.
    pub fn to_turns(&self) -> u128 {
        let inv = inv_two_pi(self.bits + 8).with_bits(self.bits);
        frac_to_turns(&self.mul(&inv))
    }
}

impl PartialOrd for Fixed {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl Ord for Fixed {
    fn cmp(&self, o: &Self) -> Ordering {
        debug_assert_eq!(self.bits, o.bits);
        self.m.cmp(&o.m)
    }
}

/// `m · 2^exp` as the nearest-ish f64, without overflowing intermediates.
pub fn big_to_f64_scaled(m: &BigInt, exp: i64) -> f64 {
    if m.is_zero() {
        return 0.0;
    }
    let nb = m.bits() as i64;
    let (top, e) = if nb > 64 {
        (m >> (nb - 64) as u64, exp + nb - 64)
    } else {
        (m.clone(), exp)
    };
    ldexp(top.to_f64().unwrap_or(0.0), e)
}

pub fn ldexp(mut x: f64, mut e: i64) -> f64 {
    while e > 1000 {
        x *= 2f64.powi(1000);
        e -= 1000;
    }
    while e < -1000 {
        x *= 2f64.powi(-1000);
        e += 1000;
    }
    x * 2f64.powi(e as i32)
}

fn frac_to_turns(x: &Fixed) -> u128 {
    let one = BigInt::one() << x.bits;
    let f = x.m.mod_floor(&one);
    let t = if x.bits >= 128 {
        f >> (x.bits - 128)
    } else {
        f << (128 - x.bits)
    };
    t.to_u128().unwrap_or(0)
}

static PI_CACHE: Mutex<Option<Fixed>> = Mutex::new(None);

/// `π` to `bits` fractional bits (Machin's formula, cached).
pub fn pi(bits: u32) -> Fixed {
    let mut cache = PI_CACHE.lock().unwrap_or_else(|e| e.into_inner());
    if let Some(p) = cache.as_ref() {
        if p.bits >= bits {
            return p.with_bits(bits);
        }
    }
    let work = bits.max(256) + 32;
    let a = atan_inv(5, work).shl(4);
    let b = atan_inv(239, work).shl(2);
    let p = a.sub(&b);
    *cache = Some(p.clone());
    p.with_bits(bits)
}

fn atan_inv(n: u32, bits: u32) -> Fixed {
    let n = BigInt::from(n);
    let n2 = &n * &n;
    let mut term = (BigInt::one() << bits) / &n;
    let mut sum = BigInt::zero();
    let mut k = 0u32;
    while !term.is_zero() {
        let t = &term / BigInt::from(2 * k + 1);
        if k.is_multiple_of(2) {
            sum += t;
        } else {
            sum -= t;
        }
        term /= &n2;
        k += 1;
    }
    Fixed::from_raw(sum, bits)
}

pub fn inv_two_pi(bits: u32) -> Fixed {
    let p = pi(bits + 8).with_bits(bits + 8);
    Fixed::from_int(1, bits + 8).div(&p.shl(1)).with_bits(bits)
}

/// `atan(t)` by argument halving and the Taylor series.
pub fn atan(t: &Fixed) -> Fixed {
    let bits = t.bits;
    let work = bits + 32;
    let x = t.with_bits(work);
    let one = Fixed::from_int(1, work);
    if x.abs() > one {
        let half_pi = pi(work).shr(1);
        let r = atan(&one.div(&x)).with_bits(work);
        let v = if x.is_negative() {
            half_pi.neg().sub(&r)
        } else {
            half_pi.sub(&r)
        };
        return v.with_bits(bits);
    }
    const HALVINGS: u32 = 8;
    let mut y = x;
    for _ in 0..HALVINGS {
        let r = one.add(&y.mul(&y)).sqrt();
        y = y.div(&one.add(&r));
    }
    let y2 = y.mul(&y);
    let mut power = y.clone();
    let mut sum = Fixed::zero(work);
    let mut k = 0u32;
    while power.raw().magnitude().bits() > 1 {
        let term = power.div_int(&BigInt::from(2 * k + 1));
        sum = if k.is_multiple_of(2) {
            sum.add(&term)
        } else {
            sum.sub(&term)
        };
        power = power.mul(&y2);
        k += 1;
    }
    sum.shl(HALVINGS).with_bits(bits)
}

/// `atan2(y, x)` in `(-π, π]`.
pub fn atan2(y: &Fixed, x: &Fixed) -> Fixed {
    let bits = y.bits;
    if x.is_zero() {
        let h = pi(bits).shr(1);
        return if y.is_negative() { h.neg() } else { h };
    }
    let base = atan(&y.div(x));
    if !x.is_negative() {
        base
    } else if y.is_negative() {
        base.sub(&pi(bits))
    } else {
        base.add(&pi(bits))
    }
}

/// The phase `num / den` radians as turns, to absolute error about `2^-120`.
pub fn rational_turns(num: &BigInt, den: &BigInt) -> u128 {
    let mag = (num.bits() as i64 - den.bits() as i64).max(0) as u32;
    let bits = 192 + mag;
    let x = Fixed::from_ratio(num, den, bits);
    x.to_turns()
}

/// Turns as a signed fraction of the circle in `[-1/2, 1/2)`.
pub fn turns_signed(t: u128) -> f64 {
    let hi = (t >> 64) as u64 as i64;
    let lo = (t as u64) >> 11;
    hi as f64 / 2f64.powi(64) + lo as f64 / 2f64.powi(117)
}

pub fn turns_to_radians(t: u128) -> f64 {
    TAU * turns_signed(t)
}

pub fn cos_turns(t: u128) -> f64 {
    turns_to_radians(t).cos()
}

pub fn sin_turns(t: u128) -> f64 {
    turns_to_radians(t).sin()
}

/// Worst-case absolute error of [`cos_turns`] or [`sin_turns`] for an exact
/// input phase.
pub const TURN_TRIG_ERROR: f64 = 4.0e-16;

/// Radians in `[0, 2π)` of a turn value.
pub fn turns_to_unsigned_radians(t: u128) -> f64 {
    let r = turns_to_radians(t);
    if r < 0.0 {
        r + TAU
    } else {
        r
    }
}

/// Parse a decimal literal (`-12.5e-3`) exactly.
pub fn parse_decimal(s: &str, bits: u32) -> Result<Fixed> {
    let (num, den) = parse_decimal_ratio(s)?;
    Ok(Fixed::from_ratio(&num, &den, bits))
}

fn parse_decimal_ratio(s: &str) -> Result<(BigInt, BigInt)> {
    let s = s.trim();
    let bad = || Error::invalid(format!("not a decimal number: {s:?}"));
    let (mant, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (neg, mant) = match mant.strip_prefix('-') {
        Some(r) => (true, r),
        None => (false, mant.strip_prefix('+').unwrap_or(mant)),
    };
    let (ip, fp) = match mant.find('.') {
        Some(i) => (&mant[..i], &mant[i + 1..]),
        None => (mant, ""),
    };
    if ip.is_empty() && fp.is_empty() {
        return Err(bad());
    }
    if !ip.chars().chain(fp.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits: BigInt = format!("0{ip}{fp}").parse().map_err(|_| bad())?;
    let e = exp - fp.len() as i32;
    let ten = BigInt::from(10u32);
    let (mut n, d) = if e >= 0 {
        (digits * ten.pow(e as u32), BigInt::one())
    } else {
        (digits, ten.pow((-e) as u32))
    };
    if neg {
        n = -n;
    }
    Ok((n, d))
}

/// Evaluate a product/quotient of factors such as `sqrt(2)*pi` or
/// `2*pi/7`. Factors are decimals, `pi`, or `sqrt(<decimal>)`.
pub fn parse_real_expr(s: &str, bits: u32) -> Result<Fixed> {
    let work = bits + 32;
    let mut acc = Fixed::from_int(1, work);
    let mut rest = s.trim();
    let mut op = '*';
    loop {
        let end = rest.find(['*', '/']).unwrap_or(rest.len());
        let tok = rest[..end].trim();
        let f = parse_factor(tok, work)?;
        acc = if op == '*' {
            acc.mul(&f)
        } else {
            if f.is_zero() {
                return Err(Error::invalid("division by zero in expression"));
            }
            acc.div(&f)
        };
        if end == rest.len() {
            break;
        }
        op = rest.as_bytes()[end] as char;
        rest = &rest[end + 1..];
    }
    Ok(acc.with_bits(bits))
}

fn parse_factor(tok: &str, bits: u32) -> Result<Fixed> {
    if tok.eq_ignore_ascii_case("pi") {
        return Ok(pi(bits));
    }
    if let Some(inner) = tok.strip_prefix("sqrt(").and_then(|t| t.strip_suffix(')')) {
        let v = parse_decimal(inner, bits)?;
        if v.is_negative() {
            return Err(Error::invalid("sqrt of a negative number"));
        }
        return Ok(v.sqrt());
    }
    parse_decimal(tok, bits)
}

/// `ln x` for a positive rational, accurate to about `1e-15 · max(1, |ln x|)`.
pub fn ln_rational(x: &BigRational) -> f64 {
    let ln_big = |m: &BigInt| {
        let bits = m.bits() as i64;
        let shift = (bits - 60).max(0);
        let top = (m >> shift as usize).to_f64().unwrap_or(f64::NAN);
        top.ln() + shift as f64 * std::f64::consts::LN_2
    };
    ln_big(x.numer()) - ln_big(x.denom())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pi_digits() {
        let p = pi(200);
        assert_eq!(
            p.to_decimal(50),
            "3.14159265358979323846264338327950288419716939937511"
        );
    }

    #[test]
    fn atan_of_one_is_quarter_pi() {
        let one = Fixed::from_int(1, 160);
        let q = atan(&one);
        let diff = q.sub(&pi(160).shr(2)).abs();
        assert!(diff.to_f64() < 1e-45);
    }

    #[test]
    fn atan2_quadrants() {
        let b = 160;
        let f = |x: f64| parse_decimal(&format!("{x}"), b).unwrap();
        for (y, x) in [
            (1.0, 1.0),
            (1.0, -1.0),
            (-1.0, -1.0),
            (-0.5, 2.0),
            (3.0, 0.0),
        ] {
            let got = atan2(&f(y), &f(x)).to_f64();
            assert!((got - f64::atan2(y, x)).abs() < 1e-15, "{y} {x}");
        }
    }

    #[test]
    fn sqrt_two() {
        let s = Fixed::from_int(2, 128).sqrt();
        assert_eq!(s.to_decimal(30), "1.414213562373095048801688724210");
    }

    #[test]
    fn turns_of_rationals() {
        let t = rational_turns(&BigInt::from(0), &BigInt::from(1));
        assert_eq!(t, 0);
        assert!(
            (cos_turns(rational_turns(&BigInt::from(1), &BigInt::from(3))) - (1f64 / 3.0).cos())
                .abs()
                < 1e-16
        );
        let big = BigInt::from(10).pow(30);
        let c = cos_turns(rational_turns(&big, &BigInt::from(7)));
        // cos(10^30/7), reference from a 60-digit evaluation.
        assert!((c - 0.20993467295922559).abs() < 1e-14, "{c}");
    }

    #[test]
    fn expression_parser() {
        let v = parse_real_expr("sqrt(2)*pi", 128).unwrap().to_f64();
        assert!((v - 2f64.sqrt() * std::f64::consts::PI).abs() < 1e-15);
        let w = parse_real_expr("2*pi/7", 128).unwrap().to_f64();
        assert!((w - TAU / 7.0).abs() < 1e-15);
        assert!(parse_real_expr("pie", 64).is_err());
        assert_eq!(parse_decimal("-1.25e1", 64).unwrap().to_f64(), -12.5);
    }

    #[test]
    fn decimal_roundtrip() {
        let x = parse_decimal("0.0625", 64).unwrap();
        assert_eq!(x.to_decimal(4), "0.0625");
        assert_eq!(x.neg().to_decimal(2), "-0.06");
    }

    #[test]
    fn huge_and_tiny_to_f64() {
        let big = Fixed::from_raw(BigInt::one() << 3000u32, 2990);
        assert_eq!(big.to_f64(), 1024.0);
        let tiny = Fixed::from_raw(BigInt::one(), 1074);
        assert!(tiny.to_f64() > 0.0);
    }

    #[test]
    fn ln_of_rationals() {
        let x = BigRational::new(BigInt::from(1) << 300usize, BigInt::from(3));
        assert!((ln_rational(&x) - (300.0 * std::f64::consts::LN_2 - 3f64.ln())).abs() < 1e-12);
    }
}
