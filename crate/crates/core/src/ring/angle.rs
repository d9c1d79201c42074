use std::f64::consts::TAU;

use num_integer::{Integer, Roots};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::Ring;
use crate::error::{Error, Result};
use crate::hp::{self, Fixed};

/// A rotation angle θ.
#[derive(Clone, Debug, PartialEq)]
pub enum AngleSpec {
    /// `cos θ = b / 2a` with `θ ∈ (0, π)`.
    RationalCosine {
        a: i64,
        b: i64,
    },
    Numeric(NumericAngle),
}

#[derive(Clone, Debug, PartialEq)]
pub struct NumericAngle {
    theta: Fixed,
    precision_bits: u32,
}

impl NumericAngle {
    pub fn theta(&self) -> &Fixed {
        &self.theta
    }

    pub fn precision_bits(&self) -> u32 {
        self.precision_bits
    }
}

impl AngleSpec {
    pub fn rational(a: i64, b: i64) -> Result<Self> {
        if a < 2 {
            return Err(Error::invalid(format!("a must be at least 2, got {a}")));
        }
        if b.abs() >= 2 * a {
            return Err(Error::invalid(format!(
                "|b| must be below 2a, got a={a}, b={b}"
            )));
        }
        if a.gcd(&b) != 1 {
            return Err(Error::invalid(format!(
                "gcd(a, b) must be 1, got a={a}, b={b}"
            )));
        }
        if a > 1 << 20 {
            return Err(Error::invalid("a above 2^20 is not supported"));
        }
        Ok(AngleSpec::RationalCosine { a, b })
    }

    /// θ given to `precision_bits`, reduced into `[0, 2π)`.
    pub fn numeric(theta: &Fixed, precision_bits: u32) -> Result<Self> {
        if precision_bits < 64 {
            return Err(Error::invalid("precision_bits must be at least 64"));
        }
        let t = theta.with_bits(precision_bits + 16);
        let two_pi = hp::pi(precision_bits + 16).shl(1);
        let mut r = t.sub(&two_pi.mul_int(&(t.div(&two_pi).raw() >> (precision_bits + 16))));
        while r.is_negative() {
            r = r.add(&two_pi);
        }
        while r >= two_pi {
            r = r.sub(&two_pi);
        }
        Ok(AngleSpec::Numeric(NumericAngle {
            theta: r.with_bits(precision_bits),
            precision_bits,
        }))
    }

    /// θ from an expression such as `sqrt(2)*pi` or a decimal literal.
    pub fn parse_numeric(expr: &str, precision_bits: u32) -> Result<Self> {
        let t = hp::parse_real_expr(expr, precision_bits.max(64) + 32)?;
        Self::numeric(&t, precision_bits)
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, AngleSpec::RationalCosine { .. })
    }

    pub fn ring(&self) -> Result<Ring> {
        match *self {
            AngleSpec::RationalCosine { a, b } => Ok(Ring::new(a, b)),
            AngleSpec::Numeric(_) => Err(Error::NotExact),
        }
    }

    /// Bits of θ that are trustworthy.
    pub fn precision_bits(&self) -> u32 {
        match self {
            AngleSpec::RationalCosine { .. } => u32::MAX,
            AngleSpec::Numeric(n) => n.precision_bits,
        }
    }

    /// θ to `bits` fractional bits.
    pub fn theta(&self, bits: u32) -> Fixed {
        match self {
            AngleSpec::RationalCosine { a, b } => {
                let w = bits + 32;
                let s = Fixed::from_int(4 * a * a - b * b, w).sqrt();
                hp::atan2(&s, &Fixed::from_int(*b, w)).with_bits(bits)
            }
            AngleSpec::Numeric(n) => n.theta.with_bits(bits),
        }
    }

    /// θ as turns; absolute error below `2^-100` for rational cosines and
    /// about `2^-precision_bits` otherwise.
    pub fn theta_turns(&self) -> u128 {
        let bits = match self {
            AngleSpec::RationalCosine { .. } => 192,
            AngleSpec::Numeric(n) => n.precision_bits.max(136),
        };
        self.theta(bits).to_turns()
    }

    pub fn theta_f64(&self) -> f64 {
        hp::turns_to_unsigned_radians(self.theta_turns())
    }

    /// Absolute error (in turns) of `theta_turns`.
    pub fn theta_turn_error(&self) -> f64 {
        match self {
            AngleSpec::RationalCosine { .. } => 2f64.powi(-100),
            AngleSpec::Numeric(n) => {
                hp::ldexp(1.0, -(n.precision_bits as i64)) / TAU + 2f64.powi(-126)
            }
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum AngleRepr {
    Rational {
        a: i64,
        b: i64,
    },
    Numeric {
        theta_bits: String,
        precision_bits: u32,
    },
}

impl Serialize for AngleSpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let repr = match self {
            AngleSpec::RationalCosine { a, b } => AngleRepr::Rational { a: *a, b: *b },
            AngleSpec::Numeric(n) => {
                let digits =
                    (n.precision_bits as f64 * std::f64::consts::LOG10_2).ceil() as usize + 2;
                AngleRepr::Numeric {
                    theta_bits: n.theta.to_decimal(digits),
                    precision_bits: n.precision_bits,
                }
            }
        };
        repr.serialize(s)
    }
}

impl<'de> Deserialize<'de> for AngleSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        match AngleRepr::deserialize(d)? {
            AngleRepr::Rational { a, b } => AngleSpec::rational(a, b),
            AngleRepr::Numeric {
                theta_bits,
                precision_bits,
            } => AngleSpec::parse_numeric(&theta_bits, precision_bits),
        }
        .map_err(serde::de::Error::custom)
    }
}

/// `√(4a² − b²)` when it is an integer.
pub(crate) fn exact_discriminant_root(a: i64, b: i64) -> Option<i64> {
    let d = 4 * a * a - b * b;
    let s = d.sqrt();
    (s * s == d).then_some(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(AngleSpec::rational(5, 6).is_ok());
        assert!(AngleSpec::rational(1, 1).is_err());
        assert!(AngleSpec::rational(5, 10).is_err());
        assert!(AngleSpec::rational(4, 6).is_err());
        assert!(AngleSpec::rational(5, -9).is_ok());
        assert!(AngleSpec::parse_numeric("1.0", 32).is_err());
    }

    #[test]
    fn theta_of_three_four_five() {
        let t = AngleSpec::rational(5, 6).unwrap().theta_f64();
        assert!((t - (0.6f64).acos()).abs() < 1e-15);
        let neg = AngleSpec::rational(5, -6).unwrap().theta_f64();
        assert!((neg - (-0.6f64).acos()).abs() < 1e-15);
    }

    #[test]
    fn numeric_reduction() {
        let a = AngleSpec::parse_numeric("sqrt(2)*pi", 128).unwrap();
        let want = 2f64.sqrt() * std::f64::consts::PI;
        assert!((a.theta_f64() - want).abs() < 1e-14);
        let b = AngleSpec::parse_numeric("-1", 128).unwrap();
        assert!((b.theta_f64() - (TAU - 1.0)).abs() < 1e-14);
        let c = AngleSpec::parse_numeric("20", 128).unwrap();
        assert!((c.theta_f64() - (20.0 - 3.0 * TAU)).abs() < 1e-13);
    }

    #[test]
    fn json_forms() {
        let a = AngleSpec::rational(5, 6).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), r#"{"a":5,"b":6}"#);
        let back: AngleSpec = serde_json::from_str(r#"{"a":5,"b":6}"#).unwrap();
        assert_eq!(back, a);
        let n = AngleSpec::parse_numeric("sqrt(2)*pi", 96).unwrap();
        let js = serde_json::to_string(&n).unwrap();
        let back: AngleSpec = serde_json::from_str(&js).unwrap();
        assert!((back.theta_f64() - n.theta_f64()).abs() < 1e-20);
        assert!(serde_json::from_str::<AngleSpec>(r#"{"a":4,"b":6}"#).is_err());
    }

    #[test]
    fn discriminant() {
        assert_eq!(exact_discriminant_root(5, 6), Some(8));
        assert_eq!(exact_discriminant_root(3, 2), None);
    }
}
