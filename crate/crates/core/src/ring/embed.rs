use num_bigint::BigInt;
use num_complex::Complex64;

use super::angle::exact_discriminant_root;
use super::{AngleSpec, Ring, RingPoint};
use crate::error::{Error, Result};
use crate::hp::Fixed;

/// Numeric evaluation layer for `z = (b + i s) / 2a`, `s = √(4a² − b²)`.
#[derive(Clone, Debug)]
pub struct EmbeddingContext {
    angle: AngleSpec,
    ring: Ring,
    precision_bits: u32,
    s: Fixed,
    is_exact_gaussian: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct HpComplex {
    pub re: Fixed,
    pub im: Fixed,
}

impl HpComplex {
    pub fn to_c64(&self) -> Complex64 {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }

    pub fn add(&self, o: &HpComplex) -> HpComplex {
        HpComplex {
            re: self.re.add(&o.re),
            im: self.im.add(&o.im),
        }
    }

    pub fn sub(&self, o: &HpComplex) -> HpComplex {
        HpComplex {
            re: self.re.sub(&o.re),
            im: self.im.sub(&o.im),
        }
    }

    pub fn mul(&self, o: &HpComplex) -> HpComplex {
        HpComplex {
            re: self.re.mul(&o.re).sub(&self.im.mul(&o.im)),
            im: self.re.mul(&o.im).add(&self.im.mul(&o.re)),
        }
    }

    pub fn norm2(&self) -> Fixed {
        self.re.mul(&self.re).add(&self.im.mul(&self.im))
    }

    pub fn abs(&self) -> Fixed {
        self.norm2().sqrt()
    }
}

impl EmbeddingContext {
    pub fn new(angle: &AngleSpec, precision_bits: u32) -> Result<Self> {
        let ring = angle.ring()?;
        if precision_bits < 64 {
            return Err(Error::invalid(
                "embedding precision must be at least 64 bits",
            ));
        }
        let (a, b) = (ring.a(), ring.b());
        let work = precision_bits + 16;
        let exact = exact_discriminant_root(a, b);
        let s = match exact {
            Some(s) => Fixed::from_int(s, work),
            None => Fixed::from_int(4 * a * a - b * b, work).sqrt(),
        };
        Ok(EmbeddingContext {
            angle: angle.clone(),
            ring,
            precision_bits,
            s,
            is_exact_gaussian: exact.is_some(),
        })
    }

    pub fn angle(&self) -> &AngleSpec {
        &self.angle
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn precision_bits(&self) -> u32 {
        self.precision_bits
    }

    pub fn s(&self) -> &Fixed {
        &self.s
    }

    pub fn is_exact_gaussian(&self) -> bool {
        self.is_exact_gaussian
    }

    /// `(u + v (b + i s) / 2a) / a^k`.
    pub fn embed(&self, x: &RingPoint) -> HpComplex {
        let work = self.s.bits();
        let den = BigInt::from(2) * self.ring.a_big().pow(x.k() + 1);
        let re_num = BigInt::from(2) * self.ring.a_big() * x.u() + self.ring.b_big() * x.v();
        let re = Fixed::from_ratio(&re_num, &den, work);
        let im = self.s.mul_int(x.v()).div_int(&den);
        HpComplex {
            re: re.with_bits(self.precision_bits),
            im: im.with_bits(self.precision_bits),
        }
    }

    pub fn embed_f64(&self, x: &RingPoint) -> Complex64 {
        self.embed(x).to_c64()
    }
}

/// Free-function form of [`EmbeddingContext::embed`].
pub fn embed(x: &RingPoint, ctx: &EmbeddingContext) -> HpComplex {
    ctx.embed(x)
}
