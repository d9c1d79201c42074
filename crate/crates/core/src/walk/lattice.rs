//! Points of `a^{-e} (ℤ + ℤz)` stored as integer pairs over a fixed
//! denominator `a^e`, for fast walk arithmetic.

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::ring::{Ring, RingPoint};

pub(crate) type Coord = (i128, i128);

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct Lattice {
    a: i128,
    b: i128,
    e: u32,
}

impl Lattice {
    pub fn new(ring: &Ring, e: u32) -> Result<Self> {
        let a = ring.a() as i128;
        a.checked_pow(e)
            .ok_or(Error::Overflow("lattice denominator"))?;
        Ok(Lattice {
            a,
            b: ring.b() as i128,
            e,
        })
    }

    pub fn exponent(&self) -> u32 {
        self.e
    }

    pub fn from_point(&self, p: &RingPoint) -> Result<Coord> {
        if p.k() > self.e {
            return Err(Error::Overflow("lattice exponent"));
        }
        let f = BigInt::from(self.a).pow(self.e - p.k());
        let u = (p.u() * &f)
            .to_i128()
            .ok_or(Error::Overflow("lattice coordinate"))?;
        let v = (p.v() * &f)
            .to_i128()
            .ok_or(Error::Overflow("lattice coordinate"))?;
        Ok((u, v))
    }

    pub fn to_point(&self, ring: &Ring, c: Coord) -> RingPoint {
        ring.canon(BigInt::from(c.0), BigInt::from(c.1), self.e)
    }

    /// `c · z^power`. Needs `a^{|power|}` headroom in the denominator, which
    /// the walk exponent guarantees.
    pub fn rotate(&self, mut c: Coord, power: i64) -> Result<Coord> {
        let (a, b) = (self.a, self.b);
        let fail = || Error::Overflow("lattice rotation");
        for _ in 0..power.unsigned_abs() {
            c = if power > 0 {
                if c.1 % a != 0 {
                    return Err(fail());
                }
                let w = c.1 / a;
                (
                    -c.1,
                    c.0.checked_add(b.checked_mul(w).ok_or_else(fail)?)
                        .ok_or_else(fail)?,
                )
            } else {
                if c.0 % a != 0 {
                    return Err(fail());
                }
                let w = c.0 / a;
                (
                    b.checked_mul(w)
                        .ok_or_else(fail)?
                        .checked_add(c.1)
                        .ok_or_else(fail)?,
                    -c.0,
                )
            };
        }
        Ok(c)
    }

    pub fn add(c: Coord, d: Coord) -> Result<Coord> {
        let fail = || Error::Overflow("lattice addition");
        Ok((
            c.0.checked_add(d.0).ok_or_else(fail)?,
            c.1.checked_add(d.1).ok_or_else(fail)?,
        ))
    }
}
