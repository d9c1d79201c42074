//! Pairings `y_j = ⟨ξ, z^j⟩` over a range of `j`, with `cos y_j` and its
//! rounding error.

use std::f64::consts::TAU;

use num_traits::ToPrimitive;

use super::Frequency;
use crate::error::{Error, Result};
use crate::hp;
use crate::ring::AngleSpec;

#[derive(Clone, Copy, Debug)]
pub(crate) struct Pairing {
    /// `y_j` rounded to double precision.
    pub y: f64,
    /// `cos y_j`.
    pub cos: f64,
    /// Bound on `|cos − cos y_j|`.
    pub err: f64,
}

impl Pairing {
    /// `ln |cos y_j|`, accurate in the relative sense for small `y_j`.
    pub fn ln_abs_cos(&self) -> f64 {
        if self.y.abs() < 0.5 {
            let s = (0.5 * self.y).sin();
            (-2.0 * s * s).ln_1p()
        } else {
            self.cos.abs().ln()
        }
    }
}

/// Turns of a double-precision angle in radians.
pub(crate) fn f64_turns(phi: f64) -> u128 {
    let frac = (phi / TAU).rem_euclid(1.0);
    let scaled = hp::ldexp(frac, 64);
    ((scaled as u64) as u128) << 64
}

/// `y_j` for `j ∈ lo..=hi`.
pub(crate) fn pairings(
    angle: &AngleSpec,
    xi: &Frequency,
    lo: i64,
    hi: i64,
) -> Result<Vec<Pairing>> {
    xi.check_precision()?;
    if hi < lo {
        return Ok(Vec::new());
    }
    match xi {
        Frequency::Ring(x) => {
            let ring = angle.ring().map_err(|_| Error::NotExact)?;
            let mut w = ring.mul_z(&ring.conj(x), lo);
            let mut out = Vec::with_capacity((hi - lo + 1) as usize);
            for _ in lo..=hi {
                let y = ring.re(&w);
                let t = hp::rational_turns(y.numer(), y.denom());
                out.push(Pairing {
                    y: y.to_f64().unwrap_or(f64::NAN),
                    cos: hp::cos_turns(t),
                    err: hp::TURN_TRIG_ERROR,
                });
                w = ring.mul_z(&w, 1);
            }
            Ok(out)
        }
        Frequency::Polar { r, phi } => {
            let theta = angle.theta_turns();
            let phi_t = f64_turns(*phi);
            let theta_err = angle.theta_turn_error();
            Ok((lo..=hi)
                .map(|j| {
                    let t = theta.wrapping_mul(j as i128 as u128).wrapping_sub(phi_t);
                    let y = r * hp::cos_turns(t);
                    let turn_err = j.unsigned_abs() as f64 * theta_err + 2.0 * f64::EPSILON;
                    let y_err = r * (TAU * turn_err + hp::TURN_TRIG_ERROR) + f64::EPSILON * y.abs();
                    Pairing {
                        y,
                        cos: y.cos(),
                        err: y_err + hp::TURN_TRIG_ERROR,
                    }
                })
                .collect())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::RingPoint;

    #[test]
    fn ring_and_polar_agree() {
        let angle = AngleSpec::rational(5, 6).unwrap();
        let exact = pairings(&angle, &Frequency::Ring(RingPoint::int(3)), -5, 5).unwrap();
        let polar = pairings(&angle, &Frequency::polar(3.0, 0.0), -5, 5).unwrap();
        for (e, p) in exact.iter().zip(&polar) {
            assert!((e.y - p.y).abs() < 1e-13);
            assert!((e.cos - p.cos).abs() < e.err + p.err + 1e-15);
        }
        // ⟨3, z^1⟩ = 3 cos θ = 9/5
        assert_eq!(exact[6].y, 1.8);
    }

    #[test]
    fn small_log_is_accurate() {
        let p = Pairing {
            y: 1e-9,
            cos: 1e-9f64.cos(),
            err: 0.0,
        };
        assert!((p.ln_abs_cos() + 5e-19).abs() < 1e-30);
    }

    #[test]
    fn polar_needs_exact_ring_for_ring_frequency() {
        let angle = AngleSpec::parse_numeric("sqrt(2)*pi", 128).unwrap();
        assert!(matches!(
            pairings(&angle, &Frequency::Ring(RingPoint::one()), 0, 1),
            Err(Error::NotExact)
        ));
    }
}
