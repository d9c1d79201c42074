use std::f64::consts::{PI, TAU};

use num_bigint::BigInt;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hp;
use crate::ring::{AngleSpec, Ring};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GoodQ {
    pub q: u64,
    /// `|z^q − 1|`.
    pub modulus: f64,
    /// Window membership was decided in exact arithmetic.
    pub exact: bool,
}

/// `2a^q cos(qθ)`, an integer, by the doubling ladder
/// `C_{2m} = C_m² − 2a^{2m}`, `C_{2m+1} = C_m C_{m+1} − b a^{2m}`.
pub(crate) fn cos_numerator(ring: &Ring, q: u64) -> BigInt {
    let (a, b) = (ring.a_big(), ring.b_big());
    // (C_m, C_{m+1}, a^m)
    let mut cm = BigInt::from(2);
    let mut cm1 = b.clone();
    let mut am = BigInt::from(1);
    for bit in (0..64 - q.leading_zeros()).rev() {
        let a2m = &am * &am;
        let c2m = &cm * &cm - BigInt::from(2) * &a2m;
        let c2m1 = &cm * &cm1 - b * &a2m;
        let a2m1 = &a2m * a;
        let c2m2 = &cm1 * &cm1 - BigInt::from(2) * &a2m1 * a;
        if (q >> bit) & 1 == 0 {
            cm = c2m;
            cm1 = c2m1;
            am = a2m;
        } else {
            cm = c2m1;
            cm1 = c2m2;
            am = a2m1;
        }
    }
    cm
}

/// Exact test of `1/(4n²) < 2 − 2cos(qθ) < 1/n²`.
pub(crate) fn in_window_exact(ring: &Ring, n: u64, q: u64) -> bool {
    let c = cos_numerator(ring, q);
    let aq = ring.a_big().pow(q as u32);
    // 2 − 2cos(qθ) = (2a^q − C_q)/a^q
    let gap = BigInt::from(2) * &aq - c;
    let n2 = BigInt::from(n) * BigInt::from(n);
    aq < BigInt::from(4) * &n2 * &gap && &n2 * &gap < aq
}

/// Smallest `q ≤ q_max` with `1/(2n) < |z^q − 1| < 1/n`.
///
/// The scan runs on turns; candidates (and near-misses within the rounding
/// bound) are decided exactly for rational cosines.
pub fn good_q(angle: &AngleSpec, n: u64, q_max: u64) -> Result<GoodQ> {
    if n < 2 {
        return Err(Error::invalid("good_q needs n ≥ 2"));
    }
    let theta = angle.theta_turns();
    let ring = angle.ring().ok();
    let (lo, hi) = (1.0 / (2.0 * n as f64), 1.0 / n as f64);
    let mut t = 0u128;
    for q in 1..=q_max {
        t = t.wrapping_add(theta);
        let modulus = 2.0 * (PI * hp::turns_signed(t)).sin().abs();
        let err = TAU * q as f64 * angle.theta_turn_error() + 4.0 * f64::EPSILON;
        if modulus + err <= lo || modulus - err >= hi {
            continue;
        }
        let clearly_inside = modulus - err > lo && modulus + err < hi;
        match &ring {
            Some(r) if q <= u32::MAX as u64 => {
                if in_window_exact(r, n, q) {
                    return Ok(GoodQ {
                        q,
                        modulus,
                        exact: true,
                    });
                }
            }
            _ if clearly_inside => {
                return Ok(GoodQ {
                    q,
                    modulus,
                    exact: false,
                })
            }
            _ => {}
        }
    }
    Err(Error::NotFound(format!(
        "no q ≤ {q_max} with 1/(2n) < |z^q − 1| < 1/n for n = {n}"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::cos_multiple_ring;
    use num_rational::BigRational;

    #[test]
    fn ladder_matches_recurrence() {
        let ring = Ring::new(5, 6);
        for q in 0..40u64 {
            let c = BigRational::new(
                cos_numerator(&ring, q),
                BigInt::from(2) * BigInt::from(5).pow(q as u32),
            );
            assert_eq!(c, cos_multiple_ring(&ring, q as i64), "q={q}");
        }
        let r7 = Ring::new(7, -3);
        for q in [1u64, 2, 9, 33] {
            let c = BigRational::new(
                cos_numerator(&r7, q),
                BigInt::from(2) * BigInt::from(7).pow(q as u32),
            );
            assert_eq!(c, cos_multiple_ring(&r7, q as i64));
        }
    }

    #[test]
    fn scan_oracle() {
        let angle = AngleSpec::rational(5, 6).unwrap();
        let theta = (0.6f64).acos();
        for n in [2u64, 10, 100] {
            let g = good_q(&angle, n, 100_000).unwrap();
            let direct = (1..)
                .find(|&q| {
                    let m = 2.0 * (q as f64 * theta / 2.0).sin().abs();
                    m > 0.5 / n as f64 && m < 1.0 / n as f64
                })
                .unwrap();
            assert_eq!(g.q, direct, "n={n}");
            assert!(g.exact);
            let x = 2.0 - 2.0 * (g.q as f64 * theta).cos();
            assert!(x > 1.0 / (4.0 * (n * n) as f64) && x < 1.0 / (n * n) as f64);
        }
    }

    #[test]
    fn numeric_angle() {
        let angle = AngleSpec::parse_numeric("sqrt(2)*pi", 128).unwrap();
        let g = good_q(&angle, 2, 1000).unwrap();
        let th = 2f64.sqrt() * PI;
        let direct = (1..)
            .find(|&q| {
                let m = 2.0 * (q as f64 * th / 2.0).sin().abs();
                m > 0.25 && m < 0.5
            })
            .unwrap();
        assert_eq!(g.q, direct);
    }
}
