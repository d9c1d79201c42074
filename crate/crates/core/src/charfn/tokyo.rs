use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use super::Frequency;
use crate::error::{Error, Result};
use crate::ring::AngleSpec;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TokyoSum {
    pub value: f64,
    /// Exact value for ring frequencies, as `p/q`.
    pub exact: Option<String>,
}

/// `Σ_{j=k}^{k+window−1} d(Re(z^j ξ), ℤ)²`.
///
/// Shifting `k` by one is the same as multiplying ξ by `z`.
pub fn tokyo_sum(angle: &AngleSpec, xi: &Frequency, k: i64, window: u32) -> Result<TokyoSum> {
    if window == 0 {
        return Err(Error::invalid("window must be positive"));
    }
    match xi {
        Frequency::Ring(x) => {
            let ring = angle.ring().map_err(|_| Error::NotExact)?;
            let mut w = ring.mul_z(x, k);
            let mut acc = BigRational::zero();
            for _ in 0..window {
                let d = dist_to_int(&ring.re(&w));
                acc += &d * &d;
                w = ring.mul_z(&w, 1);
            }
            Ok(TokyoSum {
                value: acc.to_f64().unwrap_or(f64::NAN),
                exact: Some(acc.to_string()),
            })
        }
        Frequency::Polar { r, phi } => {
            xi.check_precision()?;
            let theta = angle.theta_turns();
            let phi_t = super::phase::f64_turns(*phi);
            let mut acc = super::Neumaier::default();
            for j in k..k + window as i64 {
                let t = theta.wrapping_mul(j as i128 as u128).wrapping_add(phi_t);
                let y = r * crate::hp::cos_turns(t);
                let d = y - y.round();
                acc.add(d * d);
            }
            Ok(TokyoSum {
                value: acc.value(),
                exact: None,
            })
        }
    }
}

fn dist_to_int(y: &BigRational) -> BigRational {
    let two = BigInt::from(2);
    // round half up: floor(y + 1/2)
    let shifted = y + BigRational::new(1.into(), two.clone());
    let n = shifted.numer().div_floor(shifted.denom());
    let d = y - BigRational::from_integer(n);
    if d < BigRational::zero() {
        -d
    } else {
        d
    }
}
