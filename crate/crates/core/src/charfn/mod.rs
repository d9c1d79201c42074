//! Characteristic functions `E e^{−i⟨ξ, Y_N⟩}`: product formula, exact
//! tables, rotation-path engines, Gaussian comparison and radial integrals.
//!
//! Throughout, `⟨ξ, p⟩ = Re(ξ̄ p)`. For `ξ = r e^{iφ}` this makes
//! `⟨ξ, z^j⟩ = r cos(jθ − φ)`.

mod lowfreq;
mod phase;
mod product;
mod radial;
mod table;
mod tokyo;
mod wreath;

use num_complex::Complex64;
use serde::Serialize;

pub use lowfreq::{lowfreq_check, LowFreqReport, LowFreqRow};
pub use product::{charfn_littlewood, littlewood_log_charfn, PhaseConvention};
pub use radial::{radial_l2, RadialResult, DEFAULT_MAX_POINTS};
pub use table::charfn_table;
pub use tokyo::{tokyo_sum, TokyoSum};
pub use wreath::{charfn_wreath, wreath_transfer, PathMode};

use crate::error::{Error, Result};
use crate::ring::RingPoint;

/// A test frequency.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Frequency {
    /// `r e^{iφ}` in double precision.
    Polar { r: f64, phi: f64 },
    /// An exact ring element; every pairing with a ring point is rational.
    Ring(RingPoint),
}

impl Frequency {
    pub fn polar(r: f64, phi: f64) -> Self {
        Frequency::Polar { r, phi }
    }

    /// Bits needed to reduce phases of size about `r` with 32 guard bits.
    pub fn required_bits(&self) -> u32 {
        match self {
            Frequency::Polar { r, .. } => (r.abs().max(1.0).log2().ceil() as u32) + 32,
            Frequency::Ring(_) => 0,
        }
    }

    pub(crate) fn check_precision(&self) -> Result<()> {
        const F64_BITS: u32 = 53;
        if let Frequency::Polar { r, phi } = self {
            if !r.is_finite() || !phi.is_finite() || *r < 0.0 {
                return Err(Error::invalid("polar frequency needs finite r ≥ 0 and φ"));
            }
        }
        let need = self.required_bits();
        if need > F64_BITS {
            return Err(Error::PrecisionShortfall {
                required: need,
                available: F64_BITS,
            });
        }
        Ok(())
    }

    pub fn negate(&self, ring: Option<&crate::ring::Ring>) -> Frequency {
        match self {
            Frequency::Polar { r, phi } => Frequency::Polar {
                r: *r,
                phi: (phi + std::f64::consts::PI).rem_euclid(std::f64::consts::TAU),
            },
            Frequency::Ring(x) => Frequency::Ring(match ring {
                Some(r) => r.neg(x),
                None => x.clone(),
            }),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ProductFormula,
    TableExact,
    MonteCarlo,
    WreathConditional,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CharFnEstimate {
    pub re: f64,
    pub im: f64,
    /// Bound on the rounding error of `value`.
    pub abs_error: f64,
    /// Standard error, for sampled estimates.
    pub std_error: Option<f64>,
    pub method: Method,
}

impl CharFnEstimate {
    pub fn new(value: Complex64, abs_error: f64, method: Method) -> Self {
        CharFnEstimate {
            re: value.re,
            im: value.im,
            abs_error,
            std_error: None,
            method,
        }
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }
}

/// `exp(−½ σ² N r²)`.
pub fn gaussian_charfn(sigma2: f64, n: u32, r: f64) -> Result<f64> {
    if sigma2.is_nan() || sigma2 <= 0.0 {
        return Err(Error::invalid("sigma2 must be positive"));
    }
    Ok((-0.5 * sigma2 * n as f64 * r * r).exp())
}

/// Compensated (Neumaier) summation.
#[derive(Clone, Copy, Debug, Default)]
pub(crate) struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_values() {
        assert_eq!(gaussian_charfn(0.5, 13, 0.0).unwrap(), 1.0);
        assert!((gaussian_charfn(0.5, 4, 1.0).unwrap() - (-1f64).exp()).abs() < 1e-16);
        assert_eq!(gaussian_charfn(0.5, 4, 1e6).unwrap(), 0.0);
        assert!(gaussian_charfn(0.0, 4, 1.0).is_err());
    }

    #[test]
    fn precision_requirement() {
        assert!(Frequency::polar(1e3, 0.0).check_precision().is_ok());
        assert!(matches!(
            Frequency::polar(1e7, 0.0).check_precision(),
            Err(Error::PrecisionShortfall { required: 56, .. })
        ));
    }

    #[test]
    fn compensated_sum() {
        let mut s = Neumaier::default();
        for x in [1e16, 1.0, -1e16, 1.0] {
            s.add(x);
        }
        assert_eq!(s.value(), 2.0);
    }
}
