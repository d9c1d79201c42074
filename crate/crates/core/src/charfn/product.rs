use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::phase::pairings;
use super::{CharFnEstimate, Frequency, Method};
use crate::error::{Error, Result};
use crate::ring::AngleSpec;

/// Index range of the cosine product.
///
/// The Littlewood endpoint is `Y_N = Σ_{j<N} ε_j z^j`, so its characteristic
/// function is `Π_{j=0}^{N−1} cos⟨ξ, z^j⟩` ([`PhaseConvention::Walk`]). The
/// shifted form `Π_{j=1}^{N}` is the law of `z Y_N`; both have the same
/// modulus after rotating ξ.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhaseConvention {
    #[default]
    Shifted,
    Walk,
}

impl PhaseConvention {
    fn range(self, n: u32) -> (i64, i64) {
        match self {
            PhaseConvention::Shifted => (1, n as i64),
            PhaseConvention::Walk => (0, n as i64 - 1),
        }
    }
}

/// `Π cos⟨ξ, z^j⟩` for the Littlewood walk.
pub fn charfn_littlewood(
    angle: &AngleSpec,
    n: u32,
    xi: &Frequency,
    convention: PhaseConvention,
) -> Result<CharFnEstimate> {
    let (lo, hi) = convention.range(n);
    let ps = pairings(angle, xi, lo, hi)?;
    let mut prod = 1.0f64;
    let mut err = 0.0;
    for p in &ps {
        prod *= p.cos;
        err += p.err + f64::EPSILON;
    }
    Ok(CharFnEstimate::new(
        Complex64::new(prod, 0.0),
        err,
        Method::ProductFormula,
    ))
}

/// `log Π cos⟨ξ, z^j⟩` on the principal branch, computed as a sum so that
/// tiny products keep full relative accuracy. Fails if a factor vanishes.
pub fn littlewood_log_charfn(
    angle: &AngleSpec,
    n: u32,
    xi: &Frequency,
    convention: PhaseConvention,
) -> Result<Complex64> {
    let (lo, hi) = convention.range(n);
    let mut re = 0.0;
    let mut negatives = 0u32;
    for p in pairings(angle, xi, lo, hi)? {
        if p.cos.abs() <= p.err {
            return Err(Error::Regime(
                "a cosine factor is indistinguishable from zero".into(),
            ));
        }
        re += p.ln_abs_cos();
        negatives += (p.cos < 0.0) as u32;
    }
    let im = if negatives % 2 == 1 {
        std::f64::consts::PI
    } else {
        0.0
    };
    Ok(Complex64::new(re, im))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::RingPoint;

    fn ang() -> AngleSpec {
        AngleSpec::rational(5, 6).unwrap()
    }

    #[test]
    fn zero_frequency_and_zero_steps() {
        let one =
            charfn_littlewood(&ang(), 9, &Frequency::polar(0.0, 1.0), Default::default()).unwrap();
        assert_eq!(one.value(), Complex64::new(1.0, 0.0));
        let empty =
            charfn_littlewood(&ang(), 0, &Frequency::polar(3.0, 1.0), Default::default()).unwrap();
        assert_eq!(empty.re, 1.0);
    }

    #[test]
    fn exact_small_case() {
        // ξ = 1, N = 2, walk convention: cos(1) cos(cos θ) with cos θ = 3/5.
        let est = charfn_littlewood(
            &ang(),
            2,
            &Frequency::Ring(RingPoint::one()),
            PhaseConvention::Walk,
        )
        .unwrap();
        let want = 1f64.cos() * 0.6f64.cos();
        assert!((est.re - want).abs() < 1e-15);
        let shifted = charfn_littlewood(
            &ang(),
            2,
            &Frequency::Ring(RingPoint::one()),
            PhaseConvention::Shifted,
        )
        .unwrap();
        // cos(3/5) cos(cos 2θ) with cos 2θ = −7/25.
        assert!((shifted.re - 0.6f64.cos() * (-0.28f64).cos()).abs() < 1e-15);
    }

    #[test]
    fn log_matches_product() {
        let xi = Frequency::polar(0.7, 0.3);
        let v = charfn_littlewood(&ang(), 40, &xi, PhaseConvention::Walk).unwrap();
        let l = littlewood_log_charfn(&ang(), 40, &xi, PhaseConvention::Walk).unwrap();
        assert!((l.exp().re - v.re).abs() < 1e-14);
    }

    #[test]
    fn log_of_negative_product() {
        let xi = Frequency::polar(3.0, 0.0);
        let v = charfn_littlewood(&ang(), 1, &xi, PhaseConvention::Walk).unwrap();
        assert!(v.re < 0.0);
        let l = littlewood_log_charfn(&ang(), 1, &xi, PhaseConvention::Walk).unwrap();
        assert!((l.exp() - v.value()).norm() < 1e-14);
    }
}
