use std::f64::consts::TAU;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};

pub const DEFAULT_MAX_POINTS: usize = 1 << 17;
const MIN_POINTS: usize = 64;

#[derive(Clone, Debug, Serialize)]
pub struct RadialResult {
    pub r: f64,
    pub value: f64,
    /// `|T_{2n} − T_n|` at the final doubling.
    pub error_estimate: f64,
    pub points: usize,
}

/// `r ∫_0^{2π} |φ(r e^{iφ})|² dφ` by the periodic trapezoid rule, doubling
/// the node count until two successive doublings agree to `rel_tol`.
pub fn radial_l2<F>(r: f64, rel_tol: f64, max_points: usize, f: F) -> Result<RadialResult>
where
    F: Fn(f64) -> Result<Complex64> + Sync,
{
    if !(r >= 0.0) || !(rel_tol > 0.0) {
        return Err(Error::invalid("need r ≥ 0 and a positive tolerance"));
    }
    let eval = |idx: Vec<usize>, n: usize| -> Result<f64> {
        let vals: Vec<f64> = idx
            .into_par_iter()
            .map(|k| f(TAU * k as f64 / n as f64).map(|c| c.norm_sqr()))
            .collect::<Result<_>>()?;
        Ok(vals.iter().sum())
    };
    let mut n = MIN_POINTS;
    let mut sum = eval((0..n).collect(), n)?;
    let mut prev = TAU * sum / n as f64;
    let mut agreed = 0;
    loop {
        if 2 * n > max_points.max(MIN_POINTS) {
            return Err(Error::NotConverged(format!(
                "radial integral at r = {r} after {n} points"
            )));
        }
        sum += eval((1..2 * n).step_by(2).collect(), 2 * n)?;
        n *= 2;
        let cur = TAU * sum / n as f64;
        let diff = (cur - prev).abs();
        if diff <= rel_tol * cur.abs() {
            agreed += 1;
        } else {
            agreed = 0;
        }
        if agreed == 2 {
            return Ok(RadialResult {
                r,
                value: r * cur,
                error_estimate: r * diff,
                points: n,
            });
        }
        prev = cur;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_integrand() {
        let res = radial_l2(2.0, 1e-6, 1024, |_| Ok(Complex64::new(0.5, 0.0))).unwrap();
        assert!((res.value - 2.0 * TAU * 0.25).abs() < 1e-12);
    }

    #[test]
    fn bessel_integral() {
        // ∫ cos²(x cos φ) dφ = π (1 + J0(2x)); J0(4) = −0.39714980986384737.
        let res = radial_l2(1.0, 1e-9, 1 << 12, |phi| {
            Ok(Complex64::new((2.0 * phi.cos()).cos(), 0.0))
        })
        .unwrap();
        let want = std::f64::consts::PI * (1.0 - 0.397_149_809_863_847_37);
        assert!((res.value - want).abs() < 1e-12);
    }

    #[test]
    fn not_converged() {
        let r = radial_l2(1.0, 1e-6, 128, |phi| {
            Ok(Complex64::new((500.0 * phi.cos()).cos(), 0.0))
        });
        assert!(matches!(r, Err(Error::NotConverged(_))));
    }
}
