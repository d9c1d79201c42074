use num_complex::Complex64;
use num_traits::ToPrimitive;
use serde::Serialize;

use super::{charfn_table, littlewood_log_charfn, wreath_transfer, Frequency, PhaseConvention};
use crate::error::{Error, Result};
use crate::ring::EmbeddingContext;
use crate::walk::{enumerate_exact, GeneratorMeasure, Marginal};

/// Values of `|φ|` below this are too small for a meaningful logarithm.
pub const EXCLUDE_BELOW: f64 = 1e-6;

#[derive(Clone, Debug, Serialize)]
pub struct LowFreqRow {
    #[serde(rename = "N")]
    pub n: u32,
    pub r: f64,
    pub phi: f64,
    pub log_re: f64,
    pub log_im: f64,
    pub gaussian_exponent: f64,
    /// `None` when the point is excluded.
    pub ratio: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct LowFreqReport {
    pub engine: &'static str,
    pub isotropic: bool,
    pub sigma2: f64,
    pub rows: Vec<LowFreqRow>,
    pub max_ratio: f64,
    pub max_ratio_by_n: Vec<(u32, f64)>,
    pub excluded: usize,
}

/// Compares `log φ_N(ξ)` with the Gaussian exponent on a grid and reports
/// `|log φ_N(ξ) + ½ Q_N(ξ)| / (N r³ + N r⁴)`.
///
/// `Q_N(ξ) = σ² N r²` when some atom rotates. A measure made only of
/// translations has no isotropy, and `Q_N(ξ) = N E⟨ξ, g(0)⟩²` instead.
pub fn lowfreq_check(
    mu: &GeneratorMeasure,
    ns: &[u32],
    rs: &[f64],
    phis: &[f64],
) -> Result<LowFreqReport> {
    if ns.is_empty() || rs.is_empty() || phis.is_empty() {
        return Err(Error::invalid("empty grid"));
    }
    let sigma2 = mu.sigma2_f64();
    let isotropic = mu.atoms().iter().any(|a| a.isometry.rotation_power != 0);
    let engine = if mu.is_littlewood() {
        "product"
    } else if mu.wreath_params().is_some() {
        "transfer"
    } else {
        "table"
    };
    let translations: Vec<(f64, Complex64)> = if isotropic {
        Vec::new()
    } else {
        let ctx = EmbeddingContext::new(mu.angle(), 128).ok();
        mu.atoms()
            .iter()
            .map(|a| {
                let t = match &ctx {
                    Some(c) => c.embed_f64(&a.isometry.translation),
                    None => {
                        Complex64::new(a.isometry.integer_translation().unwrap_or(0) as f64, 0.0)
                    }
                };
                (a.weight.to_f64().unwrap_or(f64::NAN), t)
            })
            .collect()
    };
    let mut rows = Vec::new();
    let mut by_n = Vec::new();
    let mut excluded = 0;
    let mut max_ratio: f64 = 0.0;
    for &n in ns {
        let table = if engine == "table" {
            Some(enumerate_exact(mu, n, Marginal::EndpointOnly)?)
        } else {
            None
        };
        let mut n_max: f64 = 0.0;
        for &r in rs {
            for &phi in phis {
                let xi = Frequency::polar(r, phi);
                let log = match engine {
                    "product" => littlewood_log_charfn(mu.angle(), n, &xi, PhaseConvention::Walk)
                        .unwrap_or(Complex64::new(f64::NEG_INFINITY, 0.0)),
                    "transfer" => wreath_transfer(mu, n, &xi)?.value().ln(),
                    _ => charfn_table(table.as_ref().expect("table"), &xi)?
                        .value()
                        .ln(),
                };
                let q = if isotropic {
                    sigma2 * n as f64 * r * r
                } else {
                    let dir = Complex64::from_polar(1.0, phi);
                    let e2: f64 = translations
                        .iter()
                        .map(|(w, t)| {
                            let d = r * (dir.conj() * t).re;
                            w * d * d
                        })
                        .sum();
                    n as f64 * e2
                };
                let gauss = -0.5 * q;
                let keep = r > 0.0 && log.re.is_finite() && log.re.exp() >= EXCLUDE_BELOW;
                let ratio = keep.then(|| {
                    let nf = n as f64;
                    (log - gauss).norm() / (nf * r.powi(3) + nf * r.powi(4))
                });
                match ratio {
                    Some(x) => {
                        n_max = n_max.max(x);
                        max_ratio = max_ratio.max(x);
                    }
                    None => excluded += 1,
                }
                rows.push(LowFreqRow {
                    n,
                    r,
                    phi,
                    log_re: log.re,
                    log_im: log.im,
                    gaussian_exponent: gauss,
                    ratio,
                });
            }
        }
        by_n.push((n, n_max));
    }
    Ok(LowFreqReport {
        engine,
        isotropic,
        sigma2,
        rows,
        max_ratio,
        max_ratio_by_n: by_n,
        excluded,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::AngleSpec;
    use crate::walk::presets;

    #[test]
    fn translations_use_directional_variance() {
        let mu = presets("translations", &AngleSpec::rational(5, 6).unwrap()).unwrap();
        let rep = lowfreq_check(&mu, &[16, 64], &[0.01, 0.05, 0.1], &[0.0, 0.7, 1.5]).unwrap();
        assert!(!rep.isotropic);
        assert!(rep.max_ratio < 0.1, "{}", rep.max_ratio);
    }

    #[test]
    fn engines_are_selected() {
        let a = AngleSpec::rational(5, 6).unwrap();
        let grid = |m: &GeneratorMeasure| lowfreq_check(m, &[6], &[0.05], &[0.3]).unwrap().engine;
        assert_eq!(grid(&presets("littlewood", &a).unwrap()), "product");
        assert_eq!(grid(&presets("asymmetric3", &a).unwrap()), "transfer");
    }

    #[test]
    fn tiny_values_are_excluded() {
        let mu = presets("littlewood", &AngleSpec::rational(5, 6).unwrap()).unwrap();
        let rep = lowfreq_check(&mu, &[1024], &[0.5], &[0.0]).unwrap();
        assert_eq!(rep.excluded, 1);
        assert!(rep.rows[0].ratio.is_none());
    }
}
