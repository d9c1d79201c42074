//! Measures on `{ρ_θ, ρ_{−θ}, τ_{±1}}`. Given the sequence of step types,
//! `Y_N = Σ σ_n z^{α_{n−1}}` over translation steps with independent signs, so
//! the conditional characteristic function is `Π cos⟨ξ, z^{α_{n−1}}⟩`.

use num_complex::Complex64;
use num_traits::ToPrimitive;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::phase::{pairings, Pairing};
use super::{CharFnEstimate, Frequency, Method, Neumaier};
use crate::error::{Error, Result};
use crate::walk::{block_rng, GeneratorMeasure};

const MAX_PATHS: f64 = 4.3e9;
const BLOCK: u64 = 1 << 15;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PathMode {
    /// Every rotation path, weighted by its probability.
    All,
    /// Independent rotation paths.
    Sample { paths: u64, seed: u64 },
}

struct Setup {
    n: u32,
    /// Probabilities of `+1`, `−1` and a translation.
    p: [f64; 3],
    /// `cos⟨ξ, z^α⟩` at index `α + N`.
    cos: Vec<Pairing>,
}

impl Setup {
    fn new(mu: &GeneratorMeasure, n: u32, xi: &Frequency) -> Result<Self> {
        let w = mu.wreath_params().ok_or_else(|| {
            Error::invalid(format!(
                "{} is not a rotation/translation measure",
                mu.name()
            ))
        })?;
        let f = |q: &num_rational::BigRational| q.to_f64().unwrap_or(f64::NAN);
        let n64 = n as i64;
        Ok(Setup {
            n,
            p: [f(&w.p_plus), f(&w.p_minus), f(&w.p_tau)],
            cos: pairings(mu.angle(), xi, -n64, n64)?,
        })
    }

    fn factor(&self, alpha: i64) -> &Pairing {
        &self.cos[(alpha + self.n as i64) as usize]
    }

    fn rounding(&self) -> f64 {
        self.cos.iter().map(|c| c.err).fold(0.0, f64::max) * self.n as f64
            + 3.0 * f64::EPSILON * self.n as f64
    }
}

/// Charfn of a wreath measure by summing or sampling rotation paths.
pub fn charfn_wreath(
    mu: &GeneratorMeasure,
    n: u32,
    xi: &Frequency,
    mode: PathMode,
) -> Result<CharFnEstimate> {
    let s = Setup::new(mu, n, xi)?;
    match mode {
        PathMode::All => {
            let branches = s.p.iter().filter(|&&p| p > 0.0).count() as f64;
            let paths = branches.powi(n as i32);
            if paths > MAX_PATHS {
                return Err(Error::Budget {
                    what: "rotation paths",
                    needed: paths.min(u128::MAX as f64) as u128,
                    limit: MAX_PATHS as u128,
                });
            }
            let mut acc = Neumaier::default();
            walk_all(&s, 0, 0, 1.0, 1.0, &mut acc);
            Ok(CharFnEstimate::new(
                Complex64::new(acc.value(), 0.0),
                s.rounding(),
                Method::WreathConditional,
            ))
        }
        PathMode::Sample { paths, seed } => {
            if paths < 2 {
                return Err(Error::invalid("need at least two sampled paths"));
            }
            let blocks = paths.div_ceil(BLOCK);
            let sums: Vec<(f64, f64)> = (0..blocks)
                .into_par_iter()
                .map(|blk| {
                    let len = BLOCK.min(paths - blk * BLOCK);
                    let mut rng = block_rng(seed, blk);
                    let (mut s1, mut s2) = (Neumaier::default(), Neumaier::default());
                    for _ in 0..len {
                        let x = sample_path(&s, &mut rng);
                        s1.add(x);
                        s2.add(x * x);
                    }
                    (s1.value(), s2.value())
                })
                .collect();
            let (mut s1, mut s2) = (Neumaier::default(), Neumaier::default());
            for (a, b) in sums {
                s1.add(a);
                s2.add(b);
            }
            let k = paths as f64;
            let mean = s1.value() / k;
            let var = ((s2.value() / k - mean * mean) * k / (k - 1.0)).max(0.0);
            let mut est =
                CharFnEstimate::new(Complex64::new(mean, 0.0), s.rounding(), Method::MonteCarlo);
            est.std_error = Some((var / k).sqrt());
            Ok(est)
        }
    }
}

fn walk_all(s: &Setup, depth: u32, alpha: i64, prob: f64, prod: f64, acc: &mut Neumaier) {
    if depth == s.n {
        acc.add(prob * prod);
        return;
    }
    let [pp, pm, pt] = s.p;
    if pp > 0.0 {
        walk_all(s, depth + 1, alpha + 1, prob * pp, prod, acc);
    }
    if pm > 0.0 {
        walk_all(s, depth + 1, alpha - 1, prob * pm, prod, acc);
    }
    if pt > 0.0 {
        walk_all(
            s,
            depth + 1,
            alpha,
            prob * pt,
            prod * s.factor(alpha).cos,
            acc,
        );
    }
}

fn sample_path(s: &Setup, rng: &mut impl Rng) -> f64 {
    let [pp, pm, _] = s.p;
    let mut alpha = 0i64;
    let mut prod = 1.0;
    for _ in 0..s.n {
        let u: f64 = rng.random();
        if u < pp {
            alpha += 1;
        } else if u < pp + pm {
            alpha -= 1;
        } else {
            prod *= s.factor(alpha).cos;
        }
    }
    prod
}

/// Exact charfn of a wreath measure in `O(N²)` by propagating
/// `V_n(α) = E[Π cos ⋯ ; α_n = α]` through the rotation chain.
pub fn wreath_transfer(mu: &GeneratorMeasure, n: u32, xi: &Frequency) -> Result<CharFnEstimate> {
    let s = Setup::new(mu, n, xi)?;
    let [pp, pm, pt] = s.p;
    let width = 2 * n as usize + 1;
    let mut v = vec![0.0f64; width];
    let mut next = vec![0.0f64; width];
    v[n as usize] = 1.0;
    for step in 0..n as usize {
        next.iter_mut().for_each(|x| *x = 0.0);
        let reach = step.min(n as usize);
        for idx in (n as usize - reach)..=(n as usize + reach) {
            let x = v[idx];
            if x == 0.0 {
                continue;
            }
            let alpha = idx as i64 - n as i64;
            next[idx + 1] += pp * x;
            next[idx - 1] += pm * x;
            next[idx] += pt * s.factor(alpha).cos * x;
        }
        std::mem::swap(&mut v, &mut next);
    }
    let mut acc = Neumaier::default();
    v.iter().for_each(|&x| acc.add(x));
    let err = s.rounding() + width as f64 * f64::EPSILON;
    Ok(CharFnEstimate::new(
        Complex64::new(acc.value(), 0.0),
        err,
        Method::WreathConditional,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::charfn::charfn_table;
    use crate::ring::{AngleSpec, RingPoint};
    use crate::walk::{enumerate_exact, presets, Marginal};

    fn ang() -> AngleSpec {
        AngleSpec::rational(5, 6).unwrap()
    }

    #[test]
    fn all_paths_match_table() {
        for name in ["symmetric4", "asymmetric3", "wreath(1/5,1/5,3/5)"] {
            let mu = presets(name, &ang()).unwrap();
            let t = enumerate_exact(&mu, 8, Marginal::EndpointOnly).unwrap();
            for xi in [
                Frequency::polar(1.1, 0.5),
                Frequency::Ring(RingPoint::int(2)),
            ] {
                let a = charfn_wreath(&mu, 8, &xi, PathMode::All).unwrap();
                let b = charfn_table(&t, &xi).unwrap();
                let c = wreath_transfer(&mu, 8, &xi).unwrap();
                assert!((a.value() - b.value()).norm() < 1e-13, "{name}");
                assert!((a.re - c.re).abs() < 1e-13, "{name}");
            }
        }
    }

    #[test]
    fn sampled_paths_within_error() {
        let mu = presets("symmetric4", &ang()).unwrap();
        let xi = Frequency::polar(0.9, 0.0);
        let exact = wreath_transfer(&mu, 12, &xi).unwrap();
        let mc = charfn_wreath(
            &mu,
            12,
            &xi,
            PathMode::Sample {
                paths: 100_000,
                seed: 5,
            },
        )
        .unwrap();
        let se = mc.std_error.unwrap();
        assert!(se > 0.0 && se < 0.01);
        assert!((mc.re - exact.re).abs() < 5.0 * se);
    }

    #[test]
    fn non_wreath_refused() {
        let mu = presets("littlewood", &ang()).unwrap();
        assert!(charfn_wreath(&mu, 3, &Frequency::polar(1.0, 0.0), PathMode::All).is_err());
    }
}
