//! Ball probabilities of `Y_N` against the limiting Gaussian, and the
//! mollified Fourier bound that controls their difference.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::charfn::{CharFnEstimate, Neumaier};
use crate::error::{Error, Result};
use crate::walk::{ball_probability, DistributionTable};

/// Isotropic plane Gaussian with covariance `σ² N · I`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GaussianLaw {
    pub sigma2: f64,
    #[serde(rename = "N")]
    pub n: u32,
}

impl GaussianLaw {
    pub fn new(sigma2: f64, n: u32) -> Result<Self> {
        if !(sigma2 > 0.0 && sigma2.is_finite()) {
            return Err(Error::invalid("sigma2 must be positive and finite"));
        }
        Ok(GaussianLaw { sigma2, n })
    }

    /// Per-coordinate variance `σ² N`.
    pub fn variance(&self) -> f64 {
        self.sigma2 * self.n as f64
    }

    /// Density bound `1/(2πσ²N)`.
    pub fn kappa(&self) -> f64 {
        1.0 / (TAU * self.variance())
    }

    pub fn charfn(&self, r: f64) -> f64 {
        (-0.5 * self.variance() * r * r).exp()
    }
}

/// `e^{−x} I₀(x)` for `x ≥ 0`.
fn bessel_i0e(x: f64) -> f64 {
    if x > 1e4 {
        let t = 1.0 / x;
        return (1.0 + t * (0.125 + t * (9.0 / 128.0 + t * 225.0 / 3072.0))) / (TAU * x).sqrt();
    }
    // Trapezoid on a periodic analytic integrand: error ≈ exp(−2M²/x).
    let m = ((20.0 * x).sqrt().ceil() as usize).max(32);
    let h = PI / m as f64;
    let mut acc = Neumaier::default();
    for k in 0..=m {
        let w = if k == 0 || k == m { 0.5 } else { 1.0 };
        acc.add(w * (x * ((k as f64 * h).cos() - 1.0)).exp());
    }
    acc.value() / m as f64
}

fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    fn rec<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
                + rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
        }
    }
    if b <= a {
        return 0.0;
    }
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    rec(f, a, b, fa, fm, fb, whole, tol, 48)
}

/// `P(|Z − center| ≤ radius)` for `Z ~ law`, by radial quadrature.
pub fn gaussian_ball(law: &GaussianLaw, center: Complex64, radius: f64) -> Result<f64> {
    if !(radius > 0.0) {
        return Err(Error::invalid("radius must be positive"));
    }
    let c = center.norm();
    let v = law.variance();
    if v == 0.0 {
        return Ok(if c <= radius { 1.0 } else { 0.0 });
    }
    if c == 0.0 {
        return Ok(-(-radius * radius / (2.0 * v)).exp_m1());
    }
    let s = v.sqrt();
    let hi = radius.min(c + 40.0 * s);
    let lo = (c - 40.0 * s).max(0.0);
    if hi <= lo {
        return Ok(0.0);
    }
    // Rice density of |Z|.
    let f =
        |rho: f64| rho / v * (-(rho - c) * (rho - c) / (2.0 * v)).exp() * bessel_i0e(rho * c / v);
    let tol = 1e-14;
    let p = if c > lo && c < hi {
        simpson(&f, lo, c, tol) + simpson(&f, c, hi, tol)
    } else {
        simpson(&f, lo, hi, tol)
    };
    Ok(p.clamp(0.0, 1.0))
}

#[derive(Clone, Debug, Serialize)]
pub struct LcltCell {
    pub r: f64,
    pub x0: [f64; 2],
    pub exact_lo: f64,
    pub exact_hi: f64,
    pub gaussian: f64,
    /// `max |P_exact − P_gauss|` over the exact interval.
    pub abs_diff: f64,
    /// `abs_diff · N^{3/2} / r²`.
    pub normalized: f64,
    /// Interval width within [`LCLT_WIDTH_TOLERANCE`].
    pub width_ok: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct LcltReport {
    #[serde(rename = "N")]
    pub n: u32,
    pub sigma2: f64,
    pub cells: Vec<LcltCell>,
    pub max_normalized: f64,
    pub max_abs_diff: f64,
    pub width_failures: usize,
}

pub const LCLT_WIDTH_TOLERANCE: f64 = 1e-9;

impl LcltReport {
    /// Heatmap rows `r,x0_x,x0_y,normalized_error`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("r,x0_x,x0_y,normalized_error\n");
        for c in &self.cells {
            s.push_str(&format!(
                "{},{},{},{}\n",
                c.r, c.x0[0], c.x0[1], c.normalized
            ));
        }
        s
    }
}

pub fn lclt_compare(
    table: &DistributionTable,
    sigma2: f64,
    r_grid: &[f64],
    x0_grid: &[Complex64],
) -> Result<LcltReport> {
    if r_grid.is_empty() || x0_grid.is_empty() {
        return Err(Error::invalid("r and x0 grids must be nonempty"));
    }
    let n = table.steps();
    let law = GaussianLaw::new(sigma2, n)?;
    let pairs: Vec<(f64, Complex64)> = r_grid
        .iter()
        .flat_map(|&r| x0_grid.iter().map(move |&x| (r, x)))
        .collect();
    let cells: Vec<Result<LcltCell>> = pairs
        .par_iter()
        .map(|&(r, x0)| {
            let exact = ball_probability(table, x0, r)?;
            let g = gaussian_ball(&law, x0, r)?;
            let (lo, hi) = (exact.lo_f64(), exact.hi_f64());
            let abs_diff = (lo - g).abs().max((hi - g).abs());
            Ok(LcltCell {
                r,
                x0: [x0.re, x0.im],
                exact_lo: lo,
                exact_hi: hi,
                gaussian: g,
                abs_diff,
                normalized: abs_diff * (n as f64).powf(1.5) / (r * r),
                width_ok: hi - lo <= LCLT_WIDTH_TOLERANCE,
            })
        })
        .collect();
    let cells = cells.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(LcltReport {
        n,
        sigma2,
        max_normalized: cells.iter().map(|c| c.normalized).fold(0.0, f64::max),
        max_abs_diff: cells.iter().map(|c| c.abs_diff).fold(0.0, f64::max),
        width_failures: cells.iter().filter(|c| !c.width_ok).count(),
        cells,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct EpsilonEstimate {
    /// Upper estimate of `∫_{|ξ|<L} |φ_μ − φ_ν|`.
    pub value: f64,
    pub quadrature: f64,
    pub last_change: f64,
    pub engine_error: f64,
    pub points: usize,
}

/// `∫_{|ξ|<L} |φ_μ(ξ) − φ_ν(ξ)| dξ` by a polar midpoint rule, doubled until
/// the relative change is below `rel_tol`. The reported value adds the last
/// change and the engines' error bounds.
pub fn epsilon_quadrature<F>(
    law: &GaussianLaw,
    l: f64,
    rel_tol: f64,
    max_points: usize,
    phi_mu: F,
) -> Result<EpsilonEstimate>
where
    F: Fn(f64, f64) -> Result<CharFnEstimate> + Sync,
{
    if !(l > 0.0 && l.is_finite()) {
        return Err(Error::invalid("L must be positive and finite"));
    }
    let eval = |ns: usize, nphi: usize| -> Result<(f64, f64)> {
        let (hs, hphi) = (l / ns as f64, TAU / nphi as f64);
        let rows: Vec<Result<(f64, f64)>> = (0..ns)
            .into_par_iter()
            .map(|i| {
                let s = (i as f64 + 0.5) * hs;
                let g = law.charfn(s);
                let (mut acc, mut err) = (Neumaier::default(), 0.0);
                for k in 0..nphi {
                    let e = phi_mu(s, (k as f64 + 0.5) * hphi)?;
                    acc.add((e.value() - g).norm());
                    err += e.abs_error;
                }
                let w = s * hs * hphi;
                Ok((acc.value() * w, err * w))
            })
            .collect();
        let mut v = Neumaier::default();
        let mut e = 0.0;
        for r in rows {
            let (a, b) = r?;
            v.add(a);
            e += b;
        }
        Ok((v.value(), e))
    };
    let (mut ns, mut nphi) = (64usize, 64usize);
    let (mut prev, _) = eval(ns, nphi)?;
    loop {
        if ns * nphi * 4 > max_points {
            return Err(Error::NotConverged(format!(
                "epsilon quadrature at {} points (budget {max_points})",
                ns * nphi
            )));
        }
        ns *= 2;
        nphi *= 2;
        let (cur, err) = eval(ns, nphi)?;
        let change = (cur - prev).abs();
        if change <= rel_tol * cur.abs().max(1e-300) {
            return Ok(EpsilonEstimate {
                value: cur + change + err,
                quadrature: cur,
                last_change: change,
                engine_error: err,
                points: ns * nphi,
            });
        }
        prev = cur;
    }
}

/// Profile exponent of the mollifier `ψ ∝ (1 − |x|²)^9` on the unit disc;
/// `|ψ̂(t)| ≤ min(1, K t^{−(9 + 4/3)})`.
pub const MOLLIFIER_EXPONENT: u32 = 9;
/// Upper value of Landau's constant in `|J_ν(x)| ≤ c x^{−1/3}`.
const LANDAU: f64 = 0.785_747;

/// `K = Γ(ν + 2) 2^{ν+1} c`.
fn mollifier_constant() -> f64 {
    let nu = MOLLIFIER_EXPONENT;
    let fact: f64 = (1..=nu + 1).map(|k| k as f64).product();
    fact * 2f64.powi(nu as i32 + 1) * LANDAU
}

#[derive(Clone, Debug, Serialize)]
pub struct LlerrBound {
    pub r: f64,
    #[serde(rename = "L")]
    pub l: f64,
    pub epsilon: f64,
    pub kappa: f64,
    pub delta: f64,
    /// `(2π)^{−2} |B_{r(1+δ/2)}| ε`.
    pub eps_term: f64,
    /// `(2π)^{−2} · 2 ∫_{|ξ|>L} |ρ̂⁺|`, from Bessel envelopes.
    pub tail_term: f64,
    /// `κ |B_{r(1+δ)} \ B_r|`.
    pub density_term: f64,
    pub bound: f64,
    /// `ε r² + L^{−3} + κ L^{−1/2} r²`.
    pub formula: f64,
    /// `bound / formula`.
    pub constant: f64,
}

/// Bound on `|P_μ(B_r(x₀)) − P_ν(B_r(x₀))|` from `ε`, the density bound `κ`
/// of `ν`, and the cutoff `L`.
///
/// `ρ± = 1_{B_{r(1±δ/2)}} * ψ_{rδ/2}` with `δ = L^{−1/2}`, so `ρ⁻ ≤ 1_{B_r} ≤ ρ⁺`.
/// The upper side dominates every term.
pub fn llerr_bound(epsilon: f64, law: &GaussianLaw, l: f64, r: f64) -> Result<LlerrBound> {
    if !(l > 1.0 && l.is_finite()) || !(epsilon >= 0.0) {
        return Err(Error::invalid("need L > 1 and ε ≥ 0"));
    }
    if !(r > l.powf(-0.25)) || !r.is_finite() {
        return Err(Error::Regime(format!(
            "r = {r} must exceed L^(-1/4) = {}",
            l.powf(-0.25)
        )));
    }
    let kappa = law.kappa();
    let delta = l.powf(-0.5);
    let big_r = r * (1.0 + delta / 2.0);
    let eta = r * delta / 2.0;
    let eps_term = big_r * big_r * epsilon / (4.0 * PI);
    let tail_term = fourier_tail(big_r, eta, l) / PI;
    let density_term = kappa * PI * r * r * ((1.0 + delta).powi(2) - 1.0);
    let bound = eps_term + tail_term + density_term;
    let formula = epsilon * r * r + l.powi(-3) + kappa * l.powf(-0.5) * r * r;
    Ok(LlerrBound {
        r,
        l,
        epsilon,
        kappa,
        delta,
        eps_term,
        tail_term,
        density_term,
        bound,
        formula,
        constant: bound / formula,
    })
}

/// `∫_L^∞ s · A(s) B(s) ds` with the envelopes
/// `A(s) = 2πR min(Rs/2, c (Rs)^{−1/3}) / s ≥ |1̂_{B_R}|` and
/// `B(s) = min(1, K (ηs)^{−(ν+4/3)}) ≥ |ψ̂(ηs)|`, integrated piecewise exactly.
fn fourier_tail(big_r: f64, eta: f64, l: f64) -> f64 {
    let q = MOLLIFIER_EXPONENT as f64 + 4.0 / 3.0;
    let k = mollifier_constant();
    // (coefficient, exponent) of s·A·B on each branch.
    let a_small = (PI * big_r * big_r, 0.0);
    let a_large = (TAU * big_r * LANDAU * big_r.powf(-1.0 / 3.0), -4.0 / 3.0);
    let b_small = (1.0, 0.0);
    let b_large = (k * eta.powf(-q), -q);
    let s_a = (2.0 * LANDAU).powf(0.75) / big_r;
    let s_b = k.powf(1.0 / q) / eta;
    let mut cuts: Vec<f64> = [s_a, s_b].into_iter().filter(|&x| x > l).collect();
    cuts.sort_by(f64::total_cmp);
    let mut edges = vec![l];
    edges.extend(cuts);
    let mut total = 0.0;
    for (i, &lo) in edges.iter().enumerate() {
        let hi = edges.get(i + 1).copied().unwrap_or(f64::INFINITY);
        let mid = if hi.is_finite() {
            (lo * hi).sqrt()
        } else {
            2.0 * lo
        };
        let pick = |x: (f64, f64), y: (f64, f64)| {
            if x.0 * mid.powf(x.1) <= y.0 * mid.powf(y.1) {
                x
            } else {
                y
            }
        };
        let a = pick(a_small, a_large);
        let b = pick(b_small, b_large);
        let (coef, p) = (a.0 * b.0, 1.0 + a.1 + b.1);
        let upper = if hi.is_finite() {
            hi.powf(p + 1.0)
        } else {
            0.0
        };
        if !hi.is_finite() && p >= -1.0 {
            return f64::INFINITY;
        }
        total += coef * (upper - lo.powf(p + 1.0)) / (p + 1.0);
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn i0e_values() {
        // I0(1) = 1.2660658777520082, I0(10) = 2815.716628466254.
        assert!((bessel_i0e(1.0) * 1f64.exp() - 1.2660658777520082).abs() < 1e-14);
        assert!((bessel_i0e(10.0) * 10f64.exp() / 2815.716628466254 - 1.0).abs() < 1e-13);
        assert!((bessel_i0e(0.0) - 1.0).abs() < 1e-15);
        let near = bessel_i0e(9999.0);
        let far = bessel_i0e(10001.0);
        assert!((near / far - (10001.0f64 / 9999.0).sqrt()).abs() < 1e-8);
    }

    #[test]
    fn centred_closed_form() {
        let law = GaussianLaw::new(0.5, 13).unwrap();
        for r in [0.1, 1.0, 3.0, 10.0] {
            let closed = 1.0 - (-r * r / (2.0 * law.variance())).exp();
            let quad = gaussian_ball(&law, Complex64::new(1e-9, 0.0), r).unwrap();
            assert!((closed - quad).abs() < 1e-10, "r={r}: {closed} vs {quad}");
        }
        assert!((gaussian_ball(&law, Complex64::new(3.0, 4.0), 1e6).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn off_centre_monte_carlo() {
        let law = GaussianLaw::new(0.5, 13).unwrap();
        let s = law.variance().sqrt();
        let p = gaussian_ball(&law, Complex64::new(s, 0.0), s).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let n = 1_000_000;
        let mut hits = 0u32;
        for _ in 0..n {
            // Box–Muller.
            let (u1, u2): (f64, f64) = (rng.random(), rng.random());
            let rad = (-2.0 * (1.0 - u1).ln()).sqrt() * s;
            let z = Complex64::from_polar(rad, TAU * u2);
            if (z - Complex64::new(s, 0.0)).norm() <= s {
                hits += 1;
            }
        }
        let mc = hits as f64 / n as f64;
        let se = (p * (1.0 - p) / n as f64).sqrt();
        assert!((mc - p).abs() < 4.0 * se, "{mc} vs {p}");
    }

    #[test]
    fn tail_envelope_matches_quadrature() {
        // Direct numerical integration of the same envelope.
        let (big_r, eta, l) = (1.3, 0.2, 10.0);
        let q = MOLLIFIER_EXPONENT as f64 + 4.0 / 3.0;
        let k = mollifier_constant();
        let f = |s: f64| {
            let a = TAU * big_r * (big_r * s / 2.0).min(LANDAU * (big_r * s).powf(-1.0 / 3.0)) / s;
            let b = (k * (eta * s).powf(-q)).min(1.0);
            s * a * b
        };
        let direct = simpson(&f, l, 1e5, 1e-10);
        let exact = fourier_tail(big_r, eta, l);
        assert!((direct / exact - 1.0).abs() < 1e-6, "{direct} vs {exact}");
    }

    #[test]
    fn bound_shape() {
        let law = GaussianLaw::new(0.5, 13).unwrap();
        assert!(matches!(
            llerr_bound(0.0, &law, 16.0, 0.5),
            Err(Error::Regime(_))
        ));
        let b1 = llerr_bound(0.0, &law, 16.0, 0.6).unwrap();
        let b2 = llerr_bound(0.0, &law, 16.0, 0.9).unwrap();
        assert!(b2.density_term > b1.density_term);
        assert_eq!(b1.eps_term, 0.0);
        let b3 = llerr_bound(0.1, &law, 16.0, 0.9).unwrap();
        assert!(b3.bound > b2.bound);
        assert!(b3.constant.is_finite() && b3.constant > 0.0);
    }

    #[test]
    fn identical_measures() {
        let law = GaussianLaw::new(0.5, 4).unwrap();
        let eps = epsilon_quadrature(&law, 5.0, 1e-6, 1 << 20, |s, _| {
            Ok(CharFnEstimate::new(
                Complex64::new(law.charfn(s), 0.0),
                0.0,
                crate::charfn::Method::TableExact,
            ))
        })
        .unwrap();
        assert!(eps.value < 1e-12);
    }
}
