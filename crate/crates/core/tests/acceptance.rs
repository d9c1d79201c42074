//! Acceptance suite. Each test prints one `criterion N: PASS|FAIL ...` line and
//! asserts the criterion at its stated tolerance. Tests share a lock so that
//! the memory-heavy ones never overlap.

use std::f64::consts::TAU;
use std::sync::Mutex;
use std::time::{Duration, Instant};

use isomwalk::charfn::{
    charfn_littlewood, charfn_table, charfn_wreath, lowfreq_check, radial_l2, wreath_transfer,
    Frequency, PathMode, PhaseConvention, DEFAULT_MAX_POINTS,
};
use isomwalk::dpv::{
    certify_dpv, injectivity_bruteforce, pigeonhole_bruteforce, pigeonhole_search, resultant_check,
    verify_certificate, word_synthesis_checked, GeneratorPair, IntPolynomial, Strategy,
};
use isomwalk::lclt::{epsilon_quadrature, lclt_compare, llerr_bound, GaussianLaw};
use isomwalk::padic::padic_audit_exhaustive;
use isomwalk::walk::{enumerate_exact, presets, Marginal};
use isomwalk::{AngleSpec, RingPoint};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{Signed, ToPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

static LOCK: Mutex<()> = Mutex::new(());

fn lock() -> std::sync::MutexGuard<'static, ()> {
    LOCK.lock().unwrap_or_else(|e| e.into_inner())
}

fn angle() -> AngleSpec {
    AngleSpec::rational(5, 6).unwrap()
}

fn report(n: u32, pass: bool, detail: String) {
    println!(
        "criterion {n}: {} {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "criterion {n} failed: {detail}");
}

#[test]
fn criterion_01_zero_mass_bands() {
    let _g = lock();
    let ang = angle();
    let mut parts = Vec::new();
    let mut pass = true;
    for (name, lo, hi) in [
        ("symmetric4", 0.015, 0.025),
        ("asymmetric3", 1.5e-4, 2.5e-4),
    ] {
        let t0 = Instant::now();
        let table =
            enumerate_exact(&presets(name, &ang).unwrap(), 13, Marginal::EndpointOnly).unwrap();
        let p = table.atom_probability(&RingPoint::zero()).unwrap();
        let pf = p.to_f64().unwrap();
        let ok = pf >= lo && pf <= hi && t0.elapsed() < Duration::from_secs(600);
        pass &= ok;
        parts.push(format!(
            "{name} P(Y=0)={p}≈{pf:.4e} in [{lo:e},{hi:e}]={ok} ({:.1?})",
            t0.elapsed()
        ));
    }
    report(1, pass, parts.join("; "));
}

fn random_pd(rng: &mut ChaCha8Rng, a: i64, d: usize) -> IntPolynomial {
    loop {
        let c: Vec<i64> = (0..=d).map(|_| rng.random_range(0..a)).collect();
        let q = IntPolynomial::new(c);
        if !q.is_zero() {
            return q;
        }
    }
}

#[test]
fn criterion_02_resultant_identity() {
    let _g = lock();
    let ang = angle();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = 0.0f64;
    let mut nonzero = true;
    for _ in 0..1000 {
        let d = rng.random_range(0..=10);
        let q = random_pd(&mut rng, 5, d);
        let c = resultant_check(&ang, &q).unwrap();
        let res: BigInt = c.resultant.parse().unwrap();
        nonzero &= res.abs() >= BigInt::from(1);
        worst = worst.max(c.identity_gap);
    }
    report(
        2,
        nonzero && worst <= 1e-20,
        format!("1000 samples, all |Res| ≥ 1: {nonzero}, max relative gap {worst:.3e}"),
    );
}

#[test]
fn criterion_03_pigeonhole_bracket() {
    let _g = lock();
    let ang = angle();
    let a = 5f64;
    let mut pass = true;
    let mut cs = Vec::new();
    for d in 4..=16u32 {
        let r = pigeonhole_search(&ang, d).unwrap();
        let exact = resultant_check(&ang, &r.q).unwrap();
        let res: BigInt = exact.resultant.parse().unwrap();
        let lower = a.powf(-(d as f64) / 2.0);
        let ok = r.modulus >= lower && res.abs() >= BigInt::from(1) && r.c_meas <= 4.0;
        pass &= ok;
        if d <= 8 {
            let b = pigeonhole_bruteforce(&ang, d, u64::MAX).unwrap();
            let same = b.modulus2 == r.modulus2;
            pass &= same;
            cs.push(format!("D={d} C={:.3} bf={same}", r.c_meas));
        } else {
            cs.push(format!("D={d} C={:.3}", r.c_meas));
        }
    }
    report(3, pass, cs.join(", "));
}

#[test]
fn criterion_04_injectivity() {
    let _g = lock();
    let ang = angle();
    let all = (0..=8).all(|d| injectivity_bruteforce(&ang, d, u64::MAX).unwrap());
    report(4, all, "evaluation injective on P_D for D = 0..8".into());
}

#[test]
fn criterion_05_padic_audit() {
    let _g = lock();
    let t0 = Instant::now();
    let audit = padic_audit_exhaustive(&angle(), 200, 0, 60, 6).unwrap();
    let elapsed = t0.elapsed();
    let pass =
        audit.clean() && audit.frequencies == 401 * 401 && elapsed < Duration::from_secs(300);
    report(
        5,
        pass,
        format!(
            "{} frequencies, {} windows (depths {:?}), {} triggered triples, {} violations, {} recurrence failures, {:.1?}",
            audit.frequencies,
            audit.windows,
            audit.depth_histogram,
            audit.m_recurrence_triggered,
            audit.violations.len(),
            audit.m_recurrence_failures.len(),
            elapsed
        ),
    );
}

#[test]
fn criterion_06_engine_agreement() {
    let _g = lock();
    let ang = angle();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let freqs: Vec<Frequency> = (0..100)
        .map(|_| Frequency::polar(rng.random_range(0.0..1e3), rng.random_range(0.0..TAU)))
        .collect();
    let mut worst = 0.0f64;
    for n in [1u32, 7, 13] {
        let lw = presets("littlewood", &ang).unwrap();
        let t = enumerate_exact(&lw, n, Marginal::EndpointOnly).unwrap();
        for xi in &freqs {
            let p = charfn_littlewood(&ang, n, xi, PhaseConvention::Walk)
                .unwrap()
                .value();
            let q = charfn_table(&t, xi).unwrap().value();
            worst = worst.max((p - q).norm());
        }
        for name in ["symmetric4", "asymmetric3"] {
            let mu = presets(name, &ang).unwrap();
            let t = enumerate_exact(&mu, n, Marginal::EndpointOnly).unwrap();
            for xi in &freqs {
                let a = charfn_table(&t, xi).unwrap().value();
                let b = charfn_wreath(&mu, n, xi, PathMode::All).unwrap().value();
                let c = wreath_transfer(&mu, n, xi).unwrap().value();
                worst = worst
                    .max((a - b).norm())
                    .max((a - c).norm())
                    .max((b - c).norm());
            }
        }
    }
    report(
        6,
        worst <= 1e-12,
        format!("max pairwise discrepancy {worst:.3e} over N ∈ {{1,7,13}}, 100 frequencies"),
    );
}

#[test]
fn criterion_07_dpv_certificate() {
    let _g = lock();
    let ang = angle();
    let t0 = Instant::now();
    let cert = certify_dpv(&ang, 10_000, 1e3, Strategy::GadgetOnly).unwrap();
    let bad = verify_certificate(&ang, &cert).unwrap();
    let elapsed = t0.elapsed();
    let pass = cert.complete && bad.is_empty() && elapsed < Duration::from_secs(1800);
    report(
        7,
        pass,
        format!(
            "{} cells, {} witnesses, {} uncovered, {} failed re-verification, {:.1?}",
            cert.grid.rows * cert.grid.columns,
            cert.witnesses.len(),
            cert.uncovered.len(),
            bad.len(),
            elapsed
        ),
    );
}

#[test]
fn criterion_08_word_synthesis() {
    let _g = lock();
    let pair = GeneratorPair::standard(angle().ring().unwrap());
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut done = 0;
    let mut max_ratio = 0.0f64;
    while done < 100 {
        let d = rng.random_range(0..=20usize);
        let c: Vec<i64> = (0..=d).map(|_| rng.random_range(-3..=3)).collect();
        let p = IntPolynomial::new(c);
        if p.is_zero() || p.weight() > 50 {
            continue;
        }
        let w = word_synthesis_checked(&pair, &p).unwrap();
        let prod = w.evaluate(&pair);
        assert_eq!(prod.rotation_power, 0);
        assert_eq!(prod.translation, pair.target(&p));
        assert!(w.len() as u64 <= 4 * p.weight());
        max_ratio = max_ratio.max(w.len() as f64 / p.weight() as f64);
        done += 1;
    }
    report(
        8,
        true,
        format!("100 words, exact products τ_(a p(z)), max length/weight {max_ratio:.3}"),
    );
}

#[test]
fn criterion_09_lowfreq_constant() {
    let _g = lock();
    let mu = presets("littlewood", &angle()).unwrap();
    let rs: Vec<f64> = (1..=10).map(|k| 0.01 * k as f64).collect();
    let phis: Vec<f64> = (0..8).map(|k| TAU * k as f64 / 8.0 + 0.1).collect();
    let rep = lowfreq_check(&mu, &[64, 256, 1024], &rs, &phis).unwrap();
    let vals: Vec<f64> = rep.max_ratio_by_n.iter().map(|x| x.1).collect();
    let hi = vals.iter().cloned().fold(0.0, f64::max);
    let lo = vals.iter().cloned().fold(f64::INFINITY, f64::min);
    let spread = hi / lo;
    report(
        9,
        hi.is_finite() && spread < 2.0,
        format!(
            "max ratio by N {:?}, spread {spread:.2}× (excluded {})",
            rep.max_ratio_by_n, rep.excluded
        ),
    );
}

#[test]
fn criterion_10_llerr_end_to_end() {
    let _g = lock();
    let ang = angle();
    let n = 13;
    let mu = presets("littlewood", &ang).unwrap();
    let table = enumerate_exact(&mu, n, Marginal::EndpointOnly).unwrap();
    let sigma2 = mu.sigma2_f64();
    let law = GaussianLaw::new(sigma2, n).unwrap();
    let l = 10.0;
    let eps = epsilon_quadrature(&law, l, 1e-3, 1 << 22, |s, phi| {
        charfn_littlewood(&ang, n, &Frequency::polar(s, phi), PhaseConvention::Walk)
    })
    .unwrap();
    let rs: Vec<f64> = (0..10).map(|i| 1.0 + i as f64 / 3.0).collect();
    let reach = 3.0 * law.variance().sqrt();
    let x0: Vec<Complex64> = (0..10)
        .map(|k| Complex64::from_polar(reach * k as f64 / 9.0, 0.37 * k as f64))
        .collect();
    let rep = lclt_compare(&table, sigma2, &rs, &x0).unwrap();
    let mut violations = 0;
    let mut min_slack = f64::INFINITY;
    for c in &rep.cells {
        let b = llerr_bound(eps.value, &law, l, c.r).unwrap();
        if c.abs_diff > b.bound {
            violations += 1;
        }
        min_slack = min_slack.min(b.bound - c.abs_diff);
    }
    report(
        10,
        violations == 0 && rep.width_failures == 0,
        format!(
            "ε={:.4}, 100 cells, max |Δ|={:.3e}, max normalized {:.3}, {violations} violations, min slack {min_slack:.3}",
            eps.value, rep.max_abs_diff, rep.max_normalized
        ),
    );
}

#[test]
fn criterion_11_radial_decay() {
    let _g = lock();
    let ang = angle();
    let vals: Vec<f64> = [13u32, 26, 52]
        .iter()
        .map(|&n| {
            radial_l2(10.0, 1e-6, DEFAULT_MAX_POINTS, |phi| {
                charfn_littlewood(&ang, n, &Frequency::polar(10.0, phi), PhaseConvention::Walk)
                    .map(|e| e.value())
            })
            .unwrap()
            .value
        })
        .collect();
    let decreasing = vals.windows(2).all(|w| w[1] < w[0]);
    report(
        11,
        decreasing,
        format!("radial L² at r=10 for N=13,26,52: {vals:?}"),
    );
}
