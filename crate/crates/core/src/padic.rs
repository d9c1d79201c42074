//! Integer approximants of `y_j = Re(ξ̄ z^j) = r cos(jθ − φ)`.
//!
//! From `y_{j+1} + y_{j−1} = (b/a) y_j` one gets, on stretches where every
//! rounding error `t_j = y_j − m_j` is below `1/(4ab)`, the integer recurrence
//! `a m_{j+1} − b m_j + a m_{j−1} = 0` and with it `v_p(m_j) ≥ K v_p(a)`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::ring::{AngleSpec, Ring, RingPoint};

/// `v_p(k)`, with `v_p(0) = ∞`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Valuation {
    Finite(u32),
    Infinite,
}

impl Valuation {
    pub fn at_least(self, n: u64) -> bool {
        match self {
            Valuation::Infinite => true,
            Valuation::Finite(v) => v as u64 >= n,
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinite => write!(f, "inf"),
        }
    }
}

impl Serialize for Valuation {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Valuation::Finite(v) => s.serialize_u32(*v),
            Valuation::Infinite => s.serialize_str("inf"),
        }
    }
}

fn is_prime(p: u64) -> bool {
    p >= 2
        && (2..)
            .take_while(|d| d * d <= p)
            .all(|d| !p.is_multiple_of(d))
}

/// Prime divisors of `|a|`, ascending.
pub fn prime_divisors(a: i64) -> Vec<u64> {
    let mut n = a.unsigned_abs();
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

pub fn valuation(k: &BigInt, p: u64) -> Result<Valuation> {
    if !is_prime(p) {
        return Err(Error::invalid(format!("{p} is not prime")));
    }
    Ok(valuation_unchecked(k, p))
}

fn valuation_unchecked(k: &BigInt, p: u64) -> Valuation {
    if k.is_zero() {
        return Valuation::Infinite;
    }
    let p = BigInt::from(p);
    let mut k = k.abs();
    let mut v = 0;
    loop {
        let (q, r) = k.div_rem(&p);
        if !r.is_zero() {
            return Valuation::Finite(v);
        }
        k = q;
        v += 1;
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ScanRow {
    pub j: i64,
    #[serde(serialize_with = "ser_ratio")]
    pub y: BigRational,
    #[serde(serialize_with = "ser_int")]
    pub m: BigInt,
    #[serde(serialize_with = "ser_ratio")]
    pub t: BigRational,
    /// `|t| = 1/2`, resolved toward even `m`.
    pub tie: bool,
    /// `(p, v_p(m))` for each prime `p | a`.
    pub valuations: Vec<(u64, Valuation)>,
}

fn ser_ratio<S: Serializer>(x: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

fn ser_int<S: Serializer>(x: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

#[derive(Clone, Debug, Serialize)]
pub struct RecurrenceScan {
    pub a: i64,
    pub b: i64,
    pub xi: RingPoint,
    pub j_lo: i64,
    pub j_hi: i64,
    pub primes: Vec<u64>,
    pub rows: Vec<ScanRow>,
    /// Interior rows whose three errors are below `1/(4ab)`.
    pub m_recurrence_triggered: usize,
    /// Centres where the integer recurrence failed.
    pub m_recurrence_failures: Vec<i64>,
}

impl RecurrenceScan {
    /// `1/(4ab)`.
    pub fn threshold(&self) -> BigRational {
        BigRational::new(BigInt::from(1), BigInt::from(4 * self.a * self.b.abs()))
    }

    /// CSV with header `j,y_num,y_den,m,t_num,t_den,v_<p>...`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("j,y_num,y_den,m,t_num,t_den");
        for p in &self.primes {
            s.push_str(&format!(",v_{p}"));
        }
        s.push('\n');
        for r in &self.rows {
            s.push_str(&format!(
                "{},{},{},{},{},{}",
                r.j,
                r.y.numer(),
                r.y.denom(),
                r.m,
                r.t.numer(),
                r.t.denom()
            ));
            for (_, v) in &r.valuations {
                s.push_str(&format!(",{v}"));
            }
            s.push('\n');
        }
        s
    }
}

/// Nearest integer, ties to even; returns `(m, tie)`.
fn round_half_even(y: &BigRational) -> (BigInt, bool) {
    let two = BigInt::from(2);
    let (n, d) = (y.numer(), y.denom());
    // floor((2n + d) / 2d)
    let m = (&two * n + d).div_floor(&(&two * d));
    let tie = (&two * n + d).is_multiple_of(&(&two * d));
    if tie && m.is_odd() {
        (m - 1, true)
    } else {
        (m, tie)
    }
}

/// Exact rows `j_lo..=j_hi` of `y_j = Re(ξ̄ z^j)`.
pub fn scan(angle: &AngleSpec, xi: &RingPoint, j_lo: i64, j_hi: i64) -> Result<RecurrenceScan> {
    let ring = angle.ring()?;
    scan_ring(&ring, xi, j_lo, j_hi)
}

fn scan_ring(ring: &Ring, xi: &RingPoint, j_lo: i64, j_hi: i64) -> Result<RecurrenceScan> {
    if j_hi - j_lo < 2 {
        return Err(Error::invalid("scan needs j_hi − j_lo ≥ 2"));
    }
    let (a, b) = (ring.a(), ring.b());
    let primes = prime_divisors(a);
    let mut w = ring.mul_z(&ring.conj(xi), j_lo);
    let mut rows = Vec::with_capacity((j_hi - j_lo + 1) as usize);
    for j in j_lo..=j_hi {
        let y = ring.re(&w);
        let (m, tie) = round_half_even(&y);
        let t = &y - BigRational::from_integer(m.clone());
        let valuations = primes
            .iter()
            .map(|&p| (p, valuation_unchecked(&m, p)))
            .collect();
        rows.push(ScanRow {
            j,
            y,
            m,
            t,
            tie,
            valuations,
        });
        w = ring.mul_z(&w, 1);
    }
    let ratio = BigRational::new(BigInt::from(b), BigInt::from(a));
    for i in 1..rows.len() - 1 {
        assert_eq!(
            &rows[i + 1].y + &rows[i - 1].y,
            &ratio * &rows[i].y,
            "three-term recurrence broken at j = {}",
            rows[i].j
        );
    }
    let thr = BigRational::new(BigInt::from(1), BigInt::from(4 * a * b.abs()));
    let (ab, bb) = (BigInt::from(a), BigInt::from(b));
    let mut triggered = 0;
    let mut failures = Vec::new();
    for i in 1..rows.len() - 1 {
        if rows[i - 1..=i + 1].iter().all(|r| r.t.abs() < thr) {
            triggered += 1;
            let lhs = &ab * &rows[i + 1].m - &bb * &rows[i].m + &ab * &rows[i - 1].m;
            if !lhs.is_zero() {
                failures.push(rows[i].j);
            }
        }
    }
    Ok(RecurrenceScan {
        a,
        b,
        xi: xi.clone(),
        j_lo,
        j_hi,
        primes,
        rows,
        m_recurrence_triggered: triggered,
        m_recurrence_failures: failures,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct PadicWindow {
    pub center: i64,
    #[serde(rename = "K")]
    pub k: u32,
    pub min_abs_t: f64,
    pub max_abs_t: f64,
    pub observed: Valuation,
}

#[derive(Clone, Debug, Serialize)]
pub struct PadicReport {
    pub prime: u64,
    pub v_p_a: u32,
    /// Windows with `K ≥ 1`; `K = 0` windows are vacuous and only counted.
    pub windows: Vec<PadicWindow>,
    pub vacuous: usize,
    pub violations: Vec<PadicWindow>,
}

/// Checks `v_p(m_j) ≥ K v_p(a)` at every centre whose `K`-window fits in the
/// scan, for each prime `p | a`.
pub fn padic_audit(scan: &RecurrenceScan, k_max: u32) -> Vec<PadicReport> {
    let thr = scan.threshold();
    let small: Vec<bool> = scan
        .rows
        .iter()
        .map(|r| !r.tie && r.t.abs() < thr)
        .collect();
    let abs_t: Vec<f64> = scan
        .rows
        .iter()
        .map(|r| r.t.abs().to_f64().unwrap_or(0.5))
        .collect();
    scan.primes
        .iter()
        .enumerate()
        .map(|(pi, &p)| {
            let vals: Vec<Valuation> = scan.rows.iter().map(|r| r.valuations[pi].1).collect();
            audit_prime(scan.a, p, scan.j_lo, &small, &abs_t, &vals, k_max)
        })
        .collect()
}

fn audit_prime(
    a: i64,
    p: u64,
    j_lo: i64,
    small: &[bool],
    abs_t: &[f64],
    vals: &[Valuation],
    k_max: u32,
) -> PadicReport {
    let vpa = match valuation_unchecked(&BigInt::from(a), p) {
        Valuation::Finite(v) => v,
        Valuation::Infinite => unreachable!("a ≠ 0"),
    };
    let n = small.len();
    let mut windows = Vec::new();
    let mut vacuous = 0;
    let mut violations = Vec::new();
    for c in 0..n {
        let reach = (c.min(n - 1 - c) as u32).min(k_max);
        let mut k = 0;
        while k < reach
            && small[c - k as usize - 1..=c + k as usize + 1]
                .iter()
                .all(|&s| s)
        {
            k += 1;
        }
        if k == 0 {
            vacuous += 1;
            continue;
        }
        let span = &abs_t[c - k as usize..=c + k as usize];
        let w = PadicWindow {
            center: j_lo + c as i64,
            k,
            min_abs_t: span.iter().cloned().fold(f64::INFINITY, f64::min),
            max_abs_t: span.iter().cloned().fold(0.0, f64::max),
            observed: vals[c],
        };
        if !w.observed.at_least(k as u64 * vpa as u64) {
            violations.push(w.clone());
        }
        windows.push(w);
    }
    PadicReport {
        prime: p,
        v_p_a: vpa,
        windows,
        vacuous,
        violations,
    }
}

/// Per-row data for the audit, from `Y_{j+1} = b Y_j − a² Y_{j−1}` with
/// `y_j = Y_j / (d a^{j − j_lo})`: no rational reductions.
struct FastRows {
    m: Vec<BigInt>,
    small: Vec<bool>,
    abs_t: Vec<f64>,
}

fn fast_rows(ring: &Ring, xi: &RingPoint, j_lo: i64, j_hi: i64) -> FastRows {
    let (a, b) = (ring.a_big(), ring.b_big());
    let a2 = a * a;
    let w0 = ring.mul_z(&ring.conj(xi), j_lo);
    let y0 = ring.re(&w0);
    let y1 = ring.re(&ring.mul_z(&w0, 1));
    let d = y0.denom().lcm(y1.denom());
    let mut prev = y0.numer() * (&d / y0.denom());
    let mut cur = y1.numer() * (&d / y1.denom()) * a;
    let mut den = d.clone();
    let four_ab = BigInt::from(4) * a * b.abs();
    let two = BigInt::from(2);
    let n = (j_hi - j_lo + 1) as usize;
    let mut out = FastRows {
        m: Vec::with_capacity(n),
        small: Vec::with_capacity(n),
        abs_t: Vec::with_capacity(n),
    };
    for i in 0..n {
        let y = if i == 0 { prev.clone() } else { cur.clone() };
        // m = floor((2Y + D) / 2D), ties to even.
        let num = &two * &y + &den;
        let dd = &two * &den;
        let (mut m, rem) = num.div_mod_floor(&dd);
        let tie = rem.is_zero();
        if tie && m.is_odd() {
            m -= 1;
        }
        let t = &y - &m * &den;
        let at = t.abs();
        let small = !tie && &at * &four_ab < den;
        out.small.push(small);
        out.abs_t
            .push(if small { ratio_f64(&at, &den) } else { 0.5 });
        out.m.push(m);
        if i >= 1 {
            let next = b * &cur - &a2 * &prev;
            prev = std::mem::replace(&mut cur, next);
        }
        den = &den * a;
    }
    out
}

fn ratio_f64(n: &BigInt, d: &BigInt) -> f64 {
    let shift = d.bits().saturating_sub(900);
    ((n >> shift).to_f64().unwrap_or(0.0)) / ((d >> shift).to_f64().unwrap_or(f64::INFINITY))
}

#[derive(Clone, Debug, Serialize)]
pub struct ExhaustiveAudit {
    pub a: i64,
    pub b: i64,
    pub bound: i64,
    pub j_lo: i64,
    pub j_hi: i64,
    pub k_max: u32,
    pub frequencies: usize,
    pub windows: usize,
    /// Number of windows of each depth `K = 1..=k_max`.
    pub depth_histogram: Vec<usize>,
    pub m_recurrence_triggered: usize,
    pub m_recurrence_failures: Vec<(String, i64)>,
    pub violations: Vec<(String, PadicWindow)>,
}

impl ExhaustiveAudit {
    pub fn clean(&self) -> bool {
        self.violations.is_empty() && self.m_recurrence_failures.is_empty()
    }
}

/// Audits every `ξ = u + v z` with `|u|, |v| ≤ bound`.
pub fn padic_audit_exhaustive(
    angle: &AngleSpec,
    bound: i64,
    j_lo: i64,
    j_hi: i64,
    k_max: u32,
) -> Result<ExhaustiveAudit> {
    let ring = angle.ring()?;
    if bound < 0 {
        return Err(Error::invalid("bound must be non-negative"));
    }
    if j_hi - j_lo < 2 {
        return Err(Error::invalid("scan needs j_hi − j_lo ≥ 2"));
    }
    let primes = prime_divisors(ring.a());
    let us: Vec<i64> = (-bound..=bound).collect();
    let parts: Vec<Result<ExhaustiveAudit>> = us
        .par_iter()
        .map(|&u| {
            let mut acc = ExhaustiveAudit {
                a: ring.a(),
                b: ring.b(),
                bound,
                j_lo,
                j_hi,
                k_max,
                frequencies: 0,
                windows: 0,
                depth_histogram: vec![0; k_max as usize],
                m_recurrence_triggered: 0,
                m_recurrence_failures: Vec::new(),
                violations: Vec::new(),
            };
            for v in -bound..=bound {
                let xi = ring.point(u, v, 0);
                let rows = fast_rows(&ring, &xi, j_lo, j_hi);
                acc.frequencies += 1;
                for i in 1..rows.m.len() - 1 {
                    if rows.small[i - 1] && rows.small[i] && rows.small[i + 1] {
                        acc.m_recurrence_triggered += 1;
                        let lhs = &rows.m[i + 1] * ring.a_big() - &rows.m[i] * ring.b_big()
                            + &rows.m[i - 1] * ring.a_big();
                        if !lhs.is_zero() {
                            acc.m_recurrence_failures
                                .push((xi.to_string(), j_lo + i as i64));
                        }
                    }
                }
                for &p in &primes {
                    let vals: Vec<Valuation> =
                        rows.m.iter().map(|m| valuation_unchecked(m, p)).collect();
                    let rep =
                        audit_prime(ring.a(), p, j_lo, &rows.small, &rows.abs_t, &vals, k_max);
                    acc.windows += rep.windows.len();
                    for w in &rep.windows {
                        acc.depth_histogram[w.k as usize - 1] += 1;
                    }
                    for w in rep.violations {
                        acc.violations.push((xi.to_string(), w));
                    }
                }
            }
            Ok(acc)
        })
        .collect();
    let mut total: Option<ExhaustiveAudit> = None;
    for p in parts {
        let p = p?;
        match &mut total {
            None => total = Some(p),
            Some(t) => {
                t.frequencies += p.frequencies;
                t.windows += p.windows;
                for (x, y) in t.depth_histogram.iter_mut().zip(&p.depth_histogram) {
                    *x += y;
                }
                t.m_recurrence_triggered += p.m_recurrence_triggered;
                t.m_recurrence_failures.extend(p.m_recurrence_failures);
                t.violations.extend(p.violations);
            }
        }
    }
    Ok(total.expect("at least one frequency"))
}

/// A ring frequency `u + v z` close to `r e^{iφ}`.
pub fn ring_frequency(ring: &Ring, r: f64, phi: f64) -> Result<RingPoint> {
    if !(r.is_finite() && r >= 0.0 && phi.is_finite()) || r > 1e15 {
        return Err(Error::invalid("need finite 0 ≤ r ≤ 1e15 and finite φ"));
    }
    let (a, b) = (ring.a() as f64, ring.b() as f64);
    let s = (4.0 * a * a - b * b).sqrt();
    let (x, y) = (r * phi.cos(), r * phi.sin());
    let v = (2.0 * a * y / s).round();
    let u = (x - v * b / (2.0 * a)).round();
    Ok(ring.point(u as i64, v as i64, 0))
}

#[derive(Clone, Debug, Serialize)]
pub struct MainFiveRow {
    pub xi: RingPoint,
    pub r: f64,
    pub j: i64,
    /// Smallest `Δ ≥ 0` with `d(y_{j+Δ}, ℤ) > 1/(4ab)`; `None` if not found
    /// within the search limit.
    pub delta: Option<u64>,
    pub ratio: Option<f64>,
    pub exceeds: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct MainFiveReport {
    pub threshold: f64,
    pub window_factor: f64,
    pub rows: Vec<MainFiveRow>,
    /// Frequencies with `r < 1/2`, where every `y_j` rounds to 0.
    pub excluded: usize,
    /// `max Δ / log r` over rows with `r > 1`.
    pub empirical_c: f64,
    pub max_delta: u64,
    pub exceedances: usize,
}

/// For each frequency and start `j`, the distance to the first row whose
/// rounding error exceeds `1/(4ab)`, compared with `window_factor · log r`.
pub fn main_five_scan(
    angle: &AngleSpec,
    xis: &[RingPoint],
    starts: &[i64],
    window_factor: f64,
    max_delta: u64,
) -> Result<MainFiveReport> {
    let ring = angle.ring()?;
    let (a, b) = (ring.a(), ring.b());
    let thr = BigRational::new(BigInt::from(1), BigInt::from(4 * a * b.abs()));
    let results: Vec<Result<(Vec<MainFiveRow>, bool)>> = xis
        .par_iter()
        .map(|xi| {
            let r = ring.norm2(xi).to_f64().unwrap_or(f64::INFINITY).sqrt();
            if r < 0.5 {
                return Ok((Vec::new(), true));
            }
            let mut rows = Vec::new();
            for &j in starts {
                let mut w = ring.mul_z(&ring.conj(xi), j);
                let mut delta = None;
                for d in 0..=max_delta {
                    let y = ring.re(&w);
                    let (m, _) = round_half_even(&y);
                    if (y - BigRational::from_integer(m)).abs() > thr {
                        delta = Some(d);
                        break;
                    }
                    w = ring.mul_z(&w, 1);
                }
                let lr = r.ln();
                let ratio = match delta {
                    Some(d) if lr > 0.0 => Some(d as f64 / lr),
                    _ => None,
                };
                let exceeds = match delta {
                    Some(d) => d as f64 > window_factor * lr.max(0.0),
                    None => true,
                };
                rows.push(MainFiveRow {
                    xi: xi.clone(),
                    r,
                    j,
                    delta,
                    ratio,
                    exceeds,
                });
            }
            Ok((rows, false))
        })
        .collect();
    let mut rows = Vec::new();
    let mut excluded = 0;
    for res in results {
        let (rs, ex) = res?;
        excluded += ex as usize;
        rows.extend(rs);
    }
    let empirical_c = rows.iter().filter_map(|r| r.ratio).fold(0.0, f64::max);
    let max_delta_seen = rows.iter().filter_map(|r| r.delta).max().unwrap_or(0);
    let exceedances = rows.iter().filter(|r| r.exceeds).count();
    Ok(MainFiveReport {
        threshold: 1.0 / (4 * a * b.abs()) as f64,
        window_factor,
        rows,
        excluded,
        empirical_c,
        max_delta: max_delta_seen,
        exceedances,
    })
}
