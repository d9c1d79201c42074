//! 0.1-nets of `[−log R, 0] × [0, 2π)` by values `log p(z)`.
//!
//! Cells: `max(1, ⌈log R / 0.1⌉)` rows of equal height and 63 columns of
//! width `2π/63`. A cell is covered when some witness of weight ≤ n has
//! `(log|p(z)|, arg p(z))` inside it (closed, columns glued at 2π). Every
//! point of the rectangle is then within 0.1 of a witness in each coordinate.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rayon::prelude::*;
use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use super::{pigeonhole_search, IntPolynomial};
use crate::error::{Error, Result};
use crate::hp;
use crate::ring::{AngleSpec, EmbeddingContext, Ring};

pub const CELL: f64 = 0.1;
pub const COLUMNS: usize = 63;
/// Acceptance slack during the search.
const SEARCH_MARGIN: f64 = 1e-9;
/// Inflation when re-verifying at 256 bits.
pub const VERIFY_INFLATION: f64 = 1e-6;
const EXHAUSTIVE_BELOW: u64 = 16;
const BASES_PER_ROW: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    GadgetOnly,
    GadgetPlusPigeonhole,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Grid {
    pub log_range: f64,
    pub rows: usize,
    pub row_height: f64,
    pub columns: usize,
    pub column_width: f64,
}

impl Grid {
    /// Grid over `[log δ, 0] × [0, 2π)` with `δ = 1/R`.
    pub fn new(range: f64) -> Result<Self> {
        if !(range >= 1.0) || !range.is_finite() {
            return Err(Error::invalid("R must be a finite number ≥ 1"));
        }
        let log_range = range.ln();
        let rows = ((log_range / CELL).ceil() as usize).max(1);
        Ok(Grid {
            log_range,
            rows,
            row_height: log_range / rows as f64,
            columns: COLUMNS,
            column_width: TAU / COLUMNS as f64,
        })
    }

    /// Row 0 is the bottom row.
    pub fn row_bounds(&self, i: usize) -> (f64, f64) {
        let lo = -self.log_range + i as f64 * self.row_height;
        let hi = if i + 1 == self.rows {
            0.0
        } else {
            lo + self.row_height
        };
        (lo, hi)
    }

    pub fn col_bounds(&self, c: usize) -> (f64, f64) {
        (
            c as f64 * self.column_width,
            (c + 1) as f64 * self.column_width,
        )
    }

    /// Row containing a log-modulus, allowing `slack` outside the range.
    pub fn row_of(&self, logmod: f64, slack: f64) -> Option<usize> {
        if logmod < -self.log_range - slack || logmod > slack {
            return None;
        }
        if self.row_height == 0.0 {
            return Some(0);
        }
        let i = ((logmod + self.log_range) / self.row_height).floor();
        Some((i.max(0.0) as usize).min(self.rows - 1))
    }

    pub fn col_of(&self, arg: f64) -> usize {
        ((arg.rem_euclid(TAU) / self.column_width) as usize).min(self.columns - 1)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Witness {
    pub row: usize,
    pub col: usize,
    pub coeffs: IntPolynomial,
    pub weight: u64,
    pub log_modulus: f64,
    pub arg: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct NetCertificate {
    pub a: i64,
    pub b: i64,
    pub n: u64,
    #[serde(rename = "R")]
    pub range: f64,
    pub cell: f64,
    pub convention: &'static str,
    pub grid: Grid,
    pub strategy: Strategy,
    pub exhaustive: bool,
    pub witnesses: Vec<Witness>,
    pub uncovered: Vec<(usize, usize)>,
    pub complete: bool,
}

/// A polynomial with its value at `z`, in turns and log-modulus.
#[derive(Clone, Debug)]
struct Base {
    poly: IntPolynomial,
    weight: u64,
    log_mod: f64,
    arg_turns: u128,
}

fn value_of(poly: &IntPolynomial, powers: &Powers) -> (f64, u128) {
    let v = powers.eval(poly);
    (v.norm().ln(), radians_to_turns(v.arg()))
}

fn radians_to_turns(x: f64) -> u128 {
    let frac = (x / TAU).rem_euclid(1.0);
    ((hp::ldexp(frac, 64) as u64) as u128) << 64
}

fn turns_to_unit(t: u128) -> f64 {
    (t >> 64) as u64 as f64 / 2f64.powi(64)
}

/// `z^j` for small `j`, and an accurate evaluator for sparse polynomials.
struct Powers {
    theta: u128,
}

impl Powers {
    fn eval(&self, p: &IntPolynomial) -> Complex64 {
        // Pairwise-compensated sum of c_j z^j with exactly reduced phases.
        let mut re = crate::charfn::Neumaier::default();
        let mut im = crate::charfn::Neumaier::default();
        for (j, &c) in p.coeffs().iter().enumerate() {
            if c == 0 {
                continue;
            }
            let t = self.theta.wrapping_mul(j as u128);
            re.add(c as f64 * hp::cos_turns(t));
            im.add(c as f64 * hp::sin_turns(t));
        }
        Complex64::new(re.value(), im.value())
    }
}

/// Minimal-weight gadgets `ℓ (z^q − 1)^k` with log-modulus in `[lo, hi]`.
fn gadget_bases(
    logs: &[f64],
    n: u64,
    lo: f64,
    hi: f64,
    keep: usize,
) -> Vec<(u64, usize, u32, u64)> {
    let mut found: Vec<(u64, usize, u32, u64)> = Vec::new();
    let kmax = 63 - n.leading_zeros();
    for (q, &dq) in logs.iter().enumerate().skip(1) {
        if dq >= 0.0 {
            continue;
        }
        if !dq.is_finite() {
            continue;
        }
        for k in 1..=kmax {
            let fixed = (q as u64) * k as u64 + 1;
            if fixed + (1u64 << k) > n {
                break;
            }
            let need_lo = lo - k as f64 * dq + SEARCH_MARGIN;
            let need_hi = hi - k as f64 * dq - SEARCH_MARGIN;
            if need_hi < 0.0 {
                continue;
            }
            let ell = need_lo.exp().ceil().max(1.0);
            if ell.ln() > need_hi || ell > 1e15 {
                continue;
            }
            let ell = ell as u64;
            let w = fixed + ell * (1u64 << k);
            if w <= n {
                found.push((w, q, k, ell));
            }
        }
    }
    found.sort();
    found.truncate(keep);
    found
}

fn gadget_base(theta: u128, logs: &[f64], (w, q, k, ell): (u64, usize, u32, u64)) -> Result<Base> {
    let poly = IntPolynomial::gadget(q, k)?.scale(ell as i64)?;
    // z^q − 1 = 2 sin(π t) e^{iπ(t + 1/2)} for z^q = e^{2πi t}, t ∈ [0, 1).
    let t = theta.wrapping_mul(q as u128);
    let arg_turns = ((t >> 1) + (1u128 << 126)).wrapping_mul(k as u128);
    let log_mod = (ell as f64).ln() + k as f64 * logs[q];
    Ok(Base {
        poly,
        weight: w,
        log_mod,
        arg_turns,
    })
}

fn modulus_logs(theta: u128, qmax: usize) -> Vec<f64> {
    let mut t = 0u128;
    (0..=qmax)
        .map(|q| {
            let v = if q == 0 {
                f64::INFINITY
            } else {
                (2.0 * (std::f64::consts::PI * hp::turns_signed(t)).sin().abs()).ln()
            };
            t = t.wrapping_add(theta);
            v
        })
        .collect()
}

/// For each column, the smallest-weight `±z^j · base` landing in it.
fn fill_columns(
    grid: &Grid,
    base: &Base,
    theta: u128,
    n: u64,
    row: usize,
    slots: &mut [Option<Witness>],
) -> Result<()> {
    let half = 1u128 << 127;
    let budget = n.saturating_sub(base.weight);
    let margin = SEARCH_MARGIN / TAU;
    let cw = 1.0 / grid.columns as f64;
    let mut open = slots.iter().filter(|s| s.is_none()).count();
    let mut t = base.arg_turns;
    for j in 0..=budget {
        if open == 0 {
            break;
        }
        for (sign, turn) in [(1i64, t), (-1, t.wrapping_add(half))] {
            let u = turns_to_unit(turn);
            let c = ((u / cw) as usize).min(grid.columns - 1);
            let (clo, chi) = (c as f64 * cw, (c + 1) as f64 * cw);
            if slots[c].is_some() || u - clo < margin || chi - u < margin {
                continue;
            }
            let poly = base.poly.shift(j as usize).scale(sign)?;
            slots[c] = Some(Witness {
                row,
                col: c,
                weight: poly.weight(),
                coeffs: poly,
                log_modulus: base.log_mod,
                arg: u * TAU,
            });
            open -= 1;
        }
        t = t.wrapping_add(theta);
    }
    Ok(())
}

/// Certifies (or fails to certify) that weight-≤n values form a 0.1-net.
pub fn certify_dpv(
    angle: &AngleSpec,
    n: u64,
    range: f64,
    strategy: Strategy,
) -> Result<NetCertificate> {
    let ring = angle.ring().map_err(|_| Error::NotExact)?;
    if n < 2 {
        return Err(Error::invalid("n must be at least 2"));
    }
    let grid = Grid::new(range)?;
    let theta = angle.theta_turns();
    let powers = Powers { theta };
    let exhaustive = n < EXHAUSTIVE_BELOW;
    let witnesses = if exhaustive {
        exhaustive_cover(&grid, n, &powers)
    } else {
        search_cover(angle, &grid, n, strategy, &powers)?
    };
    let mut slots: Vec<Option<Witness>> = vec![None; grid.rows * grid.columns];
    for w in witnesses {
        let idx = w.row * grid.columns + w.col;
        let better = match &slots[idx] {
            None => true,
            Some(o) => (w.weight, &w.coeffs) < (o.weight, &o.coeffs),
        };
        if better {
            slots[idx] = Some(w);
        }
    }
    let mut uncovered = Vec::new();
    let mut out = Vec::new();
    for (idx, s) in slots.into_iter().enumerate() {
        match s {
            Some(w) => out.push(w),
            None => uncovered.push((idx / grid.columns, idx % grid.columns)),
        }
    }
    Ok(NetCertificate {
        a: ring.a(),
        b: ring.b(),
        n,
        range,
        cell: CELL,
        convention: "closed cells of side ≤ 0.1 (63 columns of 2π/63); witness inside its cell; \
                     natural log; arg in [0, 2π) glued",
        grid,
        strategy,
        exhaustive,
        complete: uncovered.is_empty(),
        witnesses: out,
        uncovered,
    })
}

fn search_cover(
    angle: &AngleSpec,
    grid: &Grid,
    n: u64,
    strategy: Strategy,
    powers: &Powers,
) -> Result<Vec<Witness>> {
    let theta = powers.theta;
    let qmax = (n as usize).min(1 << 20);
    let logs = modulus_logs(theta, qmax);
    let pigeon: Vec<Base> = match strategy {
        Strategy::GadgetOnly => Vec::new(),
        Strategy::GadgetPlusPigeonhole => (2..=10)
            .filter_map(|d| pigeonhole_search(angle, d).ok())
            .map(|r| {
                let (log_mod, arg_turns) = value_of(&r.q, powers);
                Base {
                    weight: r.q.weight(),
                    poly: r.q,
                    log_mod,
                    arg_turns,
                }
            })
            .filter(|b| b.weight <= n)
            .collect(),
    };
    let rows: Vec<Result<Vec<Witness>>> = (0..grid.rows)
        .into_par_iter()
        .map(|row| {
            let (lo, hi) = grid.row_bounds(row);
            let mut bases: Vec<Base> = Vec::new();
            if hi == 0.0 {
                bases.push(Base {
                    poly: IntPolynomial::constant(1),
                    weight: 2,
                    log_mod: 0.0,
                    arg_turns: 0,
                });
            }
            for g in gadget_bases(&logs, n, lo, hi, BASES_PER_ROW) {
                bases.push(gadget_base(theta, &logs, g)?);
            }
            for p in &pigeon {
                if p.log_mod >= lo + SEARCH_MARGIN && p.log_mod <= hi - SEARCH_MARGIN {
                    bases.push(p.clone());
                }
                for g in gadget_bases(&logs, n, lo - p.log_mod, hi - p.log_mod, 2) {
                    let gb = gadget_base(theta, &logs, g)?;
                    let poly = p.poly.mul(&gb.poly)?;
                    let weight = poly.weight();
                    if weight <= n {
                        let log_mod = p.log_mod + gb.log_mod;
                        let arg_turns = p.arg_turns.wrapping_add(gb.arg_turns);
                        if log_mod >= lo + SEARCH_MARGIN && log_mod <= hi - SEARCH_MARGIN {
                            bases.push(Base {
                                poly,
                                weight,
                                log_mod,
                                arg_turns,
                            });
                        }
                    }
                }
            }
            bases.sort_by(|x, y| (x.weight, &x.poly).cmp(&(y.weight, &y.poly)));
            let mut slots: Vec<Option<Witness>> = vec![None; grid.columns];
            for b in &bases {
                if slots.iter().all(|s| s.is_some()) {
                    break;
                }
                fill_columns(grid, b, theta, n, row, &mut slots)?;
            }
            Ok(slots.into_iter().flatten().collect())
        })
        .collect();
    let mut all = Vec::new();
    for r in rows {
        all.extend(r?);
    }
    Ok(all)
}

/// Every polynomial of weight ≤ n, placed in its cell.
fn exhaustive_cover(grid: &Grid, n: u64, powers: &Powers) -> Vec<Witness> {
    let mut out = Vec::new();
    // Degree D leaves Σ|c_j| ≤ n − D − 1 with c_D ≠ 0.
    for d in 0..n.saturating_sub(1) as usize {
        let l1 = n - d as u64 - 1;
        let mut coeffs = vec![0i64; d + 1];
        enumerate_l1(&mut coeffs, 0, l1 as i64, &mut |c| {
            if c[d] == 0 {
                return;
            }
            let p = IntPolynomial::new(c.to_vec());
            let v = powers.eval(&p);
            if v.norm() == 0.0 {
                return;
            }
            let log_mod = v.norm().ln();
            let arg = v.arg().rem_euclid(TAU);
            if let Some(row) = grid.row_of(log_mod, 0.0) {
                let (lo, hi) = grid.row_bounds(row);
                if log_mod >= lo - SEARCH_MARGIN && log_mod <= hi + SEARCH_MARGIN {
                    out.push(Witness {
                        row,
                        col: grid.col_of(arg),
                        weight: p.weight(),
                        coeffs: p,
                        log_modulus: log_mod,
                        arg,
                    });
                }
            }
        });
    }
    out
}

fn enumerate_l1(c: &mut Vec<i64>, i: usize, left: i64, f: &mut impl FnMut(&[i64])) {
    if i == c.len() {
        f(c);
        return;
    }
    for v in -left..=left {
        c[i] = v;
        enumerate_l1(c, i + 1, left - v.abs(), f);
    }
    c[i] = 0;
}

/// Re-checks every witness: weight, and the cell at 256-bit precision with
/// exact `|p(z)|²`, inflated by [`VERIFY_INFLATION`]. Returns the failures.
///
/// A witness `z^j P` with `P(0) ≠ 0` is checked through `|P(z)|` and
/// `arg P(z) + jθ`, so shifts of one polynomial share a single evaluation.
pub fn verify_certificate(angle: &AngleSpec, cert: &NetCertificate) -> Result<Vec<(usize, usize)>> {
    let ring = angle.ring()?;
    let ctx = EmbeddingContext::new(angle, 256)?;
    let theta = angle.theta_turns();
    fn split(w: &Witness) -> (usize, &[i64]) {
        let c = w.coeffs.coeffs();
        let j = c.iter().take_while(|&&x| x == 0).count();
        (j, &c[j..])
    }
    let mut distinct: Vec<&[i64]> = cert.witnesses.iter().map(|w| split(w).1).collect();
    distinct.sort();
    distinct.dedup();
    let values: FxHashMap<&[i64], Option<(f64, u128)>> = distinct
        .par_iter()
        .map(|&p| (p, exact_value(&ring, &ctx, p)))
        .collect();
    let grid = cert.grid;
    let bad = cert
        .witnesses
        .iter()
        .filter(|w| {
            let (j, p) = split(w);
            let Some((log_mod, arg)) = values[p] else {
                return true;
            };
            if w.coeffs.weight() > cert.n {
                return true;
            }
            let (lo, hi) = grid.row_bounds(w.row);
            if log_mod < lo - VERIFY_INFLATION || log_mod > hi + VERIFY_INFLATION {
                return true;
            }
            let arg =
                hp::turns_to_unsigned_radians(arg.wrapping_add(theta.wrapping_mul(j as u128)));
            let (clo, chi) = grid.col_bounds(w.col);
            let inside = |x: f64| x >= clo - VERIFY_INFLATION && x <= chi + VERIFY_INFLATION;
            !(inside(arg) || inside(arg + TAU) || inside(arg - TAU))
        })
        .map(|w| (w.row, w.col))
        .collect();
    Ok(bad)
}

/// `(log|P(z)|, arg P(z))` from the exact ring value; `None` when `P(z) = 0`.
fn exact_value(ring: &Ring, ctx: &EmbeddingContext, p: &[i64]) -> Option<(f64, u128)> {
    let x = ring.eval_poly(p);
    if x.is_zero() {
        return None;
    }
    let log_mod = 0.5 * hp::ln_rational(&ring.norm2(&x));
    let v = ctx.embed(&x);
    Some((log_mod, hp::atan2(&v.im, &v.re).to_turns()))
}

/// A weight-≤n polynomial whose value is within 0.05 of the target in both
/// log-modulus and argument.
pub fn gadget_search(
    angle: &AngleSpec,
    n: u64,
    target_logmod: f64,
    target_arg: f64,
) -> Result<IntPolynomial> {
    angle.ring().map_err(|_| Error::NotExact)?;
    if target_logmod > 0.0 || !target_logmod.is_finite() || !target_arg.is_finite() {
        return Err(Error::invalid("target log-modulus must be finite and ≤ 0"));
    }
    let half = CELL / 2.0;
    let (lo, hi) = (target_logmod - half, (target_logmod + half).min(0.0));
    let theta = angle.theta_turns();
    let qmax = (n as usize).min(1 << 20);
    let logs = modulus_logs(theta, qmax);
    let mut bases = Vec::new();
    if target_logmod.abs() <= half {
        bases.push(Base {
            poly: IntPolynomial::constant(1),
            weight: 2,
            log_mod: 0.0,
            arg_turns: 0,
        });
    }
    for g in gadget_bases(&logs, n, lo, hi, BASES_PER_ROW) {
        bases.push(gadget_base(theta, &logs, g)?);
    }
    bases.sort_by(|x, y| (x.weight, &x.poly).cmp(&(y.weight, &y.poly)));
    let target_t = radians_to_turns(target_arg);
    let width = radians_to_turns(half) as f64 / 2f64.powi(128);
    let half_turn = 1u128 << 127;
    for b in &bases {
        let mut t = b.arg_turns;
        for j in 0..=n.saturating_sub(b.weight) {
            for (sign, turn) in [(1i64, t), (-1, t.wrapping_add(half_turn))] {
                let off = hp::turns_signed(turn.wrapping_sub(target_t)).abs();
                if off < width - SEARCH_MARGIN {
                    return b.poly.shift(j as usize).scale(sign);
                }
            }
            t = t.wrapping_add(theta);
        }
    }
    Err(Error::NotFound(format!(
        "no ℓ z^j (z^q − 1)^k of weight ≤ {n} near ({target_logmod}, {target_arg})"
    )))
}

#[derive(Clone, Debug, Serialize)]
pub struct AmpleReport {
    pub ample: bool,
    pub grid: Grid,
    pub uncovered: Vec<(usize, usize)>,
}

/// Whether `{log x}` meets every 0.1-cell of `[log δ, 0] × [0, 2π)`.
pub fn ample_check(points: &[Complex64], delta: f64) -> Result<AmpleReport> {
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::invalid("delta must lie in (0, 1]"));
    }
    let grid = Grid::new(1.0 / delta)?;
    let mut hit = vec![false; grid.rows * grid.columns];
    let slack = 1e-9;
    for p in points {
        let r = p.norm();
        if r == 0.0 || !r.is_finite() {
            continue;
        }
        let lm = r.ln();
        let arg = p.arg().rem_euclid(TAU);
        let Some(row) = grid.row_of(lm, slack) else {
            continue;
        };
        // Points on a shared edge count for both neighbours.
        let rows: Vec<usize> = (row.saturating_sub(1)..=(row + 1).min(grid.rows - 1))
            .filter(|&i| {
                let (lo, hi) = grid.row_bounds(i);
                lm >= lo - slack && lm <= hi + slack
            })
            .collect();
        let c = grid.col_of(arg);
        let cols: Vec<usize> = [c + grid.columns - 1, c, c + 1]
            .into_iter()
            .map(|x| x % grid.columns)
            .filter(|&j| {
                let (lo, hi) = grid.col_bounds(j);
                let inside = |x: f64| x >= lo - slack && x <= hi + slack;
                inside(arg) || inside(arg + TAU) || inside(arg - TAU)
            })
            .collect();
        for &i in &rows {
            for &j in &cols {
                hit[i * grid.columns + j] = true;
            }
        }
    }
    let uncovered: Vec<(usize, usize)> = hit
        .iter()
        .enumerate()
        .filter(|(_, h)| !**h)
        .map(|(i, _)| (i / grid.columns, i % grid.columns))
        .collect();
    Ok(AmpleReport {
        ample: uncovered.is_empty(),
        grid,
        uncovered,
    })
}
