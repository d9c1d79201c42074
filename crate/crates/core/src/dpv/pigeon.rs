//! Smallest nonzero `|q(z)|` over integer polynomials of degree ≤ D with
//! coefficients in `[1−a, a−1]`, i.e. over differences of elements of
//! `P_D = {Σ b_j z^j : 0 ≤ b_j < a}`.

use num_complex::Complex64;
use num_rational::BigRational;
use rayon::prelude::*;
use serde::Serialize;

use super::IntPolynomial;
use crate::error::{Error, Result};
use crate::ring::{AngleSpec, EmbeddingContext, Ring};
use crate::walk::lattice::Lattice;

/// Largest stored half of the meet-in-the-middle search.
pub const DEFAULT_MITM_BUDGET: u64 = 1 << 27;
const Y_CHUNK: u64 = 1 << 24;
const REL_TIE: f64 = 1e-7;

#[derive(Clone, Debug, Serialize)]
pub struct PigeonholeResult {
    #[serde(rename = "D")]
    pub d: u32,
    pub q: IntPolynomial,
    pub modulus: f64,
    /// `|q(z)|²` as an exact fraction.
    pub modulus2: String,
    /// `a^{−D/2}`.
    pub lower_bound: f64,
    /// `D a^{1−D/2}`.
    pub reference: f64,
    /// `modulus / reference`.
    pub c_meas: f64,
    pub stored: u64,
    pub streamed: u64,
    pub grid: f64,
}

/// Digit tables: index digits (base `2a−1`) of a coefficient block map to
/// `Σ c_j z^{offset+j}` as `lo[idx mod m^s] + hi[idx / m^s]`.
struct Block {
    m: u64,
    len: u32,
    split: u64,
    lo: Vec<Complex64>,
    hi: Vec<Complex64>,
    amax: i64,
}

impl Block {
    fn new(powers: &[Complex64], amax: i64) -> Self {
        let m = (2 * amax + 1) as u64;
        let len = powers.len() as u32;
        let s = len / 2;
        let table = |ps: &[Complex64]| -> Vec<Complex64> {
            let mut out = vec![Complex64::new(0.0, 0.0)];
            for p in ps {
                let mut next = Vec::with_capacity(out.len() * m as usize);
                for d in 0..m as i64 {
                    let c = (d - amax) as f64;
                    next.extend(out.iter().map(|x| x + p * c));
                }
                out = next;
            }
            out
        };
        // Digit j of an index has place value m^j.
        let lo = table(&powers[..s as usize]);
        let hi = table(&powers[s as usize..]);
        Block {
            m,
            len,
            split: m.pow(s),
            lo,
            hi,
            amax,
        }
    }

    fn count(&self) -> u64 {
        self.m.pow(self.len)
    }

    fn value(&self, idx: u64) -> Complex64 {
        self.lo[(idx % self.split) as usize] + self.hi[(idx / self.split) as usize]
    }

    fn digits(&self, mut idx: u64) -> Vec<i64> {
        (0..self.len)
            .map(|_| {
                let d = (idx % self.m) as i64 - self.amax;
                idx /= self.m;
                d
            })
            .collect()
    }

    fn zero_index(&self) -> u64 {
        (0..self.len).fold(0, |acc, _| acc * self.m + self.amax as u64)
    }

    /// Lowest nonzero digit positive, or all zero.
    fn is_canonical(&self, mut idx: u64) -> bool {
        for _ in 0..self.len {
            let d = (idx % self.m) as i64 - self.amax;
            if d != 0 {
                return d > 0;
            }
            idx /= self.m;
        }
        true
    }
}

fn powers(ctx: &EmbeddingContext, ring: &Ring, from: usize, to: usize) -> Vec<Complex64> {
    (from..to)
        .map(|j| ctx.embed_f64(&ring.z_pow(j as i64)))
        .collect()
}

#[derive(Clone, Debug, Default)]
struct Best {
    dist: f64,
    cands: Vec<Vec<i64>>,
}

impl Best {
    fn new() -> Self {
        Best {
            dist: f64::INFINITY,
            cands: Vec::new(),
        }
    }

    fn offer(&mut self, d: f64, make: impl FnOnce() -> Vec<i64>) {
        let slack = REL_TIE * self.dist.min(d) + 1e-13;
        if d + slack < self.dist {
            self.dist = d;
            self.cands.clear();
            self.cands.push(make());
        } else if d <= self.dist + slack {
            self.dist = self.dist.min(d);
            self.cands.push(make());
        }
    }

    fn merge(mut self, o: Best) -> Best {
        for c in o.cands {
            let coeffs = c;
            self.offer(o.dist, || coeffs);
        }
        self
    }
}

/// Picks the exact minimizer among near-tied candidates; the sign is fixed so
/// the leading coefficient is positive.
fn finalize(ring: &Ring, cands: Vec<Vec<i64>>) -> Result<(IntPolynomial, BigRational)> {
    let mut polys: Vec<IntPolynomial> = cands
        .into_iter()
        .map(|c| {
            let p = IntPolynomial::new(c);
            if p.coeffs().last().is_some_and(|&x| x < 0) {
                p.neg()
            } else {
                p
            }
        })
        .filter(|p| !p.is_zero())
        .collect();
    polys.sort();
    polys.dedup();
    polys
        .into_iter()
        .map(|p| {
            let n2 = ring.norm2(&p.eval_ring(ring));
            (n2, p)
        })
        .min()
        .map(|(n2, p)| (p, n2))
        .ok_or_else(|| Error::NotFound("no nonzero candidate".into()))
}

fn report(
    angle: &AngleSpec,
    d: u32,
    q: IntPolynomial,
    n2: BigRational,
    stored: u64,
    streamed: u64,
    grid: f64,
) -> PigeonholeResult {
    use num_traits::ToPrimitive;
    let a = angle.ring().map(|r| r.a()).unwrap_or(2) as f64;
    let modulus = n2.to_f64().unwrap_or(f64::NAN).sqrt();
    let reference = d.max(1) as f64 * a.powf(1.0 - d as f64 / 2.0);
    PigeonholeResult {
        d,
        q,
        modulus,
        modulus2: n2.to_string(),
        lower_bound: a.powf(-(d as f64) / 2.0),
        reference,
        c_meas: modulus / reference,
        stored,
        streamed,
        grid,
    }
}

/// Meet-in-the-middle search. The low block `c_0..c_{L−1}` (`L = ⌊(D+1)/2⌋`)
/// is stored as sorted grid-cell keys; the high block is streamed in sorted
/// chunks and merge-joined against the neighbouring cells, so every pair
/// closer than the cell size is seen. The cell size grows if the best pair is
/// not closer than it.
pub fn pigeonhole_search(angle: &AngleSpec, d: u32) -> Result<PigeonholeResult> {
    pigeonhole_search_with(angle, d, DEFAULT_MITM_BUDGET)
}

pub fn pigeonhole_search_with(angle: &AngleSpec, d: u32, budget: u64) -> Result<PigeonholeResult> {
    let ring = angle.ring()?;
    let amax = ring.a() - 1;
    let ctx = EmbeddingContext::new(angle, 128)?;
    let l = (d as usize).div_ceil(2);
    let h = d as usize + 1 - l;
    let m = (2 * amax + 1) as u64;
    let stored = m
        .checked_pow(l as u32)
        .filter(|&x| x <= budget)
        .ok_or(Error::Budget {
            what: "meet-in-the-middle table",
            needed: (m as u128).saturating_pow(l as u32),
            limit: budget as u128,
        })?;
    if l == 0 {
        // D = 0: constants only.
        let q = IntPolynomial::constant(1);
        let n2 = ring.norm2(&q.eval_ring(&ring));
        return Ok(report(angle, d, q, n2, 1, 1, 0.0));
    }
    let x_block = Block::new(&powers(&ctx, &ring, 0, l), amax);
    let y_block = Block::new(&powers(&ctx, &ring, l, l + h), amax);
    let x_zero = x_block.zero_index();
    let y_zero = y_block.zero_index();
    let extent = (amax as f64) * h as f64 + 1.0;
    let x_bits = 64 - stored.leading_zeros();
    let y_bits = 64 - (y_block.count() - 1).max(1).leading_zeros();
    let id_bits = 64 - x_bits.max(y_bits);
    let a = ring.a() as f64;
    let mut g = (d.max(1) as f64 * a.powf(1.0 - d as f64 / 2.0)).min(1.0);
    loop {
        let mut cols = (2.0 * extent / g).ceil() as u64 + 3;
        while (cols as u128) * (cols as u128) >= 1u128 << id_bits {
            g *= 2.0;
            cols = (2.0 * extent / g).ceil() as u64 + 3;
        }
        let cell = |p: Complex64| -> (u64, u64) {
            (
                ((p.im + extent) / g) as u64 + 1,
                ((p.re + extent) / g) as u64 + 1,
            )
        };
        let mut xs: Vec<u64> = (0..stored)
            .into_par_iter()
            .map(|i| {
                let (r, c) = cell(x_block.value(i));
                ((r * cols + c) << x_bits) | i
            })
            .collect();
        xs.par_sort_unstable();
        let x_mask = (1u64 << x_bits) - 1;
        let y_mask = (1u64 << y_bits) - 1;
        let mut best = Best::new();
        let mut streamed = 0u64;
        let total_y = y_block.count();
        let mut start = 0;
        while start < total_y {
            let end = (start + Y_CHUNK).min(total_y);
            let mut ys: Vec<u64> = (start..end)
                .into_par_iter()
                .filter(|&j| y_block.is_canonical(j))
                .map(|j| {
                    let (r, c) = cell(y_block.value(j));
                    ((r * cols + c) << y_bits) | j
                })
                .collect();
            streamed += ys.len() as u64;
            ys.par_sort_unstable();
            let seg = ys
                .par_chunks(1 << 16)
                .map(|chunk| {
                    let mut b = Best::new();
                    for dr in [-1i64, 0, 1] {
                        let shift = |key: u64| -> (u64, u64) {
                            let id = (key >> y_bits) as i64 + dr * cols as i64;
                            ((id - 1).max(0) as u64, (id + 1) as u64)
                        };
                        let first = shift(chunk[0]).0 << x_bits;
                        let mut ptr = xs.partition_point(|&x| x < first);
                        for &yk in chunk {
                            let (lo, hi) = shift(yk);
                            while ptr < xs.len() && (xs[ptr] >> x_bits) < lo {
                                ptr += 1;
                            }
                            let yj = yk & y_mask;
                            let yv = y_block.value(yj);
                            let mut k = ptr;
                            while k < xs.len() && (xs[k] >> x_bits) <= hi {
                                let xi = xs[k] & x_mask;
                                k += 1;
                                if xi == x_zero && yj == y_zero {
                                    continue;
                                }
                                let dist = (x_block.value(xi) - yv).norm();
                                b.offer(dist, || {
                                    let mut c = x_block.digits(xi);
                                    c.extend(y_block.digits(yj).into_iter().map(|v| -v));
                                    c
                                });
                            }
                        }
                    }
                    b
                })
                .reduce(Best::new, Best::merge);
            best = best.merge(seg);
            start = end;
        }
        if best.dist * (1.0 + 2.0 * REL_TIE) + 1e-12 <= g {
            let (q, n2) = finalize(&ring, best.cands)?;
            return Ok(report(angle, d, q, n2, stored, streamed, g));
        }
        if g >= 4.0 * extent {
            return Err(Error::NotFound("no pair found".into()));
        }
        g *= 4.0;
    }
}

/// Exhaustive minimum over all `(2a−1)^{D+1}` coefficient vectors (halved
/// by sign). The oracle for [`pigeonhole_search`].
pub fn pigeonhole_bruteforce(angle: &AngleSpec, d: u32, budget: u64) -> Result<PigeonholeResult> {
    let ring = angle.ring()?;
    let amax = ring.a() - 1;
    let m = (2 * amax + 1) as u128;
    let count = m.saturating_pow(d + 1);
    if count > budget as u128 {
        return Err(Error::Budget {
            what: "brute-force enumeration",
            needed: count,
            limit: budget as u128,
        });
    }
    let ctx = EmbeddingContext::new(angle, 128)?;
    let p = powers(&ctx, &ring, 0, d as usize + 1);
    // Parallel over the top coefficient, which is made nonnegative.
    let best = (0..=amax)
        .into_par_iter()
        .map(|top| {
            let mut b = Best::new();
            let mut coeffs = vec![0i64; d as usize + 1];
            coeffs[d as usize] = top;
            let base = p[d as usize] * top as f64;
            descend(&p, amax, d as usize, base, &mut coeffs, top == 0, &mut b);
            b
        })
        .reduce(Best::new, Best::merge);
    let (q, n2) = finalize(&ring, best.cands)?;
    Ok(report(angle, d, q, n2, 0, count as u64, 0.0))
}

/// Fills coefficients below `level`. `free_sign` holds while every higher
/// coefficient is zero; then only nonnegative values are tried, which
/// removes the `q ↔ −q` duplicate.
fn descend(
    p: &[Complex64],
    amax: i64,
    level: usize,
    acc: Complex64,
    coeffs: &mut Vec<i64>,
    free_sign: bool,
    best: &mut Best,
) {
    if level == 0 {
        if coeffs.iter().all(|&c| c == 0) {
            return;
        }
        best.offer(acc.norm(), || coeffs.clone());
        return;
    }
    let j = level - 1;
    let lo = if free_sign { 0 } else { -amax };
    for c in lo..=amax {
        coeffs[j] = c;
        descend(
            p,
            amax,
            j,
            acc + p[j] * c as f64,
            coeffs,
            free_sign && c == 0,
            best,
        );
    }
    coeffs[j] = 0;
}

/// Whether `q ↦ q(z)` is injective on `P_D`, decided exactly on integer
/// coordinates over `a^D`.
pub fn injectivity_bruteforce(angle: &AngleSpec, d: u32, budget: u64) -> Result<bool> {
    let ring = angle.ring()?;
    let a = ring.a();
    let count = (a as u128).saturating_pow(d + 1);
    if count > budget as u128 {
        return Err(Error::Budget {
            what: "injectivity enumeration",
            needed: count,
            limit: budget as u128,
        });
    }
    let lat = Lattice::new(&ring, d)?;
    let basis: Vec<(i128, i128)> = (0..=d as i64)
        .map(|j| lat.from_point(&ring.z_pow(j)))
        .collect::<Result<_>>()?;
    let mut vals: Vec<(i128, i128)> = vec![(0, 0)];
    for &(u, v) in &basis {
        let mut next = Vec::with_capacity(vals.len() * a as usize);
        for c in 0..a as i128 {
            next.extend(vals.iter().map(|&(x, y)| (x + c * u, y + c * v)));
        }
        vals = next;
    }
    vals.par_sort_unstable();
    Ok(vals.windows(2).all(|w| w[0] != w[1]))
}
