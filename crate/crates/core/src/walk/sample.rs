use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::enumerate::Chain;
use super::lattice::Coord;
use super::GeneratorMeasure;
use crate::error::{Error, Result};
use crate::hp;
use crate::ring::RingPoint;

/// Name of the generator behind every seeded computation.
pub const PRNG: &str = "ChaCha8 (rand_chacha), one stream per block of 32768 draws";

const BLOCK: u64 = 1 << 15;

#[derive(Clone, Debug, PartialEq)]
pub enum Endpoint {
    Exact(RingPoint),
    Embedded(Complex64),
}

/// A seeded source of independent streams. Results depend only on the seed
/// and the block index, never on the number of worker threads.
pub fn block_rng(seed: u64, block: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(block);
    rng
}

enum Engine {
    Exact(Chain),
    Numeric {
        rot: Vec<Complex64>,
        trans: Vec<f64>,
        cum: Vec<u128>,
        den: u128,
    },
}

impl Engine {
    fn new(mu: &GeneratorMeasure, n: u32) -> Result<Self> {
        if mu.angle().is_exact() {
            return Ok(Engine::Exact(Chain::new(mu, n)?));
        }
        let theta = mu.angle().theta_turns();
        let w = mu.integer_weights()?;
        let mut rot = Vec::new();
        let mut trans = Vec::new();
        for a in mu.atoms() {
            let t = theta.wrapping_mul(a.isometry.rotation_power as i128 as u128);
            rot.push(Complex64::new(hp::cos_turns(t), hp::sin_turns(t)));
            trans.push(a.isometry.integer_translation().unwrap_or(0) as f64);
        }
        Ok(Engine::Numeric {
            rot,
            trans,
            cum: cumulative(&w.numerators),
            den: w.denominator,
        })
    }
}

fn cumulative(w: &[u128]) -> Vec<u128> {
    w.iter()
        .scan(0u128, |acc, &x| {
            *acc += x;
            Some(*acc)
        })
        .collect()
}

fn draw(rng: &mut ChaCha8Rng, cum: &[u128], den: u128) -> usize {
    let x = rng.random_range(0..den);
    cum.partition_point(|&c| c <= x)
}

fn run_exact(chain: &Chain, cum: &[u128], n: u32, rng: &mut ChaCha8Rng) -> Result<Coord> {
    let mut x = (0, 0);
    for _ in 0..n {
        x = chain.apply(draw(rng, cum, chain.denominator), x)?;
    }
    Ok(x)
}

/// `count` i.i.d. draws of `Y_N`; exact ring points for rational-cosine
/// angles, complex values otherwise.
pub fn sample(mu: &GeneratorMeasure, n: u32, count: u64, seed: u64) -> Result<Vec<Endpoint>> {
    if count < 1 {
        return Err(Error::invalid("count must be at least 1"));
    }
    let engine = Engine::new(mu, n)?;
    let blocks = count.div_ceil(BLOCK);
    let per_block: Vec<Result<Vec<Endpoint>>> = (0..blocks)
        .into_par_iter()
        .map(|blk| {
            let len = BLOCK.min(count - blk * BLOCK);
            let mut rng = block_rng(seed, blk);
            let mut out = Vec::with_capacity(len as usize);
            match &engine {
                Engine::Exact(chain) => {
                    let ring = mu.angle().ring()?;
                    let w: Vec<u128> = (0..chain.len()).map(|i| chain.weight(i)).collect();
                    let cum = cumulative(&w);
                    for _ in 0..len {
                        let c = run_exact(chain, &cum, n, &mut rng)?;
                        out.push(Endpoint::Exact(chain.lattice.to_point(&ring, c)));
                    }
                }
                Engine::Numeric {
                    rot,
                    trans,
                    cum,
                    den,
                } => {
                    for _ in 0..len {
                        let mut x = Complex64::new(0.0, 0.0);
                        for _ in 0..n {
                            let i = draw(&mut rng, cum, *den);
                            x = rot[i] * x + trans[i];
                        }
                        out.push(Endpoint::Embedded(x));
                    }
                }
            }
            Ok(out)
        })
        .collect();
    let mut all = Vec::with_capacity(count as usize);
    for b in per_block {
        all.extend(b?);
    }
    Ok(all)
}

/// Number of draws among `count` that land exactly on `target`; streams,
/// so memory stays constant.
pub fn sample_hits(
    mu: &GeneratorMeasure,
    n: u32,
    count: u64,
    seed: u64,
    target: &RingPoint,
) -> Result<u64> {
    let chain = Chain::new(mu, n)?;
    let ring = mu.angle().ring()?;
    let Ok(goal) = chain.lattice.from_point(&ring.normalize(target)) else {
        return Ok(0);
    };
    let w: Vec<u128> = (0..chain.len()).map(|i| chain.weight(i)).collect();
    let cum = cumulative(&w);
    let blocks = count.div_ceil(BLOCK);
    (0..blocks)
        .into_par_iter()
        .map(|blk| {
            let len = BLOCK.min(count - blk * BLOCK);
            let mut rng = block_rng(seed, blk);
            let mut hits = 0u64;
            for _ in 0..len {
                if run_exact(&chain, &cum, n, &mut rng)? == goal {
                    hits += 1;
                }
            }
            Ok(hits)
        })
        .try_reduce(|| 0, |a, b| Ok(a + b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::AngleSpec;
    use crate::walk::presets;

    #[test]
    fn zero_steps_stay_home() {
        let mu = presets("symmetric4", &AngleSpec::rational(5, 6).unwrap()).unwrap();
        let s = sample(&mu, 0, 100, 1).unwrap();
        assert!(s.iter().all(|e| *e == Endpoint::Exact(RingPoint::zero())));
    }

    #[test]
    fn reproducible_and_thread_independent() {
        let mu = presets("asymmetric3", &AngleSpec::rational(5, 6).unwrap()).unwrap();
        let a = sample(&mu, 6, 70_000, 42).unwrap();
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(3)
            .build()
            .unwrap();
        let b = pool.install(|| sample(&mu, 6, 70_000, 42).unwrap());
        assert_eq!(a, b);
        let c = sample(&mu, 6, 70_000, 43).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn numeric_angle_samples_lie_in_range() {
        let t = AngleSpec::parse_numeric("sqrt(2)*pi", 128).unwrap();
        let mu = presets("littlewood", &t).unwrap();
        let s = sample(&mu, 10, 1000, 7).unwrap();
        assert!(s
            .iter()
            .all(|e| matches!(e, Endpoint::Embedded(z) if z.norm() <= 10.0 + 1e-9)));
    }
}
