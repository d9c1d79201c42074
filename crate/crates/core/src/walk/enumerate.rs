use rayon::prelude::*;
use rustc_hash::FxHashMap;

use super::lattice::{Coord, Lattice};
use super::table::{DistributionTable, Marginal, TableEntry};
use super::GeneratorMeasure;
use crate::error::{Error, Result};

pub const DEFAULT_MAX_STATES: u128 = 800_000_000;

#[derive(Clone, Copy, Debug)]
pub struct EnumerateOptions {
    pub marginal: Marginal,
    pub max_states: u128,
}

impl Default for EnumerateOptions {
    fn default() -> Self {
        EnumerateOptions {
            marginal: Marginal::EndpointOnly,
            max_states: DEFAULT_MAX_STATES,
        }
    }
}

type Key = (Coord, i64);

struct Step {
    rotation: i64,
    translation: Coord,
    weight: u128,
}

/// Prepared arithmetic shared by enumeration and sampling.
pub(crate) struct Chain {
    pub lattice: Lattice,
    steps: Vec<Step>,
    pub denominator: u128,
}

impl Chain {
    pub fn new(mu: &GeneratorMeasure, n: u32) -> Result<Self> {
        let ring = mu.angle().ring()?;
        let w = mu.integer_weights()?;
        let kmax = mu
            .atoms()
            .iter()
            .map(|a| a.isometry.translation.k())
            .max()
            .unwrap_or(0);
        let e = n
            .checked_mul(mu.max_rotation())
            .and_then(|x| x.checked_add(kmax))
            .ok_or(Error::Overflow("lattice exponent"))?;
        let lattice = Lattice::new(&ring, e)?;
        let steps = mu
            .atoms()
            .iter()
            .zip(&w.numerators)
            .map(|(a, &weight)| {
                Ok(Step {
                    rotation: a.isometry.rotation_power,
                    translation: lattice.from_point(&a.isometry.translation)?,
                    weight,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Chain {
            lattice,
            steps,
            denominator: w.denominator,
        })
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn weight(&self, i: usize) -> u128 {
        self.steps[i].weight
    }

    /// `x ↦ g_i(x)`. Running the chain from the inside out,
    /// `g_1(g_2(⋯ g_N(0)))` has the law of `Y_N` because the steps are i.i.d.
    pub fn apply(&self, i: usize, x: Coord) -> Result<Coord> {
        let s = &self.steps[i];
        Lattice::add(self.lattice.rotate(x, s.rotation)?, s.translation)
    }

    pub fn rotation(&self, i: usize) -> i64 {
        self.steps[i].rotation
    }
}

/// Exact law of `Y_N` (and optionally of the total rotation).
pub fn enumerate_exact(
    mu: &GeneratorMeasure,
    n: u32,
    marginal: Marginal,
) -> Result<DistributionTable> {
    enumerate_exact_with(
        mu,
        n,
        EnumerateOptions {
            marginal,
            ..Default::default()
        },
    )
}

pub fn enumerate_exact_with(
    mu: &GeneratorMeasure,
    n: u32,
    opts: EnumerateOptions,
) -> Result<DistributionTable> {
    let ring = mu.angle().ring()?;
    let chain = Chain::new(mu, n)?;
    let total = chain
        .denominator
        .checked_pow(n)
        .ok_or(Error::Overflow("total multiplicity"))?;
    let track = opts.marginal == Marginal::EndpointAndRotation;
    let mut states: Vec<(Key, u128)> = vec![(((0, 0), 0), 1)];
    for _ in 0..n {
        let next = step(&states, &chain, track)?;
        if next.len() as u128 > opts.max_states {
            return Err(Error::Budget {
                what: "enumeration states",
                needed: next.len() as u128,
                limit: opts.max_states,
            });
        }
        states = next;
    }
    let mut entries: Vec<(TableEntry, Coord)> = states
        .par_iter()
        .map(|&((c, rot), m)| {
            let entry = TableEntry {
                point: chain.lattice.to_point(&ring, c),
                rotation_power: track.then_some(rot),
                multiplicity: m,
            };
            (entry, c)
        })
        .collect();
    entries.par_sort_by(|x, y| {
        (&x.0.point, x.0.rotation_power).cmp(&(&y.0.point, y.0.rotation_power))
    });
    let (entries, coords): (Vec<_>, Vec<_>) = entries.into_iter().unzip();
    Ok(DistributionTable::from_sorted_parts(
        mu.angle().clone(),
        n,
        opts.marginal,
        total,
        chain.lattice,
        entries,
        coords,
    ))
}

const CHUNK: usize = 1 << 14;

fn step(states: &[(Key, u128)], chain: &Chain, track: bool) -> Result<Vec<(Key, u128)>> {
    let merged = states
        .par_chunks(CHUNK)
        .map(|chunk| {
            let mut map: FxHashMap<Key, u128> = FxHashMap::default();
            map.reserve(chunk.len() * chain.len());
            for &((x, rot), m) in chunk {
                for i in 0..chain.len() {
                    let y = chain.apply(i, x)?;
                    let r = if track { rot + chain.rotation(i) } else { 0 };
                    *map.entry((y, r)).or_insert(0) += m * chain.weight(i);
                }
            }
            Ok(map)
        })
        .try_reduce(FxHashMap::default, |mut a, mut b| {
            if a.len() < b.len() {
                std::mem::swap(&mut a, &mut b);
            }
            for (k, v) in b {
                *a.entry(k).or_insert(0) += v;
            }
            Ok(a)
        })?;
    Ok(merged.into_iter().collect())
}
