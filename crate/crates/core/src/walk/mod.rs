//! Isometry measures, the exact law of `Y_N = g_1 ⋯ g_N (0)`, and sampling.

mod enumerate;
mod isometry;
pub(crate) mod lattice;
mod measure;
mod sample;
mod table;

pub use enumerate::{enumerate_exact, enumerate_exact_with, EnumerateOptions, DEFAULT_MAX_STATES};
pub use isometry::Isometry;
pub use measure::{presets, wreath, Atom, GeneratorMeasure, IntegerWeights, WreathParams};
pub use sample::{block_rng, sample, sample_hits, Endpoint, PRNG};
pub use table::{
    ball_probability, BallProbability, DistributionTable, Marginal, TableEntry, TableHeader,
    TableRow,
};
