//! Criterion benchmarks for the isomwalk engines; see `benches/engines.rs`.
