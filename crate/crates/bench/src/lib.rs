//! Benchmarks for the bhmm crate live under `benches/`.
