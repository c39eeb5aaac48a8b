//! Criterion benchmarks for the decomposition pipeline live in `benches/`.
