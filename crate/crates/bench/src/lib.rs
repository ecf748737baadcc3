//! Criterion benchmarks for the hot paths of `isus-core`; see `benches/`.
