//! Criterion benchmarks for `grover-noise`; see `benches/`.
