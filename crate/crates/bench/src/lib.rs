//! Criterion benchmarks for the `skbessel` engine live in `benches/`.
