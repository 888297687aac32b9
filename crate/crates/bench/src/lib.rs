//! Criterion benchmarks for replica-core live in `benches/`.
