//! Criterion benchmarks for fillrad-core live under `benches/`.
