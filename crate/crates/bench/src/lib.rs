//! Criterion benchmarks for the coupling-flow solver; see `benches/`.
