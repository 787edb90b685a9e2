//! Criterion benchmarks for `qbeam`; see `benches/`.
