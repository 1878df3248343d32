//! Criterion benchmarks for the spinmz kernels live in `benches/`.
