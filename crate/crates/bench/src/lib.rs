//! Criterion benchmarks for the yamabe-cone kernels; see `benches/`.
