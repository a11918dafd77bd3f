//! Criterion benchmarks for ptolemy-core; run with `cargo bench -p ptolemy-bench`.
