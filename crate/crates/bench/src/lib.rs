//! Criterion benchmarks for the dnlab-core solvers; see `benches/solvers.rs`.
