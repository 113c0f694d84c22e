//! Benchmarks for `funksphere`; see `benches/transforms.rs`.
