//! Benchmarks for the orthosep core library; see `benches/`.
