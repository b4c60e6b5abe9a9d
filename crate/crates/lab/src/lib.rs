//! Experiment runner, file formats and CLI glue around `radial-core`.
//!
//! Everything here is reproducible by construction: experiments consume a
//! serialisable config plus a seed, all sampling is ChaCha-seeded, scans
//! collect in index order, and the resulting [`record::RunRecord`] has
//! canonical bytes that repeat bit for bit for a fixed config and seed.

pub mod experiments;
pub mod format;
pub mod record;
pub mod spec;
