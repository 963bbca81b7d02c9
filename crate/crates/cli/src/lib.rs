//! Everything around the `sass-core` library that needs an operating
//! system: the CLI commands, the dataset and checkpoint file formats, the
//! wall-clock scaling benchmark, and the oracle/gradient verification
//! suites.

pub mod bench;
pub mod checkpoint;
pub mod commands;
pub mod config;
pub mod crc32;
pub mod dataset_io;
pub mod error;
pub mod suites;
