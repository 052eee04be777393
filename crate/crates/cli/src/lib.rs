//! Command-line surface for the prime-gap toolkit: configuration, binary
//! window caches, parallel drivers, report formatting, and the batch
//! verification suites.

pub mod cache;
pub mod commands;
pub mod config;
pub mod parallel;
pub mod report;
pub mod store;
pub mod verify;
