//! Sector-scanning strategies for millimeter-wave initial access.
//!
//! A base station divides its cell into `N` sectors and illuminates one
//! sector per slot until a newly arrived user is found. This crate models
//! that discovery process end to end:
//!
//! - [`dist`] — entrance statistics over sectors (triangular, uniform,
//!   custom) and geometric entry-slot statistics;
//! - [`strategies`] — the scanning policies: exhaustive (EA), memory-less
//!   random illumination (MLRI), and statistic-and-memory-based
//!   illumination (SMBI);
//! - [`analytic`] — closed-form and exact-enumeration discovery-time
//!   evaluators, used as oracles for the simulator;
//! - [`sim`] — a seeded, reproducible Monte-Carlo engine and parameter
//!   sweeps;
//! - [`cli`] — the `iascan` command line front end emitting CSV artifacts.

pub mod analytic;
pub mod cli;
pub mod dist;
pub mod error;
pub mod sim;
pub mod strategies;

pub use error::{Error, Result};
