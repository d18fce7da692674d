//! sobench: a benchmarking suite for simulation-optimization algorithms.
//!
//! The crate pits derivative-free and gradient-based search algorithms
//! against noisy continuous testbed problems under a hard replication
//! budget, and measures finite-time solution quality: which solution would
//! you hold if the budget stopped at n replications, and how good is it
//! really?
//!
//! The pieces:
//! - [`rng`]: reproducible random streams addressed by derivation paths.
//! - [`space`]: points, box domains, initial sampling, boundary projection.
//! - [`stats`] / [`budget`]: noisy-estimate summaries and replication
//!   accounting.
//! - [`problems`]: the eight-problem testbed plus a registry for plug-ins.
//! - [`algorithms`]: the five solvers (random search, gradient search with
//!   restarts, SPSA, a trust-region method in two variants, Nelder-Mead).
//! - [`trajectory`]: incumbent-change records emitted by runs.
//! - [`harness`]: macroreplication driver, common-random-number
//!   post-processing, checkpoint aggregation, SPSA budget sweeps.
//! - [`files`]: CSV reading and writing for trajectories and curves.
//! - [`cli`]: experiment configuration and the command implementations.

pub mod budget;
pub mod rng;
pub mod space;
pub mod stats;

pub mod problems;

pub mod algorithms;
pub mod cli;
pub mod files;
pub mod harness;
pub mod trajectory;
