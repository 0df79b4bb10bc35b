// SPDX-License-Identifier: Apache-2.0

//! Node ranking and cooperation on complex networks.
//!
//! The crate is organised as a pipeline:
//!
//! * [`graph`] loads edge lists and GML files into an immutable [`Graph`]
//!   and computes dataset statistics.
//! * [`ranking`] computes six per-node rankings (simple degree, PageRank,
//!   HITS, closeness, betweenness, clustering coefficient).
//! * [`game`] runs the synchronous evolutionary prisoner's dilemma with
//!   payoff-difference imitation.
//! * [`correlation`] scores each ranking against the cooperation dynamics
//!   (node-level Hamming distance, neighbour-mean KL, neighbour-variance KL).
//! * [`experiment`] wires everything together and writes CSV series.

pub mod correlation;
pub mod error;
pub mod experiment;
pub mod game;
pub mod graph;
pub mod ranking;

pub use error::{Error, Result};
pub use graph::{Graph, GraphStats};
