//! A toolkit for building finite-state controllers from GR[1] temporal-logic
//! specifications and running them in multi-robot graph-search scenarios.
//!
//! The crate is organized around a pipeline:
//!
//! * [`ltl`] — the specification language: typed finite-domain variables,
//!   formula ASTs, parsing, desugaring and lasso evaluation.
//! * [`fds`] — fair discrete systems (explicit-state controllers) and their
//!   executions.
//! * [`synth`] — realizability checking and winning-strategy extraction via
//!   an enumerative game solver.
//! * [`check`] — model checking an FDS against invariants, GR[1] conjuncts
//!   and response properties.
//! * [`compose`] — architectures, asynchronous composition and connectors.
//! * [`graphs`] — directed topologies, random generation, covering cycles
//!   and the topology-to-guarantee encoding.
//! * [`pursuit`] — the cops-and-robbers clearing engine, heuristics and
//!   cop-number search.
//! * [`scenarios`] — generators for the handshake, stationary-search and
//!   moving-search specifications.
//! * [`sim`] — closed-loop simulation with a seeded scheduler, FIFO
//!   components, global graph-state storage and DOT snapshots.

pub mod check;
pub mod cli;
pub mod compose;
pub mod fds;
pub mod graphs;
pub mod ltl;
pub mod pursuit;
pub mod scenarios;
pub mod sim;
pub mod synth;
