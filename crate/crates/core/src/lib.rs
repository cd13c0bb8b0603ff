//! Ground War: an event-driven RTS forward model with statistical forward
//! planners (MCTS, RHEA), parameterised heuristic opponents and opponent models,
//! an NTBEA tuner and the experiment harness built around them.

pub mod actionspace;
pub mod agents;
pub mod engine;
pub mod experiments;
pub mod search;
pub mod selftest;
pub mod tuner;
