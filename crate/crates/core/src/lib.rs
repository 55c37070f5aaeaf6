//! Exact game-theoretic solutions of tournaments and the reinforcement urn
//! processes built on top of them.
//!
//! A [`Tournament`] is a complete antisymmetric "beats" relation. From it the
//! crate computes:
//!
//! * order-theoretic solutions: the Condorcet winner and the Top-Cycle
//!   ([`tournament`]);
//! * the unique optimal strategy of the symmetric zero-sum tournament game and
//!   its support, the Bipartisan set, in exact rational arithmetic ([`game`]);
//! * the comparison Markov chain `p^[t]`, its two- and three-round closed forms
//!   and its stationary distribution ([`chain`]).
//!
//! On the stochastic side, [`urn`] simulates urns where the winner of two or
//! three sampled alternatives (or a draw from the stationary distribution) is
//! reinforced by one ball, [`diagnostics`] evaluates the discrete-log potential
//! `mu` and its conditional moments, and [`flow`] integrates the deterministic
//! mean-field limit in log-time.

pub mod chain;
pub mod diagnostics;
mod error;
pub mod flow;
pub mod game;
mod linalg;
pub mod lottery;
pub mod rng;
pub mod scalar;
pub mod tournament;
pub mod urn;

pub use chain::{chain_step, p2, p3, stationary, ChainState};
pub use diagnostics::{ld, DiagnosticsContext};
pub use error::{Error, Result};
pub use flow::{integrate, log_sum, vector_field, FlowPath, FlowState};
pub use game::{bipartisan_set, optimal_strategy, verify_optimal, OptimalStrategy, Verdict};
pub use lottery::{FloatLottery, Lottery, RationalLottery};
pub use scalar::{Rational, Scalar};
pub use tournament::{AlternativeSet, Tournament};
pub use urn::{ReinforcementRule, Schedule, SimConfig, Trajectory, Urn};
