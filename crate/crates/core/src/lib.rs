//! Scenario language, outcome type checker and finite-dimensional quantum
//! engine.
//!
//! Outcomes are typed relative to a measurement configuration: a scenario
//! predicates `yields(S, C) = O`, never a bare `yields(S) = O`. The
//! [`check`] module enforces that, the [`quantum`] module computes Born
//! probabilities for well-typed predicates, and [`bell`] and [`ks`] verify
//! the correlation and colorability constraints that rule out pre-assigned
//! outcome values.
//!
//! `no_std` with `alloc`.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod bell;
pub mod check;
pub mod ks;
pub mod lang;
pub mod linalg;
mod lp;
pub mod quantum;
pub mod scenarios;
