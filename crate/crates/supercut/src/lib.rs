//! Proof engine, checker and interpolation toolkit for super-Belnap sequent calculi.

pub mod cli;
pub mod calculus;
pub mod engine;
pub mod interpolate;
pub mod proof;
pub mod semantics;
pub mod syntax;
pub mod transform;
