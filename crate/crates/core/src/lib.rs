//! Simulation and verification toolkit for finite-dimensional quantum
//! measurement chains.
//!
//! The crate models a measured two-level system `S`, pointer systems (`D`,
//! `O`) that record the outcome, and an optional qubit environment `E`. On
//! top of that substrate it provides:
//!
//! - competing inference maps for the observer's "from inside" state:
//!   the partial-trace restriction and the stochastic (collapse-like)
//!   restriction, together with gemenge sampling and moment bookkeeping
//!   ([`restrict`]);
//! - linear-algebraic feasibility certificates answering whether any
//!   Hermitian observable can register a single-event Boolean difference
//!   between a restricted state and the pointer eigenstates ([`nogo`]);
//! - interference-term observables and sequential statistics quantifying
//!   the purely ensemble-level distinguishability of pure versus mixed
//!   measurement states ([`itobs`]);
//! - environment-induced suppression of observer coherence and the
//!   emergence of the pointer basis ([`decohere`]).
//!
//! Everything is pure computation over heap-allocated dense matrices; the
//! crate is `no_std` (with `alloc`) so the numerical core can be embedded
//! anywhere. File formats, CLI and reporting live in the companion crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod chain;
pub mod decohere;
mod error;
pub mod itobs;
pub mod linalg;
mod math;
pub mod nogo;
pub mod qcore;
pub mod restrict;
pub mod sample;

pub use error::{Error, Result};
pub use qcore::{
    expectation_power, is_eigenstate, partial_trace, spectral_decompose, trace_distance,
    CompositeLayout, DensityMatrix, HermitianObservable, Ket, QuantumState,
    SpectralDecomposition, Tolerances,
};
