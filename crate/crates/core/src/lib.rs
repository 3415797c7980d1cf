//! Stationary-state solvers and algebraic verifiers for open-boundary
//! simple exclusion processes (SSEP, PASEP, TASEP).
//!
//! The crate is `no_std` and only needs `alloc`. It provides
//!
//! - [`process`]: the exact Markov generator, its stationary vector and the
//!   XXZ spin-chain form of the generator ([`xxz`]),
//! - [`kmc`]: a Gillespie simulator with reproducible per-replica streams,
//! - [`mpa`]: matrix-product evaluation of stationary weights, plus the
//!   closed forms of the symmetric process,
//! - [`algebra`]: explicit representations and residual checks for the
//!   Askey-Wilson, tridiagonal, q-Serre and Dolan-Grady relations,
//! - [`charges`]: the Dolan-Grady hierarchy of commuting charges,
//! - [`orthopoly`]: Laguerre and Meixner-Pollaczek polynomials.
#![no_std]

extern crate alloc;

pub mod algebra;
pub mod charges;
mod error;
pub mod kmc;
pub mod linalg;
pub mod mpa;
pub mod orthopoly;
pub mod process;
pub mod xxz;

pub use crate::error::{Error, Result};
pub use crate::process::{
    build_generator, observables, steady_state, Configuration, MarkovGenerator, Method, ObservableReport,
    ProcessParams, SteadyState,
};
