//! Delegated quantum sensing over Bell pairs, where the client learns the field and the server does not.
//!
//! A client without a sensor of its own asks a remote server to run a
//! Ramsey measurement. The server shares Bell pairs with the client, the
//! client certifies them with a random-sampling stabilizer test, then
//! measures its half of one surviving pair in the `σ_x` basis. The server
//! senses with the collapsed half and reports the `σ_y` readout `o`. Only
//! the client knows its own outcome `s`, so only the client can decode
//! `s ⊕ o` into a useful estimate of the field.
//!
//! Module map:
//!
//! - [`qcore`]: exact one- and two-qubit density matrices, Bell states,
//!   phase evolution and sampled projective measurements.
//! - [`noise`]: Pauli channels acting on the transmitted half of each pair.
//! - [`verify`]: the random-sampling test and its Serfling analytics.
//! - [`protocol`]: client and server state machines, rounds, runs, estimators.
//! - [`bounds`]: closed-form client/server uncertainty bounds.
//! - [`bench`]: figure data, Monte-Carlo theorem suites, simulation I/O.
//! - [`rng`]: seedable, splittable random streams.

// Negated comparisons are used on purpose so that NaN inputs are rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bench;
pub mod bounds;
pub mod error;
pub mod noise;
pub mod protocol;
pub mod qcore;
pub mod rng;
pub mod verify;

pub use error::{Error, Result};
