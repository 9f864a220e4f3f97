//! Seeded simulator of a supervised entanglement-sharing protocol and its
//! teleportation-based quantum secure direct communication extension.
//!
//! A supervisor (Charlie) distributes tripartite entangled states to Alice
//! and Bob, sacrifices a random subset to catch channel eavesdroppers, and
//! distills the survivors into Bell pairs. Alice then sends classical bits
//! by encoding them as diagonal-basis kets and teleporting each ket over a
//! pooled pair, so no message-carrying qubit ever enters the channel. The
//! crate also models the adversaries of interest: intercept-resend and
//! entangle-probe taps on the quantum channel, and the "out of control"
//! decode in which Alice and Bob read messages without the supervisor's
//! distillation step.
//!
//! Everything is driven by explicit seeds; a scenario rerun with the same
//! seed reproduces its report byte for byte.

pub mod attacks;
pub mod channels;
pub mod error;
pub mod harness;
pub mod protocol;
pub mod qsdc;
pub mod rng;
pub mod selftest;
pub mod states;
pub mod statevec;

pub use error::{Error, Result};
pub use harness::{emit_report, run_scenario, ReportFormat, Scenario, TrialReport};
pub use statevec::{BellOutcome, Gate, Sign, StateVector};
