//! The delegated sensing protocol as two communicating state machines.
//!
//! Per repetition the client announces `(ε, δ, Δ)`, picks the X set, Z set
//! and target, and receives the server's halves one by one. Tested
//! registers are measured jointly and both parties exchange their bits.
//! The client measures its half of the target along `σ_x` (outcome `s`),
//! and if the test passed the server lets its half evolve, reads it out
//! along `σ_y` and reports `o`. The client keeps `s ⊕ o`.
//!
//! The quantum plane is simulated centrally; each party only touches the
//! classical data it would have in a real run. Ground truth about the
//! registers lives behind [`crate::verify::TestVerdict::omniscient`].

mod messages;
mod parties;
mod round;
mod run;

pub use messages::{validate_transcript, Message, Party};
pub use parties::{Client, ClientPhase, Server, ServerPhase};
pub use round::{run_round, run_round_with, RoundOptions, RoundRecord, ServerView};
pub use run::{
    accepted_targets, client_estimate, estimate_from_bits, marginal_server_estimate, run_protocol,
    run_protocol_with, server_estimate, AbortPolicy, RunOptions, RunRecord, ServerRunView, MIN_SLOPE,
};
