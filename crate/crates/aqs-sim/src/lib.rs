//! Simulator for an arbitrated quantum signature (AQS) scheme built on a
//! decoy-state quantum one-time pad, together with the chosen-message
//! forgery that breaks it.
//!
//! The scheme has three parties: Alice signs a quantum message, Bob
//! receives the signature, and a trusted arbitrator (Trent) mediates
//! verification. Signatures are produced by a cipher that interleaves
//! key-scheduled decoy qubits into the message; integrity comes from
//! measuring the decoys, never from transforming payload qubits. Because
//! the decoy positions depend only on the key, two signatures under one key
//! differ exactly at the message positions, so a malicious receiver can
//! harvest signatures on chosen messages, localize those positions by
//! position-wise state comparison, and rewrite message and signature
//! together with unitaries. The forged pair passes every check the
//! protocol defines.
//!
//! Modules:
//!
//! - [`qubit`]: exact single-qubit states, unitaries, seeded measurement,
//!   and the two fingerprinting-style comparators.
//! - [`dqotp`]: the decoy-state one-time pad (key split tree, decimal
//!   schedule, insertion plan, encrypt/decrypt).
//! - [`protocol`]: the three-party session as explicit state machines over
//!   a lossless in-process channel, with an auditable transcript.
//! - [`attack`]: signature harvesting, message-position localization, and
//!   the forgery driver.
//! - [`fixture`]: the canonical worked example used by the demo command
//!   and the golden tests.
//! - [`cli`]: config/transcript/report file formats and the five
//!   subcommands exposed by the `aqs-sim` binary.
//!
//! Every run is deterministic given its seed: all randomness flows through
//! [`qubit::SeededRng`], and serialized transcripts replay byte for byte.
//!
//! See the crate examples for runnable walkthroughs of each capability:
//!
//! ```bash
//! cargo run --example worked_example
//! cargo run --example cipher_roundtrip
//! cargo run --example honest_session
//! cargo run --example chosen_message_forgery
//! cargo run --example tamper_detection
//! cargo run --example swap_test_model
//! ```

pub mod attack;
pub mod cli;
pub mod dqotp;
pub mod fixture;
pub mod protocol;
pub mod qubit;

pub use dqotp::{Ciphertext, DecoyLoop, InsertionPlan, SecretKey};
pub use protocol::{RejectReason, SessionConfig, SessionTranscript, Verdict};
pub use qubit::{Basis, Comparator, Qubit, QubitSeq, SeededRng, StateLabel, Unitary2};
