//! The three-party signing protocol: Alice (signer), Bob (receiver), and
//! Trent (arbitrator) as explicit state machines exchanging typed messages
//! over a lossless in-process channel.
//!
//! A session runs three phases. Initialization provisions the pre-shared
//! keys and the decoy loop (key establishment itself is out of scope; keys
//! arrive via [`SessionConfig`]). Signing has Alice produce three copies of
//! the message and encrypt one into the signature. Verification routes the
//! signature through Bob and Trent: Bob checks the copies against each
//! other and escrows one under his own key, Trent strips and measures both
//! sets of decoys, compares the payloads, and returns a re-encrypted
//! signature nested under Bob's key, and Bob finally strips his decoys and
//! compares against the copy he retained.
//!
//! Honest parties never look at amplitudes. They act only through
//! encrypt/extract/measure/compare, and the [`SessionTranscript`] records
//! one event per protocol step with metadata only (lengths and counts,
//! never state). Every abort carries the step it happened at and a
//! [`RejectReason`].
//!
//! A [`ChannelTap`] may mutate quantum payloads in flight, which is how the
//! tamper experiments model an eavesdropper on the quantum channel.

use std::fmt;

use thiserror::Error;

use crate::dqotp::{self, Ciphertext, CipherError, DecoyLoop, SecretKey};
use crate::qubit::{Comparator, QubitSeq, SeededRng};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProtocolError {
    #[error("message must contain at least one qubit")]
    EmptyMessage,
    #[error("{party}'s key has {len} bits but the length bound requires at least {min}")]
    KeyTooShort { party: Party, len: usize, min: usize },
    #[error("message length {actual} does not match the configured length {expected}")]
    MessageLengthMismatch { expected: usize, actual: usize },
    #[error(transparent)]
    Cipher(#[from] CipherError),
}

/// Protocol participant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Party {
    Alice,
    Bob,
    Trent,
}

impl fmt::Display for Party {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Party::Alice => "Alice",
            Party::Bob => "Bob",
            Party::Trent => "Trent",
        })
    }
}

/// Everything a session needs: message length, the two pre-shared keys,
/// the decoy loop, the comparator model, and the seed for all randomness.
#[derive(Debug, Clone, PartialEq)]
pub struct SessionConfig {
    pub n: usize,
    pub key_a: SecretKey,
    pub key_b: SecretKey,
    pub decoy_loop: DecoyLoop,
    pub comparator: Comparator,
    pub seed: u64,
}

impl SessionConfig {
    /// Lower bound on Alice's key length: ceil(n/2) + 2.
    pub fn min_key_a_len(n: usize) -> usize {
        n.div_ceil(2) + 2
    }

    /// Lower bound on Bob's key length: ceil((n + L_A)/2) + 2.
    pub fn min_key_b_len(n: usize, key_a_len: usize) -> usize {
        (n + key_a_len).div_ceil(2) + 2
    }

    /// Checks the key-length bounds; sessions refuse to start otherwise.
    pub fn validate(&self) -> Result<(), ProtocolError> {
        if self.n == 0 {
            return Err(ProtocolError::EmptyMessage);
        }
        let min_a = Self::min_key_a_len(self.n);
        if self.key_a.len() < min_a {
            return Err(ProtocolError::KeyTooShort {
                party: Party::Alice,
                len: self.key_a.len(),
                min: min_a,
            });
        }
        let min_b = Self::min_key_b_len(self.n, self.key_a.len());
        if self.key_b.len() < min_b {
            return Err(ProtocolError::KeyTooShort {
                party: Party::Bob,
                len: self.key_b.len(),
                min: min_b,
            });
        }
        Ok(())
    }
}

/// What Alice sends in step S5: the signature plus two plaintext copies.
#[derive(Debug, Clone, PartialEq)]
pub struct SignatureBundle {
    pub signature: Ciphertext,
    pub copy1: QubitSeq,
    pub copy2: QubitSeq,
}

/// A message on the wire. The step label determines the payload shape.
#[derive(Debug, Clone, PartialEq)]
pub enum ProtocolMessage {
    /// Step S5, Alice to Bob.
    Delivery(SignatureBundle),
    /// Step V3, Bob to Trent: the signature together with Bob's escrow of
    /// the second copy under his own key.
    Arbitration { signature: Ciphertext, escrow: Ciphertext },
    /// Step V6, Trent to Bob: a fresh escrow of the payload and the
    /// signature re-encrypted under Bob's key. The nested ciphertext's
    /// declared length is the inner signature length, which Bob needs to
    /// rebuild his plan.
    Endorsement { escrow: Ciphertext, endorsed: Ciphertext },
}

impl ProtocolMessage {
    /// Protocol step that produces this message.
    pub fn step_label(&self) -> &'static str {
        match self {
            ProtocolMessage::Delivery(_) => "S5",
            ProtocolMessage::Arbitration { .. } => "V3",
            ProtocolMessage::Endorsement { .. } => "V6",
        }
    }
}

/// Why a session ended without an accepted signature.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RejectReason {
    EavesdropDetected,
    MessageMismatch,
    FingerprintMismatch,
    MalformedMessage,
}

impl fmt::Display for RejectReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RejectReason::EavesdropDetected => "EavesdropDetected",
            RejectReason::MessageMismatch => "MessageMismatch",
            RejectReason::FingerprintMismatch => "FingerprintMismatch",
            RejectReason::MalformedMessage => "MalformedMessage",
        })
    }
}

/// Final outcome of a session. Acceptance always carries the verified
/// signature as evidence.
#[derive(Debug, Clone, PartialEq)]
pub struct Verdict {
    accepted: bool,
    reason: Option<RejectReason>,
    evidence: Option<Ciphertext>,
}

impl Verdict {
    pub fn accept(evidence: Ciphertext) -> Verdict {
        Verdict {
            accepted: true,
            reason: None,
            evidence: Some(evidence),
        }
    }

    pub fn reject(reason: RejectReason) -> Verdict {
        Verdict {
            accepted: false,
            reason: Some(reason),
            evidence: None,
        }
    }

    pub fn accepted(&self) -> bool {
        self.accepted
    }

    pub fn reason(&self) -> Option<RejectReason> {
        self.reason
    }

    /// The retained signature, present exactly when accepted.
    pub fn evidence(&self) -> Option<&Ciphertext> {
        self.evidence.as_ref()
    }
}

/// An abort raised inside a party step, before it becomes a [`Verdict`].
#[derive(Debug, Clone, PartialEq)]
pub struct SessionAbort {
    pub step: &'static str,
    pub party: Party,
    pub reason: RejectReason,
}

impl SessionAbort {
    pub fn into_verdict(self) -> Verdict {
        Verdict::reject(self.reason)
    }
}

/// One protocol event: which step, who acted, what they did, how it ended,
/// and size metadata. Honest-party events never contain amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct TranscriptEvent {
    pub step: String,
    pub party: Party,
    pub action: String,
    pub outcome: String,
    pub detail: String,
}

/// Ordered log of everything that happened in a session.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SessionTranscript {
    events: Vec<TranscriptEvent>,
}

impl SessionTranscript {
    pub fn new() -> SessionTranscript {
        SessionTranscript::default()
    }

    pub fn events(&self) -> &[TranscriptEvent] {
        &self.events
    }

    fn record(&mut self, step: &str, party: Party, action: &str, detail: String) {
        self.events.push(TranscriptEvent {
            step: step.to_string(),
            party,
            action: action.to_string(),
            outcome: "ok".to_string(),
            detail,
        });
    }

    fn record_abort(&mut self, abort: &SessionAbort, action: &str) {
        self.events.push(TranscriptEvent {
            step: abort.step.to_string(),
            party: abort.party,
            action: action.to_string(),
            outcome: format!("abort:{}", abort.reason),
            detail: String::new(),
        });
    }
}

/// Signer state: holds the signing key and the loop.
#[derive(Debug, Clone)]
pub struct Alice {
    key: SecretKey,
    decoy_loop: DecoyLoop,
}

impl Alice {
    /// Signing phase. Three copies of the message are produced (the
    /// simulator clones the classical description; honest parties treat
    /// the copies as given), the third is encrypted into the signature,
    /// and the delivery bundle is assembled.
    pub fn sign(
        &self,
        message: &QubitSeq,
        transcript: &mut SessionTranscript,
    ) -> Result<SignatureBundle, ProtocolError> {
        let n = message.len();
        let copy1 = message.clone();
        let copy2 = message.clone();
        let copy3 = message.clone();
        transcript.record("S1", Party::Alice, "prepare-copies", format!("copies=3 n={n}"));

        let t = dqotp::choose_t(n);
        transcript.record("S2", Party::Alice, "split-key", format!("t={t}"));
        let plan = dqotp::derive_plan(&self.key, n, &self.decoy_loop)?;
        transcript.record(
            "S3",
            Party::Alice,
            "derive-schedule",
            format!("decoys={}", plan.decoy_count()),
        );

        let signature = dqotp::encrypt(&self.key, &copy3, &self.decoy_loop)?;
        transcript.record(
            "S4",
            Party::Alice,
            "encrypt-signature",
            format!("sig_len={}", signature.total_len()),
        );
        transcript.record(
            "S5",
            Party::Alice,
            "send-bundle",
            format!("sig_len={} copy_len={n}", signature.total_len()),
        );
        Ok(SignatureBundle {
            signature,
            copy1,
            copy2,
        })
    }
}

/// Receiver state. Keeps the first copy between the receive and finalize
/// steps of verification.
#[derive(Debug, Clone)]
pub struct Bob {
    key: SecretKey,
    decoy_loop: DecoyLoop,
    comparator: Comparator,
    n: usize,
    retained: Option<QubitSeq>,
}

impl Bob {
    /// Steps V1-V3: check the two plaintext copies against each other,
    /// escrow the second copy under Bob's key, retain the first, and pass
    /// signature and escrow on to the arbitrator.
    pub fn receive(
        &mut self,
        bundle: SignatureBundle,
        rng: &mut SeededRng,
        transcript: &mut SessionTranscript,
    ) -> Result<ProtocolMessage, SessionAbort> {
        let SignatureBundle {
            signature,
            copy1,
            copy2,
        } = bundle;
        if copy1.len() != self.n || copy2.len() != self.n || signature.n() != self.n {
            let abort = SessionAbort {
                step: "V1",
                party: Party::Bob,
                reason: RejectReason::MalformedMessage,
            };
            transcript.record_abort(&abort, "check-shape");
            return Err(abort);
        }

        let copies_equal = (0..self.n).all(|i| {
            self.comparator
                .states_equal(copy1.get(i).unwrap(), copy2.get(i).unwrap(), rng)
        });
        if !copies_equal {
            // negative comparison: abort and ask the signer to restart
            let abort = SessionAbort {
                step: "V1",
                party: Party::Bob,
                reason: RejectReason::FingerprintMismatch,
            };
            transcript.record_abort(&abort, "compare-copies");
            return Err(abort);
        }
        transcript.record("V1", Party::Bob, "compare-copies", format!("positions={}", self.n));

        let escrow = match dqotp::encrypt(&self.key, &copy2, &self.decoy_loop) {
            Ok(ct) => ct,
            Err(_) => {
                let abort = SessionAbort {
                    step: "V2",
                    party: Party::Bob,
                    reason: RejectReason::MalformedMessage,
                };
                transcript.record_abort(&abort, "escrow-copy");
                return Err(abort);
            }
        };
        transcript.record(
            "V2",
            Party::Bob,
            "escrow-copy",
            format!("escrow_len={}", escrow.total_len()),
        );

        self.retained = Some(copy1);
        transcript.record(
            "V3",
            Party::Bob,
            "send-arbitration",
            format!("sig_len={} escrow_len={}", signature.total_len(), escrow.total_len()),
        );
        Ok(ProtocolMessage::Arbitration { signature, escrow })
    }

    /// Steps V7-V8: strip and verify Bob's decoys from both parts of the
    /// endorsement, then compare the recovered payload against the retained
    /// copy. Acceptance keeps the recovered signature as evidence.
    pub fn finalize(
        &mut self,
        escrow: Ciphertext,
        endorsed: Ciphertext,
        rng: &mut SeededRng,
        transcript: &mut SessionTranscript,
    ) -> Verdict {
        let Some(retained) = self.retained.take() else {
            let abort = SessionAbort {
                step: "V7",
                party: Party::Bob,
                reason: RejectReason::MalformedMessage,
            };
            transcript.record_abort(&abort, "check-state");
            return abort.into_verdict();
        };

        if escrow.n() != self.n {
            let abort = SessionAbort {
                step: "V7",
                party: Party::Bob,
                reason: RejectReason::MalformedMessage,
            };
            transcript.record_abort(&abort, "check-shape");
            return abort.into_verdict();
        }
        let inner_len = endorsed.n();

        let stripped = dqotp::extract(&self.key, escrow, &self.decoy_loop)
            .and_then(|(escrow_decoys, payload)| {
                dqotp::verify_decoys(escrow_decoys, rng).map(|()| payload)
            });
        let payload2 = match stripped {
            Ok(payload) => payload,
            Err(err) => {
                let abort = SessionAbort {
                    step: "V7",
                    party: Party::Bob,
                    reason: reject_reason_for(&err),
                };
                transcript.record_abort(&abort, "verify-escrow-decoys");
                return abort.into_verdict();
            }
        };

        let recovered = dqotp::extract(&self.key, endorsed, &self.decoy_loop)
            .and_then(|(endorsed_decoys, inner)| {
                dqotp::verify_decoys(endorsed_decoys, rng).map(|()| inner)
            });
        let evidence = match recovered {
            Ok(inner) => Ciphertext::from_parts(inner, self.n),
            Err(err) => {
                let abort = SessionAbort {
                    step: "V7",
                    party: Party::Bob,
                    reason: reject_reason_for(&err),
                };
                transcript.record_abort(&abort, "verify-endorsed-decoys");
                return abort.into_verdict();
            }
        };
        transcript.record(
            "V7",
            Party::Bob,
            "strip-decoys",
            format!("payload_len={} evidence_len={inner_len}", payload2.len()),
        );

        let matches_retained = (0..self.n).all(|i| {
            self.comparator
                .states_equal(payload2.get(i).unwrap(), retained.get(i).unwrap(), rng)
        });
        if !matches_retained {
            let abort = SessionAbort {
                step: "V8",
                party: Party::Bob,
                reason: RejectReason::MessageMismatch,
            };
            transcript.record_abort(&abort, "compare-retained");
            return abort.into_verdict();
        }
        transcript.record("V8", Party::Bob, "accept-signature", format!("positions={}", self.n));
        Verdict::accept(evidence)
    }
}

/// Arbitrator state: holds both keys.
#[derive(Debug, Clone)]
pub struct Trent {
    key_a: SecretKey,
    key_b: SecretKey,
    decoy_loop: DecoyLoop,
    comparator: Comparator,
    n: usize,
}

impl Trent {
    /// Steps V4-V6: strip and measure the decoys of both incoming parts,
    /// compare the two recovered payloads, and return a fresh escrow plus
    /// the signature re-encrypted under Bob's key.
    pub fn verify(
        &self,
        msg: ProtocolMessage,
        rng: &mut SeededRng,
        transcript: &mut SessionTranscript,
    ) -> Result<ProtocolMessage, SessionAbort> {
        let ProtocolMessage::Arbitration { signature, escrow } = msg else {
            let abort = SessionAbort {
                step: "V4",
                party: Party::Trent,
                reason: RejectReason::MalformedMessage,
            };
            transcript.record_abort(&abort, "check-shape");
            return Err(abort);
        };
        if signature.n() != self.n || escrow.n() != self.n {
            let abort = SessionAbort {
                step: "V4",
                party: Party::Trent,
                reason: RejectReason::MalformedMessage,
            };
            transcript.record_abort(&abort, "check-shape");
            return Err(abort);
        }

        let extracted = dqotp::extract(&self.key_a, signature, &self.decoy_loop)
            .and_then(|sig| dqotp::extract(&self.key_b, escrow, &self.decoy_loop).map(|esc| (sig, esc)));
        let ((sig_decoys, payload3), (escrow_decoys, payload2)) = match extracted {
            Ok(parts) => parts,
            Err(err) => {
                let abort = SessionAbort {
                    step: "V4",
                    party: Party::Trent,
                    reason: reject_reason_for(&err),
                };
                transcript.record_abort(&abort, "extract-decoys");
                return Err(abort);
            }
        };
        transcript.record(
            "V4",
            Party::Trent,
            "extract-decoys",
            format!("sig_decoys={} escrow_decoys={}", sig_decoys.len(), escrow_decoys.len()),
        );

        if let Err(err) = dqotp::verify_decoys(sig_decoys, rng) {
            let abort = SessionAbort {
                step: "V5",
                party: Party::Trent,
                reason: reject_reason_for(&err),
            };
            transcript.record_abort(&abort, "verify-signature-decoys");
            return Err(abort);
        }
        if let Err(err) = dqotp::verify_decoys(escrow_decoys, rng) {
            let abort = SessionAbort {
                step: "V5",
                party: Party::Trent,
                reason: reject_reason_for(&err),
            };
            transcript.record_abort(&abort, "verify-escrow-decoys");
            return Err(abort);
        }

        let payloads_equal = payload3.len() == payload2.len()
            && (0..payload3.len()).all(|i| {
                self.comparator
                    .states_equal(payload3.get(i).unwrap(), payload2.get(i).unwrap(), rng)
            });
        if !payloads_equal {
            let abort = SessionAbort {
                step: "V5",
                party: Party::Trent,
                reason: RejectReason::MessageMismatch,
            };
            transcript.record_abort(&abort, "compare-payloads");
            return Err(abort);
        }
        transcript.record(
            "V5",
            Party::Trent,
            "verify-decoys-and-payloads",
            format!("positions={}", payload3.len()),
        );

        let rebuilt = dqotp::encrypt(&self.key_b, &payload2, &self.decoy_loop)
            .and_then(|escrow| {
                let inner = dqotp::encrypt(&self.key_a, &payload3, &self.decoy_loop)?;
                // the outer layer treats the whole inner ciphertext as its message
                let endorsed = dqotp::encrypt(&self.key_b, inner.seq(), &self.decoy_loop)?;
                Ok((escrow, endorsed))
            });
        let (new_escrow, endorsed) = match rebuilt {
            Ok(parts) => parts,
            Err(err) => {
                let abort = SessionAbort {
                    step: "V6",
                    party: Party::Trent,
                    reason: reject_reason_for(&err),
                };
                transcript.record_abort(&abort, "re-encrypt");
                return Err(abort);
            }
        };
        transcript.record(
            "V6",
            Party::Trent,
            "send-endorsement",
            format!(
                "escrow_len={} endorsed_len={} inner_len={}",
                new_escrow.total_len(),
                endorsed.total_len(),
                endorsed.n()
            ),
        );
        Ok(ProtocolMessage::Endorsement {
            escrow: new_escrow,
            endorsed,
        })
    }
}

fn reject_reason_for(err: &CipherError) -> RejectReason {
    match err {
        CipherError::EavesdropDetected { .. } => RejectReason::EavesdropDetected,
        _ => RejectReason::MalformedMessage,
    }
}

/// Hook invoked on every message in flight. Implementations may mutate the
/// quantum payloads; the channel itself is lossless.
pub trait ChannelTap {
    fn intercept(&mut self, msg: &mut ProtocolMessage, rng: &mut SeededRng);
}

/// The honest channel: delivers everything untouched.
#[derive(Debug, Clone, Copy, Default)]
pub struct LosslessChannel;

impl ChannelTap for LosslessChannel {
    fn intercept(&mut self, _msg: &mut ProtocolMessage, _rng: &mut SeededRng) {}
}

/// Initialization phase: validates the key-length bounds and hands each
/// party its state. Key distribution is modeled as direct provisioning.
pub fn init_session(cfg: &SessionConfig) -> Result<(Alice, Bob, Trent), ProtocolError> {
    cfg.validate()?;
    let alice = Alice {
        key: cfg.key_a.clone(),
        decoy_loop: cfg.decoy_loop.clone(),
    };
    let bob = Bob {
        key: cfg.key_b.clone(),
        decoy_loop: cfg.decoy_loop.clone(),
        comparator: cfg.comparator,
        n: cfg.n,
        retained: None,
    };
    let trent = Trent {
        key_a: cfg.key_a.clone(),
        key_b: cfg.key_b.clone(),
        decoy_loop: cfg.decoy_loop.clone(),
        comparator: cfg.comparator,
        n: cfg.n,
    };
    Ok((alice, bob, trent))
}

/// Runs a full honest session.
pub fn run_session(
    cfg: &SessionConfig,
    message: &QubitSeq,
) -> Result<(Verdict, SessionTranscript), ProtocolError> {
    run_session_with(cfg, message, &mut LosslessChannel)
}

/// Runs a full session with a channel tap on every leg. Configuration
/// problems surface as errors; anything that goes wrong inside the
/// protocol becomes a rejecting verdict with its reason, and the
/// transcript records the aborting step.
pub fn run_session_with(
    cfg: &SessionConfig,
    message: &QubitSeq,
    tap: &mut dyn ChannelTap,
) -> Result<(Verdict, SessionTranscript), ProtocolError> {
    if message.len() != cfg.n {
        return Err(ProtocolError::MessageLengthMismatch {
            expected: cfg.n,
            actual: message.len(),
        });
    }
    let (alice, mut bob, trent) = init_session(cfg)?;

    let mut transcript = SessionTranscript::new();
    let mut rng = SeededRng::new(cfg.seed);
    transcript.record(
        "I1",
        Party::Trent,
        "provision-keys",
        format!("l_a={} l_b={} n={}", cfg.key_a.len(), cfg.key_b.len(), cfg.n),
    );
    transcript.record(
        "I2",
        Party::Trent,
        "agree-loop",
        format!("loop={}", cfg.decoy_loop),
    );

    let bundle = match alice.sign(message, &mut transcript) {
        Ok(bundle) => bundle,
        Err(_) => {
            let abort = SessionAbort {
                step: "S4",
                party: Party::Alice,
                reason: RejectReason::MalformedMessage,
            };
            transcript.record_abort(&abort, "encrypt-signature");
            return Ok((abort.into_verdict(), transcript));
        }
    };

    let mut msg = ProtocolMessage::Delivery(bundle);
    tap.intercept(&mut msg, &mut rng);
    let ProtocolMessage::Delivery(bundle) = msg else {
        let abort = SessionAbort {
            step: "V1",
            party: Party::Bob,
            reason: RejectReason::MalformedMessage,
        };
        transcript.record_abort(&abort, "check-shape");
        return Ok((abort.into_verdict(), transcript));
    };

    let mut msg = match bob.receive(bundle, &mut rng, &mut transcript) {
        Ok(msg) => msg,
        Err(abort) => return Ok((abort.into_verdict(), transcript)),
    };
    tap.intercept(&mut msg, &mut rng);

    let mut msg = match trent.verify(msg, &mut rng, &mut transcript) {
        Ok(msg) => msg,
        Err(abort) => return Ok((abort.into_verdict(), transcript)),
    };
    tap.intercept(&mut msg, &mut rng);
    let ProtocolMessage::Endorsement { escrow, endorsed } = msg else {
        let abort = SessionAbort {
            step: "V7",
            party: Party::Bob,
            reason: RejectReason::MalformedMessage,
        };
        transcript.record_abort(&abort, "check-shape");
        return Ok((abort.into_verdict(), transcript));
    };

    let verdict = bob.finalize(escrow, endorsed, &mut rng, &mut transcript);
    Ok((verdict, transcript))
}
