//! The chosen-message forgery.
//!
//! The cipher always weaves decoys into the same positions for a given
//! key, so a receiver who collects signatures on several chosen messages
//! under one key can compare them position by position: decoy positions
//! carry identical states in every signature, message positions carry the
//! chosen qubits. Once all message positions are located, any unitary
//! applied jointly to a signature qubit and the matching qubit of both
//! plaintext copies yields a perfectly consistent bundle for a message that
//! was never signed, and the genuine verification phase accepts it.
//!
//! The attacker here plays by the rules of the model: [`harvest`],
//! [`locate_message_positions`], and [`forge`] touch only data the
//! receiver legitimately holds (bundles, his own key, the comparator).
//! Neither the signing key nor the insertion plan is ever consulted.

use thiserror::Error;

use crate::protocol::{
    init_session, ProtocolError, ProtocolMessage, SessionAbort, SessionConfig, SessionTranscript,
    SignatureBundle, Verdict,
};
use crate::qubit::{Comparator, QubitSeq, SeededRng, Unitary2};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AttackError {
    #[error("localization needs at least two harvested signatures, have {have}")]
    NotEnoughSignatures { have: usize },
    #[error("harvested signatures differ in length ({first} vs {other})")]
    SignatureLengthMismatch { first: usize, other: usize },
    #[error("cannot forge: located {found} positions but the message has {n} qubits")]
    IncompleteLocalization { found: usize, n: usize },
    #[error("rank {rank} is outside 1..={n}")]
    RankOutOfRange { rank: usize, n: usize },
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
}

/// A chosen message together with the delivery bundle Alice produced for it.
#[derive(Debug, Clone, PartialEq)]
pub struct HarvestedPair {
    pub session: usize,
    pub message: QubitSeq,
    pub bundle: SignatureBundle,
}

/// Outcome of comparing harvested signatures position by position.
#[derive(Debug, Clone, PartialEq)]
pub struct PositionDiffReport {
    compared_len: usize,
    differing: Vec<usize>,
    complete: bool,
}

impl PositionDiffReport {
    pub fn compared_len(&self) -> usize {
        self.compared_len
    }

    /// Sorted 1-based signature positions where some pair differed.
    pub fn differing(&self) -> &[usize] {
        &self.differing
    }

    /// True when every message qubit was located, i.e. the number of
    /// differing positions equals the message length.
    pub fn complete(&self) -> bool {
        self.complete
    }

    /// Maps a 1-based message rank to its absolute signature position.
    pub fn position_for_rank(&self, rank: usize) -> Option<usize> {
        rank.checked_sub(1).and_then(|i| self.differing.get(i)).copied()
    }
}

/// A delivery bundle rewritten for a message the signer never saw.
#[derive(Debug, Clone, PartialEq)]
pub struct ForgedBundle {
    pub forged_message: QubitSeq,
    pub bundle: SignatureBundle,
    /// Absolute signature positions and the unitaries applied there.
    pub applied_ops: Vec<(usize, Unitary2)>,
}

/// Everything a demonstration run learned, stage failures included.
#[derive(Debug, Clone, PartialEq)]
pub struct AttackReport {
    pub harvested: usize,
    pub diff: Option<PositionDiffReport>,
    pub forged_message: Option<QubitSeq>,
    pub applied_positions: Vec<usize>,
    pub verdict: Option<Verdict>,
    pub failure: Option<String>,
}

impl AttackReport {
    /// The forgery counts as a success only if verification accepted it.
    pub fn succeeded(&self) -> bool {
        self.verdict.as_ref().is_some_and(Verdict::accepted)
    }
}

/// Signing-phase oracle: Alice signs every chosen message under the same
/// key, and the receiver keeps the bundles instead of finishing
/// verification.
pub fn harvest(
    cfg: &SessionConfig,
    chosen: &[QubitSeq],
) -> Result<Vec<HarvestedPair>, AttackError> {
    let (alice, _, _) = init_session(cfg)?;
    let mut scratch = SessionTranscript::new();
    let mut pairs = Vec::with_capacity(chosen.len());
    for (session, message) in chosen.iter().enumerate() {
        if message.len() != cfg.n {
            return Err(ProtocolError::MessageLengthMismatch {
                expected: cfg.n,
                actual: message.len(),
            }
            .into());
        }
        let bundle = alice.sign(message, &mut scratch).map_err(AttackError::from)?;
        pairs.push(HarvestedPair {
            session,
            message: message.clone(),
            bundle,
        });
    }
    Ok(pairs)
}

/// Compares every pair of harvested signatures position by position and
/// collects the positions where the comparator reports a difference.
/// Decoy positions repeat the same state in every signature and never
/// land in the set; a message position is found as soon as two chosen
/// messages differ there.
pub fn locate_message_positions(
    pairs: &[HarvestedPair],
    comparator: Comparator,
    rng: &mut SeededRng,
) -> Result<PositionDiffReport, AttackError> {
    if pairs.len() < 2 {
        return Err(AttackError::NotEnoughSignatures { have: pairs.len() });
    }
    let compared_len = pairs[0].bundle.signature.total_len();
    for pair in &pairs[1..] {
        let other = pair.bundle.signature.total_len();
        if other != compared_len {
            return Err(AttackError::SignatureLengthMismatch {
                first: compared_len,
                other,
            });
        }
    }

    let n = pairs[0].message.len();
    let mut differing = Vec::new();
    for pos in 1..=compared_len {
        let found = pairs.iter().enumerate().any(|(i, a)| {
            pairs[i + 1..].iter().any(|b| {
                let qa = a.bundle.signature.seq().get(pos - 1).unwrap();
                let qb = b.bundle.signature.seq().get(pos - 1).unwrap();
                !comparator.states_equal(qa, qb, rng)
            })
        });
        if found {
            differing.push(pos);
        }
    }
    let complete = differing.len() == n;
    Ok(PositionDiffReport {
        compared_len,
        differing,
        complete,
    })
}

/// Rewrites a harvested bundle into a forgery. Each `(rank, unitary)` op
/// picks the rank-th located position (ascending; the cipher keeps message
/// order, so rank k is the k-th message qubit) and applies the unitary to
/// the signature qubit there and to qubit k of both plaintext copies.
/// Decoy slots are never touched, so every check the verifiers run still
/// passes.
pub fn forge(
    valid: &HarvestedPair,
    report: &PositionDiffReport,
    ops: &[(usize, Unitary2)],
) -> Result<ForgedBundle, AttackError> {
    let n = valid.message.len();
    if !report.complete() {
        return Err(AttackError::IncompleteLocalization {
            found: report.differing().len(),
            n,
        });
    }
    let mut bundle = valid.bundle.clone();
    let mut forged_message = valid.message.clone();
    let mut applied_ops = Vec::with_capacity(ops.len());
    for &(rank, u) in ops {
        let Some(position) = report.position_for_rank(rank).filter(|_| rank <= n) else {
            return Err(AttackError::RankOutOfRange { rank, n });
        };
        bundle.signature.seq_mut().apply_unitary_at(position - 1, &u);
        bundle.copy1.apply_unitary_at(rank - 1, &u);
        bundle.copy2.apply_unitary_at(rank - 1, &u);
        forged_message.apply_unitary_at(rank - 1, &u);
        applied_ops.push((position, u));
    }
    Ok(ForgedBundle {
        forged_message,
        bundle,
        applied_ops,
    })
}

/// Runs the verification phase (receive, arbitrate, finalize) on an
/// arbitrary delivery bundle with genuine parties.
pub fn run_verification(
    cfg: &SessionConfig,
    bundle: SignatureBundle,
    rng: &mut SeededRng,
) -> Result<(Verdict, SessionTranscript), ProtocolError> {
    let (_, mut bob, trent) = init_session(cfg)?;
    let mut transcript = SessionTranscript::new();
    let abort = |abort: SessionAbort, transcript: SessionTranscript| {
        Ok((abort.into_verdict(), transcript))
    };
    let msg = match bob.receive(bundle, rng, &mut transcript) {
        Ok(msg) => msg,
        Err(a) => return abort(a, transcript),
    };
    let msg = match trent.verify(msg, rng, &mut transcript) {
        Ok(msg) => msg,
        Err(a) => return abort(a, transcript),
    };
    let ProtocolMessage::Endorsement { escrow, endorsed } = msg else {
        unreachable!("verify returns an endorsement");
    };
    let verdict = bob.finalize(escrow, endorsed, rng, &mut transcript);
    Ok((verdict, transcript))
}

/// The full attack: harvest signatures on the chosen messages, locate the
/// message positions, forge with the given ops, and push the forgery
/// through genuine verification. Stage failures end up in the report
/// rather than aborting the run.
pub fn demonstrate(
    cfg: &SessionConfig,
    chosen: &[QubitSeq],
    ops: &[(usize, Unitary2)],
    rng: &mut SeededRng,
) -> AttackReport {
    let mut report = AttackReport {
        harvested: 0,
        diff: None,
        forged_message: None,
        applied_positions: Vec::new(),
        verdict: None,
        failure: None,
    };

    let pairs = match harvest(cfg, chosen) {
        Ok(pairs) => pairs,
        Err(err) => {
            report.failure = Some(err.to_string());
            return report;
        }
    };
    report.harvested = pairs.len();

    let diff = match locate_message_positions(&pairs, cfg.comparator, rng) {
        Ok(diff) => diff,
        Err(err) => {
            report.failure = Some(err.to_string());
            return report;
        }
    };
    report.diff = Some(diff.clone());

    let forged = match forge(&pairs[0], &diff, ops) {
        Ok(forged) => forged,
        Err(err) => {
            report.failure = Some(err.to_string());
            return report;
        }
    };
    report.forged_message = Some(forged.forged_message.clone());
    report.applied_positions = forged.applied_ops.iter().map(|&(pos, _)| pos).collect();

    match run_verification(cfg, forged.bundle, rng) {
        Ok((verdict, _)) => report.verdict = Some(verdict),
        Err(err) => report.failure = Some(err.to_string()),
    }
    report
}
