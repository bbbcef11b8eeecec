//! Serialized artifacts: the qubit file representation, transcript files,
//! and attack report files.
//!
//! Everything is pretty-printed JSON with a trailing newline and shortest
//! round-trip decimals for amplitudes, so a rerun with the same config and
//! seed writes byte-identical files. Each file embeds the config it was
//! produced from, together with a digest of that config, making it
//! self-contained.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::config::RunConfigFile;
use super::CliError;
use crate::protocol::{SessionTranscript, TranscriptEvent, Verdict};
use crate::qubit::{Qubit, QubitSeq, StateLabel};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// One qubit in a file: its label when the amplitudes are exactly one of
/// the four standard states, else the amplitudes as two [re, im] pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum QubitRepr {
    Label(String),
    Amplitudes([[f64; 2]; 2]),
}

impl QubitRepr {
    pub fn from_qubit(q: &Qubit) -> QubitRepr {
        match q.exact_label() {
            Some(label) => QubitRepr::Label(label.symbol().to_string()),
            None => QubitRepr::Amplitudes([
                [q.alpha().re, q.alpha().im],
                [q.beta().re, q.beta().im],
            ]),
        }
    }

    pub fn to_qubit(&self) -> Result<Qubit, String> {
        match self {
            QubitRepr::Label(s) => s
                .parse::<StateLabel>()
                .map(Qubit::standard)
                .map_err(|e| e.to_string()),
            QubitRepr::Amplitudes([[ar, ai], [br, bi]]) => {
                Qubit::new(Complex64::new(*ar, *ai), Complex64::new(*br, *bi))
                    .map_err(|e| e.to_string())
            }
        }
    }
}

pub fn seq_repr(seq: &QubitSeq) -> Vec<QubitRepr> {
    seq.iter().map(QubitRepr::from_qubit).collect()
}

/// Pretty JSON plus a trailing newline: the canonical file encoding.
pub fn canonical_json<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("value serializes");
    text.push('\n');
    text
}

/// SHA-256 of the canonical encoding, as lowercase hex.
pub fn config_digest(cfg: &RunConfigFile) -> String {
    hex::encode(Sha256::digest(canonical_json(cfg).as_bytes()))
}

pub fn write_file(path: &str, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|source| CliError::WriteFile {
        path: path.to_string(),
        source,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FileHeader {
    pub tool_version: String,
    pub config_digest: String,
    pub seed: u64,
    pub config: RunConfigFile,
}

impl FileHeader {
    pub fn for_config(cfg: &RunConfigFile) -> FileHeader {
        FileHeader {
            tool_version: TOOL_VERSION.to_string(),
            config_digest: config_digest(cfg),
            seed: cfg.seed,
            config: cfg.clone(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EventRecord {
    pub step: String,
    pub party: String,
    pub action: String,
    pub outcome: String,
    pub detail: String,
}

impl EventRecord {
    fn from_event(event: &TranscriptEvent) -> EventRecord {
        EventRecord {
            step: event.step.clone(),
            party: event.party.to_string(),
            action: event.action.clone(),
            outcome: event.outcome.clone(),
            detail: event.detail.clone(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvidenceRecord {
    pub n: usize,
    pub qubits: Vec<QubitRepr>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerdictRecord {
    pub accepted: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub evidence: Option<EvidenceRecord>,
}

impl VerdictRecord {
    pub fn from_verdict(verdict: &Verdict) -> VerdictRecord {
        VerdictRecord {
            accepted: verdict.accepted(),
            reason: verdict.reason().map(|r| r.to_string()),
            evidence: verdict.evidence().map(|ct| EvidenceRecord {
                n: ct.n(),
                qubits: seq_repr(ct.seq()),
            }),
        }
    }
}

/// One honest session, persisted.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TranscriptFile {
    pub header: FileHeader,
    pub events: Vec<EventRecord>,
    pub verdict: VerdictRecord,
}

impl TranscriptFile {
    pub fn build(
        cfg: &RunConfigFile,
        verdict: &Verdict,
        transcript: &SessionTranscript,
    ) -> TranscriptFile {
        TranscriptFile {
            header: FileHeader::for_config(cfg),
            events: transcript.events().iter().map(EventRecord::from_event).collect(),
            verdict: VerdictRecord::from_verdict(verdict),
        }
    }
}

/// How often each verdict or stage failure occurred across trials.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OutcomeCount {
    pub outcome: String,
    pub count: u64,
}

/// One attack run (possibly many trials), persisted.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AttackReportFile {
    pub header: FileHeader,
    pub ops_spec: String,
    pub trials: u64,
    pub success_count: u64,
    pub success_rate: f64,
    /// Positions located in the first trial.
    pub located_positions: Vec<usize>,
    /// The plan's message positions, included only when asked for; the
    /// attack itself never sees them.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected_positions: Option<Vec<usize>>,
    /// The message forged in the first trial.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub forged_message: Option<Vec<QubitRepr>>,
    pub outcomes: Vec<OutcomeCount>,
}
