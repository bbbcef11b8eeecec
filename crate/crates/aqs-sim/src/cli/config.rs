//! Run configuration files.
//!
//! A config is one JSON object naming the message length, both keys, the
//! message (compact basis string or explicit amplitudes), the decoy loop,
//! the comparator model, and the seed. [`RunConfigFile::build`] turns it
//! into a validated [`SessionConfig`] plus the message register, failing
//! with an error that names the offending field.

use serde::{Deserialize, Serialize};

use super::files::QubitRepr;
use super::CliError;
use crate::dqotp::DecoyLoop;
use crate::fixture;
use crate::protocol::SessionConfig;
use crate::qubit::{Comparator, QubitSeq, StateLabel};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfigFile {
    pub n: usize,
    pub key_a: String,
    pub key_b: String,
    pub message: MessageSpec,
    pub r_loop: Vec<String>,
    pub comparator: ComparatorSpec,
    pub seed: u64,
}

/// The message as either a basis string (`"01+-"`) or per-qubit states.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MessageSpec {
    Basis(String),
    Qubits(Vec<QubitRepr>),
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ComparatorSpec {
    Ideal { epsilon: f64 },
    Swap { m: u32 },
}

impl RunConfigFile {
    pub fn load(path: &str) -> Result<RunConfigFile, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Read {
            path: path.to_string(),
            source,
        })?;
        serde_json::from_str(&text).map_err(|source| CliError::Parse {
            path: path.to_string(),
            source,
        })
    }

    /// The built-in worked configuration (all-zeros message, ideal
    /// comparator), used when a command is run without a config file.
    pub fn builtin() -> RunConfigFile {
        RunConfigFile {
            n: fixture::N,
            key_a: fixture::KEY_A.to_string(),
            key_b: fixture::KEY_B.to_string(),
            message: MessageSpec::Basis(fixture::MESSAGE_ZEROS.to_string()),
            r_loop: vec!["0".to_string(), "1".to_string(), "+".to_string()],
            comparator: ComparatorSpec::Ideal { epsilon: 1e-9 },
            seed: fixture::DEFAULT_SEED,
        }
    }

    pub fn build(&self) -> Result<(SessionConfig, QubitSeq), CliError> {
        let key_a = self.key_a.parse().map_err(|e| CliError::Field {
            field: "key_a",
            message: format!("{e}"),
        })?;
        let key_b = self.key_b.parse().map_err(|e| CliError::Field {
            field: "key_b",
            message: format!("{e}"),
        })?;

        let labels = self
            .r_loop
            .iter()
            .map(|s| s.parse::<StateLabel>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| CliError::Field {
                field: "r_loop",
                message: format!("{e}"),
            })?;
        let decoy_loop = DecoyLoop::new(labels).map_err(|e| CliError::Field {
            field: "r_loop",
            message: format!("{e}"),
        })?;

        let message = match &self.message {
            MessageSpec::Basis(s) => QubitSeq::parse_basis_str(s).map_err(|e| CliError::Field {
                field: "message",
                message: format!("{e}"),
            })?,
            MessageSpec::Qubits(reprs) => QubitSeq::new(
                reprs
                    .iter()
                    .map(|r| r.to_qubit())
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|e| CliError::Field {
                        field: "message",
                        message: format!("{e}"),
                    })?,
            ),
        };
        if message.len() != self.n {
            return Err(CliError::Field {
                field: "message",
                message: format!("has {} qubits but n = {}", message.len(), self.n),
            });
        }

        let comparator = match self.comparator {
            ComparatorSpec::Ideal { epsilon } => Comparator::ideal(epsilon),
            ComparatorSpec::Swap { m } => Comparator::swap_test(m),
        }
        .map_err(|e| CliError::Field {
            field: "comparator",
            message: format!("{e}"),
        })?;

        let cfg = SessionConfig {
            n: self.n,
            key_a,
            key_b,
            decoy_loop,
            comparator,
            seed: self.seed,
        };
        cfg.validate()
            .map_err(|e| CliError::Invalid(e.to_string()))?;
        Ok((cfg, message))
    }
}
