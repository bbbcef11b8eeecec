//! The canonical four-qubit configuration used by the demo command, the
//! examples, and the golden tests: key `1011`, a three-state decoy loop,
//! and the all-zeros / all-ones message pair.
//!
//! Every value a run of this configuration must reproduce is pinned here
//! as a constant, so the demo can check itself against them.

use crate::dqotp::{DecoyLoop, SecretKey};
use crate::protocol::SessionConfig;
use crate::qubit::{Comparator, QubitSeq, StateLabel};

pub const N: usize = 4;
pub const KEY_A: &str = "1011";
pub const KEY_B: &str = "110100";
pub const MESSAGE_ZEROS: &str = "0000";
pub const MESSAGE_ONES: &str = "1111";
pub const DEFAULT_SEED: u64 = 7;

/// Render of the key's split tree.
pub const TREE_RENDER: &str = "(10; 1, 0 \u{b7} 11; 1, 1)";
/// Render of the decimal schedule derived from the tree.
pub const SCHEDULE_RENDER: &str = "(2; 1 \u{b7} 3; 1)";
/// Signature labels for the all-zeros message.
pub const SIGNATURE_ZEROS: &str = "1000+000";
/// Signature labels for the all-ones message.
pub const SIGNATURE_ONES: &str = "1101+110";
/// Decoy slots of the derived plan, as (1-based position, state).
pub const DECOY_SLOTS: [(usize, StateLabel); 4] = [
    (1, StateLabel::One),
    (3, StateLabel::Zero),
    (5, StateLabel::Plus),
    (8, StateLabel::Zero),
];
/// The plan's message positions; also the positions the attack locates.
pub const MESSAGE_POSITIONS: [usize; 4] = [2, 4, 6, 7];

pub fn key_a() -> SecretKey {
    KEY_A.parse().expect("pinned key is valid")
}

pub fn key_b() -> SecretKey {
    KEY_B.parse().expect("pinned key is valid")
}

/// The three-state loop ("0", "1", "+").
pub fn decoy_loop() -> DecoyLoop {
    DecoyLoop::new(vec![StateLabel::Zero, StateLabel::One, StateLabel::Plus])
        .expect("pinned loop is non-empty")
}

pub fn message_zeros() -> QubitSeq {
    QubitSeq::parse_basis_str(MESSAGE_ZEROS).expect("pinned message is valid")
}

pub fn message_ones() -> QubitSeq {
    QubitSeq::parse_basis_str(MESSAGE_ONES).expect("pinned message is valid")
}

/// Full session configuration with an ideal comparator and a fixed seed.
pub fn session_config() -> SessionConfig {
    SessionConfig {
        n: N,
        key_a: key_a(),
        key_b: key_b(),
        decoy_loop: decoy_loop(),
        comparator: Comparator::ideal(1e-9).expect("pinned epsilon is valid"),
        seed: DEFAULT_SEED,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dqotp;

    #[test]
    fn pinned_values_are_consistent() {
        let cfg = session_config();
        assert!(cfg.validate().is_ok());

        let split = dqotp::split_key(&cfg.key_a, dqotp::choose_t(N));
        assert_eq!(split.render(), TREE_RENDER);
        let schedule = dqotp::to_decimal(&split);
        assert_eq!(schedule.render(), SCHEDULE_RENDER);

        let plan = dqotp::derive_plan(&cfg.key_a, N, &cfg.decoy_loop).unwrap();
        assert_eq!(plan.decoy_slots(), DECOY_SLOTS);
        assert_eq!(plan.message_positions(), MESSAGE_POSITIONS);

        let sig = |msg: &QubitSeq| {
            dqotp::encrypt(&cfg.key_a, msg, &cfg.decoy_loop)
                .unwrap()
                .seq()
                .exact_labels()
                .unwrap()
                .iter()
                .map(|l| l.symbol())
                .collect::<String>()
        };
        assert_eq!(sig(&message_zeros()), SIGNATURE_ZEROS);
        assert_eq!(sig(&message_ones()), SIGNATURE_ONES);
    }
}
