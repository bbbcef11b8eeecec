//! Property tests for the invariants the components promise: cipher round
//! trips, plan structure, key-only schedule dependence, localization
//! exactness, forgery soundness, one-sided fingerprinting, and replay
//! determinism.

use num_complex::Complex64;
use proptest::prelude::*;

use aqs_sim::attack;
use aqs_sim::dqotp::{self, DecoyLoop, SecretKey};
use aqs_sim::protocol::{run_session, SessionConfig};
use aqs_sim::qubit::{swap_test_compare, Comparator, Qubit, QubitSeq, SeededRng, StateLabel, Unitary2};

fn key_strategy(max_half: usize) -> impl Strategy<Value = SecretKey> {
    (1..=max_half)
        .prop_flat_map(|half| proptest::collection::vec(any::<bool>(), half * 2))
        .prop_filter("key must contain a one bit", |bits| bits.iter().any(|&b| b))
        .prop_map(|bits| SecretKey::from_bits(bits).unwrap())
}

fn label_strategy() -> impl Strategy<Value = StateLabel> {
    prop_oneof![
        Just(StateLabel::Zero),
        Just(StateLabel::One),
        Just(StateLabel::Plus),
        Just(StateLabel::Minus),
    ]
}

// arbitrary pure states, not just the four standard ones
fn qubit_strategy() -> impl Strategy<Value = Qubit> {
    (
        0.0..std::f64::consts::FRAC_PI_2,
        0.0..std::f64::consts::TAU,
        0.0..std::f64::consts::TAU,
    )
        .prop_map(|(theta, phi_a, phi_b)| {
            Qubit::new(
                Complex64::from_polar(theta.cos(), phi_a),
                Complex64::from_polar(theta.sin(), phi_b),
            )
            .unwrap()
        })
}

fn message_strategy(max_len: usize) -> impl Strategy<Value = QubitSeq> {
    proptest::collection::vec(qubit_strategy(), 1..=max_len).prop_map(QubitSeq::new)
}

proptest! {
    #[test]
    fn cipher_round_trip_preserves_any_message(
        key in key_strategy(8),
        message in message_strategy(16),
        seed in any::<u64>(),
    ) {
        let decoy_loop = DecoyLoop::standard();
        let ciphertext = dqotp::encrypt(&key, &message, &decoy_loop).unwrap();
        let mut rng = SeededRng::new(seed);
        let recovered = dqotp::decrypt(&key, ciphertext, &decoy_loop, &mut rng).unwrap();
        prop_assert_eq!(recovered.len(), message.len());
        for (orig, back) in message.iter().zip(recovered.iter()) {
            prop_assert!(orig.fidelity(back) >= 1.0 - 1e-9);
        }
    }

    #[test]
    fn plan_positions_partition_the_ciphertext(
        key in key_strategy(8),
        n in 1usize..=16,
    ) {
        let plan = dqotp::derive_plan(&key, n, &DecoyLoop::standard()).unwrap();
        let mut seen = vec![false; plan.total_len()];
        for &(pos, _) in plan.decoy_slots() {
            prop_assert!(pos >= 1 && pos <= plan.total_len());
            prop_assert!(!seen[pos - 1], "decoy slot {} repeated", pos);
            seen[pos - 1] = true;
        }
        for &pos in plan.message_positions() {
            prop_assert!(pos >= 1 && pos <= plan.total_len());
            prop_assert!(!seen[pos - 1], "position {} assigned twice", pos);
            seen[pos - 1] = true;
        }
        prop_assert!(seen.iter().all(|&s| s));
        prop_assert_eq!(plan.message_positions().len(), n);
        // positions are reported in ascending order
        prop_assert!(plan.message_positions().windows(2).all(|w| w[0] < w[1]));
        prop_assert!(plan.decoy_slots().windows(2).all(|w| w[0].0 < w[1].0));
    }

    #[test]
    fn schedule_and_plan_ignore_the_message(
        key in key_strategy(8),
        a in proptest::collection::vec(label_strategy(), 1..=12),
        b in proptest::collection::vec(label_strategy(), 1..=12),
    ) {
        let n = a.len().min(b.len());
        let decoy_loop = DecoyLoop::standard();
        let plan = dqotp::derive_plan(&key, n, &decoy_loop).unwrap();
        let ct_a = dqotp::encrypt(&key, &QubitSeq::from_labels(&a[..n]), &decoy_loop).unwrap();
        let ct_b = dqotp::encrypt(&key, &QubitSeq::from_labels(&b[..n]), &decoy_loop).unwrap();
        // the decoy content of every ciphertext under one key is identical
        for &(pos, label) in plan.decoy_slots() {
            let qa = ct_a.seq().get(pos - 1).unwrap();
            let qb = ct_b.seq().get(pos - 1).unwrap();
            prop_assert_eq!(qa.exact_label(), Some(label));
            prop_assert_eq!(qb.exact_label(), Some(label));
        }
    }

    #[test]
    fn localization_recovers_exactly_the_plan_positions(
        key in key_strategy(6),
        n in 1usize..=12,
        seed in any::<u64>(),
    ) {
        let decoy_loop = DecoyLoop::standard();
        let cfg = SessionConfig {
            n,
            key_a: key,
            key_b: SecretKey::from_bits(vec![true; 32]).unwrap(),
            decoy_loop: decoy_loop.clone(),
            comparator: Comparator::ideal(1e-9).unwrap(),
            seed,
        };
        prop_assume!(cfg.key_a.len() >= SessionConfig::min_key_a_len(n));
        let chosen = [
            QubitSeq::from_labels(&vec![StateLabel::Zero; n]),
            QubitSeq::from_labels(&vec![StateLabel::One; n]),
        ];
        let pairs = attack::harvest(&cfg, &chosen).unwrap();
        let mut rng = SeededRng::new(seed);
        let report = attack::locate_message_positions(&pairs, cfg.comparator, &mut rng).unwrap();
        let plan = dqotp::derive_plan(&cfg.key_a, n, &decoy_loop).unwrap();
        prop_assert_eq!(report.differing(), plan.message_positions());
        prop_assert!(report.complete());
    }

    #[test]
    fn any_single_op_forgery_is_accepted(
        rank in 1usize..=4,
        gate_index in 0usize..4,
        seed in any::<u64>(),
    ) {
        let cfg = aqs_sim::fixture::session_config();
        let gate = [
            Unitary2::pauli_x(),
            Unitary2::pauli_z(),
            Unitary2::hadamard(),
            Unitary2::identity(),
        ][gate_index];
        let chosen = [aqs_sim::fixture::message_zeros(), aqs_sim::fixture::message_ones()];
        let mut rng = SeededRng::new(seed);
        let report = attack::demonstrate(&cfg, &chosen, &[(rank, gate)], &mut rng);
        prop_assert!(report.succeeded());
    }

    #[test]
    fn swap_test_never_rejects_equal_states(
        q in qubit_strategy(),
        m in 1u32..=10,
        seed in any::<u64>(),
    ) {
        let copy = q;
        let mut rng = SeededRng::new(seed);
        prop_assert!(swap_test_compare(&q, &copy, m, &mut rng));
    }

    #[test]
    fn key_length_bounds_decide_validity(
        n in 1usize..=16,
        half_a in 1usize..=12,
        half_b in 1usize..=12,
    ) {
        let cfg = SessionConfig {
            n,
            key_a: SecretKey::from_bits(vec![true; half_a * 2]).unwrap(),
            key_b: SecretKey::from_bits(vec![true; half_b * 2]).unwrap(),
            decoy_loop: DecoyLoop::standard(),
            comparator: Comparator::ideal(1e-9).unwrap(),
            seed: 0,
        };
        let valid = half_a * 2 >= SessionConfig::min_key_a_len(n)
            && half_b * 2 >= SessionConfig::min_key_b_len(n, half_a * 2);
        prop_assert_eq!(cfg.validate().is_ok(), valid);
    }

    #[test]
    fn sessions_replay_identically(
        seed in any::<u64>(),
        m in 1u32..=3,
        labels in proptest::collection::vec(label_strategy(), 4),
    ) {
        let mut cfg = aqs_sim::fixture::session_config();
        cfg.seed = seed;
        cfg.comparator = Comparator::swap_test(m).unwrap();
        let message = QubitSeq::from_labels(&labels);
        let first = run_session(&cfg, &message).unwrap();
        let second = run_session(&cfg, &message).unwrap();
        prop_assert_eq!(first, second);
    }
}
