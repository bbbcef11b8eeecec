// Usage: cargo run --example tamper_detection
//
// What the decoy check catches and what it cannot. An eavesdropper on the
// quantum channel who touches a decoy is caught at the Born-rule rate,
// shown here both through a full protocol session (via a channel tap) and
// at the cipher layer. An eavesdropper who touches only message positions
// of the ciphertext is never caught by the decoy check; that asymmetry is
// exactly what the forgery exploits.

use aqs_sim::dqotp::{self, CipherError};
use aqs_sim::protocol::{run_session_with, ChannelTap, ProtocolMessage, RejectReason};
use aqs_sim::qubit::{Qubit, SeededRng, StateLabel, Unitary2};
use aqs_sim::fixture;

// applies Z to the |+> decoy of the signature while it travels to Bob
struct PhaseFlipOnPlusDecoy;

impl ChannelTap for PhaseFlipOnPlusDecoy {
    fn intercept(&mut self, msg: &mut ProtocolMessage, _rng: &mut SeededRng) {
        if let ProtocolMessage::Delivery(bundle) = msg {
            let plus_pos = fixture::DECOY_SLOTS
                .iter()
                .find(|(_, label)| *label == StateLabel::Plus)
                .map(|&(pos, _)| pos)
                .unwrap();
            bundle
                .signature
                .seq_mut()
                .apply_unitary_at(plus_pos - 1, &Unitary2::pauli_z());
        }
    }
}

fn main() {
    let cfg = fixture::session_config();
    let message = fixture::message_zeros();

    // Z turns |+> into |->, an orthogonal state, so Trent's measurement
    // of that decoy fails with certainty
    let runs = 100;
    let mut rejected = 0;
    for seed in 0..runs {
        let mut cfg = cfg.clone();
        cfg.seed = seed;
        let (verdict, _) = run_session_with(&cfg, &message, &mut PhaseFlipOnPlusDecoy).unwrap();
        assert_eq!(verdict.reason(), Some(RejectReason::EavesdropDetected));
        rejected += 1;
    }
    println!("Z on the |+\u{27e9} decoy: {rejected}/{runs} sessions rejected");

    // H moves each fixture decoy state halfway out of its basis, so each
    // slot is caught with probability 1/2
    let plan = dqotp::derive_plan(&cfg.key_a, cfg.n, &cfg.decoy_loop).unwrap();
    let trials = 10_000;
    let mut detected = 0;
    for trial in 0..trials {
        let mut rng = SeededRng::for_trial(1, trial);
        let mut ct = dqotp::encrypt(&cfg.key_a, &message, &cfg.decoy_loop).unwrap();
        let &(pos, _) = &plan.decoy_slots()[rng.pick(plan.decoy_slots().len())];
        ct.seq_mut().apply_unitary_at(pos - 1, &Unitary2::hadamard());
        if matches!(
            dqotp::decrypt(&cfg.key_a, ct, &cfg.decoy_loop, &mut rng),
            Err(CipherError::EavesdropDetected { .. })
        ) {
            detected += 1;
        }
    }
    let analytic: f64 = plan
        .decoy_slots()
        .iter()
        .map(|&(_, label)| {
            let q = Qubit::standard(label);
            1.0 - q.fidelity(&Unitary2::hadamard().apply(&q))
        })
        .sum::<f64>()
        / plan.decoy_slots().len() as f64;
    println!(
        "H on a random decoy:  detected {}/{} (analytic {:.4})",
        detected, trials, analytic
    );

    // message positions carry no protection at all
    let mut detected = 0;
    for trial in 0..trials {
        let mut rng = SeededRng::for_trial(2, trial);
        let mut ct = dqotp::encrypt(&cfg.key_a, &message, &cfg.decoy_loop).unwrap();
        let pos = plan.message_positions()[rng.pick(plan.message_positions().len())];
        ct.seq_mut().apply_unitary_at(pos - 1, &Unitary2::pauli_x());
        if dqotp::decrypt(&cfg.key_a, ct, &cfg.decoy_loop, &mut rng).is_err() {
            detected += 1;
        }
    }
    assert_eq!(detected, 0);
    println!("X on a random message position: detected {detected}/{trials}");
}
