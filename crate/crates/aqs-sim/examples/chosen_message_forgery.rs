// Usage: cargo run --example chosen_message_forgery
//
// The complete attack. A receiver asks for signatures on two messages of
// his choosing, compares them position by position to find where the
// message hides inside the signature, rewrites a signed bundle into one
// for a message that was never signed, and walks it through genuine
// verification, which accepts it.

use aqs_sim::attack::{demonstrate, forge, harvest, locate_message_positions, run_verification};
use aqs_sim::qubit::{SeededRng, Unitary2};
use aqs_sim::{dqotp, fixture};

fn main() {
    let cfg = fixture::session_config();
    let chosen = [fixture::message_zeros(), fixture::message_ones()];

    // step 1: collect signatures on chosen messages under the same key
    let pairs = harvest(&cfg, &chosen).unwrap();
    for pair in &pairs {
        println!("signature of {}: {}", pair.message, pair.bundle.signature.seq());
    }

    // step 2: the decoys sit at fixed, key-determined positions, so the
    // signatures differ exactly where the message lives
    let mut rng = SeededRng::new(cfg.seed);
    let report = locate_message_positions(&pairs, cfg.comparator, &mut rng).unwrap();
    println!("message positions located: {:?}", report.differing());
    assert!(report.complete());
    println!();

    // step 3: rewrite signature and both copies together; here a flip of
    // every message qubit
    let ops: Vec<_> = (1..=cfg.n).map(|rank| (rank, Unitary2::pauli_x())).collect();
    let forged = forge(&pairs[0], &report, &ops).unwrap();
    println!("forged message:   {}", forged.forged_message);
    println!("forged signature: {}", forged.bundle.signature.seq());

    // the forgery is indistinguishable from a genuine signing
    let genuine = dqotp::encrypt(&cfg.key_a, &forged.forged_message, &cfg.decoy_loop).unwrap();
    assert_eq!(forged.bundle.signature.seq(), genuine.seq());
    println!("identical to what the signer would have produced");
    println!();

    // step 4: genuine Bob and Trent verify the forged bundle
    let (verdict, _) = run_verification(&cfg, forged.bundle, &mut rng).unwrap();
    assert!(verdict.accepted());
    println!("verification of the forged bundle: ACCEPTED");
    println!("evidence now held against the signer: {}", verdict.evidence().unwrap().seq());
    println!();

    // the same pipeline as one call, with a message outside the computational
    // basis to show the forgery is not limited to bit flips
    let ops = [(1, Unitary2::hadamard())];
    let report = demonstrate(&cfg, &chosen, &ops, &mut SeededRng::new(cfg.seed));
    assert!(report.succeeded());
    println!(
        "a second forgery, message {}: also accepted",
        report.forged_message.unwrap()
    );
}
