// Usage: cargo run --example honest_session
//
// Runs one honest three-party session on the built-in configuration and
// prints the transcript: initialization, Alice's signing steps, and the
// verification round trip through Bob and Trent.

use aqs_sim::protocol::run_session;
use aqs_sim::{dqotp, fixture};

fn main() {
    let cfg = fixture::session_config();
    let message = fixture::message_zeros();
    println!(
        "session: n={}, |K_A|={}, |K_B|={}, seed={}",
        cfg.n,
        cfg.key_a.len(),
        cfg.key_b.len(),
        cfg.seed
    );
    println!();

    let (verdict, transcript) = run_session(&cfg, &message).unwrap();
    println!("{:<5} {:<6} {:<26} {:<8} detail", "step", "party", "action", "outcome");
    for event in transcript.events() {
        println!(
            "{:<5} {:<6} {:<26} {:<8} {}",
            event.step,
            event.party.to_string(),
            event.action,
            event.outcome,
            event.detail
        );
    }
    println!();

    assert!(verdict.accepted());
    let evidence = verdict.evidence().unwrap();
    println!("verdict: accept");
    println!("evidence held by Bob: {}", evidence.seq());

    // what Bob keeps is literally Alice's signature of the message
    let expected = dqotp::encrypt(&cfg.key_a, &message, &cfg.decoy_loop).unwrap();
    assert_eq!(evidence.seq(), expected.seq());
    println!("evidence matches a fresh signing of the same message");
}
