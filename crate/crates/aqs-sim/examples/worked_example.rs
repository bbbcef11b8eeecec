// Usage: cargo run --example worked_example
//
// Walks the built-in four-qubit configuration through every cipher stage:
// splitting the key into the tree, reading off the decimal schedule,
// deriving the insertion plan, and signing the two reference messages.
// Ends by locating the message positions the same way the attack does.
// Every value is checked against the pinned constants.

use aqs_sim::qubit::SeededRng;
use aqs_sim::{attack, dqotp, fixture};

fn main() {
    let key = fixture::key_a();
    let decoy_loop = fixture::decoy_loop();
    println!("key K = {key}, message length n = {}", fixture::N);
    println!("decoy loop R = ({decoy_loop})");
    println!();

    // stage 1: halve the key repeatedly into the split tree
    let t = dqotp::choose_t(fixture::N);
    let split = dqotp::split_key(&key, t);
    println!("split tree, {t} levels:  Q = {}", split.render());
    assert_eq!(split.render(), fixture::TREE_RENDER);

    // stage 2: each substring as a decimal, zeros dropped, duplicates
    // within a level removed
    let schedule = dqotp::to_decimal(&split);
    println!("decimal schedule: (Q)_10 = {}", schedule.render());
    assert_eq!(schedule.render(), fixture::SCHEDULE_RENDER);

    // stage 3: the schedule fixes where decoys go and which loop state
    // each one carries; everything here depends on the key only
    let plan = dqotp::build_insertion_plan(&schedule, fixture::N, &decoy_loop).unwrap();
    let slots = plan
        .decoy_slots()
        .iter()
        .map(|(pos, label)| format!("{pos}:|{label}\u{27e9}"))
        .collect::<Vec<_>>()
        .join(", ");
    println!("decoy slots: {slots}");
    println!("message positions: {:?}", plan.message_positions());
    assert_eq!(plan.decoy_slots(), fixture::DECOY_SLOTS);
    assert_eq!(plan.message_positions(), fixture::MESSAGE_POSITIONS);
    println!();

    // stage 4: sign both reference messages with the same key
    let sig_zeros = dqotp::encrypt(&key, &fixture::message_zeros(), &decoy_loop).unwrap();
    let sig_ones = dqotp::encrypt(&key, &fixture::message_ones(), &decoy_loop).unwrap();
    println!("S(0000) = {}", sig_zeros.seq());
    println!("S(1111) = {}", sig_ones.seq());
    let labels = |ct: &dqotp::Ciphertext| {
        ct.seq()
            .exact_labels()
            .unwrap()
            .iter()
            .map(|l| l.symbol())
            .collect::<String>()
    };
    assert_eq!(labels(&sig_zeros), fixture::SIGNATURE_ZEROS);
    assert_eq!(labels(&sig_ones), fixture::SIGNATURE_ONES);
    println!();

    // the flaw, made visible: compare the two signatures position by
    // position and the fixed decoy slots melt away
    let cfg = fixture::session_config();
    let pairs =
        attack::harvest(&cfg, &[fixture::message_zeros(), fixture::message_ones()]).unwrap();
    let mut rng = SeededRng::new(cfg.seed);
    let report = attack::locate_message_positions(&pairs, cfg.comparator, &mut rng).unwrap();
    println!("positions where the signatures differ: {:?}", report.differing());
    assert_eq!(report.differing(), fixture::MESSAGE_POSITIONS);
    assert!(report.complete());
    println!("all {} message positions recovered without the key", fixture::N);
}
