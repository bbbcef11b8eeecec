//! The commands behind the binary.
//!
//! Each command returns the process exit code; anything that stops a
//! command from running at all surfaces as a [`CliError`] and exits 64.

use std::collections::BTreeMap;

use num_complex::Complex64;

use super::config::{ComparatorSpec, RunConfigFile};
use super::files::{self, AttackReportFile, FileHeader, OutcomeCount, TranscriptFile};
use super::{CliError, EXIT_GOLDEN_MISMATCH, EXIT_OK, EXIT_REJECTED};
use crate::qubit::{Qubit, QubitSeq, SeededRng, StateLabel, Unitary2};
use crate::{attack, dqotp, fixture, protocol};

/// Replays the built-in worked example end to end and checks every value
/// against the pinned constants: the key's split tree, the decimal
/// schedule, both signatures, and the positions the attack locates.
/// `perturb` corrupts the key first; it exists so the check can be seen
/// to fail.
pub fn cmd_demo_example(perturb: bool) -> i32 {
    let key_bits = if perturb { "1010" } else { fixture::KEY_A };
    let key: dqotp::SecretKey = key_bits.parse().expect("demo key is well-formed");
    let decoy_loop = fixture::decoy_loop();

    let split = dqotp::split_key(&key, dqotp::choose_t(fixture::N));
    let tree = split.render();
    let schedule = dqotp::to_decimal(&split).render();

    let sign = |msg: &QubitSeq| {
        dqotp::encrypt(&key, msg, &decoy_loop).expect("demo key yields a schedule")
    };
    let sig_zeros = sign(&fixture::message_zeros());
    let sig_ones = sign(&fixture::message_ones());
    let sig_labels = |ct: &dqotp::Ciphertext| {
        ct.seq()
            .exact_labels()
            .expect("basis messages give labeled signatures")
            .iter()
            .map(|l| l.symbol())
            .collect::<String>()
    };

    let mut cfg = fixture::session_config();
    cfg.key_a = key;
    let chosen = [fixture::message_zeros(), fixture::message_ones()];
    let pairs = attack::harvest(&cfg, &chosen).expect("demo config is valid");
    let mut rng = SeededRng::new(cfg.seed);
    let located = attack::locate_message_positions(&pairs, cfg.comparator, &mut rng)
        .expect("two signatures suffice");
    let positions = format!(
        "({})",
        located
            .differing()
            .iter()
            .map(ToString::to_string)
            .collect::<Vec<_>>()
            .join(",")
    );

    println!("K       = {key_bits}");
    println!("Q       = {tree}");
    println!("(Q)_10  = {schedule}");
    println!("S_A     = {}", sig_zeros.seq());
    println!("S_B     = {}", sig_ones.seq());
    println!("diff    = {positions}");

    let expected_positions = format!(
        "({})",
        fixture::MESSAGE_POSITIONS
            .iter()
            .map(ToString::to_string)
            .collect::<Vec<_>>()
            .join(",")
    );
    let checks = [
        ("tree", fixture::TREE_RENDER.to_string(), tree),
        ("schedule", fixture::SCHEDULE_RENDER.to_string(), schedule),
        ("signature of 0000", fixture::SIGNATURE_ZEROS.to_string(), sig_labels(&sig_zeros)),
        ("signature of 1111", fixture::SIGNATURE_ONES.to_string(), sig_labels(&sig_ones)),
        ("diff positions", expected_positions, positions),
    ];

    let mut mismatches = 0;
    for (name, expected, got) in &checks {
        if expected != got {
            mismatches += 1;
            println!("golden mismatch: {name}");
            println!("  expected {expected}");
            println!("  got      {got}");
        }
    }
    if mismatches == 0 {
        println!("golden check: ok ({} values)", checks.len());
        EXIT_OK
    } else {
        println!("golden check: {mismatches} mismatched value(s)");
        EXIT_GOLDEN_MISMATCH
    }
}

/// Runs one honest session from a config file and writes the transcript.
pub fn cmd_run_honest(
    config_path: &str,
    seed_override: Option<u64>,
    out_path: Option<&str>,
) -> Result<i32, CliError> {
    let mut cfg_file = RunConfigFile::load(config_path)?;
    if let Some(seed) = seed_override {
        cfg_file.seed = seed;
    }
    let (cfg, message) = cfg_file.build()?;

    let (verdict, transcript) =
        protocol::run_session(&cfg, &message).map_err(|e| CliError::Invalid(e.to_string()))?;

    let file = TranscriptFile::build(&cfg_file, &verdict, &transcript);
    let out = out_path.unwrap_or("transcript.json");
    files::write_file(out, &files::canonical_json(&file))?;

    match verdict.reason() {
        None => println!("verdict: accept"),
        Some(reason) => println!("verdict: reject ({reason})"),
    }
    println!("events: {}", transcript.events().len());
    println!("transcript: {out}");
    Ok(if verdict.accepted() { EXIT_OK } else { EXIT_REJECTED })
}

/// Runs the chosen-message forgery, possibly many seeded trials, and
/// writes a report. Success means genuine verification accepted the
/// forged bundle; under the ideal comparator every trial must succeed for
/// exit 0, under the swap model the rate must exceed `threshold`.
pub fn cmd_run_attack(
    config_path: &str,
    ops_spec: &str,
    trials: u64,
    out_path: Option<&str>,
    threshold: f64,
    oracle: bool,
) -> Result<i32, CliError> {
    let cfg_file = RunConfigFile::load(config_path)?;
    let (cfg, _) = cfg_file.build()?;
    if trials == 0 {
        return Err(CliError::Invalid("trials must be at least 1".to_string()));
    }
    let ops = parse_ops_spec(ops_spec, cfg.n)?;
    let chosen = [
        QubitSeq::from_labels(&vec![StateLabel::Zero; cfg.n]),
        QubitSeq::from_labels(&vec![StateLabel::One; cfg.n]),
    ];

    let mut success_count = 0u64;
    let mut outcomes: BTreeMap<String, u64> = BTreeMap::new();
    let mut first: Option<attack::AttackReport> = None;
    for trial in 0..trials {
        let mut rng = SeededRng::for_trial(cfg.seed, trial);
        let report = attack::demonstrate(&cfg, &chosen, &ops, &mut rng);
        if report.succeeded() {
            success_count += 1;
        }
        let outcome = match (&report.failure, &report.verdict) {
            (Some(failure), _) => format!("failed: {failure}"),
            (None, Some(v)) if v.accepted() => "accepted".to_string(),
            (None, Some(v)) => match v.reason() {
                Some(reason) => format!("rejected: {reason}"),
                None => "rejected".to_string(),
            },
            (None, None) => "no verdict".to_string(),
        };
        *outcomes.entry(outcome).or_insert(0) += 1;
        if first.is_none() {
            first = Some(report);
        }
    }
    let first = first.expect("at least one trial ran");
    let success_rate = success_count as f64 / trials as f64;

    let expected_positions = if oracle {
        dqotp::derive_plan(&cfg.key_a, cfg.n, &cfg.decoy_loop)
            .ok()
            .map(|plan| plan.message_positions().to_vec())
    } else {
        None
    };
    let file = AttackReportFile {
        header: FileHeader::for_config(&cfg_file),
        ops_spec: ops_spec.to_string(),
        trials,
        success_count,
        success_rate,
        located_positions: first
            .diff
            .as_ref()
            .map(|d| d.differing().to_vec())
            .unwrap_or_default(),
        expected_positions,
        forged_message: first.forged_message.as_ref().map(files::seq_repr),
        outcomes: outcomes
            .into_iter()
            .map(|(outcome, count)| OutcomeCount { outcome, count })
            .collect(),
    };
    let out = out_path.unwrap_or("attack_report.json");
    files::write_file(out, &files::canonical_json(&file))?;

    println!("located: {:?}", file.located_positions);
    println!("success: {success_count}/{trials} (rate {success_rate:.6})");
    println!("report: {out}");

    let ok = match cfg_file.comparator {
        ComparatorSpec::Ideal { .. } => success_count == trials,
        ComparatorSpec::Swap { .. } => success_rate > threshold,
    };
    Ok(if ok { EXIT_OK } else { EXIT_REJECTED })
}

/// Cipher-layer tamper experiment. Encrypts the configured message,
/// applies the op at a uniformly chosen position of the given class
/// (decoy or message), then decrypts; a detection is a failed decoy
/// check. Prints the empirical rate next to the analytic one obtained by
/// enumerating the plan's decoy states.
pub fn cmd_tamper_stats(
    class: &str,
    op: &str,
    trials: u64,
    config_path: Option<&str>,
    seed_override: Option<u64>,
) -> Result<i32, CliError> {
    let cfg_file = match config_path {
        Some(path) => RunConfigFile::load(path)?,
        None => RunConfigFile::builtin(),
    };
    let (cfg, message) = cfg_file.build()?;
    if trials == 0 {
        return Err(CliError::Invalid("trials must be at least 1".to_string()));
    }
    let seed = seed_override.unwrap_or(cfg.seed);
    let gate = parse_gate(op)?;
    let plan = dqotp::derive_plan(&cfg.key_a, cfg.n, &cfg.decoy_loop)
        .map_err(|e| CliError::Invalid(e.to_string()))?;

    let (positions, analytic) = match class {
        "decoy" => {
            let mut detection_sum = 0.0;
            for &(pos, label) in plan.decoy_slots() {
                let expected = Qubit::standard(label);
                let detection = 1.0 - expected.fidelity(&gate.apply(&expected));
                println!("slot {pos} |{label}\u{27e9}: detection {detection:.6}");
                detection_sum += detection;
            }
            let positions: Vec<usize> = plan.decoy_slots().iter().map(|&(p, _)| p).collect();
            let analytic = detection_sum / positions.len() as f64;
            (positions, analytic)
        }
        "message" => (plan.message_positions().to_vec(), 0.0),
        other => {
            return Err(CliError::Invalid(format!(
                "unknown position class `{other}`, expected `decoy` or `message`"
            )))
        }
    };

    let mut detected = 0u64;
    for trial in 0..trials {
        let mut rng = SeededRng::for_trial(seed, trial);
        let mut ct = dqotp::encrypt(&cfg.key_a, &message, &cfg.decoy_loop)
            .map_err(|e| CliError::Invalid(e.to_string()))?;
        let pos = positions[rng.pick(positions.len())];
        ct.seq_mut().apply_unitary_at(pos - 1, &gate);
        match dqotp::decrypt(&cfg.key_a, ct, &cfg.decoy_loop, &mut rng) {
            Ok(_) => {}
            Err(dqotp::CipherError::EavesdropDetected { .. }) => detected += 1,
            Err(e) => return Err(CliError::Invalid(e.to_string())),
        }
    }
    let empirical = detected as f64 / trials as f64;

    println!("class: {class}, op: {op}, trials: {trials}");
    println!("empirical detection rate: {empirical:.6} ({detected}/{trials})");
    println!("analytic detection rate:  {analytic:.6}");
    Ok(EXIT_OK)
}

/// Compares empirical swap-test false-equal rates against ((1+F)/2)^m for
/// every combination of the listed repetition counts and fidelities.
pub fn cmd_swap_stats(
    m_list: &str,
    cases: &str,
    trials: u64,
    seed_override: Option<u64>,
) -> Result<i32, CliError> {
    let ms = parse_list::<u32>(m_list, "m")?;
    let fidelities = parse_list::<f64>(cases, "cases")?;
    if trials == 0 {
        return Err(CliError::Invalid("trials must be at least 1".to_string()));
    }
    for (i, &f) in fidelities.iter().enumerate() {
        if !(0.0..=1.0).contains(&f) {
            return Err(CliError::Field {
                field: "cases",
                message: format!("fidelity #{} is {f}, outside [0, 1]", i + 1),
            });
        }
    }
    for (i, &m) in ms.iter().enumerate() {
        if m == 0 {
            return Err(CliError::Field {
                field: "m",
                message: format!("repetition count #{} must be at least 1", i + 1),
            });
        }
    }
    let seed = seed_override.unwrap_or(fixture::DEFAULT_SEED);

    println!("{:>6} {:>3} {:>12} {:>12} {:>10}", "F", "m", "analytic", "empirical", "diff");
    for &f in &fidelities {
        // a pair of states with overlap exactly F; identical states for F=1
        // keep the one-sided guarantee bit-exact
        let a = Qubit::standard(StateLabel::Zero);
        let b = if f == 1.0 {
            a
        } else {
            Qubit::new(
                Complex64::new(f.sqrt(), 0.0),
                Complex64::new((1.0 - f).sqrt(), 0.0),
            )
            .expect("unit vector by construction")
        };
        for &m in &ms {
            let analytic = ((1.0 + f) / 2.0).powi(m as i32);
            let mut equal = 0u64;
            for trial in 0..trials {
                let mut rng = SeededRng::for_trial(seed, trial);
                if crate::qubit::swap_test_compare(&a, &b, m, &mut rng) {
                    equal += 1;
                }
            }
            let empirical = equal as f64 / trials as f64;
            let diff = (empirical - analytic).abs();
            println!("{f:>6} {m:>3} {analytic:>12.6} {empirical:>12.6} {diff:>10.6}");
        }
    }
    Ok(EXIT_OK)
}

/// Grammar: ops separated by `;`, each `RANK:GATE` or `all:GATE`. A gate
/// is X, Z, H, I (identity), or a JSON 2x2 matrix of [re, im] pairs.
pub fn parse_ops_spec(spec: &str, n: usize) -> Result<Vec<(usize, Unitary2)>, CliError> {
    let mut ops = Vec::new();
    for part in spec.split(';') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let Some((rank_s, gate_s)) = part.split_once(':') else {
            return Err(CliError::Invalid(format!(
                "op `{part}` is not of the form RANK:GATE"
            )));
        };
        let gate = parse_gate(gate_s.trim())?;
        let rank_s = rank_s.trim();
        if rank_s == "all" {
            ops.extend((1..=n).map(|rank| (rank, gate)));
        } else {
            let rank: usize = rank_s.parse().map_err(|_| {
                CliError::Invalid(format!("rank `{rank_s}` is not a number or `all`"))
            })?;
            if rank == 0 || rank > n {
                return Err(CliError::Invalid(format!(
                    "rank {rank} is outside 1..={n}"
                )));
            }
            ops.push((rank, gate));
        }
    }
    if ops.is_empty() {
        return Err(CliError::Invalid("ops spec is empty".to_string()));
    }
    Ok(ops)
}

pub fn parse_gate(s: &str) -> Result<Unitary2, CliError> {
    match s.to_ascii_uppercase().as_str() {
        "X" => return Ok(Unitary2::pauli_x()),
        "Z" => return Ok(Unitary2::pauli_z()),
        "H" => return Ok(Unitary2::hadamard()),
        "I" | "IDENTITY" => return Ok(Unitary2::identity()),
        _ => {}
    }
    let rows: [[[f64; 2]; 2]; 2] = serde_json::from_str(s).map_err(|_| {
        CliError::Invalid(format!(
            "gate `{s}` is not X, Z, H, I, or a JSON 2x2 matrix of [re, im] pairs"
        ))
    })?;
    let c = |[re, im]: [f64; 2]| Complex64::new(re, im);
    Unitary2::new([
        [c(rows[0][0]), c(rows[0][1])],
        [c(rows[1][0]), c(rows[1][1])],
    ])
    .map_err(|e| CliError::Invalid(e.to_string()))
}

fn parse_list<T: std::str::FromStr>(s: &str, field: &'static str) -> Result<Vec<T>, CliError> {
    let items = s
        .split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| {
            p.parse::<T>().map_err(|_| CliError::Field {
                field,
                message: format!("`{p}` is not a valid entry"),
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    if items.is_empty() {
        return Err(CliError::Field {
            field,
            message: "list is empty".to_string(),
        });
    }
    Ok(items)
}
