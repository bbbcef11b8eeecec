//! The decoy-state one-time pad cipher (D-QOTP).
//!
//! Encryption never transforms payload qubits. Instead, the secret key is
//! expanded into a deterministic schedule of insertion positions, and decoy
//! qubits drawn from a cyclic loop of standard states are interleaved into
//! the message at those positions. Decryption extracts the decoys, measures
//! each in its preparation basis, and aborts the session if any outcome
//! disagrees; that measurement is the cipher's only integrity check.
//!
//! The pipeline is:
//!
//! 1. pick the tree depth `t` for the message length ([`choose_t`]),
//! 2. split the key into a tree of substrings ([`split_key`]),
//! 3. read every substring as a decimal value, dropping zeros and
//!    level-local duplicates ([`to_decimal`]),
//! 4. turn the values into an insertion plan ([`build_insertion_plan`]),
//! 5. insert fresh decoys ([`encrypt`]) or strip and verify them
//!    ([`extract`], [`verify_decoys`], [`decrypt`]).
//!
//! The plan is a function of the key, the message length, and the decoy
//! loop only. It does not depend on message content, which is exactly the
//! weakness the forgery in [`crate::attack`] exploits.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use thiserror::Error;

use crate::qubit::{Qubit, QubitSeq, SeededRng, StateLabel};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CipherError {
    #[error("secret key length {len} is invalid: need an even length of at least 2")]
    InvalidKeyLength { len: usize },
    #[error("secret key contains `{0}`, expected only 0 and 1")]
    InvalidKeyBit(char),
    #[error("decoy loop must contain at least one state")]
    EmptyLoop,
    #[error("message must contain at least one qubit")]
    EmptyMessage,
    #[error("key yields an empty insertion schedule: refusing to encrypt without decoys")]
    EmptySchedule,
    #[error("ciphertext length {actual} does not match the plan length {expected}")]
    MalformedCiphertext { expected: usize, actual: usize },
    #[error("decoy measurement mismatch at position {position}: eavesdropping detected")]
    EavesdropDetected { position: usize },
}

/// A shared secret bit string. The halving rule needs two non-empty halves,
/// so the length must be even and at least 2.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SecretKey {
    bits: Vec<bool>,
}

impl SecretKey {
    pub fn from_bits(bits: Vec<bool>) -> Result<SecretKey, CipherError> {
        if bits.len() < 2 || bits.len() % 2 != 0 {
            return Err(CipherError::InvalidKeyLength { len: bits.len() });
        }
        Ok(SecretKey { bits })
    }

    /// Uniformly random key of the given (even) length.
    pub fn random(len: usize, rng: &mut SeededRng) -> Result<SecretKey, CipherError> {
        SecretKey::from_bits((0..len).map(|_| rng.next_bool()).collect())
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }
}

impl FromStr for SecretKey {
    type Err = CipherError;

    fn from_str(s: &str) -> Result<SecretKey, CipherError> {
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(CipherError::InvalidKeyBit(other)),
            })
            .collect::<Result<Vec<_>, _>>()?;
        SecretKey::from_bits(bits)
    }
}

impl fmt::Display for SecretKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_bits(&self.bits))
    }
}

pub fn format_bits(bits: &[bool]) -> String {
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

/// The key split into per-level substrings: level `i` partitions each key
/// half into `2^(i-1)` consecutive pieces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeSplit {
    depth: usize,
    left: Vec<Vec<Vec<bool>>>,
    right: Vec<Vec<Vec<bool>>>,
}

impl TreeSplit {
    pub fn depth(&self) -> usize {
        self.depth
    }

    /// Levels 1..=t of the left half; level `i` holds `2^(i-1)` entries.
    pub fn left_levels(&self) -> &[Vec<Vec<bool>>] {
        &self.left
    }

    pub fn right_levels(&self) -> &[Vec<Vec<bool>>] {
        &self.right
    }

    /// Total number of substrings, which is always `2^(t+1) - 2`.
    pub fn entry_count(&self) -> usize {
        self.left.iter().map(Vec::len).sum::<usize>() + self.right.iter().map(Vec::len).sum::<usize>()
    }

    /// Renders like `(10; 1, 0 · 11; 1, 1)`: levels separated by `;`,
    /// entries by `,`, halves by `·`.
    pub fn render(&self) -> String {
        format!(
            "({} \u{b7} {})",
            render_side(&self.left, |e: &Vec<bool>| format_bits(e)),
            render_side(&self.right, |e: &Vec<bool>| format_bits(e))
        )
    }
}

fn render_side<T, F: Fn(&T) -> String>(levels: &[Vec<T>], fmt_entry: F) -> String {
    levels
        .iter()
        .map(|level| {
            level
                .iter()
                .map(&fmt_entry)
                .collect::<Vec<_>>()
                .join(", ")
        })
        .collect::<Vec<_>>()
        .join("; ")
}

/// The numeric insertion schedule read off a [`TreeSplit`]: zeros dropped,
/// duplicates within one level list removed (first occurrence kept).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecimalSchedule {
    left: Vec<Vec<BigUint>>,
    right: Vec<Vec<BigUint>>,
}

impl DecimalSchedule {
    pub fn left_levels(&self) -> &[Vec<BigUint>] {
        &self.left
    }

    pub fn right_levels(&self) -> &[Vec<BigUint>] {
        &self.right
    }

    /// Number of schedule values, i.e. the number of decoys that will be
    /// inserted.
    pub fn value_count(&self) -> usize {
        self.left.iter().map(Vec::len).sum::<usize>() + self.right.iter().map(Vec::len).sum::<usize>()
    }

    pub fn is_empty(&self) -> bool {
        self.value_count() == 0
    }

    /// Renders like `(2; 1 · 3; 1)`.
    pub fn render(&self) -> String {
        format!(
            "({} \u{b7} {})",
            render_side(&self.left, |v: &BigUint| v.to_string()),
            render_side(&self.right, |v: &BigUint| v.to_string())
        )
    }
}

/// Cyclic sequence of decoy state labels. Inserted decoys consume the loop
/// in order, wrapping around as needed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecoyLoop {
    cycle: Vec<StateLabel>,
}

impl DecoyLoop {
    pub fn new(cycle: Vec<StateLabel>) -> Result<DecoyLoop, CipherError> {
        if cycle.is_empty() {
            return Err(CipherError::EmptyLoop);
        }
        Ok(DecoyLoop { cycle })
    }

    /// The four-state loop |0>, |1>, |+>, |->.
    pub fn standard() -> DecoyLoop {
        DecoyLoop {
            cycle: StateLabel::ALL.to_vec(),
        }
    }

    pub fn labels(&self) -> &[StateLabel] {
        &self.cycle
    }

    /// Label for the `index`-th consumed decoy (0-based), cyclically.
    pub fn label(&self, index: usize) -> StateLabel {
        self.cycle[index % self.cycle.len()]
    }
}

impl fmt::Display for DecoyLoop {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<_> = self.cycle.iter().map(|l| l.symbol()).collect();
        f.write_str(&parts.join(","))
    }
}

/// Where decoys go and where the message ends up, for one (key, length,
/// loop) triple. Positions are 1-based over the ciphertext.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InsertionPlan {
    n: usize,
    total_len: usize,
    decoy_slots: Vec<(usize, StateLabel)>,
    message_positions: Vec<usize>,
}

impl InsertionPlan {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn total_len(&self) -> usize {
        self.total_len
    }

    pub fn decoy_count(&self) -> usize {
        self.decoy_slots.len()
    }

    /// Decoy positions with their state labels, ordered by position.
    pub fn decoy_slots(&self) -> &[(usize, StateLabel)] {
        &self.decoy_slots
    }

    /// Positions of the message qubits in message order (strictly
    /// increasing: the cipher preserves message order).
    pub fn message_positions(&self) -> &[usize] {
        &self.message_positions
    }
}

/// Ciphertext: the interleaved qubit sequence plus the declared message
/// length, which travels as classical metadata so receivers can rebuild
/// the plan.
#[derive(Debug, Clone, PartialEq)]
pub struct Ciphertext {
    seq: QubitSeq,
    n: usize,
}

impl Ciphertext {
    pub fn from_parts(seq: QubitSeq, n: usize) -> Ciphertext {
        Ciphertext { seq, n }
    }

    pub fn seq(&self) -> &QubitSeq {
        &self.seq
    }

    /// Mutable access to the qubits, for in-flight adversaries.
    pub fn seq_mut(&mut self) -> &mut QubitSeq {
        &mut self.seq
    }

    /// Declared message length.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn total_len(&self) -> usize {
        self.seq.len()
    }
}

/// A decoy pulled out of a ciphertext, paired with the state it should be in.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtractedDecoy {
    pub position: usize,
    pub qubit: Qubit,
    pub expected: StateLabel,
}

/// Smallest positive `t` with `2^(t+1) >= n + 3`.
pub fn choose_t(n: usize) -> usize {
    let mut t = 1usize;
    while (1u128 << (t + 1)) < n as u128 + 3 {
        t += 1;
    }
    t
}

/// Splits the key into the level tree: the key's left half (first L/2 bits)
/// and right half are each partitioned, per level `i = 1..=t`, into
/// `2^(i-1)` consecutive substrings, as evenly as possible with earlier
/// substrings taking the extra bits. Substrings may be empty once the part
/// count exceeds the half length.
pub fn split_key(key: &SecretKey, t: usize) -> TreeSplit {
    let half = key.len() / 2;
    let (left_bits, right_bits) = key.bits().split_at(half);
    let levels = |bits: &[bool]| {
        (1..=t)
            .map(|level| even_partition(bits, 1 << (level - 1)))
            .collect::<Vec<_>>()
    };
    TreeSplit {
        depth: t,
        left: levels(left_bits),
        right: levels(right_bits),
    }
}

fn even_partition(bits: &[bool], parts: usize) -> Vec<Vec<bool>> {
    let base = bits.len() / parts;
    let extra = bits.len() % parts;
    let mut out = Vec::with_capacity(parts);
    let mut start = 0;
    for part in 0..parts {
        let size = base + usize::from(part < extra);
        out.push(bits[start..start + size].to_vec());
        start += size;
    }
    out
}

/// Reads every substring as an unsigned binary integer (empty reads as 0),
/// drops zeros, and removes duplicate values within each level list,
/// keeping the first occurrence.
pub fn to_decimal(split: &TreeSplit) -> DecimalSchedule {
    let convert = |levels: &[Vec<Vec<bool>>]| {
        levels
            .iter()
            .map(|level| {
                let mut values: Vec<BigUint> = Vec::with_capacity(level.len());
                for entry in level {
                    let value = bits_to_uint(entry);
                    if value != BigUint::ZERO && !values.contains(&value) {
                        values.push(value);
                    }
                }
                values
            })
            .collect::<Vec<_>>()
    };
    DecimalSchedule {
        left: convert(&split.left),
        right: convert(&split.right),
    }
}

fn bits_to_uint(bits: &[bool]) -> BigUint {
    bits.iter().fold(BigUint::ZERO, |acc, &b| {
        (acc << 1u8) + BigUint::from(u8::from(b))
    })
}

#[derive(Clone, Copy)]
enum Slot {
    Message,
    Decoy(usize),
}

/// Derives decoy and message positions from a schedule.
///
/// The message is split into a left segment (first ceil(n/2) qubits) and a
/// right segment. Left-side schedule values are processed level by level,
/// within a level in list order, each placing a decoy at its 1-based index
/// counted from the left end of the growing left segment; right-side values
/// count from the right end of the right segment. Values beyond the current
/// insertable range wrap modulo (segment length + 1). Decoy states are
/// drawn from the loop in processing order, left side first.
pub fn build_insertion_plan(
    schedule: &DecimalSchedule,
    n: usize,
    decoy_loop: &DecoyLoop,
) -> Result<InsertionPlan, CipherError> {
    if n == 0 {
        return Err(CipherError::EmptyMessage);
    }
    if schedule.is_empty() {
        return Err(CipherError::EmptySchedule);
    }

    let left_count = n.div_ceil(2);
    let mut left: Vec<Slot> = vec![Slot::Message; left_count];
    let mut right: Vec<Slot> = vec![Slot::Message; n - left_count];

    let mut next_decoy = 0usize;
    for level in schedule.left_levels() {
        for value in level {
            let index = wrapped_index(value, left.len());
            left.insert(index - 1, Slot::Decoy(next_decoy));
            next_decoy += 1;
        }
    }
    for level in schedule.right_levels() {
        for value in level {
            let index = wrapped_index(value, right.len());
            right.insert(right.len() + 1 - index, Slot::Decoy(next_decoy));
            next_decoy += 1;
        }
    }

    let mut decoy_slots = Vec::with_capacity(next_decoy);
    let mut message_positions = Vec::with_capacity(n);
    for (i, slot) in left.iter().chain(right.iter()).enumerate() {
        match slot {
            Slot::Message => message_positions.push(i + 1),
            Slot::Decoy(k) => decoy_slots.push((i + 1, decoy_loop.label(*k))),
        }
    }

    Ok(InsertionPlan {
        n,
        total_len: n + next_decoy,
        decoy_slots,
        message_positions,
    })
}

/// Maps a schedule value to a valid 1-based insertion index for a segment
/// of the given current length: `((q - 1) mod (len + 1)) + 1`.
fn wrapped_index(value: &BigUint, len: usize) -> usize {
    let r = (value - 1u8) % BigUint::from(len + 1);
    usize::try_from(r).expect("remainder fits usize") + 1
}

/// Full plan derivation for one (key, message length, loop) triple.
pub fn derive_plan(
    key: &SecretKey,
    n: usize,
    decoy_loop: &DecoyLoop,
) -> Result<InsertionPlan, CipherError> {
    let t = choose_t(n);
    let split = split_key(key, t);
    let schedule = to_decimal(&split);
    build_insertion_plan(&schedule, n, decoy_loop)
}

/// Encrypts by inserting fresh decoy qubits at the plan's slots. Message
/// qubits are placed unmodified, in order, at the plan's message positions.
pub fn encrypt(
    key: &SecretKey,
    message: &QubitSeq,
    decoy_loop: &DecoyLoop,
) -> Result<Ciphertext, CipherError> {
    let plan = derive_plan(key, message.len(), decoy_loop)?;
    let mut seq = vec![Qubit::standard(StateLabel::Zero); plan.total_len()];
    for &(pos, label) in plan.decoy_slots() {
        seq[pos - 1] = Qubit::standard(label);
    }
    for (rank, &pos) in plan.message_positions().iter().enumerate() {
        seq[pos - 1] = *message.get(rank).expect("plan rank within message");
    }
    Ok(Ciphertext {
        seq: QubitSeq::new(seq),
        n: message.len(),
    })
}

/// Splits a ciphertext into its decoys (paired with expected labels) and
/// its payload, in message order. The plan is rebuilt from the key and the
/// ciphertext's declared length.
pub fn extract(
    key: &SecretKey,
    ciphertext: Ciphertext,
    decoy_loop: &DecoyLoop,
) -> Result<(Vec<ExtractedDecoy>, QubitSeq), CipherError> {
    let plan = derive_plan(key, ciphertext.n(), decoy_loop)?;
    if ciphertext.total_len() != plan.total_len() {
        return Err(CipherError::MalformedCiphertext {
            expected: plan.total_len(),
            actual: ciphertext.total_len(),
        });
    }
    let decoys = plan
        .decoy_slots()
        .iter()
        .map(|&(position, expected)| ExtractedDecoy {
            position,
            qubit: *ciphertext.seq().get(position - 1).expect("slot in range"),
            expected,
        })
        .collect();
    let payload = QubitSeq::new(
        plan.message_positions()
            .iter()
            .map(|&pos| *ciphertext.seq().get(pos - 1).expect("position in range"))
            .collect(),
    );
    Ok((decoys, payload))
}

/// Measures each decoy in the basis of its expected state and demands the
/// matching outcome. Any mismatch means the channel was disturbed.
pub fn verify_decoys(decoys: Vec<ExtractedDecoy>, rng: &mut SeededRng) -> Result<(), CipherError> {
    for decoy in decoys {
        let (bit, _) = decoy.qubit.measure(decoy.expected.basis(), rng);
        if bit != decoy.expected.bit() {
            return Err(CipherError::EavesdropDetected {
                position: decoy.position,
            });
        }
    }
    Ok(())
}

/// Extracts, verifies the decoys, and returns the payload. A failed decoy
/// check aborts the session with [`CipherError::EavesdropDetected`].
pub fn decrypt(
    key: &SecretKey,
    ciphertext: Ciphertext,
    decoy_loop: &DecoyLoop,
    rng: &mut SeededRng,
) -> Result<QubitSeq, CipherError> {
    let (decoys, payload) = extract(key, ciphertext, decoy_loop)?;
    verify_decoys(decoys, rng)?;
    Ok(payload)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qubit::Basis;

    fn key(s: &str) -> SecretKey {
        s.parse().unwrap()
    }

    fn demo_loop() -> DecoyLoop {
        DecoyLoop::new(vec![StateLabel::Zero, StateLabel::One, StateLabel::Plus]).unwrap()
    }

    fn labels(seq: &QubitSeq) -> String {
        seq.exact_labels()
            .unwrap()
            .iter()
            .map(|l| l.symbol())
            .collect()
    }

    #[test]
    fn choose_t_examples() {
        assert_eq!(choose_t(4), 2);
        assert_eq!(choose_t(1), 1);
        assert_eq!(choose_t(13), 3);
    }

    #[test]
    fn key_length_validation() {
        assert!(matches!(
            "101".parse::<SecretKey>(),
            Err(CipherError::InvalidKeyLength { len: 3 })
        ));
        assert!(matches!(
            "10a1".parse::<SecretKey>(),
            Err(CipherError::InvalidKeyBit('a'))
        ));
        assert!("10".parse::<SecretKey>().is_ok());
    }

    #[test]
    fn split_of_demo_key() {
        let split = split_key(&key("1011"), 2);
        assert_eq!(split.render(), "(10; 1, 0 \u{b7} 11; 1, 1)");
        assert_eq!(split.entry_count(), 6); // 2^(t+1) - 2 for t = 2
    }

    #[test]
    fn split_single_level_is_the_halves() {
        let split = split_key(&key("1111"), 1);
        assert_eq!(split.render(), "(11 \u{b7} 11)");
    }

    // Independent partition oracle: deal the bits round-robin to count how
    // many land in each part (part j receives |{k < L : k mod p == j}|),
    // then cut consecutive slices of those sizes. Earlier parts end up with
    // the extra bits, matching the sizing rule in even_partition.
    fn oracle_partition(bits: &[bool], parts: usize) -> Vec<Vec<bool>> {
        let mut sizes = vec![0usize; parts];
        for k in 0..bits.len() {
            sizes[k % parts] += 1;
        }
        let mut out = Vec::with_capacity(parts);
        let mut start = 0;
        for size in sizes {
            out.push(bits[start..start + size].to_vec());
            start += size;
        }
        out
    }

    #[test]
    fn split_matches_partition_oracle() {
        let split = split_key(&key("101100"), 2);
        assert_eq!(split.render(), "(101; 10, 1 \u{b7} 100; 10, 0)");

        let mut rng = SeededRng::new(77);
        for _ in 0..50 {
            let len = 2 * (1 + rng.pick(12));
            let k = SecretKey::random(len, &mut rng).unwrap();
            let t = 1 + rng.pick(4);
            let split = split_key(&k, t);
            let (left, right) = k.bits().split_at(len / 2);
            for level in 1..=t {
                assert_eq!(split.left_levels()[level - 1], oracle_partition(left, 1 << (level - 1)));
                assert_eq!(split.right_levels()[level - 1], oracle_partition(right, 1 << (level - 1)));
                // concatenation restores the half
                let rebuilt: Vec<bool> = split.left_levels()[level - 1].concat();
                assert_eq!(rebuilt, left);
            }
            assert_eq!(split.entry_count(), (1 << (t + 1)) - 2);
        }
    }

    #[test]
    fn decimal_schedule_of_demo_key() {
        let schedule = to_decimal(&split_key(&key("1011"), 2));
        assert_eq!(schedule.render(), "(2; 1 \u{b7} 3; 1)");
        assert_eq!(schedule.value_count(), 4);
    }

    #[test]
    fn decimal_schedule_drops_zeros_and_duplicates() {
        // all-zero key: every substring reads 0 and is dropped
        let schedule = to_decimal(&split_key(&key("0000"), 2));
        assert!(schedule.is_empty());

        // right side (11; 1, 1): duplicate 1 within the level list removed
        let schedule = to_decimal(&split_key(&key("1011"), 2));
        assert_eq!(schedule.right_levels()[1], vec![BigUint::from(1u8)]);
    }

    #[test]
    fn plan_of_demo_key() {
        let schedule = to_decimal(&split_key(&key("1011"), 2));
        let plan = build_insertion_plan(&schedule, 4, &demo_loop()).unwrap();
        assert_eq!(plan.total_len(), 8);
        assert_eq!(
            plan.decoy_slots(),
            &[
                (1, StateLabel::One),
                (3, StateLabel::Zero),
                (5, StateLabel::Plus),
                (8, StateLabel::Zero),
            ]
        );
        assert_eq!(plan.message_positions(), &[2, 4, 6, 7]);
    }

    #[test]
    fn plan_positions_do_not_depend_on_loop_content() {
        let schedule = to_decimal(&split_key(&key("1011"), 2));
        let plan = build_insertion_plan(&schedule, 4, &DecoyLoop::standard()).unwrap();
        assert_eq!(
            plan.decoy_slots(),
            &[
                (1, StateLabel::One),
                (3, StateLabel::Zero),
                (5, StateLabel::Plus),
                (8, StateLabel::Minus),
            ]
        );
        assert_eq!(plan.message_positions(), &[2, 4, 6, 7]);
    }

    #[test]
    fn smallest_plan() {
        // single left value 1, message of one qubit: decoy first, message second
        let schedule = DecimalSchedule {
            left: vec![vec![BigUint::from(1u8)]],
            right: vec![vec![]],
        };
        let plan = build_insertion_plan(&schedule, 1, &demo_loop()).unwrap();
        assert_eq!(plan.decoy_slots(), &[(1, StateLabel::Zero)]);
        assert_eq!(plan.message_positions(), &[2]);
    }

    #[test]
    fn empty_schedule_refuses_to_encrypt() {
        let message = QubitSeq::parse_basis_str("0000").unwrap();
        assert_eq!(
            encrypt(&key("0000"), &message, &demo_loop()),
            Err(CipherError::EmptySchedule)
        );
    }

    #[test]
    fn encrypt_demo_messages() {
        let s_a = encrypt(&key("1011"), &QubitSeq::parse_basis_str("0000").unwrap(), &demo_loop()).unwrap();
        assert_eq!(labels(s_a.seq()), "1000+000");
        let s_b = encrypt(&key("1011"), &QubitSeq::parse_basis_str("1111").unwrap(), &demo_loop()).unwrap();
        assert_eq!(labels(s_b.seq()), "1101+110");
    }

    #[test]
    fn extract_recovers_decoys_and_payload() {
        let k = key("1011");
        let message = QubitSeq::parse_basis_str("0000").unwrap();
        let ct = encrypt(&k, &message, &demo_loop()).unwrap();
        let (decoys, payload) = extract(&k, ct, &demo_loop()).unwrap();
        assert_eq!(payload, message);
        let summary: Vec<_> = decoys.iter().map(|d| (d.position, d.expected)).collect();
        assert_eq!(
            summary,
            vec![
                (1, StateLabel::One),
                (3, StateLabel::Zero),
                (5, StateLabel::Plus),
                (8, StateLabel::Zero),
            ]
        );
        for d in &decoys {
            assert_eq!(d.qubit, Qubit::standard(d.expected));
        }
    }

    #[test]
    fn wrong_length_ciphertext_is_malformed() {
        let k = key("1011");
        let ct = Ciphertext::from_parts(QubitSeq::parse_basis_str("000").unwrap(), 4);
        assert_eq!(
            extract(&k, ct, &demo_loop()),
            Err(CipherError::MalformedCiphertext {
                expected: 8,
                actual: 3
            })
        );
    }

    #[test]
    fn untouched_decoys_always_verify() {
        let k = key("1011");
        for seed in 0..50 {
            let mut rng = SeededRng::new(seed);
            let ct = encrypt(&k, &QubitSeq::parse_basis_str("01+-").unwrap(), &demo_loop()).unwrap();
            let (decoys, _) = extract(&k, ct, &demo_loop()).unwrap();
            assert_eq!(verify_decoys(decoys, &mut rng), Ok(()));
        }
    }

    #[test]
    fn orthogonal_decoy_replacement_always_detected() {
        for seed in 0..50 {
            let mut rng = SeededRng::new(seed);
            let decoys = vec![ExtractedDecoy {
                position: 3,
                qubit: Qubit::standard(StateLabel::One),
                expected: StateLabel::Zero,
            }];
            assert_eq!(
                verify_decoys(decoys, &mut rng),
                Err(CipherError::EavesdropDetected { position: 3 })
            );
        }
    }

    #[test]
    fn oblique_decoy_replacement_detected_half_the_time() {
        // |0> in a |+> slot: measuring in X gives |-> with probability
        // |<-|0>|^2 = 1/2, checked by Monte Carlo.
        let trials = 10_000;
        let mut rng = SeededRng::new(321);
        let rejects = (0..trials)
            .filter(|_| {
                let decoys = vec![ExtractedDecoy {
                    position: 5,
                    qubit: Qubit::standard(StateLabel::Zero),
                    expected: StateLabel::Plus,
                }];
                verify_decoys(decoys, &mut rng).is_err()
            })
            .count();
        let freq = rejects as f64 / trials as f64;
        assert!((freq - 0.5).abs() < 0.02, "freq={freq}");
    }

    #[test]
    fn decrypt_round_trip() {
        let k = key("1011");
        let loop_ = demo_loop();
        let mut rng = SeededRng::new(5);
        let message = QubitSeq::parse_basis_str("0000").unwrap();
        let ct = encrypt(&k, &message, &loop_).unwrap();
        assert_eq!(labels(ct.seq()), "1000+000");
        let out = decrypt(&k, ct, &loop_, &mut rng).unwrap();
        assert_eq!(out, message);
    }

    #[test]
    fn decrypt_rejects_tampered_decoy() {
        // Z on the |+> decoy at position 5 turns it into |->, which the
        // X-basis check catches every time.
        let k = key("1011");
        let loop_ = demo_loop();
        for seed in 0..20 {
            let mut rng = SeededRng::new(seed);
            let mut ct = encrypt(&k, &QubitSeq::parse_basis_str("0000").unwrap(), &loop_).unwrap();
            ct.seq_mut()
                .apply_unitary_at(4, &crate::qubit::Unitary2::pauli_z());
            assert_eq!(
                decrypt(&k, ct, &loop_, &mut rng),
                Err(CipherError::EavesdropDetected { position: 5 })
            );
        }
    }

    #[test]
    fn message_positions_are_transparent() {
        let k = key("110010");
        let loop_ = DecoyLoop::standard();
        let message = QubitSeq::parse_basis_str("+-1010").unwrap();
        let ct = encrypt(&k, &message, &loop_).unwrap();
        let plan = derive_plan(&k, message.len(), &loop_).unwrap();
        for (rank, &pos) in plan.message_positions().iter().enumerate() {
            let in_ct = ct.seq().get(pos - 1).unwrap();
            assert_eq!(in_ct.fidelity(message.get(rank).unwrap()), 1.0);
        }
    }

    #[test]
    fn measurement_consumes_rng_in_declared_basis() {
        // Decoy verification must measure Z slots in Z and X slots in X;
        // an |1> decoy measured in its own basis is deterministic.
        let mut rng = SeededRng::new(1);
        let (bit, post) = Qubit::standard(StateLabel::One).measure(Basis::Z, &mut rng);
        assert_eq!((bit, post), (1, Qubit::standard(StateLabel::One)));
    }
}
