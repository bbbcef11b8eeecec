//! Exact single-qubit pure-state arithmetic.
//!
//! Everything the protocol layers touch is built from the pieces here:
//! normalized amplitude pairs ([`Qubit`]), ordered registers ([`QubitSeq`]),
//! 2x2 unitaries, seeded basis measurement, and the two state-comparison
//! primitives that stand in for quantum fingerprinting (an ideal
//! fidelity-threshold comparator and a repeated SWAP test with one-sided
//! error).
//!
//! Global phase is physically unobservable, so equality of states is always
//! judged through [`Qubit::fidelity`], never through amplitude equality.
//! All randomness is drawn from an explicit [`SeededRng`] so that every
//! protocol run is reproducible from its seed.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use thiserror::Error;

/// Allowed deviation of |alpha|^2 + |beta|^2 from 1.
pub const NORM_TOLERANCE: f64 = 1e-12;
/// Allowed per-entry deviation of U * U^dagger from the identity.
pub const UNITARITY_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QubitError {
    #[error("unknown state label `{0}`, expected one of 0, 1, +, -")]
    UnknownLabel(String),
    #[error("amplitudes are not normalized: |alpha|^2 + |beta|^2 = {norm_sq}")]
    NotNormalized { norm_sq: f64 },
    #[error("matrix is not unitary: max deviation {deviation:e} from identity")]
    NotUnitary { deviation: f64 },
    #[error("ideal comparator epsilon {0} must lie in (0, 0.5)")]
    InvalidEpsilon(f64),
    #[error("swap test comparator needs at least one repetition")]
    ZeroRepetitions,
}

/// Label of one of the four standard preparation states.
///
/// `Zero`/`One` are the computational-basis states, `Plus`/`Minus` the
/// Hadamard-basis states. These four are the only states ever used as
/// decoys, and they double as the compact textual form for basis-state
/// messages (`"01+-"`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StateLabel {
    Zero,
    One,
    Plus,
    Minus,
}

impl StateLabel {
    pub const ALL: [StateLabel; 4] = [
        StateLabel::Zero,
        StateLabel::One,
        StateLabel::Plus,
        StateLabel::Minus,
    ];

    /// Basis in which this state is an eigenstate.
    pub fn basis(self) -> Basis {
        match self {
            StateLabel::Zero | StateLabel::One => Basis::Z,
            StateLabel::Plus | StateLabel::Minus => Basis::X,
        }
    }

    /// Outcome bit this state yields when measured in its own basis.
    pub fn bit(self) -> u8 {
        match self {
            StateLabel::Zero | StateLabel::Plus => 0,
            StateLabel::One | StateLabel::Minus => 1,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            StateLabel::Zero => "0",
            StateLabel::One => "1",
            StateLabel::Plus => "+",
            StateLabel::Minus => "-",
        }
    }
}

impl fmt::Display for StateLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

impl FromStr for StateLabel {
    type Err = QubitError;

    fn from_str(s: &str) -> Result<Self, QubitError> {
        match s {
            "0" => Ok(StateLabel::Zero),
            "1" => Ok(StateLabel::One),
            "+" => Ok(StateLabel::Plus),
            "-" => Ok(StateLabel::Minus),
            other => Err(QubitError::UnknownLabel(other.to_string())),
        }
    }
}

/// Measurement basis: computational (`Z`, {|0>,|1>}) or Hadamard (`X`, {|+>,|->}).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Basis {
    Z,
    X,
}

impl Basis {
    /// The two basis vectors, in outcome order (bit 0 first).
    pub fn states(self) -> (Qubit, Qubit) {
        match self {
            Basis::Z => (Qubit::standard(StateLabel::Zero), Qubit::standard(StateLabel::One)),
            Basis::X => (Qubit::standard(StateLabel::Plus), Qubit::standard(StateLabel::Minus)),
        }
    }

    /// Label of the basis vector for a given outcome bit.
    pub fn label_for(self, bit: u8) -> StateLabel {
        match (self, bit) {
            (Basis::Z, 0) => StateLabel::Zero,
            (Basis::Z, _) => StateLabel::One,
            (Basis::X, 0) => StateLabel::Plus,
            (Basis::X, _) => StateLabel::Minus,
        }
    }
}

/// A normalized single-qubit pure state alpha|0> + beta|1>.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Qubit {
    alpha: Complex64,
    beta: Complex64,
}

impl Qubit {
    /// Builds a qubit, rejecting amplitude pairs whose norm deviates from 1
    /// by more than [`NORM_TOLERANCE`].
    pub fn new(alpha: Complex64, beta: Complex64) -> Result<Qubit, QubitError> {
        let norm_sq = alpha.norm_sqr() + beta.norm_sqr();
        if (norm_sq - 1.0).abs() > NORM_TOLERANCE {
            return Err(QubitError::NotNormalized { norm_sq });
        }
        Ok(Qubit { alpha, beta })
    }

    pub(crate) fn new_unchecked(alpha: Complex64, beta: Complex64) -> Qubit {
        debug_assert!((alpha.norm_sqr() + beta.norm_sqr() - 1.0).abs() <= NORM_TOLERANCE);
        Qubit { alpha, beta }
    }

    /// One of the four standard states, with exact amplitudes
    /// (|+> = (|0>+|1>)/sqrt(2), |-> = (|0>-|1>)/sqrt(2)).
    pub fn standard(label: StateLabel) -> Qubit {
        let r = |x: f64| Complex64::new(x, 0.0);
        match label {
            StateLabel::Zero => Qubit { alpha: r(1.0), beta: r(0.0) },
            StateLabel::One => Qubit { alpha: r(0.0), beta: r(1.0) },
            StateLabel::Plus => Qubit { alpha: r(FRAC_1_SQRT_2), beta: r(FRAC_1_SQRT_2) },
            StateLabel::Minus => Qubit { alpha: r(FRAC_1_SQRT_2), beta: r(-FRAC_1_SQRT_2) },
        }
    }

    pub fn alpha(&self) -> Complex64 {
        self.alpha
    }

    pub fn beta(&self) -> Complex64 {
        self.beta
    }

    /// |<a|b>|^2, clamped into [0, 1]. Bitwise-identical states short-circuit
    /// to exactly 1 so that eigenstate measurement and the one-sided swap
    /// test stay exact for cloned states.
    pub fn fidelity(&self, other: &Qubit) -> f64 {
        if self == other {
            return 1.0;
        }
        let inner = self.alpha.conj() * other.alpha + self.beta.conj() * other.beta;
        inner.norm_sqr().clamp(0.0, 1.0)
    }

    /// The standard label this qubit matches with exact amplitudes, if any.
    pub fn exact_label(&self) -> Option<StateLabel> {
        StateLabel::ALL
            .into_iter()
            .find(|&label| *self == Qubit::standard(label))
    }

    /// Projective measurement in `basis`.
    ///
    /// Returns the outcome bit (0 for the basis's first vector) and the
    /// collapsed post-measurement state. Outcome probabilities follow the
    /// Born rule; `rng` is the only source of randomness.
    pub fn measure(&self, basis: Basis, rng: &mut SeededRng) -> (u8, Qubit) {
        let (b0, b1) = basis.states();
        let p0 = b0.fidelity(self);
        if rng.next_f64() < p0 {
            (0, b0)
        } else {
            (1, b1)
        }
    }
}

impl fmt::Display for Qubit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.exact_label() {
            Some(label) => write!(f, "|{label}\u{27e9}"),
            None => write!(
                f,
                "({:+.6}{:+.6}i)|0\u{27e9} + ({:+.6}{:+.6}i)|1\u{27e9}",
                self.alpha.re, self.alpha.im, self.beta.re, self.beta.im
            ),
        }
    }
}

/// An ordered register of qubits. Positions are 1-based everywhere a
/// position is reported (plans, diff reports, transcripts).
#[derive(Debug, Clone, PartialEq)]
pub struct QubitSeq {
    qubits: Vec<Qubit>,
}

impl QubitSeq {
    pub fn new(qubits: Vec<Qubit>) -> QubitSeq {
        QubitSeq { qubits }
    }

    pub fn from_labels(labels: &[StateLabel]) -> QubitSeq {
        QubitSeq {
            qubits: labels.iter().map(|&l| Qubit::standard(l)).collect(),
        }
    }

    /// Parses the compact basis-string form, e.g. `"01+-"`.
    pub fn parse_basis_str(s: &str) -> Result<QubitSeq, QubitError> {
        s.chars()
            .map(|c| StateLabel::from_str(&c.to_string()).map(Qubit::standard))
            .collect::<Result<Vec<_>, _>>()
            .map(QubitSeq::new)
    }

    pub fn len(&self) -> usize {
        self.qubits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.qubits.is_empty()
    }

    pub fn get(&self, index: usize) -> Option<&Qubit> {
        self.qubits.get(index)
    }

    /// Replaces the qubit at a 0-based index.
    pub fn set(&mut self, index: usize, qubit: Qubit) {
        self.qubits[index] = qubit;
    }

    /// Applies a unitary to the qubit at a 0-based index.
    pub fn apply_unitary_at(&mut self, index: usize, u: &Unitary2) {
        self.qubits[index] = u.apply(&self.qubits[index]);
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Qubit> {
        self.qubits.iter()
    }

    pub fn as_slice(&self) -> &[Qubit] {
        &self.qubits
    }

    pub fn into_vec(self) -> Vec<Qubit> {
        self.qubits
    }

    /// Labels of all qubits, if every qubit matches a standard state exactly.
    pub fn exact_labels(&self) -> Option<Vec<StateLabel>> {
        self.qubits.iter().map(Qubit::exact_label).collect()
    }

    /// Smallest per-position fidelity against another register of the same
    /// length. Returns `None` on length mismatch.
    pub fn min_pairwise_fidelity(&self, other: &QubitSeq) -> Option<f64> {
        if self.len() != other.len() {
            return None;
        }
        self.qubits
            .iter()
            .zip(other.qubits.iter())
            .map(|(a, b)| a.fidelity(b))
            .fold(Some(1.0), |acc, f| acc.map(|m: f64| m.min(f)))
    }
}

impl fmt::Display for QubitSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, q) in self.qubits.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{q}")?;
        }
        write!(f, ")")
    }
}

impl From<Vec<Qubit>> for QubitSeq {
    fn from(qubits: Vec<Qubit>) -> QubitSeq {
        QubitSeq::new(qubits)
    }
}

/// A 2x2 unitary, validated at construction to [`UNITARITY_TOLERANCE`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Unitary2 {
    rows: [[Complex64; 2]; 2],
}

impl Unitary2 {
    pub fn new(rows: [[Complex64; 2]; 2]) -> Result<Unitary2, QubitError> {
        let mut deviation = 0.0_f64;
        for i in 0..2 {
            for j in 0..2 {
                // (U U^dagger)_ij = sum_k U_ik conj(U_jk)
                let entry = rows[i][0] * rows[j][0].conj() + rows[i][1] * rows[j][1].conj();
                let expected = if i == j { 1.0 } else { 0.0 };
                deviation = deviation.max((entry - expected).norm());
            }
        }
        if deviation > UNITARITY_TOLERANCE {
            return Err(QubitError::NotUnitary { deviation });
        }
        Ok(Unitary2 { rows })
    }

    pub fn identity() -> Unitary2 {
        Self::from_reals([[1.0, 0.0], [0.0, 1.0]])
    }

    pub fn pauli_x() -> Unitary2 {
        Self::from_reals([[0.0, 1.0], [1.0, 0.0]])
    }

    pub fn pauli_z() -> Unitary2 {
        Self::from_reals([[1.0, 0.0], [0.0, -1.0]])
    }

    pub fn hadamard() -> Unitary2 {
        Self::from_reals([
            [FRAC_1_SQRT_2, FRAC_1_SQRT_2],
            [FRAC_1_SQRT_2, -FRAC_1_SQRT_2],
        ])
    }

    fn from_reals(rows: [[f64; 2]; 2]) -> Unitary2 {
        Unitary2 {
            rows: rows.map(|r| r.map(|x| Complex64::new(x, 0.0))),
        }
    }

    pub fn rows(&self) -> &[[Complex64; 2]; 2] {
        &self.rows
    }

    /// Applies the unitary: (alpha, beta) -> U (alpha, beta)^T.
    pub fn apply(&self, q: &Qubit) -> Qubit {
        let alpha = self.rows[0][0] * q.alpha + self.rows[0][1] * q.beta;
        let beta = self.rows[1][0] * q.alpha + self.rows[1][1] * q.beta;
        Qubit::new_unchecked(alpha, beta)
    }
}

/// Deterministic random stream: same seed, same outputs, on every platform.
///
/// Backed by ChaCha20 so transcripts replay bit-for-bit. One value is owned
/// by one session; trials of a statistics run derive their own stream with
/// [`SeededRng::for_trial`].
#[derive(Debug, Clone)]
pub struct SeededRng {
    inner: ChaCha20Rng,
}

impl SeededRng {
    pub fn new(seed: u64) -> SeededRng {
        SeededRng {
            inner: ChaCha20Rng::seed_from_u64(seed),
        }
    }

    /// Stream for trial `trial` of a multi-trial run with base seed `base`.
    pub fn for_trial(base: u64, trial: u64) -> SeededRng {
        SeededRng::new(base.wrapping_add(trial))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform in [0, 1) with 53 bits of precision.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    pub fn next_bool(&mut self) -> bool {
        self.next_u64() & 1 == 1
    }

    /// Uniform index in [0, n). `n` must be nonzero.
    pub fn pick(&mut self, n: usize) -> usize {
        assert!(n > 0, "pick from empty range");
        (self.next_u64() % n as u64) as usize
    }
}

/// Returns whether `fidelity(a, b) >= 1 - epsilon`.
///
/// This is the idealized equality test: deterministic and non-destructive.
/// Real fingerprinting would consume copies; the protocol layer controls who
/// may invoke comparisons at all.
pub fn ideal_compare(a: &Qubit, b: &Qubit, epsilon: f64) -> bool {
    a.fidelity(b) >= 1.0 - epsilon
}

/// Repeated SWAP-test equality check with one-sided error.
///
/// Performs `repetitions` independent trials, each passing with probability
/// (1 + F)/2 where F is the fidelity; reports "equal" only if all pass.
/// Identical states always pass, for every seed; states with fidelity F slip
/// through with probability ((1+F)/2)^m.
pub fn swap_test_compare(a: &Qubit, b: &Qubit, repetitions: u32, rng: &mut SeededRng) -> bool {
    let pass_prob = (1.0 + a.fidelity(b)) / 2.0;
    (0..repetitions).all(|_| rng.next_f64() < pass_prob)
}

/// State-equality model used by the protocol parties.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Comparator {
    /// Deterministic fidelity threshold: equal iff F >= 1 - epsilon.
    Ideal { epsilon: f64 },
    /// Repeated SWAP test with the given repetition count.
    SwapTest { repetitions: u32 },
}

impl Comparator {
    pub fn ideal(epsilon: f64) -> Result<Comparator, QubitError> {
        if !(epsilon > 0.0 && epsilon < 0.5) {
            return Err(QubitError::InvalidEpsilon(epsilon));
        }
        Ok(Comparator::Ideal { epsilon })
    }

    pub fn swap_test(repetitions: u32) -> Result<Comparator, QubitError> {
        if repetitions == 0 {
            return Err(QubitError::ZeroRepetitions);
        }
        Ok(Comparator::SwapTest { repetitions })
    }

    pub fn states_equal(&self, a: &Qubit, b: &Qubit, rng: &mut SeededRng) -> bool {
        match *self {
            Comparator::Ideal { epsilon } => ideal_compare(a, b, epsilon),
            Comparator::SwapTest { repetitions } => swap_test_compare(a, b, repetitions, rng),
        }
    }
}
