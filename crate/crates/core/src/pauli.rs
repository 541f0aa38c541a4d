//! Phase-tagged N-qubit Pauli strings and weighted Pauli-sum Hamiltonians.
//!
//! Letters are stored in a two-bit symplectic encoding (an x-bit and a z-bit
//! per qubit, packed into `u64` words) so products and commutation checks are
//! word-parallel bit operations. The overall phase is tracked as an exponent
//! of `i` modulo 4.

use std::fmt;
use std::str::FromStr;

use serde::de::Error as SerdeError;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::capacity;
use crate::error::{Error, Result};
use crate::linalg::{self, c, CMat, C_ONE, C_ZERO};

/// Coefficients with absolute value below this are dropped on ingest.
pub const COEFF_CUTOFF: f64 = 1e-15;

/// Single-qubit Pauli letter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PauliLetter {
    I,
    X,
    Y,
    Z,
}

impl PauliLetter {
    /// Symplectic (x, z) bits: I=(0,0), X=(1,0), Y=(1,1), Z=(0,1).
    pub fn bits(self) -> (bool, bool) {
        match self {
            PauliLetter::I => (false, false),
            PauliLetter::X => (true, false),
            PauliLetter::Y => (true, true),
            PauliLetter::Z => (false, true),
        }
    }

    pub fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => PauliLetter::I,
            (true, false) => PauliLetter::X,
            (true, true) => PauliLetter::Y,
            (false, true) => PauliLetter::Z,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            PauliLetter::I => 'I',
            PauliLetter::X => 'X',
            PauliLetter::Y => 'Y',
            PauliLetter::Z => 'Z',
        }
    }

    pub fn from_symbol(ch: char) -> Result<Self> {
        match ch.to_ascii_uppercase() {
            'I' => Ok(PauliLetter::I),
            'X' => Ok(PauliLetter::X),
            'Y' => Ok(PauliLetter::Y),
            'Z' => Ok(PauliLetter::Z),
            other => Err(Error::Parse(format!("unknown Pauli letter `{other}`"))),
        }
    }

    pub fn matrix(self) -> CMat {
        match self {
            PauliLetter::I => ndarray::array![[C_ONE, C_ZERO], [C_ZERO, C_ONE]],
            PauliLetter::X => ndarray::array![[C_ZERO, C_ONE], [C_ONE, C_ZERO]],
            PauliLetter::Y => {
                ndarray::array![[C_ZERO, c(0.0, -1.0)], [c(0.0, 1.0), C_ZERO]]
            }
            PauliLetter::Z => ndarray::array![[C_ONE, C_ZERO], [C_ZERO, -C_ONE]],
        }
    }
}

/// One of the four phases `{+1, +i, -1, -i}`, stored as the exponent of `i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Phase(u8);

impl std::ops::Mul for Phase {
    type Output = Phase;

    fn mul(self, other: Phase) -> Phase {
        Phase((self.0 + other.0) % 4)
    }
}

impl Phase {
    pub const PLUS_ONE: Phase = Phase(0);
    pub const PLUS_I: Phase = Phase(1);
    pub const MINUS_ONE: Phase = Phase(2);
    pub const MINUS_I: Phase = Phase(3);

    pub fn from_exponent(k: i64) -> Self {
        Phase(k.rem_euclid(4) as u8)
    }

    pub fn exponent(self) -> u8 {
        self.0
    }

    pub fn value(self) -> num_complex::Complex64 {
        match self.0 {
            0 => c(1.0, 0.0),
            1 => c(0.0, 1.0),
            2 => c(-1.0, 0.0),
            _ => c(0.0, -1.0),
        }
    }

    pub fn prefix(self) -> &'static str {
        match self.0 {
            0 => "",
            1 => "+i",
            2 => "-",
            _ => "-i",
        }
    }
}

const WORD_BITS: usize = 64;

fn word_count(n_qubits: usize) -> usize {
    n_qubits.div_ceil(WORD_BITS)
}

fn popcount_and(a: &[u64], b: &[u64]) -> u32 {
    a.iter().zip(b).map(|(x, y)| (x & y).count_ones()).sum()
}

/// A phase-tagged tensor product of single-qubit Pauli operators.
///
/// Qubit 0 is the leftmost letter in the text form and the most significant
/// bit of a computational-basis index.
///
/// ```
/// use accredia::pauli::PauliString;
///
/// let a: PauliString = "XZ".parse()?;
/// let b: PauliString = "YI".parse()?;
/// assert_eq!(a.multiply(&b)?.to_string(), "+iZZ");
/// assert!(!a.commutes_with(&b)?);
/// # Ok::<(), accredia::Error>(())
/// ```
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString {
    n_qubits: usize,
    phase: Phase,
    xs: Vec<u64>,
    zs: Vec<u64>,
}

impl PauliString {
    /// The all-identity string with phase `+1`: the multiplicative unit.
    pub fn identity(n_qubits: usize) -> Self {
        assert!(n_qubits > 0, "a Pauli string needs at least one qubit");
        PauliString {
            n_qubits,
            phase: Phase::PLUS_ONE,
            xs: vec![0; word_count(n_qubits)],
            zs: vec![0; word_count(n_qubits)],
        }
    }

    pub fn from_letters(letters: &[PauliLetter], phase: Phase) -> Self {
        let mut p = PauliString::identity(letters.len());
        p.phase = phase;
        for (q, &letter) in letters.iter().enumerate() {
            p.set_letter(q, letter);
        }
        p
    }

    /// The `index`-th of the `4^n` phase-free words, in lexicographic order
    /// over letters `I < X < Y < Z` with qubit 0 as the most significant
    /// base-4 digit. Index 0 is the identity.
    pub fn word_from_index(index: usize, n_qubits: usize) -> Self {
        assert!(index < 1usize << (2 * n_qubits), "word index out of range");
        let letters: Vec<PauliLetter> = (0..n_qubits)
            .map(|q| {
                let digit = (index >> (2 * (n_qubits - 1 - q))) & 0b11;
                match digit {
                    0 => PauliLetter::I,
                    1 => PauliLetter::X,
                    2 => PauliLetter::Y,
                    _ => PauliLetter::Z,
                }
            })
            .collect();
        PauliString::from_letters(&letters, Phase::PLUS_ONE)
    }

    /// A single non-identity letter at `qubit`, identity elsewhere, phase `+1`.
    pub fn single(n_qubits: usize, qubit: usize, letter: PauliLetter) -> Result<Self> {
        if qubit >= n_qubits {
            return Err(Error::parameter(
                "qubit",
                format!("index {qubit} out of range for {n_qubits} qubits"),
            ));
        }
        let mut p = PauliString::identity(n_qubits);
        p.set_letter(qubit, letter);
        Ok(p)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn with_phase(&self, phase: Phase) -> Self {
        let mut p = self.clone();
        p.phase = phase;
        p
    }

    /// Same letters, phase reset to `+1`.
    pub fn phase_free(&self) -> Self {
        self.with_phase(Phase::PLUS_ONE)
    }

    pub fn letter(&self, qubit: usize) -> PauliLetter {
        let (w, b) = (qubit / WORD_BITS, qubit % WORD_BITS);
        let x = (self.xs[w] >> b) & 1 == 1;
        let z = (self.zs[w] >> b) & 1 == 1;
        PauliLetter::from_bits(x, z)
    }

    pub fn letters(&self) -> Vec<PauliLetter> {
        (0..self.n_qubits).map(|q| self.letter(q)).collect()
    }

    fn set_letter(&mut self, qubit: usize, letter: PauliLetter) {
        let (w, b) = (qubit / WORD_BITS, qubit % WORD_BITS);
        let (x, z) = letter.bits();
        self.xs[w] = (self.xs[w] & !(1 << b)) | ((x as u64) << b);
        self.zs[w] = (self.zs[w] & !(1 << b)) | ((z as u64) << b);
    }

    /// True when every letter is `I` (the phase is ignored).
    pub fn is_identity_word(&self) -> bool {
        self.xs.iter().all(|&w| w == 0) && self.zs.iter().all(|&w| w == 0)
    }

    /// Number of non-identity letters.
    pub fn weight(&self) -> usize {
        self.xs
            .iter()
            .zip(&self.zs)
            .map(|(x, z)| (x | z).count_ones() as usize)
            .sum()
    }

    /// Indices of the qubits carrying a non-identity letter, ascending.
    pub fn support(&self) -> Vec<usize> {
        (0..self.n_qubits)
            .filter(|&q| self.letter(q) != PauliLetter::I)
            .collect()
    }

    fn check_dims(&self, other: &PauliString, context: &'static str) -> Result<()> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::DimensionMismatch {
                context,
                left: self.n_qubits,
                right: other.n_qubits,
            });
        }
        Ok(())
    }

    /// Group product with exact phase tracking.
    ///
    /// Writing each string as `i^e * X^x Z^z` (with `Y = i X Z`), the product
    /// phase picks up `(-1)^(z_a & x_b)` from commuting `Z^z_a` past `X^x_b`.
    pub fn multiply(&self, other: &PauliString) -> Result<PauliString> {
        self.check_dims(other, "pauli multiply")?;
        let y_a = popcount_and(&self.xs, &self.zs) as i64;
        let y_b = popcount_and(&other.xs, &other.zs) as i64;
        let swaps = popcount_and(&self.zs, &other.xs) as i64;

        let xs: Vec<u64> = self.xs.iter().zip(&other.xs).map(|(a, b)| a ^ b).collect();
        let zs: Vec<u64> = self.zs.iter().zip(&other.zs).map(|(a, b)| a ^ b).collect();
        let y_out = xs
            .iter()
            .zip(&zs)
            .map(|(x, z)| (x & z).count_ones() as i64)
            .sum::<i64>();

        let exponent = i64::from(self.phase.exponent())
            + i64::from(other.phase.exponent())
            + y_a
            + y_b
            + 2 * swaps
            - y_out;
        Ok(PauliString {
            n_qubits: self.n_qubits,
            phase: Phase::from_exponent(exponent),
            xs,
            zs,
        })
    }

    /// True when the two strings commute; phases are irrelevant.
    pub fn commutes_with(&self, other: &PauliString) -> Result<bool> {
        self.check_dims(other, "pauli commutation")?;
        let sym = popcount_and(&self.xs, &other.zs) + popcount_and(&self.zs, &other.xs);
        Ok(sym.is_multiple_of(2))
    }

    /// Dense `2^N x 2^N` matrix: phase times the Kronecker product of the
    /// single-qubit letters, qubit 0 as the most significant factor.
    pub fn to_matrix(&self) -> Result<CMat> {
        capacity::check_state("pauli to_matrix", self.n_qubits)?;
        let mut m = self.letter(0).matrix();
        for q in 1..self.n_qubits {
            m = linalg::kron(&m, &self.letter(q).matrix());
        }
        Ok(m.mapv(|v| v * self.phase.value()))
    }
}

/// `+1` if `sigma` and `term` commute (`sigma term sigma = +term`), `-1` if
/// they anticommute. Phases of both operands are ignored.
pub fn conjugate_sign(sigma: &PauliString, term: &PauliString) -> Result<i8> {
    Ok(if sigma.commutes_with(term)? { 1 } else { -1 })
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.phase.prefix())?;
        for q in 0..self.n_qubits {
            write!(f, "{}", self.letter(q).symbol())?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = Error;

    /// Parses `"XIZY"` with an optional phase prefix `+i`, `i`, `-i`, `-`, `+`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (phase, rest) = if let Some(r) = s.strip_prefix("+i").or_else(|| s.strip_prefix("i")) {
            (Phase::PLUS_I, r)
        } else if let Some(r) = s.strip_prefix("-i") {
            (Phase::MINUS_I, r)
        } else if let Some(r) = s.strip_prefix('-') {
            (Phase::MINUS_ONE, r)
        } else if let Some(r) = s.strip_prefix('+') {
            (Phase::PLUS_ONE, r)
        } else {
            (Phase::PLUS_ONE, s)
        };
        if rest.is_empty() {
            return Err(Error::Parse("empty Pauli word".into()));
        }
        let letters: Result<Vec<PauliLetter>> =
            rest.chars().map(PauliLetter::from_symbol).collect();
        Ok(PauliString::from_letters(&letters?, phase))
    }
}

impl Serialize for PauliString {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for PauliString {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(D::Error::custom)
    }
}

/// One term of a Hamiltonian in its JSON form.
#[derive(Serialize, Deserialize)]
struct TermJson {
    coeff: f64,
    pauli: String,
}

/// A real-weighted sum of phase-free Pauli strings.
///
/// Ingest canonicalises: duplicate letter words are merged (first-occurrence
/// order kept), real phases are folded into the coefficient, and coefficients
/// below [`COEFF_CUTOFF`] are dropped.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedHamiltonian {
    n_qubits: usize,
    terms: Vec<(f64, PauliString)>,
}

impl WeightedHamiltonian {
    /// Builds a Hamiltonian, rejecting all-identity terms.
    pub fn new(n_qubits: usize, terms: Vec<(f64, PauliString)>) -> Result<Self> {
        Self::build(n_qubits, terms, false)
    }

    /// Builds a Hamiltonian, keeping all-identity terms (they only shift a
    /// global phase of the evolution).
    pub fn new_permitting_identity(
        n_qubits: usize,
        terms: Vec<(f64, PauliString)>,
    ) -> Result<Self> {
        Self::build(n_qubits, terms, true)
    }

    fn build(
        n_qubits: usize,
        terms: Vec<(f64, PauliString)>,
        permit_identity: bool,
    ) -> Result<Self> {
        if n_qubits == 0 {
            return Err(Error::parameter("n_qubits", "must be positive"));
        }
        let mut merged: Vec<(f64, PauliString)> = Vec::new();
        for (coeff, pauli) in terms {
            if pauli.n_qubits() != n_qubits {
                return Err(Error::DimensionMismatch {
                    context: "hamiltonian term",
                    left: n_qubits,
                    right: pauli.n_qubits(),
                });
            }
            let coeff = match pauli.phase() {
                Phase::PLUS_ONE => coeff,
                Phase::MINUS_ONE => -coeff,
                _ => {
                    return Err(Error::parameter(
                        "terms",
                        format!(
                            "term `{pauli}` has an imaginary phase; Hamiltonians are Hermitian"
                        ),
                    ))
                }
            };
            let word = pauli.phase_free();
            match merged.iter_mut().find(|(_, p)| *p == word) {
                Some((c0, _)) => *c0 += coeff,
                None => merged.push((coeff, word)),
            }
        }
        merged.retain(|(c0, _)| c0.abs() >= COEFF_CUTOFF);
        if !permit_identity {
            if let Some((c0, p)) = merged.iter().find(|(_, p)| p.is_identity_word()) {
                return Err(Error::parameter(
                    "terms",
                    format!(
                        "all-identity term with coefficient {c0} (it only shifts a global \
                         phase; use new_permitting_identity to keep it): {p}"
                    ),
                ));
            }
        }
        Ok(WeightedHamiltonian {
            n_qubits,
            terms: merged,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn terms(&self) -> &[(f64, PauliString)] {
        &self.terms
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn has_non_identity_term(&self) -> bool {
        self.terms.iter().any(|(_, p)| !p.is_identity_word())
    }

    /// `sum_j |c_j|`, the l1 norm of the coefficient vector.
    pub fn coefficient_l1(&self) -> f64 {
        self.terms.iter().map(|(c0, _)| c0.abs()).sum()
    }

    /// Dense Hermitian matrix of the Hamiltonian.
    pub fn matrix(&self) -> Result<CMat> {
        capacity::check_state("hamiltonian matrix", self.n_qubits)?;
        let dim = 1usize << self.n_qubits;
        let mut m: CMat = ndarray::Array2::zeros((dim, dim));
        for (coeff, pauli) in &self.terms {
            m = m + pauli.to_matrix()?.mapv(|v| v * c(*coeff, 0.0));
        }
        Ok(m)
    }

    /// Parses the JSON form `[{"coeff": 1.0, "pauli": "ZZ"}, ...]`.
    pub fn from_json(json: &str) -> Result<Self> {
        let raw: Vec<TermJson> =
            serde_json::from_str(json).map_err(|e| Error::Parse(e.to_string()))?;
        if raw.is_empty() {
            return Err(Error::Parse("hamiltonian JSON has no terms".into()));
        }
        let mut terms = Vec::with_capacity(raw.len());
        for t in &raw {
            terms.push((t.coeff, t.pauli.parse::<PauliString>()?));
        }
        let n_qubits = terms[0].1.n_qubits();
        Self::new(n_qubits, terms)
    }

    pub fn to_json(&self) -> String {
        let raw: Vec<TermJson> = self
            .terms
            .iter()
            .map(|(coeff, pauli)| TermJson {
                coeff: *coeff,
                pauli: pauli.to_string(),
            })
            .collect();
        serde_json::to_string_pretty(&raw).expect("hamiltonian serialisation cannot fail")
    }
}

impl Serialize for WeightedHamiltonian {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let raw: Vec<TermJson> = self
            .terms
            .iter()
            .map(|(coeff, pauli)| TermJson {
                coeff: *coeff,
                pauli: pauli.to_string(),
            })
            .collect();
        raw.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for WeightedHamiltonian {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw: Vec<TermJson> = Vec::deserialize(deserializer)?;
        if raw.is_empty() {
            return Err(D::Error::custom("hamiltonian has no terms"));
        }
        let mut terms = Vec::with_capacity(raw.len());
        for t in &raw {
            terms.push((
                t.coeff,
                t.pauli.parse::<PauliString>().map_err(D::Error::custom)?,
            ));
        }
        let n_qubits = terms[0].1.n_qubits();
        WeightedHamiltonian::new(n_qubits, terms).map_err(D::Error::custom)
    }
}
