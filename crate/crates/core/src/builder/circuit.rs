//! Hybrid circuit representation: single-qubit gate layers interleaved with
//! analogue evolution segments.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::bitstring::Bitstring;
use crate::error::{Error, Result};
use crate::linalg::{c, CMat, C_ONE, C_ZERO};
use crate::pauli::{PauliLetter, WeightedHamiltonian};

/// The single-qubit gate alphabet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BaseGate {
    I,
    X,
    Y,
    Z,
    H,
}

impl BaseGate {
    pub fn matrix(self) -> CMat {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        match self {
            BaseGate::I => ndarray::array![[C_ONE, C_ZERO], [C_ZERO, C_ONE]],
            BaseGate::X => ndarray::array![[C_ZERO, C_ONE], [C_ONE, C_ZERO]],
            BaseGate::Y => ndarray::array![[C_ZERO, c(0.0, -1.0)], [c(0.0, 1.0), C_ZERO]],
            BaseGate::Z => ndarray::array![[C_ONE, C_ZERO], [C_ZERO, -C_ONE]],
            BaseGate::H => ndarray::array![[c(s, 0.0), c(s, 0.0)], [c(s, 0.0), c(-s, 0.0)]],
        }
    }

    pub fn symbol(self) -> char {
        match self {
            BaseGate::I => 'I',
            BaseGate::X => 'X',
            BaseGate::Y => 'Y',
            BaseGate::Z => 'Z',
            BaseGate::H => 'H',
        }
    }

    pub fn from_symbol(ch: char) -> Result<Self> {
        match ch.to_ascii_uppercase() {
            'I' => Ok(BaseGate::I),
            'X' => Ok(BaseGate::X),
            'Y' => Ok(BaseGate::Y),
            'Z' => Ok(BaseGate::Z),
            'H' => Ok(BaseGate::H),
            other => Err(Error::Parse(format!("unknown gate `{other}`"))),
        }
    }
}

impl From<PauliLetter> for BaseGate {
    fn from(letter: PauliLetter) -> Self {
        match letter {
            PauliLetter::I => BaseGate::I,
            PauliLetter::X => BaseGate::X,
            PauliLetter::Y => BaseGate::Y,
            PauliLetter::Z => BaseGate::Z,
        }
    }
}

/// An ordered product of base gates on one qubit, kept as written.
///
/// `ops` lists gates in application order: `[Z, H]` applies Z first, then H.
/// Factors are never algebraically merged, so gate positions survive
/// serialisation round-trips. The text form joins symbols with `*` in
/// application order (`"Z*H"`), and an empty product prints as `"I"`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ComposedGate {
    ops: Vec<BaseGate>,
}

impl ComposedGate {
    pub fn identity() -> Self {
        ComposedGate { ops: Vec::new() }
    }

    pub fn single(gate: BaseGate) -> Self {
        Self::from_ops(vec![gate])
    }

    /// Identity factors are the empty product, so they are stripped for a
    /// canonical representation; all other factors are kept verbatim.
    pub fn from_ops(ops: Vec<BaseGate>) -> Self {
        ComposedGate {
            ops: ops.into_iter().filter(|&g| g != BaseGate::I).collect(),
        }
    }

    pub fn ops(&self) -> &[BaseGate] {
        &self.ops
    }

    pub fn is_identity(&self) -> bool {
        self.ops.iter().all(|&g| g == BaseGate::I)
    }

    /// 2x2 unitary: the product of the factors in application order.
    pub fn matrix(&self) -> CMat {
        let mut m = BaseGate::I.matrix();
        for g in &self.ops {
            m = g.matrix().dot(&m);
        }
        m
    }
}

impl fmt::Display for ComposedGate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.ops.is_empty() {
            return write!(f, "I");
        }
        let names: Vec<String> = self.ops.iter().map(|g| g.symbol().to_string()).collect();
        write!(f, "{}", names.join("*"))
    }
}

impl FromStr for ComposedGate {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Err(Error::Parse("empty gate name".into()));
        }
        let mut ops = Vec::new();
        for part in s.split('*') {
            let part = part.trim();
            if part.len() != 1 {
                return Err(Error::Parse(format!("bad gate factor `{part}`")));
            }
            ops.push(BaseGate::from_symbol(part.chars().next().unwrap())?);
        }
        Ok(ComposedGate::from_ops(ops))
    }
}

impl Serialize for ComposedGate {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for ComposedGate {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// One step of a circuit body.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Segment {
    /// One single-qubit gate per qubit.
    GateLayer(Vec<ComposedGate>),
    /// Analogue evolution under a registered Hamiltonian. Durations may be
    /// negative: reverse target evolutions are allowed and every formula is
    /// sign-agnostic.
    Evolution {
        hamiltonian_ref: usize,
        duration: f64,
    },
}

impl Segment {
    pub fn kind_label(&self) -> &'static str {
        match self {
            Segment::GateLayer(_) => "gate_layer",
            Segment::Evolution { .. } => "evolution",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CircuitKind {
    Bare,
    Target,
    Trap,
}

/// A full hybrid simulation: state preparation, a body of gate layers and
/// evolution segments, and a measured single-qubit gate layer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HybridCircuit {
    n_qubits: usize,
    kind: CircuitKind,
    hamiltonians: Vec<WeightedHamiltonian>,
    prep: Vec<ComposedGate>,
    body: Vec<Segment>,
    meas: Vec<ComposedGate>,
    expected_outcome: Option<Bitstring>,
    seed: Option<u64>,
}

impl HybridCircuit {
    pub fn new(
        n_qubits: usize,
        kind: CircuitKind,
        prep: Vec<ComposedGate>,
        meas: Vec<ComposedGate>,
    ) -> Result<Self> {
        if prep.len() != n_qubits || meas.len() != n_qubits {
            return Err(Error::DimensionMismatch {
                context: "circuit prep/meas layer",
                left: n_qubits,
                right: if prep.len() != n_qubits {
                    prep.len()
                } else {
                    meas.len()
                },
            });
        }
        Ok(HybridCircuit {
            n_qubits,
            kind,
            hamiltonians: Vec::new(),
            prep,
            body: Vec::new(),
            meas,
            expected_outcome: None,
            seed: None,
        })
    }

    /// A bare circuit with identity prep and measurement layers.
    pub fn bare(n_qubits: usize) -> Self {
        HybridCircuit::new(
            n_qubits,
            CircuitKind::Bare,
            vec![ComposedGate::identity(); n_qubits],
            vec![ComposedGate::identity(); n_qubits],
        )
        .expect("layer lengths match by construction")
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn kind(&self) -> CircuitKind {
        self.kind
    }

    pub fn prep(&self) -> &[ComposedGate] {
        &self.prep
    }

    pub fn body(&self) -> &[Segment] {
        &self.body
    }

    pub fn meas(&self) -> &[ComposedGate] {
        &self.meas
    }

    /// Replaces the preparation and measurement layers (lengths must match).
    pub fn set_prep_meas(
        &mut self,
        prep: Vec<ComposedGate>,
        meas: Vec<ComposedGate>,
    ) -> Result<()> {
        if prep.len() != self.n_qubits || meas.len() != self.n_qubits {
            return Err(Error::DimensionMismatch {
                context: "circuit prep/meas layer",
                left: self.n_qubits,
                right: if prep.len() != self.n_qubits {
                    prep.len()
                } else {
                    meas.len()
                },
            });
        }
        self.prep = prep;
        self.meas = meas;
        Ok(())
    }

    pub fn expected_outcome(&self) -> Option<Bitstring> {
        self.expected_outcome
    }

    pub fn set_expected_outcome(&mut self, outcome: Option<Bitstring>) {
        self.expected_outcome = outcome;
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn set_seed(&mut self, seed: Option<u64>) {
        self.seed = seed;
    }

    pub fn hamiltonians(&self) -> &[WeightedHamiltonian] {
        &self.hamiltonians
    }

    pub fn hamiltonian(&self, index: usize) -> Result<&WeightedHamiltonian> {
        self.hamiltonians
            .get(index)
            .ok_or_else(|| Error::MalformedCircuit(format!("hamiltonian_ref {index} unregistered")))
    }

    /// Registers a Hamiltonian, deduplicating exact repeats.
    pub fn register_hamiltonian(&mut self, h: &WeightedHamiltonian) -> usize {
        if let Some(i) = self.hamiltonians.iter().position(|x| x == h) {
            return i;
        }
        self.hamiltonians.push(h.clone());
        self.hamiltonians.len() - 1
    }

    pub fn push_segment(&mut self, segment: Segment) -> Result<()> {
        match &segment {
            Segment::GateLayer(gs) if gs.len() != self.n_qubits => {
                return Err(Error::DimensionMismatch {
                    context: "gate layer",
                    left: self.n_qubits,
                    right: gs.len(),
                })
            }
            Segment::Evolution {
                hamiltonian_ref, ..
            } => {
                self.hamiltonian(*hamiltonian_ref)?;
            }
            _ => {}
        }
        self.body.push(segment);
        Ok(())
    }

    /// Splices a fragment into the body, remapping its Hamiltonian reference.
    pub fn append_fragment(&mut self, fragment: &Fragment) -> Result<()> {
        if fragment.n_qubits() != self.n_qubits {
            return Err(Error::DimensionMismatch {
                context: "fragment",
                left: self.n_qubits,
                right: fragment.n_qubits(),
            });
        }
        let idx = self.register_hamiltonian(&fragment.hamiltonian);
        for seg in &fragment.segments {
            let remapped = match seg {
                Segment::Evolution { duration, .. } => Segment::Evolution {
                    hamiltonian_ref: idx,
                    duration: *duration,
                },
                s => s.clone(),
            };
            self.push_segment(remapped)?;
        }
        Ok(())
    }

    /// Kind labels of the body segments, in order; two circuits in the same
    /// redaction class have identical label sequences.
    pub fn segment_kinds(&self) -> Vec<&'static str> {
        self.body.iter().map(|s| s.kind_label()).collect()
    }

    /// Durations of the evolution segments, in order.
    pub fn evolution_durations(&self) -> Vec<f64> {
        self.body
            .iter()
            .filter_map(|s| match s {
                Segment::Evolution { duration, .. } => Some(*duration),
                _ => None,
            })
            .collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("circuit serialisation cannot fail")
    }

    pub fn from_json(json: &str) -> Result<Self> {
        let c: HybridCircuit =
            serde_json::from_str(json).map_err(|e| Error::Parse(e.to_string()))?;
        for seg in &c.body {
            if let Segment::Evolution {
                hamiltonian_ref, ..
            } = seg
            {
                c.hamiltonian(*hamiltonian_ref)?;
            }
        }
        Ok(c)
    }
}

/// A run of segments tied to one Hamiltonian, ready to be spliced into a
/// circuit (all `Evolution` segments reference index 0 until remapped).
#[derive(Debug, Clone, PartialEq)]
pub struct Fragment {
    pub hamiltonian: WeightedHamiltonian,
    pub segments: Vec<Segment>,
}

impl Fragment {
    pub fn n_qubits(&self) -> usize {
        self.hamiltonian.n_qubits()
    }

    pub fn evolution_durations(&self) -> Vec<f64> {
        self.segments
            .iter()
            .filter_map(|s| match s {
                Segment::Evolution { duration, .. } => Some(*duration),
                _ => None,
            })
            .collect()
    }
}
