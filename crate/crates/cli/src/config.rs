//! JSON config schemas for the subcommands. Unknown fields are rejected so
//! typos fail loudly, and every artifact echoes the resolved configuration.

use std::path::Path;

use anyhow::{Context, Result};
use serde::Deserialize;

use accredia::{ComposedGate, NoiseModel, WeightedHamiltonian};

fn default_seed() -> u64 {
    0
}

fn default_one() -> usize {
    1
}

/// Gate lists are given as names (`"I"`, `"H"`, `"Z*H"`); a missing list
/// means identity gates on every qubit.
pub fn parse_gates(
    names: Option<&[String]>,
    n_qubits: usize,
    field: &str,
) -> Result<Vec<ComposedGate>> {
    match names {
        None => Ok(vec![ComposedGate::identity(); n_qubits]),
        Some(names) => {
            anyhow::ensure!(
                names.len() == n_qubits,
                "field `{field}` lists {} gates for {} qubits",
                names.len(),
                n_qubits
            );
            names
                .iter()
                .map(|s| {
                    s.parse::<ComposedGate>()
                        .with_context(|| format!("field `{field}`, gate `{s}`"))
                })
                .collect()
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AccreditConfig {
    pub hamiltonian: WeightedHamiltonian,
    pub t: f64,
    pub eps: f64,
    pub theta: f64,
    pub alpha: f64,
    #[serde(default)]
    pub prep: Option<Vec<String>>,
    #[serde(default)]
    pub meas: Option<Vec<String>>,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_one")]
    pub target_shots: usize,
    #[serde(default = "default_one")]
    pub parallelism: usize,
    #[serde(default)]
    pub noise: Option<NoiseModel>,
}

/// Scalar values broadcast over every lattice edge or vertex.
#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum ScalarOrList {
    Scalar(f64),
    List(Vec<f64>),
}

impl ScalarOrList {
    pub fn materialise(&self, len: usize) -> Vec<f64> {
        match self {
            ScalarOrList::Scalar(v) => vec![*v; len],
            ScalarOrList::List(vs) => vs.clone(),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AdvantageConfig {
    pub rows: usize,
    pub cols: usize,
    pub couplings: ScalarOrList,
    pub fields: ScalarOrList,
    pub t: f64,
    pub eps: f64,
    pub theta: f64,
    pub alpha: f64,
    #[serde(default)]
    pub prep: Option<Vec<String>>,
    #[serde(default)]
    pub meas: Option<Vec<String>>,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_one")]
    pub target_shots: usize,
    #[serde(default = "default_one")]
    pub parallelism: usize,
    #[serde(default)]
    pub noise: Option<NoiseModel>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InvertBenchConfig {
    pub hamiltonian: WeightedHamiltonian,
    /// Duration of the inverted subcircuit being benchmarked.
    pub t: f64,
    #[serde(default)]
    pub m_values: Option<Vec<usize>>,
    #[serde(default)]
    pub eps_values: Option<Vec<f64>>,
}

/// Where the audit injects its error.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(untagged)]
pub enum InjectionConfig {
    Name(AfterPrepName),
    AfterSlice { after_slice: usize },
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AfterPrepName {
    AfterPrep,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrapAuditConfig {
    pub hamiltonian: WeightedHamiltonian,
    pub t: f64,
    pub eps: f64,
    /// Defaults to the middle slice boundary.
    #[serde(default)]
    pub injection: Option<InjectionConfig>,
    /// Pauli words to inject; defaults to every non-identity word.
    #[serde(default)]
    pub errors: Option<Vec<String>>,
}

pub fn load<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let raw = std::fs::read_to_string(path)
        .with_context(|| format!("reading config {}", path.display()))?;
    let value: T =
        serde_json::from_str(&raw).with_context(|| format!("parsing config {}", path.display()))?;
    Ok(value)
}
