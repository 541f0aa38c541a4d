//! Exact density-matrix simulation of hybrid circuits with CPTP noise.
//!
//! Noise is composed in deterministically (channels are averaged into the
//! state, never sampled), so [`output_distribution`] returns the exact
//! Born-rule distribution of a circuit under a noise instance. Sampling only
//! happens in [`execute`], which also redraws drift multipliers so that
//! distinct executions carry independent noise.

pub mod channel;
pub mod distribution;
pub mod noise;

pub use channel::{
    averaged_inversion_slice, averaged_inversion_subcircuit, channel_choi, choi_min_eigenvalue,
    choi_trace_distance, pauli_transfer_matrix, Channel,
};
pub use distribution::{tvd, Distribution};
pub use noise::{
    ChannelSpec, DriftSpec, Location, NoiseBinding, NoiseModel, ResolvedChannel, ResolvedNoise,
    SliceSelector,
};

use std::collections::HashMap;

use crate::bitstring::Bitstring;
use crate::builder::{ComposedGate, Fragment, HybridCircuit, Segment};
use crate::capacity;
use crate::error::{Error, Result};
use crate::linalg::{self, c, CMat};
use crate::pauli::WeightedHamiltonian;

/// `exp(-i H t)` by spectral decomposition of the (Hermitian) Hamiltonian.
pub fn exact_unitary(h: &WeightedHamiltonian, t: f64) -> Result<CMat> {
    capacity::check_state("exact unitary", h.n_qubits())?;
    Ok(linalg::expm_hermitian(&h.matrix()?, c(0.0, -t)))
}

/// The tensor product of a layer of single-qubit gates (qubit 0 leftmost).
pub fn layer_unitary(gates: &[ComposedGate]) -> CMat {
    let mut u = gates[0].matrix();
    for g in &gates[1..] {
        u = linalg::kron(&u, &g.matrix());
    }
    u
}

/// An exact density matrix on `n` qubits.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    n_qubits: usize,
    mat: CMat,
}

impl DensityMatrix {
    /// The pure all-zeros state.
    pub fn ground(n_qubits: usize) -> Result<Self> {
        capacity::check_state("density matrix", n_qubits)?;
        let d = 1usize << n_qubits;
        let mut mat: CMat = ndarray::Array2::zeros((d, d));
        mat[(0, 0)] = c(1.0, 0.0);
        Ok(DensityMatrix { n_qubits, mat })
    }

    pub fn from_matrix(mat: CMat) -> Result<Self> {
        let d = mat.nrows();
        if !d.is_power_of_two() || mat.ncols() != d {
            return Err(Error::MalformedCircuit(format!(
                "density matrix has shape {}x{}",
                mat.nrows(),
                mat.ncols()
            )));
        }
        let n_qubits = d.trailing_zeros() as usize;
        capacity::check_state("density matrix", n_qubits)?;
        Ok(DensityMatrix { n_qubits, mat })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn matrix(&self) -> &CMat {
        &self.mat
    }

    pub fn apply_unitary(&mut self, u: &CMat) {
        self.mat = u.dot(&self.mat).dot(&linalg::dagger(u));
    }

    pub fn apply_channel(&mut self, ch: &ResolvedChannel) {
        self.mat = ch.apply(&self.mat);
    }

    /// Born-rule probabilities of the computational basis.
    pub fn probabilities(&self) -> Vec<f64> {
        self.mat.diag().iter().map(|v| v.re).collect()
    }

    /// Checks the state invariants: Hermitian and unit trace within 1e-10,
    /// eigenvalues above -1e-9.
    pub fn validate(&self) -> Result<()> {
        if !linalg::is_hermitian(&self.mat, 1e-10) {
            return Err(Error::MalformedCircuit("state is not Hermitian".into()));
        }
        let tr = linalg::trace(&self.mat);
        if (tr - c(1.0, 0.0)).norm() > 1e-10 {
            return Err(Error::MalformedCircuit(format!("state trace is {tr}")));
        }
        let (w, _) = linalg::hermitian_eigen(&self.mat);
        if let Some(&min) = w.first() {
            if min < -1e-9 {
                return Err(Error::MalformedCircuit(format!(
                    "state has eigenvalue {min}"
                )));
            }
        }
        Ok(())
    }
}

/// Caches the spectral decomposition per registered Hamiltonian and the
/// resulting slice unitaries per (Hamiltonian, duration) pair, so circuits
/// with thousands of equal slices cost one decomposition.
struct EvolutionCache {
    eigs: HashMap<usize, (Vec<f64>, CMat)>,
    unitaries: HashMap<(usize, u64), CMat>,
}

impl EvolutionCache {
    fn new() -> Self {
        EvolutionCache {
            eigs: HashMap::new(),
            unitaries: HashMap::new(),
        }
    }

    fn unitary(&mut self, circuit: &HybridCircuit, ham_ref: usize, duration: f64) -> Result<CMat> {
        let key = (ham_ref, duration.to_bits());
        if let Some(u) = self.unitaries.get(&key) {
            return Ok(u.clone());
        }
        if let std::collections::hash_map::Entry::Vacant(entry) = self.eigs.entry(ham_ref) {
            let h = circuit.hamiltonian(ham_ref)?;
            capacity::check_state("evolution segment", h.n_qubits())?;
            entry.insert(linalg::hermitian_eigen(&h.matrix()?));
        }
        let (w, v) = &self.eigs[&ham_ref];
        let n = v.nrows();
        let mut scaled = v.clone();
        for (k, &wk) in w.iter().enumerate() {
            let e = (c(0.0, -duration) * wk).exp();
            for r in 0..n {
                scaled[(r, k)] *= e;
            }
        }
        let u = scaled.dot(&linalg::dagger(v));
        self.unitaries.insert(key, u.clone());
        Ok(u)
    }
}

/// Runs the deterministic channel composition of a circuit under a resolved
/// noise instance and returns the exact readout distribution.
pub fn output_distribution_resolved(
    circuit: &HybridCircuit,
    noise: Option<&ResolvedNoise>,
) -> Result<Distribution> {
    let n = circuit.n_qubits();
    capacity::check_state("output distribution", n)?;
    if let Some(rn) = noise {
        if rn.n_qubits() != n {
            return Err(Error::DimensionMismatch {
                context: "noise instance",
                left: n,
                right: rn.n_qubits(),
            });
        }
    }

    let mut cache = EvolutionCache::new();
    let mut rho = DensityMatrix::ground(n)?;

    rho.apply_unitary(&layer_unitary(circuit.prep()));
    if let Some(rn) = noise {
        for ch in rn.at_prep() {
            rho.apply_channel(ch);
        }
    }

    let mut slice = 0usize;
    for seg in circuit.body() {
        match seg {
            Segment::GateLayer(gates) => {
                rho.apply_unitary(&layer_unitary(gates));
                if let Some(rn) = noise {
                    for ch in rn.at_gate_layer() {
                        rho.apply_channel(ch);
                    }
                }
            }
            Segment::Evolution {
                hamiltonian_ref,
                duration,
            } => {
                let u = cache.unitary(circuit, *hamiltonian_ref, *duration)?;
                rho.apply_unitary(&u);
                if let Some(rn) = noise {
                    for ch in rn.at_slice(slice) {
                        rho.apply_channel(ch);
                    }
                }
                slice += 1;
            }
        }
    }

    rho.apply_unitary(&layer_unitary(circuit.meas()));
    if let Some(rn) = noise {
        for ch in rn.at_measurement() {
            rho.apply_channel(ch);
        }
    }

    Distribution::from_probabilities(&rho.probabilities(), n)
}

/// [`output_distribution_resolved`] with the no-drift instance of a noise
/// model; with `noise = None` this is the ideal distribution.
pub fn output_distribution(
    circuit: &HybridCircuit,
    noise: Option<&NoiseModel>,
) -> Result<Distribution> {
    let resolved = noise.map(|nm| nm.nominal(circuit.n_qubits())).transpose()?;
    output_distribution_resolved(circuit, resolved.as_ref())
}

/// One noisy execution of a circuit: the drift multipliers are redrawn for
/// this execution, then `shots` outcomes are sampled from the resulting
/// exact distribution. Same seed and inputs give an identical shot list.
pub fn execute<R: rand::Rng>(
    circuit: &HybridCircuit,
    noise: Option<&NoiseModel>,
    rng: &mut R,
    shots: usize,
) -> Result<Vec<Bitstring>> {
    if shots == 0 {
        return Err(Error::parameter("shots", "must be at least 1"));
    }
    let resolved = noise
        .map(|nm| nm.resolve(circuit.n_qubits(), rng))
        .transpose()?;
    let dist = output_distribution_resolved(circuit, resolved.as_ref())?;
    Ok((0..shots).map(|_| dist.sample(rng)).collect())
}

/// The unitary implemented by a noiseless fragment (gate layers and exact
/// slice exponentials multiplied in order).
pub fn fragment_unitary(fragment: &Fragment) -> Result<CMat> {
    let n = fragment.n_qubits();
    capacity::check_state("fragment unitary", n)?;
    let (w, v) = linalg::hermitian_eigen(&fragment.hamiltonian.matrix()?);
    let dim = 1usize << n;
    let mut total = linalg::identity(dim);
    for seg in &fragment.segments {
        let u = match seg {
            Segment::GateLayer(gates) => layer_unitary(gates),
            Segment::Evolution { duration, .. } => {
                let mut scaled = v.clone();
                for (k, &wk) in w.iter().enumerate() {
                    let e = (c(0.0, -duration) * wk).exp();
                    for r in 0..dim {
                        scaled[(r, k)] *= e;
                    }
                }
                scaled.dot(&linalg::dagger(&v))
            }
        };
        total = u.dot(&total);
    }
    Ok(total)
}

/// The (noiseless) channel of a fragment with its draws fixed.
pub fn fragment_channel(fragment: &Fragment) -> Result<Channel> {
    Channel::from_unitary(&fragment_unitary(fragment)?)
}

/// The Choi state of a fragment's channel.
pub fn fragment_choi(fragment: &Fragment) -> Result<CMat> {
    Ok(fragment_channel(fragment)?.choi())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builder::{BaseGate, CircuitKind};
    use crate::rng::root_rng;

    fn ham(json: &str) -> WeightedHamiltonian {
        WeightedHamiltonian::from_json(json).unwrap()
    }

    #[test]
    fn exact_unitary_examples() {
        // exp(-i Z pi) = -I.
        let u =
            exact_unitary(&ham(r#"[{"coeff":1.0,"pauli":"Z"}]"#), std::f64::consts::PI).unwrap();
        assert!(linalg::max_abs(&(&u + &linalg::identity(2))) < 1e-11);

        // t = 0 is the identity.
        let u = exact_unitary(&ham(r#"[{"coeff":1.0,"pauli":"ZZ"}]"#), 0.0).unwrap();
        assert!(linalg::max_abs(&(&u - &linalg::identity(4))) < 1e-12);

        // exp(-i X pi/2) = -i X.
        let u = exact_unitary(
            &ham(r#"[{"coeff":1.0,"pauli":"X"}]"#),
            std::f64::consts::FRAC_PI_2,
        )
        .unwrap();
        let expect = "X"
            .parse::<crate::pauli::PauliString>()
            .unwrap()
            .to_matrix()
            .unwrap()
            .mapv(|v| v * c(0.0, -1.0));
        assert!(linalg::max_abs(&(&u - &expect)) < 1e-11);
    }

    #[test]
    fn bare_circuit_reads_all_zeros() {
        let circuit = HybridCircuit::bare(2);
        let dist = output_distribution(&circuit, None).unwrap();
        assert!((dist.prob(&Bitstring::zeros(2)) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn hadamard_prep_gives_uniform_bit() {
        let circuit = HybridCircuit::new(
            1,
            CircuitKind::Bare,
            vec![ComposedGate::single(BaseGate::H)],
            vec![ComposedGate::identity()],
        )
        .unwrap();
        let dist = output_distribution(&circuit, None).unwrap();
        assert!((dist.prob(&"0".parse().unwrap()) - 0.5).abs() < 1e-12);
        assert!((dist.prob(&"1".parse().unwrap()) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn single_slice_bit_flip_channel() {
        // 1-qubit identity body with an X rate of 0.2 bound to any slice.
        let h = ham(r#"[{"coeff":1.0,"pauli":"Z"}]"#);
        let mut circuit = HybridCircuit::bare(1);
        let idx = circuit.register_hamiltonian(&h);
        circuit
            .push_segment(Segment::Evolution {
                hamiltonian_ref: idx,
                duration: 0.0,
            })
            .unwrap();
        let noise = NoiseModel::from_json(
            r#"[{"where": "evolution_slice", "channel": {"kind": "stochastic_pauli", "rates": {"X": 0.2}}}]"#,
        )
        .unwrap();
        let dist = output_distribution(&circuit, Some(&noise)).unwrap();
        assert!((dist.prob(&"0".parse().unwrap()) - 0.8).abs() < 1e-12);
        assert!((dist.prob(&"1".parse().unwrap()) - 0.2).abs() < 1e-12);
    }

    #[test]
    fn execute_is_deterministic_per_seed() {
        let h = ham(r#"[{"coeff":1.0,"pauli":"Z"}]"#);
        let mut circuit = HybridCircuit::new(
            1,
            CircuitKind::Bare,
            vec![ComposedGate::single(BaseGate::H)],
            vec![ComposedGate::identity()],
        )
        .unwrap();
        let idx = circuit.register_hamiltonian(&h);
        circuit
            .push_segment(Segment::Evolution {
                hamiltonian_ref: idx,
                duration: 0.3,
            })
            .unwrap();
        let a = execute(&circuit, None, &mut root_rng(11), 64).unwrap();
        let b = execute(&circuit, None, &mut root_rng(11), 64).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn binomial_concentration_at_1e5_shots() {
        // Distribution {0: 0.8, 1: 0.2}: the empirical frequency of 1 should
        // land within 0.2 +- 0.01 at 1e5 shots.
        let h = ham(r#"[{"coeff":1.0,"pauli":"Z"}]"#);
        let mut circuit = HybridCircuit::bare(1);
        let idx = circuit.register_hamiltonian(&h);
        circuit
            .push_segment(Segment::Evolution {
                hamiltonian_ref: idx,
                duration: 0.0,
            })
            .unwrap();
        let noise = NoiseModel::from_json(
            r#"[{"where": "evolution_slice", "channel": {"kind": "stochastic_pauli", "rates": {"X": 0.2}}}]"#,
        )
        .unwrap();
        let shots = execute(&circuit, Some(&noise), &mut root_rng(2), 100_000).unwrap();
        let ones = shots.iter().filter(|b| !b.is_all_zero()).count() as f64;
        let freq = ones / shots.len() as f64;
        assert!((freq - 0.2).abs() < 0.01, "frequency {freq}");
    }

    #[test]
    fn fragment_unitary_multiplies_segments() {
        let h = ham(r#"[{"coeff":1.0,"pauli":"Z"}]"#);
        let frag = Fragment {
            hamiltonian: h.clone(),
            segments: vec![
                Segment::Evolution {
                    hamiltonian_ref: 0,
                    duration: 0.4,
                },
                Segment::Evolution {
                    hamiltonian_ref: 0,
                    duration: 0.6,
                },
            ],
        };
        let u = fragment_unitary(&frag).unwrap();
        let expect = exact_unitary(&h, 1.0).unwrap();
        assert!(linalg::max_abs(&(&u - &expect)) < 1e-12);
    }
}
