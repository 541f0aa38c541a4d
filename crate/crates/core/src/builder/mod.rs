//! Synthesis of evolution subcircuits, vanishing blocks, and trap/target
//! simulations.
//!
//! A subcircuit splits an evolution of duration `t` into `M` exact slices
//! `exp(-i H t / M)`. Sandwiching every slice between identical single-qubit
//! gate layers leaves the evolution untouched (forward direction) or, with
//! layers drawn from the Hamiltonian's inversion set, implements the reversed
//! evolution `exp(+i H t / (L-1))` up to additive error `eps` (inverted
//! direction). Targets wrap a forward block in the requested preparation and
//! measurement; traps wrap an inverted block in randomised Pauli/Hadamard
//! dressing and must read all-zeros when nothing went wrong.

mod circuit;

pub use circuit::{BaseGate, CircuitKind, ComposedGate, Fragment, HybridCircuit, Segment};

use rand::{Rng, RngExt};

use crate::bitstring::Bitstring;
use crate::error::{Error, Result};
use crate::hypergraph::{build_inversion_group, InversionGroup};
use crate::pauli::WeightedHamiltonian;

/// The `t = t1 + t2` split used by vanishing blocks.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SplitTimes {
    pub t1: f64,
    pub t2: f64,
}

/// Which subcircuit variant to synthesise.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// Identity sandwiches; the subcircuit equals `exp(-i H t)` exactly.
    Forward,
    /// Random inversion-set sandwiches; approximates `exp(+i H t / (L-1))`.
    Inverted,
}

/// Number of slices needed to keep the inverted subcircuit within additive
/// error `eps`: `ceil(2 t^2 (sum_j |c_j|)^2 L / (eps (L-1)))`, minimum 1.
pub fn compute_m(h: &WeightedHamiltonian, t: f64, eps: f64, l: usize) -> Result<usize> {
    if l < 2 {
        return Err(Error::parameter(
            "l",
            format!("inversion is undefined for a group of order {l}"),
        ));
    }
    if eps.is_nan() || eps <= 0.0 {
        return Err(Error::parameter(
            "eps",
            format!("must be positive, got {eps}"),
        ));
    }
    if !t.is_finite() {
        return Err(Error::parameter("t", format!("must be finite, got {t}")));
    }
    let l1 = h.coefficient_l1();
    let raw = 2.0 * t * t * l1 * l1 * (l as f64) / (eps * (l as f64 - 1.0));
    // Guard the ceil against float noise landing just above an integer.
    let m = (raw - 1e-9).ceil() as i64;
    Ok(m.max(1) as usize)
}

/// `t1 = t / L`, `t2 = (L-1) t / L`; then `t1 + t2 = t` and
/// `t1 - t2/(L-1) = 0`.
pub fn split_time(t: f64, l: usize) -> Result<SplitTimes> {
    if l < 2 {
        return Err(Error::parameter(
            "l",
            format!("time split needs a group of order at least 2, got {l}"),
        ));
    }
    if !t.is_finite() {
        return Err(Error::parameter("t", format!("must be finite, got {t}")));
    }
    let lf = l as f64;
    Ok(SplitTimes {
        t1: t / lf,
        t2: (lf - 1.0) * t / lf,
    })
}

/// Largest slice count a materialised circuit may carry. Channel-level
/// analysis has no such cap (slice powers compose by squaring), but a
/// circuit stores every slice explicitly.
pub const MAX_CIRCUIT_SLICES: usize = 1_000_000;

fn subcircuit_segments<R: Rng>(
    h: &WeightedHamiltonian,
    group: &InversionGroup,
    t: f64,
    eps: f64,
    direction: Direction,
    rng: &mut R,
) -> Result<Vec<Segment>> {
    let m = compute_m(h, t, eps, group.len())?;
    if m > MAX_CIRCUIT_SLICES {
        return Err(Error::parameter(
            "eps",
            format!(
                "slice count {m} exceeds the circuit maximum {MAX_CIRCUIT_SLICES}; \
                 raise eps or shorten t"
            ),
        ));
    }
    let dt = t / m as f64;
    let n = h.n_qubits();
    let non_identity = group.non_identity_elements();
    let mut segments = Vec::with_capacity(3 * m);
    for _ in 0..m {
        let layer: Vec<ComposedGate> = match direction {
            Direction::Forward => vec![ComposedGate::single(BaseGate::I); n],
            Direction::Inverted => {
                let sigma = non_identity[rng.random_range(0..non_identity.len())];
                (0..n)
                    .map(|q| ComposedGate::single(sigma.letter(q).into()))
                    .collect()
            }
        };
        segments.push(Segment::GateLayer(layer.clone()));
        segments.push(Segment::Evolution {
            hamiltonian_ref: 0,
            duration: dt,
        });
        segments.push(Segment::GateLayer(layer));
    }
    Ok(segments)
}

/// `M` sandwiched slices of `exp(-i H t / M)`.
///
/// Slice count and layer positions are identical for both directions given
/// equal inputs; only the gate-layer contents differ. The inversion set is
/// synthesised internally; sandwich draws are uniform over its non-identity
/// elements, independently per slice. `rng` is only consumed in the inverted
/// direction.
pub fn build_evolution_subcircuit<R: Rng>(
    h: &WeightedHamiltonian,
    t: f64,
    eps: f64,
    direction: Direction,
    rng: &mut R,
) -> Result<Fragment> {
    let group = build_inversion_group(h)?;
    Ok(Fragment {
        hamiltonian: h.clone(),
        segments: subcircuit_segments(h, &group, t, eps, direction, rng)?,
    })
}

/// A bare evolution of duration `t1` followed by a subcircuit of duration
/// `t2`. Forward blocks equal `exp(-i H t)`; noiseless inverted blocks are
/// within `eps` of the identity channel.
pub fn build_vanishing_block<R: Rng>(
    h: &WeightedHamiltonian,
    t: f64,
    eps: f64,
    direction: Direction,
    rng: &mut R,
) -> Result<Fragment> {
    let group = build_inversion_group(h)?;
    let split = split_time(t, group.len())?;
    let mut segments = vec![Segment::Evolution {
        hamiltonian_ref: 0,
        duration: split.t1,
    }];
    segments.extend(subcircuit_segments(
        h, &group, split.t2, eps, direction, rng,
    )?);
    Ok(Fragment {
        hamiltonian: h.clone(),
        segments,
    })
}

/// The requested simulation: `prep` on the all-zeros state, a forward
/// vanishing block, the measurement basis change, and Z-basis readout.
pub fn build_target(
    h: &WeightedHamiltonian,
    t: f64,
    eps: f64,
    prep: &[ComposedGate],
    meas: &[ComposedGate],
) -> Result<HybridCircuit> {
    let n = h.n_qubits();
    if prep.len() != n || meas.len() != n {
        return Err(Error::DimensionMismatch {
            context: "target prep/meas gates",
            left: n,
            right: if prep.len() != n {
                prep.len()
            } else {
                meas.len()
            },
        });
    }
    let mut circuit = HybridCircuit::new(n, CircuitKind::Target, prep.to_vec(), meas.to_vec())?;
    // The forward direction draws nothing, so any rng value works here.
    let mut unused = crate::rng::root_rng(0);
    let block = build_vanishing_block(h, t, eps, Direction::Forward, &mut unused)?;
    circuit.append_fragment(&block)?;
    Ok(circuit)
}

/// A trap simulation in the same redaction class as the target.
///
/// Per qubit the pre-layer applies, in order: Z with probability one half,
/// Hadamard if the shared coin came up, then a uniformly random Pauli. The
/// body is an inverted vanishing block. The post-layer applies the same
/// Pauli, the shared Hadamard, then an independent Z coin. Draw order per
/// trap is: shared coin, per-qubit (Z, Pauli) pairs, slice sandwiches,
/// per-qubit post Z coins.
pub fn build_trap<R: Rng>(
    h: &WeightedHamiltonian,
    t: f64,
    eps: f64,
    rng: &mut R,
) -> Result<HybridCircuit> {
    let n = h.n_qubits();
    let shared_hadamard = rng.random_bool(0.5);
    let pauli_choices = [BaseGate::I, BaseGate::X, BaseGate::Y, BaseGate::Z];

    let mut prep = Vec::with_capacity(n);
    let mut paulis = Vec::with_capacity(n);
    for _ in 0..n {
        let z_coin = rng.random_bool(0.5);
        let pauli = pauli_choices[rng.random_range(0..4)];
        let mut ops = Vec::new();
        if z_coin {
            ops.push(BaseGate::Z);
        }
        if shared_hadamard {
            ops.push(BaseGate::H);
        }
        ops.push(pauli);
        prep.push(ComposedGate::from_ops(ops));
        paulis.push(pauli);
    }

    let block = build_vanishing_block(h, t, eps, Direction::Inverted, rng)?;

    let mut meas = Vec::with_capacity(n);
    for &pauli in &paulis {
        let z_coin = rng.random_bool(0.5);
        let mut ops = vec![pauli];
        if shared_hadamard {
            ops.push(BaseGate::H);
        }
        if z_coin {
            ops.push(BaseGate::Z);
        }
        meas.push(ComposedGate::from_ops(ops));
    }

    let mut circuit = HybridCircuit::new(n, CircuitKind::Trap, prep, meas)?;
    circuit.append_fragment(&block)?;
    circuit.set_expected_outcome(Some(Bitstring::zeros(n)));
    Ok(circuit)
}
