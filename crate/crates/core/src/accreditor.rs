//! The accreditation protocol: interleaved trap/target execution, the
//! variation-distance bound, and audit oracles.
//!
//! One target simulation is hidden uniformly at random among `N_tr`
//! independently randomised traps. Every execution is one shot; a trap fails
//! when it reads anything but all-zeros. The reported bound is
//! `epsilon_VD = min(1, 2 (failed fraction + theta))`, which holds with
//! confidence `alpha` by Hoeffding's inequality over the trap executions.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use crate::bitstring::Bitstring;
use crate::builder::{
    build_target, build_trap, compute_m, split_time, BaseGate, ComposedGate, HybridCircuit,
};
use crate::densim::{
    averaged_inversion_slice, execute, layer_unitary, output_distribution_resolved, tvd, Channel,
    NoiseModel, ResolvedNoise,
};
use crate::error::{Error, Result};
use crate::hypergraph::build_inversion_group;
use crate::linalg::c;
use crate::pauli::{PauliString, WeightedHamiltonian};
use crate::rng::child_rng;
use crate::{densim, pauli};

/// Inputs of one accreditation run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProtocolConfig {
    pub hamiltonian: WeightedHamiltonian,
    pub t: f64,
    /// Additive error budget of the approximate inversion.
    pub eps: f64,
    /// Confidence of the reported bound.
    pub alpha: f64,
    /// Accuracy of the reported bound.
    pub theta: f64,
    pub prep: Vec<ComposedGate>,
    pub meas: Vec<ComposedGate>,
    pub seed: u64,
    /// Shots for the target execution; the protocol proper uses 1, larger
    /// values are diagnostics.
    #[serde(default = "default_one")]
    pub target_shots: usize,
    /// Worker threads for trap execution.
    #[serde(default = "default_one")]
    pub parallelism: usize,
}

fn default_one() -> usize {
    1
}

impl ProtocolConfig {
    pub fn validate(&self) -> Result<()> {
        let n = self.hamiltonian.n_qubits();
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::parameter(
                "alpha",
                format!("must be in (0, 1), got {}", self.alpha),
            ));
        }
        if !(self.theta > 0.0 && self.theta < 1.0) {
            return Err(Error::parameter(
                "theta",
                format!("must be in (0, 1), got {}", self.theta),
            ));
        }
        if !self.t.is_finite() {
            return Err(Error::parameter(
                "t",
                format!("must be finite, got {}", self.t),
            ));
        }
        if self.eps.is_nan() || self.eps <= 0.0 {
            return Err(Error::parameter(
                "eps",
                format!("must be positive, got {}", self.eps),
            ));
        }
        if self.prep.len() != n || self.meas.len() != n {
            return Err(Error::DimensionMismatch {
                context: "protocol prep/meas gates",
                left: n,
                right: if self.prep.len() != n {
                    self.prep.len()
                } else {
                    self.meas.len()
                },
            });
        }
        if self.target_shots == 0 {
            return Err(Error::parameter("target_shots", "must be at least 1"));
        }
        Ok(())
    }
}

/// Provenance of one trap execution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrapRecord {
    /// 1-based position in the interleaved schedule.
    pub position: usize,
    /// RNG stream index that reproduces this trap's draws.
    pub stream: u64,
    pub outcome: Bitstring,
    pub passed: bool,
}

/// Output contract of one protocol run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProtocolResult {
    pub config: ProtocolConfig,
    pub n_traps: usize,
    pub n_traps_failed: usize,
    /// 1-based position of the target among the `n_traps + 1` executions.
    pub target_position: usize,
    pub target_outcomes: Vec<Bitstring>,
    /// `min(1, 2 (n_traps_failed / n_traps + theta))`.
    pub epsilon_vd: f64,
    pub traps: Vec<TrapRecord>,
}

impl ProtocolResult {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("result serialisation cannot fail")
    }

    pub fn csv_header() -> &'static str {
        "run,epsilon_vd,true_nu"
    }

    pub fn csv_row(&self, run: usize, true_nu: Option<f64>) -> String {
        match true_nu {
            Some(nu) => format!("{run},{},{nu}", self.epsilon_vd),
            None => format!("{run},{},", self.epsilon_vd),
        }
    }
}

/// Trap count needed for accuracy `theta` at confidence `alpha`:
/// `ceil((2/theta^2) ln(2/(1-alpha))) + 1`.
pub fn num_traps(theta: f64, alpha: f64) -> Result<usize> {
    if !(theta > 0.0 && theta < 1.0) {
        return Err(Error::parameter(
            "theta",
            format!("must be in (0, 1), got {theta}"),
        ));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::parameter(
            "alpha",
            format!("must be in (0, 1), got {alpha}"),
        ));
    }
    let raw = (2.0 / (theta * theta)) * (2.0 / (1.0 - alpha)).ln();
    Ok(raw.ceil() as usize + 1)
}

/// The accuracy-adjusted variation-distance bound
/// `min(1, 2 (n_failed / n_traps + theta))`.
pub fn epsilon_vd(n_failed: usize, n_traps: usize, theta: f64) -> Result<f64> {
    if n_traps == 0 {
        return Err(Error::parameter("n_traps", "must be at least 1"));
    }
    if n_failed > n_traps {
        return Err(Error::parameter(
            "n_failed",
            format!("{n_failed} exceeds the trap count {n_traps}"),
        ));
    }
    if !(theta > 0.0 && theta < 1.0) {
        return Err(Error::parameter(
            "theta",
            format!("must be in (0, 1), got {theta}"),
        ));
    }
    Ok((2.0 * (n_failed as f64 / n_traps as f64 + theta)).min(1.0))
}

enum PositionOutcome {
    Target(Vec<Bitstring>),
    Trap(TrapRecord),
}

fn run_position(
    cfg: &ProtocolConfig,
    noise: Option<&NoiseModel>,
    target_position: usize,
    position: usize,
) -> Result<PositionOutcome> {
    let mut rng = child_rng(cfg.seed, position as u64);
    if position == target_position {
        let mut target = build_target(&cfg.hamiltonian, cfg.t, cfg.eps, &cfg.prep, &cfg.meas)?;
        target.set_seed(Some(position as u64));
        let outcomes = execute(&target, noise, &mut rng, cfg.target_shots)?;
        Ok(PositionOutcome::Target(outcomes))
    } else {
        let mut trap = build_trap(&cfg.hamiltonian, cfg.t, cfg.eps, &mut rng)?;
        trap.set_seed(Some(position as u64));
        let outcome = execute(&trap, noise, &mut rng, 1)?[0];
        Ok(PositionOutcome::Trap(TrapRecord {
            position,
            stream: position as u64,
            outcome,
            passed: outcome.is_all_zero(),
        }))
    }
}

/// Runs the protocol end to end.
///
/// Stream 0 of the seed draws the target position; stream `i` drives
/// position `i`'s circuit randomness, drift, and shot sampling. Positions
/// are independent, so trap executions run on `parallelism` workers and the
/// aggregate is order-independent and bit-reproducible.
pub fn run_protocol(cfg: &ProtocolConfig, noise: Option<&NoiseModel>) -> Result<ProtocolResult> {
    cfg.validate()?;
    let n_traps = num_traps(cfg.theta, cfg.alpha)?;
    let total = n_traps + 1;

    let mut scheduler = child_rng(cfg.seed, 0);
    use rand::RngExt;
    let target_position = scheduler.random_range(1..=total);

    let workers = cfg.parallelism.max(1).min(total);
    let mut slots: Vec<Option<Result<PositionOutcome>>> = Vec::with_capacity(total);
    if workers <= 1 {
        for position in 1..=total {
            slots.push(Some(run_position(cfg, noise, target_position, position)));
        }
    } else {
        let shared: Mutex<Vec<Option<Result<PositionOutcome>>>> =
            Mutex::new((0..total).map(|_| None).collect());
        let next = AtomicUsize::new(1);
        std::thread::scope(|scope| {
            for _ in 0..workers {
                scope.spawn(|| loop {
                    let position = next.fetch_add(1, Ordering::Relaxed);
                    if position > total {
                        break;
                    }
                    let out = run_position(cfg, noise, target_position, position);
                    shared.lock().expect("worker panicked")[position - 1] = Some(out);
                });
            }
        });
        slots = shared.into_inner().expect("worker panicked");
    }

    let mut target_outcomes = Vec::new();
    let mut traps = Vec::with_capacity(n_traps);
    for (idx, slot) in slots.into_iter().enumerate() {
        let outcome = slot.unwrap_or_else(|| {
            Err(Error::MalformedCircuit(format!(
                "position {} was never executed",
                idx + 1
            )))
        })?;
        match outcome {
            PositionOutcome::Target(outcomes) => target_outcomes = outcomes,
            PositionOutcome::Trap(record) => traps.push(record),
        }
    }

    let n_traps_failed = traps.iter().filter(|r| !r.passed).count();
    let bound = epsilon_vd(n_traps_failed, n_traps, cfg.theta)?;
    Ok(ProtocolResult {
        config: cfg.clone(),
        n_traps,
        n_traps_failed,
        target_position,
        target_outcomes,
        epsilon_vd: bound,
        traps,
    })
}

/// The exact ideal-actual variation distance of a target under a fixed noise
/// instance: the quantity the protocol's bound promises to dominate.
pub fn true_ideal_actual_distance(target: &HybridCircuit, noise: &ResolvedNoise) -> Result<f64> {
    let ideal = output_distribution_resolved(target, None)?;
    let actual = output_distribution_resolved(target, Some(noise))?;
    Ok(tvd(&ideal, &actual))
}

/// The classical-intractability verdict for a protocol result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdvantageVerdict {
    /// `1 - 1/sqrt(2)`, roughly 0.292.
    pub threshold: f64,
    pub epsilon_vd: f64,
    /// `threshold - epsilon_vd`; positive exactly when `passed`.
    pub margin: f64,
    pub passed: bool,
}

pub fn advantage_verdict(result: &ProtocolResult) -> AdvantageVerdict {
    let threshold = 1.0 - std::f64::consts::FRAC_1_SQRT_2;
    AdvantageVerdict {
        threshold,
        epsilon_vd: result.epsilon_vd,
        margin: threshold - result.epsilon_vd,
        passed: result.epsilon_vd < threshold,
    }
}

/// The square-lattice Ising Hamiltonian used for advantage experiments:
/// a ZZ term with coupling `J_e` per lattice edge and a Z term with
/// coefficient `-h_v` per vertex.
///
/// Vertices are numbered row-major (`v = row * cols + col`). Edges are
/// enumerated per vertex in that order: right neighbour first, then down
/// neighbour. `couplings` must match the edge count, `fields` the vertex
/// count.
pub fn advantage_preset(
    rows: usize,
    cols: usize,
    couplings: &[f64],
    fields: &[f64],
) -> Result<WeightedHamiltonian> {
    if rows == 0 || cols == 0 {
        return Err(Error::parameter(
            "lattice",
            "rows and cols must be at least 1",
        ));
    }
    let n = rows * cols;
    let mut edges = Vec::new();
    for r in 0..rows {
        for col in 0..cols {
            let v = r * cols + col;
            if col + 1 < cols {
                edges.push((v, v + 1));
            }
            if r + 1 < rows {
                edges.push((v, v + cols));
            }
        }
    }
    if couplings.len() != edges.len() {
        return Err(Error::parameter(
            "couplings",
            format!(
                "expected {} edge couplings, got {}",
                edges.len(),
                couplings.len()
            ),
        ));
    }
    if fields.len() != n {
        return Err(Error::parameter(
            "fields",
            format!("expected {} vertex fields, got {}", n, fields.len()),
        ));
    }

    let mut terms = Vec::new();
    for (e, &(a, b)) in edges.iter().enumerate() {
        let mut letters = vec![pauli::PauliLetter::I; n];
        letters[a] = pauli::PauliLetter::Z;
        letters[b] = pauli::PauliLetter::Z;
        terms.push((
            couplings[e],
            PauliString::from_letters(&letters, pauli::Phase::PLUS_ONE),
        ));
    }
    for (v, &h_v) in fields.iter().enumerate() {
        let mut letters = vec![pauli::PauliLetter::I; n];
        letters[v] = pauli::PauliLetter::Z;
        terms.push((
            -h_v,
            PauliString::from_letters(&letters, pauli::Phase::PLUS_ONE),
        ));
    }
    WeightedHamiltonian::new(n, terms)
}

/// Where to inject an error when auditing trap detection.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrapInjection {
    /// Immediately after the trap's pre-layer, before the block.
    AfterPrep,
    /// After the k-th subcircuit slice (0 means right after the bare
    /// evolution that opens the block).
    AfterSlice(usize),
}

/// The trap's end-to-end channel averaged exactly over all its randomness:
/// the dressing draws (shared Hadamard coin, per-qubit Paulis, pre/post Z
/// coins) are enumerated exhaustively, and the slice sandwiches enter
/// through the averaged slice channel, which is the exact expectation over
/// their draws because distinct slices draw independently.
///
/// `slice_noise` composes after every slice unitary inside the sandwich;
/// `injection` inserts a fixed Pauli error at the stated position. The
/// per-qubit Pauli dressing is a full Pauli twirl, so the returned channel
/// is exactly Pauli-diagonal whatever the noise.
pub fn averaged_trap_channel(
    h: &WeightedHamiltonian,
    t: f64,
    eps: f64,
    slice_noise: Option<&Channel>,
    injection: Option<(&PauliString, TrapInjection)>,
) -> Result<Channel> {
    let n = h.n_qubits();
    if n > 3 {
        return Err(Error::Capacity {
            context: "exhaustive trap audit",
            requested: n,
            limit: 3,
        });
    }

    let group = build_inversion_group(h)?;
    let split = split_time(t, group.len())?;
    let m = compute_m(h, split.t2, eps, group.len())?;
    let slice = averaged_inversion_slice(h, &group, split.t2 / m as f64, slice_noise, false)?;
    let opening = Channel::from_unitary(&densim::exact_unitary(h, split.t1)?)?;

    let mid = match injection {
        None => opening.then(&slice.power(m))?,
        Some((error, at)) => {
            if error.n_qubits() != n {
                return Err(Error::DimensionMismatch {
                    context: "injected error",
                    left: n,
                    right: error.n_qubits(),
                });
            }
            let error_channel = Channel::from_unitary(&error.to_matrix()?)?;
            match at {
                TrapInjection::AfterPrep => error_channel.then(&opening)?.then(&slice.power(m))?,
                TrapInjection::AfterSlice(k) => {
                    if k > m {
                        return Err(Error::parameter(
                            "injection",
                            format!("slice boundary {k} exceeds the slice count {m}"),
                        ));
                    }
                    opening
                        .then(&slice.power(k))?
                        .then(&error_channel)?
                        .then(&slice.power(m - k))?
                }
            }
        }
    };

    let dim = 1usize << n;
    let pauli_gates = [BaseGate::I, BaseGate::X, BaseGate::Y, BaseGate::Z];
    let mut superop_sum: crate::linalg::CMat = ndarray::Array2::zeros((dim * dim, dim * dim));
    let mut draws = 0usize;

    for h_bit in [false, true] {
        for p_idx in 0..(1usize << (2 * n)) {
            let paulis: Vec<BaseGate> = (0..n)
                .map(|q| pauli_gates[(p_idx >> (2 * (n - 1 - q))) & 0b11])
                .collect();
            for z_pre in 0..(1usize << n) {
                let pre: Vec<ComposedGate> = (0..n)
                    .map(|q| {
                        let mut ops = Vec::new();
                        if (z_pre >> (n - 1 - q)) & 1 == 1 {
                            ops.push(BaseGate::Z);
                        }
                        if h_bit {
                            ops.push(BaseGate::H);
                        }
                        ops.push(paulis[q]);
                        ComposedGate::from_ops(ops)
                    })
                    .collect();
                let pre_then_mid = Channel::from_unitary(&layer_unitary(&pre))?.then(&mid)?;

                for z_post in 0..(1usize << n) {
                    let post: Vec<ComposedGate> = (0..n)
                        .map(|q| {
                            let mut ops = vec![paulis[q]];
                            if h_bit {
                                ops.push(BaseGate::H);
                            }
                            if (z_post >> (n - 1 - q)) & 1 == 1 {
                                ops.push(BaseGate::Z);
                            }
                            ComposedGate::from_ops(ops)
                        })
                        .collect();
                    let total =
                        pre_then_mid.then(&Channel::from_unitary(&layer_unitary(&post))?)?;
                    superop_sum += total.superop();
                    draws += 1;
                }
            }
        }
    }

    let w = c(1.0 / draws as f64, 0.0);
    Ok(Channel::from_superop_unchecked(
        n,
        superop_sum.mapv(|v| v * w),
    ))
}

/// The probability that a trap detects the injected Pauli `error`: one minus
/// the all-zeros probability of the exactly-averaged trap channel (detection
/// probability is linear in the channel, so averaging first is exact).
pub fn trap_detection_probability(
    h: &WeightedHamiltonian,
    t: f64,
    eps: f64,
    error: &PauliString,
    injection: TrapInjection,
) -> Result<f64> {
    let channel = averaged_trap_channel(h, t, eps, None, Some((error, injection)))?;
    let dim = 1usize << h.n_qubits();
    let mut rho0: crate::linalg::CMat = ndarray::Array2::zeros((dim, dim));
    rho0[(0, 0)] = c(1.0, 0.0);
    let out = channel.apply(&rho0)?;
    Ok((1.0 - out[(0, 0)].re).clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trap_count_formula() {
        assert_eq!(num_traps(0.1, 0.9).unwrap(), 601);
        assert_eq!(num_traps(0.05, 0.95).unwrap(), 2953);
        // Larger theta never increases the count.
        assert!(num_traps(0.2, 0.9).unwrap() <= num_traps(0.1, 0.9).unwrap());
        // Larger alpha never decreases it.
        assert!(num_traps(0.1, 0.95).unwrap() >= num_traps(0.1, 0.9).unwrap());
        assert!(num_traps(0.0, 0.9).is_err());
        assert!(num_traps(0.1, 1.0).is_err());
    }

    #[test]
    fn epsilon_vd_formula() {
        assert!((epsilon_vd(0, 600, 0.1).unwrap() - 0.2).abs() < 1e-15);
        assert!((epsilon_vd(60, 600, 0.05).unwrap() - 0.3).abs() < 1e-15);
        assert_eq!(epsilon_vd(600, 600, 0.1).unwrap(), 1.0);
        assert!(epsilon_vd(601, 600, 0.1).is_err());
        assert!(epsilon_vd(0, 0, 0.1).is_err());
    }

    #[test]
    fn advantage_preset_lattices() {
        let h = advantage_preset(1, 2, &[1.0], &[0.0, 0.0]).unwrap();
        assert_eq!(h.terms().len(), 1);
        assert_eq!(h.terms()[0].1.to_string(), "ZZ");

        let h = advantage_preset(2, 2, &[1.0; 4], &[0.0; 4]).unwrap();
        assert_eq!(h.terms().len(), 4);
        assert!(h
            .terms()
            .iter()
            .all(|(c0, p)| *c0 == 1.0 && p.weight() == 2));

        let h = advantage_preset(1, 2, &[1.0], &[0.5, 0.5]).unwrap();
        let words: Vec<(f64, String)> = h
            .terms()
            .iter()
            .map(|(c0, p)| (*c0, p.to_string()))
            .collect();
        assert_eq!(
            words,
            vec![
                (1.0, "ZZ".to_string()),
                (-0.5, "ZI".to_string()),
                (-0.5, "IZ".to_string())
            ]
        );

        assert!(advantage_preset(2, 2, &[1.0; 3], &[0.0; 4]).is_err());
        assert!(advantage_preset(2, 2, &[1.0; 4], &[0.0; 3]).is_err());
    }

    #[test]
    fn verdict_thresholds() {
        let mk = |eps_vd: f64| ProtocolResult {
            config: ProtocolConfig {
                hamiltonian: WeightedHamiltonian::from_json(r#"[{"coeff":1.0,"pauli":"ZZ"}]"#)
                    .unwrap(),
                t: 1.0,
                eps: 0.05,
                alpha: 0.9,
                theta: 0.1,
                prep: vec![ComposedGate::identity(); 2],
                meas: vec![ComposedGate::identity(); 2],
                seed: 0,
                target_shots: 1,
                parallelism: 1,
            },
            n_traps: 601,
            n_traps_failed: 0,
            target_position: 1,
            target_outcomes: vec![],
            epsilon_vd: eps_vd,
            traps: vec![],
        };
        let v = advantage_verdict(&mk(0.1));
        assert!(v.passed);
        assert!((v.margin - (1.0 - std::f64::consts::FRAC_1_SQRT_2 - 0.1)).abs() < 1e-12);

        assert!(!advantage_verdict(&mk(0.3)).passed);
        // The boundary is strict.
        assert!(!advantage_verdict(&mk(1.0 - std::f64::consts::FRAC_1_SQRT_2)).passed);
    }
}
