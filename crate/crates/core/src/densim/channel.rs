//! Channels as dense superoperators, Choi matrices, and channel distances.
//!
//! Density matrices are vectorised row-major, so a channel with Kraus
//! operators `K_k` acts as the matrix `sum_k kron(K_k, conj(K_k))`. Choi
//! matrices are normalised to trace one; their trace distance brackets the
//! diamond distance as `[distance, 2^N * distance]`.

use ndarray::Array2;

use crate::capacity;
use crate::error::{Error, Result};
use crate::hypergraph::InversionGroup;
use crate::linalg::{self, c, CMat};
use crate::pauli::{PauliString, WeightedHamiltonian};

#[derive(Debug, Clone)]
pub struct Channel {
    n_qubits: usize,
    superop: CMat,
}

impl Channel {
    pub fn identity(n_qubits: usize) -> Result<Self> {
        capacity::check_choi("identity channel", n_qubits)?;
        let d2 = 1usize << (2 * n_qubits);
        Ok(Channel {
            n_qubits,
            superop: linalg::identity(d2),
        })
    }

    /// The conjugation channel `rho -> U rho U^dagger`.
    pub fn from_unitary(u: &CMat) -> Result<Self> {
        let d = u.nrows();
        if !d.is_power_of_two() || u.ncols() != d {
            return Err(Error::MalformedCircuit(format!(
                "unitary has shape {}x{}",
                u.nrows(),
                u.ncols()
            )));
        }
        let n_qubits = d.trailing_zeros() as usize;
        capacity::check_choi("unitary channel", n_qubits)?;
        Ok(Channel {
            n_qubits,
            superop: linalg::kron(u, &u.mapv(|v| v.conj())),
        })
    }

    pub fn from_kraus(ops: &[CMat]) -> Result<Self> {
        let first = ops
            .first()
            .ok_or_else(|| Error::parameter("kraus", "needs at least one operator"))?;
        let d = first.nrows();
        if !d.is_power_of_two() || first.ncols() != d {
            return Err(Error::MalformedCircuit(format!(
                "kraus operator has shape {}x{}",
                first.nrows(),
                first.ncols()
            )));
        }
        let n_qubits = d.trailing_zeros() as usize;
        capacity::check_choi("kraus channel", n_qubits)?;
        let d2 = d * d;
        let mut superop: CMat = Array2::zeros((d2, d2));
        for k in ops {
            if k.dim() != (d, d) {
                return Err(Error::MalformedCircuit(
                    "kraus operators must share one shape".into(),
                ));
            }
            superop = superop + linalg::kron(k, &k.mapv(|v| v.conj()));
        }
        Ok(Channel { n_qubits, superop })
    }

    /// Uniform mixture of channels on the same space.
    pub fn average(parts: &[Channel]) -> Result<Self> {
        let first = parts
            .first()
            .ok_or_else(|| Error::parameter("parts", "cannot average zero channels"))?;
        let mut superop: CMat = Array2::zeros(first.superop.dim());
        for p in parts {
            if p.n_qubits != first.n_qubits {
                return Err(Error::DimensionMismatch {
                    context: "channel average",
                    left: first.n_qubits,
                    right: p.n_qubits,
                });
            }
            superop += &p.superop;
        }
        let w = c(1.0 / parts.len() as f64, 0.0);
        Ok(Channel {
            n_qubits: first.n_qubits,
            superop: superop.mapv(|v| v * w),
        })
    }

    /// Wraps a raw superoperator without CPTP validation; callers own the
    /// guarantee (used for averages of already-valid channels).
    pub(crate) fn from_superop_unchecked(n_qubits: usize, superop: CMat) -> Self {
        Channel { n_qubits, superop }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        1usize << self.n_qubits
    }

    pub fn superop(&self) -> &CMat {
        &self.superop
    }

    /// `self` first, then `next`.
    pub fn then(&self, next: &Channel) -> Result<Channel> {
        if self.n_qubits != next.n_qubits {
            return Err(Error::DimensionMismatch {
                context: "channel composition",
                left: self.n_qubits,
                right: next.n_qubits,
            });
        }
        Ok(Channel {
            n_qubits: self.n_qubits,
            superop: next.superop.dot(&self.superop),
        })
    }

    /// `self` composed with itself `k` times (exponentiation by squaring).
    pub fn power(&self, k: usize) -> Channel {
        let d2 = self.superop.nrows();
        let mut result = linalg::identity(d2);
        let mut base = self.superop.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                result = base.dot(&result);
            }
            base = base.dot(&base);
            k >>= 1;
        }
        Channel {
            n_qubits: self.n_qubits,
            superop: result,
        }
    }

    pub fn apply(&self, rho: &CMat) -> Result<CMat> {
        let d = self.dim();
        if rho.dim() != (d, d) {
            return Err(Error::DimensionMismatch {
                context: "channel application",
                left: d,
                right: rho.nrows(),
            });
        }
        let v = rho
            .as_standard_layout()
            .into_shape_with_order(d * d)
            .expect("contiguous reshape")
            .to_owned();
        let out = self.superop.dot(&v);
        Ok(out
            .into_shape_with_order((d, d))
            .expect("square reshape")
            .to_owned())
    }

    /// Normalised Choi state: `(Phi (x) id)` applied to the maximally
    /// entangled state; trace one, and positive semidefinite exactly when
    /// the channel is completely positive.
    pub fn choi(&self) -> CMat {
        let d = self.dim();
        let mut j: CMat = Array2::zeros((d * d, d * d));
        let scale = c(1.0 / d as f64, 0.0);
        for a in 0..d {
            for b in 0..d {
                for i in 0..d {
                    for jj in 0..d {
                        j[(a * d + i, b * d + jj)] = self.superop[(a * d + b, i * d + jj)] * scale;
                    }
                }
            }
        }
        j
    }

    /// Max deviation of `sum_k K_k^dagger K_k` from the identity, measured
    /// through the superoperator (trace-preservation residual).
    pub fn trace_preservation_residual(&self) -> f64 {
        // Tr(Phi(E_ij)) must equal delta_ij: sum the (a,a) blocks.
        let d = self.dim();
        let mut worst = 0.0f64;
        for i in 0..d {
            for jj in 0..d {
                let mut s = c(0.0, 0.0);
                for a in 0..d {
                    s += self.superop[(a * d + a, i * d + jj)];
                }
                let expect = if i == jj { 1.0 } else { 0.0 };
                worst = worst.max((s - c(expect, 0.0)).norm());
            }
        }
        worst
    }
}

/// The Choi matrix of a channel (trace-normalised).
pub fn channel_choi(channel: &Channel) -> CMat {
    channel.choi()
}

/// Trace distance between two Choi states, plus the diamond-distance bracket
/// `[distance, 2^N * distance]` it implies.
pub fn choi_trace_distance(a: &CMat, b: &CMat) -> Result<(f64, f64, f64)> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            context: "choi distance",
            left: a.nrows(),
            right: b.nrows(),
        });
    }
    let d2 = a.nrows();
    let d = (d2 as f64).sqrt().round() as usize;
    if d * d != d2 {
        return Err(Error::MalformedCircuit(format!(
            "choi matrix dimension {d2} is not a perfect square"
        )));
    }
    let diff = a - b;
    let distance = 0.5 * linalg::trace_norm_hermitian(&diff);
    Ok((distance, distance, d as f64 * distance))
}

/// Minimum eigenvalue of the Choi state (complete-positivity residual).
pub fn choi_min_eigenvalue(channel: &Channel) -> f64 {
    let (w, _) = linalg::hermitian_eigen(&channel.choi());
    w.first().copied().unwrap_or(0.0)
}

/// Pauli transfer matrix `R[p][q] = tr(P_p Phi(P_q)) / 2^N`. The channel is a
/// stochastic-Pauli (Pauli-diagonal) channel exactly when `R` is diagonal.
pub fn pauli_transfer_matrix(channel: &Channel) -> Result<Array2<f64>> {
    let n = channel.n_qubits();
    let words = 1usize << (2 * n);
    let d = channel.dim();
    let mut r = Array2::zeros((words, words));
    let paulis: Vec<CMat> = (0..words)
        .map(|idx| PauliString::word_from_index(idx, n).to_matrix())
        .collect::<Result<_>>()?;
    for q in 0..words {
        let image = channel.apply(&paulis[q])?;
        for p in 0..words {
            let mut tr = c(0.0, 0.0);
            for i in 0..d {
                for k in 0..d {
                    tr += paulis[p][(i, k)] * image[(k, i)];
                }
            }
            r[(p, q)] = tr.re / d as f64;
        }
    }
    Ok(r)
}

/// The sandwich-averaged slice channel of an inverted subcircuit:
/// conjugation by a set element, the slice unitary (optionally followed by a
/// noise channel), then the same conjugation, averaged over the set.
///
/// With `include_identity = false` the average runs over the non-identity
/// elements with weight `1/(L-1)`, which is the slice the inverted
/// subcircuit actually implements in expectation. With `true` it runs over
/// the whole group: a proper group twirl, which cancels covered coherent
/// cross terms exactly.
pub fn averaged_inversion_slice(
    h: &WeightedHamiltonian,
    group: &InversionGroup,
    dt: f64,
    slice_noise: Option<&Channel>,
    include_identity: bool,
) -> Result<Channel> {
    capacity::check_choi("averaged slice channel", h.n_qubits())?;
    let u = super::exact_unitary(h, dt)?;
    let mut step = Channel::from_unitary(&u)?;
    if let Some(noise) = slice_noise {
        step = step.then(noise)?;
    }
    let mut parts = Vec::new();
    for sigma in group.elements() {
        if !include_identity && sigma.is_identity_word() {
            continue;
        }
        let s = Channel::from_unitary(&sigma.to_matrix()?)?;
        parts.push(s.then(&step)?.then(&s)?);
    }
    Channel::average(&parts)
}

/// The full averaged inverted subcircuit: `M` independent averaged slices of
/// duration `t/M`. Approximates conjugation by `exp(+i H t / (L-1))` with
/// O(1/M) Choi-trace error.
pub fn averaged_inversion_subcircuit(
    h: &WeightedHamiltonian,
    group: &InversionGroup,
    t: f64,
    m: usize,
    slice_noise: Option<&Channel>,
    include_identity: bool,
) -> Result<Channel> {
    if m == 0 {
        return Err(Error::parameter("m", "slice count must be at least 1"));
    }
    let slice = averaged_inversion_slice(h, group, t / m as f64, slice_noise, include_identity)?;
    Ok(slice.power(m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs;

    fn x_mat() -> CMat {
        "X".parse::<PauliString>().unwrap().to_matrix().unwrap()
    }

    #[test]
    fn identity_choi_is_maximally_entangled() {
        let ch = Channel::identity(1).unwrap();
        let j = ch.choi();
        // (|00> + |11>)(<00| + <11|) / 2.
        for (idx, expect) in [((0, 0), 0.5), ((0, 3), 0.5), ((3, 0), 0.5), ((3, 3), 0.5)] {
            assert!((j[idx] - c(expect, 0.0)).norm() < 1e-15);
        }
        assert!((linalg::trace(&j).re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn unitary_channel_acts_by_conjugation() {
        let ch = Channel::from_unitary(&x_mat()).unwrap();
        let rho = ndarray::array![[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(0.0, 0.0)]];
        let out = ch.apply(&rho).unwrap();
        assert!((out[(1, 1)].re - 1.0).abs() < 1e-15);
        assert!(out[(0, 0)].norm() < 1e-15);
    }

    #[test]
    fn identity_vs_x_choi_distance_is_one() {
        let id = Channel::identity(1).unwrap();
        let x = Channel::from_unitary(&x_mat()).unwrap();
        let (dist, lower, upper) = choi_trace_distance(&id.choi(), &x.choi()).unwrap();
        assert!((dist - 1.0).abs() < 1e-12);
        assert!(lower <= upper);
        assert!((upper - 2.0).abs() < 1e-12);
    }

    #[test]
    fn depolarizing_choi_is_maximally_mixed_at_full_strength() {
        // Full single-qubit depolarizing: rho -> I/2.
        let kraus: Vec<CMat> = (0..4)
            .map(|i| {
                PauliString::word_from_index(i, 1)
                    .to_matrix()
                    .unwrap()
                    .mapv(|v| v * c(0.5, 0.0))
            })
            .collect();
        let ch = Channel::from_kraus(&kraus).unwrap();
        let j = ch.choi();
        assert!(max_abs(&(&j - &linalg::identity(4).mapv(|v| v * c(0.25, 0.0)))) < 1e-12);
        assert!(ch.trace_preservation_residual() < 1e-12);
    }

    #[test]
    fn power_matches_repeated_composition() {
        let theta = 0.3;
        let u = linalg::expm_hermitian(&x_mat(), c(0.0, -theta));
        let ch = Channel::from_unitary(&u).unwrap();
        let threefold = ch.power(3);
        let manual = ch.then(&ch).unwrap().then(&ch).unwrap();
        assert!(max_abs(&(threefold.superop() - manual.superop())) < 1e-12);
    }
}
