//! Measurement-outcome distributions and the total variation distance.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::bitstring::Bitstring;
use crate::error::{Error, Result};

/// A probability distribution over bitstrings of one fixed width.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Distribution {
    probs: BTreeMap<Bitstring, f64>,
}

impl Distribution {
    /// Builds from Born-rule probabilities indexed by basis state.
    ///
    /// Tiny negative values (numerical noise down to -1e-9) are clamped to
    /// zero; anything more negative is rejected. Zero entries are dropped.
    pub fn from_probabilities(probs: &[f64], n_qubits: usize) -> Result<Self> {
        if probs.len() != (1usize << n_qubits) {
            return Err(Error::DimensionMismatch {
                context: "distribution",
                left: 1usize << n_qubits,
                right: probs.len(),
            });
        }
        let mut map = BTreeMap::new();
        let mut total = 0.0;
        for (i, &p) in probs.iter().enumerate() {
            if p < -1e-9 {
                return Err(Error::MalformedCircuit(format!(
                    "negative probability {p} at basis state {i}"
                )));
            }
            let p = p.max(0.0);
            total += p;
            if p > 0.0 {
                map.insert(Bitstring::from_index(i as u64, n_qubits), p);
            }
        }
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::MalformedCircuit(format!(
                "probabilities sum to {total}, expected 1"
            )));
        }
        Ok(Distribution { probs: map })
    }

    /// A point mass on one outcome.
    pub fn point_mass(outcome: Bitstring) -> Self {
        let mut probs = BTreeMap::new();
        probs.insert(outcome, 1.0);
        Distribution { probs }
    }

    /// Empirical frequencies of a sample list.
    pub fn empirical(samples: &[Bitstring]) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::parameter("samples", "empty sample list"));
        }
        let mut probs: BTreeMap<Bitstring, f64> = BTreeMap::new();
        let w = 1.0 / samples.len() as f64;
        for &s in samples {
            *probs.entry(s).or_insert(0.0) += w;
        }
        Ok(Distribution { probs })
    }

    /// Probability of `outcome`; missing keys read as zero.
    pub fn prob(&self, outcome: &Bitstring) -> f64 {
        self.probs.get(outcome).copied().unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Bitstring, &f64)> {
        self.probs.iter()
    }

    pub fn support_len(&self) -> usize {
        self.probs.len()
    }

    /// Draws one outcome by inverse CDF over the (sorted) support.
    pub fn sample<R: rand::Rng>(&self, rng: &mut R) -> Bitstring {
        use rand::RngExt;
        let u: f64 = rng.random();
        let mut acc = 0.0;
        let mut last = None;
        for (b, p) in &self.probs {
            acc += p;
            last = Some(*b);
            if u < acc {
                return *b;
            }
        }
        last.expect("distribution has support")
    }
}

/// Total variation distance: half the l1 difference over the union of the
/// supports. Always in `[0, 1]`.
pub fn tvd(p: &Distribution, q: &Distribution) -> f64 {
    let mut keys: Vec<Bitstring> = p.probs.keys().copied().collect();
    for k in q.probs.keys() {
        if !p.probs.contains_key(k) {
            keys.push(*k);
        }
    }
    0.5 * keys
        .iter()
        .map(|k| (p.prob(k) - q.prob(k)).abs())
        .sum::<f64>()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(s: &str) -> Bitstring {
        s.parse().unwrap()
    }

    #[test]
    fn tvd_examples() {
        let p = Distribution::point_mass(b("00"));
        assert_eq!(tvd(&p, &p), 0.0);

        let q = Distribution::from_probabilities(&[0.5, 0.0, 0.0, 0.5], 2).unwrap();
        assert!((tvd(&p, &q) - 0.5).abs() < 1e-15);

        let uniform = Distribution::from_probabilities(&[0.25; 4], 2).unwrap();
        assert!((tvd(&p, &uniform) - 0.75).abs() < 1e-15);
    }

    #[test]
    fn probabilities_validate() {
        assert!(Distribution::from_probabilities(&[0.5, 0.4], 1).is_err());
        assert!(Distribution::from_probabilities(&[1.1, -0.1], 1).is_err());
        // Tiny negatives from floating point are tolerated.
        let d = Distribution::from_probabilities(&[1.0 + 1e-12, -1e-12], 1).unwrap();
        assert_eq!(d.prob(&b("1")), 0.0);
    }

    #[test]
    fn sampling_is_seeded() {
        let d = Distribution::from_probabilities(&[0.25; 4], 2).unwrap();
        let mut r1 = crate::rng::root_rng(5);
        let mut r2 = crate::rng::root_rng(5);
        let a: Vec<Bitstring> = (0..32).map(|_| d.sample(&mut r1)).collect();
        let bb: Vec<Bitstring> = (0..32).map(|_| d.sample(&mut r2)).collect();
        assert_eq!(a, bb);
    }
}
