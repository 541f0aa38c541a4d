//! Shared input builders for the benchmarks.

use rand::{Rng, RngExt};

use accredia::{PauliLetter, PauliString, Phase, WeightedHamiltonian};

pub fn random_word<R: Rng>(rng: &mut R, n: usize) -> PauliString {
    let letters: Vec<PauliLetter> = (0..n)
        .map(|_| {
            [
                PauliLetter::I,
                PauliLetter::X,
                PauliLetter::Y,
                PauliLetter::Z,
            ][rng.random_range(0..4)]
        })
        .collect();
    PauliString::from_letters(&letters, Phase::PLUS_ONE)
}

pub fn random_hamiltonian<R: Rng>(rng: &mut R, n: usize, terms: usize) -> WeightedHamiltonian {
    let mut out = Vec::new();
    while out.len() < terms {
        let word = random_word(rng, n);
        if word.is_identity_word() {
            continue;
        }
        out.push((rng.random::<f64>() * 2.0 - 1.0, word));
    }
    WeightedHamiltonian::new(n, out).unwrap()
}
