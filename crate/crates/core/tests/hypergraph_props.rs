//! Randomised properties of coloring and inversion-set synthesis.

use std::collections::BTreeSet;

use rand::{Rng, RngExt};

use accredia::hypergraph::{
    build_interaction_hypergraph, build_inversion_group, color_hypergraph, twirl_check, Hypergraph,
};
use accredia::pauli::{PauliLetter, PauliString, Phase, WeightedHamiltonian};
use accredia::rng::root_rng;

fn random_hamiltonian<R: Rng>(
    rng: &mut R,
    max_qubits: usize,
    max_terms: usize,
) -> WeightedHamiltonian {
    let n = rng.random_range(1..=max_qubits);
    let n_terms = rng.random_range(1..=max_terms);
    let mut terms = Vec::new();
    for _ in 0..n_terms {
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
        let word = PauliString::from_letters(&letters, Phase::PLUS_ONE);
        if word.is_identity_word() {
            continue;
        }
        let coeff = rng.random::<f64>() * 4.0 - 2.0;
        terms.push((coeff, word));
    }
    if terms.is_empty() {
        terms.push((1.0, PauliString::single(n, 0, PauliLetter::Z).unwrap()));
    }
    WeightedHamiltonian::new(n, terms).unwrap()
}

#[test]
fn greedy_colorings_are_valid_on_random_hypergraphs() {
    let mut rng = root_rng(201);
    for _ in 0..200 {
        let n = rng.random_range(1..=12);
        let n_edges = rng.random_range(0..=20);
        let mut edges = Vec::new();
        for _ in 0..n_edges {
            let size = rng.random_range(1..=n.min(4));
            let mut e = BTreeSet::new();
            while e.len() < size {
                e.insert(rng.random_range(0..n));
            }
            edges.push(e);
        }
        let g = Hypergraph::new(n, edges).unwrap();
        let coloring = color_hypergraph(&g);
        assert!(coloring.is_valid_for(&g), "invalid coloring for {g:?}");
        // Colors form the contiguous range 1..=n_colors.
        let used: BTreeSet<usize> = g.vertices().map(|v| coloring.color(v).unwrap()).collect();
        assert_eq!(used, (1..=coloring.n_colors()).collect::<BTreeSet<_>>());
    }
}

#[test]
fn every_term_sees_exactly_half_the_group_anticommute() {
    let mut rng = root_rng(202);
    for _ in 0..60 {
        let h = random_hamiltonian(&mut rng, 6, 8);
        let group = build_inversion_group(&h).unwrap();
        assert!(group.len() >= 2);
        for (_, term) in h.terms() {
            let anti = group.anticommuting_count(term).unwrap();
            assert_eq!(
                anti,
                group.len() / 2,
                "term {term} of {h:?}: {anti} of {}",
                group.len()
            );
        }
        // Closure: products of random element pairs stay inside.
        let elements = group.elements();
        for _ in 0..16 {
            let a = &elements[rng.random_range(0..elements.len())];
            let b = &elements[rng.random_range(0..elements.len())];
            assert!(group.contains(&a.multiply(b).unwrap()));
        }
    }
}

#[test]
fn twirl_residual_vanishes_for_fifty_random_hamiltonians() {
    let mut rng = root_rng(203);
    for _ in 0..50 {
        let h = random_hamiltonian(&mut rng, 5, 10);
        let group = build_inversion_group(&h).unwrap();
        let residual = twirl_check(&group, &h).unwrap();
        assert!(residual <= 1e-9, "residual {residual} for {h:?}");
    }
}

#[test]
fn group_size_is_bounded_by_the_coloring() {
    let mut rng = root_rng(204);
    for _ in 0..40 {
        let h = random_hamiltonian(&mut rng, 6, 8);
        let group = build_inversion_group(&h).unwrap();
        let graph = build_interaction_hypergraph(&h).unwrap();
        let coloring = color_hypergraph(&graph);
        let bound = 4f64.powi(coloring.n_colors() as i32);
        assert!(
            (group.len() as f64) <= bound,
            "L = {} above 4^{}",
            group.len(),
            coloring.n_colors()
        );
    }
}

#[test]
fn max_vertex_degree_counts_incident_edges() {
    let g = Hypergraph::new(
        3,
        vec![
            [0, 1].into_iter().collect(),
            [0, 2].into_iter().collect(),
            [0].into_iter().collect(),
        ],
    )
    .unwrap();
    assert_eq!(g.max_vertex_degree(), 3);
}
