//! Interaction hypergraphs, greedy coloring, and inversion-set synthesis.
//!
//! The interaction hypergraph of a Hamiltonian has one vertex per qubit and
//! one hyperedge per term, covering the term's support. Coloring it bounds
//! the size of the conjugation set used to reverse time evolution; the set
//! itself is built directly as a group generated by per-term anticommuting
//! single-qubit Paulis, which keeps it minimal while guaranteeing the
//! half-anticommutation balance the twirl identity needs.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::capacity;
use crate::error::{Error, Result};
use crate::linalg::{self, c, CMat};
use crate::pauli::{conjugate_sign, PauliLetter, PauliString, WeightedHamiltonian};

/// A finite hypergraph on vertices `{0..n_vertices-1}`.
///
/// Serialises with explicit vertex and edge arrays:
/// `{"vertices": [0, 1, 2], "hyperedges": [[0, 1], [1, 2]]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "HypergraphJson", try_from = "HypergraphJson")]
pub struct Hypergraph {
    n_vertices: usize,
    hyperedges: Vec<BTreeSet<usize>>,
}

#[derive(Serialize, Deserialize)]
struct HypergraphJson {
    vertices: Vec<usize>,
    hyperedges: Vec<Vec<usize>>,
}

impl From<Hypergraph> for HypergraphJson {
    fn from(g: Hypergraph) -> Self {
        HypergraphJson {
            vertices: (0..g.n_vertices).collect(),
            hyperedges: g
                .hyperedges
                .iter()
                .map(|e| e.iter().copied().collect())
                .collect(),
        }
    }
}

impl TryFrom<HypergraphJson> for Hypergraph {
    type Error = Error;

    fn try_from(json: HypergraphJson) -> Result<Self> {
        let n = json.vertices.len();
        if json.vertices.iter().copied().ne(0..n) {
            return Err(Error::Parse(
                "hypergraph vertices must be the contiguous range 0..n".into(),
            ));
        }
        Hypergraph::new(
            n,
            json.hyperedges
                .into_iter()
                .map(|e| e.into_iter().collect())
                .collect(),
        )
    }
}

impl Hypergraph {
    /// Canonicalises on construction: empty edges and duplicates are dropped.
    pub fn new(n_vertices: usize, edges: Vec<BTreeSet<usize>>) -> Result<Self> {
        let mut canonical: Vec<BTreeSet<usize>> = Vec::new();
        for e in edges {
            if e.is_empty() {
                continue;
            }
            if let Some(&v) = e.iter().max() {
                if v >= n_vertices {
                    return Err(Error::parameter(
                        "edges",
                        format!("vertex {v} out of range for {n_vertices} vertices"),
                    ));
                }
            }
            if !canonical.contains(&e) {
                canonical.push(e);
            }
        }
        Ok(Hypergraph {
            n_vertices,
            hyperedges: canonical,
        })
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    pub fn vertices(&self) -> impl Iterator<Item = usize> {
        0..self.n_vertices
    }

    pub fn hyperedges(&self) -> &[BTreeSet<usize>] {
        &self.hyperedges
    }

    pub fn has_edges(&self) -> bool {
        !self.hyperedges.is_empty()
    }

    /// Maximum number of hyperedges meeting at one vertex. Diagnostic only.
    pub fn max_vertex_degree(&self) -> usize {
        (0..self.n_vertices)
            .map(|v| self.hyperedges.iter().filter(|e| e.contains(&v)).count())
            .max()
            .unwrap_or(0)
    }
}

/// A vertex coloring; colors are the contiguous range `1..=n_colors`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Coloring {
    assignment: BTreeMap<usize, usize>,
    n_colors: usize,
}

impl Coloring {
    pub fn color(&self, vertex: usize) -> Option<usize> {
        self.assignment.get(&vertex).copied()
    }

    pub fn assignment(&self) -> &BTreeMap<usize, usize> {
        &self.assignment
    }

    pub fn n_colors(&self) -> usize {
        self.n_colors
    }

    /// Validity: within every hyperedge all vertices carry distinct colors.
    pub fn is_valid_for(&self, graph: &Hypergraph) -> bool {
        graph.hyperedges().iter().all(|e| {
            let colors: BTreeSet<Option<usize>> = e.iter().map(|&v| self.color(v)).collect();
            !colors.contains(&None) && colors.len() == e.len()
        })
    }
}

/// One hyperedge per non-identity term, covering exactly the term's support.
pub fn build_interaction_hypergraph(h: &WeightedHamiltonian) -> Result<Hypergraph> {
    if h.is_empty() {
        return Err(Error::parameter("hamiltonian", "has no terms"));
    }
    let edges = h
        .terms()
        .iter()
        .map(|(_, p)| p.support().into_iter().collect())
        .collect();
    Hypergraph::new(h.n_qubits(), edges)
}

/// Greedy coloring through the auxiliary graph (one clique per hyperedge).
///
/// Vertices are visited in ascending index order and each takes the minimum
/// color its already-colored auxiliary-graph neighbours have not used, so the
/// result is deterministic and uses at most `deg+1` colors.
pub fn color_hypergraph(graph: &Hypergraph) -> Coloring {
    let n = graph.n_vertices();
    let mut neighbours: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
    for e in graph.hyperedges() {
        for &a in e {
            for &b in e {
                if a != b {
                    neighbours[a].insert(b);
                }
            }
        }
    }

    let mut assignment = BTreeMap::new();
    let mut n_colors = 0;
    for (v, nbrs) in neighbours.iter().enumerate() {
        let used: BTreeSet<usize> = nbrs
            .iter()
            .filter_map(|&k| assignment.get(&k).copied())
            .collect();
        let mut color = 1;
        while used.contains(&color) {
            color += 1;
        }
        assignment.insert(v, color);
        n_colors = n_colors.max(color);
    }
    Coloring {
        assignment,
        n_colors,
    }
}

/// The conjugation set used to reverse time evolution: a multiplication-closed
/// set of phase-free Pauli strings containing the identity, with at least one
/// element anticommuting with every Hamiltonian term.
///
/// Closure makes each term's commutant an index-2 subgroup whenever any
/// element anticommutes with it, so exactly half the elements anticommute.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InversionGroup {
    elements: Vec<PauliString>,
    generators: Vec<PauliString>,
}

impl InversionGroup {
    /// Wraps an explicit element set, checking identity membership and
    /// phase-free multiplicative closure.
    pub fn from_elements(elements: Vec<PauliString>) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::parameter("elements", "group cannot be empty"));
        }
        let n = elements[0].n_qubits();
        let set: BTreeSet<PauliString> = elements.iter().map(|p| p.phase_free()).collect();
        if !set.contains(&PauliString::identity(n)) {
            return Err(Error::parameter(
                "elements",
                "group must contain the identity",
            ));
        }
        for a in &set {
            for b in &set {
                let prod = a.multiply(b)?.phase_free();
                if !set.contains(&prod) {
                    return Err(Error::parameter(
                        "elements",
                        format!("not closed: {a} * {b} ~ {prod} is missing"),
                    ));
                }
            }
        }
        Ok(InversionGroup {
            elements: set.into_iter().collect(),
            generators: Vec::new(),
        })
    }

    /// Group order; every protocol formula calls this quantity `L`.
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn n_qubits(&self) -> usize {
        self.elements[0].n_qubits()
    }

    /// Elements in a deterministic (sorted) order, identity included.
    pub fn elements(&self) -> &[PauliString] {
        &self.elements
    }

    pub fn generators(&self) -> &[PauliString] {
        &self.generators
    }

    /// Elements without the identity, in the same deterministic order.
    pub fn non_identity_elements(&self) -> Vec<&PauliString> {
        self.elements
            .iter()
            .filter(|p| !p.is_identity_word())
            .collect()
    }

    pub fn contains(&self, p: &PauliString) -> bool {
        self.elements.binary_search(&p.phase_free()).is_ok()
    }

    /// How many elements anticommute with `term`.
    pub fn anticommuting_count(&self, term: &PauliString) -> Result<usize> {
        let mut count = 0;
        for e in &self.elements {
            if conjugate_sign(e, term)? == -1 {
                count += 1;
            }
        }
        Ok(count)
    }
}

/// Greedy synthesis of the inversion set.
///
/// Terms are visited in ingest order; whenever the current group has no
/// element anticommuting with a term, a generator supported on the term's
/// lowest-index non-identity qubit is appended (letter X against Z or Y,
/// letter Z against X) and the group is re-closed. In the phase-free quotient
/// the group is an F2 span, so closing under one new generator just doubles
/// the element set.
pub fn build_inversion_group(h: &WeightedHamiltonian) -> Result<InversionGroup> {
    if !h.has_non_identity_term() {
        return Err(Error::NothingToInvert);
    }
    let n = h.n_qubits();
    let mut elements: BTreeSet<PauliString> = BTreeSet::new();
    elements.insert(PauliString::identity(n));
    let mut generators: Vec<PauliString> = Vec::new();

    for (_, term) in h.terms() {
        if term.is_identity_word() {
            continue;
        }
        let covered = elements
            .iter()
            .map(|e| conjugate_sign(e, term))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .any(|s| s == -1);
        if covered {
            continue;
        }
        let qubit = term.support()[0];
        let letter = match term.letter(qubit) {
            PauliLetter::Z | PauliLetter::Y => PauliLetter::X,
            PauliLetter::X => PauliLetter::Z,
            PauliLetter::I => unreachable!("support() only returns non-identity qubits"),
        };
        let generator = PauliString::single(n, qubit, letter)?;
        let doubled: Vec<PauliString> = elements
            .iter()
            .map(|e| e.multiply(&generator).map(|p| p.phase_free()))
            .collect::<Result<_>>()?;
        elements.extend(doubled);
        generators.push(generator);
    }

    Ok(InversionGroup {
        elements: elements.into_iter().collect(),
        generators,
    })
}

/// Dense residual of the twirl identity: the max absolute entry of
/// `sum_sigma sigma H sigma - (L tr(H) / 2^N) I`. A correct inversion group
/// drives this to zero (at double precision, below 1e-9).
pub fn twirl_check(group: &InversionGroup, h: &WeightedHamiltonian) -> Result<f64> {
    if group.n_qubits() != h.n_qubits() {
        return Err(Error::DimensionMismatch {
            context: "twirl check",
            left: group.n_qubits(),
            right: h.n_qubits(),
        });
    }
    capacity::check_state("twirl check", h.n_qubits())?;
    let dim = 1usize << h.n_qubits();
    let h_mat = h.matrix()?;
    let mut sum: CMat = ndarray::Array2::zeros((dim, dim));
    for sigma in group.elements() {
        let s = sigma.to_matrix()?;
        sum = sum + s.dot(&h_mat).dot(&s);
    }
    let scale = c(
        group.len() as f64 * linalg::trace(&h_mat).re / dim as f64,
        0.0,
    );
    let residual = sum - linalg::identity(dim).mapv(|v| v * scale);
    Ok(linalg::max_abs(&residual))
}
