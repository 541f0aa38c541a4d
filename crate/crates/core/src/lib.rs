//! Accreditation of analogue quantum simulations.
//!
//! This crate turns a spin Hamiltonian and an evolution time into an
//! accredited simulation run: it synthesises the requested target simulation
//! together with a batch of trap simulations that share its gate layout,
//! executes everything on an exact density-matrix simulator under a
//! configurable CPTP noise model, and reports an upper bound on the total
//! variation distance between the target's ideal and actual output
//! distributions.
//!
//! The pieces compose bottom-up:
//!
//! - [`pauli`]: phase-tagged Pauli strings in a symplectic encoding, and
//!   real-weighted Pauli-sum Hamiltonians.
//! - [`hypergraph`]: interaction hypergraphs, greedy coloring, and the
//!   inversion set `G'` whose conjugations reverse an evolution.
//! - [`builder`]: subcircuit, vanishing-block, target, and trap synthesis.
//! - [`densim`]: the exact simulator, noise models, channels and Choi-matrix
//!   distances, and output distributions.
//! - [`accreditor`]: the protocol itself, the `epsilon_VD` bound, the
//!   advantage verdict, and exhaustive audit oracles.
//!
//! Everything is deterministic given a seed: random draws come from
//! splittable ChaCha streams ([`rng`]), so results reproduce bit-for-bit.
//!
//! # Quick start
//!
//! ```
//! use accredia::{run_protocol, ComposedGate, ProtocolConfig, WeightedHamiltonian};
//!
//! let hamiltonian = WeightedHamiltonian::from_json(r#"[{"coeff": 1.0, "pauli": "ZZ"}]"#)?;
//! let cfg = ProtocolConfig {
//!     hamiltonian,
//!     t: 1.0,
//!     eps: 0.05,
//!     alpha: 0.8,
//!     theta: 0.3, // coarse accuracy keeps this example at 53 traps
//!     prep: vec![ComposedGate::identity(); 2],
//!     meas: vec![ComposedGate::identity(); 2],
//!     seed: 1,
//!     target_shots: 1,
//!     parallelism: 1,
//! };
//! let report = run_protocol(&cfg, None)?;
//! assert_eq!(report.n_traps, 53);
//! assert_eq!(report.n_traps_failed, 0);
//! assert!((report.epsilon_vd - 0.6).abs() < 1e-12);
//! # Ok::<(), accredia::Error>(())
//! ```

pub mod accreditor;
pub mod bitstring;
pub mod builder;
pub mod capacity;
pub mod densim;
pub mod error;
pub mod hypergraph;
pub mod linalg;
pub mod pauli;
pub mod rng;

pub use accreditor::{
    advantage_preset, advantage_verdict, averaged_trap_channel, epsilon_vd, num_traps,
    run_protocol, trap_detection_probability, true_ideal_actual_distance, AdvantageVerdict,
    ProtocolConfig, ProtocolResult, TrapInjection, TrapRecord,
};
pub use bitstring::Bitstring;
pub use builder::{
    build_evolution_subcircuit, build_target, build_trap, build_vanishing_block, compute_m,
    split_time, BaseGate, CircuitKind, ComposedGate, Direction, Fragment, HybridCircuit, Segment,
    SplitTimes,
};
pub use densim::{
    channel_choi, choi_trace_distance, exact_unitary, execute, output_distribution,
    output_distribution_resolved, tvd, Channel, DensityMatrix, Distribution, NoiseModel,
    ResolvedNoise,
};
pub use error::{Error, Result};
pub use hypergraph::{
    build_interaction_hypergraph, build_inversion_group, color_hypergraph, twirl_check, Coloring,
    Hypergraph, InversionGroup,
};
pub use pauli::{conjugate_sign, PauliLetter, PauliString, Phase, WeightedHamiltonian};
