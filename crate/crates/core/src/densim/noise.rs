//! Configurable CPTP noise, keyed by circuit position.
//!
//! Bindings attach a channel to a position class: after the preparation
//! layer, after selected evolution slices, after every body gate layer, or
//! just before readout. Positions never reference the gates that sit at
//! them, so two circuits with the same layout experience the same noise
//! regardless of their gate identities. An optional per-execution drift
//! multiplies the channel's strength parameter each time a circuit runs.
//!
//! The protocol's guarantee additionally assumes that replacing non-identity
//! gates by identities never increases the output error. That is a statement
//! about hardware, not something a simulated model can be forced to satisfy;
//! position-keyed bindings as built here satisfy it trivially (the noise does
//! not see the gates at all), which is why the models in this module are safe
//! to accredit against. A hypothetical gate-conditioned model would not be.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, c, CMat};
use crate::pauli::PauliString;

use super::channel::{choi_min_eigenvalue, Channel};

/// Which evolution slices a binding covers (slice indices count `Evolution`
/// segments through the body, starting at 0).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SliceSelector {
    Any,
    /// Half-open range `start..end`.
    Range {
        start: usize,
        end: usize,
    },
}

impl SliceSelector {
    pub fn matches(&self, slice: usize) -> bool {
        match self {
            SliceSelector::Any => true,
            SliceSelector::Range { start, end } => slice >= *start && slice < *end,
        }
    }
}

/// A position class in a hybrid circuit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Location {
    Prep,
    EvolutionSlice(SliceSelector),
    GateLayer,
    Measurement,
}

impl Serialize for Location {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Location::Prep => serializer.serialize_str("prep"),
            Location::Measurement => serializer.serialize_str("measurement"),
            Location::GateLayer => serializer.serialize_str("gate_layer"),
            Location::EvolutionSlice(SliceSelector::Any) => {
                serializer.serialize_str("evolution_slice")
            }
            Location::EvolutionSlice(SliceSelector::Range { start, end }) => {
                let mut map = BTreeMap::new();
                map.insert("evolution_slice", [*start, *end]);
                map.serialize(serializer)
            }
        }
    }
}

impl<'de> Deserialize<'de> for Location {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Name(String),
            Map(BTreeMap<String, [usize; 2]>),
        }
        match Repr::deserialize(deserializer)? {
            Repr::Name(name) => match name.as_str() {
                "prep" => Ok(Location::Prep),
                "measurement" => Ok(Location::Measurement),
                "gate_layer" => Ok(Location::GateLayer),
                "evolution_slice" => Ok(Location::EvolutionSlice(SliceSelector::Any)),
                other => Err(serde::de::Error::custom(format!(
                    "unknown location `{other}` in field `where`"
                ))),
            },
            Repr::Map(map) => {
                if map.len() != 1 || !map.contains_key("evolution_slice") {
                    return Err(serde::de::Error::custom(
                        "location map must have the single key `evolution_slice`",
                    ));
                }
                let [start, end] = map["evolution_slice"];
                if end <= start {
                    return Err(serde::de::Error::custom(format!(
                        "empty slice range [{start}, {end}) in field `where`"
                    )));
                }
                Ok(Location::EvolutionSlice(SliceSelector::Range {
                    start,
                    end,
                }))
            }
        }
    }
}

/// A channel family with a scalar strength parameter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ChannelSpec {
    /// Applies Pauli word `w` with probability `rates[w]`, identity with the
    /// remaining probability. Words fix the qubit count.
    StochasticPauli { rates: BTreeMap<String, f64> },
    /// `rho -> (1-p) rho + p I/2^N` on the whole register.
    Depolarizing { p: f64 },
    /// The unitary `exp(-i angle P_axis)`.
    CoherentOverrotation { axis: String, angle: f64 },
    /// Independent single-qubit amplitude damping of strength `gamma` on
    /// every qubit.
    AmplitudeDamping { gamma: f64 },
}

impl ChannelSpec {
    /// The qubit count implied by any Pauli words in the channel definition.
    fn natural_qubits(&self) -> Result<Option<usize>> {
        match self {
            ChannelSpec::StochasticPauli { rates } => {
                let mut n = None;
                for word in rates.keys() {
                    let p: PauliString = word.parse()?;
                    match n {
                        None => n = Some(p.n_qubits()),
                        Some(k) if k != p.n_qubits() => {
                            return Err(Error::parameter(
                                "rates",
                                format!("Pauli words of mixed lengths ({k} and {})", p.n_qubits()),
                            ))
                        }
                        _ => {}
                    }
                }
                Ok(n)
            }
            ChannelSpec::CoherentOverrotation { axis, .. } => {
                Ok(Some(axis.parse::<PauliString>()?.n_qubits()))
            }
            _ => Ok(None),
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            ChannelSpec::StochasticPauli { rates } => {
                if rates.is_empty() {
                    return Err(Error::parameter(
                        "rates",
                        "stochastic_pauli needs a rate map",
                    ));
                }
                let mut total = 0.0;
                for (word, &r) in rates {
                    let p: PauliString = word.parse()?;
                    if p.is_identity_word() {
                        return Err(Error::parameter(
                            "rates",
                            "identity word is implicit; list only error words",
                        ));
                    }
                    if r < 0.0 {
                        return Err(Error::parameter(
                            "rates",
                            format!("rate for `{word}` is negative: {r}"),
                        ));
                    }
                    total += r;
                }
                if total > 1.0 + 1e-12 {
                    return Err(Error::parameter(
                        "rates",
                        format!("rates sum to {total}, above 1"),
                    ));
                }
                Ok(())
            }
            ChannelSpec::Depolarizing { p } => {
                if !(0.0..=1.0).contains(p) {
                    return Err(Error::parameter("p", format!("must be in [0,1], got {p}")));
                }
                Ok(())
            }
            ChannelSpec::CoherentOverrotation { axis, angle } => {
                let word: PauliString = axis.parse()?;
                if word.is_identity_word() {
                    return Err(Error::parameter(
                        "axis",
                        "overrotation axis cannot be identity",
                    ));
                }
                if !angle.is_finite() {
                    return Err(Error::parameter("angle", "must be finite"));
                }
                Ok(())
            }
            ChannelSpec::AmplitudeDamping { gamma } => {
                if !(0.0..=1.0).contains(gamma) {
                    return Err(Error::parameter(
                        "gamma",
                        format!("must be in [0,1], got {gamma}"),
                    ));
                }
                Ok(())
            }
        }
    }

    /// Materialises the channel on `n_qubits` qubits with the drift
    /// multiplier applied and clamped to the parameter's validity range.
    fn resolve(&self, n_qubits: usize, multiplier: f64) -> Result<ResolvedChannel> {
        let m = multiplier.max(0.0);
        match self {
            ChannelSpec::StochasticPauli { rates } => {
                let mut scaled: Vec<(PauliString, f64)> = Vec::with_capacity(rates.len());
                let mut total = 0.0;
                for (word, &r) in rates {
                    let p: PauliString = word.parse()?;
                    if p.n_qubits() != n_qubits {
                        return Err(Error::DimensionMismatch {
                            context: "stochastic pauli word",
                            left: n_qubits,
                            right: p.n_qubits(),
                        });
                    }
                    let r = r * m;
                    total += r;
                    scaled.push((p, r));
                }
                if total > 1.0 {
                    for (_, r) in &mut scaled {
                        *r /= total;
                    }
                    total = 1.0;
                }
                let mut ops = vec![linalg::identity(1 << n_qubits)
                    .mapv(|v| v * c((1.0 - total).max(0.0).sqrt(), 0.0))];
                for (p, r) in &scaled {
                    ops.push(p.to_matrix()?.mapv(|v| v * c(r.sqrt(), 0.0)));
                }
                Ok(ResolvedChannel::Kraus { n_qubits, ops })
            }
            ChannelSpec::Depolarizing { p } => Ok(ResolvedChannel::Depolarizing {
                n_qubits,
                p: (p * m).clamp(0.0, 1.0),
            }),
            ChannelSpec::CoherentOverrotation { axis, angle } => {
                let word: PauliString = axis.parse()?;
                if word.n_qubits() != n_qubits {
                    return Err(Error::DimensionMismatch {
                        context: "overrotation axis",
                        left: n_qubits,
                        right: word.n_qubits(),
                    });
                }
                let theta = angle * m;
                // exp(-i theta P) = cos(theta) I - i sin(theta) P.
                let u = linalg::identity(1 << n_qubits).mapv(|v| v * c(theta.cos(), 0.0))
                    + word.to_matrix()?.mapv(|v| v * c(0.0, -theta.sin()));
                Ok(ResolvedChannel::Kraus {
                    n_qubits,
                    ops: vec![u],
                })
            }
            ChannelSpec::AmplitudeDamping { gamma } => {
                let g = (gamma * m).clamp(0.0, 1.0);
                let k0 = ndarray::array![
                    [c(1.0, 0.0), c(0.0, 0.0)],
                    [c(0.0, 0.0), c((1.0 - g).sqrt(), 0.0)]
                ];
                let k1 =
                    ndarray::array![[c(0.0, 0.0), c(g.sqrt(), 0.0)], [c(0.0, 0.0), c(0.0, 0.0)]];
                let mut ops: Vec<CMat> = vec![linalg::identity(1)];
                for _ in 0..n_qubits {
                    let mut next = Vec::with_capacity(ops.len() * 2);
                    for op in &ops {
                        next.push(linalg::kron(op, &k0));
                        next.push(linalg::kron(op, &k1));
                    }
                    ops = next;
                }
                Ok(ResolvedChannel::Kraus { n_qubits, ops })
            }
        }
    }
}

/// Per-execution strength multiplier distribution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "dist", rename_all = "snake_case", deny_unknown_fields)]
pub enum DriftSpec {
    Uniform { lo: f64, hi: f64 },
    Gaussian { mean: f64, std: f64 },
}

impl DriftSpec {
    fn validate(&self) -> Result<()> {
        match self {
            DriftSpec::Uniform { lo, hi } => {
                if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
                    return Err(Error::parameter(
                        "drift",
                        format!("uniform interval [{lo}, {hi}] is invalid"),
                    ));
                }
                Ok(())
            }
            DriftSpec::Gaussian { mean, std } => {
                if !(mean.is_finite() && std.is_finite() && *std >= 0.0) {
                    return Err(Error::parameter(
                        "drift",
                        format!("gaussian (mean {mean}, std {std}) is invalid"),
                    ));
                }
                Ok(())
            }
        }
    }

    fn draw<R: rand::Rng>(&self, rng: &mut R) -> f64 {
        use rand::RngExt;
        match self {
            DriftSpec::Uniform { lo, hi } => lo + (hi - lo) * rng.random::<f64>(),
            DriftSpec::Gaussian { mean, std } => {
                // Box-Muller.
                let u1: f64 = rng.random::<f64>().max(f64::MIN_POSITIVE);
                let u2: f64 = rng.random();
                let z = (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos();
                mean + std * z
            }
        }
    }
}

/// One channel bound to one position class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseBinding {
    #[serde(rename = "where")]
    pub location: Location,
    pub channel: ChannelSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub drift: Option<DriftSpec>,
}

/// A list of noise bindings. Channels are validated on construction,
/// including a Choi positivity check at the channel's natural size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NoiseModel {
    bindings: Vec<NoiseBinding>,
}

impl NoiseModel {
    pub fn new(bindings: Vec<NoiseBinding>) -> Result<Self> {
        let model = NoiseModel { bindings };
        model.validate()?;
        Ok(model)
    }

    pub fn bindings(&self) -> &[NoiseBinding] {
        &self.bindings
    }

    fn validate(&self) -> Result<()> {
        for b in &self.bindings {
            b.channel.validate()?;
            if let Some(d) = &b.drift {
                d.validate()?;
            }
            // CPTP check at the natural size: Choi PSD + trace preservation.
            let n = b.channel.natural_qubits()?.unwrap_or(1);
            let resolved = b.channel.resolve(n, 1.0)?;
            let ch = resolved.to_channel()?;
            let min_eig = choi_min_eigenvalue(&ch);
            if min_eig < -1e-9 {
                return Err(Error::parameter(
                    "channel",
                    format!("not completely positive: Choi eigenvalue {min_eig}"),
                ));
            }
            let tp = ch.trace_preservation_residual();
            if tp > 1e-9 {
                return Err(Error::parameter(
                    "channel",
                    format!("not trace preserving: residual {tp}"),
                ));
            }
        }
        Ok(())
    }

    /// Materialises all channels for an `n_qubits` circuit with every drift
    /// multiplier fixed to 1 (the no-drift instance).
    pub fn nominal(&self, n_qubits: usize) -> Result<ResolvedNoise> {
        self.resolve_with(n_qubits, |_| 1.0)
    }

    /// Draws one drift multiplier per drifting binding and materialises the
    /// channels: one execution's noise instance.
    pub fn resolve<R: rand::Rng>(&self, n_qubits: usize, rng: &mut R) -> Result<ResolvedNoise> {
        let draws: Vec<f64> = self
            .bindings
            .iter()
            .map(|b| b.drift.as_ref().map(|d| d.draw(rng)).unwrap_or(1.0))
            .collect();
        self.resolve_with(n_qubits, |i| draws[i])
    }

    fn resolve_with(
        &self,
        n_qubits: usize,
        multiplier: impl Fn(usize) -> f64,
    ) -> Result<ResolvedNoise> {
        let mut bindings = Vec::with_capacity(self.bindings.len());
        for (i, b) in self.bindings.iter().enumerate() {
            bindings.push((b.location, b.channel.resolve(n_qubits, multiplier(i))?));
        }
        Ok(ResolvedNoise { n_qubits, bindings })
    }

    pub fn from_json(json: &str) -> Result<Self> {
        let model: NoiseModel =
            serde_json::from_str(json).map_err(|e| Error::Parse(e.to_string()))?;
        model.validate()?;
        Ok(model)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("noise model serialisation cannot fail")
    }
}

/// A materialised channel ready to apply to a density matrix.
#[derive(Debug, Clone)]
pub enum ResolvedChannel {
    Kraus { n_qubits: usize, ops: Vec<CMat> },
    Depolarizing { n_qubits: usize, p: f64 },
}

impl ResolvedChannel {
    pub fn n_qubits(&self) -> usize {
        match self {
            ResolvedChannel::Kraus { n_qubits, .. } => *n_qubits,
            ResolvedChannel::Depolarizing { n_qubits, .. } => *n_qubits,
        }
    }

    /// Applies the channel to a dense density matrix.
    pub fn apply(&self, rho: &CMat) -> CMat {
        match self {
            ResolvedChannel::Kraus { ops, .. } => {
                let mut out: CMat = ndarray::Array2::zeros(rho.dim());
                for k in ops {
                    out = out + k.dot(rho).dot(&linalg::dagger(k));
                }
                out
            }
            ResolvedChannel::Depolarizing { n_qubits, p } => {
                let d = 1usize << n_qubits;
                let tr = linalg::trace(rho);
                let mixed = linalg::identity(d).mapv(|v| v * (tr * c(p / d as f64, 0.0)));
                rho.mapv(|v| v * c(1.0 - p, 0.0)) + mixed
            }
        }
    }

    /// Superoperator form, for Choi checks and channel analysis.
    pub fn to_channel(&self) -> Result<Channel> {
        match self {
            ResolvedChannel::Kraus { ops, .. } => Channel::from_kraus(ops),
            ResolvedChannel::Depolarizing { n_qubits, p } => {
                // Kraus form of global depolarizing: uniform Pauli mixture.
                let words = 1usize << (2 * n_qubits);
                let mut ops = Vec::with_capacity(words);
                for idx in 0..words {
                    let weight = if idx == 0 {
                        (1.0 - p) + p / words as f64
                    } else {
                        p / words as f64
                    };
                    ops.push(
                        PauliString::word_from_index(idx, *n_qubits)
                            .to_matrix()?
                            .mapv(|v| v * c(weight.sqrt(), 0.0)),
                    );
                }
                Channel::from_kraus(&ops)
            }
        }
    }
}

/// One execution's noise: every binding materialised at fixed strength.
#[derive(Debug, Clone)]
pub struct ResolvedNoise {
    n_qubits: usize,
    bindings: Vec<(Location, ResolvedChannel)>,
}

impl ResolvedNoise {
    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn bindings(&self) -> &[(Location, ResolvedChannel)] {
        &self.bindings
    }

    pub fn at_prep(&self) -> impl Iterator<Item = &ResolvedChannel> {
        self.bindings
            .iter()
            .filter(|(l, _)| matches!(l, Location::Prep))
            .map(|(_, ch)| ch)
    }

    pub fn at_gate_layer(&self) -> impl Iterator<Item = &ResolvedChannel> {
        self.bindings
            .iter()
            .filter(|(l, _)| matches!(l, Location::GateLayer))
            .map(|(_, ch)| ch)
    }

    pub fn at_measurement(&self) -> impl Iterator<Item = &ResolvedChannel> {
        self.bindings
            .iter()
            .filter(|(l, _)| matches!(l, Location::Measurement))
            .map(|(_, ch)| ch)
    }

    pub fn at_slice(&self, slice: usize) -> impl Iterator<Item = &ResolvedChannel> + '_ {
        self.bindings
            .iter()
            .filter(move |(l, _)| matches!(l, Location::EvolutionSlice(sel) if sel.matches(slice)))
            .map(|(_, ch)| ch)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_roundtrip_all_locations() {
        let json = r#"[
            {"where": "prep", "channel": {"kind": "depolarizing", "p": 0.1}},
            {"where": "gate_layer", "channel": {"kind": "amplitude_damping", "gamma": 0.05}},
            {"where": "evolution_slice", "channel": {"kind": "coherent_overrotation", "axis": "XI", "angle": 0.02}},
            {"where": {"evolution_slice": [0, 4]},
             "channel": {"kind": "stochastic_pauli", "rates": {"XI": 0.1, "ZZ": 0.05}},
             "drift": {"dist": "uniform", "lo": 0.9, "hi": 1.1}},
            {"where": "measurement", "channel": {"kind": "depolarizing", "p": 0.01},
             "drift": {"dist": "gaussian", "mean": 1.0, "std": 0.1}}
        ]"#;
        let model = NoiseModel::from_json(json).unwrap();
        assert_eq!(model.bindings().len(), 5);
        let again = NoiseModel::from_json(&model.to_json()).unwrap();
        assert_eq!(model, again);
    }

    #[test]
    fn bad_configs_are_rejected_with_field_names() {
        let negative =
            r#"[{"where": "prep", "channel": {"kind": "stochastic_pauli", "rates": {"X": -0.1}}}]"#;
        let err = NoiseModel::from_json(negative).unwrap_err().to_string();
        assert!(err.contains("rates"), "{err}");

        let oversum = r#"[{"where": "prep", "channel": {"kind": "stochastic_pauli", "rates": {"X": 0.7, "Z": 0.6}}}]"#;
        assert!(NoiseModel::from_json(oversum).is_err());

        let bad_p = r#"[{"where": "prep", "channel": {"kind": "depolarizing", "p": 1.5}}]"#;
        let err = NoiseModel::from_json(bad_p).unwrap_err().to_string();
        assert!(err.contains('p'), "{err}");

        let unknown_field =
            r#"[{"where": "prep", "channel": {"kind": "depolarizing", "p": 0.5}, "extra": 1}]"#;
        assert!(NoiseModel::from_json(unknown_field).is_err());

        let bad_range = r#"[{"where": {"evolution_slice": [3, 3]}, "channel": {"kind": "depolarizing", "p": 0.5}}]"#;
        assert!(NoiseModel::from_json(bad_range).is_err());
    }

    #[test]
    fn stochastic_pauli_words_fix_the_register_size() {
        let model = NoiseModel::from_json(
            r#"[{"where": "prep", "channel": {"kind": "stochastic_pauli", "rates": {"XI": 0.2}}}]"#,
        )
        .unwrap();
        assert!(model.nominal(2).is_ok());
        assert!(model.nominal(3).is_err());
    }

    #[test]
    fn drift_scales_and_clamps() {
        let spec = ChannelSpec::Depolarizing { p: 0.4 };
        match spec.resolve(1, 2.0).unwrap() {
            ResolvedChannel::Depolarizing { p, .. } => assert!((p - 0.8).abs() < 1e-15),
            _ => panic!("wrong variant"),
        }
        match spec.resolve(1, 10.0).unwrap() {
            ResolvedChannel::Depolarizing { p, .. } => assert_eq!(p, 1.0),
            _ => panic!("wrong variant"),
        }
        // Negative multipliers clamp to zero strength.
        match spec.resolve(1, -1.0).unwrap() {
            ResolvedChannel::Depolarizing { p, .. } => assert_eq!(p, 0.0),
            _ => panic!("wrong variant"),
        }
    }

    #[test]
    fn resolved_channels_are_cptp() {
        let specs = vec![
            ChannelSpec::StochasticPauli {
                rates: [("XI".to_string(), 0.1), ("YZ".to_string(), 0.2)]
                    .into_iter()
                    .collect(),
            },
            ChannelSpec::Depolarizing { p: 0.3 },
            ChannelSpec::CoherentOverrotation {
                axis: "ZZ".into(),
                angle: 0.2,
            },
            ChannelSpec::AmplitudeDamping { gamma: 0.25 },
        ];
        for spec in specs {
            let ch = spec.resolve(2, 1.0).unwrap().to_channel().unwrap();
            assert!(ch.trace_preservation_residual() < 1e-10, "{spec:?}");
            assert!(choi_min_eigenvalue(&ch) > -1e-10, "{spec:?}");
        }
    }
}
