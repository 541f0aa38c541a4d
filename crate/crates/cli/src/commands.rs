//! Subcommand implementations: run, compute, write artifacts.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;

use accredia::{
    advantage_preset, advantage_verdict, build_inversion_group, build_target, choi_trace_distance,
    compute_m, exact_unitary, run_protocol, split_time, trap_detection_probability,
    true_ideal_actual_distance, AdvantageVerdict, Channel, PauliString, ProtocolConfig,
    ProtocolResult, TrapInjection, WeightedHamiltonian,
};

use crate::config::{
    load, parse_gates, AccreditConfig, AdvantageConfig, InjectionConfig, InvertBenchConfig,
    TrapAuditConfig,
};
use crate::{RunArgs, TwirlArgs};

fn unix_millis() -> u128 {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_millis())
        .unwrap_or(0)
}

fn write_artifact(out: &Path, name: &str, contents: &str) -> Result<PathBuf> {
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let path = out.join(name);
    fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
    Ok(path)
}

#[derive(Serialize)]
struct AccreditArtifact<'a> {
    #[serde(skip_serializing_if = "Option::is_none")]
    generated_at_unix_ms: Option<u128>,
    /// Exact ideal-actual variation distance of the target under the
    /// no-drift noise instance (zero without noise).
    true_nu: f64,
    result: &'a ProtocolResult,
}

fn run_configured_protocol(
    cfg: ProtocolConfig,
    noise: Option<&accredia::NoiseModel>,
) -> Result<(ProtocolResult, f64)> {
    let result = run_protocol(&cfg, noise)?;
    let true_nu = match noise {
        None => 0.0,
        Some(nm) => {
            let target = build_target(&cfg.hamiltonian, cfg.t, cfg.eps, &cfg.prep, &cfg.meas)?;
            let resolved = nm.nominal(cfg.hamiltonian.n_qubits())?;
            true_ideal_actual_distance(&target, &resolved)?
        }
    };
    Ok((result, true_nu))
}

fn executions_csv(result: &ProtocolResult) -> String {
    let mut csv = String::from("execution_id,kind,position,outcome,passed\n");
    let mut id = 0usize;
    for record in &result.traps {
        csv.push_str(&format!(
            "{id},trap,{},{},{}\n",
            record.position, record.outcome, record.passed
        ));
        id += 1;
    }
    for outcome in &result.target_outcomes {
        csv.push_str(&format!(
            "{id},target,{},{outcome},\n",
            result.target_position
        ));
        id += 1;
    }
    csv
}

pub fn accredit(args: &RunArgs) -> Result<()> {
    let mut cfg: AccreditConfig = load(&args.config)?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(par) = args.parallelism {
        cfg.parallelism = par;
    }
    let n = cfg.hamiltonian.n_qubits();
    let protocol = ProtocolConfig {
        hamiltonian: cfg.hamiltonian.clone(),
        t: cfg.t,
        eps: cfg.eps,
        alpha: cfg.alpha,
        theta: cfg.theta,
        prep: parse_gates(cfg.prep.as_deref(), n, "prep")?,
        meas: parse_gates(cfg.meas.as_deref(), n, "meas")?,
        seed: cfg.seed,
        target_shots: cfg.target_shots,
        parallelism: cfg.parallelism,
    };
    let (result, true_nu) = run_configured_protocol(protocol, cfg.noise.as_ref())?;

    if args.write_json() {
        let artifact = AccreditArtifact {
            generated_at_unix_ms: (!args.no_timestamp).then(unix_millis),
            true_nu,
            result: &result,
        };
        write_artifact(
            &args.out,
            "accredit_result.json",
            &serde_json::to_string_pretty(&artifact)?,
        )?;
    }
    if args.write_csv() {
        let summary = format!(
            "{}\n{}\n",
            ProtocolResult::csv_header(),
            result.csv_row(0, Some(true_nu))
        );
        write_artifact(&args.out, "accredit_summary.csv", &summary)?;
        write_artifact(&args.out, "executions.csv", &executions_csv(&result))?;
    }

    println!(
        "epsilon_vd = {} (traps {}, failed {}, true_nu {true_nu})",
        result.epsilon_vd, result.n_traps, result.n_traps_failed
    );
    Ok(())
}

#[derive(Serialize)]
struct AdvantageArtifact<'a> {
    #[serde(skip_serializing_if = "Option::is_none")]
    generated_at_unix_ms: Option<u128>,
    verdict: &'a AdvantageVerdict,
    true_nu: f64,
    result: &'a ProtocolResult,
}

pub fn advantage(args: &RunArgs) -> Result<()> {
    let mut cfg: AdvantageConfig = load(&args.config)?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(par) = args.parallelism {
        cfg.parallelism = par;
    }
    let n_edges = cfg.rows * cfg.cols.saturating_sub(1) + cfg.rows.saturating_sub(1) * cfg.cols;
    let n = cfg.rows * cfg.cols;
    let hamiltonian = advantage_preset(
        cfg.rows,
        cfg.cols,
        &cfg.couplings.materialise(n_edges),
        &cfg.fields.materialise(n),
    )?;
    let protocol = ProtocolConfig {
        hamiltonian,
        t: cfg.t,
        eps: cfg.eps,
        alpha: cfg.alpha,
        theta: cfg.theta,
        prep: parse_gates(cfg.prep.as_deref(), n, "prep")?,
        meas: parse_gates(cfg.meas.as_deref(), n, "meas")?,
        seed: cfg.seed,
        target_shots: cfg.target_shots,
        parallelism: cfg.parallelism,
    };
    let (result, true_nu) = run_configured_protocol(protocol, cfg.noise.as_ref())?;
    let verdict = advantage_verdict(&result);

    if args.write_json() {
        let artifact = AdvantageArtifact {
            generated_at_unix_ms: (!args.no_timestamp).then(unix_millis),
            verdict: &verdict,
            true_nu,
            result: &result,
        };
        write_artifact(
            &args.out,
            "advantage_result.json",
            &serde_json::to_string_pretty(&artifact)?,
        )?;
    }
    if args.write_csv() {
        let mut csv = String::from("run,epsilon_vd,true_nu,threshold,margin,passed\n");
        csv.push_str(&format!(
            "0,{},{true_nu},{},{},{}\n",
            result.epsilon_vd, verdict.threshold, verdict.margin, verdict.passed
        ));
        write_artifact(&args.out, "advantage_summary.csv", &csv)?;
    }

    println!(
        "epsilon_vd = {} threshold = {} passed = {} margin = {}",
        result.epsilon_vd, verdict.threshold, verdict.passed, verdict.margin
    );
    Ok(())
}

pub fn invert_bench(args: &RunArgs) -> Result<()> {
    let cfg: InvertBenchConfig = load(&args.config)?;
    let group = build_inversion_group(&cfg.hamiltonian)?;
    let l = group.len();
    let ideal =
        Channel::from_unitary(&exact_unitary(&cfg.hamiltonian, -cfg.t / (l as f64 - 1.0))?)?;

    let points: Vec<(Option<f64>, usize)> = match (&cfg.m_values, &cfg.eps_values) {
        (Some(ms), None) => ms.iter().map(|&m| (None, m)).collect(),
        (None, Some(epss)) => epss
            .iter()
            .map(|&eps| Ok((Some(eps), compute_m(&cfg.hamiltonian, cfg.t, eps, l)?)))
            .collect::<Result<_>>()?,
        _ => anyhow::bail!("config must set exactly one of `m_values` or `eps_values`"),
    };

    let mut csv = String::from("eps,m,choi_distance,diamond_lower,diamond_upper\n");
    for (eps, m) in points {
        anyhow::ensure!(m >= 1, "slice count must be at least 1");
        let channel = accredia::densim::averaged_inversion_subcircuit(
            &cfg.hamiltonian,
            &group,
            cfg.t,
            m,
            None,
            false,
        )?;
        let (dist, lower, upper) = choi_trace_distance(&channel.choi(), &ideal.choi())?;
        let eps_field = eps.map(|e| e.to_string()).unwrap_or_default();
        csv.push_str(&format!("{eps_field},{m},{dist},{lower},{upper}\n"));
        println!("m = {m}: choi distance {dist:.3e} (diamond within [{lower:.3e}, {upper:.3e}])");
    }
    write_artifact(&args.out, "invert_bench.csv", &csv)?;
    Ok(())
}

pub fn twirl_check(args: &TwirlArgs) -> Result<()> {
    let raw = fs::read_to_string(&args.hamiltonian)
        .with_context(|| format!("reading {}", args.hamiltonian.display()))?;
    let hamiltonian = WeightedHamiltonian::from_json(&raw)?;
    let group = build_inversion_group(&hamiltonian)?;
    let residual = accredia::twirl_check(&group, &hamiltonian)?;
    if args.json {
        println!(
            "{}",
            serde_json::json!({ "residual": residual, "group_order": group.len() })
        );
    } else {
        println!("residual = {residual:e} (group order {})", group.len());
    }
    Ok(())
}

pub fn trap_audit(args: &RunArgs) -> Result<()> {
    let cfg: TrapAuditConfig = load(&args.config)?;
    let n = cfg.hamiltonian.n_qubits();
    let group = build_inversion_group(&cfg.hamiltonian)?;
    let split = split_time(cfg.t, group.len())?;
    let m = compute_m(&cfg.hamiltonian, split.t2, cfg.eps, group.len())?;

    let injection = match cfg.injection {
        None => TrapInjection::AfterSlice(m / 2),
        Some(InjectionConfig::Name(_)) => TrapInjection::AfterPrep,
        Some(InjectionConfig::AfterSlice { after_slice }) => TrapInjection::AfterSlice(after_slice),
    };

    let errors: Vec<PauliString> = match &cfg.errors {
        Some(words) => words
            .iter()
            .map(|w| w.parse::<PauliString>().map_err(Into::into))
            .collect::<Result<_>>()?,
        None => (1..(1usize << (2 * n)))
            .map(|idx| PauliString::word_from_index(idx, n))
            .collect(),
    };

    let mut csv = String::from("error,detection_probability\n");
    let mut floor = f64::INFINITY;
    for error in &errors {
        let p = trap_detection_probability(&cfg.hamiltonian, cfg.t, cfg.eps, error, injection)?;
        csv.push_str(&format!("{error},{p}\n"));
        println!("{error}: detection {p:.6}");
        floor = floor.min(p);
    }
    write_artifact(&args.out, "trap_audit.csv", &csv)?;
    println!("minimum detection probability: {floor:.6}");
    Ok(())
}
