//! Subcommand implementations.

use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::io::{check_len, emit, numbered, read_json, to_json, write_file};
use crate::{AnalyzeArgs, BenchArgs, DemoArgs, KeygenArgs, SimulateArgs, TransformArgs};
use iohfc_core::analysis::{
    delta_k_bound, error_bound, ErrorBoundReport, LyapunovForm, MemoryReport, QuantizedGain, StabilityCertificate,
    ThetaForm,
};
use iohfc_core::bfv::{keygen as generate_keys, BfvContext, BfvParams, Profile};
use iohfc_core::encoding::Sensitivity;
use iohfc_core::encsys::{
    bench as bench_ops, run_closed_loop, ClosedLoopRun, EncryptedLoop, ReferenceSchedule, RunOptions,
};
use iohfc_core::iohfc::{
    lift_plant, transform as to_history_form, IohfcGain, NoiseSequence, Plant, StateSpaceController,
};

const TANK_PLANT: &str = include_str!("../assets/tank_plant.json");
const TANK_CONTROLLER: &str = include_str!("../assets/tank_controller.json");
const TANK_SCHEDULE: &str = include_str!("../assets/tank_schedule.json");
const TANK_GAIN_PRINTED: &str = include_str!("../assets/tank_gain_printed.json");
const TANK_LENGTH: usize = 2;
const TANK_GAMMA: f64 = 0.9797;
const TANK_DELTA_K: f64 = 2e-4;
const TANK_DELTA_D: f64 = 1e-3;
const NOISE_SEED: u64 = 1;

fn sensitivity(name: &str, x: f64) -> Result<Sensitivity> {
    Sensitivity::new(x).with_context(|| format!("--{name}"))
}

pub fn keygen(profile: Profile, a: &KeygenArgs) -> Result<()> {
    let params = BfvParams::for_profile(profile);
    let ctx = BfvContext::new(params.clone())?;
    let keys = generate_keys(&ctx, a.seed)?;
    fs::create_dir_all(&a.out).with_context(|| format!("creating {}", a.out.display()))?;
    write_file(&a.out.join("params.json"), to_json(&params)?.as_bytes())?;
    write_file(&a.out.join("pk.bin"), &keys.pk.to_bytes(&ctx))?;
    write_file(&a.out.join("sk.bin"), &keys.sk.to_bytes(&ctx))?;
    write_file(&a.out.join("rlk.bin"), &keys.rlk.to_bytes(&ctx))?;
    write_file(&a.out.join("gk.bin"), &keys.gk.to_bytes(&ctx))?;
    Ok(())
}

pub fn transform(a: &TransformArgs) -> Result<()> {
    let ctrl: StateSpaceController = read_json(&a.controller)?;
    let gain = to_history_form(&ctrl, a.length)?;
    emit(a.out.as_deref(), &to_json(&gain)?)
}

/// Both Lyapunov forms and both θ variants for one configuration.
#[derive(Debug, Serialize)]
struct AnalysisReport {
    delta_k: f64,
    delta_d: f64,
    eta_k: f64,
    eta_d: f64,
    gain_error_norm: f64,
    stability_standard: StabilityCertificate,
    stability_transposed: StabilityCertificate,
    admissible: bool,
    bound_split: Option<ErrorBoundReport>,
    bound_joint: Option<ErrorBoundReport>,
    bound_error: Option<String>,
    memory: MemoryReport,
    warnings: Vec<String>,
}

struct AnalysisInput<'a> {
    plant: &'a Plant,
    gain: &'a IohfcGain,
    delta_k: Sensitivity,
    delta_d: Sensitivity,
    x0: DVector<f64>,
    b_r: f64,
    gamma: Option<f64>,
    params: &'a BfvParams,
}

fn run_analysis(inp: &AnalysisInput) -> Result<AnalysisReport> {
    let g = inp.gain;
    let lifted = lift_plant(inp.plant, g.length(), g.q())?;
    let q = DMatrix::identity(lifted.dim(), lifted.dim());
    let standard = delta_k_bound(&lifted, g.k(), &q, LyapunovForm::Standard)?;
    let transposed = delta_k_bound(&lifted, g.k(), &q, LyapunovForm::Transposed)?;
    let qg = QuantizedGain::new(g.k(), g.length(), g.q(), g.l(), inp.delta_k, inp.delta_d, inp.params.t)?;
    let split = error_bound(&lifted, &qg, &inp.x0, inp.b_r, inp.gamma, ThetaForm::Split);
    let joint = error_bound(&lifted, &qg, &inp.x0, inp.b_r, inp.gamma, ThetaForm::Joint);
    let bound_error = split.as_ref().err().map(|e| e.to_string());
    let dk = inp.delta_k.value();
    let mut warnings = inp.plant.warnings();
    if !standard.admits(dk) {
        warnings.push(format!("delta_k = {dk} is not below the stability threshold {:.4e}", standard.delta_k_max));
    }
    Ok(AnalysisReport {
        delta_k: dk,
        delta_d: inp.delta_d.value(),
        eta_k: qg.eta_k,
        eta_d: qg.eta_d,
        gain_error_norm: qg.error_norm(),
        admissible: standard.admits(dk),
        stability_standard: standard,
        stability_transposed: transposed,
        bound_split: split.ok(),
        bound_joint: joint.ok(),
        bound_error,
        memory: MemoryReport::new(g.length(), inp.params.n, inp.params.q_bits()),
        warnings,
    })
}

fn initial_state(x0: Option<&[f64]>, n: usize) -> Result<DVector<f64>> {
    match x0 {
        Some(v) => {
            check_len("--x0", v, n)?;
            Ok(DVector::from_column_slice(v))
        }
        None => Ok(DVector::zeros(n)),
    }
}

pub fn analyze(profile: Profile, a: &AnalyzeArgs) -> Result<()> {
    let plant: Plant = read_json(&a.plant)?;
    let gain: IohfcGain = read_json(&a.gain)?;
    let b_r = match (&a.schedule, a.b_r) {
        (Some(path), _) => read_json::<ReferenceSchedule>(path)?.sup_norm(),
        (None, Some(b)) => b,
        (None, None) => 0.0,
    };
    let params = BfvParams::for_profile(profile);
    let report = run_analysis(&AnalysisInput {
        plant: &plant,
        gain: &gain,
        delta_k: sensitivity("delta-k", a.delta_k)?,
        delta_d: sensitivity("delta-d", a.delta_d)?,
        x0: initial_state(a.x0.as_ref().map(|f| f.0.as_slice()), plant.n())?,
        b_r,
        gamma: a.gamma,
        params: &params,
    })?;
    emit(a.out.as_deref(), &to_json(&report)?)
}

fn write_trajectory(path: &Path, run: &ClosedLoopRun, refs: &[DVector<f64>], gain: &IohfcGain) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("writing {}", path.display()))?;
    let mut header = vec!["t".to_string()];
    header.extend(numbered("r", gain.q()));
    header.extend(numbered("y", gain.l()));
    header.extend(numbered("u", gain.m()));
    if run.plain.is_some() {
        header.extend(numbered("y_plain", gain.l()));
        header.extend(numbered("u_plain", gain.m()));
    }
    header.push("step_time_ms".into());
    w.write_record(&header)?;
    for (t, rec) in run.records.iter().enumerate() {
        let mut row = vec![t.to_string()];
        let push = |row: &mut Vec<String>, v: &DVector<f64>| row.extend(v.iter().map(|x| x.to_string()));
        push(&mut row, &refs[t]);
        push(&mut row, &run.encrypted.y[t]);
        push(&mut row, &run.encrypted.u[t]);
        if let Some(p) = &run.plain {
            push(&mut row, &p.y[t]);
            push(&mut row, &p.u[t]);
        }
        row.push(format!("{:.3}", rec.timings.total_ms()));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

struct LoopConfig<'a> {
    profile: Profile,
    plant: &'a Plant,
    gain: &'a IohfcGain,
    delta_k: Sensitivity,
    delta_d: Sensitivity,
    seed: [u8; 32],
    x0: DVector<f64>,
    refs: Vec<DVector<f64>>,
    noise: Option<NoiseSequence>,
    options: RunOptions,
}

fn run_loop(c: &LoopConfig) -> Result<(EncryptedLoop, ClosedLoopRun)> {
    let mut lp =
        EncryptedLoop::setup(BfvParams::for_profile(c.profile), Some(c.plant), c.gain, c.delta_k, c.delta_d, c.seed)?;
    for w in lp.warnings() {
        eprintln!("warning: {w}");
    }
    let run = run_closed_loop(&mut lp, c.plant, &c.x0, &c.refs, c.noise.as_ref(), c.options)?;
    Ok((lp, run))
}

fn mean_controller_ms(run: &ClosedLoopRun) -> f64 {
    let n = run.records.len().max(1) as f64;
    run.records.iter().map(|r| r.timings.controller_ms).sum::<f64>() / n
}

pub fn simulate(profile: Profile, a: &SimulateArgs) -> Result<()> {
    let plant: Plant = read_json(&a.plant)?;
    let gain: IohfcGain = read_json(&a.gain)?;
    let schedule: ReferenceSchedule = read_json(&a.schedule)?;
    if schedule.dim() != gain.q() {
        anyhow::bail!("schedule has {} reference entries, the gain expects {}", schedule.dim(), gain.q());
    }
    let noise = a.noise_var.map(|v| NoiseSequence::gaussian(&plant, a.steps, v, NOISE_SEED)).transpose()?;
    let refs = schedule.sample(a.steps);
    let cfg = LoopConfig {
        profile,
        plant: &plant,
        gain: &gain,
        delta_k: sensitivity("delta-k", a.delta_k)?,
        delta_d: sensitivity("delta-d", a.delta_d)?,
        seed: a.seed,
        x0: initial_state(a.x0.as_ref().map(|f| f.0.as_slice()), plant.n())?,
        refs,
        noise,
        options: RunOptions { plain: a.plain, oracle: a.check_oracle, audit: false },
    };
    let (_, run) = run_loop(&cfg)?;
    write_trajectory(&a.out, &run, &cfg.refs, &gain)?;
    if let Some(err) = run.max_output_error() {
        println!("max_output_error {err:.6}");
    }
    if a.check_oracle {
        println!("oracle_mismatches {}", run.oracle_mismatches());
    }
    println!("mean_controller_ms {:.3}", mean_controller_ms(&run));
    Ok(())
}

pub fn bench(profile: Profile, a: &BenchArgs) -> Result<()> {
    let plant: Plant = serde_json::from_str(TANK_PLANT)?;
    let ctrl: StateSpaceController = serde_json::from_str(TANK_CONTROLLER)?;
    let gain = to_history_form(&ctrl, TANK_LENGTH)?;
    let lp = EncryptedLoop::setup(
        BfvParams::for_profile(profile),
        Some(&plant),
        &gain,
        sensitivity("delta-k", TANK_DELTA_K)?,
        sensitivity("delta-d", TANK_DELTA_D)?,
        a.seed,
    )?;
    let seed = u64::from_le_bytes(a.seed[..8].try_into().expect("eight bytes"));
    let rows = bench_ops(&lp, a.trials, seed)?;
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in &rows {
        w.serialize(row)?;
    }
    let text = String::from_utf8(w.into_inner().context("flushing CSV")?)?;
    emit(a.out.as_deref(), &text)
}

pub fn demo(profile: Profile, a: &DemoArgs) -> Result<()> {
    let plant: Plant = serde_json::from_str(TANK_PLANT)?;
    let ctrl: StateSpaceController = serde_json::from_str(TANK_CONTROLLER)?;
    let schedule: ReferenceSchedule = serde_json::from_str(TANK_SCHEDULE)?;
    let printed: IohfcGain = serde_json::from_str(TANK_GAIN_PRINTED)?;

    let gain = to_history_form(&ctrl, TANK_LENGTH)?;
    let k_dev = (gain.k() - printed.k()).amax();
    let params = BfvParams::for_profile(profile);
    let (delta_k, delta_d) = (sensitivity("delta-k", TANK_DELTA_K)?, sensitivity("delta-d", TANK_DELTA_D)?);
    let x0 = DVector::from_element(plant.n(), 1.0);
    let report = run_analysis(&AnalysisInput {
        plant: &plant,
        gain: &gain,
        delta_k,
        delta_d,
        x0: x0.clone(),
        b_r: schedule.sup_norm(),
        gamma: Some(TANK_GAMMA),
        params: &params,
    })?;
    let cfg = LoopConfig {
        profile,
        plant: &plant,
        gain: &gain,
        delta_k,
        delta_d,
        seed: a.seed,
        x0,
        refs: schedule.sample(a.steps),
        noise: None,
        options: RunOptions { plain: true, oracle: true, audit: false },
    };
    let (_, run) = run_loop(&cfg)?;

    if let Some(dir) = &a.out_dir {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        write_file(&dir.join("gain.json"), to_json(&gain)?.as_bytes())?;
        write_file(&dir.join("analysis.json"), to_json(&report)?.as_bytes())?;
        write_trajectory(&dir.join("trajectory.csv"), &run, &cfg.refs, &gain)?;
    }

    let fmt_bound = |b: &Option<ErrorBoundReport>| b.as_ref().map_or("n/a".to_string(), |b| format!("{:.4}", b.bound));
    let rows: Vec<(&str, String)> = vec![
        ("gain_shape", format!("{}x{}", gain.k().nrows(), gain.k().ncols())),
        ("gain_max_deviation_from_printed", format!("{k_dev:.3e}")),
        ("delta_k_max_transposed", format!("{:.4e}", report.stability_transposed.delta_k_max)),
        ("delta_k_max_standard", format!("{:.4e}", report.stability_standard.delta_k_max)),
        ("delta_k_admissible", report.admissible.to_string()),
        ("tau", report.bound_split.as_ref().map_or("n/a".into(), |b| b.tau.to_string())),
        ("c", report.bound_split.as_ref().map_or("n/a".into(), |b| format!("{:.4}", b.c))),
        ("error_bound_split", fmt_bound(&report.bound_split)),
        ("error_bound_joint", fmt_bound(&report.bound_joint)),
        ("memory_kib", format!("{:.1}", report.memory.kib)),
        ("steps", run.records.len().to_string()),
        ("max_output_error", run.max_output_error().map_or("n/a".into(), |e| format!("{e:.6}"))),
        ("oracle_mismatches", run.oracle_mismatches().to_string()),
        ("mean_controller_ms", format!("{:.3}", mean_controller_ms(&run))),
    ];
    let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    for (k, v) in rows {
        println!("{k:<width$}  {v}");
    }
    Ok(())
}
