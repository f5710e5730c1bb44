use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::config::{Reduction, RunConfig, SweepParam};
use super::output::{fmt_float, write_atomic, write_json, CsvTable, CODE_VERSION};
use crate::dynamics::{
    initial_state, propagate, spectrum_scan, uniform_grid, EigenSystem, Method, PropagationStats, SpectrumScan,
};
use crate::error::{Error, Result};
use crate::hilbert::PureState;
use crate::model::{build_hamiltonian, HoppingMode, ModelParams};
use crate::observables::{
    ergotropy_with_spectrum, leakage, mean_excitations, mean_parity, partial_trace, site_populations,
    von_neumann_entropy, Keep, ERGOTROPY_CLAMP,
};

/// `E_c − E_e` may dip below zero by round-off only.
pub const DOMINANCE_TOL: f64 = ERGOTROPY_CLAMP;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub t: f64,
    /// `E = Tr[H_a ρ_a]`
    pub energy: f64,
    /// `E_c = E(t) − E(0)`
    pub charging: f64,
    /// Clamped ergotropy.
    pub ergotropy: f64,
    pub ergotropy_raw: f64,
    /// Entropy of the ion state in bits.
    pub entropy: f64,
    /// Excited-state population of each ion.
    pub sigma: Vec<f64>,
    pub n_exc: f64,
    pub parity: f64,
    pub leakage: f64,
    pub norm_error: f64,
    /// `(⟨H⟩_t − ⟨H⟩_0) / max(|⟨H⟩_0|, 1)`
    pub energy_drift: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceSummary {
    pub method: Method,
    pub dim: usize,
    pub ground_energy: f64,
    pub ground_degenerate: bool,
    pub initial_total_energy: f64,
    pub max_leakage: f64,
    pub leakage_warning: bool,
    pub max_norm_error: f64,
    pub max_energy_drift: f64,
    pub max_parity_drift: f64,
    pub min_dominance_margin: f64,
    pub krylov_substeps: usize,
    pub krylov_rejected: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvolutionTrace {
    pub n_ions: usize,
    pub records: Vec<TraceRecord>,
    pub summary: TraceSummary,
}

impl EvolutionTrace {
    pub fn times(&self) -> Vec<f64> {
        self.column(|r| r.t)
    }

    pub fn column(&self, f: impl Fn(&TraceRecord) -> f64) -> Vec<f64> {
        self.records.iter().map(f).collect()
    }

    pub fn last(&self) -> &TraceRecord {
        self.records.last().expect("traces have at least one sample")
    }

    pub fn csv_header(&self) -> Vec<String> {
        let mut h: Vec<String> = ["t", "E", "E_c", "E_e", "S"].map(String::from).to_vec();
        h.extend((1..=self.n_ions).map(|n| format!("sigma_{n}")));
        h.extend(["n_exc", "parity", "leakage", "norm_error", "energy_drift"].map(String::from));
        h
    }

    pub fn to_csv(&self) -> String {
        let mut table = CsvTable::new(&self.csv_header());
        for r in &self.records {
            let mut row = vec![r.t, r.energy, r.charging, r.ergotropy, r.entropy];
            row.extend(&r.sigma);
            row.extend([r.n_exc, r.parity, r.leakage, r.norm_error, r.energy_drift]);
            table.push_floats(&row);
        }
        table.as_str().to_string()
    }

    /// Largest value of `f` on samples with `t ∈ [t0, t1]` and the first
    /// time it is attained.
    pub fn max_over(&self, t0: f64, t1: f64, f: impl Fn(&TraceRecord) -> f64) -> Option<(f64, f64)> {
        let mut best: Option<(f64, f64)> = None;
        for r in self.records.iter().filter(|r| r.t >= t0 && r.t <= t1) {
            let v = f(r);
            if best.is_none_or(|(b, _)| v > b) {
                best = Some((v, r.t));
            }
        }
        best
    }
}

/// Simulate `model` on `config.spec` from `t = 0` to `t_end`.
pub fn simulate(config: &RunConfig, model: &ModelParams, t_end: f64) -> Result<EvolutionTrace> {
    simulate_with(config, model, t_end, |_, _| Ok(()))
}

/// Like [`simulate`], also handing every record and its full state to
/// `observe`.
pub fn simulate_with<F>(config: &RunConfig, model: &ModelParams, t_end: f64, mut observe: F) -> Result<EvolutionTrace>
where
    F: FnMut(&TraceRecord, &PureState) -> Result<()>,
{
    let spec = config.spec;
    let ham = build_hamiltonian(model, &spec)?;
    let spin_eig = EigenSystem::compute(&ham.h_a_spin)?;
    let ground = spin_eig.ground_state();
    let spectrum = spin_eig.values();
    let psi0 = initial_state(&spec, &config.boson.amplitudes(), &ground.state)?;
    let e_total0 = ham.h_total.expectation(psi0.amplitudes()).re;
    let parity0 = mean_parity(&psi0, &spec);
    let times = uniform_grid(t_end, config.dt)?;

    let mut records: Vec<TraceRecord> = Vec::with_capacity(times.len());
    let mut max_parity_drift = 0.0f64;
    let stats: PropagationStats = propagate(&ham.h_total, &psi0, &times, &config.propagation, |_, t, psi| {
        let rho_a = partial_trace(&psi, &spec, Keep::Ions)?;
        let erg = ergotropy_with_spectrum(&rho_a, &ham.h_a_spin, spectrum)?;
        let energy = erg.energy;
        let e0 = records.first().map_or(energy, |r| r.energy);
        let parity = mean_parity(&psi, &spec);
        max_parity_drift = max_parity_drift.max((parity - parity0).abs());
        let record = TraceRecord {
            t,
            energy,
            charging: energy - e0,
            ergotropy: erg.value,
            ergotropy_raw: erg.raw,
            entropy: von_neumann_entropy(&rho_a),
            sigma: site_populations(&rho_a, &spec)?,
            n_exc: mean_excitations(&psi, &spec),
            parity,
            leakage: leakage(&psi, &spec)?,
            norm_error: psi.norm_error(),
            energy_drift: (ham.h_total.expectation(psi.amplitudes()).re - e_total0) / e_total0.abs().max(1.0),
        };
        observe(&record, &psi)?;
        records.push(record);
        Ok(())
    })?;

    let max_leakage = records.iter().map(|r| r.leakage).fold(0.0, f64::max);
    let min_dominance_margin = records
        .iter()
        .map(|r| r.charging - r.ergotropy)
        .fold(f64::INFINITY, f64::min);
    if min_dominance_margin < -DOMINANCE_TOL {
        return Err(Error::NumericalConsistency(format!(
            "ergotropy exceeds charging energy by {:e}",
            -min_dominance_margin
        )));
    }
    let leakage_warning = max_leakage > config.leakage_warn;
    if leakage_warning {
        log::warn!(
            "top Fock level population reached {max_leakage:e} (threshold {:e}); consider a larger fock_dim",
            config.leakage_warn
        );
    }
    let summary = TraceSummary {
        method: stats.method.unwrap_or(config.propagation.method),
        dim: spec.total_dim(),
        ground_energy: ground.energy,
        ground_degenerate: ground.degenerate,
        initial_total_energy: e_total0,
        max_leakage,
        leakage_warning,
        max_norm_error: stats.max_norm_error,
        max_energy_drift: records.iter().map(|r| r.energy_drift.abs()).fold(0.0, f64::max),
        max_parity_drift,
        min_dominance_margin,
        krylov_substeps: stats.substeps,
        krylov_rejected: stats.rejected,
    };
    Ok(EvolutionTrace {
        n_ions: spec.n_ions(),
        records,
        summary,
    })
}

fn sidecar(kind: &str, config: &RunConfig, extra: serde_json::Value) -> serde_json::Value {
    let mut doc = json!({
        "tool": "dicke-battery",
        "version": CODE_VERSION,
        "kind": kind,
        "config_document": config.to_document(),
        "config": config,
    });
    if let (Some(obj), serde_json::Value::Object(more)) = (doc.as_object_mut(), extra) {
        obj.extend(more);
    }
    doc
}

fn trace_sidecar(config: &RunConfig, model: &ModelParams, trace: &EvolutionTrace) -> serde_json::Value {
    sidecar(
        "evolve",
        config,
        json!({
            "model": model,
            "columns": trace.csv_header(),
            "samples": trace.records.len(),
            "summary": trace.summary,
        }),
    )
}

/// Single run to `t_max`, writing `trace.csv` and `trace.json` into the
/// output directory.
pub fn run_evolution(config: &RunConfig) -> Result<EvolutionTrace> {
    if config.sweep.is_some() {
        return Err(Error::config(
            "sweep_param",
            "run_evolution takes a single-run configuration",
        ));
    }
    let trace = simulate(config, &config.model, config.t_max)?;
    write_trace(&config.out_dir, "trace", config, &config.model, &trace)?;
    Ok(trace)
}

fn write_trace(dir: &Path, stem: &str, config: &RunConfig, model: &ModelParams, trace: &EvolutionTrace) -> Result<()> {
    write_atomic(&dir.join(format!("{stem}.csv")), trace.to_csv().as_bytes())?;
    write_json(&dir.join(format!("{stem}.json")), &trace_sidecar(config, model, trace))
}

fn sweep_of(config: &RunConfig, reduction: Reduction) -> Result<(SweepParam, &[f64])> {
    match &config.sweep {
        Some(s) if s.reduction == reduction => Ok((s.param, &s.values)),
        Some(_) => Err(Error::config(
            "sweep_reduction",
            format!("expected {reduction:?} reduction"),
        )),
        None => Err(Error::config("sweep_param", "this run needs a sweep")),
    }
}

/// Evaluate `f` on every grid value with up to `workers` concurrent points,
/// returning results in grid order.
fn par_grid<T: Send>(values: &[f64], workers: usize, f: impl Fn(usize, f64) -> Result<T> + Sync) -> Result<Vec<T>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::InvalidParams(format!("worker pool: {e}")))?;
    pool.install(|| {
        values
            .par_iter()
            .enumerate()
            .map(|(k, &v)| f(k, v))
            .collect::<Vec<Result<T>>>()
    })
    .into_iter()
    .collect()
}

/// Final-sample summary of one point of a trace sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub value: f64,
    pub file: String,
    pub final_charging: f64,
    pub final_ergotropy: f64,
    pub final_entropy: f64,
    pub summary: TraceSummary,
}

/// Full traces for every grid point (`trace_<k>.csv` and `.json`) plus a
/// `sweep.csv` of final-sample values.
pub fn run_trace_sweep(config: &RunConfig) -> Result<Vec<SweepPoint>> {
    let (param, values) = sweep_of(config, Reduction::Trace)?;
    let points = par_grid(values, config.workers, |k, v| {
        let model = param.apply(&config.model, v);
        let trace = simulate(config, &model, config.t_max)?;
        let stem = format!("trace_{k:03}");
        write_trace(&config.out_dir, &stem, config, &model, &trace)?;
        let last = trace.last();
        Ok(SweepPoint {
            value: v,
            file: format!("{stem}.csv"),
            final_charging: last.charging,
            final_ergotropy: last.ergotropy,
            final_entropy: last.entropy,
            summary: trace.summary.clone(),
        })
    })?;
    let mut table = CsvTable::new(&[param.key(), "E_c_final", "E_e_final", "S_final"]);
    for p in &points {
        table.push_floats(&[p.value, p.final_charging, p.final_ergotropy, p.final_entropy]);
    }
    write_atomic(&config.out_dir.join("sweep.csv"), table.as_str().as_bytes())?;
    write_json(
        &config.out_dir.join("sweep.json"),
        &sidecar("sweep", config, json!({ "t_final": config.t_max, "points": points })),
    )?;
    Ok(points)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MaxScanRow {
    pub value: f64,
    pub max_charging: f64,
    pub t_max_charging: f64,
    pub max_ergotropy: f64,
    pub t_max_ergotropy: f64,
    pub max_leakage: f64,
    pub leakage_warning: bool,
    /// Smallest `E_c − E_e` over the simulated samples.
    pub min_dominance_margin: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MaxScan {
    pub param: SweepParam,
    pub window: (f64, f64),
    pub rows: Vec<MaxScanRow>,
}

impl MaxScan {
    pub fn to_csv(&self) -> String {
        let mut table = CsvTable::new(&[
            self.param.key(),
            "max_E_c",
            "t_max_E_c",
            "max_E_e",
            "t_max_E_e",
            "max_leakage",
            "leakage_warning",
        ]);
        for r in &self.rows {
            table.push_row(&[
                fmt_float(r.value),
                fmt_float(r.max_charging),
                fmt_float(r.t_max_charging),
                fmt_float(r.max_ergotropy),
                fmt_float(r.t_max_ergotropy),
                fmt_float(r.max_leakage),
                u8::from(r.leakage_warning).to_string(),
            ]);
        }
        table.as_str().to_string()
    }

    /// Grid value with the largest maximum ergotropy (first on ties).
    pub fn argmax_ergotropy(&self) -> f64 {
        let mut best = &self.rows[0];
        for r in &self.rows[1..] {
            if r.max_ergotropy > best.max_ergotropy {
                best = r;
            }
        }
        best.value
    }
}

/// Maxima of `E_c` and `E_e` over the window at every grid point, without
/// writing anything.
pub fn compute_max_scan(config: &RunConfig) -> Result<MaxScan> {
    let (param, values) = sweep_of(config, Reduction::MaxOverWindow)?;
    let (w0, w1) = config.window;
    let rows = par_grid(values, config.workers, |_, v| {
        let trace = simulate(config, &param.apply(&config.model, v), w1)?;
        let (max_charging, t_max_charging) = trace.max_over(w0, w1, |r| r.charging).expect("window holds samples");
        let (max_ergotropy, t_max_ergotropy) = trace.max_over(w0, w1, |r| r.ergotropy).expect("window holds samples");
        Ok(MaxScanRow {
            value: v,
            max_charging,
            t_max_charging,
            max_ergotropy,
            t_max_ergotropy,
            max_leakage: trace.summary.max_leakage,
            leakage_warning: trace.summary.leakage_warning,
            min_dominance_margin: trace.summary.min_dominance_margin,
        })
    })?;
    Ok(MaxScan {
        param,
        window: config.window,
        rows,
    })
}

/// [`compute_max_scan`] plus `maxscan.csv` and `maxscan.json`.
pub fn run_max_scan(config: &RunConfig) -> Result<MaxScan> {
    let scan = compute_max_scan(config)?;
    write_atomic(&config.out_dir.join("maxscan.csv"), scan.to_csv().as_bytes())?;
    write_json(
        &config.out_dir.join("maxscan.json"),
        &sidecar("maxscan", config, json!({ "scan": scan })),
    )?;
    Ok(scan)
}

/// J grid used by spectrum scans without an explicit sweep.
pub fn default_spectrum_grid() -> Vec<f64> {
    (0..=40).map(|k| k as f64 * 0.05).collect()
}

pub fn spectrum_csv(scan: &SpectrumScan) -> String {
    let n_levels = scan.eigenvalues.first().map_or(0, Vec::len);
    let mut header = vec!["j_hop".to_string()];
    header.extend((1..=n_levels).map(|k| format!("e_{k}")));
    header.extend(["M_z", "O_z", "degenerate"].map(String::from));
    let mut table = CsvTable::new(&header);
    for (i, &j) in scan.j_grid.iter().enumerate() {
        let mut row = vec![fmt_float(j)];
        row.extend(scan.eigenvalues[i].iter().map(|&e| fmt_float(e)));
        row.push(fmt_float(scan.m_z[i]));
        row.push(fmt_float(scan.o_z[i]));
        row.push(u8::from(scan.degenerate[i]).to_string());
        table.push_row(&row);
    }
    table.as_str().to_string()
}

fn mode_name(mode: HoppingMode) -> &'static str {
    match mode {
        HoppingMode::Full => "full",
        HoppingMode::ExcitationConserving => "excitation_conserving",
    }
}

/// Spectrum and ground-state magnetization of `H_a` over the `j_hop` grid,
/// for the configured hopping mode or for both. Writes
/// `spectrum_<mode>.csv` per mode and `spectrum.json`.
pub fn run_spectrum_scan(config: &RunConfig) -> Result<Vec<SpectrumScan>> {
    let grid = match &config.sweep {
        Some(s) if s.param == SweepParam::JHop => s.values.clone(),
        Some(_) => return Err(Error::config("sweep_param", "spectrum scans sweep j_hop")),
        None => default_spectrum_grid(),
    };
    let modes = if config.both_hopping_modes {
        vec![HoppingMode::Full, HoppingMode::ExcitationConserving]
    } else {
        vec![config.model.hopping_mode]
    };
    let scans = modes
        .iter()
        .map(|&mode| {
            let template = ModelParams {
                hopping_mode: mode,
                ..config.model.clone()
            };
            spectrum_scan(&template, &grid)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut files = Vec::new();
    for scan in &scans {
        let name = format!("spectrum_{}.csv", mode_name(scan.hopping_mode));
        write_atomic(&config.out_dir.join(&name), spectrum_csv(scan).as_bytes())?;
        files.push(name);
    }
    write_json(
        &config.out_dir.join("spectrum.json"),
        &sidecar("spectrum", config, json!({ "j_grid": grid, "files": files })),
    )?;
    Ok(scans)
}
