//! Run orchestration: single runs, eta sweeps, and file output.

use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::config::{ProfileRequest, ScenarioConfig};
use crate::diagnostics::{
    cross_section_profile, deformation_norm_solid, ProfileAxis, SweepReport,
};
use crate::error::{Error, Result};
use crate::output;
use crate::solver::{full_step, SimState, StepDiagnostics};
use crate::transport::LevelSet;

/// Per-step diagnostics with its time stamp.
#[derive(Debug, Clone, Copy)]
pub struct DiagnosticsRow {
    pub step: u64,
    pub t: f64,
    pub diag: StepDiagnostics,
}

/// Everything one run produces in memory.
#[derive(Debug, Clone)]
pub struct RunArtifacts {
    pub eta: f64,
    pub rows: Vec<DiagnosticsRow>,
    /// `(t, deformation norm over the solid)` at each probe time.
    pub probes: Vec<(f64, f64)>,
    pub profiles: Vec<(ProfileRequest, Vec<(f64, f64)>)>,
    pub final_state: SimState,
}

/// Output of [`run_scenario`]: per-eta artifacts (failures recorded as
/// messages, not panics) plus the sweep report when a sweep was requested.
#[derive(Debug)]
pub struct ScenarioOutput {
    pub runs: Vec<(f64, std::result::Result<RunArtifacts, String>)>,
    pub sweep: Option<SweepReport>,
}

/// Runs one simulation at the given `eta`, recording diagnostics every
/// step, the deformation norm at probe times, requested profiles, and
/// optional VTK snapshots.
pub fn run_single(config: &ScenarioConfig, eta: f64, vtk_dir: Option<&Path>) -> Result<RunArtifacts> {
    let n_steps = config.n_steps();
    if n_steps > config.step_cap {
        return Err(Error::StepCapExceeded {
            steps: n_steps,
            cap: config.step_cap,
        });
    }
    let mut params = config.params;
    params.eta = eta;

    let level = LevelSet::disk(config.grid, config.body_center, config.body_radius);
    let mut state = SimState::at_rest(level, &params)?;

    let step_of = |t: f64| -> u64 { (t / params.dt).round() as u64 };
    let probe_steps: Vec<u64> = config.probe_times.iter().map(|&t| step_of(t)).collect();
    let mut rows = Vec::with_capacity(n_steps as usize);
    let mut probes = Vec::new();
    let mut profiles: Vec<(ProfileRequest, Vec<(f64, f64)>)> = Vec::new();

    let record = |state: &SimState,
                      probes: &mut Vec<(f64, f64)>,
                      profiles: &mut Vec<(ProfileRequest, Vec<(f64, f64)>)>|
     -> Result<()> {
        if probe_steps.contains(&state.step) {
            let d = deformation_norm_solid(&state.velocity, &state.level)?;
            probes.push((state.time, d));
        }
        for request in &config.profiles {
            if step_of(request.time) == state.step {
                let samples =
                    cross_section_profile(&state.velocity, request.axis, request.coordinate)?;
                profiles.push((*request, samples));
            }
        }
        Ok(())
    };

    record(&state, &mut probes, &mut profiles)?;
    if let (Some(dir), true) = (vtk_dir, config.vtk_every > 0) {
        write_vtk_snapshot(dir, &state)?;
    }

    for _ in 0..n_steps {
        let (next, diag) = full_step(&state, &params)?;
        state = next;
        rows.push(DiagnosticsRow {
            step: state.step,
            t: state.time,
            diag,
        });
        record(&state, &mut probes, &mut profiles)?;
        if let Some(dir) = vtk_dir {
            if config.vtk_every > 0 && state.step % config.vtk_every == 0 {
                write_vtk_snapshot(dir, &state)?;
            }
        }
    }

    Ok(RunArtifacts {
        eta,
        rows,
        probes,
        profiles,
        final_state: state,
    })
}

/// Runs the scenario: the single configured eta, or every sweep eta as
/// independent parallel jobs. When `csv_dir` is set the artifacts are also
/// written to disk (see [`write_outputs`]).
pub fn run_scenario(config: &ScenarioConfig) -> Result<ScenarioOutput> {
    let etas: Vec<f64> = match &config.sweep_etas {
        Some(etas) => etas.clone(),
        None => vec![config.params.eta],
    };
    let is_sweep = config.sweep_etas.is_some();

    let vtk_base = config.csv_dir.clone();
    let runs: Vec<(f64, std::result::Result<RunArtifacts, String>)> = etas
        .par_iter()
        .map(|&eta| {
            let vtk_dir = vtk_base.as_ref().map(|base| run_dir(base, eta, is_sweep));
            if let Some(dir) = &vtk_dir {
                if config.vtk_every > 0 {
                    if let Err(e) = std::fs::create_dir_all(dir) {
                        return (eta, Err(e.to_string()));
                    }
                }
            }
            let artifacts = run_single(config, eta, vtk_dir.as_deref());
            (eta, artifacts.map_err(|e| e.to_string()))
        })
        .collect();

    let sweep = if is_sweep {
        let t_probe = config
            .probe_times
            .last()
            .copied()
            .unwrap_or(config.t_final);
        let results = runs
            .iter()
            .map(|(eta, outcome)| {
                let probe = match outcome {
                    Ok(artifacts) => artifacts
                        .probes
                        .last()
                        .map(|&(_, d)| d)
                        .ok_or_else(|| "no probe recorded".to_string()),
                    Err(msg) => Err(msg.clone()),
                };
                (*eta, probe)
            })
            .collect();
        Some(SweepReport::from_results(
            results,
            config.grid.dx,
            config.params.dt,
            t_probe,
            config.scenario_hash(),
        ))
    } else {
        None
    };

    let out = ScenarioOutput { runs, sweep };
    if let Some(dir) = &config.csv_dir {
        write_outputs(dir, &out)?;
    }
    Ok(out)
}

fn run_dir(base: &Path, eta: f64, is_sweep: bool) -> PathBuf {
    if is_sweep {
        base.join(format!("eta_{eta:e}"))
    } else {
        base.to_path_buf()
    }
}

fn write_vtk_snapshot(dir: &Path, state: &SimState) -> Result<()> {
    output::write_vtk_fields(&dir.join(format!("fields_{:06}.vtk", state.step)), state)?;
    output::write_vtk_interface(&dir.join(format!("interface_{:06}.vtk", state.step)), &state.level)?;
    Ok(())
}

/// Writes `diagnostics.csv` (per run, in per-eta subdirectories for sweeps),
/// `profile_<tag>.csv` files, and `sweep.csv` when a sweep ran.
pub fn write_outputs(dir: &Path, out: &ScenarioOutput) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let is_sweep = out.sweep.is_some();
    for (eta, outcome) in &out.runs {
        if let Ok(artifacts) = outcome {
            let target = run_dir(dir, *eta, is_sweep);
            std::fs::create_dir_all(&target)?;
            output::write_diagnostics_csv(&target.join("diagnostics.csv"), &artifacts.rows)?;
            for (request, samples) in &artifacts.profiles {
                output::write_profile_csv(&target.join(profile_file_name(request)), samples)?;
            }
        }
    }
    if let Some(report) = &out.sweep {
        output::write_sweep_csv(&dir.join("sweep.csv"), report)?;
    }
    Ok(())
}

/// Deterministic profile file name, e.g. `profile_h4_t0.05.csv` for a
/// horizontal cut at y = 4 sampled at t = 0.05.
pub fn profile_file_name(request: &ProfileRequest) -> String {
    let axis = match request.axis {
        ProfileAxis::Horizontal => "h",
        ProfileAxis::Vertical => "v",
    };
    format!("profile_{axis}{}_t{}.csv", request.coordinate, request.time)
}
