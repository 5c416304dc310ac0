// Scratch timing probe for the desk-scale benchmark; not part of the tests.
use rigidpen::{run_single, ScenarioConfig};
use std::time::Instant;

fn main() {
    let steps: u64 = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(20);
    let eta: f64 = std::env::args()
        .nth(2)
        .and_then(|s| s.parse().ok())
        .unwrap_or(1e-6);
    let dt = 2e-4;
    let text = format!(
        "[grid]\nnx = 128\nny = 384\ndx = 0.015625\n\
         [numerics]\ndt = {dt}\n\
         [run]\nt_final = {}\nprobe_times = {}\n",
        steps as f64 * dt,
        steps as f64 * dt
    );
    let config = ScenarioConfig::from_str(&text).unwrap();
    let start = Instant::now();
    let artifacts = run_single(&config, eta, None).unwrap();
    let elapsed = start.elapsed();
    let per_step: Vec<usize> = artifacts.rows.iter().map(|r| r.diag.poisson_iters).collect();
    println!("poisson iters per step: {per_step:?}");
    let iters: usize = per_step.iter().sum();
    let last = artifacts.rows.last().unwrap();
    println!(
        "steps={} eta={eta:e} elapsed={:.2?} ({:.1} ms/step) total_poisson_iters={} avg={:.1}",
        steps,
        elapsed,
        elapsed.as_secs_f64() * 1e3 / steps as f64,
        iters,
        iters as f64 / steps as f64
    );
    println!(
        "last: t={} E_kin={:.6e} max_div={:.3e} defect={:.3e} cfl={:.3e} body_center_y={:.6}",
        last.t,
        last.diag.kinetic_energy,
        last.diag.max_divergence,
        last.diag.penalization_defect,
        last.diag.cfl,
        artifacts.final_state.level.shape.unwrap().center[1]
    );
    if let Some((t, d)) = artifacts.probes.last() {
        println!("probe t={t} d_norm={d:.6e}");
    }
}
