//! Shared builders for the integration tests.
#![allow(dead_code)] // each test binary uses its own subset

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rigidpen::*;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Arbitrary bounded face velocities, no-slip walls.
pub fn random_velocity(grid: GridSpec, rng: &mut ChaCha8Rng) -> StaggeredVelocity {
    let mut vel = StaggeredVelocity::zeros(grid);
    for u in vel.u.iter_mut() {
        *u = rng.gen_range(-1.0..1.0);
    }
    for v in vel.v.iter_mut() {
        *v = rng.gen_range(-1.0..1.0);
    }
    vel.enforce_noslip();
    vel
}

/// Exactly divergence-free velocity from a random node stream function that
/// vanishes on the boundary (a few smooth modes), scaled so the largest
/// face speed equals `amplitude`.
pub fn random_solenoidal(grid: GridSpec, rng: &mut ChaCha8Rng, amplitude: f64) -> StaggeredVelocity {
    let g = grid;
    let modes: Vec<(f64, f64, f64)> = (0..4)
        .map(|_| {
            (
                rng.gen_range(1..4) as f64,
                rng.gen_range(1..4) as f64,
                rng.gen_range(-1.0..1.0),
            )
        })
        .collect();
    let psi = |x: f64, y: f64| -> f64 {
        let sx = (x - g.origin[0]) / g.extent[0];
        let sy = (y - g.origin[1]) / g.extent[1];
        modes
            .iter()
            .map(|&(kx, ky, a)| {
                a * (std::f64::consts::PI * kx * sx).sin() * (std::f64::consts::PI * ky * sy).sin()
            })
            .sum()
    };
    let mut vel = StaggeredVelocity::zeros(g);
    for j in 0..g.ny {
        for i in 0..=g.nx {
            let p = g.u_pos(i, j);
            vel.u[g.u_idx(i, j)] =
                (psi(p[0], p[1] + 0.5 * g.dx) - psi(p[0], p[1] - 0.5 * g.dx)) / g.dx;
        }
    }
    for j in 0..=g.ny {
        for i in 0..g.nx {
            let p = g.v_pos(i, j);
            vel.v[g.v_idx(i, j)] =
                -(psi(p[0] + 0.5 * g.dx, p[1]) - psi(p[0] - 0.5 * g.dx, p[1])) / g.dx;
        }
    }
    let peak = vel.max_abs();
    if peak > 0.0 {
        let scale = amplitude / peak;
        for u in vel.u.iter_mut() {
            *u *= scale;
        }
        for v in vel.v.iter_mut() {
            *v *= scale;
        }
    }
    vel
}

/// Smooth positive density between 0.5 and 2.
pub fn random_density(grid: GridSpec, rng: &mut ChaCha8Rng) -> CellField {
    let a = rng.gen_range(0.1..0.7);
    let kx = rng.gen_range(1..4) as f64;
    let ky = rng.gen_range(1..4) as f64;
    let phase = rng.gen_range(0.0..std::f64::consts::TAU);
    CellField::from_fn(grid, |x, y| {
        1.0 + a * (kx * x * 4.0 + phase).sin() * (ky * y * 4.0).cos() + 0.2
    })
}

/// Random convex solid: an ellipse rasterized with fractional boundary
/// weights well inside the domain.
pub fn random_indicator(grid: GridSpec, rng: &mut ChaCha8Rng) -> CellField {
    let g = grid;
    let lx = g.extent[0];
    let ly = g.extent[1];
    let cx = g.origin[0] + rng.gen_range(0.35..0.65) * lx;
    let cy = g.origin[1] + rng.gen_range(0.35..0.65) * ly;
    let ra = rng.gen_range(0.12..0.22) * lx;
    let rb = rng.gen_range(0.12..0.22) * ly;
    CellField::from_fn(g, |x, y| {
        let q = ((x - cx) / ra).powi(2) + ((y - cy) / rb).powi(2);
        // Fractional rim one cell wide.
        let d = (q.sqrt() - 1.0) * ra.min(rb);
        (0.5 - d / (2.0 * g.dx)).clamp(0.0, 1.0)
    })
}

/// Desk-scale benchmark text: dx = 1/64 on the [0,2]x[0,6] box.
pub fn desk_benchmark(extra: &str) -> ScenarioConfig {
    let text = format!(
        "[grid]\nnx = 128\nny = 384\ndx = 0.015625\n\
         [numerics]\ndt = 2e-4\n\
         [run]\nt_final = 0.05\nprobe_times = 0.05\n{extra}"
    );
    ScenarioConfig::from_str(&text).expect("desk benchmark config is valid")
}
