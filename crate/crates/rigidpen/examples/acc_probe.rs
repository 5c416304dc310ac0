// Scratch pre-verification of the acceptance numbers; not part of the tests.
use rigidpen::*;

fn rngd(seed: u64) -> impl FnMut() -> f64 {
    let mut state = seed.wrapping_mul(0x9e3779b97f4a7c15).wrapping_add(1);
    move || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        (state >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
    }
}

fn solenoidal(grid: GridSpec, seed: u64, amplitude: f64) -> StaggeredVelocity {
    let g = grid;
    let mut r = rngd(seed);
    let modes: Vec<(f64, f64, f64)> = (0..4)
        .map(|_| ((r() * 1.5 + 2.5).round(), (r() * 1.5 + 2.5).round(), r()))
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
            vel.u[g.u_idx(i, j)] = (psi(p[0], p[1] + 0.5 * g.dx) - psi(p[0], p[1] - 0.5 * g.dx)) / g.dx;
        }
    }
    for j in 0..=g.ny {
        for i in 0..g.nx {
            let p = g.v_pos(i, j);
            vel.v[g.v_idx(i, j)] = -(psi(p[0] + 0.5 * g.dx, p[1]) - psi(p[0] - 0.5 * g.dx, p[1])) / g.dx;
        }
    }
    let peak = vel.max_abs();
    for u in vel.u.iter_mut() {
        *u *= amplitude / peak;
    }
    for v in vel.v.iter_mut() {
        *v *= amplitude / peak;
    }
    vel
}

fn energy_check() {
    println!("== criterion 6 probe: energy inequality ==");
    let text = "[grid]\nnx = 96\nny = 96\ndx = 0.010416666666666666\n\
        [body]\ncenter_x = 0.5\ncenter_y = 0.5\nradius = 0.15\nrho = 1.0\n\
        [physics]\ngravity_y = 0\n\
        [numerics]\ndt = 2e-4\neta = 1e-8\npoisson_tol = 1e-11\n\
        [run]\nt_final = 0.01\nprobe_times = 0\n";
    let cfg = ScenarioConfig::from_str(text).unwrap();
    let level = LevelSet::disk(cfg.grid, cfg.body_center, cfg.body_radius);
    let mut state = SimState::at_rest(level, &cfg.params).unwrap();
    state.velocity = solenoidal(cfg.grid, 7, 1.0);
    let e0 = kinetic_energy(&state.velocity, &state.density);
    let mut prev = e0;
    let mut worst_gain = f64::NEG_INFINITY;
    for _ in 0..50 {
        let (next, diag) = full_step(&state, &cfg.params).unwrap();
        state = next;
        let gain = (diag.kinetic_energy - prev) / e0;
        worst_gain = worst_gain.max(gain);
        prev = diag.kinetic_energy;
    }
    println!("E0 = {e0:.6e}, final E = {prev:.6e}, worst per-step gain = {worst_gain:.3e} (must be <= 1e-9)");
}

fn sweep_check(steps: u64) {
    println!("== criterion 1/2 probe: eta sweep at t = {} ==", steps as f64 * 2e-4);
    let t = steps as f64 * 2e-4;
    let text = format!(
        "[grid]\nnx = 128\nny = 384\ndx = 0.015625\n\
         [numerics]\ndt = 2e-4\n\
         [sweep]\netas = 1e-4, 1e-6, 1e-8\n\
         [run]\nt_final = {t}\nprobe_times = {t}\n"
    );
    let cfg = ScenarioConfig::from_str(&text).unwrap();
    let out = run_scenario(&cfg).unwrap();
    for (eta, run) in &out.runs {
        if let Err(msg) = run {
            println!("eta {eta:e} FAILED: {msg}");
        }
    }
    let report = out.sweep.unwrap();
    for e in &report.entries {
        println!(
            "eta {:e}: d_norm {:?} alpha {:?}",
            e.eta, e.d_norm, e.alpha
        );
    }
}

fn penalized_limit_check(steps: u64) {
    println!("== criterion 7 probe: eta = 1e-12, sharp indicator ==");
    let t = steps as f64 * 2e-4;
    let text = format!(
        "[grid]\nnx = 128\nny = 384\ndx = 0.015625\n\
         [numerics]\ndt = 2e-4\neta = 1e-12\nsharp_indicator = true\n\
         [run]\nt_final = {t}\nprobe_times = {t}\n"
    );
    let cfg = ScenarioConfig::from_str(&text).unwrap();
    let artifacts = run_single(&cfg, 1e-12, None).unwrap();
    let state = &artifacts.final_state;
    let g = cfg.grid;
    let indicator = indicator_from_levelset(&state.level, true);
    let us = rigid_field(&state.rigid, &g);
    let mut worst = 0.0f64;
    for j in 0..g.ny {
        for i in 1..g.nx {
            let h = 0.5 * (indicator.at(i - 1, j) + indicator.at(i, j));
            if h == 1.0 {
                worst = worst.max((state.velocity.u_at(i, j) - us.u_at(i, j)).abs());
            }
        }
    }
    for j in 1..g.ny {
        for i in 0..g.nx {
            let h = 0.5 * (indicator.at(i, j - 1) + indicator.at(i, j));
            if h == 1.0 {
                worst = worst.max((state.velocity.v_at(i, j) - us.v_at(i, j)).abs());
            }
        }
    }
    let umax = state.velocity.max_abs();
    println!("max |u - u_s| on solid faces = {worst:.3e}, 1e-6 * max|u| = {:.3e}", 1e-6 * umax);
}

fn profile_check(steps: u64) {
    println!("== criterion 9 probe: profile gap eta 1e-8 vs 1e-10 ==");
    let t = steps as f64 * 2e-4;
    let mut profiles = Vec::new();
    for eta in [1e-8, 1e-10] {
        let text = format!(
            "[grid]\nnx = 128\nny = 384\ndx = 0.015625\n\
             [numerics]\ndt = 2e-4\neta = {eta:e}\n\
             [run]\nt_final = {t}\nprobe_times = {t}\n"
        );
        let cfg = ScenarioConfig::from_str(&text).unwrap();
        let artifacts = run_single(&cfg, eta, None).unwrap();
        let state = artifacts.final_state;
        let cy = state.level.shape.unwrap().center[1];
        let profile =
            cross_section_profile(&state.velocity, ProfileAxis::Horizontal, cy).unwrap();
        profiles.push(profile);
    }
    let peak = profiles[0]
        .iter()
        .map(|&(_, v)| v.abs())
        .fold(0.0f64, f64::max);
    let gap = profiles[0]
        .iter()
        .zip(&profiles[1])
        .map(|(&(_, a), &(_, b))| (a - b).abs())
        .fold(0.0f64, f64::max);
    println!("peak |v| = {peak:.4e}, Linf gap = {gap:.4e}, ratio = {:.4}", gap / peak);
}

fn trace_check(steps: u64, eta: f64) {
    println!("== cfl/energy trace at eta = {eta:e} ==");
    let t = steps as f64 * 2e-4;
    let text = format!(
        "[grid]\nnx = 128\nny = 384\ndx = 0.015625\n\
         [numerics]\ndt = 2e-4\neta = {eta:e}\n\
         [run]\nt_final = {t}\nprobe_times = {t}\n"
    );
    let cfg = ScenarioConfig::from_str(&text).unwrap();
    let level = LevelSet::disk(cfg.grid, cfg.body_center, cfg.body_radius);
    let mut params = cfg.params;
    params.eta = eta;
    let mut state = SimState::at_rest(level, &params).unwrap();
    for step in 0..steps {
        match full_step(&state, &params) {
            Ok((next, diag)) => {
                state = next;
                if step % 5 == 0 || diag.cfl > 0.5 {
                    let c = state.level.shape.unwrap().center;
                    println!(
                        "step {:3} cfl {:.4} maxvel {:.3} E {:.4e} maxdiv {:.2e} defect {:.2e} body ({:.4},{:.4}) vtrans ({:.3},{:.3}) omega {:.3}",
                        step + 1,
                        diag.cfl,
                        state.velocity.max_abs(),
                        diag.kinetic_energy,
                        diag.max_divergence,
                        diag.penalization_defect,
                        c[0], c[1],
                        state.rigid.v_trans[0], state.rigid.v_trans[1],
                        state.rigid.omega,
                    );
                }
            }
            Err(e) => {
                println!("step {} FAILED: {e}", step + 1);
                break;
            }
        }
    }
}

fn main() {
    let which = std::env::args().nth(1).unwrap_or_else(|| "energy".into());
    let steps: u64 = std::env::args()
        .nth(2)
        .and_then(|s| s.parse().ok())
        .unwrap_or(50);
    let eta: f64 = std::env::args()
        .nth(3)
        .and_then(|s| s.parse().ok())
        .unwrap_or(1e-6);
    match which.as_str() {
        "energy" => energy_check(),
        "sweep" => sweep_check(steps),
        "limit" => penalized_limit_check(steps),
        "profile" => profile_check(steps),
        "trace" => trace_check(steps, eta),
        other => eprintln!("unknown probe {other}"),
    }
}
