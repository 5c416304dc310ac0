// Scratch profiling of one full step's sub-operations; not part of the tests.
use rigidpen::*;
use std::time::Instant;

fn main() {
    let g = GridSpec::new(128, 384, 1.0 / 64.0, [0.0, 0.0]).unwrap();
    let level = LevelSet::disk(g, [1.0, 4.0], 0.125);
    let params = SolverParams {
        dt: 2e-4,
        eta: 1e-6,
        ..SolverParams::default()
    };
    let mut state = SimState::at_rest(level, &params).unwrap();
    for _ in 0..10 {
        let (next, _) = full_step(&state, &params).unwrap();
        state = next;
    }

    let indicator = indicator_from_levelset(&state.level, params.sharp_indicator);
    let rho = rebuild_density(&indicator, &params);

    let t0 = Instant::now();
    let predicted = predict_velocity(&state.velocity, &rho, &params).unwrap();
    println!("predict (advect + 2 diffusion solves): {:?}", t0.elapsed());

    let t0 = Instant::now();
    let proj = project_velocity_from(&predicted, &rho, &params, Some(&state.pressure)).unwrap();
    println!(
        "project: {:?} ({} iters, res {:.2e})",
        t0.elapsed(),
        proj.stats.iters,
        proj.stats.rel_residual
    );

    let t0 = Instant::now();
    let rigid = rigid_velocity_from_flow(&proj.velocity, &rho, &indicator).unwrap();
    println!("rigid extraction: {:?}", t0.elapsed());

    let t0 = Instant::now();
    let pen = penalize_velocity(&proj.velocity, &indicator, &rigid, &params);
    println!("penalize: {:?}", t0.elapsed());

    let t0 = Instant::now();
    let _lvl = advect_indicator(&state.level, &rigid, params.dt, params.indicator_transport).unwrap();
    println!("advect indicator: {:?}", t0.elapsed());

    let t0 = Instant::now();
    let _rho2 = advect_density(&state.density, &state.velocity, params.dt, params.advection_scheme).unwrap();
    println!("advect density: {:?}", t0.elapsed());

    let t0 = Instant::now();
    let _ke = kinetic_energy(&pen, &state.density);
    let _pd = penalization_defect(&pen, &indicator, &rigid);
    let _dv = divergence(&pen);
    println!("diagnostics: {:?}", t0.elapsed());
}
