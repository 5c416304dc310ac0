//! One full time step of the splitting scheme.
//!
//! Each step advances the coupled system in the order: momentum prediction
//! (advection, implicit diffusion, gravity), pressure projection, rigid
//! velocity extraction from the predicted field, implicit velocity
//! penalization toward that rigid field, and finally transport of the solid
//! indicator by the rigid velocity and of the density by the flow velocity.
//! The penalized velocity is not re-projected by default; the small
//! divergence the blend re-introduces near the solid boundary is recorded in
//! the step diagnostics instead.

use crate::error::{Error, Result};
use crate::grid::{
    cell_centered_velocity, cell_gradient, divergence, interpolate_velocity, sample_u_clamped,
    sample_v_clamped, CellField, GridSpec, StaggeredVelocity,
};
use crate::linsolve::{pcg, PentaMatrix, SolveStats};
use crate::numeric::pairwise_sum_fn;
use crate::params::{AdvectionScheme, PenalizationForm, SolverParams};
use crate::rigid::{advance_pose, rigid_field, rigid_velocity_from_flow, RigidState};
use crate::transport::{
    advect_density, advect_indicator, indicator_from_levelset, max_courant, LevelSet,
};

/// Solver health indicators recorded every step.
#[derive(Debug, Clone, Copy)]
pub struct StepDiagnostics {
    /// Max cell divergence of the end-of-step velocity.
    pub max_divergence: f64,
    /// Pressure-solve iterations (plus the optional re-projection).
    pub poisson_iters: usize,
    /// Relative residual reached by the pressure solve.
    pub poisson_residual: f64,
    /// `1/2 sum(rho |u|^2) dx^2` over faces at the end of the step.
    pub kinetic_energy: f64,
    /// `||H (u - u_s)||_L2` over cells: how far the solid phase is from
    /// rigid motion. Scales like O(eta).
    pub penalization_defect: f64,
    /// Courant number of the advecting velocity for this step.
    pub cfl: f64,
}

/// Complete simulation state between steps.
#[derive(Debug, Clone)]
pub struct SimState {
    pub velocity: StaggeredVelocity,
    pub pressure: CellField,
    /// Density transported with the flow velocity. The momentum solve itself
    /// uses the density rebuilt from the indicator each step, so this field
    /// tracks the model's own transported density for diagnostics.
    pub density: CellField,
    pub level: LevelSet,
    /// Rigid state extracted on the most recent step, with the accumulated
    /// pose of the body.
    pub rigid: RigidState,
    pub time: f64,
    pub step: u64,
}

impl SimState {
    /// Fluid at rest around the solid described by `level`; density built
    /// from the indicator, pressure zero.
    pub fn at_rest(level: LevelSet, params: &SolverParams) -> Result<Self> {
        params.validate()?;
        let grid = level.grid;
        let indicator = indicator_from_levelset(&level, params.sharp_indicator);
        let density = rebuild_density(&indicator, params);
        let (mass, center, inertia) = crate::rigid::compute_moments(&density, &indicator)?;
        Ok(Self {
            velocity: StaggeredVelocity::zeros(grid),
            pressure: CellField::constant(grid, 0.0),
            density,
            level,
            rigid: RigidState::at_rest(mass, center, inertia),
            time: 0.0,
            step: 0,
        })
    }
}

/// `rho = rho_s H + rho_f (1 - H)`.
pub fn rebuild_density(indicator: &CellField, params: &SolverParams) -> CellField {
    CellField {
        grid: indicator.grid,
        values: indicator
            .values
            .iter()
            .map(|&h| params.rho_s * h + params.rho_f * (1.0 - h))
            .collect(),
    }
}

/// Arithmetic-mean density at faces. Boundary faces copy the adjacent cell
/// (their velocity is pinned to zero, so the value only pads the diagonal).
fn face_densities(rho: &CellField) -> (Vec<f64>, Vec<f64>) {
    let g = rho.grid;
    let mut rho_u = vec![0.0; g.n_u()];
    let mut rho_v = vec![0.0; g.n_v()];
    for j in 0..g.ny {
        for i in 0..=g.nx {
            rho_u[g.u_idx(i, j)] = if i == 0 {
                rho.values[g.cell_idx(0, j)]
            } else if i == g.nx {
                rho.values[g.cell_idx(g.nx - 1, j)]
            } else {
                0.5 * (rho.values[g.cell_idx(i - 1, j)] + rho.values[g.cell_idx(i, j)])
            };
        }
    }
    for j in 0..=g.ny {
        for i in 0..g.nx {
            rho_v[g.v_idx(i, j)] = if j == 0 {
                rho.values[g.cell_idx(i, 0)]
            } else if j == g.ny {
                rho.values[g.cell_idx(i, g.ny - 1)]
            } else {
                0.5 * (rho.values[g.cell_idx(i, j - 1)] + rho.values[g.cell_idx(i, j)])
            };
        }
    }
    (rho_u, rho_v)
}

/// The 5-point variable-coefficient operator used by the pressure solve:
/// `div(beta grad p)` with face coefficients `beta_u`, `beta_v` (zero on
/// boundary faces). The discrete divergence of the cell gradient scaled by
/// a constant coefficient reproduces this operator exactly.
pub fn div_beta_grad(p: &CellField, beta_u: &[f64], beta_v: &[f64]) -> CellField {
    let g = p.grid;
    let inv_dx2 = 1.0 / (g.dx * g.dx);
    let mut out = Vec::with_capacity(g.n_cells());
    for j in 0..g.ny {
        for i in 0..g.nx {
            let c = p.values[g.cell_idx(i, j)];
            let mut acc = 0.0;
            if i + 1 < g.nx {
                acc += beta_u[g.u_idx(i + 1, j)] * (p.values[g.cell_idx(i + 1, j)] - c);
            }
            if i > 0 {
                acc -= beta_u[g.u_idx(i, j)] * (c - p.values[g.cell_idx(i - 1, j)]);
            }
            if j + 1 < g.ny {
                acc += beta_v[g.v_idx(i, j + 1)] * (p.values[g.cell_idx(i, j + 1)] - c);
            }
            if j > 0 {
                acc -= beta_v[g.v_idx(i, j)] * (c - p.values[g.cell_idx(i, j - 1)]);
            }
            out.push(acc * inv_dx2);
        }
    }
    CellField { grid: g, values: out }
}

/// One explicit advection step of the velocity by itself, componentwise on
/// each face lattice. Wall-adjacent stencils read the no-slip reflection
/// ghost.
fn advect_velocity(vel: &StaggeredVelocity, dt: f64, scheme: AdvectionScheme) -> StaggeredVelocity {
    let g = vel.grid;
    let inv_dx = 1.0 / g.dx;
    let mut out = vel.clone();
    match scheme {
        AdvectionScheme::Upwind1 => {
            for j in 0..g.ny {
                for i in 1..g.nx {
                    let uc = vel.u[g.u_idx(i, j)];
                    let ay = 0.25
                        * (vel.v[g.v_idx(i - 1, j)]
                            + vel.v[g.v_idx(i, j)]
                            + vel.v[g.v_idx(i - 1, j + 1)]
                            + vel.v[g.v_idx(i, j + 1)]);
                    let du_dx = if uc >= 0.0 {
                        (uc - vel.u[g.u_idx(i - 1, j)]) * inv_dx
                    } else {
                        (vel.u[g.u_idx(i + 1, j)] - uc) * inv_dx
                    };
                    let du_dy = if ay >= 0.0 {
                        if j == 0 {
                            2.0 * uc * inv_dx
                        } else {
                            (uc - vel.u[g.u_idx(i, j - 1)]) * inv_dx
                        }
                    } else if j + 1 == g.ny {
                        2.0 * uc * inv_dx
                    } else {
                        (vel.u[g.u_idx(i, j + 1)] - uc) * inv_dx
                    };
                    out.u[g.u_idx(i, j)] = uc - dt * (uc * du_dx + ay * du_dy);
                }
            }
            for j in 1..g.ny {
                for i in 0..g.nx {
                    let vc = vel.v[g.v_idx(i, j)];
                    let ax = 0.25
                        * (vel.u[g.u_idx(i, j - 1)]
                            + vel.u[g.u_idx(i + 1, j - 1)]
                            + vel.u[g.u_idx(i, j)]
                            + vel.u[g.u_idx(i + 1, j)]);
                    let dv_dy = if vc >= 0.0 {
                        (vc - vel.v[g.v_idx(i, j - 1)]) * inv_dx
                    } else {
                        (vel.v[g.v_idx(i, j + 1)] - vc) * inv_dx
                    };
                    let dv_dx = if ax >= 0.0 {
                        if i == 0 {
                            2.0 * vc * inv_dx
                        } else {
                            (vc - vel.v[g.v_idx(i - 1, j)]) * inv_dx
                        }
                    } else if i + 1 == g.nx {
                        2.0 * vc * inv_dx
                    } else {
                        (vel.v[g.v_idx(i + 1, j)] - vc) * inv_dx
                    };
                    out.v[g.v_idx(i, j)] = vc - dt * (vc * dv_dx + ax * dv_dy);
                }
            }
        }
        AdvectionScheme::SemiLagrangian => {
            for j in 0..g.ny {
                for i in 1..g.nx {
                    let p = g.u_pos(i, j);
                    let (a, _) = interpolate_velocity(vel, p);
                    let (src, _) = g.clamp_point([p[0] - dt * a[0], p[1] - dt * a[1]]);
                    out.u[g.u_idx(i, j)] = sample_u_clamped(vel, src);
                }
            }
            for j in 1..g.ny {
                for i in 0..g.nx {
                    let p = g.v_pos(i, j);
                    let (a, _) = interpolate_velocity(vel, p);
                    let (src, _) = g.clamp_point([p[0] - dt * a[0], p[1] - dt * a[1]]);
                    out.v[g.v_idx(i, j)] = sample_v_clamped(vel, src);
                }
            }
        }
    }
    out.enforce_noslip();
    out
}

/// Implicit (backward Euler) diffusion of one velocity component:
/// solves `(rho_face I - mu dt Lap) x = rho_face * rhs` componentwise.
///
/// Faces on the normal walls are Dirichlet unknowns pinned by identity rows;
/// tangential walls enter through the no-slip reflection ghost, which bumps
/// the diagonal from 2 to 3.
fn diffuse_component(
    grid: GridSpec,
    is_u: bool,
    rhs: &[f64],
    rho_face: &[f64],
    params: &SolverParams,
) -> Result<Vec<f64>> {
    let g = grid;
    let c = params.mu * params.dt / (g.dx * g.dx);
    let (n0, n1) = if is_u { (g.nx + 1, g.ny) } else { (g.nx, g.ny + 1) };
    let n = n0 * n1;

    let boundary = |i: usize, j: usize| -> bool {
        if is_u {
            i == 0 || i == n0 - 1
        } else {
            j == 0 || j == n1 - 1
        }
    };

    let mut matrix = PentaMatrix::zeros(n0, n1);
    let mut b = vec![0.0; n];
    let mut x = rhs.to_vec();
    for j in 0..n1 {
        for i in 0..n0 {
            let k = j * n0 + i;
            if boundary(i, j) {
                matrix.diag[k] = 1.0;
                x[k] = 0.0;
                continue;
            }
            let tangential_wall = if is_u {
                j == 0 || j == n1 - 1
            } else {
                i == 0 || i == n0 - 1
            };
            matrix.diag[k] = rho_face[k] + c * (2.0 + if tangential_wall { 3.0 } else { 2.0 });
            // Couplings into pinned boundary faces are dropped (their value
            // is zero), which keeps the matrix symmetric.
            if i > 0 && !boundary(i - 1, j) {
                matrix.aw[k] = -c;
            }
            if i + 1 < n0 && !boundary(i + 1, j) {
                matrix.ae[k] = -c;
            }
            if j > 0 && !boundary(i, j - 1) {
                matrix.asouth[k] = -c;
            }
            if j + 1 < n1 && !boundary(i, j + 1) {
                matrix.anorth[k] = -c;
            }
            b[k] = rho_face[k] * rhs[k];
        }
    }

    let mic = matrix.mic0(MIC_RELAXATION);
    let precond = |r: &[f64], z: &mut [f64]| mic.solve(r, z);
    pcg(&matrix, &precond, &b, &mut x, params.poisson_tol, params.poisson_max_iter)?;
    Ok(x)
}

/// Relaxation weight of the modified-incomplete-Cholesky diagonal.
const MIC_RELAXATION: f64 = 0.95;

/// Momentum prediction: explicit advection of the velocity by itself,
/// implicit variable-density diffusion, then the gravity increment
/// `dt * g` on interior faces. Boundary faces stay pinned to zero. The
/// pressure is applied separately by [`project_velocity`].
pub fn predict_velocity(
    vel: &StaggeredVelocity,
    rho: &CellField,
    params: &SolverParams,
) -> Result<StaggeredVelocity> {
    let g = vel.grid;
    if params.advection_scheme == AdvectionScheme::Upwind1 {
        let courant = max_courant(vel, params.dt);
        if courant > 1.0 + 1e-12 {
            return Err(Error::CflExceeded { courant });
        }
    }
    let advected = advect_velocity(vel, params.dt, params.advection_scheme);
    let (rho_u, rho_v) = face_densities(rho);
    let mut out = StaggeredVelocity {
        grid: g,
        u: diffuse_component(g, true, &advected.u, &rho_u, params)?,
        v: diffuse_component(g, false, &advected.v, &rho_v, params)?,
    };
    for j in 0..g.ny {
        for i in 1..g.nx {
            out.u[g.u_idx(i, j)] += params.dt * params.gravity[0];
        }
    }
    for j in 1..g.ny {
        for i in 0..g.nx {
            out.v[g.v_idx(i, j)] += params.dt * params.gravity[1];
        }
    }
    out.enforce_noslip();
    Ok(out)
}

/// Result of a pressure projection.
#[derive(Debug, Clone)]
pub struct Projection {
    pub velocity: StaggeredVelocity,
    pub pressure: CellField,
    pub stats: SolveStats,
}

/// Projects `vel_star` onto (discretely) divergence-free fields.
///
/// Solves `div((dt/rho) grad p) = div(vel_star)` with homogeneous Neumann
/// walls by Jacobi-preconditioned CG, fixes the pure-Neumann gauge by
/// subtracting the mean pressure, and returns
/// `vel_star - (dt/rho) grad p`. `guess` warm-starts the iteration.
pub fn project_velocity_from(
    vel_star: &StaggeredVelocity,
    rho: &CellField,
    params: &SolverParams,
    guess: Option<&CellField>,
) -> Result<Projection> {
    let g = vel_star.grid;
    let min_rho = rho.min();
    if !(min_rho > 0.0) {
        return Err(Error::InvalidDensity { min_rho });
    }

    let (rho_u, rho_v) = face_densities(rho);
    let mut beta_u = vec![0.0; g.n_u()];
    let mut beta_v = vec![0.0; g.n_v()];
    for j in 0..g.ny {
        for i in 1..g.nx {
            beta_u[g.u_idx(i, j)] = params.dt / rho_u[g.u_idx(i, j)];
        }
    }
    for j in 1..g.ny {
        for i in 0..g.nx {
            beta_v[g.v_idx(i, j)] = params.dt / rho_v[g.v_idx(i, j)];
        }
    }

    // A p = -div(beta grad p), SPD on mean-zero pressures.
    let inv_dx2 = 1.0 / (g.dx * g.dx);
    let mut matrix = PentaMatrix::zeros(g.nx, g.ny);
    for j in 0..g.ny {
        for i in 0..g.nx {
            let k = g.cell_idx(i, j);
            matrix.diag[k] = (beta_u[g.u_idx(i, j)]
                + beta_u[g.u_idx(i + 1, j)]
                + beta_v[g.v_idx(i, j)]
                + beta_v[g.v_idx(i, j + 1)])
                * inv_dx2;
            if i > 0 {
                matrix.aw[k] = -beta_u[g.u_idx(i, j)] * inv_dx2;
            }
            if i + 1 < g.nx {
                matrix.ae[k] = -beta_u[g.u_idx(i + 1, j)] * inv_dx2;
            }
            if j > 0 {
                matrix.asouth[k] = -beta_v[g.v_idx(i, j)] * inv_dx2;
            }
            if j + 1 < g.ny {
                matrix.anorth[k] = -beta_v[g.v_idx(i, j + 1)] * inv_dx2;
            }
        }
    }
    let mic = matrix.mic0(MIC_RELAXATION);

    let div = divergence(vel_star);
    let n = g.n_cells();
    let mut b: Vec<f64> = div.values.iter().map(|&d| -d).collect();
    // Pure Neumann: project the right-hand side onto mean zero (the
    // compatible subspace); with no-slip walls the mean is round-off only.
    let b_mean = pairwise_sum_fn(n, &|k| b[k]) / n as f64;
    for v in &mut b {
        *v -= b_mean;
    }

    let mut p = match guess {
        Some(gss) => gss.values.clone(),
        None => vec![0.0; n],
    };
    let precond = |r: &[f64], z: &mut [f64]| mic.solve(r, z);
    let stats = pcg(&matrix, &precond, &b, &mut p, params.poisson_tol, params.poisson_max_iter)?;
    let p_mean = pairwise_sum_fn(n, &|k| p[k]) / n as f64;
    for v in &mut p {
        *v -= p_mean;
    }
    let pressure = CellField { grid: g, values: p };

    let grad = cell_gradient(&pressure);
    let mut velocity = vel_star.clone();
    for k in 0..g.n_u() {
        velocity.u[k] -= beta_u[k] * grad.u[k];
    }
    for k in 0..g.n_v() {
        velocity.v[k] -= beta_v[k] * grad.v[k];
    }
    velocity.enforce_noslip();

    Ok(Projection {
        velocity,
        pressure,
        stats,
    })
}

/// Cold-start projection returning `(velocity, pressure, iterations)`.
pub fn project_velocity(
    vel_star: &StaggeredVelocity,
    rho: &CellField,
    params: &SolverParams,
) -> Result<(StaggeredVelocity, CellField, usize)> {
    let proj = project_velocity_from(vel_star, rho, params, None)?;
    Ok((proj.velocity, proj.pressure, proj.stats.iters))
}

/// Penalizes the velocity toward the rigid field of `state` inside the
/// solid, with the indicator averaged from cells to faces.
///
/// The implicit form blends `u = (u~ + (dt/eta) H u_s) / (1 + (dt/eta) H)`,
/// a convex combination that never leaves the segment between the input and
/// the rigid value; faces with zero indicator pass through bit-exactly and
/// boundary faces stay pinned.
pub fn penalize_velocity(
    vel: &StaggeredVelocity,
    indicator: &CellField,
    state: &RigidState,
    params: &SolverParams,
) -> StaggeredVelocity {
    let g = vel.grid;
    let us = rigid_field(state, &g);
    let ratio = params.dt / params.eta;
    let mut out = vel.clone();
    let blend = |value: f64, rigid: f64, h: f64| -> f64 {
        if h == 0.0 {
            return value;
        }
        match params.penalization {
            PenalizationForm::Implicit => (value + ratio * h * rigid) / (1.0 + ratio * h),
            PenalizationForm::Explicit => value + ratio * h * (rigid - value),
        }
    };
    for j in 0..g.ny {
        for i in 1..g.nx {
            let k = g.u_idx(i, j);
            let h = 0.5 * (indicator.values[g.cell_idx(i - 1, j)]
                + indicator.values[g.cell_idx(i, j)]);
            out.u[k] = blend(vel.u[k], us.u[k], h);
        }
    }
    for j in 1..g.ny {
        for i in 0..g.nx {
            let k = g.v_idx(i, j);
            let h = 0.5 * (indicator.values[g.cell_idx(i, j - 1)]
                + indicator.values[g.cell_idx(i, j)]);
            out.v[k] = blend(vel.v[k], us.v[k], h);
        }
    }
    out
}

/// Face-weighted kinetic energy `1/2 sum(rho_face |u|^2) dx^2`.
pub fn kinetic_energy(vel: &StaggeredVelocity, rho: &CellField) -> f64 {
    let g = vel.grid;
    let (rho_u, rho_v) = face_densities(rho);
    let da = g.dx * g.dx;
    let eu = pairwise_sum_fn(g.n_u(), &|k| rho_u[k] * vel.u[k] * vel.u[k]);
    let ev = pairwise_sum_fn(g.n_v(), &|k| rho_v[k] * vel.v[k] * vel.v[k]);
    0.5 * (eu + ev) * da
}

/// `||H (u - u_s)||_L2` over cell centers.
pub fn penalization_defect(
    vel: &StaggeredVelocity,
    indicator: &CellField,
    state: &RigidState,
) -> f64 {
    let g = vel.grid;
    let cc = cell_centered_velocity(vel);
    let da = g.dx * g.dx;
    (pairwise_sum_fn(g.n_cells(), &|k| {
        let h = indicator.values[k];
        if h == 0.0 {
            return 0.0;
        }
        let us = state.velocity_at([g.cell_x(k % g.nx), g.cell_y(k / g.nx)]);
        let dx = cc[k][0] - us[0];
        let dy = cc[k][1] - us[1];
        h * h * (dx * dx + dy * dy)
    }) * da)
        .sqrt()
}

/// Advances the state by one time step, returning the new state and the
/// step diagnostics.
///
/// Sub-steps in order: rebuild `rho^n` from the indicator, predict, project,
/// extract the rigid velocity from the projected prediction, penalize,
/// advect the solid with the rigid velocity and the density with the flow
/// velocity. Errors from sub-steps propagate; a boundary contact leaves the
/// caller's state untouched.
pub fn full_step(state: &SimState, params: &SolverParams) -> Result<(SimState, StepDiagnostics)> {
    let indicator = indicator_from_levelset(&state.level, params.sharp_indicator);
    let rho_n = rebuild_density(&indicator, params);
    let cfl = max_courant(&state.velocity, params.dt);

    let predicted = predict_velocity(&state.velocity, &rho_n, params)?;
    let proj = project_velocity_from(&predicted, &rho_n, params, Some(&state.pressure))?;

    let mut rigid = rigid_velocity_from_flow(&proj.velocity, &rho_n, &indicator)?;
    rigid.rotation = state.rigid.rotation;
    rigid.translation = state.rigid.translation;

    let mut velocity = penalize_velocity(&proj.velocity, &indicator, &rigid, params);
    let mut pressure = proj.pressure;
    let mut poisson_iters = proj.stats.iters;
    let mut poisson_residual = proj.stats.rel_residual;
    if params.post_penalization_projection {
        let reproj = project_velocity_from(&velocity, &rho_n, params, Some(&pressure))?;
        velocity = reproj.velocity;
        pressure = reproj.pressure;
        poisson_iters += reproj.stats.iters;
        poisson_residual = reproj.stats.rel_residual;
    }

    let level = advect_indicator(&state.level, &rigid, params.dt, params.indicator_transport)?;
    let density = advect_density(&state.density, &state.velocity, params.dt, params.advection_scheme)?;
    let rigid = advance_pose(&rigid, params.dt);

    let max_divergence = divergence(&velocity)
        .values
        .iter()
        .fold(0.0f64, |m, &d| m.max(d.abs()));
    let diagnostics = StepDiagnostics {
        max_divergence,
        poisson_iters,
        poisson_residual,
        kinetic_energy: kinetic_energy(&velocity, &density),
        penalization_defect: penalization_defect(&velocity, &indicator, &rigid),
        cfl,
    };

    Ok((
        SimState {
            velocity,
            pressure,
            density,
            level,
            rigid,
            time: state.time + params.dt,
            step: state.step + 1,
        },
        diagnostics,
    ))
}
