//! Measured quantities: the deformation-tensor norm over the solid, the
//! convergence order between sweep entries, and cross-section velocity
//! profiles.

use crate::error::{Error, Result};
use crate::grid::{deformation_tensor_cellwise, interpolate_velocity, StaggeredVelocity};
use crate::numeric::pairwise_sum;
use crate::transport::LevelSet;

/// L2 norm of the discrete deformation tensor over the solid cells:
///
/// `sqrt( sum_{ij, phi_ij < 0} (D11^2 + 2 D12^2 + D22^2) dx^2 )`.
///
/// The sum always selects cells by the sign of the level set, even when the
/// solver runs a smooth indicator, so the measurement definition is
/// independent of the indicator mode. Rigid velocity fields give a norm at
/// round-off level.
pub fn deformation_norm_solid(vel: &StaggeredVelocity, level: &LevelSet) -> Result<f64> {
    let g = vel.grid;
    assert_eq!(g, level.grid, "velocity and level set must share a grid");
    let tensor = deformation_tensor_cellwise(vel);
    let da = g.dx * g.dx;
    let mut terms = Vec::new();
    for k in 0..g.n_cells() {
        if level.phi[k] < 0.0 {
            let [d11, d12, d22] = tensor[k];
            terms.push((d11 * d11 + 2.0 * d12 * d12 + d22 * d22) * da);
        }
    }
    if terms.is_empty() {
        return Err(Error::SolidVanished);
    }
    Ok(pairwise_sum(&terms).sqrt())
}

/// Order `alpha` fitted between two sweep entries:
/// `alpha = log(e1/e2) / log(eta1/eta2)`.
pub fn convergence_order(e1: f64, e2: f64, eta1: f64, eta2: f64) -> Result<f64> {
    for (name, v) in [("e1", e1), ("e2", e2), ("eta1", eta1), ("eta2", eta2)] {
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::Domain(format!("{name} must be positive, got {v}")));
        }
    }
    if eta1 == eta2 {
        return Err(Error::Domain("eta values must differ".into()));
    }
    Ok((e1 / e2).ln() / (eta1 / eta2).ln())
}

/// Orientation of a sampling line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProfileAxis {
    /// Line `y = coordinate`; samples the vertical velocity component.
    Horizontal,
    /// Line `x = coordinate`; samples the horizontal velocity component.
    Vertical,
}

/// Samples the velocity component perpendicular to a cross-section line, at
/// the face-resolution points of that component's own lattice, in ascending
/// position order. A horizontal line reports `v(x)`, a vertical line `u(y)`.
pub fn cross_section_profile(
    vel: &StaggeredVelocity,
    axis: ProfileAxis,
    coordinate: f64,
) -> Result<Vec<(f64, f64)>> {
    let g = vel.grid;
    match axis {
        ProfileAxis::Horizontal => {
            if coordinate < g.origin[1] || coordinate > g.origin[1] + g.extent[1] {
                return Err(Error::Domain(format!(
                    "cross-section y = {coordinate} outside the domain"
                )));
            }
            let mut out = Vec::with_capacity(g.nx);
            for i in 0..g.nx {
                let x = g.cell_x(i);
                let (value, _) = interpolate_velocity(vel, [x, coordinate]);
                out.push((x, value[1]));
            }
            Ok(out)
        }
        ProfileAxis::Vertical => {
            if coordinate < g.origin[0] || coordinate > g.origin[0] + g.extent[0] {
                return Err(Error::Domain(format!(
                    "cross-section x = {coordinate} outside the domain"
                )));
            }
            let mut out = Vec::with_capacity(g.ny);
            for j in 0..g.ny {
                let y = g.cell_y(j);
                let (value, _) = interpolate_velocity(vel, [coordinate, y]);
                out.push((y, value[0]));
            }
            Ok(out)
        }
    }
}

/// One entry of an eta sweep.
#[derive(Debug, Clone)]
pub struct SweepEntry {
    pub eta: f64,
    /// Deformation norm at the probe time; `None` when the run failed.
    pub d_norm: Option<f64>,
    /// Order against the previous successful entry; absent on the first.
    pub alpha: Option<f64>,
    /// Failure message when the run did not complete.
    pub error: Option<String>,
}

/// Sweep results with the metadata needed to reproduce them.
#[derive(Debug, Clone)]
pub struct SweepReport {
    /// Entries in strictly decreasing eta order.
    pub entries: Vec<SweepEntry>,
    pub dx: f64,
    pub dt: f64,
    pub t_probe: f64,
    /// Hash of the canonical scenario description.
    pub scenario_hash: u64,
}

impl SweepReport {
    /// Assembles a report from per-eta probe results (eta strictly
    /// decreasing), computing the order between consecutive successes.
    pub fn from_results(
        results: Vec<(f64, std::result::Result<f64, String>)>,
        dx: f64,
        dt: f64,
        t_probe: f64,
        scenario_hash: u64,
    ) -> Self {
        let mut entries: Vec<SweepEntry> = Vec::with_capacity(results.len());
        let mut prev: Option<(f64, f64)> = None;
        for (eta, outcome) in results {
            match outcome {
                Ok(d_norm) => {
                    let alpha = prev
                        .and_then(|(e_prev, eta_prev)| {
                            convergence_order(e_prev, d_norm, eta_prev, eta).ok()
                        });
                    prev = Some((d_norm, eta));
                    entries.push(SweepEntry {
                        eta,
                        d_norm: Some(d_norm),
                        alpha,
                        error: None,
                    });
                }
                Err(msg) => {
                    prev = None;
                    entries.push(SweepEntry {
                        eta,
                        d_norm: None,
                        alpha: None,
                        error: Some(msg),
                    });
                }
            }
        }
        Self {
            entries,
            dx,
            dt,
            t_probe,
            scenario_hash,
        }
    }
}
