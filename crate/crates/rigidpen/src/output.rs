//! CSV and VTK writers.
//!
//! All CSV files start with the schema marker `# rigidpen-csv v1`; floats
//! are written with Rust's shortest round-trip formatting, so identical runs
//! produce byte-identical files.

use std::fmt::Write as _;
use std::path::Path;

use crate::diagnostics::SweepReport;
use crate::grid::cell_centered_velocity;
use crate::scenario::DiagnosticsRow;
use crate::solver::SimState;
use crate::transport::LevelSet;

pub const CSV_HEADER: &str = "# rigidpen-csv v1";

/// `diagnostics.csv`: one row per step.
pub fn write_diagnostics_csv(path: &Path, rows: &[DiagnosticsRow]) -> std::io::Result<()> {
    let mut text = String::new();
    let _ = writeln!(text, "{CSV_HEADER}");
    let _ = writeln!(text, "step,t,max_div,E_kin,defect,cfl,poisson_iters");
    for row in rows {
        let d = &row.diag;
        let _ = writeln!(
            text,
            "{},{},{},{},{},{},{}",
            row.step,
            row.t,
            d.max_divergence,
            d.kinetic_energy,
            d.penalization_defect,
            d.cfl,
            d.poisson_iters
        );
    }
    std::fs::write(path, text)
}

/// `sweep.csv`: one row per eta, failed entries with empty columns and an
/// explanatory trailing comment.
pub fn write_sweep_csv(path: &Path, report: &SweepReport) -> std::io::Result<()> {
    let mut text = String::new();
    let _ = writeln!(text, "{CSV_HEADER}");
    let _ = writeln!(
        text,
        "# dx={} dt={} t_probe={} scenario={:016x}",
        report.dx, report.dt, report.t_probe, report.scenario_hash
    );
    let _ = writeln!(text, "eta,d_norm,alpha");
    for entry in &report.entries {
        let d = entry.d_norm.map(|v| v.to_string()).unwrap_or_default();
        let a = entry.alpha.map(|v| v.to_string()).unwrap_or_default();
        let _ = writeln!(text, "{:e},{},{}", entry.eta, d, a);
    }
    for entry in &report.entries {
        if let Some(msg) = &entry.error {
            let _ = writeln!(text, "# eta {:e} failed: {}", entry.eta, msg);
        }
    }
    std::fs::write(path, text)
}

/// `profile_<tag>.csv`: (position, value) samples.
pub fn write_profile_csv(path: &Path, samples: &[(f64, f64)]) -> std::io::Result<()> {
    let mut text = String::new();
    let _ = writeln!(text, "{CSV_HEADER}");
    let _ = writeln!(text, "position,value");
    for (pos, value) in samples {
        let _ = writeln!(text, "{pos},{value}");
    }
    std::fs::write(path, text)
}

/// Legacy-ASCII structured-points file with the cell fields (density,
/// pressure, indicator sign, level set) and the cell-averaged velocity.
pub fn write_vtk_fields(path: &Path, state: &SimState) -> std::io::Result<()> {
    let g = state.velocity.grid;
    let mut text = String::new();
    let _ = writeln!(text, "# vtk DataFile Version 3.0");
    let _ = writeln!(text, "rigidpen fields step {}", state.step);
    let _ = writeln!(text, "ASCII");
    let _ = writeln!(text, "DATASET STRUCTURED_POINTS");
    let _ = writeln!(text, "DIMENSIONS {} {} 1", g.nx + 1, g.ny + 1);
    let _ = writeln!(text, "ORIGIN {} {} 0", g.origin[0], g.origin[1]);
    let _ = writeln!(text, "SPACING {} {} 1", g.dx, g.dx);
    let _ = writeln!(text, "CELL_DATA {}", g.n_cells());

    let scalar = |text: &mut String, name: &str, values: &[f64]| {
        let _ = writeln!(text, "SCALARS {name} double 1");
        let _ = writeln!(text, "LOOKUP_TABLE default");
        for v in values {
            let _ = writeln!(text, "{v}");
        }
    };
    scalar(&mut text, "density", &state.density.values);
    scalar(&mut text, "pressure", &state.pressure.values);
    scalar(&mut text, "phi", &state.level.phi);

    let _ = writeln!(text, "VECTORS velocity double");
    for c in cell_centered_velocity(&state.velocity) {
        let _ = writeln!(text, "{} {} 0", c[0], c[1]);
    }
    std::fs::write(path, text)
}

/// Marching-squares polyline of the zero level set, as legacy-ASCII
/// POLYDATA line segments.
pub fn write_vtk_interface(path: &Path, level: &LevelSet) -> std::io::Result<()> {
    let segments = zero_contour_segments(level);
    let mut text = String::new();
    let _ = writeln!(text, "# vtk DataFile Version 3.0");
    let _ = writeln!(text, "rigidpen interface");
    let _ = writeln!(text, "ASCII");
    let _ = writeln!(text, "DATASET POLYDATA");
    let _ = writeln!(text, "POINTS {} double", segments.len() * 2);
    for (a, b) in &segments {
        let _ = writeln!(text, "{} {} 0", a[0], a[1]);
        let _ = writeln!(text, "{} {} 0", b[0], b[1]);
    }
    let _ = writeln!(text, "LINES {} {}", segments.len(), segments.len() * 3);
    for k in 0..segments.len() {
        let _ = writeln!(text, "2 {} {}", 2 * k, 2 * k + 1);
    }
    std::fs::write(path, text)
}

/// Zero-crossing segments of the level set on the cell-center lattice.
fn zero_contour_segments(level: &LevelSet) -> Vec<([f64; 2], [f64; 2])> {
    let g = level.grid;
    let phi = |i: usize, j: usize| level.phi[g.cell_idx(i, j)];
    let lerp = |p: [f64; 2], q: [f64; 2], a: f64, b: f64| -> [f64; 2] {
        // Root of the linear interpolant between values a (at p) and b (at q).
        let t = a / (a - b);
        [p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])]
    };
    let mut segments = Vec::new();
    for j in 0..g.ny - 1 {
        for i in 0..g.nx - 1 {
            let corners = [
                ([g.cell_x(i), g.cell_y(j)], phi(i, j)),
                ([g.cell_x(i + 1), g.cell_y(j)], phi(i + 1, j)),
                ([g.cell_x(i + 1), g.cell_y(j + 1)], phi(i + 1, j + 1)),
                ([g.cell_x(i), g.cell_y(j + 1)], phi(i, j + 1)),
            ];
            let mut crossings = Vec::new();
            for e in 0..4 {
                let (p, a) = corners[e];
                let (q, b) = corners[(e + 1) % 4];
                if (a < 0.0) != (b < 0.0) {
                    crossings.push(lerp(p, q, a, b));
                }
            }
            // A cell of a signed distance crosses 0 on 0 or 2 edges except
            // for saddle configurations, which we split arbitrarily.
            let mut it = crossings.chunks_exact(2);
            for pair in &mut it {
                segments.push((pair[0], pair[1]));
            }
        }
    }
    segments
}
