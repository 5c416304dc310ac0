//! Uniform MAC-grid geometry and the field containers the solver operates on.
//!
//! Scalars (density, pressure, indicator, level set) live at cell centers;
//! velocity components live on the faces of their own staggered lattice:
//! `u` on vertical faces, `v` on horizontal faces. This placement makes the
//! discrete divergence and the cell-to-face pressure gradient adjoint to
//! each other, which the projection step relies on.

use crate::error::{Error, Result};

/// Geometry of a uniform rectangular grid with square cells.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    /// Number of cells in x.
    pub nx: usize,
    /// Number of cells in y.
    pub ny: usize,
    /// Cell width (cells are square).
    pub dx: f64,
    /// Coordinates of the lower-left corner of the domain.
    pub origin: [f64; 2],
    /// Domain size `(Lx, Ly) = (nx*dx, ny*dx)`.
    pub extent: [f64; 2],
}

impl GridSpec {
    /// Builds a grid with `nx` by `ny` square cells of width `dx`.
    pub fn new(nx: usize, ny: usize, dx: f64, origin: [f64; 2]) -> Result<Self> {
        if !(dx > 0.0) || !dx.is_finite() {
            return Err(Error::Domain(format!("cell width must be positive, got {dx}")));
        }
        if nx < 4 || ny < 4 {
            return Err(Error::Domain(format!(
                "grid must be at least 4x4 cells, got {nx}x{ny}"
            )));
        }
        Ok(Self {
            nx,
            ny,
            dx,
            origin,
            extent: [nx as f64 * dx, ny as f64 * dx],
        })
    }

    /// Total number of cells.
    #[inline]
    pub fn n_cells(&self) -> usize {
        self.nx * self.ny
    }

    /// Number of u-faces (vertical faces), `(nx+1)*ny`.
    #[inline]
    pub fn n_u(&self) -> usize {
        (self.nx + 1) * self.ny
    }

    /// Number of v-faces (horizontal faces), `nx*(ny+1)`.
    #[inline]
    pub fn n_v(&self) -> usize {
        self.nx * (self.ny + 1)
    }

    /// Row-major cell index.
    #[inline]
    pub fn cell_idx(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < self.nx && j < self.ny);
        j * self.nx + i
    }

    /// Row-major u-face index, `i` in `0..=nx`, `j` in `0..ny`.
    #[inline]
    pub fn u_idx(&self, i: usize, j: usize) -> usize {
        debug_assert!(i <= self.nx && j < self.ny);
        j * (self.nx + 1) + i
    }

    /// Row-major v-face index, `i` in `0..nx`, `j` in `0..=ny`.
    #[inline]
    pub fn v_idx(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < self.nx && j <= self.ny);
        j * self.nx + i
    }

    /// x-coordinate of the center of cell column `i`.
    #[inline]
    pub fn cell_x(&self, i: usize) -> f64 {
        self.origin[0] + (i as f64 + 0.5) * self.dx
    }

    /// y-coordinate of the center of cell row `j`.
    #[inline]
    pub fn cell_y(&self, j: usize) -> f64 {
        self.origin[1] + (j as f64 + 0.5) * self.dx
    }

    /// Center of a u-face: on the vertical cell edge at `x = origin + i*dx`.
    #[inline]
    pub fn u_pos(&self, i: usize, j: usize) -> [f64; 2] {
        [self.origin[0] + i as f64 * self.dx, self.cell_y(j)]
    }

    /// Center of a v-face: on the horizontal cell edge at `y = origin + j*dx`.
    #[inline]
    pub fn v_pos(&self, i: usize, j: usize) -> [f64; 2] {
        [self.cell_x(i), self.origin[1] + j as f64 * self.dx]
    }

    /// Whether `point` lies in the closed domain.
    pub fn contains(&self, point: [f64; 2]) -> bool {
        point[0] >= self.origin[0]
            && point[0] <= self.origin[0] + self.extent[0]
            && point[1] >= self.origin[1]
            && point[1] <= self.origin[1] + self.extent[1]
    }

    /// Clamps `point` into the closed domain; the flag reports whether
    /// clamping moved it.
    pub fn clamp_point(&self, point: [f64; 2]) -> ([f64; 2], bool) {
        let cx = point[0].clamp(self.origin[0], self.origin[0] + self.extent[0]);
        let cy = point[1].clamp(self.origin[1], self.origin[1] + self.extent[1]);
        ([cx, cy], cx != point[0] || cy != point[1])
    }
}

/// Cell-centered scalar field in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct CellField {
    pub grid: GridSpec,
    pub values: Vec<f64>,
}

impl CellField {
    /// Constant field.
    pub fn constant(grid: GridSpec, value: f64) -> Self {
        Self {
            grid,
            values: vec![value; grid.n_cells()],
        }
    }

    /// Field sampled from `f(x, y)` at cell centers.
    pub fn from_fn(grid: GridSpec, f: impl Fn(f64, f64) -> f64) -> Self {
        let mut values = Vec::with_capacity(grid.n_cells());
        for j in 0..grid.ny {
            for i in 0..grid.nx {
                values.push(f(grid.cell_x(i), grid.cell_y(j)));
            }
        }
        Self { grid, values }
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[self.grid.cell_idx(i, j)]
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Face-centered velocity on the MAC grid.
///
/// `u` holds `(nx+1)*ny` samples on vertical faces, `v` holds `nx*(ny+1)`
/// samples on horizontal faces. Faces lying on the domain boundary carry 0
/// after every solver step (no-slip walls).
#[derive(Debug, Clone, PartialEq)]
pub struct StaggeredVelocity {
    pub grid: GridSpec,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
}

impl StaggeredVelocity {
    /// Zero field.
    pub fn zeros(grid: GridSpec) -> Self {
        Self {
            grid,
            u: vec![0.0; grid.n_u()],
            v: vec![0.0; grid.n_v()],
        }
    }

    /// Samples `f(x, y) -> [u, v]` componentwise, each component at its own
    /// face centers. Does not zero boundary faces; call
    /// [`enforce_noslip`](Self::enforce_noslip) when building wall-bounded data.
    pub fn from_fn(grid: GridSpec, f: impl Fn(f64, f64) -> [f64; 2]) -> Self {
        let mut field = Self::zeros(grid);
        for j in 0..grid.ny {
            for i in 0..=grid.nx {
                let p = grid.u_pos(i, j);
                field.u[grid.u_idx(i, j)] = f(p[0], p[1])[0];
            }
        }
        for j in 0..=grid.ny {
            for i in 0..grid.nx {
                let p = grid.v_pos(i, j);
                field.v[grid.v_idx(i, j)] = f(p[0], p[1])[1];
            }
        }
        field
    }

    #[inline]
    pub fn u_at(&self, i: usize, j: usize) -> f64 {
        self.u[self.grid.u_idx(i, j)]
    }

    #[inline]
    pub fn v_at(&self, i: usize, j: usize) -> f64 {
        self.v[self.grid.v_idx(i, j)]
    }

    /// Zeros every face lying on the domain boundary.
    pub fn enforce_noslip(&mut self) {
        let g = self.grid;
        for j in 0..g.ny {
            self.u[g.u_idx(0, j)] = 0.0;
            self.u[g.u_idx(g.nx, j)] = 0.0;
        }
        for i in 0..g.nx {
            self.v[g.v_idx(i, 0)] = 0.0;
            self.v[g.v_idx(i, g.ny)] = 0.0;
        }
    }

    /// Largest velocity magnitude over all faces.
    pub fn max_abs(&self) -> f64 {
        let mu = self.u.iter().fold(0.0f64, |m, &x| m.max(x.abs()));
        let mv = self.v.iter().fold(0.0f64, |m, &x| m.max(x.abs()));
        mu.max(mv)
    }
}

/// Bilinear interpolation on a regular lattice of `n0 x n1` samples whose
/// first sample sits at `(start0, start1)` with spacing `h`. The cell index
/// is clamped to the lattice but the fractional offset is not, so the result
/// extrapolates linearly outside the sample hull and is exact for fields
/// affine in space.
fn bilinear_unclamped(
    values: &[f64],
    stride: usize,
    n0: usize,
    n1: usize,
    start: [f64; 2],
    h: f64,
    p: [f64; 2],
) -> f64 {
    let gx = (p[0] - start[0]) / h;
    let gy = (p[1] - start[1]) / h;
    let i0 = (gx.floor() as isize).clamp(0, n0 as isize - 2) as usize;
    let j0 = (gy.floor() as isize).clamp(0, n1 as isize - 2) as usize;
    let fx = gx - i0 as f64;
    let fy = gy - j0 as f64;
    let q00 = values[j0 * stride + i0];
    let q10 = values[j0 * stride + i0 + 1];
    let q01 = values[(j0 + 1) * stride + i0];
    let q11 = values[(j0 + 1) * stride + i0 + 1];
    (1.0 - fy) * ((1.0 - fx) * q00 + fx * q10) + fy * ((1.0 - fx) * q01 + fx * q11)
}

/// Same lattice bookkeeping as [`bilinear_unclamped`] but with the fraction
/// clamped to `[0, 1]`: the result is a convex combination of the four
/// surrounding samples, never an extrapolation. Used by the monotone
/// semi-Lagrangian updates.
fn bilinear_clamped(
    values: &[f64],
    stride: usize,
    n0: usize,
    n1: usize,
    start: [f64; 2],
    h: f64,
    p: [f64; 2],
) -> f64 {
    let gx = (p[0] - start[0]) / h;
    let gy = (p[1] - start[1]) / h;
    let i0 = (gx.floor() as isize).clamp(0, n0 as isize - 2) as usize;
    let j0 = (gy.floor() as isize).clamp(0, n1 as isize - 2) as usize;
    let fx = (gx - i0 as f64).clamp(0.0, 1.0);
    let fy = (gy - j0 as f64).clamp(0.0, 1.0);
    let q00 = values[j0 * stride + i0];
    let q10 = values[j0 * stride + i0 + 1];
    let q01 = values[(j0 + 1) * stride + i0];
    let q11 = values[(j0 + 1) * stride + i0 + 1];
    (1.0 - fy) * ((1.0 - fx) * q00 + fx * q10) + fy * ((1.0 - fx) * q01 + fx * q11)
}

/// Bilinear velocity interpolation, each component read from its own
/// staggered lattice. Exact for fields affine in space. Points outside the
/// closed domain are clamped to the boundary; the flag reports whether that
/// happened so callers may treat it as an error.
pub fn interpolate_velocity(vel: &StaggeredVelocity, point: [f64; 2]) -> ([f64; 2], bool) {
    let g = vel.grid;
    let (p, clamped) = g.clamp_point(point);
    let u = bilinear_unclamped(
        &vel.u,
        g.nx + 1,
        g.nx + 1,
        g.ny,
        [g.origin[0], g.origin[1] + 0.5 * g.dx],
        g.dx,
        p,
    );
    let v = bilinear_unclamped(
        &vel.v,
        g.nx,
        g.nx,
        g.ny + 1,
        [g.origin[0] + 0.5 * g.dx, g.origin[1]],
        g.dx,
        p,
    );
    ([u, v], clamped)
}

/// Convex-combination sample of the u-component at `p` (point already inside
/// the domain). Crate-internal helper for semi-Lagrangian advection.
pub(crate) fn sample_u_clamped(vel: &StaggeredVelocity, p: [f64; 2]) -> f64 {
    let g = vel.grid;
    bilinear_clamped(
        &vel.u,
        g.nx + 1,
        g.nx + 1,
        g.ny,
        [g.origin[0], g.origin[1] + 0.5 * g.dx],
        g.dx,
        p,
    )
}

/// Convex-combination sample of the v-component at `p`.
pub(crate) fn sample_v_clamped(vel: &StaggeredVelocity, p: [f64; 2]) -> f64 {
    let g = vel.grid;
    bilinear_clamped(
        &vel.v,
        g.nx,
        g.nx,
        g.ny + 1,
        [g.origin[0] + 0.5 * g.dx, g.origin[1]],
        g.dx,
        p,
    )
}

/// Convex-combination sample of a cell-centered scalar at `p`.
pub(crate) fn sample_cell_clamped(field: &CellField, p: [f64; 2]) -> f64 {
    let g = field.grid;
    bilinear_clamped(
        &field.values,
        g.nx,
        g.nx,
        g.ny,
        [g.origin[0] + 0.5 * g.dx, g.origin[1] + 0.5 * g.dx],
        g.dx,
        p,
    )
}

/// Averages the face samples of each cell onto its center, giving one
/// velocity vector per cell. Moment integrals take their quadrature points
/// here so that density, indicator and velocity share cell centers.
pub fn cell_centered_velocity(vel: &StaggeredVelocity) -> Vec<[f64; 2]> {
    let g = vel.grid;
    let mut out = Vec::with_capacity(g.n_cells());
    for j in 0..g.ny {
        for i in 0..g.nx {
            let uc = 0.5 * (vel.u[g.u_idx(i, j)] + vel.u[g.u_idx(i + 1, j)]);
            let vc = 0.5 * (vel.v[g.v_idx(i, j)] + vel.v[g.v_idx(i, j + 1)]);
            out.push([uc, vc]);
        }
    }
    out
}

/// Discrete divergence, one value per cell:
/// `(u_E - u_W + v_N - v_S) / dx`.
pub fn divergence(vel: &StaggeredVelocity) -> CellField {
    let g = vel.grid;
    let inv_dx = 1.0 / g.dx;
    let mut values = Vec::with_capacity(g.n_cells());
    for j in 0..g.ny {
        for i in 0..g.nx {
            let d = (vel.u[g.u_idx(i + 1, j)] - vel.u[g.u_idx(i, j)]
                + vel.v[g.v_idx(i, j + 1)]
                - vel.v[g.v_idx(i, j)])
                * inv_dx;
            values.push(d);
        }
    }
    CellField { grid: g, values }
}

/// Cell-to-face gradient of a cell scalar. Interior faces take the centered
/// difference of the two adjacent cells; boundary faces are 0 (homogeneous
/// Neumann), matching the pressure solve and the no-slip velocity update.
pub fn cell_gradient(field: &CellField) -> StaggeredVelocity {
    let g = field.grid;
    let inv_dx = 1.0 / g.dx;
    let mut grad = StaggeredVelocity::zeros(g);
    for j in 0..g.ny {
        for i in 1..g.nx {
            grad.u[g.u_idx(i, j)] =
                (field.values[g.cell_idx(i, j)] - field.values[g.cell_idx(i - 1, j)]) * inv_dx;
        }
    }
    for j in 1..g.ny {
        for i in 0..g.nx {
            grad.v[g.v_idx(i, j)] =
                (field.values[g.cell_idx(i, j)] - field.values[g.cell_idx(i, j - 1)]) * inv_dx;
        }
    }
    grad
}

/// Symmetric 2x2 deformation tensor per cell, stored `[D11, D12, D22]`.
///
/// `D11` and `D22` are face differences at the cell; `D12` is built at the
/// four corner nodes from `du/dy + dv/dx` and averaged to the center. Node
/// stencils adjacent to the boundary fall back to one-sided differences,
/// which stay exact on affine fields, so rigid fields (translation plus
/// rotation sampled on faces) give a tensor that vanishes to round-off.
pub fn deformation_tensor_cellwise(vel: &StaggeredVelocity) -> Vec<[f64; 3]> {
    let g = vel.grid;
    let (nx, ny) = (g.nx, g.ny);
    let inv_dx = 1.0 / g.dx;

    // du/dy + dv/dx at nodes (i in 0..=nx, j in 0..=ny), row-major.
    let mut node = vec![0.0; (nx + 1) * (ny + 1)];
    for j in 0..=ny {
        for i in 0..=nx {
            let du_dy = if j == 0 {
                (vel.u[g.u_idx(i, 1)] - vel.u[g.u_idx(i, 0)]) * inv_dx
            } else if j == ny {
                (vel.u[g.u_idx(i, ny - 1)] - vel.u[g.u_idx(i, ny - 2)]) * inv_dx
            } else {
                (vel.u[g.u_idx(i, j)] - vel.u[g.u_idx(i, j - 1)]) * inv_dx
            };
            let dv_dx = if i == 0 {
                (vel.v[g.v_idx(1, j)] - vel.v[g.v_idx(0, j)]) * inv_dx
            } else if i == nx {
                (vel.v[g.v_idx(nx - 1, j)] - vel.v[g.v_idx(nx - 2, j)]) * inv_dx
            } else {
                (vel.v[g.v_idx(i, j)] - vel.v[g.v_idx(i - 1, j)]) * inv_dx
            };
            node[j * (nx + 1) + i] = du_dy + dv_dx;
        }
    }

    let mut out = Vec::with_capacity(g.n_cells());
    for j in 0..ny {
        for i in 0..nx {
            let d11 = (vel.u[g.u_idx(i + 1, j)] - vel.u[g.u_idx(i, j)]) * inv_dx;
            let d22 = (vel.v[g.v_idx(i, j + 1)] - vel.v[g.v_idx(i, j)]) * inv_dx;
            let corners = node[j * (nx + 1) + i]
                + node[j * (nx + 1) + i + 1]
                + node[(j + 1) * (nx + 1) + i]
                + node[(j + 1) * (nx + 1) + i + 1];
            let d12 = 0.5 * 0.25 * corners;
            out.push([d11, d12, d22]);
        }
    }
    out
}
