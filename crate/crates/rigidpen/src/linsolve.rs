//! Pentadiagonal SPD systems: matrix storage, preconditioned conjugate
//! gradient, and a relaxed modified-incomplete-Cholesky preconditioner.
//!
//! Both linear systems in the solver (variable-coefficient pressure Poisson
//! and implicit diffusion) are symmetric positive (semi)definite 5-point
//! operators on a rectangular lattice, so one backend serves both. Dot
//! products use the deterministic pairwise reductions, making solves
//! bit-reproducible.

use crate::error::{Error, Result};
use crate::numeric::pairwise_dot;

/// Symmetric 5-point operator on an `nx` by `ny` row-major lattice.
///
/// `aw[k]` couples `k` to `k-1`, `ae[k]` to `k+1`, `asouth[k]` to `k-nx`,
/// `anorth[k]` to `k+nx`. Couplings across the lattice edge (and into
/// pinned boundary unknowns) must be stored as zero; the apply loop then
/// reads the wrapped neighbor harmlessly.
#[derive(Debug, Clone)]
pub struct PentaMatrix {
    pub nx: usize,
    pub ny: usize,
    pub diag: Vec<f64>,
    pub aw: Vec<f64>,
    pub ae: Vec<f64>,
    pub asouth: Vec<f64>,
    pub anorth: Vec<f64>,
}

impl PentaMatrix {
    /// Zero operator to be filled in by the caller.
    pub fn zeros(nx: usize, ny: usize) -> Self {
        let n = nx * ny;
        Self {
            nx,
            ny,
            diag: vec![0.0; n],
            aw: vec![0.0; n],
            ae: vec![0.0; n],
            asouth: vec![0.0; n],
            anorth: vec![0.0; n],
        }
    }

    /// `y = A x`.
    pub fn apply(&self, x: &[f64], y: &mut [f64]) {
        let nx = self.nx;
        let n = x.len();
        debug_assert_eq!(n, self.diag.len());
        // In-row boundary coefficients are zero, so x[k-1] / x[k+1] reads
        // that wrap into the neighboring row contribute nothing; only the
        // first and last rows need guarded south/north reads.
        let top = n - nx;
        for k in 0..nx.min(n) {
            let mut acc = self.diag[k] * x[k]
                + if k > 0 { self.aw[k] * x[k - 1] } else { 0.0 }
                + if k + 1 < n { self.ae[k] * x[k + 1] } else { 0.0 };
            if k + nx < n {
                acc += self.anorth[k] * x[k + nx];
            }
            y[k] = acc;
        }
        for k in nx..top {
            y[k] = self.diag[k] * x[k]
                + self.aw[k] * x[k - 1]
                + self.ae[k] * x[k + 1]
                + self.asouth[k] * x[k - nx]
                + self.anorth[k] * x[k + nx];
        }
        for k in top.max(nx)..n {
            let mut acc = self.diag[k] * x[k]
                + self.aw[k] * x[k - 1]
                + self.asouth[k] * x[k - nx];
            if k + 1 < n {
                acc += self.ae[k] * x[k + 1];
            }
            y[k] = acc;
        }
    }

    /// Relaxed modified incomplete Cholesky `M = (D+L) D^-1 (D+L)^T` with
    /// the off-diagonals of `A` and a recomputed diagonal: dropped fill is
    /// added back to the diagonal with weight `omega` (row-sum preservation
    /// at `omega = 1`), which is the standard way to pull the conditioning
    /// of a 5-point Poisson operator down by an order of `h`.
    pub fn mic0(&self, omega: f64) -> MicPrecond {
        let nx = self.nx;
        let n = self.diag.len();
        let mut d = vec![0.0; n];
        for k in 0..n {
            let mut v = self.diag[k];
            if k > 0 {
                // west pivot: exact elimination plus relaxed fill (w * s).
                v -= self.aw[k] * (self.aw[k] + omega * self.anorth[k - 1]) / d[k - 1];
            }
            if k >= nx {
                v -= self.asouth[k] * (self.asouth[k] + omega * self.ae[k - nx]) / d[k - nx];
            }
            // Floor keeps the factorization positive on the semidefinite
            // pure-Neumann pressure operator.
            d[k] = v.max(1e-8 * self.diag[k].max(f64::MIN_POSITIVE));
        }
        MicPrecond {
            nx,
            d,
            aw: self.aw.clone(),
            asouth: self.asouth.clone(),
        }
    }
}

/// Factored preconditioner from [`PentaMatrix::mic0`].
#[derive(Debug, Clone)]
pub struct MicPrecond {
    nx: usize,
    d: Vec<f64>,
    aw: Vec<f64>,
    asouth: Vec<f64>,
}

impl MicPrecond {
    /// `z = M^-1 r` by forward substitution, diagonal scaling, and backward
    /// substitution.
    pub fn solve(&self, r: &[f64], z: &mut [f64]) {
        let nx = self.nx;
        let n = r.len();
        for k in 0..n {
            let mut acc = r[k];
            if k > 0 {
                acc -= self.aw[k] * z[k - 1];
            }
            if k >= nx {
                acc -= self.asouth[k] * z[k - nx];
            }
            z[k] = acc / self.d[k];
        }
        for k in (0..n).rev() {
            let mut acc = z[k] * self.d[k];
            if k + 1 < n {
                acc -= self.aw[k + 1] * z[k + 1];
            }
            if k + nx < n {
                acc -= self.asouth[k + nx] * z[k + nx];
            }
            z[k] = acc / self.d[k];
        }
    }
}

/// Iteration count and final relative residual of a converged solve.
#[derive(Debug, Clone, Copy)]
pub struct SolveStats {
    pub iters: usize,
    pub rel_residual: f64,
}

/// Solves `A x = b` for SPD `A`, starting from the value in `x`.
///
/// `precond` applies an SPD approximation of `A^-1`. Convergence is declared
/// when `||r||_2 <= tol * ||b||_2`; exceeding `max_iter` fails with
/// [`Error::LinearSolveFailed`].
pub fn pcg(
    matrix: &PentaMatrix,
    precond: &dyn Fn(&[f64], &mut [f64]),
    b: &[f64],
    x: &mut [f64],
    tol: f64,
    max_iter: usize,
) -> Result<SolveStats> {
    let n = b.len();
    assert_eq!(x.len(), n);

    let b_norm = pairwise_dot(b, b).sqrt();
    if b_norm == 0.0 {
        x.fill(0.0);
        return Ok(SolveStats {
            iters: 0,
            rel_residual: 0.0,
        });
    }
    let target = tol * b_norm;

    let mut r = vec![0.0; n];
    let mut z = vec![0.0; n];
    let mut p = vec![0.0; n];
    let mut ap = vec![0.0; n];

    matrix.apply(x, &mut ap);
    for k in 0..n {
        r[k] = b[k] - ap[k];
    }
    let mut r_norm = pairwise_dot(&r, &r).sqrt();
    if r_norm <= target {
        return Ok(SolveStats {
            iters: 0,
            rel_residual: r_norm / b_norm,
        });
    }

    precond(&r, &mut z);
    p.copy_from_slice(&z);
    let mut rz = pairwise_dot(&r, &z);

    for iter in 1..=max_iter {
        matrix.apply(&p, &mut ap);
        let pap = pairwise_dot(&p, &ap);
        if pap <= 0.0 {
            // Operator lost definiteness (numerically); report as failure.
            return Err(Error::LinearSolveFailed {
                iters: iter,
                residual: r_norm / b_norm,
                tol,
            });
        }
        let alpha = rz / pap;
        for k in 0..n {
            x[k] += alpha * p[k];
            r[k] -= alpha * ap[k];
        }
        r_norm = pairwise_dot(&r, &r).sqrt();
        if r_norm <= target {
            return Ok(SolveStats {
                iters: iter,
                rel_residual: r_norm / b_norm,
            });
        }
        precond(&r, &mut z);
        let rz_next = pairwise_dot(&r, &z);
        let beta = rz_next / rz;
        rz = rz_next;
        for k in 0..n {
            p[k] = z[k] + beta * p[k];
        }
    }

    Err(Error::LinearSolveFailed {
        iters: max_iter,
        residual: r_norm / b_norm,
        tol,
    })
}

/// Jacobi preconditioner over a diagonal.
pub fn jacobi_from(matrix: &PentaMatrix) -> impl Fn(&[f64], &mut [f64]) + '_ {
    move |r: &[f64], z: &mut [f64]| {
        for k in 0..r.len() {
            z[k] = r[k] / matrix.diag[k];
        }
    }
}
