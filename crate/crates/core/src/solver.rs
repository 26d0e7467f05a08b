//! Newton solver for the curvature equation `Δu = −κ(z) e^{2u}` on
//! log-polar annular grids, plus extraction of the bounded remainders
//! hiding behind the singular normal forms.
//!
//! In `(s, θ) = (log r, arg)` the equation becomes
//! `u_ss + u_θθ = −κ e^{2u} e^{2s}`: the metric blow-up turns into data
//! that varies polynomially in `s`, which a uniform lattice resolves. The
//! discrete system is the standard five-point cross; a solve is a damped
//! Newton iteration whose linearizations `(Δ_h + 2κe^{2u+2s}) δ = −F` stay
//! symmetric negative-definite for κ ≤ 0, so each step is one Jacobi-CG
//! solve. Optionally (and by default) one compact defect-correction pass
//! lifts the converged solution to fourth-order accuracy: the correction
//! uses only the same five-point neighborhoods plus boundary rows, is
//! frozen, and the system is re-solved warm-started.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use thiserror::Error;

pub use crate::grid::{AnnularGrid, GridField};
use crate::metrics::{ComplexPoint, MetricsError};

/// Errors from grid construction and the Newton solve.
#[derive(Debug, Error)]
pub enum SolverError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("Newton iteration diverged after {iters} steps; residual trace {trace:?}")]
    NewtonDivergence { iters: usize, trace: Vec<f64> },
    #[error("linearization lost coercivity: 2κe^{{2u}} reached {0:e} > 0 at a node")]
    LostCoercivity(f64),
    #[error("inner linear solve stalled with relative residual {0:e}")]
    LinearSolve(f64),
}

/// Prescribed curvature `κ(z) ≤ 0` with its value at the puncture and an
/// optional Hölder tag.
///
/// The comparison theory needs strict negativity at the puncture; the
/// solver itself only needs `κ ≤ 0` (the harmonic case `κ ≡ 0` is the
/// linear degenerate member and is accepted).
#[derive(Clone)]
pub struct CurvatureField {
    eval: Arc<dyn Fn(Complex64) -> f64 + Send + Sync>,
    kappa0: f64,
    hoelder: Option<(u32, f64)>,
}

impl fmt::Debug for CurvatureField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CurvatureField")
            .field("kappa0", &self.kappa0)
            .field("hoelder", &self.hoelder)
            .finish_non_exhaustive()
    }
}

impl CurvatureField {
    pub fn new<F>(kappa0: f64, eval: F) -> Result<Self, SolverError>
    where
        F: Fn(Complex64) -> f64 + Send + Sync + 'static,
    {
        if !kappa0.is_finite() || kappa0 > 0.0 {
            return Err(SolverError::InvalidParameter(format!(
                "curvature at the puncture must be finite and <= 0, got {kappa0}"
            )));
        }
        Ok(Self {
            eval: Arc::new(eval),
            kappa0,
            hoelder: None,
        })
    }

    /// Constant curvature field.
    pub fn constant(kappa: f64) -> Result<Self, SolverError> {
        Self::new(kappa, move |_| kappa)
    }

    pub fn with_hoelder(mut self, n: u32, nu: f64) -> Self {
        self.hoelder = Some((n, nu));
        self
    }

    pub fn kappa0(&self) -> f64 {
        self.kappa0
    }

    pub fn hoelder(&self) -> Option<(u32, f64)> {
        self.hoelder
    }

    pub fn eval(&self, z: ComplexPoint) -> f64 {
        (self.eval)(z.as_complex())
    }

    pub(crate) fn eval_c(&self, z: Complex64) -> f64 {
        (self.eval)(z)
    }
}

/// Dirichlet data on the two boundary circles, one value per angular node.
#[derive(Debug, Clone)]
pub struct Dirichlet {
    inner: Vec<f64>,
    outer: Vec<f64>,
}

impl Dirichlet {
    pub fn new(inner: Vec<f64>, outer: Vec<f64>) -> Result<Self, SolverError> {
        if inner.len() != outer.len() || inner.is_empty() {
            return Err(SolverError::InvalidParameter(format!(
                "boundary rows must have equal nonzero length, got {} and {}",
                inner.len(),
                outer.len()
            )));
        }
        if inner.iter().chain(&outer).any(|v| !v.is_finite()) {
            return Err(SolverError::InvalidParameter(
                "boundary data must be finite".into(),
            ));
        }
        Ok(Self { inner, outer })
    }

    /// Trace a pointwise function on both boundary circles of `grid`.
    pub fn from_fn<F>(grid: &AnnularGrid, f: F) -> Result<Self, SolverError>
    where
        F: Fn(Complex64) -> f64,
    {
        let nt = grid.n_theta();
        let inner = (0..nt).map(|j| f(grid.node(0, j))).collect();
        let outer = (0..nt).map(|j| f(grid.node(grid.n_s() - 1, j))).collect();
        Self::new(inner, outer)
    }

    pub fn inner(&self) -> &[f64] {
        &self.inner
    }

    pub fn outer(&self) -> &[f64] {
        &self.outer
    }
}

/// How the Newton iteration is seeded.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialGuess {
    /// Harmonic extension of the boundary data (one linear solve); the
    /// robust default — it sits in the monotone basin for every κ ≤ 0.
    Harmonic,
    /// Constant fill between the boundary rows.
    Constant(f64),
}

/// Armijo backtracking controls.
#[derive(Debug, Clone, Copy)]
pub struct Damping {
    pub initial_step: f64,
    pub factor: f64,
    pub max_backtracks: u32,
}

impl Default for Damping {
    fn default() -> Self {
        Self {
            initial_step: 1.0,
            factor: 0.5,
            max_backtracks: 20,
        }
    }
}

/// Solver configuration.
#[derive(Debug, Clone)]
pub struct SolveConfig {
    /// Max-norm residual target for `Δ_h u + κe^{2u}`.
    pub tol: f64,
    pub max_iter: u32,
    pub damping: Damping,
    /// One compact fourth-order defect-correction pass after the
    /// second-order solve converges.
    pub defect_correction: bool,
    pub initial_guess: InitialGuess,
}

impl Default for SolveConfig {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: 30,
            damping: Damping::default(),
            defect_correction: true,
            initial_guess: InitialGuess::Harmonic,
        }
    }
}

/// Converged nodal solution with its discrete residual.
#[derive(Debug, Clone)]
pub struct Solution {
    grid: AnnularGrid,
    u: Vec<f64>,
    residual_norm: f64,
    newton_iters: u32,
}

impl Solution {
    pub fn grid(&self) -> &AnnularGrid {
        &self.grid
    }

    pub fn u(&self) -> &[f64] {
        &self.u
    }

    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.u[self.grid.index(i, j)]
    }

    /// Max-norm of the discrete equation over interior nodes at return.
    pub fn residual_norm(&self) -> f64 {
        self.residual_norm
    }

    /// Linear solves performed (the harmonic seed counts as the first).
    pub fn newton_iters(&self) -> u32 {
        self.newton_iters
    }

    pub fn as_grid_field(&self) -> GridField {
        GridField::new(self.grid.clone(), self.u.clone()).expect("layout matches grid")
    }
}

/// Log-uniform annular grid with the resolution floor the five-point
/// stencil needs.
pub fn build_grid(
    r_min: f64,
    r_max: f64,
    nr: usize,
    ntheta: usize,
) -> Result<AnnularGrid, SolverError> {
    if nr < 8 || ntheta < 8 {
        return Err(SolverError::InvalidParameter(format!(
            "grid too coarse for the interior stencil: Nr = {nr}, Ntheta = {ntheta} (need >= 8)"
        )));
    }
    Ok(AnnularGrid::new(
        ComplexPoint::zero(),
        r_min,
        r_max,
        nr,
        ntheta,
    )?)
}

// Raw second differences (no step division); `u` in full radius-major
// layout, output written at interior rows only.
fn second_differences(grid: &AnnularGrid, u: &[f64], out: &mut [f64], hs2: f64, ht2: f64) {
    let (ns, nt) = (grid.n_s(), grid.n_theta());
    for i in 1..ns - 1 {
        for j in 0..nt {
            let jm = (j + nt - 1) % nt;
            let jp = (j + 1) % nt;
            let c = u[i * nt + j];
            let ds = u[(i - 1) * nt + j] - 2.0 * c + u[(i + 1) * nt + j];
            let dt = u[i * nt + jm] - 2.0 * c + u[i * nt + jp];
            out[i * nt + j] = ds / hs2 + dt / ht2;
        }
    }
}

/// Second-order polar Laplacian `u_rr + u_r/r + u_θθ/r²` at interior
/// nodes (computed as `(u_ss + u_θθ)/r²` on the log-radial lattice, which
/// is the same operator discretized in the grid's own coordinates).
/// Boundary rows of the output are zero.
pub fn apply_laplacian(grid: &AnnularGrid, u: &[f64]) -> Result<Vec<f64>, SolverError> {
    if u.len() != grid.node_count() {
        return Err(SolverError::InvalidParameter(format!(
            "expected {} nodal values, got {}",
            grid.node_count(),
            u.len()
        )));
    }
    let hs2 = grid.h_s() * grid.h_s();
    let ht2 = grid.h_theta() * grid.h_theta();
    let mut out = vec![0.0; u.len()];
    second_differences(grid, u, &mut out, hs2, ht2);
    let nt = grid.n_theta();
    for i in 1..grid.n_s() - 1 {
        let r2 = grid.radius(i) * grid.radius(i);
        for j in 0..nt {
            out[i * nt + j] /= r2;
        }
    }
    Ok(out)
}

// Scaled five-point operator (δs²/hs² + δθ²/ht²) restricted to interior
// unknowns; boundary rows of `full` are read, never written.
struct Workspace {
    ns: usize,
    nt: usize,
    hs2: f64,
    ht2: f64,
    full: Vec<f64>,
}

impl Workspace {
    // y = (L_h x)_interior with x interior-only and zero boundary rows.
    fn apply_lh_homogeneous(&mut self, x: &[f64], y: &mut [f64]) {
        let nt = self.nt;
        self.full[..nt].fill(0.0);
        self.full[(self.ns - 1) * nt..].fill(0.0);
        self.full[nt..(self.ns - 1) * nt].copy_from_slice(x);
        for i in 1..self.ns - 1 {
            for j in 0..nt {
                let jm = (j + nt - 1) % nt;
                let jp = (j + 1) % nt;
                let c = self.full[i * nt + j];
                let ds = self.full[(i - 1) * nt + j] - 2.0 * c + self.full[(i + 1) * nt + j];
                let dt = self.full[i * nt + jm] - 2.0 * c + self.full[i * nt + jp];
                y[(i - 1) * nt + j] = ds / self.hs2 + dt / self.ht2;
            }
        }
    }
}

// Preconditioned conjugate gradients for M x = b, M = −L_h + diag(shift),
// shift ≥ 0. Jacobi preconditioning; relative tolerance 1e-13.
fn solve_spd(
    ws: &mut Workspace,
    shift: &[f64],
    b: &[f64],
    x: &mut Vec<f64>,
) -> Result<(), SolverError> {
    let n = b.len();
    let diag_lh = -2.0 / ws.hs2 - 2.0 / ws.ht2;
    let precon: Vec<f64> = shift.iter().map(|&s| 1.0 / (-diag_lh + s)).collect();

    let matvec = |ws: &mut Workspace, v: &[f64], out: &mut Vec<f64>| {
        ws.apply_lh_homogeneous(v, out);
        for k in 0..n {
            out[k] = -out[k] + shift[k] * v[k];
        }
    };

    x.resize(n, 0.0);
    x.fill(0.0);
    let mut r = b.to_vec();
    let b_norm = r.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if b_norm == 0.0 {
        return Ok(());
    }
    let mut z: Vec<f64> = r.iter().zip(&precon).map(|(ri, p)| ri * p).collect();
    let mut p = z.clone();
    let mut rz: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
    let mut ap = vec![0.0; n];
    let max_cg = 20 * n;
    for _ in 0..max_cg {
        matvec(ws, &p, &mut ap);
        let pap: f64 = p.iter().zip(&ap).map(|(a, b)| a * b).sum();
        if pap <= 0.0 {
            return Err(SolverError::LinearSolve(pap));
        }
        let alpha = rz / pap;
        for k in 0..n {
            x[k] += alpha * p[k];
            r[k] -= alpha * ap[k];
        }
        let r_norm = r.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if r_norm <= 1e-13 * b_norm {
            return Ok(());
        }
        for k in 0..n {
            z[k] = r[k] * precon[k];
        }
        let rz_next: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
        let beta = rz_next / rz;
        rz = rz_next;
        for k in 0..n {
            p[k] = z[k] + beta * p[k];
        }
    }
    let r_norm = r.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    Err(SolverError::LinearSolve(r_norm / b_norm))
}

/// Solve `Δu = −κ e^{2u}` with Dirichlet data on both circles.
///
/// The iteration count in the returned [`Solution`] counts linear solves,
/// the harmonic seed included; with `κ ≡ 0` and harmonic seeding the count
/// is exactly 1.
pub fn solve_curvature(
    kappa: &CurvatureField,
    boundary: &Dirichlet,
    grid: &AnnularGrid,
    cfg: &SolveConfig,
) -> Result<Solution, SolverError> {
    let (ns, nt) = (grid.n_s(), grid.n_theta());
    if boundary.inner.len() != nt {
        return Err(SolverError::InvalidParameter(format!(
            "boundary rows carry {} values but the grid has {} angular nodes",
            boundary.inner.len(),
            nt
        )));
    }
    if !(cfg.tol > 0.0) || cfg.max_iter == 0 {
        return Err(SolverError::InvalidParameter(
            "tolerance must be positive and max_iter nonzero".into(),
        ));
    }
    let hs2 = grid.h_s() * grid.h_s();
    let ht2 = grid.h_theta() * grid.h_theta();
    let n_int = (ns - 2) * nt;

    // Node-wise curvature and the e^{2s} scale factor of the log-polar
    // form u_ss + u_θθ = −κ e^{2u} e^{2s}. Curvature must stay ≤ 0 — the
    // coercivity of every linearization rests on it.
    let mut kappa_full = vec![0.0; ns * nt];
    let mut r2_full = vec![0.0; ns * nt];
    for i in 0..ns {
        let r = grid.radius(i);
        for j in 0..nt {
            let k = kappa.eval_c(grid.node(i, j));
            if !k.is_finite() {
                return Err(SolverError::InvalidParameter(
                    "curvature field returned a non-finite value".into(),
                ));
            }
            if k > 0.0 {
                return Err(SolverError::LostCoercivity(k));
            }
            kappa_full[i * nt + j] = k;
            r2_full[i * nt + j] = r * r;
        }
    }

    let mut u = vec![0.0; ns * nt];
    u[..nt].copy_from_slice(&boundary.inner);
    u[(ns - 1) * nt..].copy_from_slice(&boundary.outer);

    let mut ws = Workspace {
        ns,
        nt,
        hs2,
        ht2,
        full: vec![0.0; ns * nt],
    };

    // Scaled residual F(u) = L_h u + κ e^{2u+2s} − corr on interior nodes.
    let scaled_residual = |u: &[f64], corr: &[f64], out: &mut [f64]| {
        for i in 1..ns - 1 {
            for j in 0..nt {
                let jm = (j + nt - 1) % nt;
                let jp = (j + 1) % nt;
                let c = u[i * nt + j];
                let ds = u[(i - 1) * nt + j] - 2.0 * c + u[(i + 1) * nt + j];
                let dt = u[i * nt + jm] - 2.0 * c + u[i * nt + jp];
                let lh = ds / hs2 + dt / ht2;
                let k = i * nt + j;
                out[(i - 1) * nt + j] =
                    lh + kappa_full[k] * (2.0 * c).exp() * r2_full[k] - corr[(i - 1) * nt + j];
            }
        }
    };
    // Physical max-norm: the scaled residual divided back by r².
    let phys_norm = |f_scaled: &[f64]| -> f64 {
        let mut m = 0.0f64;
        for i in 1..ns - 1 {
            let r2 = r2_full[i * nt];
            for j in 0..nt {
                m = m.max((f_scaled[(i - 1) * nt + j] / r2).abs());
            }
        }
        m
    };

    let mut newton_iters = 0u32;
    let mut delta = Vec::new();

    // Seed: harmonic extension (κ suppressed) or constant fill.
    match cfg.initial_guess {
        InitialGuess::Harmonic => {
            // L_h u = 0 with the boundary rows in place. With the interior
            // zeroed, L_h u carries the boundary coupling only; one SPD
            // solve of −L_h δ = L_h u makes the interior discretely
            // harmonic.
            let mut rhs = vec![0.0; n_int];
            for v in u[nt..(ns - 1) * nt].iter_mut() {
                *v = 0.0;
            }
            for i in 1..ns - 1 {
                for j in 0..nt {
                    let jm = (j + nt - 1) % nt;
                    let jp = (j + 1) % nt;
                    let c = u[i * nt + j];
                    let ds = u[(i - 1) * nt + j] - 2.0 * c + u[(i + 1) * nt + j];
                    let dt = u[i * nt + jm] - 2.0 * c + u[i * nt + jp];
                    rhs[(i - 1) * nt + j] = ds / hs2 + dt / ht2;
                }
            }
            let zero_shift = vec![0.0; n_int];
            solve_spd(&mut ws, &zero_shift, &rhs, &mut delta)?;
            for k in 0..n_int {
                u[nt + k] += delta[k];
            }
            newton_iters += 1;
        }
        InitialGuess::Constant(c0) => {
            if !c0.is_finite() {
                return Err(SolverError::InvalidParameter(
                    "constant initial guess must be finite".into(),
                ));
            }
            for v in u[nt..(ns - 1) * nt].iter_mut() {
                *v = c0;
            }
        }
    }

    let mut corr = vec![0.0; n_int];
    let mut f = vec![0.0; n_int];
    let mut f_try = vec![0.0; n_int];
    let mut trace = Vec::new();
    let dc_passes = if cfg.defect_correction { 2 } else { 1 };

    for pass in 0..dc_passes {
        if pass == 1 {
            // Compact fourth-order correction, frozen at the second-order
            // solution: corr = δs²g/12 + δθ²g/12 − (hs²+ht²)/(12 hs²ht²) δs²δθ²u
            // with g = −κ e^{2u+2s}. Boundary rows of g and u feed the
            // differences, so no one-sided stencils appear.
            let mut g = vec![0.0; ns * nt];
            for k in 0..ns * nt {
                g[k] = -kappa_full[k] * (2.0 * u[k]).exp() * r2_full[k];
            }
            let mut dtt_u = vec![0.0; ns * nt];
            for i in 0..ns {
                for j in 0..nt {
                    let jm = (j + nt - 1) % nt;
                    let jp = (j + 1) % nt;
                    dtt_u[i * nt + j] =
                        u[i * nt + jm] - 2.0 * u[i * nt + j] + u[i * nt + jp];
                }
            }
            for i in 1..ns - 1 {
                for j in 0..nt {
                    let jm = (j + nt - 1) % nt;
                    let jp = (j + 1) % nt;
                    let k = i * nt + j;
                    let dss_g = g[(i - 1) * nt + j] - 2.0 * g[k] + g[(i + 1) * nt + j];
                    let dtt_g = g[i * nt + jm] - 2.0 * g[k] + g[i * nt + jp];
                    let dss_dtt_u =
                        dtt_u[(i - 1) * nt + j] - 2.0 * dtt_u[k] + dtt_u[(i + 1) * nt + j];
                    corr[(i - 1) * nt + j] = dss_g / 12.0 + dtt_g / 12.0
                        - (hs2 + ht2) / (12.0 * hs2 * ht2) * dss_dtt_u;
                }
            }
        }

        scaled_residual(&u, &corr, &mut f);
        let mut res = phys_norm(&f);
        trace.push(res);
        let mut converged = res < cfg.tol;
        let mut iter = 0u32;
        while !converged {
            if iter >= cfg.max_iter {
                return Err(SolverError::NewtonDivergence {
                    iters: newton_iters as usize,
                    trace,
                });
            }
            iter += 1;
            // Shift d = −2κ e^{2u+2s} ≥ 0; solve (−L_h + d) δ = F.
            let mut shift = vec![0.0; n_int];
            for i in 1..ns - 1 {
                for j in 0..nt {
                    let k = i * nt + j;
                    let d = -2.0 * kappa_full[k] * (2.0 * u[k]).exp() * r2_full[k];
                    if d < 0.0 {
                        return Err(SolverError::LostCoercivity(-d));
                    }
                    shift[(i - 1) * nt + j] = d;
                }
            }
            solve_spd(&mut ws, &shift, &f, &mut delta)?;
            newton_iters += 1;

            // Armijo on the scaled max-norm.
            let f_norm = f.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            let mut t = cfg.damping.initial_step;
            let mut accepted = false;
            for _ in 0..=cfg.damping.max_backtracks {
                let mut u_try = u.clone();
                for k in 0..n_int {
                    u_try[nt + k] += t * delta[k];
                }
                scaled_residual(&u_try, &corr, &mut f_try);
                let try_norm = f_try.iter().fold(0.0f64, |m, v| m.max(v.abs()));
                if try_norm <= (1.0 - 0.5 * t) * f_norm {
                    u = u_try;
                    std::mem::swap(&mut f, &mut f_try);
                    accepted = true;
                    break;
                }
                t *= cfg.damping.factor;
            }
            if !accepted {
                trace.push(phys_norm(&f));
                return Err(SolverError::NewtonDivergence {
                    iters: newton_iters as usize,
                    trace,
                });
            }
            res = phys_norm(&f);
            trace.push(res);
            converged = res < cfg.tol;
        }
    }

    let residual_norm = *trace.last().expect("at least one residual recorded");
    Ok(Solution {
        grid: grid.clone(),
        u,
        residual_norm,
        newton_iters,
    })
}

/// Singularity normal form a remainder was extracted with.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SingularityKind {
    Corner,
    Cusp,
}

/// Nodal remainder after the singular normal form is removed from `u`:
/// `v = u + α log|z|` at a corner, `w = u + log|z| + log log(1/|z|)` at a
/// cusp.
#[derive(Debug, Clone)]
pub struct RemainderField {
    pub kind: SingularityKind,
    pub alpha: f64,
    pub values: GridField,
}

/// Remove the order-α normal form from a solved field.
pub fn extract_remainder(solution: &Solution, alpha: f64) -> Result<RemainderField, SolverError> {
    let field = solution.as_grid_field();
    extract_remainder_values(&field, alpha)
}

/// Remove the order-α normal form from a pointwise field sampled on `grid`.
pub fn extract_remainder_from<F>(
    grid: &AnnularGrid,
    u: F,
    alpha: f64,
) -> Result<RemainderField, SolverError>
where
    F: Fn(Complex64) -> f64 + Sync + Send,
{
    let field = GridField::sample(grid, u);
    extract_remainder_values(&field, alpha)
}

fn extract_remainder_values(u: &GridField, alpha: f64) -> Result<RemainderField, SolverError> {
    if !alpha.is_finite() || alpha > 1.0 {
        return Err(SolverError::InvalidParameter(format!(
            "singularity order must be finite and <= 1, got {alpha}"
        )));
    }
    let grid = u.grid().clone();
    let cusp = alpha == 1.0;
    if cusp && grid.outer_radius() >= 1.0 {
        return Err(SolverError::Domain(format!(
            "log log(1/|z|) undefined at |z| >= 1 (grid reaches {})",
            grid.outer_radius()
        )));
    }
    let nt = grid.n_theta();
    let mut values = Vec::with_capacity(grid.node_count());
    for i in 0..grid.n_s() {
        let r = grid.radius(i);
        let shift = if cusp {
            r.ln() + (-r.ln()).ln()
        } else {
            alpha * r.ln()
        };
        for j in 0..nt {
            values.push(u.value(i, j) + shift);
        }
    }
    Ok(RemainderField {
        kind: if cusp {
            SingularityKind::Cusp
        } else {
            SingularityKind::Corner
        },
        alpha,
        values: GridField::new(grid, values).expect("layout matches grid"),
    })
}
