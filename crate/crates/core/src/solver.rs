//! Finite-difference method-of-lines solvers for the full system and the two
//! split subsystems.
//!
//! Space: uniform grid, central differences, ghost-node Robin closure folded
//! into the boundary rows. Time: Crank-Nicolson for the linear operator with
//! the nonlinear source advanced explicitly (Heun predictor/corrector) after
//! two implicit Euler start-up steps, or implicit Euler throughout.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Field, InitialProfile, Nonlinearity, ProblemSpec, Signal};
use crate::quadrature::l2_norm;
use crate::transform::{SplitParams, TransformedSpec};
use crate::tridiag::{FactoredTridiagonal, Tridiagonal};

/// Magnitude beyond which a run is declared unstable.
pub const BLOWUP_LIMIT: f64 = 1e12;

/// Output steps advanced by half-step implicit Euler before Crank-Nicolson.
const STARTUP_STEPS: usize = 2;

/// Uniform space-time grid on `[0,1] x [0,t_final]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    pub nx: usize,
    pub nt: usize,
    pub t_final: f64,
}

impl Grid {
    pub fn new(nx: usize, nt: usize, t_final: f64) -> Result<Grid> {
        let grid = Grid { nx, nt, t_final };
        grid.validate()?;
        Ok(grid)
    }

    pub fn validate(&self) -> Result<()> {
        if self.nx < 3 {
            return Err(Error::InvalidInput(format!("nx = {} must be >= 3", self.nx)));
        }
        if self.nt < 2 {
            return Err(Error::InvalidInput(format!("nt = {} must be >= 2", self.nt)));
        }
        if !(self.t_final > 0.0 && self.t_final.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "t_final = {} must be positive",
                self.t_final
            )));
        }
        Ok(())
    }

    pub fn dx(&self) -> f64 {
        1.0 / (self.nx - 1) as f64
    }

    pub fn dt(&self) -> f64 {
        self.t_final / self.nt as f64
    }

    pub fn x(&self, j: usize) -> f64 {
        j as f64 * self.dx()
    }

    pub fn t(&self, n: usize) -> f64 {
        if n == self.nt {
            self.t_final
        } else {
            n as f64 * self.dt()
        }
    }

    pub fn xs(&self) -> Vec<f64> {
        (0..self.nx).map(|j| self.x(j)).collect()
    }

    pub fn times(&self) -> Vec<f64> {
        (0..=self.nt).map(|n| self.t(n)).collect()
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    #[default]
    ImexCn,
    ImplicitEuler,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverOptions {
    #[serde(default)]
    pub scheme: Scheme,
    /// The nonlinearity is always advanced explicitly; `false` is rejected.
    #[serde(default = "default_newton_free")]
    pub newton_free: bool,
    /// Fraction of the explicit stability step actually used.
    #[serde(default = "default_dt_safety")]
    pub dt_safety: f64,
}

fn default_newton_free() -> bool {
    true
}

fn default_dt_safety() -> f64 {
    0.9
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            scheme: Scheme::ImexCn,
            newton_free: true,
            dt_safety: default_dt_safety(),
        }
    }
}

impl SolverOptions {
    pub fn implicit_euler() -> Self {
        SolverOptions {
            scheme: Scheme::ImplicitEuler,
            ..Default::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if !self.newton_free {
            return Err(Error::InvalidInput(
                "only explicit treatment of the nonlinearity is available (newton_free = true)"
                    .into(),
            ));
        }
        if !(self.dt_safety > 0.0 && self.dt_safety <= 1.0) {
            return Err(Error::InvalidInput(format!(
                "dt_safety = {} must lie in (0, 1]",
                self.dt_safety
            )));
        }
        Ok(())
    }
}

/// Which field a trajectory holds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VariableTag {
    U,
    UTilde,
    VTilde,
    WTilde,
    V,
    W,
}

/// Solution samples, one row per time level.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub grid: Grid,
    pub values: Vec<Vec<f64>>,
    pub tag: VariableTag,
}

impl Trajectory {
    pub fn zeros(grid: Grid, tag: VariableTag) -> Trajectory {
        Trajectory {
            grid,
            values: vec![vec![0.0; grid.nx]; grid.nt + 1],
            tag,
        }
    }

    pub fn row(&self, n: usize) -> &[f64] {
        &self.values[n]
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().flatten().all(|v| v.is_finite())
    }

    /// Value at node `j`, linear in time between stored levels.
    pub fn interpolate(&self, j: usize, t: f64) -> f64 {
        let dt = self.grid.dt();
        let pos = (t / dt).clamp(0.0, self.grid.nt as f64);
        let n0 = (pos.floor() as usize).min(self.grid.nt - 1);
        let theta = pos - n0 as f64;
        (1.0 - theta) * self.values[n0][j] + theta * self.values[n0 + 1][j]
    }

    /// Largest absolute value and where it occurs, as `(value, n, j)`.
    pub fn max_abs(&self) -> (f64, usize, usize) {
        let mut best = (0.0, 0, 0);
        for (n, row) in self.values.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                if v.abs() > best.0 {
                    best = (v.abs(), n, j);
                }
            }
        }
        best
    }
}

/// Constant-coefficient operator `a u_xx - b u_x - c u` with
/// `alpha_0 u - beta_0 u_x` at `x = 0` and `alpha_1 u + beta_1 u_x` at `x = 1`.
#[derive(Clone, Copy, Debug)]
struct Operator {
    a: f64,
    b: f64,
    c: f64,
    alpha: [f64; 2],
    beta: [f64; 2],
}

type SourceFn<'a> = dyn Fn(usize, f64, f64) -> f64 + Sync + 'a;
type SlopeFn<'a> = dyn Fn(&[f64], f64, f64) -> f64 + Sync + 'a;

/// Everything the integrator needs beyond the operator.
struct Setup<'a> {
    op: Operator,
    /// Interior forcing `(x, t)`.
    forcing: Box<dyn Fn(f64, f64) -> f64 + Sync + 'a>,
    /// Boundary data `(side, t)`.
    data: Box<dyn Fn(usize, f64) -> f64 + Sync + 'a>,
    /// Explicit source `(node, t, value)`; `None` for linear problems.
    source: Option<Box<SourceFn<'a>>>,
    /// Bound on `|d source / d value|` over a step, given the node values at
    /// the step start and the step end time.
    slope: Box<SlopeFn<'a>>,
}

/// Index range of nodes not fixed by Dirichlet data.
fn active_range(op: &Operator, nx: usize) -> (usize, usize) {
    let lo = if op.beta[0] == 0.0 { 1 } else { 0 };
    let hi = if op.beta[1] == 0.0 { nx - 2 } else { nx - 1 };
    (lo, hi)
}

/// Semi-discrete operator on the active nodes plus the weights with which
/// boundary data enter the first and last rows.
fn assemble_operator(op: &Operator, grid: &Grid) -> (Tridiagonal, [f64; 2]) {
    let (lo, hi) = active_range(op, grid.nx);
    let m = hi - lo + 1;
    let dx = grid.dx();
    let (a, b, c) = (op.a, op.b, op.c);
    let lower = a / (dx * dx) + b / (2.0 * dx);
    let upper = a / (dx * dx) - b / (2.0 * dx);
    let mut l = Tridiagonal::zeros(m);
    for k in 0..m {
        l.sub[k] = lower;
        l.diag[k] = -2.0 * a / (dx * dx) - c;
        l.sup[k] = upper;
    }
    let mut data_weight = [0.0; 2];
    if op.beta[0] == 0.0 {
        data_weight[0] = lower / op.alpha[0];
    } else {
        let (al, be) = (op.alpha[0], op.beta[0]);
        l.diag[0] = -2.0 * a / (dx * dx) - 2.0 * a * al / (be * dx) - b * al / be - c;
        l.sup[0] = 2.0 * a / (dx * dx);
        data_weight[0] = 2.0 * a / (be * dx) + b / be;
    }
    if op.beta[1] == 0.0 {
        data_weight[1] = upper / op.alpha[1];
    } else {
        let (al, be) = (op.alpha[1], op.beta[1]);
        l.diag[m - 1] = -2.0 * a / (dx * dx) - 2.0 * a * al / (be * dx) + b * al / be - c;
        l.sub[m - 1] = 2.0 * a / (dx * dx);
        data_weight[1] = 2.0 * a / (be * dx) - b / be;
    }
    (l, data_weight)
}

struct Integrator<'s, 'a> {
    setup: &'s Setup<'a>,
    grid: Grid,
    lo: usize,
    hi: usize,
    l: Tridiagonal,
    data_weight: [f64; 2],
}

impl Integrator<'_, '_> {
    fn inhomogeneity(&self, t: f64, out: &mut [f64]) {
        for (k, g) in out.iter_mut().enumerate() {
            *g = (self.setup.forcing)(self.grid.x(self.lo + k), t);
        }
        let last = out.len() - 1;
        out[0] += self.data_weight[0] * (self.setup.data)(0, t);
        out[last] += self.data_weight[1] * (self.setup.data)(1, t);
    }

    fn source(&self, t: f64, u: &[f64], out: &mut [f64]) {
        if let Some(src) = &self.setup.source {
            for (k, s) in out.iter_mut().enumerate() {
                *s = src(self.lo + k, t, u[k]);
            }
        }
    }

    fn dirichlet_value(&self, side: usize, t: f64) -> f64 {
        (self.setup.data)(side, t) / self.setup.op.alpha[side]
    }

    fn full_row(&self, u: &[f64], t: f64) -> Vec<f64> {
        let nx = self.grid.nx;
        let mut row = vec![0.0; nx];
        row[self.lo..=self.hi].copy_from_slice(u);
        if self.lo == 1 {
            row[0] = self.dirichlet_value(0, t);
        }
        if self.hi == nx - 2 {
            row[nx - 1] = self.dirichlet_value(1, t);
        }
        row
    }

    fn check(&self, u: &[f64], t: f64) -> Result<()> {
        for (k, &v) in u.iter().enumerate() {
            if !v.is_finite() || v.abs() > BLOWUP_LIMIT {
                return Err(Error::Instability {
                    t,
                    x: self.grid.x(self.lo + k),
                    value: v,
                });
            }
        }
        Ok(())
    }

    fn run(&self, opts: &SolverOptions, init: Vec<f64>, tag: VariableTag) -> Result<Trajectory> {
        let grid = self.grid;
        let m = self.hi - self.lo + 1;
        let dt = grid.dt();
        let nonlinear = self.setup.source.is_some();
        let mut values = Vec::with_capacity(grid.nt + 1);
        let mut u: Vec<f64> = init[self.lo..=self.hi].to_vec();
        values.push(init);

        let mut cached: Option<(usize, Scheme, FactoredTridiagonal, Tridiagonal)> = None;
        let mut g0 = vec![0.0; m];
        let mut g1 = vec![0.0; m];
        let mut n0 = vec![0.0; m];
        let mut n1 = vec![0.0; m];
        let mut rhs = vec![0.0; m];
        let mut base = vec![0.0; m];

        for n in 0..grid.nt {
            let t_start = grid.t(n);
            let t_end = grid.t(n + 1);
            let mut substeps = if nonlinear {
                let slope = (self.setup.slope)(&u, t_start, t_end);
                let dt_stab = 1.0 / (2.0 * slope + self.setup.op.c.abs() + 1.0);
                (dt / (opts.dt_safety * dt_stab)).ceil().max(1.0) as usize
            } else {
                1
            };
            // Rannacher start: damp the stiff modes excited by incompatible
            // data before Crank-Nicolson takes over.
            let scheme = if opts.scheme == Scheme::ImexCn && n < STARTUP_STEPS {
                substeps *= 2;
                Scheme::ImplicitEuler
            } else {
                opts.scheme
            };
            let tau = (t_end - t_start) / substeps as f64;
            if cached.as_ref().map(|c| (c.0, c.1)) != Some((substeps, scheme)) {
                let implicit_scale = match scheme {
                    Scheme::ImexCn => -0.5 * tau,
                    Scheme::ImplicitEuler => -tau,
                };
                let factored = self.l.shifted_identity(implicit_scale).factor()?;
                let explicit = self.l.shifted_identity(0.5 * tau);
                cached = Some((substeps, scheme, factored, explicit));
            }
            let (_, _, factored, explicit) = cached.as_ref().expect("factorization cached above");

            for s in 0..substeps {
                let t0 = t_start + s as f64 * tau;
                let t1 = if s + 1 == substeps { t_end } else { t0 + tau };
                match scheme {
                    Scheme::ImexCn => {
                        self.inhomogeneity(t0, &mut g0);
                        self.inhomogeneity(t1, &mut g1);
                        explicit.apply(&u, &mut base);
                        for k in 0..m {
                            base[k] += 0.5 * tau * (g0[k] + g1[k]);
                        }
                        if nonlinear {
                            self.source(t0, &u, &mut n0);
                            for k in 0..m {
                                rhs[k] = base[k] + tau * n0[k];
                            }
                            factored.solve_in_place(&mut rhs);
                            self.check(&rhs, t1)?;
                            self.source(t1, &rhs, &mut n1);
                            for k in 0..m {
                                rhs[k] = base[k] + 0.5 * tau * (n0[k] + n1[k]);
                            }
                        } else {
                            rhs.copy_from_slice(&base);
                        }
                        factored.solve_in_place(&mut rhs);
                    }
                    Scheme::ImplicitEuler => {
                        self.inhomogeneity(t1, &mut g1);
                        self.source(t0, &u, &mut n0);
                        for k in 0..m {
                            rhs[k] = u[k] + tau * g1[k];
                            if nonlinear {
                                rhs[k] += tau * n0[k];
                            }
                        }
                        factored.solve_in_place(&mut rhs);
                    }
                }
                self.check(&rhs, t1)?;
                std::mem::swap(&mut u, &mut rhs);
            }
            values.push(self.full_row(&u, t_end));
        }
        Ok(Trajectory { grid, values, tag })
    }
}

fn integrate(
    setup: &Setup,
    grid: &Grid,
    opts: &SolverOptions,
    init: Vec<f64>,
    tag: VariableTag,
) -> Result<Trajectory> {
    grid.validate()?;
    opts.validate()?;
    let (lo, hi) = active_range(&setup.op, grid.nx);
    let (l, data_weight) = assemble_operator(&setup.op, grid);
    let integrator = Integrator {
        setup,
        grid: *grid,
        lo,
        hi,
        l,
        data_weight,
    };
    integrator.run(opts, init, tag)
}

fn sample_profile(phi: &InitialProfile, grid: &Grid) -> Vec<f64> {
    (0..grid.nx).map(|j| phi.value(grid.x(j))).collect()
}

/// Solves `u_t - a u_xx + b u_x + c u + h(u) = f` with the Robin data of `spec`.
pub fn simulate_full(spec: &ProblemSpec, grid: &Grid, opts: &SolverOptions) -> Result<Trajectory> {
    spec.ensure_admissible()?;
    let h = &spec.h;
    let op = Operator {
        a: spec.a,
        b: spec.b,
        c: spec.c,
        alpha: [spec.alpha0, spec.alpha1],
        beta: [spec.beta0, spec.beta1],
    };
    let setup = Setup {
        op,
        forcing: Box::new(|x, t| spec.f.value(x, t)),
        data: Box::new(|side, t| spec.boundary_signal(side).value(t)),
        source: if h.is_zero() {
            None
        } else {
            Some(Box::new(move |_, _, u| -h.value(u)))
        },
        slope: Box::new(|u, t0, t1| {
            let mut range = u.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
            for side in 0..2 {
                if op.beta[side] == 0.0 {
                    let d = spec.boundary_signal(side);
                    for t in [t0, t1] {
                        range = range.max((d.value(t) / op.alpha[side]).abs());
                    }
                }
            }
            h.max_abs_derivative(range)
        }),
    };
    integrate(&setup, grid, opts, sample_profile(&spec.phi, grid), VariableTag::U)
}

/// Solves the linear disturbance subsystem
/// `v_t - a v_xx + c_tilde v = f_tilde` with boundary coefficients
/// `(alpha_tilde_i + k_i, beta_tilde_i)`, data `d_tilde_i` and zero initial value.
pub fn simulate_v(
    tspec: &TransformedSpec,
    params: &SplitParams,
    f_tilde: &Field,
    d0_tilde: &Signal,
    d1_tilde: &Signal,
    grid: &Grid,
    opts: &SolverOptions,
) -> Result<Trajectory> {
    let op = Operator {
        a: tspec.a,
        b: 0.0,
        c: tspec.c_tilde,
        alpha: [params.v_alpha(tspec, 0), params.v_alpha(tspec, 1)],
        beta: [tspec.beta0_tilde, tspec.beta1_tilde],
    };
    check_boundary(&op)?;
    let setup = Setup {
        op,
        forcing: Box::new(|x, t| f_tilde.value(x, t)),
        data: Box::new(|side, t| if side == 0 { d0_tilde } else { d1_tilde }.value(t)),
        source: None,
        slope: Box::new(|_, _, _| 0.0),
    };
    integrate(&setup, grid, opts, vec![0.0; grid.nx], VariableTag::VTilde)
}

/// Solves the nonlinear subsystem
/// `w_t - a w_xx + c_tilde w + exp(-bx/2a) h(exp(bx/2a)(v + w)) = 0` with
/// boundary coefficients `(alpha_tilde_i, beta_tilde_i)`, data `k_i v(i,t)`
/// and initial value `phi_tilde`. `v` is interpolated linearly in time.
pub fn simulate_w(
    tspec: &TransformedSpec,
    params: &SplitParams,
    h: &Nonlinearity,
    v_traj: &Trajectory,
    phi_tilde: &InitialProfile,
    grid: &Grid,
    opts: &SolverOptions,
) -> Result<Trajectory> {
    if v_traj.grid != *grid {
        return Err(Error::GridMismatch(format!(
            "v trajectory grid {:?} differs from {:?}",
            v_traj.grid, grid
        )));
    }
    if v_traj.tag != VariableTag::VTilde {
        return Err(Error::InvalidInput(format!(
            "expected a v_tilde trajectory, got {:?}",
            v_traj.tag
        )));
    }
    let op = Operator {
        a: tspec.a,
        b: 0.0,
        c: tspec.c_tilde,
        alpha: [tspec.alpha0_tilde, tspec.alpha1_tilde],
        beta: [tspec.beta0_tilde, tspec.beta1_tilde],
    };
    check_boundary(&op)?;
    let nx = grid.nx;
    let shift = tspec.shift();
    let up: Vec<f64> = (0..nx).map(|j| (shift * grid.x(j)).exp()).collect();
    let down: Vec<f64> = up.iter().map(|w| 1.0 / w).collect();
    let k = [params.k0, params.k1];
    let (lo, _) = active_range(&op, nx);
    let setup = Setup {
        op,
        forcing: Box::new(|_, _| 0.0),
        data: Box::new(|side, t| {
            let node = if side == 0 { 0 } else { nx - 1 };
            if k[side] == 0.0 {
                0.0
            } else {
                k[side] * v_traj.interpolate(node, t)
            }
        }),
        source: if h.is_zero() {
            None
        } else {
            let (up, down) = (&up, &down);
            Some(Box::new(move |j, t, w| {
                -down[j] * h.value(up[j] * (v_traj.interpolate(j, t) + w))
            }))
        },
        slope: Box::new(|w, t0, t1| {
            let mut range = 0.0f64;
            for (k, wk) in w.iter().enumerate() {
                let j = lo + k;
                for t in [t0, t1] {
                    range = range.max((up[j] * (v_traj.interpolate(j, t) + wk)).abs());
                }
            }
            h.max_abs_derivative(range)
        }),
    };
    let init = sample_profile(phi_tilde, grid);
    integrate(&setup, grid, opts, init, VariableTag::WTilde)
}

fn check_boundary(op: &Operator) -> Result<()> {
    for side in 0..2 {
        if op.beta[side] < 0.0 || (op.beta[side] == 0.0 && op.alpha[side] == 0.0) {
            return Err(Error::InvalidInput(format!(
                "boundary {side}: coefficients ({}, {}) do not define a condition",
                op.alpha[side], op.beta[side]
            )));
        }
    }
    Ok(())
}

fn reweight(traj: &Trajectory, rate: f64, tag: VariableTag) -> Trajectory {
    let weights: Vec<f64> = (0..traj.grid.nx)
        .map(|j| (rate * traj.grid.x(j)).exp())
        .collect();
    Trajectory {
        grid: traj.grid,
        values: traj
            .values
            .iter()
            .map(|row| row.iter().zip(&weights).map(|(v, w)| v * w).collect())
            .collect(),
        tag,
    }
}

/// Multiplies column `j` by `exp(b x_j / 2a)`. Transformed tags map to their
/// original counterparts; other tags are kept.
pub fn untransform(traj: &Trajectory, a: f64, b: f64) -> Trajectory {
    let tag = match traj.tag {
        VariableTag::UTilde => VariableTag::U,
        VariableTag::VTilde => VariableTag::V,
        VariableTag::WTilde => VariableTag::W,
        other => other,
    };
    reweight(traj, b / (2.0 * a), tag)
}

/// Multiplies column `j` by `exp(-b x_j / 2a)`, mapping `u` to `u_tilde`.
pub fn transform_trajectory(traj: &Trajectory, a: f64, b: f64) -> Trajectory {
    let tag = match traj.tag {
        VariableTag::U => VariableTag::UTilde,
        VariableTag::V => VariableTag::VTilde,
        VariableTag::W => VariableTag::WTilde,
        other => other,
    };
    reweight(traj, -b / (2.0 * a), tag)
}

/// `v_tilde + w_tilde` on a shared grid.
pub fn combine(v: &Trajectory, w: &Trajectory) -> Result<Trajectory> {
    if v.grid != w.grid {
        return Err(Error::GridMismatch(format!(
            "cannot add trajectories on {:?} and {:?}",
            v.grid, w.grid
        )));
    }
    Ok(Trajectory {
        grid: v.grid,
        values: v
            .values
            .iter()
            .zip(&w.values)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x + y).collect())
            .collect(),
        tag: VariableTag::UTilde,
    })
}

/// `(t_n, ||row_n||_{L^2(0,1)})` for every stored level.
pub fn l2_profile(traj: &Trajectory) -> Vec<(f64, f64)> {
    let dx = traj.grid.dx();
    traj.values
        .iter()
        .enumerate()
        .map(|(n, row)| (traj.grid.t(n), l2_norm(row, dx)))
        .collect()
}

/// Index-local peak refinement: fits a parabola through three samples and
/// returns the abscissa offset of its vertex in units of the spacing.
fn vertex_offset(left: f64, mid: f64, right: f64) -> Option<f64> {
    let curvature = left - 2.0 * mid + right;
    if curvature >= 0.0 {
        return None;
    }
    Some((0.5 * (left - right) / curvature).clamp(-1.0, 1.0))
}

/// Sampling count giving at least 20 points per shortest period and
/// resolving exponential transients.
fn dense_count(n: usize, span: f64, omega: f64, rate: f64) -> usize {
    let periods = span * omega / (2.0 * std::f64::consts::PI);
    let by_period = (20.0 * periods).ceil() as usize + 1;
    let by_rate = (20.0 * span * rate).ceil() as usize + 1;
    n.max(by_period).max(by_rate).clamp(2, 2_000_000)
}

/// `sup |s(t)|` over `[0, t_final]` by dense sampling, each local peak
/// refined once by a parabolic fit.
pub fn sup_norm_signal(s: &Signal, t_final: f64, n: usize) -> f64 {
    let count = dense_count(n, t_final, s.max_omega(), s.max_rate());
    let h = t_final / (count - 1) as f64;
    let samples: Vec<f64> = (0..count).map(|i| s.value(i as f64 * h).abs()).collect();
    let mut best = samples.iter().cloned().fold(0.0, f64::max);
    for i in 1..count - 1 {
        let (l, m, r) = (samples[i - 1], samples[i], samples[i + 1]);
        if m >= l && m >= r {
            if let Some(off) = vertex_offset(l, m, r) {
                let t = ((i as f64 + off) * h).clamp(0.0, t_final);
                best = best.max(s.value(t).abs());
            }
        }
    }
    best
}

/// `sup |f(x,t)|` over `[0,1] x [0, t_final]`; the sample lattice is at least
/// `nx x (nt + 1)` and refined around the largest sample.
pub fn sup_norm_field(f: &Field, t_final: f64, nx: usize, nt: usize) -> f64 {
    if f.terms.is_empty() {
        return 0.0;
    }
    let mode = f.max_mode() as f64;
    let sx = dense_count(nx.max(3), 1.0, mode * std::f64::consts::PI, f.weight_rate.abs());
    let st = dense_count(nt + 1, t_final, f.max_omega(), f.max_rate());
    let (sx, st) = (sx.min(4001), st.min(20001));
    let hx = 1.0 / (sx - 1) as f64;
    let ht = t_final / (st - 1) as f64;
    // separable terms: tabulate space and time factors once
    let space: Vec<Vec<f64>> = f
        .terms
        .iter()
        .map(|term| {
            (0..sx)
                .map(|i| {
                    let x = i as f64 * hx;
                    (f.weight_rate * x).exp() * term.space.value(x)
                })
                .collect()
        })
        .collect();
    let time: Vec<Vec<f64>> = f
        .terms
        .iter()
        .map(|term| (0..st).map(|k| term.time.value(k as f64 * ht)).collect())
        .collect();
    let mut best = (0.0f64, 0usize, 0usize);
    let at = |i: usize, k: usize| -> f64 {
        (0..f.terms.len())
            .map(|m| space[m][i] * time[m][k])
            .sum::<f64>()
            .abs()
    };
    for k in 0..st {
        for i in 0..sx {
            let v = at(i, k);
            if v > best.0 {
                best = (v, i, k);
            }
        }
    }
    let (peak, i, k) = best;
    let mut x = i as f64 * hx;
    let mut t = k as f64 * ht;
    if k > 0 && k + 1 < st {
        if let Some(off) = vertex_offset(at(i, k - 1), peak, at(i, k + 1)) {
            t = ((k as f64 + off) * ht).clamp(0.0, t_final);
        }
    }
    if i > 0 && i + 1 < sx {
        let g = |x: f64| f.value(x, t).abs();
        if let Some(off) = vertex_offset(g(x - hx), g(x), g(x + hx)) {
            x = ((i as f64 + off) * hx).clamp(0.0, 1.0);
        }
    }
    peak.max(f.value(x, t).abs())
}
