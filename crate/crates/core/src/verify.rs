//! Numerical checks of the certificate against simulated trajectories.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    Field, FieldTerm, InitialProfile, ProblemSpec, ProfileTerm, Signal, SignalTerm, SpaceFactor,
};
use crate::quadrature::{derivative, simpson};
use crate::solver::{
    combine, l2_profile, simulate_full, simulate_v, simulate_w, sup_norm_field, sup_norm_signal,
    untransform, Grid, SolverOptions, Trajectory,
};
use crate::transform::{
    certify, max_estimate_bound, GainSet, MaxEstimateBound, SplitOverrides, TildeGains,
};

/// Denominator floor for relative margins.
const TINY: f64 = 1e-300;

/// `(bound - observed) / max(bound, observed)`, in `[-1, 1]`.
pub fn relative_margin(bound: f64, observed: f64) -> f64 {
    (bound - observed) / bound.max(observed).max(TINY)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Location {
    pub t: f64,
    pub x: Option<f64>,
}

/// Outcome of one check. `worst_margin` is the smallest relative margin
/// over all checked points; the check passes iff it is at least `-tol`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationReport {
    pub name: String,
    pub passed: bool,
    pub worst_margin: f64,
    pub worst_location: Location,
    pub n_points_checked: usize,
    pub tol: f64,
}

/// Running minimum of margins.
struct MarginTracker {
    worst: f64,
    location: Location,
    count: usize,
}

impl MarginTracker {
    fn new() -> Self {
        MarginTracker {
            worst: f64::INFINITY,
            location: Location { t: 0.0, x: None },
            count: 0,
        }
    }

    fn push(&mut self, margin: f64, location: Location) {
        self.count += 1;
        // NaN margins count as failures
        let margin = if margin.is_nan() { -1.0 } else { margin };
        if margin < self.worst {
            self.worst = margin;
            self.location = location;
        }
    }

    fn finish(self, name: &str, tol: f64) -> VerificationReport {
        let worst = if self.count == 0 { 0.0 } else { self.worst };
        VerificationReport {
            name: name.to_string(),
            passed: worst >= -tol,
            worst_margin: worst,
            worst_location: self.location,
            n_points_checked: self.count,
            tol,
        }
    }
}

/// `|v(x,t)| <= M` at every grid point.
pub fn verify_max_estimate(
    v_traj: &Trajectory,
    bound: &MaxEstimateBound,
    tol_rel: f64,
) -> VerificationReport {
    let mut tracker = MarginTracker::new();
    for (n, row) in v_traj.values.iter().enumerate() {
        let t = v_traj.grid.t(n);
        for (j, v) in row.iter().enumerate() {
            tracker.push(
                relative_margin(bound.value, v.abs()),
                Location {
                    t,
                    x: Some(v_traj.grid.x(j)),
                },
            );
        }
    }
    tracker.finish("max_estimate", tol_rel)
}

fn verify_profile_bound(
    name: &str,
    traj: &Trajectory,
    tol_rel: f64,
    bound: impl Fn(f64) -> f64,
) -> VerificationReport {
    let mut tracker = MarginTracker::new();
    for (t, norm) in l2_profile(traj) {
        tracker.push(relative_margin(bound(t), norm), Location { t, x: None });
    }
    tracker.finish(name, tol_rel)
}

/// `||w(t)|| <= phi_l2 exp(-lambda t) + Gamma(s_f) + Gamma_0(s_0) + Gamma_1(s_1)`
/// at every stored level.
pub fn verify_w_l2(
    w_traj: &Trajectory,
    phi_l2: f64,
    lambda: f64,
    gains_tilde: &TildeGains,
    sups_tilde: [f64; 3],
    tol_rel: f64,
) -> VerificationReport {
    let offset = gains_tilde.gamma.value(sups_tilde[0])
        + gains_tilde.gamma0.value(sups_tilde[1])
        + gains_tilde.gamma1.value(sups_tilde[2]);
    verify_profile_bound("w_l2", w_traj, tol_rel, |t| {
        phi_l2 * (-lambda * t).exp() + offset
    })
}

/// `||u(t)||` against the certified bound at every stored level.
pub fn verify_iss(
    u_traj: &Trajectory,
    gains: &GainSet,
    phi_l2: f64,
    sups: [f64; 3],
    tol_rel: f64,
) -> VerificationReport {
    verify_profile_bound("iss", u_traj, tol_rel, |t| {
        gains.bound(phi_l2, sups[0], sups[1], sups[2], t)
    })
}

/// `max |u - exp(bx/2a)(v + w)| <= tol_abs`; the margin is
/// `(tol_abs - error) / tol_abs`. `tol_abs` defaults to `100 (dx^2 + dt)`.
pub fn verify_superposition(
    u_traj: &Trajectory,
    v_traj: &Trajectory,
    w_traj: &Trajectory,
    a: f64,
    b: f64,
    tol_abs: Option<f64>,
) -> Result<VerificationReport> {
    if u_traj.grid != v_traj.grid || u_traj.grid != w_traj.grid {
        return Err(Error::GridMismatch(format!(
            "u {:?}, v {:?}, w {:?}",
            u_traj.grid, v_traj.grid, w_traj.grid
        )));
    }
    let grid = u_traj.grid;
    let tol = tol_abs.unwrap_or(100.0 * (grid.dx() * grid.dx() + grid.dt()));
    let rebuilt = untransform(&combine(v_traj, w_traj)?, a, b);
    let mut tracker = MarginTracker::new();
    for (n, (ur, rr)) in u_traj.values.iter().zip(&rebuilt.values).enumerate() {
        let t = grid.t(n);
        for (j, (x, y)) in ur.iter().zip(rr).enumerate() {
            tracker.push(
                (tol - (x - y).abs()) / tol,
                Location {
                    t,
                    x: Some(grid.x(j)),
                },
            );
        }
    }
    Ok(tracker.finish("superposition", 0.0))
}

/// Checks `u(c)^2 <= 2/(q-p) ||u||^2 + (q-p) ||u_x||^2` for a profile sampled
/// uniformly on `[p, q]`, with `1e-8` slack.
pub fn agmon_check(values: &[f64], p: f64, q: f64, point: f64) -> Result<bool> {
    let n = values.len();
    if n < 5 {
        return Err(Error::InvalidInput(format!(
            "need at least 5 samples, got {n}"
        )));
    }
    if !(p < q) || !(p..=q).contains(&point) {
        return Err(Error::InvalidInput(format!(
            "point {point} must lie in [{p}, {q}] with p < q"
        )));
    }
    let len = q - p;
    let h = len / (n - 1) as f64;
    let squares: Vec<f64> = values.iter().map(|v| v * v).collect();
    let slopes = derivative(values, h);
    let slope_squares: Vec<f64> = slopes.iter().map(|v| v * v).collect();
    let rhs = 2.0 / len * simpson(&squares, h) + len * simpson(&slope_squares, h);
    let at = cubic_interpolate(values, (point - p) / h);
    Ok(at * at <= rhs + 1e-8)
}

/// Local cubic Lagrange interpolation at fractional index `s`.
fn cubic_interpolate(values: &[f64], s: f64) -> f64 {
    let n = values.len();
    let base = (s.floor() as isize - 1).clamp(0, n as isize - 4) as usize;
    let mut total = 0.0;
    for i in 0..4 {
        let xi = (base + i) as f64;
        let mut weight = 1.0;
        for k in 0..4 {
            if k != i {
                let xk = (base + k) as f64;
                weight *= (s - xk) / (xi - xk);
            }
        }
        total += weight * values[base + i];
    }
    total
}

/// Error of one grid in a convergence study.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergencePoint {
    pub dx: f64,
    pub error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergenceStudy {
    pub points: Vec<ConvergencePoint>,
    /// `log(e_k / e_{k+1}) / log(dx_k / dx_{k+1})` for successive grids.
    pub orders: Vec<f64>,
}

/// Sine-mode amplitudes of an exact-solution scenario, if `spec` is one:
/// linear, unforced, homogeneous Dirichlet, `phi = exp(bx/2a) sum A_k sin(k pi x)`.
fn sine_mode_oracle(spec: &ProblemSpec) -> Result<Vec<(f64, u32)>> {
    let reject = |why: &str| Err(Error::NoOracle(why.to_string()));
    if !spec.h.is_zero() || !spec.f.is_zero() || !spec.d0.is_zero() || !spec.d1.is_zero() {
        return reject("oracle needs h = 0, f = 0 and zero boundary data");
    }
    if spec.beta0 != 0.0 || spec.beta1 != 0.0 {
        return reject("oracle needs Dirichlet conditions at both ends");
    }
    let shift = spec.b / (2.0 * spec.a);
    if (spec.phi.weight_rate - shift).abs() > 1e-14 * (1.0 + shift.abs()) {
        return reject("initial profile must carry the weight exp(bx/2a)");
    }
    let mut modes = Vec::new();
    for term in &spec.phi.terms {
        match term {
            ProfileTerm::SineMode { amplitude, mode } => modes.push((*amplitude, *mode)),
            ProfileTerm::Polynomial { .. } => {
                return reject("initial profile must be a sum of sine modes")
            }
        }
    }
    Ok(modes)
}

/// Maximum nodal error against the exact solution at the final time, per grid.
pub fn convergence_study(
    spec: &ProblemSpec,
    grids: &[Grid],
    opts: &SolverOptions,
) -> Result<ConvergenceStudy> {
    let modes = sine_mode_oracle(spec)?;
    let shift = spec.b / (2.0 * spec.a);
    let c_tilde = spec.c_tilde();
    let exact = |x: f64, t: f64| -> f64 {
        let sum: f64 = modes
            .iter()
            .map(|&(amp, k)| {
                let kpi = k as f64 * std::f64::consts::PI;
                amp * (-(spec.a * kpi * kpi + c_tilde) * t).exp() * (kpi * x).sin()
            })
            .sum();
        (shift * x).exp() * sum
    };
    let mut points = Vec::with_capacity(grids.len());
    for grid in grids {
        let traj = simulate_full(spec, grid, opts)?;
        let t = grid.t_final;
        let error = traj
            .row(grid.nt)
            .iter()
            .enumerate()
            .map(|(j, v)| (v - exact(grid.x(j), t)).abs())
            .fold(0.0, f64::max);
        points.push(ConvergencePoint {
            dx: grid.dx(),
            error,
        });
    }
    let orders = points
        .windows(2)
        .map(|w| (w[0].error / w[1].error).ln() / (w[0].dx / w[1].dx).ln())
        .collect();
    Ok(ConvergenceStudy { points, orders })
}

/// Sampling ranges for random scenarios.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScenarioFamilies {
    /// Log-uniform amplitude range (a random sign is applied).
    pub amplitude: (f64, f64),
    pub omega: (f64, f64),
    pub rate: (f64, f64),
    /// Number of sine modes in the initial profile.
    pub phi_modes: u32,
    /// Largest spatial mode of the in-domain disturbance.
    pub f_modes: u32,
    pub include_f: bool,
    pub include_d0: bool,
    pub include_d1: bool,
    pub include_phi: bool,
}

impl Default for ScenarioFamilies {
    fn default() -> Self {
        ScenarioFamilies {
            amplitude: (1e-2, 10.0),
            omega: (0.5, 10.0),
            rate: (0.5, 5.0),
            phi_modes: 3,
            f_modes: 3,
            include_f: true,
            include_d0: true,
            include_d1: true,
            include_phi: true,
        }
    }
}

impl ScenarioFamilies {
    /// Only the initial profile is drawn.
    pub fn undisturbed() -> Self {
        ScenarioFamilies {
            include_f: false,
            include_d0: false,
            include_d1: false,
            ..Default::default()
        }
    }

    fn validate(&self) -> Result<()> {
        let positive_range = |(lo, hi): (f64, f64)| lo > 0.0 && lo <= hi && hi.is_finite();
        if !positive_range(self.amplitude) || !positive_range(self.omega) || !positive_range(self.rate)
        {
            return Err(Error::InvalidInput(
                "scenario ranges must satisfy 0 < lo <= hi < inf".into(),
            ));
        }
        if self.f_modes == 0 {
            return Err(Error::InvalidInput("f_modes must be >= 1".into()));
        }
        Ok(())
    }
}

/// Randomized disturbances around a fixed system.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSuite {
    pub base_spec: ProblemSpec,
    pub n_trials: usize,
    pub seed: u64,
    #[serde(default)]
    pub families: ScenarioFamilies,
    /// Splitting-constant overrides applied to every trial.
    #[serde(default)]
    pub overrides: SplitOverrides,
}

fn draw_amplitude(rng: &mut ChaCha8Rng, (lo, hi): (f64, f64)) -> f64 {
    let magnitude = (rng.gen_range(lo.ln()..=hi.ln())).exp();
    if rng.gen_bool(0.5) {
        magnitude
    } else {
        -magnitude
    }
}

/// `A sin(omega t)` or `A (1 - exp(-rate t))`; both vanish at `t = 0`.
fn draw_signal(rng: &mut ChaCha8Rng, fam: &ScenarioFamilies) -> Signal {
    let amplitude = draw_amplitude(rng, fam.amplitude);
    if rng.gen_bool(0.5) {
        Signal::new(vec![SignalTerm::Sinusoid {
            amplitude,
            omega: rng.gen_range(fam.omega.0..=fam.omega.1),
            phase: 0.0,
        }])
    } else {
        Signal::new(vec![
            SignalTerm::Constant { amplitude },
            SignalTerm::DecayingExp {
                amplitude: -amplitude,
                rate: rng.gen_range(fam.rate.0..=fam.rate.1),
            },
        ])
    }
}

impl ScenarioSuite {
    /// Random stream of one trial, independent of every other trial.
    fn rng(&self, index: usize) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index as u64);
        rng
    }

    /// The problem of trial `index`: `base_spec` with drawn `f`, `d0`, `d1`, `phi`.
    pub fn scenario(&self, index: usize) -> ProblemSpec {
        let fam = &self.families;
        let mut rng = self.rng(index);
        let mut spec = self.base_spec.clone();
        // draw every component so each family flag leaves the others unchanged
        let phi_terms: Vec<ProfileTerm> = (1..=fam.phi_modes)
            .map(|mode| ProfileTerm::SineMode {
                amplitude: draw_amplitude(&mut rng, fam.amplitude),
                mode,
            })
            .collect();
        let f_mode = rng.gen_range(1..=fam.f_modes);
        let f_signal = draw_signal(&mut rng, fam);
        let d0 = draw_signal(&mut rng, fam);
        let d1 = draw_signal(&mut rng, fam);
        spec.phi = if fam.include_phi {
            InitialProfile {
                terms: phi_terms,
                weight_rate: 0.0,
            }
        } else {
            InitialProfile::zero()
        };
        spec.f = if fam.include_f {
            Field {
                terms: vec![FieldTerm {
                    space: SpaceFactor::Sine { mode: f_mode },
                    time: f_signal,
                }],
                weight_rate: 0.0,
            }
        } else {
            Field::zero()
        };
        spec.d0 = if fam.include_d0 { d0 } else { Signal::zero() };
        spec.d1 = if fam.include_d1 { d1 } else { Signal::zero() };
        spec
    }
}

/// Sups of `(f, d0, d1)` over the horizon of `grid`.
pub fn disturbance_sups(f: &Field, d0: &Signal, d1: &Signal, grid: &Grid) -> [f64; 3] {
    [
        sup_norm_field(f, grid.t_final, grid.nx, grid.nt),
        sup_norm_signal(d0, grid.t_final, grid.nt + 1),
        sup_norm_signal(d1, grid.t_final, grid.nt + 1),
    ]
}

/// Every check of one trial.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrialReport {
    pub index: usize,
    pub passed: bool,
    pub sups: [f64; 3],
    pub phi_l2: f64,
    pub checks: Vec<VerificationReport>,
}

/// Per-check aggregate across trials.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckSummary {
    pub name: String,
    pub n_trials: usize,
    pub n_failed: usize,
    pub worst_margin: f64,
    pub worst_trial: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteReport {
    pub passed: bool,
    pub n_trials: usize,
    pub seed: u64,
    pub tol_rel: f64,
    pub grid: Grid,
    pub summary: Vec<CheckSummary>,
    pub trials: Vec<TrialReport>,
}

impl SuiteReport {
    pub fn summary_for(&self, name: &str) -> Option<&CheckSummary> {
        self.summary.iter().find(|s| s.name == name)
    }
}

fn run_trial(
    suite: &ScenarioSuite,
    index: usize,
    grid: &Grid,
    opts: &SolverOptions,
    tol_rel: f64,
) -> Result<TrialReport> {
    let spec = suite.scenario(index);
    let cert = certify(&spec, Some(&suite.overrides))?;
    let u = simulate_full(&spec, grid, opts)?;
    let phi_l2 = l2_profile(&u)[0].1;
    let sups = disturbance_sups(&spec.f, &spec.d0, &spec.d1, grid);
    let mut checks = vec![verify_iss(&u, &cert.gains, phi_l2, sups, tol_rel)];

    let disturbed = sups.iter().any(|&s| s > 0.0);
    if disturbed {
        let t = &cert.tspec;
        let f_tilde = t.tilde_field(&spec.f);
        let d0_tilde = t.tilde_signal(0, &spec.d0);
        let d1_tilde = t.tilde_signal(1, &spec.d1);
        let sups_tilde = disturbance_sups(&f_tilde, &d0_tilde, &d1_tilde, grid);
        let v = simulate_v(t, &cert.params, &f_tilde, &d0_tilde, &d1_tilde, grid, opts)?;
        let bound = max_estimate_bound(t, &cert.params, sups_tilde[0], sups_tilde[1], sups_tilde[2])?;
        checks.push(verify_max_estimate(&v, &bound, tol_rel));
        let phi_tilde = t.tilde_profile(&spec.phi);
        let w = simulate_w(t, &cert.params, &spec.h, &v, &phi_tilde, grid, opts)?;
        let phi_tilde_l2 = l2_profile(&w)[0].1;
        checks.push(verify_w_l2(
            &w,
            phi_tilde_l2,
            cert.params.lambda,
            &cert.tilde,
            sups_tilde,
            tol_rel,
        ));
        checks.push(verify_superposition(&u, &v, &w, spec.a, spec.b, None)?);
    }
    Ok(TrialReport {
        index,
        passed: checks.iter().all(|c| c.passed),
        sups,
        phi_l2,
        checks,
    })
}

/// Runs every trial of `suite`. `threads = Some(0)` runs sequentially,
/// `Some(n)` uses a pool of `n` workers, `None` the global pool. The report
/// does not depend on the thread count.
pub fn run_scenario_suite(
    suite: &ScenarioSuite,
    grid: &Grid,
    opts: &SolverOptions,
    tol_rel: f64,
    threads: Option<usize>,
) -> Result<SuiteReport> {
    grid.validate()?;
    suite.families.validate()?;
    if !(tol_rel >= 0.0) {
        return Err(Error::InvalidInput(format!("tol_rel = {tol_rel} must be >= 0")));
    }
    if suite.n_trials > 0 {
        // structural failures are properties of the base system, not of a trial
        certify(&suite.base_spec, Some(&suite.overrides))?;
    }
    let run = |i: usize| run_trial(suite, i, grid, opts, tol_rel);
    let outcomes: Vec<Result<TrialReport>> = match threads {
        Some(0) => (0..suite.n_trials).map(run).collect(),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::InvalidInput(format!("thread pool: {e}")))?
            .install(|| (0..suite.n_trials).into_par_iter().map(run).collect()),
        None => (0..suite.n_trials).into_par_iter().map(run).collect(),
    };
    let mut trials = Vec::with_capacity(outcomes.len());
    for (index, outcome) in outcomes.into_iter().enumerate() {
        match outcome {
            Ok(report) => trials.push(report),
            Err(source) => {
                return Err(Error::Trial {
                    index,
                    source: Box::new(source),
                })
            }
        }
    }
    let mut summary: Vec<CheckSummary> = Vec::new();
    for trial in &trials {
        for check in &trial.checks {
            let entry = match summary.iter_mut().position(|s| s.name == check.name) {
                Some(i) => &mut summary[i],
                None => {
                    summary.push(CheckSummary {
                        name: check.name.clone(),
                        n_trials: 0,
                        n_failed: 0,
                        worst_margin: f64::INFINITY,
                        worst_trial: None,
                    });
                    summary.last_mut().expect("just pushed")
                }
            };
            entry.n_trials += 1;
            if !check.passed {
                entry.n_failed += 1;
            }
            if check.worst_margin < entry.worst_margin {
                entry.worst_margin = check.worst_margin;
                entry.worst_trial = Some(trial.index);
            }
        }
    }
    Ok(SuiteReport {
        passed: trials.iter().all(|t| t.passed),
        n_trials: suite.n_trials,
        seed: suite.seed,
        tol_rel,
        grid: *grid,
        summary,
        trials,
    })
}
