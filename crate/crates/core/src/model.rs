//! Problem description for
//!
//! ```text
//! u_t - a u_xx + b u_x + c u + h(u) = f(x, t)     in (0,1) x (0,inf)
//! alpha0 u(0,t) - beta0 u_x(0,t) = d0(t)
//! alpha1 u(1,t) + beta1 u_x(1,t) = d1(t)
//! u(x,0) = phi(x)
//! ```
//!
//! together with the structural, nonlinearity and compatibility checks that
//! must hold before a certificate can be issued. Failed checks are report
//! entries, never errors.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Evaluates `sum coeffs[i] x^i` by Horner's rule.
pub(crate) fn horner(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

fn horner_derivative(coeffs: &[f64], x: f64) -> f64 {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .rev()
        .fold(0.0, |acc, (i, &c)| acc * x + i as f64 * c)
}

/// The nonlinear reaction term `h`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Nonlinearity {
    /// `h = 0`.
    #[default]
    Zero,
    /// `h(s) = sum_i mu_i s^(2i+1)`.
    PolynomialOdd { coeffs: Vec<f64> },
    /// `h(s) = c2 s^3 + c3 s^5` (generalized Ginzburg-Landau).
    CubicQuintic { c2: f64, c3: f64 },
}

impl Nonlinearity {
    pub fn value(&self, s: f64) -> f64 {
        match self {
            Nonlinearity::Zero => 0.0,
            // s * P(s^2) keeps h exactly odd in floating point.
            Nonlinearity::PolynomialOdd { coeffs } => s * horner(coeffs, s * s),
            Nonlinearity::CubicQuintic { c2, c3 } => {
                let s2 = s * s;
                s * s2 * (c2 + c3 * s2)
            }
        }
    }

    pub fn derivative(&self, s: f64) -> f64 {
        match self {
            Nonlinearity::Zero => 0.0,
            Nonlinearity::PolynomialOdd { coeffs } => {
                let s2 = s * s;
                coeffs
                    .iter()
                    .enumerate()
                    .rev()
                    .fold(0.0, |acc, (i, &mu)| acc * s2 + (2 * i + 1) as f64 * mu)
            }
            Nonlinearity::CubicQuintic { c2, c3 } => {
                let s2 = s * s;
                s2 * (3.0 * c2 + 5.0 * c3 * s2)
            }
        }
    }

    /// True when `h` vanishes identically.
    pub fn is_zero(&self) -> bool {
        match self {
            Nonlinearity::Zero => true,
            Nonlinearity::PolynomialOdd { coeffs } => coeffs.iter().all(|&c| c == 0.0),
            Nonlinearity::CubicQuintic { .. } => false,
        }
    }

    /// Upper bound of `|h'|` on `[-m, m]`.
    pub fn max_abs_derivative(&self, m: f64) -> f64 {
        match self {
            Nonlinearity::Zero => 0.0,
            Nonlinearity::PolynomialOdd { coeffs } => {
                let m2 = m * m;
                coeffs
                    .iter()
                    .enumerate()
                    .rev()
                    .fold(0.0, |acc, (i, &mu)| acc * m2 + (2 * i + 1) as f64 * mu.abs())
            }
            Nonlinearity::CubicQuintic { c2, c3 } => {
                let m2 = m * m;
                m2 * (3.0 * c2.abs() + 5.0 * c3.abs() * m2)
            }
        }
    }
}

/// One additive term of a scalar time signal.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SignalTerm {
    Constant {
        amplitude: f64,
    },
    /// `A sin(omega t + phase)`.
    Sinusoid {
        amplitude: f64,
        omega: f64,
        #[serde(default)]
        phase: f64,
    },
    /// `A exp(-rate t)`.
    DecayingExp {
        amplitude: f64,
        rate: f64,
    },
}

impl SignalTerm {
    pub fn value(&self, t: f64) -> f64 {
        match *self {
            SignalTerm::Constant { amplitude } => amplitude,
            SignalTerm::Sinusoid {
                amplitude,
                omega,
                phase,
            } => amplitude * (omega * t + phase).sin(),
            SignalTerm::DecayingExp { amplitude, rate } => amplitude * (-rate * t).exp(),
        }
    }

    pub fn derivative(&self, t: f64) -> f64 {
        match *self {
            SignalTerm::Constant { .. } => 0.0,
            SignalTerm::Sinusoid {
                amplitude,
                omega,
                phase,
            } => amplitude * omega * (omega * t + phase).cos(),
            SignalTerm::DecayingExp { amplitude, rate } => -rate * amplitude * (-rate * t).exp(),
        }
    }

    fn scaled(&self, k: f64) -> SignalTerm {
        let mut out = self.clone();
        match &mut out {
            SignalTerm::Constant { amplitude }
            | SignalTerm::Sinusoid { amplitude, .. }
            | SignalTerm::DecayingExp { amplitude, .. } => *amplitude *= k,
        }
        out
    }

    fn is_finite(&self) -> bool {
        match *self {
            SignalTerm::Constant { amplitude } => amplitude.is_finite(),
            SignalTerm::Sinusoid {
                amplitude,
                omega,
                phase,
            } => amplitude.is_finite() && omega.is_finite() && phase.is_finite(),
            SignalTerm::DecayingExp { amplitude, rate } => amplitude.is_finite() && rate.is_finite(),
        }
    }
}

/// A boundary or time-factor signal `t -> d(t)`; the empty signal is zero.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct Signal {
    #[serde(default)]
    pub terms: Vec<SignalTerm>,
}

impl Signal {
    pub fn new(terms: Vec<SignalTerm>) -> Self {
        Signal { terms }
    }

    pub fn zero() -> Self {
        Signal::default()
    }

    pub fn constant(amplitude: f64) -> Self {
        Signal::new(vec![SignalTerm::Constant { amplitude }])
    }

    pub fn value(&self, t: f64) -> f64 {
        self.terms.iter().map(|term| term.value(t)).sum()
    }

    pub fn derivative(&self, t: f64) -> f64 {
        self.terms.iter().map(|term| term.derivative(t)).sum()
    }

    pub fn scaled(&self, k: f64) -> Signal {
        Signal::new(self.terms.iter().map(|term| term.scaled(k)).collect())
    }

    /// True when every amplitude is zero (or there are no terms).
    pub fn is_zero(&self) -> bool {
        self.terms.iter().all(|term| match *term {
            SignalTerm::Constant { amplitude }
            | SignalTerm::Sinusoid { amplitude, .. }
            | SignalTerm::DecayingExp { amplitude, .. } => amplitude == 0.0,
        })
    }

    /// Largest angular frequency among sinusoid terms.
    pub fn max_omega(&self) -> f64 {
        self.terms
            .iter()
            .map(|term| match *term {
                SignalTerm::Sinusoid { omega, .. } => omega.abs(),
                _ => 0.0,
            })
            .fold(0.0, f64::max)
    }

    /// Largest exponential rate among decaying terms.
    pub fn max_rate(&self) -> f64 {
        self.terms
            .iter()
            .map(|term| match *term {
                SignalTerm::DecayingExp { rate, .. } => rate.abs(),
                _ => 0.0,
            })
            .fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.terms.iter().all(SignalTerm::is_finite)
    }
}

/// Spatial factor `X(x)` of a separable field term.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SpaceFactor {
    /// `sum coeffs[i] x^i`.
    Polynomial { coeffs: Vec<f64> },
    /// `sin(mode * pi * x)`.
    Sine { mode: u32 },
}

impl SpaceFactor {
    pub fn value(&self, x: f64) -> f64 {
        match self {
            SpaceFactor::Polynomial { coeffs } => horner(coeffs, x),
            SpaceFactor::Sine { mode } => (*mode as f64 * PI * x).sin(),
        }
    }
}

/// One separable term `X(x) T(t)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldTerm {
    pub space: SpaceFactor,
    pub time: Signal,
}

/// In-domain disturbance `f(x,t) = exp(weight_rate x) sum_k X_k(x) T_k(t)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct Field {
    #[serde(default)]
    pub terms: Vec<FieldTerm>,
    #[serde(default)]
    pub weight_rate: f64,
}

impl Field {
    pub fn zero() -> Self {
        Field::default()
    }

    /// A field constant in space and time.
    pub fn constant(value: f64) -> Self {
        Field {
            terms: vec![FieldTerm {
                space: SpaceFactor::Polynomial { coeffs: vec![1.0] },
                time: Signal::constant(value),
            }],
            weight_rate: 0.0,
        }
    }

    pub fn value(&self, x: f64, t: f64) -> f64 {
        let sum: f64 = self
            .terms
            .iter()
            .map(|term| term.space.value(x) * term.time.value(t))
            .sum();
        if self.weight_rate == 0.0 {
            sum
        } else {
            (self.weight_rate * x).exp() * sum
        }
    }

    /// Multiplies the field by `exp(rate x)`.
    pub fn weighted(&self, rate: f64) -> Field {
        Field {
            terms: self.terms.clone(),
            weight_rate: self.weight_rate + rate,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.iter().all(|term| {
            term.time.is_zero()
                || matches!(&term.space, SpaceFactor::Polynomial { coeffs } if coeffs.iter().all(|&c| c == 0.0))
        })
    }

    pub fn max_omega(&self) -> f64 {
        self.terms.iter().map(|t| t.time.max_omega()).fold(0.0, f64::max)
    }

    pub fn max_rate(&self) -> f64 {
        self.terms.iter().map(|t| t.time.max_rate()).fold(0.0, f64::max)
    }

    pub fn max_mode(&self) -> u32 {
        self.terms
            .iter()
            .map(|t| match t.space {
                SpaceFactor::Sine { mode } => mode,
                SpaceFactor::Polynomial { .. } => 0,
            })
            .max()
            .unwrap_or(0)
    }

    pub fn is_finite(&self) -> bool {
        self.weight_rate.is_finite()
            && self.terms.iter().all(|term| {
                term.time.is_finite()
                    && match &term.space {
                        SpaceFactor::Polynomial { coeffs } => coeffs.iter().all(|c| c.is_finite()),
                        SpaceFactor::Sine { .. } => true,
                    }
            })
    }
}

/// One additive term of the initial profile.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProfileTerm {
    Polynomial { coeffs: Vec<f64> },
    /// `A sin(mode * pi * x)`.
    SineMode { amplitude: f64, mode: u32 },
}

/// Initial profile `phi(x) = exp(weight_rate x) sum_k term_k(x)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct InitialProfile {
    #[serde(default)]
    pub terms: Vec<ProfileTerm>,
    #[serde(default)]
    pub weight_rate: f64,
}

impl InitialProfile {
    pub fn zero() -> Self {
        InitialProfile::default()
    }

    pub fn sine_mode(amplitude: f64, mode: u32) -> Self {
        InitialProfile {
            terms: vec![ProfileTerm::SineMode { amplitude, mode }],
            weight_rate: 0.0,
        }
    }

    fn raw(&self, x: f64) -> (f64, f64) {
        self.terms.iter().fold((0.0, 0.0), |(v, d), term| match term {
            ProfileTerm::Polynomial { coeffs } => {
                (v + horner(coeffs, x), d + horner_derivative(coeffs, x))
            }
            ProfileTerm::SineMode { amplitude, mode } => {
                let k = *mode as f64 * PI;
                (v + amplitude * (k * x).sin(), d + amplitude * k * (k * x).cos())
            }
        })
    }

    pub fn value(&self, x: f64) -> f64 {
        let (v, _) = self.raw(x);
        (self.weight_rate * x).exp() * v
    }

    pub fn derivative(&self, x: f64) -> f64 {
        let (v, d) = self.raw(x);
        (self.weight_rate * x).exp() * (self.weight_rate * v + d)
    }

    /// Multiplies the profile by `exp(rate x)`.
    pub fn weighted(&self, rate: f64) -> InitialProfile {
        InitialProfile {
            terms: self.terms.clone(),
            weight_rate: self.weight_rate + rate,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.weight_rate.is_finite()
            && self.terms.iter().all(|term| match term {
                ProfileTerm::Polynomial { coeffs } => coeffs.iter().all(|c| c.is_finite()),
                ProfileTerm::SineMode { amplitude, .. } => amplitude.is_finite(),
            })
    }
}

/// Full problem data.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProblemSpec {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub alpha0: f64,
    pub beta0: f64,
    pub alpha1: f64,
    pub beta1: f64,
    pub h: Nonlinearity,
    pub f: Field,
    pub d0: Signal,
    pub d1: Signal,
    pub phi: InitialProfile,
}

impl ProblemSpec {
    /// Linear problem with the given coefficients and zero data.
    pub fn linear(a: f64, b: f64, c: f64, boundary: [(f64, f64); 2]) -> Self {
        ProblemSpec {
            a,
            b,
            c,
            alpha0: boundary[0].0,
            beta0: boundary[0].1,
            alpha1: boundary[1].0,
            beta1: boundary[1].1,
            h: Nonlinearity::Zero,
            f: Field::zero(),
            d0: Signal::zero(),
            d1: Signal::zero(),
            phi: InitialProfile::zero(),
        }
    }

    /// `b^2/(4a) + c`.
    pub fn c_tilde(&self) -> f64 {
        self.b * self.b / (4.0 * self.a) + self.c
    }

    pub fn boundary(&self, side: usize) -> (f64, f64) {
        if side == 0 {
            (self.alpha0, self.beta0)
        } else {
            (self.alpha1, self.beta1)
        }
    }

    pub fn boundary_signal(&self, side: usize) -> &Signal {
        if side == 0 {
            &self.d0
        } else {
            &self.d1
        }
    }

    pub fn is_finite(&self) -> bool {
        [
            self.a,
            self.b,
            self.c,
            self.alpha0,
            self.beta0,
            self.alpha1,
            self.beta1,
        ]
        .iter()
        .all(|v| v.is_finite())
            && self.f.is_finite()
            && self.d0.is_finite()
            && self.d1.is_finite()
            && self.phi.is_finite()
    }

    /// Hard preconditions shared by the transform and the solvers.
    pub fn ensure_admissible(&self) -> Result<()> {
        if !self.is_finite() {
            return Err(Error::InvalidInput("problem data must be finite".into()));
        }
        if self.a <= 0.0 {
            return Err(Error::InvalidInput(format!("a = {} must be > 0", self.a)));
        }
        for side in 0..2 {
            let (alpha, beta) = self.boundary(side);
            if alpha < 0.0 || beta < 0.0 || alpha + beta <= 0.0 {
                return Err(Error::InvalidInput(format!(
                    "boundary {side}: need alpha, beta >= 0 and alpha + beta > 0 (got {alpha}, {beta})"
                )));
            }
        }
        Ok(())
    }
}

/// Where a check attained its worst residual.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WorstPoint {
    pub location: f64,
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckEntry {
    pub name: String,
    pub passed: bool,
    pub detail: String,
    pub worst_point: Option<WorstPoint>,
}

impl CheckEntry {
    pub fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        CheckEntry {
            name: name.into(),
            passed,
            detail: detail.into(),
            worst_point: None,
        }
    }

    fn with_worst(mut self, worst: Option<WorstPoint>) -> Self {
        self.worst_point = worst;
        self
    }
}

/// Outcome of a batch of named checks; passes iff every entry passes.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ValidationReport {
    pub passed: bool,
    pub checks: Vec<CheckEntry>,
}

impl ValidationReport {
    pub fn from_checks(checks: Vec<CheckEntry>) -> Self {
        ValidationReport {
            passed: checks.iter().all(|c| c.passed),
            checks,
        }
    }

    pub fn merge(reports: impl IntoIterator<Item = ValidationReport>) -> Self {
        ValidationReport::from_checks(reports.into_iter().flat_map(|r| r.checks).collect())
    }

    pub fn get(&self, name: &str) -> Option<&CheckEntry> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckEntry> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

/// Numerical tolerances used by the checks.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    /// Sign conditions on `h`.
    pub sign: f64,
    /// Residual of the Dirichlet compatibility ODE.
    pub compatibility_trace: f64,
    /// Residual of the Robin initial compatibility.
    pub compatibility_initial: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            sign: 1e-12,
            compatibility_trace: 1e-8,
            compatibility_initial: 1e-10,
        }
    }
}

/// Structural conditions on the coefficients, evaluated in transformed
/// coordinates.
pub fn validate_structure(spec: &ProblemSpec) -> ValidationReport {
    let mut checks = Vec::new();
    let finite = spec.is_finite();
    checks.push(CheckEntry::new("finite_data", finite, "all coefficients finite"));
    checks.push(CheckEntry::new(
        "diffusion_positive",
        spec.a > 0.0,
        format!("a = {}", spec.a),
    ));
    let c_tilde = if spec.a > 0.0 { spec.c_tilde() } else { f64::NAN };
    checks.push(CheckEntry::new(
        "reduced_reaction_positive",
        c_tilde > 0.0,
        format!("c_tilde = b^2/4a + c = {c_tilde}"),
    ));

    for side in 0..2 {
        let (alpha, beta) = spec.boundary(side);
        checks.push(CheckEntry::new(
            format!("boundary{side}.coefficients"),
            alpha >= 0.0 && beta >= 0.0 && alpha + beta > 0.0,
            format!("alpha{side} = {alpha}, beta{side} = {beta}"),
        ));

        let shift = if spec.a > 0.0 { spec.b / (2.0 * spec.a) } else { f64::NAN };
        let alpha_tilde = if side == 0 {
            alpha - shift * beta
        } else {
            alpha + shift * beta
        };
        let triggered = beta > 0.0 && alpha_tilde <= 0.0;
        if triggered {
            let ratio = alpha_tilde / beta;
            checks.push(CheckEntry::new(
                format!("boundary{side}.decay_margin"),
                -4.0 * ratio < c_tilde,
                format!("-4 alpha_tilde/beta = {} < c_tilde = {c_tilde}", -4.0 * ratio),
            ));
            checks.push(CheckEntry::new(
                format!("boundary{side}.diffusion_bound"),
                -ratio <= spec.a,
                format!("-alpha_tilde/beta = {} <= a = {}", -ratio, spec.a),
            ));
        } else {
            let why = format!(
                "not triggered (beta{side} = {beta}, alpha_tilde{side} = {alpha_tilde})"
            );
            checks.push(CheckEntry::new(format!("boundary{side}.decay_margin"), true, why.clone()));
            checks.push(CheckEntry::new(format!("boundary{side}.diffusion_bound"), true, why));
        }
    }
    ValidationReport::from_checks(checks)
}

/// Sign conditions on `h`. Built-in kinds also get the conclusive
/// coefficient-sign check; all kinds are additionally sampled on
/// `[-s_max, s_max]`.
pub fn check_nonlinearity(
    h: &Nonlinearity,
    c_tilde: f64,
    s_max: f64,
    n_samples: usize,
) -> ValidationReport {
    check_nonlinearity_with(h, c_tilde, s_max, n_samples, &Tolerances::default())
}

pub fn check_nonlinearity_with(
    h: &Nonlinearity,
    c_tilde: f64,
    s_max: f64,
    n_samples: usize,
    tol: &Tolerances,
) -> ValidationReport {
    let mut checks = Vec::new();
    if !(s_max > 0.0) || n_samples < 3 {
        checks.push(CheckEntry::new(
            "arguments",
            false,
            format!("need s_max > 0 and n_samples >= 3 (got {s_max}, {n_samples})"),
        ));
        return ValidationReport::from_checks(checks);
    }

    let h0 = h.value(0.0);
    checks.push(CheckEntry::new("h_zero_at_origin", h0 == 0.0, format!("h(0) = {h0}")));

    // Worst residual over samples: (min value, location).
    let mut even = (f64::INFINITY, 0.0);
    let mut neg_slope = (f64::INFINITY, 0.0);
    let mut pos_slope = (f64::INFINITY, 0.0);
    let step = 2.0 * s_max / (n_samples - 1) as f64;
    for i in 0..n_samples {
        let s = -s_max + i as f64 * step;
        let r = h.value(s.abs()) + h.value(s);
        if r < even.0 {
            even = (r, s);
        }
        if s <= 0.0 {
            let r = c_tilde + 2.0 * h.derivative(s);
            if r < neg_slope.0 {
                neg_slope = (r, s);
            }
        } else {
            let r = h.derivative(s);
            if r < pos_slope.0 {
                pos_slope = (r, s);
            }
        }
    }
    let sampled = |name: &str, worst: (f64, f64), text: &str| {
        let passed = !worst.0.is_finite() || worst.0 >= -tol.sign;
        CheckEntry::new(name, passed, format!("{text}; min residual {}", worst.0)).with_worst(
            worst.0.is_finite().then_some(WorstPoint {
                location: worst.1,
                residual: worst.0,
            }),
        )
    };
    checks.push(sampled("h_even_part_nonnegative", even, "h(|s|) + h(s) >= 0"));
    checks.push(sampled(
        "h_slope_negative_axis",
        neg_slope,
        "c_tilde + 2 h'(s) >= 0 for s <= 0",
    ));
    checks.push(sampled("h_slope_positive_axis", pos_slope, "h'(s) >= 0 for s > 0"));

    match h {
        Nonlinearity::Zero => checks.push(CheckEntry::new("analytic", true, "h = 0")),
        Nonlinearity::PolynomialOdd { coeffs } => {
            let ok = coeffs.iter().all(|&mu| mu >= 0.0);
            checks.push(CheckEntry::new(
                "analytic",
                ok,
                format!("odd polynomial coefficients nonnegative: {coeffs:?}"),
            ));
        }
        Nonlinearity::CubicQuintic { c2, c3 } => checks.push(CheckEntry::new(
            "analytic",
            *c2 > 0.0 && *c3 > 0.0,
            format!("c2 = {c2} > 0, c3 = {c3} > 0"),
        )),
    }
    ValidationReport::from_checks(checks)
}

/// Compatibility of boundary data with the equation (Dirichlet sides) and
/// with the initial profile (Robin sides).
pub fn check_compatibility(spec: &ProblemSpec, t_samples: usize, t_max: f64) -> ValidationReport {
    check_compatibility_with(spec, t_samples, t_max, &Tolerances::default())
}

pub fn check_compatibility_with(
    spec: &ProblemSpec,
    t_samples: usize,
    t_max: f64,
    tol: &Tolerances,
) -> ValidationReport {
    let mut checks = Vec::new();
    if t_samples < 2 || !(t_max > 0.0) {
        checks.push(CheckEntry::new(
            "arguments",
            false,
            format!("need t_samples >= 2 and t_max > 0 (got {t_samples}, {t_max})"),
        ));
        return ValidationReport::from_checks(checks);
    }
    for side in 0..2 {
        let (alpha, beta) = spec.boundary(side);
        let d = spec.boundary_signal(side);
        let x = side as f64;
        if beta == 0.0 {
            // d' + c d + alpha h(d/alpha) = alpha f(i, t) on (0, t_max]
            let mut worst = WorstPoint {
                location: 0.0,
                residual: 0.0,
            };
            for k in 1..=t_samples {
                let t = t_max * k as f64 / t_samples as f64;
                let dt = d.value(t);
                let r = d.derivative(t) + spec.c * dt + alpha * spec.h.value(dt / alpha)
                    - alpha * spec.f.value(x, t);
                if r.abs() > worst.residual.abs() || r.is_nan() {
                    worst = WorstPoint {
                        location: t,
                        residual: r,
                    };
                }
            }
            checks.push(
                CheckEntry::new(
                    format!("boundary{side}.trace_equation"),
                    worst.residual.abs() <= tol.compatibility_trace,
                    format!("max |residual| = {}", worst.residual.abs()),
                )
                .with_worst(Some(worst)),
            );
        } else {
            let sign = if side == 0 { 1.0 } else { -1.0 };
            let r = alpha * spec.phi.value(x) - sign * beta * spec.phi.derivative(x);
            checks.push(
                CheckEntry::new(
                    format!("boundary{side}.initial_trace"),
                    r.abs() <= tol.compatibility_initial,
                    format!("alpha phi - (-1)^i beta phi_x = {r}"),
                )
                .with_worst(Some(WorstPoint {
                    location: x,
                    residual: r,
                })),
            );
            let d0 = d.value(0.0);
            checks.push(CheckEntry::new(
                format!("boundary{side}.initial_data_zero"),
                d0.abs() <= tol.compatibility_initial,
                format!("d{side}(0) = {d0}"),
            ));
        }
    }
    ValidationReport::from_checks(checks)
}
