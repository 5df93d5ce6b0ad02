//! The two worked example systems.

use crate::model::{Nonlinearity, ProblemSpec};

/// `u_t = a u_xx - b u_x - c u` with `u(0,t) = d0`, `u_x(1,t) = -K1 u(1,t) + d1`.
pub fn reaction_diffusion(a: f64, b: f64, c: f64, k1: f64) -> ProblemSpec {
    ProblemSpec::linear(a, b, c, [(1.0, 0.0), (k1, 1.0)])
}

/// `u_t - a u_xx + b u_x + c1 u + c2 u^3 + c3 u^5 = f` with
/// `u(0,t) = d0`, `u_x(1,t) = d1`.
pub fn ginzburg_landau(a: f64, b: f64, c1: f64, c2: f64, c3: f64) -> ProblemSpec {
    let mut spec = ProblemSpec::linear(a, b, c1, [(1.0, 0.0), (0.0, 1.0)]);
    spec.h = Nonlinearity::CubicQuintic { c2, c3 };
    spec
}
