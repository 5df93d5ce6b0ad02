//! Input-to-state stability certificates for one-dimensional parabolic
//! equations with Robin boundary disturbances, together with a reference
//! finite-difference solver and numerical verification of the certificates.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod model;
pub mod presets;
pub mod quadrature;
pub mod tridiag;
pub mod solver;
pub mod transform;
pub mod verify;

pub use error::{Error, Result};
pub use model::{
    check_compatibility, check_compatibility_with, check_nonlinearity, check_nonlinearity_with,
    validate_structure, CheckEntry, Field, FieldTerm, InitialProfile, Nonlinearity, ProblemSpec,
    ProfileTerm, Signal, SignalTerm, SpaceFactor, Tolerances, ValidationReport, WorstPoint,
};
pub use transform::{
    certify, choose_split_params, closed_form_gains_ginzburg_landau,
    closed_form_gains_reaction_diffusion, compute_gain_set, compute_tilde_gains,
    evaluate_iss_bound, max_estimate_bound, split_feasibility_report, transform_spec,
    Certificate, GainSet, KFunction, MaxEstimateBound, SplitOverrides, SplitParams, TildeGains,
    TransformedSpec,
};
pub use solver::{
    combine, l2_profile, simulate_full, simulate_v, simulate_w, sup_norm_field, sup_norm_signal,
    transform_trajectory, untransform, Grid, Scheme, SolverOptions, Trajectory, VariableTag,
};
pub use verify::{
    agmon_check, convergence_study, disturbance_sups, relative_margin, run_scenario_suite,
    verify_iss, verify_max_estimate, verify_superposition, verify_w_l2, CheckSummary,
    ConvergencePoint, ConvergenceStudy, Location, ScenarioFamilies, ScenarioSuite, SuiteReport,
    TrialReport, VerificationReport,
};
