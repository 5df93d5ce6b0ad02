//! JSON run configuration.

use std::path::Path;

use iss_certify::{
    presets, Field, Grid, InitialProfile, Nonlinearity, ProblemSpec, ProfileTerm, Signal,
    SplitOverrides, Tolerances,
};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Coefficients {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Boundary {
    pub alpha0: f64,
    pub beta0: f64,
    pub alpha1: f64,
    pub beta1: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ToleranceConfig {
    /// Relative slack of the verification checks.
    pub tol_rel: f64,
    pub sign: f64,
    pub compatibility_trace: f64,
    pub compatibility_initial: f64,
    /// Half-width of the sampling interval for the sign conditions on `h`.
    pub s_max: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        let t = Tolerances::default();
        ToleranceConfig {
            tol_rel: 1e-2,
            sign: t.sign,
            compatibility_trace: t.compatibility_trace,
            compatibility_initial: t.compatibility_initial,
            s_max: 10.0,
        }
    }
}

impl ToleranceConfig {
    pub fn model(&self) -> Tolerances {
        Tolerances {
            sign: self.sign,
            compatibility_trace: self.compatibility_trace,
            compatibility_initial: self.compatibility_initial,
        }
    }
}

/// A complete run description.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub coefficients: Coefficients,
    pub boundary: Boundary,
    #[serde(default = "zero_nonlinearity")]
    pub nonlinearity: Nonlinearity,
    #[serde(default)]
    pub f: Field,
    #[serde(default)]
    pub d0: Signal,
    #[serde(default)]
    pub d1: Signal,
    #[serde(default)]
    pub phi: InitialProfile,
    #[serde(default)]
    pub overrides: SplitOverrides,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<Grid>,
    #[serde(default)]
    pub tolerances: ToleranceConfig,
}

fn zero_nonlinearity() -> Nonlinearity {
    Nonlinearity::Zero
}

fn finite(field: &str, value: f64) -> Result<(), CliError> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(CliError::semantic(field, format!("{field} must be finite")))
    }
}

impl Config {
    /// Semantic checks that the schema cannot express.
    pub fn validate(&self) -> Result<(), CliError> {
        let c = &self.coefficients;
        finite("coefficients.a", c.a)?;
        finite("coefficients.b", c.b)?;
        finite("coefficients.c", c.c)?;
        if c.a <= 0.0 {
            return Err(CliError::semantic("coefficients.a", "coefficients.a must be > 0"));
        }
        let b = &self.boundary;
        for (name, value) in [
            ("boundary.alpha0", b.alpha0),
            ("boundary.beta0", b.beta0),
            ("boundary.alpha1", b.alpha1),
            ("boundary.beta1", b.beta1),
        ] {
            finite(name, value)?;
            if value < 0.0 {
                return Err(CliError::semantic(name, format!("{name} must be >= 0")));
            }
        }
        if b.alpha0 + b.beta0 <= 0.0 {
            return Err(CliError::semantic(
                "boundary.alpha0",
                "boundary.alpha0 + boundary.beta0 must be > 0",
            ));
        }
        if b.alpha1 + b.beta1 <= 0.0 {
            return Err(CliError::semantic(
                "boundary.alpha1",
                "boundary.alpha1 + boundary.beta1 must be > 0",
            ));
        }
        if !self.f.is_finite() {
            return Err(CliError::semantic("f", "f must have finite parameters"));
        }
        for (name, s) in [("d0", &self.d0), ("d1", &self.d1)] {
            if !s.is_finite() {
                return Err(CliError::semantic(name, format!("{name} must have finite parameters")));
            }
        }
        if !self.phi.is_finite() {
            return Err(CliError::semantic("phi", "phi must have finite parameters"));
        }
        if let Some(grid) = &self.grid {
            if grid.nx < 3 {
                return Err(CliError::semantic("grid.nx", "grid.nx must be >= 3"));
            }
            if grid.nt < 2 {
                return Err(CliError::semantic("grid.nt", "grid.nt must be >= 2"));
            }
            if !(grid.t_final > 0.0 && grid.t_final.is_finite()) {
                return Err(CliError::semantic("grid.t_final", "grid.t_final must be > 0"));
            }
        }
        let t = &self.tolerances;
        for (name, value) in [
            ("tolerances.tol_rel", t.tol_rel),
            ("tolerances.sign", t.sign),
            ("tolerances.compatibility_trace", t.compatibility_trace),
            ("tolerances.compatibility_initial", t.compatibility_initial),
        ] {
            if !(value >= 0.0 && value.is_finite()) {
                return Err(CliError::semantic(name, format!("{name} must be >= 0")));
            }
        }
        if !(t.s_max > 0.0 && t.s_max.is_finite()) {
            return Err(CliError::semantic("tolerances.s_max", "tolerances.s_max must be > 0"));
        }
        Ok(())
    }

    pub fn spec(&self) -> ProblemSpec {
        let c = &self.coefficients;
        let b = &self.boundary;
        ProblemSpec {
            a: c.a,
            b: c.b,
            c: c.c,
            alpha0: b.alpha0,
            beta0: b.beta0,
            alpha1: b.alpha1,
            beta1: b.beta1,
            h: self.nonlinearity.clone(),
            f: self.f.clone(),
            d0: self.d0.clone(),
            d1: self.d1.clone(),
            phi: self.phi.clone(),
        }
    }

    /// Config for an existing problem with default settings.
    pub fn from_spec(spec: &ProblemSpec, grid: Option<Grid>) -> Config {
        Config {
            coefficients: Coefficients {
                a: spec.a,
                b: spec.b,
                c: spec.c,
            },
            boundary: Boundary {
                alpha0: spec.alpha0,
                beta0: spec.beta0,
                alpha1: spec.alpha1,
                beta1: spec.beta1,
            },
            nonlinearity: spec.h.clone(),
            f: spec.f.clone(),
            d0: spec.d0.clone(),
            d1: spec.d1.clone(),
            phi: spec.phi.clone(),
            overrides: SplitOverrides::default(),
            grid,
            tolerances: ToleranceConfig::default(),
        }
    }
}

/// Pointer in RFC 6901 form for a deserialization path.
fn json_pointer(path: &serde_path_to_error::Path) -> String {
    use serde_path_to_error::Segment;
    let mut out = String::new();
    for segment in path.iter() {
        out.push('/');
        match segment {
            Segment::Seq { index } => out.push_str(&index.to_string()),
            Segment::Map { key } => out.push_str(&key.replace('~', "~0").replace('/', "~1")),
            Segment::Enum { variant } => out.push_str(variant),
            Segment::Unknown => out.push('?'),
        }
    }
    out
}

/// Parses and validates a configuration document.
pub fn parse_config(text: &str) -> Result<Config, CliError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let config: Config = serde_path_to_error::deserialize(de).map_err(|err| {
        let pointer = json_pointer(err.path());
        CliError::Parse {
            pointer,
            message: err.inner().to_string(),
        }
    })?;
    config.validate()?;
    Ok(config)
}

pub fn load_config(path: &Path) -> Result<Config, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_config(&text)
}

/// Reaction-diffusion preset with `u(0,t) = d0`, `u_x(1,t) = -K1 u(1,t) + d1`.
pub fn reaction_diffusion_config(a: f64, b: f64, c: f64, k1: f64) -> Config {
    let mut spec = presets::reaction_diffusion(a, b, c, k1);
    // phi(0) = 0 and phi'(1) + K1 phi(1) = 0
    spec.phi = polynomial_profile(vec![0.0, 1.0, -(1.0 + k1) / (2.0 + k1)]);
    Config::from_spec(&spec, Some(default_grid()))
}

/// Ginzburg-Landau preset with `u(0,t) = d0`, `u_x(1,t) = d1`.
pub fn ginzburg_landau_config(a: f64, b: f64, c1: f64, c2: f64, c3: f64) -> Config {
    let mut spec = presets::ginzburg_landau(a, b, c1, c2, c3);
    // phi(0) = 0 and phi'(1) = 0
    spec.phi = polynomial_profile(vec![0.0, 2.0, -1.0]);
    Config::from_spec(&spec, Some(default_grid()))
}

fn polynomial_profile(coeffs: Vec<f64>) -> InitialProfile {
    InitialProfile {
        terms: vec![ProfileTerm::Polynomial { coeffs }],
        weight_rate: 0.0,
    }
}

fn default_grid() -> Grid {
    Grid {
        nx: 201,
        nt: 4000,
        t_final: 2.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preset_maps_gain_to_robin_coefficient() {
        let text = serde_json::to_string(&reaction_diffusion_config(1.0, 0.0, 1.0, 2.5)).unwrap();
        let config = parse_config(&text).unwrap();
        assert_eq!(config.boundary.alpha1, 2.5);
        assert_eq!(config.boundary.beta1, 1.0);
    }

    #[test]
    fn semantic_error_names_field() {
        let mut config = reaction_diffusion_config(1.0, 0.0, 1.0, 1.0);
        config.coefficients.a = -1.0;
        let text = serde_json::to_string(&config).unwrap();
        let err = parse_config(&text).unwrap_err();
        assert_eq!(err.to_string(), "coefficients.a must be > 0");
    }

    #[test]
    fn unknown_key_is_rejected_with_location() {
        let text = r#"{"coefficients": {"a": 1, "b": 0, "c": 1, "gamma": 2},
                       "boundary": {"alpha0": 1, "beta0": 0, "alpha1": 1, "beta1": 1}}"#;
        match parse_config(text).unwrap_err() {
            CliError::Parse { pointer, message } => {
                assert!(message.contains("gamma"), "{message}");
                assert!(pointer.starts_with("/coefficients"), "{pointer}");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn type_error_points_into_nested_signal() {
        let text = r#"{"coefficients": {"a": 1, "b": 0, "c": 1},
                       "boundary": {"alpha0": 1, "beta0": 0, "alpha1": 1, "beta1": 1},
                       "d1": {"terms": [{"kind": "constant", "amplitude": "x"}]}}"#;
        match parse_config(text).unwrap_err() {
            CliError::Parse { pointer, .. } => assert_eq!(pointer, "/d1/terms/0"),
            other => panic!("unexpected {other:?}"),
        }
    }
}
