//! Run configuration: a strict JSON document describing one batch job.
//!
//! Unknown keys are rejected everywhere — typos in scientific parameter
//! names should fail loudly, not silently fall back to defaults.

use crate::fock::StateSpec;
use crate::observables::QGridBounds;
use crate::solvers::SolverKind;
use crate::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::path::PathBuf;

pub const DEFAULT_RK4_STEPS_PER_UNIT_TIME: u64 = 10_000;
/// Default pairwise-deviation threshold for `compare`.
pub const DEFAULT_COMPARE_THRESHOLD: f64 = 1e-6;
/// Default reconstruction threshold for `kraus-check`.
pub const DEFAULT_KRAUS_CHECK_THRESHOLD: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

/// Validated run description, ready for the runner.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub dimension: usize,
    pub chi: f64,
    pub gamma: f64,
    pub times: Vec<f64>,
    pub initial_state: StateSpec,
    pub solvers: Vec<SolverKind>,
    pub rk4_steps_per_unit_time: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    pub format: OutputFormat,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub qgrid: Option<QGridBounds>,
    /// Reference for the fidelity column; defaults to the initial state.
    pub fidelity_reference: StateSpec,
    pub dump_density_matrices: bool,
}

impl RunConfig {
    /// Re-check the constraints that couple output format to other fields;
    /// needed after a CLI `--format`/`--out` override.
    pub fn validate_format_constraints(&self) -> Result<()> {
        if self.format == OutputFormat::Csv {
            if self.qgrid.is_some() {
                return Err(invalid("qgrid", "qgrid output requires `format: json`"));
            }
            if self.dump_density_matrices {
                return Err(invalid(
                    "dump_density_matrices",
                    "density-matrix dumps require `format: json`",
                ));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    dimension: usize,
    chi: f64,
    gamma: f64,
    times: Option<Vec<f64>>,
    t_max: Option<f64>,
    num_points: Option<usize>,
    initial_state: RawStateSpec,
    solvers: Option<Vec<SolverKind>>,
    rk4_steps_per_unit_time: Option<u64>,
    output: Option<PathBuf>,
    format: Option<OutputFormat>,
    qgrid: Option<QGridBounds>,
    fidelity_reference: Option<RawStateSpec>,
    dump_density_matrices: Option<bool>,
}

/// Complex amplitudes may be written as `[re, im]`, `{"re":…, "im":…}`, or a
/// bare real number.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(untagged)]
enum ComplexInput {
    Pair([f64; 2]),
    Parts { re: f64, im: f64 },
    Real(f64),
}

impl From<ComplexInput> for Complex64 {
    fn from(value: ComplexInput) -> Self {
        match value {
            ComplexInput::Pair([re, im]) => Complex64::new(re, im),
            ComplexInput::Parts { re, im } => Complex64::new(re, im),
            ComplexInput::Real(re) => Complex64::new(re, 0.0),
        }
    }
}

/// Strict mirror of [`StateSpec`]: every variant's required fields are
/// checked by hand so errors can name the offending key.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawStateSpec {
    #[serde(rename = "type")]
    kind: String,
    n: Option<usize>,
    alpha: Option<ComplexInput>,
    mean_n: Option<f64>,
    phase: Option<f64>,
}

fn invalid(field: &str, message: impl Into<String>) -> Error {
    Error::ConfigInvalid {
        field: field.to_string(),
        message: message.into(),
    }
}

impl RawStateSpec {
    fn into_spec(self, field: &str) -> Result<StateSpec> {
        let RawStateSpec {
            kind,
            n,
            alpha,
            mean_n,
            phase,
        } = self;
        let forbid = |name: &str, present: bool| -> Result<()> {
            if present {
                Err(invalid(
                    field,
                    format!("`{name}` is not a parameter of state type `{kind}`"),
                ))
            } else {
                Ok(())
            }
        };
        match kind.as_str() {
            "fock" => {
                forbid("alpha", alpha.is_some())?;
                forbid("mean_n", mean_n.is_some())?;
                forbid("phase", phase.is_some())?;
                let n = n.ok_or_else(|| invalid(field, "fock state requires `n`"))?;
                Ok(StateSpec::Fock { n })
            }
            "coherent" => {
                forbid("n", n.is_some())?;
                forbid("mean_n", mean_n.is_some())?;
                forbid("phase", phase.is_some())?;
                let alpha =
                    alpha.ok_or_else(|| invalid(field, "coherent state requires `alpha`"))?;
                Ok(StateSpec::Coherent {
                    alpha: alpha.into(),
                })
            }
            "thermal" => {
                forbid("n", n.is_some())?;
                forbid("alpha", alpha.is_some())?;
                forbid("phase", phase.is_some())?;
                let mean_occupation =
                    mean_n.ok_or_else(|| invalid(field, "thermal state requires `mean_n`"))?;
                Ok(StateSpec::Thermal { mean_occupation })
            }
            "cat" => {
                forbid("n", n.is_some())?;
                forbid("mean_n", mean_n.is_some())?;
                let alpha = alpha.ok_or_else(|| invalid(field, "cat state requires `alpha`"))?;
                let phase = phase.ok_or_else(|| invalid(field, "cat state requires `phase`"))?;
                Ok(StateSpec::Cat {
                    alpha: alpha.into(),
                    phase,
                })
            }
            other => Err(invalid(
                field,
                format!("unknown state type `{other}` (expected fock, coherent, thermal, or cat)"),
            )),
        }
    }
}

fn validate_state(spec: StateSpec, dimension: usize, field: &str) -> Result<()> {
    match spec {
        StateSpec::Fock { n } => {
            if n >= dimension {
                return Err(invalid(
                    field,
                    format!("fock level {n} does not fit in dimension {dimension}"),
                ));
            }
        }
        StateSpec::Coherent { alpha } => {
            if !alpha.re.is_finite() || !alpha.im.is_finite() {
                return Err(invalid(field, "alpha must be finite"));
            }
        }
        StateSpec::Thermal { mean_occupation } => {
            if !mean_occupation.is_finite() || mean_occupation < 0.0 {
                return Err(invalid(field, "mean_n must be finite and >= 0"));
            }
        }
        StateSpec::Cat { alpha, phase } => {
            if !alpha.re.is_finite() || !alpha.im.is_finite() || !phase.is_finite() {
                return Err(invalid(field, "alpha and phase must be finite"));
            }
        }
    }
    Ok(())
}

/// Parse and validate a JSON run configuration.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let raw: RawConfig = serde_json::from_str(text)?;

    if raw.dimension < 2 {
        return Err(invalid("dimension", "must be at least 2"));
    }
    if !raw.chi.is_finite() {
        return Err(invalid("chi", "must be finite"));
    }
    if !raw.gamma.is_finite() || raw.gamma < 0.0 {
        return Err(invalid("gamma", "must be finite and >= 0"));
    }

    let times = match (raw.times, raw.t_max, raw.num_points) {
        (Some(times), None, None) => {
            if times.is_empty() {
                return Err(invalid("times", "must be non-empty"));
            }
            if times.iter().any(|t| !t.is_finite() || *t < 0.0) {
                return Err(invalid("times", "entries must be finite and >= 0"));
            }
            if times.windows(2).any(|w| w[0] >= w[1]) {
                return Err(invalid("times", "times not ascending"));
            }
            times
        }
        (None, Some(t_max), Some(num_points)) => {
            if !t_max.is_finite() || t_max <= 0.0 {
                return Err(invalid("t_max", "must be finite and > 0"));
            }
            if num_points < 2 {
                return Err(invalid("num_points", "grid needs at least 2 points"));
            }
            (0..num_points)
                .map(|i| t_max * i as f64 / (num_points - 1) as f64)
                .collect()
        }
        (None, None, None) => {
            return Err(invalid(
                "times",
                "either `times` or both `t_max` and `num_points` must be given",
            ));
        }
        _ => {
            return Err(invalid(
                "times",
                "give either an explicit `times` list or the (`t_max`, `num_points`) pair, not a mix",
            ));
        }
    };

    let initial_state = raw.initial_state.into_spec("initial_state")?;
    validate_state(initial_state, raw.dimension, "initial_state")?;

    let mut solvers = raw.solvers.unwrap_or_else(|| vec![SolverKind::Kraus]);
    if solvers.is_empty() {
        return Err(invalid("solvers", "at least one solver must be selected"));
    }
    let mut seen = Vec::new();
    solvers.retain(|s| {
        if seen.contains(s) {
            false
        } else {
            seen.push(*s);
            true
        }
    });

    let rk4_steps_per_unit_time = raw
        .rk4_steps_per_unit_time
        .unwrap_or(DEFAULT_RK4_STEPS_PER_UNIT_TIME);
    if rk4_steps_per_unit_time == 0 {
        return Err(invalid("rk4_steps_per_unit_time", "must be >= 1"));
    }

    let format = raw.format.unwrap_or(OutputFormat::Csv);

    let fidelity_reference = match raw.fidelity_reference {
        Some(raw_ref) => {
            let spec = raw_ref.into_spec("fidelity_reference")?;
            validate_state(spec, raw.dimension, "fidelity_reference")?;
            if !spec.is_pure() {
                return Err(invalid("fidelity_reference", "must be a pure state"));
            }
            spec
        }
        None => {
            if !initial_state.is_pure() {
                return Err(invalid(
                    "fidelity_reference",
                    "a mixed initial state needs an explicit pure fidelity_reference",
                ));
            }
            initial_state
        }
    };

    if let Some(qgrid) = &raw.qgrid {
        if qgrid.resolution < 2 {
            return Err(invalid("qgrid", "resolution must be >= 2"));
        }
        let finite = [qgrid.re_min, qgrid.re_max, qgrid.im_min, qgrid.im_max]
            .iter()
            .all(|v| v.is_finite());
        if !finite || qgrid.re_min >= qgrid.re_max || qgrid.im_min >= qgrid.im_max {
            return Err(invalid("qgrid", "bounds must satisfy min < max on both axes"));
        }
        if format == OutputFormat::Csv {
            return Err(invalid("qgrid", "qgrid output requires `format: json`"));
        }
    }

    let dump_density_matrices = raw.dump_density_matrices.unwrap_or(false);
    if dump_density_matrices && format == OutputFormat::Csv {
        return Err(invalid(
            "dump_density_matrices",
            "density-matrix dumps require `format: json`",
        ));
    }

    Ok(RunConfig {
        dimension: raw.dimension,
        chi: raw.chi,
        gamma: raw.gamma,
        times,
        initial_state,
        solvers,
        rk4_steps_per_unit_time,
        output: raw.output,
        format,
        qgrid: raw.qgrid,
        fidelity_reference,
        dump_density_matrices,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "dimension": 8,
        "chi": 0.0,
        "gamma": 0.5,
        "t_max": 2.0,
        "num_points": 5,
        "initial_state": {"type": "fock", "n": 1}
    }"#;

    #[test]
    fn minimal_config_fills_defaults() {
        let cfg = parse_config(MINIMAL).unwrap();
        assert_eq!(cfg.dimension, 8);
        assert_eq!(cfg.times, vec![0.0, 0.5, 1.0, 1.5, 2.0]);
        assert_eq!(cfg.solvers, vec![SolverKind::Kraus]);
        assert_eq!(cfg.rk4_steps_per_unit_time, 10_000);
        assert_eq!(cfg.format, OutputFormat::Csv);
        assert_eq!(cfg.initial_state, StateSpec::Fock { n: 1 });
        assert_eq!(cfg.fidelity_reference, StateSpec::Fock { n: 1 });
        assert!(!cfg.dump_density_matrices);
    }

    #[test]
    fn negative_gamma_names_the_field() {
        let text = MINIMAL.replace("\"gamma\": 0.5", "\"gamma\": -1.0");
        match parse_config(&text) {
            Err(Error::ConfigInvalid { field, .. }) => assert_eq!(field, "gamma"),
            other => panic!("expected gamma error, got {other:?}"),
        }
    }

    #[test]
    fn descending_times_are_rejected() {
        let text = r#"{
            "dimension": 4, "chi": 0.1, "gamma": 0.2,
            "times": [1.0, 0.5],
            "initial_state": {"type": "fock", "n": 0}
        }"#;
        match parse_config(text) {
            Err(Error::ConfigInvalid { field, message }) => {
                assert_eq!(field, "times");
                assert!(message.contains("not ascending"));
            }
            other => panic!("expected times error, got {other:?}"),
        }
    }

    #[test]
    fn unknown_top_level_key_is_rejected() {
        let text = MINIMAL.replace("\"chi\": 0.0", "\"chi\": 0.0, \"xi\": 1.0");
        assert!(matches!(parse_config(&text), Err(Error::ConfigParse(_))));
    }

    #[test]
    fn unknown_state_parameter_is_rejected() {
        let text =
            MINIMAL.replace("{\"type\": \"fock\", \"n\": 1}", "{\"type\": \"fock\", \"m\": 1}");
        assert!(parse_config(&text).is_err());
    }

    #[test]
    fn wrong_parameter_for_state_type_is_rejected() {
        let text = MINIMAL.replace(
            "{\"type\": \"fock\", \"n\": 1}",
            "{\"type\": \"thermal\", \"mean_n\": 0.5, \"phase\": 1.0}",
        );
        match parse_config(&text) {
            Err(Error::ConfigInvalid { field, message }) => {
                assert_eq!(field, "initial_state");
                assert!(message.contains("phase"));
            }
            other => panic!("expected state error, got {other:?}"),
        }
    }

    #[test]
    fn times_and_grid_are_mutually_exclusive() {
        let text = MINIMAL.replace("\"t_max\": 2.0", "\"times\": [0.5], \"t_max\": 2.0");
        assert!(parse_config(&text).is_err());
    }

    #[test]
    fn fock_level_must_fit_dimension() {
        let text = MINIMAL.replace("\"n\": 1", "\"n\": 8");
        match parse_config(&text) {
            Err(Error::ConfigInvalid { field, .. }) => assert_eq!(field, "initial_state"),
            other => panic!("expected initial_state error, got {other:?}"),
        }
    }

    #[test]
    fn thermal_initial_state_needs_pure_reference() {
        let text = MINIMAL.replace(
            "{\"type\": \"fock\", \"n\": 1}",
            "{\"type\": \"thermal\", \"mean_n\": 0.3}",
        );
        match parse_config(&text) {
            Err(Error::ConfigInvalid { field, .. }) => assert_eq!(field, "fidelity_reference"),
            other => panic!("expected fidelity_reference error, got {other:?}"),
        }
        let with_ref = text.replace(
            "\"initial_state\"",
            "\"fidelity_reference\": {\"type\": \"fock\", \"n\": 0}, \"initial_state\"",
        );
        let cfg = parse_config(&with_ref).unwrap();
        assert_eq!(cfg.fidelity_reference, StateSpec::Fock { n: 0 });
    }

    #[test]
    fn qgrid_requires_json_format() {
        let text = MINIMAL.replace(
            "\"chi\": 0.0",
            "\"chi\": 0.0, \"qgrid\": {\"re_min\": -2.0, \"re_max\": 2.0, \"im_min\": -2.0, \"im_max\": 2.0, \"resolution\": 21}",
        );
        match parse_config(&text) {
            Err(Error::ConfigInvalid { field, .. }) => assert_eq!(field, "qgrid"),
            other => panic!("expected qgrid error, got {other:?}"),
        }
        let ok = text.replace("\"chi\": 0.0,", "\"chi\": 0.0, \"format\": \"json\",");
        assert!(parse_config(&ok).is_ok());
    }

    #[test]
    fn coherent_alpha_accepts_re_im_object() {
        let text = MINIMAL.replace(
            "{\"type\": \"fock\", \"n\": 1}",
            "{\"type\": \"coherent\", \"alpha\": {\"re\": 1.5, \"im\": -0.5}}",
        );
        let cfg = parse_config(&text).unwrap();
        match cfg.initial_state {
            StateSpec::Coherent { alpha } => {
                assert_eq!(alpha.re, 1.5);
                assert_eq!(alpha.im, -0.5);
            }
            other => panic!("expected coherent, got {other:?}"),
        }
    }

    #[test]
    fn duplicate_solvers_collapse() {
        let text = MINIMAL.replace(
            "\"chi\": 0.0",
            "\"chi\": 0.0, \"solvers\": [\"kraus\", \"rk4\", \"kraus\"]",
        );
        let cfg = parse_config(&text).unwrap();
        assert_eq!(cfg.solvers, vec![SolverKind::Kraus, SolverKind::Rk4]);
    }

    #[test]
    fn parse_error_carries_line_info() {
        let err = parse_config("{\n  \"dimension\": 8,\n  oops\n}").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("line 3"), "message was: {msg}");
    }
}
