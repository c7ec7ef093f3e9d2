//! Scenario files: TOML with `[params]`, `[data]`, `[forcing]`, `[grid]` and
//! `[task]` sections. Unknown keys are rejected.

use serde::{Deserialize, Serialize};

use biwave_core::{
    make_params, BiwaveParams, ElasticParams, EvalGrid, ForcingField, ForcingTerm, InitialData,
    ScalarField,
};

use crate::error::CliError;
use crate::expr::{parse_field, parse_number, parse_time, parse_trig};

/// A number written either as a TOML float/integer or as a string such as `"pi/2"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Num {
    Value(f64),
    Text(String),
}

impl Num {
    pub fn resolve(&self, path: &str) -> Result<f64, CliError> {
        match self {
            Num::Value(v) if v.is_finite() => Ok(*v),
            Num::Value(v) => Err(CliError::validation(path, format!("non-finite number {v}"))),
            Num::Text(s) => parse_number(s).map_err(|e| CliError::validation(path, e.0)),
        }
    }
}

impl From<f64> for Num {
    fn from(v: f64) -> Self {
        Num::Value(v)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<Num>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<Num>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<Num>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<Num>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho: Option<Num>,
    pub n: usize,
    /// Wavevectors `k` in field expressions mean `base_frequency · k`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base_frequency: Option<Num>,
}

fn zero_expr() -> String {
    "zero".into()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Data {
    #[serde(default = "zero_expr")]
    pub phi0: String,
    #[serde(default = "zero_expr")]
    pub phi1: String,
    #[serde(default = "zero_expr")]
    pub phi2: String,
    #[serde(default = "zero_expr")]
    pub phi3: String,
}

impl Default for Data {
    fn default() -> Self {
        Self {
            phi0: zero_expr(),
            phi1: zero_expr(),
            phi2: zero_expr(),
            phi3: zero_expr(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ForcingTermSpec {
    pub space: String,
    pub time: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Forcing {
    pub terms: Vec<ForcingTermSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<Num>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Axis {
    Range { from: Num, to: Num, count: usize },
    Values { values: Vec<Num> },
}

impl Axis {
    pub fn resolve(&self, path: &str) -> Result<Vec<f64>, CliError> {
        match self {
            Axis::Range { from, to, count } => {
                let lo = from.resolve(&format!("{path}.from"))?;
                let hi = to.resolve(&format!("{path}.to"))?;
                if *count == 0 {
                    return Err(CliError::validation(path, "count must be positive"));
                }
                Ok(biwave_core::linspace(lo, hi, *count))
            }
            Axis::Values { values } => values
                .iter()
                .enumerate()
                .map(|(i, v)| v.resolve(&format!("{path}.values[{i}]")))
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    pub x: Vec<Axis>,
    pub t: Axis,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TaskKind {
    Solve,
    OracleCompare,
    Residual,
    InitialCheck,
    ElastokitDemo,
}

impl TaskKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            TaskKind::Solve => "solve",
            TaskKind::OracleCompare => "oracle-compare",
            TaskKind::Residual => "residual",
            TaskKind::InitialCheck => "initial-check",
            TaskKind::ElastokitDemo => "elastokit-demo",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Task {
    pub kind: TaskKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quad_order: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sphere_level: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h_rel: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_eps: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau_order: Option<usize>,
    /// Stencil step of the residual checks.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub residual_h: Option<f64>,
    /// Spacing of the initial-condition probe stencils.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probe_eps: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub params: Params,
    #[serde(default)]
    pub data: Data,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub forcing: Option<Forcing>,
    pub grid: Grid,
    pub task: Task,
}

/// Parse and validate scenario text.
pub fn parse_scenario(text: &str) -> Result<Scenario, CliError> {
    if text.trim().is_empty() {
        return Err(CliError::Parse("empty scenario".into()));
    }
    let scenario: Scenario = toml::from_str(text).map_err(|e| CliError::Parse(e.to_string()))?;
    scenario.validate()?;
    Ok(scenario)
}

/// TOML text that [`parse_scenario`] maps back to an equal scenario.
pub fn serialize_scenario(s: &Scenario) -> Result<String, CliError> {
    toml::to_string(s).map_err(|e| CliError::Parse(e.to_string()))
}

/// Parameters and fields resolved to library types.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub params: BiwaveParams,
    pub elastic: Option<ElasticParams>,
    pub data: InitialData,
    pub forcing: Option<ForcingField>,
    pub grid: EvalGrid,
}

impl Scenario {
    pub fn dim(&self) -> usize {
        self.params.n
    }

    fn base_frequency(&self) -> Result<f64, CliError> {
        match &self.params.base_frequency {
            None => Ok(1.0),
            Some(v) => {
                let w = v.resolve("params.base_frequency")?;
                if w > 0.0 {
                    Ok(w)
                } else {
                    Err(CliError::validation("params.base_frequency", "must be positive"))
                }
            }
        }
    }

    fn resolve_params(&self) -> Result<(BiwaveParams, Option<ElasticParams>), CliError> {
        let p = &self.params;
        let lame = [&p.lambda, &p.mu, &p.rho];
        let speeds = [&p.a, &p.b];
        let any_lame = lame.iter().any(|v| v.is_some());
        let any_speed = speeds.iter().any(|v| v.is_some());
        if any_lame && any_speed {
            return Err(CliError::validation("params", "give either (a, b) or (lambda, mu, rho), not both"));
        }
        let wrap = |path: &str, e: biwave_core::BiwaveError| CliError::Library {
            path: path.into(),
            source: e,
        };
        if any_lame {
            let get = |v: &Option<Num>, name: &str| -> Result<f64, CliError> {
                v.as_ref()
                    .ok_or_else(|| CliError::validation(&format!("params.{name}"), "missing"))?
                    .resolve(&format!("params.{name}"))
            };
            let ep = ElasticParams::new(get(&p.lambda, "lambda")?, get(&p.mu, "mu")?, get(&p.rho, "rho")?)
                .map_err(|e| wrap("params", e))?;
            let bp = biwave_core::lame_to_speeds(&ep, p.n).map_err(|e| wrap("params", e))?;
            return Ok((bp, Some(ep)));
        }
        let a = p
            .a
            .as_ref()
            .ok_or_else(|| CliError::validation("params.a", "missing"))?
            .resolve("params.a")?;
        let b = p
            .b
            .as_ref()
            .ok_or_else(|| CliError::validation("params.b", "missing"))?
            .resolve("params.b")?;
        let bp = make_params(a, b, p.n).map_err(|e| wrap("params", e))?;
        Ok((bp, None))
    }

    fn resolve_data(&self) -> Result<InitialData, CliError> {
        let n = self.dim();
        let omega = self.base_frequency()?;
        let fields = [&self.data.phi0, &self.data.phi1, &self.data.phi2, &self.data.phi3];
        let mut parsed: Vec<ScalarField> = Vec::with_capacity(4);
        for (j, text) in fields.iter().enumerate() {
            let f = parse_field(text, n, omega).map_err(|e| CliError::validation(&format!("data.phi{j}"), e.0))?;
            parsed.push(f);
        }
        let [a, b, c, d]: [ScalarField; 4] = parsed.try_into().expect("four fields");
        InitialData::new(a, b, c, d).map_err(|e| CliError::Library {
            path: "data".into(),
            source: e,
        })
    }

    fn resolve_forcing(&self) -> Result<Option<ForcingField>, CliError> {
        let Some(f) = &self.forcing else {
            return Ok(None);
        };
        let n = self.dim();
        let omega = self.base_frequency()?;
        let mut terms = Vec::with_capacity(f.terms.len());
        for (i, term) in f.terms.iter().enumerate() {
            let space = parse_trig(&term.space, n, omega)
                .map_err(|e| CliError::validation(&format!("forcing.terms[{i}].space"), e.0))?;
            let time =
                parse_time(&term.time).map_err(|e| CliError::validation(&format!("forcing.terms[{i}].time"), e.0))?;
            terms.push(ForcingTerm { space, time });
        }
        let mut field = ForcingField::separable(n, terms).map_err(|e| CliError::Library {
            path: "forcing".into(),
            source: e,
        })?;
        if let Some(h) = &f.horizon {
            field = field.with_horizon(h.resolve("forcing.horizon")?);
        }
        Ok(Some(field))
    }

    fn resolve_grid(&self) -> Result<EvalGrid, CliError> {
        if self.grid.x.len() != self.dim() {
            return Err(CliError::validation(
                "grid.x",
                format!("expected {} axes, got {}", self.dim(), self.grid.x.len()),
            ));
        }
        let axes = self
            .grid
            .x
            .iter()
            .enumerate()
            .map(|(i, a)| a.resolve(&format!("grid.x[{i}]")))
            .collect::<Result<Vec<_>, _>>()?;
        let times = self.grid.t.resolve("grid.t")?;
        if let Some(t) = times.iter().find(|t| **t < 0.0) {
            return Err(CliError::validation("grid.t", format!("negative time {t}")));
        }
        EvalGrid::new(axes, times).map_err(|e| CliError::Library {
            path: "grid".into(),
            source: e,
        })
    }

    pub fn resolve(&self) -> Result<Resolved, CliError> {
        let (params, elastic) = self.resolve_params()?;
        Ok(Resolved {
            params,
            elastic,
            data: self.resolve_data()?,
            forcing: self.resolve_forcing()?,
            grid: self.resolve_grid()?,
        })
    }

    /// Check every section against the declared dimension and task.
    pub fn validate(&self) -> Result<(), CliError> {
        let r = self.resolve()?;
        let t = &self.task;
        if let Some(tol) = t.tolerance {
            if !(tol.is_finite() && tol > 0.0) {
                return Err(CliError::validation("task.tolerance", "must be positive"));
            }
        }
        for (name, v) in [("task.h_rel", t.h_rel), ("task.t_eps", t.t_eps), ("task.residual_h", t.residual_h), ("task.probe_eps", t.probe_eps)] {
            if let Some(v) = v {
                if !(v.is_finite() && v > 0.0) {
                    return Err(CliError::validation(name, "must be positive"));
                }
            }
        }
        match t.kind {
            TaskKind::ElastokitDemo if r.elastic.is_none() => Err(CliError::validation(
                "params",
                "elastokit-demo needs lambda, mu and rho",
            )),
            TaskKind::OracleCompare => {
                r.data.to_trig().map_err(|e| CliError::Library {
                    path: "data".into(),
                    source: e,
                })?;
                Ok(())
            }
            _ => Ok(()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const WORKED_EXAMPLE: &str = r#"
[params]
a = 1.0
b = 0.5
n = 1

[data]
phi1 = "sin(x1)"
phi2 = "cos(x1)"

[grid]
x = [{ values = [0] }]
t = { values = ["pi"] }

[task]
kind = "solve"
"#;

    #[test]
    fn parses_worked_example() {
        let s = parse_scenario(WORKED_EXAMPLE).unwrap();
        assert_eq!(s.params.n, 1);
        assert_eq!(s.data.phi0, "zero");
        let r = s.resolve().unwrap();
        assert_eq!((r.params.a(), r.params.b()), (1.0, 0.5));
        assert!((r.data.phi(1).value(&[0.4]) - 0.4f64.sin()).abs() < 1e-15);
        assert_eq!(r.grid.times(), &[std::f64::consts::PI]);
    }

    #[test]
    fn rejects_empty_and_unknown() {
        assert!(matches!(parse_scenario(""), Err(CliError::Parse(_))));
        let bad = WORKED_EXAMPLE.replace("kind = \"solve\"", "kind = \"solve\"\nfoo = 1");
        let err = parse_scenario(&bad).unwrap_err();
        assert!(matches!(err, CliError::Parse(_)));
        assert!(err.to_string().contains("foo"));
    }

    #[test]
    fn degenerate_speeds_reported() {
        let bad = WORKED_EXAMPLE.replace("b = 0.5", "b = 1.0");
        let err = parse_scenario(&bad).unwrap_err();
        assert_eq!(err.code(), "degenerate-speeds");
    }

    #[test]
    fn field_errors_carry_paths() {
        let bad = WORKED_EXAMPLE.replace("sin(x1)", "sin(x2)");
        let err = parse_scenario(&bad).unwrap_err();
        assert!(err.to_string().contains("data.phi1"), "{err}");
    }

    #[test]
    fn round_trip() {
        let s = parse_scenario(WORKED_EXAMPLE).unwrap();
        let text = serialize_scenario(&s).unwrap();
        assert_eq!(parse_scenario(&text).unwrap(), s);
    }
}
