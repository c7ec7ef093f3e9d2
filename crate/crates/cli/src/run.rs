//! Task dispatch and output assembly.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::sync::{Arc, Mutex};

use rayon::prelude::*;
use serde::Serialize;

use biwave_core::elasto::ComponentFn;
use biwave_core::oracle::DEFAULT_ODE_TOL;
use biwave_core::verification::{DEFAULT_PROBE_EPS, DEFAULT_RESIDUAL_H};
use biwave_core::{
    biwave_residual, cks_displacement, forced_oracle_solution, initial_probe, navier_residual, oracle_solution,
    solve_homogeneous, solve_nonhomogeneous, DuhamelConfig, EvalGrid, InitialData, ResidualReport,
    SolutionEvaluator, SolverConfig, VectorFieldEvaluator,
};

use crate::error::CliError;
use crate::scenario::{Resolved, Scenario, TaskKind};

/// Command-line values that take precedence over the scenario file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub quad_order: Option<usize>,
    pub sphere_level: Option<usize>,
    pub h_rel: Option<f64>,
    pub tolerance: Option<f64>,
    pub threads: Option<usize>,
}

/// What a run produced. `csv` is present for `solve` and `oracle-compare`.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub csv: Option<String>,
    pub report: String,
    pub breach: bool,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        i32::from(self.breach)
    }
}

#[derive(Debug, Serialize)]
struct Report {
    task: &'static str,
    n: usize,
    a: f64,
    b: f64,
    provenance: &'static str,
    points: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    tolerance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    max_error: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    mean_error: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    residual: Option<ResidualJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    deviations: Option<Vec<f64>>,
    passed: bool,
}

#[derive(Debug, Serialize)]
struct ResidualJson {
    h: f64,
    max_abs: f64,
    scale: f64,
    relative: f64,
    probes: usize,
}

impl ResidualJson {
    fn new(r: &ResidualReport, h: f64) -> Self {
        Self {
            h,
            max_abs: r.max_abs,
            scale: r.scale,
            relative: r.relative,
            probes: r.probes,
        }
    }
}

/// Format like C's `%.17g`.
pub fn fmt_g17(v: f64) -> String {
    if v == 0.0 {
        return if v.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    if !v.is_finite() {
        return format!("{v}");
    }
    let sci = format!("{v:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..17).contains(&exp) {
        let decimals = (16 - exp).max(0) as usize;
        trim_zeros(format!("{v:.decimals$}"))
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mantissa.to_string()), exp.abs())
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

fn solver_config(s: &Scenario, ov: &Overrides) -> SolverConfig {
    let d = SolverConfig::default();
    SolverConfig {
        interval_order: ov.quad_order.or(s.task.quad_order).unwrap_or(d.interval_order),
        sphere_level: ov.sphere_level.or(s.task.sphere_level).or(d.sphere_level),
        h_rel: ov.h_rel.or(s.task.h_rel).unwrap_or(d.h_rel),
        t_eps: s.task.t_eps.unwrap_or(d.t_eps),
    }
}

fn build_solution(r: &Resolved, cfg: SolverConfig, tau_order: Option<usize>) -> Result<SolutionEvaluator, CliError> {
    let result = match &r.forcing {
        Some(f) => solve_nonhomogeneous(
            r.data.clone(),
            f.clone(),
            r.params,
            DuhamelConfig {
                tau_order,
                solver: cfg,
            },
        ),
        None => solve_homogeneous(r.data.clone(), r.params, cfg),
    };
    result.map_err(|e| CliError::library("solver", e))
}

fn pool(threads: Option<usize>) -> Result<rayon::ThreadPool, CliError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Unsupported(format!("thread pool: {e}")))
}

/// A grid point and the values evaluated there.
type Row = (Vec<f64>, f64, Vec<f64>);

/// Evaluate every evaluator at every grid point; rows keep grid order.
fn evaluate_grid(
    evaluators: &[&SolutionEvaluator],
    grid: &EvalGrid,
    threads: Option<usize>,
) -> Result<Vec<Row>, CliError> {
    let points = grid.points();
    pool(threads)?.install(|| {
        points
            .into_par_iter()
            .map(|(x, t)| {
                let values = evaluators
                    .iter()
                    .map(|u| u.eval(&x, t))
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|e| CliError::library(&format!("evaluation at x = {x:?}, t = {t}"), e))?;
                Ok((x, t, values))
            })
            .collect()
    })
}

fn csv_table(n: usize, extra: &[&str], rows: &[Row]) -> String {
    let mut out = String::new();
    let mut header: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
    header.push("t".into());
    header.extend(extra.iter().map(|s| s.to_string()));
    out.push_str(&header.join(","));
    out.push('\n');
    for (x, t, values) in rows {
        let cells: Vec<String> = x.iter().chain(std::iter::once(t)).chain(values).map(|v| fmt_g17(*v)).collect();
        let _ = writeln!(out, "{}", cells.join(","));
    }
    out
}

/// Memoize a component on exact `(x, t)` bit patterns. Stacked stencils revisit
/// the same lattice points many times.
fn memoized(u: SolutionEvaluator) -> ComponentFn {
    let cache: Mutex<HashMap<Vec<u64>, f64>> = Mutex::new(HashMap::new());
    Arc::new(move |x: &[f64], t: f64| {
        let key: Vec<u64> = x.iter().chain(std::iter::once(&t)).map(|v| v.to_bits()).collect();
        if let Some(v) = cache.lock().expect("cache lock").get(&key) {
            return Ok(*v);
        }
        let v = u.eval(x, t)?;
        cache.lock().expect("cache lock").insert(key, v);
        Ok(v)
    })
}

/// Run the scenario's task.
pub fn run(s: &Scenario, ov: &Overrides) -> Result<Outcome, CliError> {
    let r = s.resolve()?;
    let cfg = solver_config(s, ov);
    cfg.validate().map_err(|e| CliError::library("task", e))?;
    let tolerance = ov.tolerance.or(s.task.tolerance);
    let n = r.params.n();
    let mut report = Report {
        task: s.task.kind.as_str(),
        n,
        a: r.params.a(),
        b: r.params.b(),
        provenance: "",
        points: r.grid.len(),
        tolerance,
        max_error: None,
        mean_error: None,
        residual: None,
        deviations: None,
        passed: true,
    };
    let exceeds = |v: f64| tolerance.is_some_and(|tol| v.is_nan() || v > tol);
    let mut csv = None;

    match s.task.kind {
        TaskKind::Solve => {
            let u = build_solution(&r, cfg, s.task.tau_order)?;
            report.provenance = u.provenance().as_str();
            let rows = evaluate_grid(&[&u], &r.grid, ov.threads)?;
            csv = Some(csv_table(n, &["u"], &rows));
        }
        TaskKind::OracleCompare => {
            let u = build_solution(&r, cfg, s.task.tau_order)?;
            let oracle = match &r.forcing {
                Some(f) => forced_oracle_solution(&r.data, f, &r.params, DEFAULT_ODE_TOL),
                None => oracle_solution(&r.data, &r.params),
            }
            .map_err(|e| CliError::library("oracle", e))?;
            report.provenance = u.provenance().as_str();
            let rows = evaluate_grid(&[&u, &oracle], &r.grid, ov.threads)?;
            let errors: Vec<f64> = rows.iter().map(|(_, _, v)| (v[0] - v[1]).abs()).collect();
            let max = errors.iter().fold(0.0f64, |m, e| m.max(*e));
            let mean = errors.iter().sum::<f64>() / errors.len() as f64;
            report.max_error = Some(max);
            report.mean_error = Some(mean);
            report.passed = !exceeds(max);
            let rows: Vec<_> = rows
                .into_iter()
                .zip(&errors)
                .map(|((x, t, mut v), e)| {
                    v.push(*e);
                    (x, t, v)
                })
                .collect();
            csv = Some(csv_table(n, &["u", "oracle", "abs_error"], &rows));
        }
        TaskKind::Residual => {
            let u = build_solution(&r, cfg, s.task.tau_order)?;
            report.provenance = u.provenance().as_str();
            let h = s.task.residual_h.unwrap_or(DEFAULT_RESIDUAL_H);
            let rep = biwave_residual(&u, &r.grid.points(), h).map_err(|e| CliError::library("residual", e))?;
            report.passed = !exceeds(rep.relative);
            report.residual = Some(ResidualJson::new(&rep, h));
        }
        TaskKind::InitialCheck => {
            let u = build_solution(&r, cfg, s.task.tau_order)?;
            report.provenance = u.provenance().as_str();
            let eps = s.task.probe_eps.unwrap_or(DEFAULT_PROBE_EPS);
            let spatial: Vec<Vec<f64>> = {
                let mut pts: Vec<Vec<f64>> = r.grid.points().into_iter().map(|(x, _)| x).collect();
                pts.dedup();
                pts
            };
            report.points = spatial.len();
            let devs = (0..4)
                .map(|k| initial_probe(&u, &r.data, k, eps, &spatial))
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| CliError::library("initial-check", e))?;
            report.passed = !devs.iter().any(|d| exceeds(*d));
            report.deviations = Some(devs);
        }
        TaskKind::ElastokitDemo => {
            let ep = r.elastic.as_ref().expect("validated elastic parameters");
            if r.forcing.is_some() {
                return Err(CliError::Unsupported("elastokit-demo with forcing".into()));
            }
            let trig = r.data.to_trig().map_err(|e| CliError::library("data", e))?;
            // component j uses the data shifted by j/2 along axis j
            let mut components = Vec::with_capacity(n);
            for j in 0..n {
                let mut shift = vec![0.0; n];
                shift[j] = 0.5 * j as f64;
                let fields = trig
                    .iter()
                    .map(|p| p.translate(&shift).map(Into::into))
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|e| CliError::library("data", e))?;
                let [f0, f1, f2, f3]: [_; 4] = fields.try_into().expect("four fields");
                let data = InitialData::new(f0, f1, f2, f3).map_err(|e| CliError::library("data", e))?;
                let w = solve_homogeneous(data, r.params, cfg).map_err(|e| CliError::library("solver", e))?;
                report.provenance = w.provenance().as_str();
                components.push(memoized(w));
            }
            let w = VectorFieldEvaluator::new(n, components).map_err(|e| CliError::library("potential", e))?;
            let h = s.task.residual_h.unwrap_or(DEFAULT_RESIDUAL_H);
            let u = cks_displacement(&w, &r.params, h).map_err(|e| CliError::library("displacement", e))?;
            let rep = navier_residual(&u, &[], ep, &r.grid.points(), h)
                .map_err(|e| CliError::library("navier residual", e))?;
            report.passed = !exceeds(rep.relative);
            report.residual = Some(ResidualJson::new(&rep, h));
        }
    }

    Ok(Outcome {
        csv,
        breach: !report.passed,
        report: serde_json::to_string_pretty(&report).expect("report serializes"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g17_formatting() {
        assert_eq!(fmt_g17(0.0), "0");
        assert_eq!(fmt_g17(1.0), "1");
        assert_eq!(fmt_g17(std::f64::consts::PI), "3.1415926535897931");
        assert_eq!(fmt_g17(4.0 / 3.0), "1.3333333333333333");
        assert_eq!(fmt_g17(-0.5), "-0.5");
        assert_eq!(fmt_g17(1e-5), "1.0000000000000001e-05");
        assert_eq!(fmt_g17(1e20), "1e+20");
        assert_eq!(fmt_g17(123456.0), "123456");
        assert_eq!(fmt_g17(0.1), "0.10000000000000001");
    }

    #[test]
    fn g17_round_trips() {
        for v in [0.1, -2.5e-300, 6.02e23, 1.0 / 3.0, 1e16, 12345678901234567.0] {
            assert_eq!(fmt_g17(v).parse::<f64>().unwrap(), v);
        }
    }
}
