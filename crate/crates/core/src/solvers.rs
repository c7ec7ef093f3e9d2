//! Closed-form solvers for the homogeneous Cauchy problem
//!
//! ```text
//! (∂²/∂t² − a²Δ)(∂²/∂t² − b²Δ) u = 0,   ∂ᵏu/∂tᵏ(x, 0) = φ_k(x), k = 0..3
//! ```
//!
//! * n = 1: d'Alembert-type formula with single, double and triple integrals.
//! * odd n ≥ 3: spherical means `M_s` under `(1/s ∂/∂s)^{(n−3)/2}`.
//! * even n ≥ 2: method of descent; modified means `M̃_s` under
//!   `(1/s ∂/∂s)^{(n−2)/2}`.
//!
//! For odd and even n the `φ3` contribution is `+∫_0^t ∫_{bν}^{aν} G(s) ds dν`
//! in both parities (checked against the per-mode oracle). It is evaluated as
//! the equivalent single integral
//! `∫_0^{bt} s(1/b − 1/a) G(s) ds + ∫_{bt}^{at} (t − s/a) G(s) ds`
//! obtained by exchanging the order of integration.

use std::sync::Arc;

use crate::error::{BiwaveError, Result};
use crate::field::{BiwaveParams, InitialData, Provenance, ScalarField, SolutionEvaluator};
use crate::quadrature::{
    cached_gauss_legendre, nested_recursive, sphere_surface_rule, unit_sphere_area,
    weighted_ball_rule, QuadratureRule,
};
use crate::spherical::{radial_power, time_derivative, weighted_sum, DEFAULT_H_REL};

/// Numerical knobs shared by all solvers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    /// Gauss–Legendre order for every interval integral.
    pub interval_order: usize,
    /// Sphere / ball rule level; `None` picks [`default_sphere_level`].
    pub sphere_level: Option<usize>,
    /// Relative step of the difference stencils.
    pub h_rel: f64,
    /// Below this time the Taylor polynomial of the data is returned.
    pub t_eps: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            interval_order: 32,
            sphere_level: None,
            h_rel: DEFAULT_H_REL,
            t_eps: 1e-6,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if self.interval_order < 1 {
            return Err(BiwaveError::InvalidConfig("interval_order must be positive".into()));
        }
        if self.sphere_level == Some(0) {
            return Err(BiwaveError::InvalidConfig("sphere_level must be positive".into()));
        }
        if !(self.h_rel.is_finite() && self.h_rel > 0.0 && self.h_rel < 0.1) {
            return Err(BiwaveError::InvalidConfig(format!(
                "h_rel must lie in (0, 0.1), got {}",
                self.h_rel
            )));
        }
        if !(self.t_eps.is_finite() && self.t_eps > 0.0 && self.t_eps < 1e-3) {
            return Err(BiwaveError::InvalidConfig(format!(
                "t_eps must lie in (0, 1e-3), got {}",
                self.t_eps
            )));
        }
        Ok(())
    }
}

/// Default level for a product rule whose nodes live on `S^{d−1}`
/// (sphere rule in ℝ^d, or ball rule in ℝ^{d−1}).
pub fn default_sphere_level(d: usize) -> usize {
    match d {
        0..=3 => 32,
        4 | 5 => 12,
        _ => 6,
    }
}

/// `k!!` with `0!! = 1!! = 1`.
pub fn double_factorial(k: usize) -> f64 {
    let mut acc = 1.0;
    let mut i = k;
    while i > 1 {
        acc *= i as f64;
        i -= 2;
    }
    acc
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Parity {
    Odd,
    Even,
}

#[derive(Debug)]
struct SphericalKernel {
    parity: Parity,
    rule: QuadratureRule,
    /// `1/ω_n` for sphere means, `2/ω_{n+1}` for modified means.
    mean_norm: f64,
    /// Exponent of `s` in the radial profile `s^p · mean`.
    power: i32,
    /// Number of `(1/s ∂/∂s)` applications.
    m: usize,
    /// `1/((n−2)!!)` or `1/((n−1)!!)`.
    prefactor: f64,
}

#[derive(Debug)]
enum Kind {
    OneD,
    Spherical(SphericalKernel),
}

/// A homogeneous solver bound to fixed parameters and quadrature rules; it
/// can evaluate the solution for any data set of matching dimension.
#[derive(Debug)]
pub struct CauchySolver {
    params: BiwaveParams,
    cfg: SolverConfig,
    interval: Arc<QuadratureRule>,
    kind: Kind,
}

impl CauchySolver {
    /// Pick the formula matching `params.n()`.
    pub fn new(params: BiwaveParams, cfg: SolverConfig) -> Result<Self> {
        match params.n() {
            1 => Self::one_d(params, cfg),
            n if n % 2 == 1 => Self::odd(params, cfg),
            _ => Self::even(params, cfg),
        }
    }

    pub fn one_d(params: BiwaveParams, cfg: SolverConfig) -> Result<Self> {
        cfg.validate()?;
        if params.n() != 1 {
            return Err(BiwaveError::WrongParity {
                solver: "1d",
                expected: "n = 1",
                n: params.n(),
            });
        }
        Ok(Self {
            params,
            cfg,
            interval: cached_gauss_legendre(cfg.interval_order)?,
            kind: Kind::OneD,
        })
    }

    pub fn odd(params: BiwaveParams, cfg: SolverConfig) -> Result<Self> {
        cfg.validate()?;
        let n = params.n();
        if n % 2 == 0 || n == 1 {
            return Err(BiwaveError::WrongParity {
                solver: "odd",
                expected: "odd n >= 3",
                n,
            });
        }
        if n > 7 {
            return Err(BiwaveError::UnsupportedDimension { what: "solve_odd", n });
        }
        let level = cfg.sphere_level.unwrap_or_else(|| default_sphere_level(n));
        let kernel = SphericalKernel {
            parity: Parity::Odd,
            rule: sphere_surface_rule(n, level)?,
            mean_norm: 1.0 / unit_sphere_area(n),
            power: n as i32 - 2,
            m: (n - 3) / 2,
            prefactor: 1.0 / double_factorial(n - 2),
        };
        Ok(Self {
            params,
            cfg,
            interval: cached_gauss_legendre(cfg.interval_order)?,
            kind: Kind::Spherical(kernel),
        })
    }

    pub fn even(params: BiwaveParams, cfg: SolverConfig) -> Result<Self> {
        cfg.validate()?;
        let n = params.n();
        if n % 2 == 1 {
            return Err(BiwaveError::WrongParity {
                solver: "even",
                expected: "even n >= 2",
                n,
            });
        }
        if n > 6 {
            return Err(BiwaveError::UnsupportedDimension { what: "solve_even", n });
        }
        let level = cfg.sphere_level.unwrap_or_else(|| default_sphere_level(n + 1));
        let kernel = SphericalKernel {
            parity: Parity::Even,
            rule: weighted_ball_rule(n, level)?,
            mean_norm: 2.0 / unit_sphere_area(n + 1),
            power: n as i32 - 1,
            m: (n - 2) / 2,
            prefactor: 1.0 / double_factorial(n - 1),
        };
        Ok(Self {
            params,
            cfg,
            interval: cached_gauss_legendre(cfg.interval_order)?,
            kind: Kind::Spherical(kernel),
        })
    }

    pub fn params(&self) -> &BiwaveParams {
        &self.params
    }

    pub fn config(&self) -> &SolverConfig {
        &self.cfg
    }

    pub fn provenance(&self) -> Provenance {
        match &self.kind {
            Kind::OneD => Provenance::Solver1d,
            Kind::Spherical(k) if k.parity == Parity::Odd => Provenance::SolverOdd,
            Kind::Spherical(_) => Provenance::SolverEven,
        }
    }

    /// `u(x, t)` for the given data.
    pub fn evaluate(&self, data: &InitialData, x: &[f64], t: f64) -> Result<f64> {
        if data.dim() != self.params.n() {
            return Err(BiwaveError::DimensionMismatch {
                expected: self.params.n(),
                got: data.dim(),
            });
        }
        if x.len() != self.params.n() {
            return Err(BiwaveError::DimensionMismatch {
                expected: self.params.n(),
                got: x.len(),
            });
        }
        if t < 0.0 {
            return Err(BiwaveError::NegativeTime(t));
        }
        if t < self.cfg.t_eps {
            return Ok(data.taylor(x, t));
        }
        match &self.kind {
            Kind::OneD => Ok(self.evaluate_1d(data, x[0], t)),
            Kind::Spherical(kernel) => self.evaluate_spherical(kernel, data, x, t),
        }
    }

    fn evaluate_1d(&self, data: &InitialData, x: f64, t: f64) -> f64 {
        let (a, b) = (self.params.a(), self.params.b());
        let rule = &*self.interval;
        let [phi0, phi1, phi2, phi3] = data.fields();
        let at_point = |f: &ScalarField, y: f64| f.value(&[y]);
        let mut acc = 0.0;

        if !phi0.is_zero() {
            acc += -a * b.powi(3) * (at_point(phi0, x + a * t) + at_point(phi0, x - a * t))
                + a.powi(3) * b * (at_point(phi0, x + b * t) + at_point(phi0, x - b * t));
        }
        if !phi1.is_zero() {
            let f = |y: f64| at_point(phi1, y);
            acc += -b.powi(3) * rule.integrate(x - a * t, x + a * t, f)
                + a.powi(3) * rule.integrate(x - b * t, x + b * t, f);
        }
        let zero_to = |y: f64| (0.0, y);
        if !phi2.is_zero() {
            // y ↦ ∫_0^y φ2
            let f = |w: f64| at_point(phi2, w);
            let once = [&zero_to as &dyn Fn(f64) -> (f64, f64)];
            acc += -a * b * nested_recursive(&f, rule, x - a * t, x - b * t, &once)
                + a * b * nested_recursive(&f, rule, x + b * t, x + a * t, &once);
        }
        if !phi3.is_zero() {
            // y ↦ ∫_0^y ∫_0^τ φ3
            let f = |w: f64| at_point(phi3, w);
            let twice = [
                &zero_to as &dyn Fn(f64) -> (f64, f64),
                &zero_to as &dyn Fn(f64) -> (f64, f64),
            ];
            acc += b * nested_recursive(&f, rule, x - a * t, x + a * t, &twice)
                - a * nested_recursive(&f, rule, x - b * t, x + b * t, &twice);
        }
        acc / (2.0 * a * b * self.params.speed_gap())
    }

    fn evaluate_spherical(
        &self,
        kernel: &SphericalKernel,
        data: &InitialData,
        x: &[f64],
        t: f64,
    ) -> Result<f64> {
        let (a, b) = (self.params.a(), self.params.b());
        let h_rel = self.cfg.h_rel;
        let rule = &*self.interval;
        let [phi0, phi1, phi2, phi3] = data.fields();

        let mean = |phi: &ScalarField, s: f64| -> f64 {
            if s == 0.0 {
                phi.value(x)
            } else {
                kernel.mean_norm * weighted_sum(phi, x, s, &kernel.rule)
            }
        };
        // G(s) = (1/s ∂/∂s)^m (s^p · mean_s(φ)(x))
        let radial = |phi: &ScalarField, s: f64| -> Result<f64> {
            let profile = |r: f64| Ok(r.powi(kernel.power) * mean(phi, r));
            radial_power(&profile, kernel.m, s, h_rel)
        };

        let mut acc = 0.0;
        if !phi0.is_zero() {
            let slow = |tau: f64| radial(phi0, b * tau);
            let fast = |tau: f64| radial(phi0, a * tau);
            acc += a * a / b * time_derivative(&slow, t, h_rel)?
                - b * b / a * time_derivative(&fast, t, h_rel)?;
        }
        if !phi1.is_zero() {
            acc += a * a / b * radial(phi1, b * t)? - b * b / a * radial(phi1, a * t)?;
        }
        if !phi2.is_zero() {
            acc += rule.try_integrate(b * t, a * t, |s| radial(phi2, s))?;
        }
        if !phi3.is_zero() {
            let inner_weight = 1.0 / b - 1.0 / a;
            acc += rule.try_integrate(0.0, b * t, |s| Ok(s * inner_weight * radial(phi3, s)?))?;
            acc += rule.try_integrate(b * t, a * t, |s| Ok((t - s / a) * radial(phi3, s)?))?;
        }
        Ok(kernel.prefactor * acc / self.params.speed_gap())
    }

    /// Bind data to this solver.
    pub fn into_evaluator(self: Arc<Self>, data: InitialData) -> SolutionEvaluator {
        let params = self.params;
        let provenance = self.provenance();
        SolutionEvaluator::new(params, provenance, move |x, t| self.evaluate(&data, x, t))
    }
}

fn check_data(data: &InitialData, params: &BiwaveParams) -> Result<()> {
    if data.dim() != params.n() {
        return Err(BiwaveError::DimensionMismatch {
            expected: params.n(),
            got: data.dim(),
        });
    }
    Ok(())
}

pub fn solve_1d(data: InitialData, params: BiwaveParams, cfg: SolverConfig) -> Result<SolutionEvaluator> {
    let solver = CauchySolver::one_d(params, cfg)?;
    check_data(&data, &params)?;
    Ok(Arc::new(solver).into_evaluator(data))
}

pub fn solve_odd(data: InitialData, params: BiwaveParams, cfg: SolverConfig) -> Result<SolutionEvaluator> {
    let solver = CauchySolver::odd(params, cfg)?;
    check_data(&data, &params)?;
    Ok(Arc::new(solver).into_evaluator(data))
}

pub fn solve_even(data: InitialData, params: BiwaveParams, cfg: SolverConfig) -> Result<SolutionEvaluator> {
    let solver = CauchySolver::even(params, cfg)?;
    check_data(&data, &params)?;
    Ok(Arc::new(solver).into_evaluator(data))
}

/// Dispatch to the solver matching `params.n()`.
pub fn solve_homogeneous(
    data: InitialData,
    params: BiwaveParams,
    cfg: SolverConfig,
) -> Result<SolutionEvaluator> {
    let solver = CauchySolver::new(params, cfg)?;
    check_data(&data, &params)?;
    Ok(Arc::new(solver).into_evaluator(data))
}

/// Data `(φ0, φ1, a²Δφ0, a²Δφ1)`: every mode then has `C3 = C4 = 0`, so the
/// biwave solution is the speed-`a` wave solution.
pub fn pure_speed_projection_check(
    params: &BiwaveParams,
    phi0: &ScalarField,
    phi1: &ScalarField,
) -> Result<InitialData> {
    let p0 = phi0.to_trig().ok_or(BiwaveError::NotTrigPoly("phi0"))?;
    let p1 = phi1.to_trig().ok_or(BiwaveError::NotTrigPoly("phi1"))?;
    let a2 = params.a() * params.a();
    let phi2 = p0.laplacian()?.scale(a2)?;
    let phi3 = p1.laplacian()?.scale(a2)?;
    let dim = phi0.dim();
    let wrap = |p: crate::field::TrigPoly| {
        if p.is_empty() {
            ScalarField::zero(dim)
        } else {
            ScalarField::Trig(p)
        }
    };
    InitialData::new(phi0.clone(), phi1.clone(), wrap(phi2), wrap(phi3))
}
