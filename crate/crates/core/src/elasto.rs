//! Isotropic elastodynamics through biwave potentials.
//!
//! With `a² = (λ+2μ)/ρ` and `b² = μ/ρ`, the displacement
//! `u = (∂²/∂t² − a²Δ) w + (a² − b²) ∇ div w` solves Navier's equation
//! `(∂²/∂t² − b²Δ) u − (a² − b²) ∇ div u = f/ρ` whenever every component of
//! `w` solves the biwave equation with right-hand side `f/ρ`.
//! All derivatives here are fourth-order finite differences.

use std::sync::Arc;

use crate::error::{BiwaveError, Result};
use crate::field::{BiwaveParams, ForcingField, SolutionEvaluator};
use crate::verification::{check_probes, sample_offsets, ResidualReport, Stencil};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElasticParams {
    lambda: f64,
    mu: f64,
    rho: f64,
}

impl ElasticParams {
    pub fn new(lambda: f64, mu: f64, rho: f64) -> Result<Self> {
        if !(lambda.is_finite() && mu.is_finite() && rho.is_finite()) {
            return Err(BiwaveError::InvalidElastic("parameters must be finite".into()));
        }
        if mu <= 0.0 {
            return Err(BiwaveError::InvalidElastic(format!("mu must be positive, got {mu}")));
        }
        if rho <= 0.0 {
            return Err(BiwaveError::InvalidElastic(format!("rho must be positive, got {rho}")));
        }
        if lambda + mu <= 0.0 {
            return Err(BiwaveError::InvalidElastic(format!(
                "lambda + mu must be positive, got {}",
                lambda + mu
            )));
        }
        Ok(Self { lambda, mu, rho })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }
}

/// Pressure and shear speeds `a = √((λ+2μ)/ρ)`, `b = √(μ/ρ)` in dimension `n`.
pub fn lame_to_speeds(ep: &ElasticParams, n: usize) -> Result<BiwaveParams> {
    let a = ((ep.lambda + 2.0 * ep.mu) / ep.rho).sqrt();
    let b = (ep.mu / ep.rho).sqrt();
    BiwaveParams::new(a, b, n)
}

pub type ComponentFn = Arc<dyn Fn(&[f64], f64) -> Result<f64> + Send + Sync>;
pub type PlainComponent = Box<dyn Fn(&[f64], f64) -> f64 + Send + Sync>;

/// An `n`-vector field on `ℝⁿ × [0, ∞)`.
#[derive(Clone)]
pub struct VectorFieldEvaluator {
    dim: usize,
    components: Vec<ComponentFn>,
}

impl std::fmt::Debug for VectorFieldEvaluator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("VectorFieldEvaluator").field("dim", &self.dim).finish()
    }
}

impl VectorFieldEvaluator {
    pub fn new(dim: usize, components: Vec<ComponentFn>) -> Result<Self> {
        if dim == 0 {
            return Err(BiwaveError::InvalidDimension(dim));
        }
        if components.len() != dim {
            return Err(BiwaveError::DimensionMismatch {
                expected: dim,
                got: components.len(),
            });
        }
        Ok(Self { dim, components })
    }

    /// One biwave solution per component.
    pub fn from_solutions(solutions: Vec<SolutionEvaluator>) -> Result<Self> {
        let dim = solutions.len();
        if let Some(bad) = solutions.iter().find(|s| s.dim() != dim) {
            return Err(BiwaveError::DimensionMismatch {
                expected: dim,
                got: bad.dim(),
            });
        }
        let components = solutions
            .into_iter()
            .map(|s| Arc::new(move |x: &[f64], t: f64| s.eval(x, t)) as ComponentFn)
            .collect();
        Self::new(dim, components)
    }

    pub fn from_fns(
        dim: usize,
        fns: Vec<PlainComponent>,
    ) -> Result<Self> {
        let components = fns
            .into_iter()
            .map(|f| Arc::new(move |x: &[f64], t: f64| Ok(f(x, t))) as ComponentFn)
            .collect();
        Self::new(dim, components)
    }

    pub fn zero(dim: usize) -> Result<Self> {
        Self::new(dim, (0..dim).map(|_| Arc::new(|_: &[f64], _| Ok(0.0)) as ComponentFn).collect())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn eval(&self, component: usize, x: &[f64], t: f64) -> Result<f64> {
        let f = self.components.get(component).ok_or(BiwaveError::DimensionMismatch {
            expected: self.dim,
            got: component + 1,
        })?;
        if x.len() != self.dim {
            return Err(BiwaveError::DimensionMismatch {
                expected: self.dim,
                got: x.len(),
            });
        }
        f(x, t)
    }

    pub fn eval_all(&self, x: &[f64], t: f64) -> Result<Vec<f64>> {
        (0..self.dim).map(|k| self.eval(k, x, t)).collect()
    }
}

/// `∂_k ∂_j` for spatial axes `k, j` (1-based within the `(t, x)` width).
fn mixed_second(width: usize, k: usize, j: usize) -> Stencil {
    if k == j {
        Stencil::second(width, k)
    } else {
        Stencil::first(width, k).compose(&Stencil::first(width, j))
    }
}

/// Reconstruct the displacement from the potential `w`.
pub fn cks_displacement(w: &VectorFieldEvaluator, params: &BiwaveParams, h: f64) -> Result<VectorFieldEvaluator> {
    if !(h.is_finite() && h > 0.0) {
        return Err(BiwaveError::InvalidConfig(format!("stencil step must be positive, got {h}")));
    }
    let n = w.dim();
    if params.n() != n {
        return Err(BiwaveError::DimensionMismatch {
            expected: n,
            got: params.n(),
        });
    }
    let width = n + 1;
    let a2 = params.a() * params.a();
    let gap = params.speed_gap();
    let mut wave = Stencil::second(width, 0);
    wave.add_scaled(&Stencil::laplacian(width), -a2);
    let wave = Arc::new(wave);

    let components = (0..n)
        .map(|k| {
            let w = w.clone();
            let wave = Arc::clone(&wave);
            let grad_div: Vec<Stencil> = (0..n).map(|j| mixed_second(width, k + 1, j + 1)).collect();
            Arc::new(move |x: &[f64], t: f64| -> Result<f64> {
                if t < 2.0 * h {
                    return Err(BiwaveError::StencilOutOfDomain(format!(
                        "displacement at t = {t} needs t >= 2h = {}",
                        2.0 * h
                    )));
                }
                let own = sample_offsets([&*wave], x, t, h, |y, s| w.eval(k, y, s))?;
                let mut acc = wave.apply(&own);
                for (j, st) in grad_div.iter().enumerate() {
                    let cache = sample_offsets([st], x, t, h, |y, s| w.eval(j, y, s))?;
                    acc += gap * st.apply(&cache);
                }
                Ok(acc / (h * h))
            }) as ComponentFn
        })
        .collect();
    VectorFieldEvaluator::new(n, components)
}

/// Residual of Navier's equation `(∂²/∂t² − b²Δ)u − (a²−b²)∇div u − f/ρ`.
///
/// `forcing` holds one body-force component per axis, or is empty for `f = 0`.
/// The scale is the largest `|∂²u_k/∂t²|` over probes and components.
pub fn navier_residual(
    u: &VectorFieldEvaluator,
    forcing: &[ForcingField],
    ep: &ElasticParams,
    probes: &[(Vec<f64>, f64)],
    h: f64,
) -> Result<ResidualReport> {
    let n = u.dim();
    if !forcing.is_empty() && forcing.len() != n {
        return Err(BiwaveError::DimensionMismatch {
            expected: n,
            got: forcing.len(),
        });
    }
    if let Some(f) = forcing.iter().find(|f| f.dim() != n) {
        return Err(BiwaveError::DimensionMismatch {
            expected: n,
            got: f.dim(),
        });
    }
    let params = lame_to_speeds(ep, n)?;
    let width = n + 1;
    check_probes(probes, n, h, 2.0)?;
    let b2 = params.b() * params.b();
    let gap = params.speed_gap();
    let dt2 = Stencil::second(width, 0);
    let lap = Stencil::laplacian(width);
    let h2 = h * h;

    let mut max_abs: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for (x, t) in probes {
        let caches: Vec<_> = (0..n)
            .map(|j| {
                let mut all: Vec<Stencil> = (0..n).map(|k| mixed_second(width, k + 1, j + 1)).collect();
                all.push(dt2.clone());
                all.push(lap.clone());
                let cache = sample_offsets(&all, x, *t, h, |y, s| u.eval(j, y, s))?;
                Ok(cache)
            })
            .collect::<Result<_>>()?;
        for k in 0..n {
            let acc_t = dt2.apply(&caches[k]) / h2;
            let mut r = acc_t - b2 * lap.apply(&caches[k]) / h2;
            for (j, cache) in caches.iter().enumerate() {
                r -= gap * mixed_second(width, k + 1, j + 1).apply(cache) / h2;
            }
            if let Some(f) = forcing.get(k) {
                f.check_horizon(*t)?;
                r -= f.value(x, *t) / ep.rho;
            }
            max_abs = max_abs.max(r.abs());
            scale = scale.max(acc_t.abs());
        }
    }
    Ok(ResidualReport::from_parts(max_abs, scale, probes.len()))
}
