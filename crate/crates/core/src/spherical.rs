//! Spherical means, modified (ball-weighted) spherical means, and the
//! finite-difference operators `(1/s ∂/∂s)^m` and `∂/∂t` that the solution
//! formulas apply to them.
//!
//! Derivatives use the 4th-order central difference
//! `(f(x−2h) − 8f(x−h) + 8f(x+h) − f(x+2h)) / 12h` with `h = h_rel·x`, followed
//! by one Richardson step `(16 D(h/2) − D(h)) / 15`. `(1/s ∂/∂s)^m` nests `m`
//! of these stencils.

use crate::error::{BiwaveError, Result};
use crate::field::ScalarField;
use crate::quadrature::{unit_sphere_area, QuadratureRule, RuleDomain};

pub const DEFAULT_H_REL: f64 = 1e-3;

/// Largest point dimension handled by the allocation-free mean kernels.
const MAX_DIM: usize = 8;

#[inline]
pub(crate) fn weighted_sum(phi: &ScalarField, x: &[f64], scale: f64, rule: &QuadratureRule) -> f64 {
    let n = x.len();
    debug_assert!(n <= MAX_DIM);
    let mut buf = [0.0f64; MAX_DIM];
    let p = &mut buf[..n];
    let mut acc = 0.0;
    for (y, w) in rule.iter() {
        for i in 0..n {
            p[i] = x[i] + scale * y[i];
        }
        acc += w * phi.value(p);
    }
    acc
}

fn check_rule(phi: &ScalarField, x: &[f64], rule: &QuadratureRule, want: RuleDomain) -> Result<()> {
    if x.len() != phi.dim() {
        return Err(BiwaveError::DimensionMismatch {
            expected: phi.dim(),
            got: x.len(),
        });
    }
    if rule.domain() != want {
        return Err(BiwaveError::WrongRule {
            expected: want.to_string(),
            got: rule.domain().to_string(),
        });
    }
    Ok(())
}

/// `M_R(φ)(x) = (1/ω_n) ∫_{S^{n−1}} φ(x + R y) dσ(y)`.
pub fn spherical_mean(phi: &ScalarField, x: &[f64], radius: f64, rule: &QuadratureRule) -> Result<f64> {
    check_rule(phi, x, rule, RuleDomain::SphereSurface(x.len()))?;
    if !radius.is_finite() {
        return Err(BiwaveError::NonFinite("radius"));
    }
    if radius < 0.0 {
        return Err(BiwaveError::NegativeRadius(radius));
    }
    if radius == 0.0 {
        return Ok(phi.value(x));
    }
    Ok(weighted_sum(phi, x, radius, rule) / unit_sphere_area(x.len()))
}

/// `M̃_t(φ)(x) = (2/ω_{n+1}) ∫_{B_n} φ(x + t z) / √(1 − |z|²) dz`.
pub fn modified_spherical_mean(phi: &ScalarField, x: &[f64], t: f64, rule: &QuadratureRule) -> Result<f64> {
    check_rule(phi, x, rule, RuleDomain::WeightedBall(x.len()))?;
    if !t.is_finite() {
        return Err(BiwaveError::NonFinite("radius"));
    }
    if t < 0.0 {
        return Err(BiwaveError::NegativeRadius(t));
    }
    if t == 0.0 {
        return Ok(phi.value(x));
    }
    Ok(2.0 * weighted_sum(phi, x, t, rule) / unit_sphere_area(x.len() + 1))
}

/// A function of the radius, typically `s ↦ s^{n−2} M_s(φ)(x)` at a fixed `x`.
pub struct RadialProfile<'a> {
    eval: &'a dyn Fn(f64) -> Result<f64>,
    /// Number of continuous derivatives the caller vouches for.
    pub smoothness: u32,
}

impl<'a> RadialProfile<'a> {
    pub fn new(eval: &'a dyn Fn(f64) -> Result<f64>) -> Self {
        Self {
            eval,
            smoothness: u32::MAX,
        }
    }

    pub fn eval(&self, s: f64) -> Result<f64> {
        (self.eval)(s)
    }
}

#[inline]
fn sample(g: &dyn Fn(f64) -> Result<f64>, x: f64) -> Result<f64> {
    let v = g(x)?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(BiwaveError::NonFiniteSample(x))
    }
}

fn central4(g: &dyn Fn(f64) -> Result<f64>, x: f64, h: f64) -> Result<f64> {
    let fm2 = sample(g, x - 2.0 * h)?;
    let fm1 = sample(g, x - h)?;
    let fp1 = sample(g, x + h)?;
    let fp2 = sample(g, x + 2.0 * h)?;
    Ok((fm2 - 8.0 * fm1 + 8.0 * fp1 - fp2) / (12.0 * h))
}

/// First derivative by the Richardson-extrapolated 4th-order central stencil.
pub(crate) fn richardson_derivative(g: &dyn Fn(f64) -> Result<f64>, x: f64, h: f64) -> Result<f64> {
    let coarse = central4(g, x, h)?;
    let fine = central4(g, x, 0.5 * h)?;
    Ok((16.0 * fine - coarse) / 15.0)
}

fn check_h_rel(h_rel: f64, m: usize) -> Result<()> {
    if !(h_rel.is_finite() && h_rel > 0.0) {
        return Err(BiwaveError::InvalidConfig(format!("h_rel must be positive, got {h_rel}")));
    }
    if (m as f64 + 2.0) * h_rel >= 1.0 {
        return Err(BiwaveError::StencilOutOfDomain(format!(
            "h_rel = {h_rel} too large for {m} nested stencils"
        )));
    }
    Ok(())
}

fn radial_power_rec(g: &dyn Fn(f64) -> Result<f64>, m: usize, s: f64, h_rel: f64) -> Result<f64> {
    if m == 0 {
        return sample(g, s);
    }
    let inner = |r: f64| radial_power_rec(g, m - 1, r, h_rel);
    Ok(richardson_derivative(&inner, s, h_rel * s)? / s)
}

/// `((1/s) d/ds)^m g` at `s` by `m` nested difference stencils with step `h_rel·s`.
pub fn radial_derivative_power(g: &RadialProfile<'_>, m: usize, s: f64, h_rel: f64) -> Result<f64> {
    radial_power(g.eval, m, s, h_rel)
}

pub(crate) fn radial_power(g: &dyn Fn(f64) -> Result<f64>, m: usize, s: f64, h_rel: f64) -> Result<f64> {
    if m == 0 {
        return sample(g, s);
    }
    if !(s.is_finite() && s > 0.0) {
        return Err(BiwaveError::StencilOutOfDomain(format!(
            "radial operator needs s > 0, got {s}"
        )));
    }
    check_h_rel(h_rel, m)?;
    radial_power_rec(g, m, s, h_rel)
}

/// `dg/dt` at `t > 0` with step `h_rel·t`.
pub fn time_derivative(g: &dyn Fn(f64) -> Result<f64>, t: f64, h_rel: f64) -> Result<f64> {
    if !(t.is_finite() && t > 0.0) {
        return Err(BiwaveError::StencilOutOfDomain(format!(
            "time derivative needs t > 0, got {t}"
        )));
    }
    check_h_rel(h_rel, 0)?;
    richardson_derivative(g, t, h_rel * t)
}
