//! Numerical integration primitives.
//!
//! * Gauss–Legendre rules on intervals, plain and iterated.
//! * Product rules on the unit sphere `S^{n−1} ⊂ ℝⁿ`: uniform in the
//!   azimuth, Gaussian in the cosine of each polar angle.
//! * A rule for `∫_{B_n} g(z) / √(1 − |z|²) dz` over the unit ball. With
//!   `r = sin α` the singular factor cancels against `dr = cos α dα`; the
//!   remaining `sin^{n−1}α dα` is discretized in `u = cos α`, which makes the
//!   radial part the upper half of the polar rule of `S^n`.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{BiwaveError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RuleDomain {
    Interval,
    SphereSurface(usize),
    WeightedBall(usize),
}

impl std::fmt::Display for RuleDomain {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RuleDomain::Interval => write!(f, "interval"),
            RuleDomain::SphereSurface(n) => write!(f, "sphere-surface({n})"),
            RuleDomain::WeightedBall(n) => write!(f, "weighted-ball({n})"),
        }
    }
}

/// Nodes and weights of a quadrature rule. Nodes are stored flat, `dim`
/// coordinates per node.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    dim: usize,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    domain: RuleDomain,
}

impl QuadratureRule {
    pub fn domain(&self) -> RuleDomain {
        self.domain
    }

    /// Coordinates per node.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn node(&self, i: usize) -> &[f64] {
        &self.nodes[i * self.dim..(i + 1) * self.dim]
    }

    pub fn nodes(&self) -> impl Iterator<Item = &[f64]> {
        self.nodes.chunks_exact(self.dim)
    }

    /// `(node, weight)` pairs.
    pub fn iter(&self) -> impl Iterator<Item = (&[f64], f64)> {
        self.nodes.chunks_exact(self.dim).zip(self.weights.iter().copied())
    }

    pub fn weight_sum(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Affine-mapped integral over `[lo, hi]` for a rule on `[−1, 1]`.
    #[inline]
    pub fn integrate(&self, lo: f64, hi: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
        debug_assert_eq!(self.domain, RuleDomain::Interval);
        if lo == hi {
            return 0.0;
        }
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        let mut acc = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += w * f(mid + half * x);
        }
        acc * half
    }

    /// Like [`integrate`](Self::integrate) for a fallible integrand.
    pub fn try_integrate(
        &self,
        lo: f64,
        hi: f64,
        mut f: impl FnMut(f64) -> Result<f64>,
    ) -> Result<f64> {
        if lo == hi {
            return Ok(0.0);
        }
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        let mut acc = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += w * f(mid + half * x)?;
        }
        Ok(acc * half)
    }
}

/// Surface area `ω_n` of the unit sphere in ℝⁿ (ω₁ = 2, ω₂ = 2π, ω₃ = 4π).
pub fn unit_sphere_area(n: usize) -> f64 {
    assert!(n >= 1);
    let mut area = if n % 2 == 1 { 2.0 } else { 2.0 * PI };
    let mut k = if n % 2 == 1 { 1 } else { 2 };
    while k < n {
        area *= 2.0 * PI / k as f64;
        k += 2;
    }
    area
}

/// Gauss–Legendre nodes (ascending) and weights on `[−1, 1]`.
fn legendre_nodes(order: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; order];
    let mut weights = vec![0.0; order];
    let n = order as f64;
    for i in 0..order.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for j in 2..=order {
                let j = j as f64;
                let p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() <= 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[order - 1 - i] = x;
        weights[i] = w;
        weights[order - 1 - i] = w;
    }
    if order % 2 == 1 {
        nodes[order / 2] = 0.0;
    }
    (nodes, weights)
}

/// Gauss–Legendre rule of the given order on `[−1, 1]`, exact through degree `2·order − 1`.
pub fn gauss_legendre(order: usize) -> Result<QuadratureRule> {
    if order < 1 {
        return Err(BiwaveError::InvalidOrder { min: 1, got: order });
    }
    let (nodes, weights) = legendre_nodes(order);
    Ok(QuadratureRule {
        dim: 1,
        nodes,
        weights,
        domain: RuleDomain::Interval,
    })
}

/// Shared, lazily built Gauss–Legendre rules.
pub(crate) fn cached_gauss_legendre(order: usize) -> Result<Arc<QuadratureRule>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<QuadratureRule>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(rule) = cache.lock().unwrap().get(&order) {
        return Ok(Arc::clone(rule));
    }
    let rule = Arc::new(gauss_legendre(order)?);
    cache.lock().unwrap().insert(order, Arc::clone(&rule));
    Ok(rule)
}

/// `∫_lo^hi f` by an affine-mapped Gauss–Legendre rule.
pub fn integrate_interval(f: impl Fn(f64) -> f64, lo: f64, hi: f64, order: usize) -> Result<f64> {
    if !lo.is_finite() || !hi.is_finite() {
        return Err(BiwaveError::NonFinite("integration bounds"));
    }
    if lo > hi {
        return Err(BiwaveError::MalformedBounds(format!("lo = {lo} > hi = {hi}")));
    }
    let rule = cached_gauss_legendre(order)?;
    Ok(rule.integrate(lo, hi, f))
}

/// Bounds of an iterated integral `∫_{outer} ∫_{inner[0](y)} ∫_{inner[1](τ)} …`.
///
/// Each inner bound is a function of the immediately enclosing variable, as in
/// `∫_{x−at}^{x+at} ∫_0^y ∫_0^τ`. The integrand depends on the innermost
/// variable only.
pub struct NestedBounds<'a> {
    pub outer: (f64, f64),
    pub inner: Vec<&'a dyn Fn(f64) -> (f64, f64)>,
}

pub(crate) fn nested_recursive(
    f: &dyn Fn(f64) -> f64,
    rule: &QuadratureRule,
    lo: f64,
    hi: f64,
    inner: &[&dyn Fn(f64) -> (f64, f64)],
) -> f64 {
    match inner.split_first() {
        None => rule.integrate(lo, hi, f),
        Some((bounds, rest)) => rule.integrate(lo, hi, |y| {
            let (a, b) = bounds(y);
            nested_recursive(f, rule, a, b, rest)
        }),
    }
}

/// Iterated Gauss–Legendre integral of depth 1, 2 or 3.
///
/// Inner bounds may come in either order; a reversed interval contributes
/// with a negative sign, as for ordinary oriented integrals.
pub fn integrate_nested(
    f: impl Fn(f64) -> f64,
    depth: usize,
    bounds: &NestedBounds<'_>,
    order: usize,
) -> Result<f64> {
    if !(1..=3).contains(&depth) {
        return Err(BiwaveError::MalformedBounds(format!("depth {depth} not in 1..=3")));
    }
    if bounds.inner.len() + 1 != depth {
        return Err(BiwaveError::MalformedBounds(format!(
            "depth {depth} needs {} inner bounds, got {}",
            depth - 1,
            bounds.inner.len()
        )));
    }
    let (lo, hi) = bounds.outer;
    if !lo.is_finite() || !hi.is_finite() {
        return Err(BiwaveError::MalformedBounds("non-finite outer bounds".into()));
    }
    let rule = cached_gauss_legendre(order)?;
    let value = nested_recursive(&f, &rule, lo, hi, &bounds.inner);
    if value.is_finite() {
        Ok(value)
    } else {
        Err(BiwaveError::MalformedBounds("non-finite inner bounds or integrand".into()))
    }
}

/// One-dimensional rule for `∫_{−1}^{1} g(u) (1 − u²)^{(j−1)/2} du`, the
/// polar factor of the surface measure of `S^{j+1}` written in `u = cos θ`.
fn polar_rule(j: usize, count: usize) -> (Vec<f64>, Vec<f64>) {
    let l = count as f64;
    if j == 0 {
        // Gauss–Chebyshev, first kind
        let nodes = (0..count)
            .map(|i| (PI * (2.0 * i as f64 + 1.0) / (2.0 * l)).cos())
            .collect();
        return (nodes, vec![PI / l; count]);
    }
    if j % 2 == 1 {
        let (nodes, mut weights) = legendre_nodes(count);
        let p = ((j - 1) / 2) as i32;
        for (w, u) in weights.iter_mut().zip(&nodes) {
            *w *= (1.0 - u * u).powi(p);
        }
        return (nodes, weights);
    }
    // Gauss–Chebyshev, second kind, times the polynomial remainder
    let p = ((j - 2) / 2) as i32;
    (1..=count)
        .map(|i| {
            let theta = PI * i as f64 / (l + 1.0);
            let u = theta.cos();
            let w = PI / (l + 1.0) * theta.sin().powi(2) * (1.0 - u * u).powi(p);
            (u, w)
        })
        .unzip()
}

fn build_sphere(n: usize, level: usize) -> (Vec<f64>, Vec<f64>) {
    match n {
        1 => (vec![-1.0, 1.0], vec![1.0, 1.0]),
        2 => {
            let count = 2 * level;
            let step = 2.0 * PI / count as f64;
            let mut nodes = Vec::with_capacity(2 * count);
            for i in 0..count {
                let (s, c) = (step * i as f64).sin_cos();
                nodes.push(c);
                nodes.push(s);
            }
            (nodes, vec![step; count])
        }
        _ => {
            let j = n - 2;
            let (us, ws) = polar_rule(j, level + j / 2);
            let (sub_nodes, sub_weights) = build_sphere(n - 1, level);
            let mut nodes = Vec::with_capacity(us.len() * sub_weights.len() * n);
            let mut weights = Vec::with_capacity(us.len() * sub_weights.len());
            for (u, w) in us.iter().zip(&ws) {
                let r = (1.0 - u * u).max(0.0).sqrt();
                for (node, sw) in sub_nodes.chunks_exact(n - 1).zip(&sub_weights) {
                    nodes.push(*u);
                    nodes.extend(node.iter().map(|v| r * v));
                    weights.push(w * sw);
                }
            }
            (nodes, weights)
        }
    }
}

pub const SPHERE_DIMS: std::ops::RangeInclusive<usize> = 1..=7;
pub const BALL_DIMS: std::ops::RangeInclusive<usize> = 1..=6;

/// Product rule on the unit sphere `S^{n−1} ⊂ ℝⁿ` with weights summing to `ω_n`.
///
/// `level` sets the azimuthal count (`2·level`) and each polar count
/// (`level` plus a small dimension-dependent increment keeping the weight
/// sum exact at every level). For n = 3 the node count is `level × 2·level`.
pub fn sphere_surface_rule(n: usize, level: usize) -> Result<QuadratureRule> {
    if !SPHERE_DIMS.contains(&n) {
        return Err(BiwaveError::UnsupportedDimension {
            what: "sphere_surface_rule",
            n,
        });
    }
    if level < 1 {
        return Err(BiwaveError::InvalidOrder { min: 1, got: level });
    }
    let (nodes, weights) = build_sphere(n, level);
    Ok(QuadratureRule {
        dim: n,
        nodes,
        weights,
        domain: RuleDomain::SphereSurface(n),
    })
}

/// Rule for `∫_{B_n(0,1)} g(z) / √(1 − |z|²) dz`; weights sum to `ω_{n+1} / 2`
/// and every node lies strictly inside the ball.
pub fn weighted_ball_rule(n: usize, level: usize) -> Result<QuadratureRule> {
    if !BALL_DIMS.contains(&n) {
        return Err(BiwaveError::UnsupportedDimension {
            what: "weighted_ball_rule",
            n,
        });
    }
    if level < 1 {
        return Err(BiwaveError::InvalidOrder { min: 1, got: level });
    }
    let j = n - 1;
    // an even count keeps u = 0 (the boundary r = 1) out of the node set
    let (us, ws) = polar_rule(j, 2 * (level + j / 2));
    let (sub_nodes, sub_weights) = build_sphere(n, level);
    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    for (u, w) in us.iter().zip(&ws) {
        if *u <= 0.0 {
            continue;
        }
        let r = (1.0 - u * u).sqrt();
        for (node, sw) in sub_nodes.chunks_exact(n).zip(&sub_weights) {
            nodes.extend(node.iter().map(|v| r * v));
            weights.push(w * sw);
        }
    }
    Ok(QuadratureRule {
        dim: n,
        nodes,
        weights,
        domain: RuleDomain::WeightedBall(n),
    })
}
