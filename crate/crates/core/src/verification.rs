//! Solver-independent checks: the discrete biwave residual, error norms
//! between two evaluators and initial-condition probes.

use std::collections::{BTreeMap, HashMap};

use crate::error::{BiwaveError, Result};
use crate::field::{EvalGrid, InitialData, SolutionEvaluator};

/// Default step of the residual stencils in both `x` and `t`.
pub const DEFAULT_RESIDUAL_H: f64 = 1e-2;
/// Default spacing of the initial-condition probe stencils.
pub const DEFAULT_PROBE_EPS: f64 = 1e-2;

const SCALE_FLOOR: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualReport {
    pub max_abs: f64,
    /// Largest `|∂⁴u/∂t⁴|` (or the analogous leading term) over the probes.
    pub scale: f64,
    pub relative: f64,
    pub probes: usize,
}

impl ResidualReport {
    pub(crate) fn from_parts(max_abs: f64, scale: f64, probes: usize) -> Self {
        Self {
            max_abs,
            scale,
            relative: max_abs / scale.max(SCALE_FLOOR),
            probes,
        }
    }
}

/// Finite-difference stencil over integer offsets in `(t, x1, …, xn)`.
///
/// Coefficients are kept as numerators over a common denominator (both
/// exclude the power of `h`), and the stencil is applied to differences from
/// the centre sample. Polynomial data sampled exactly then cancels exactly.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Stencil {
    terms: BTreeMap<Vec<i32>, f64>,
    denom: f64,
}

const D1: [(i32, f64); 4] = [(-2, 1.0), (-1, -8.0), (1, 8.0), (2, -1.0)];
const D2: [(i32, f64); 5] = [(-2, -1.0), (-1, 16.0), (0, -30.0), (1, 16.0), (2, -1.0)];

impl Stencil {
    fn along(width: usize, axis: usize, taps: &[(i32, f64)]) -> Self {
        let terms = taps
            .iter()
            .map(|&(o, c)| {
                let mut off = vec![0; width];
                off[axis] = o;
                (off, c)
            })
            .collect();
        Self { terms, denom: 12.0 }
    }

    /// Fourth-order first derivative along `axis` (0 is time).
    pub(crate) fn first(width: usize, axis: usize) -> Self {
        Self::along(width, axis, &D1)
    }

    /// Fourth-order second derivative along `axis` (0 is time).
    pub(crate) fn second(width: usize, axis: usize) -> Self {
        Self::along(width, axis, &D2)
    }

    /// Fourth-order spatial Laplacian.
    pub(crate) fn laplacian(width: usize) -> Self {
        let mut out = Self::second(width, 1);
        for axis in 2..width {
            out.add_scaled(&Self::second(width, axis), 1.0);
        }
        out
    }

    pub(crate) fn add_scaled(&mut self, other: &Self, factor: f64) {
        let rescale = factor * self.denom / other.denom;
        for (off, c) in &other.terms {
            *self.terms.entry(off.clone()).or_default() += rescale * c;
        }
    }

    pub(crate) fn compose(&self, other: &Self) -> Self {
        let mut terms = BTreeMap::new();
        for (o1, c1) in &self.terms {
            for (o2, c2) in &other.terms {
                let off: Vec<i32> = o1.iter().zip(o2).map(|(a, b)| a + b).collect();
                *terms.entry(off).or_default() += c1 * c2;
            }
        }
        Self {
            terms,
            denom: self.denom * other.denom,
        }
    }

    /// Most negative time offset.
    pub(crate) fn min_time_offset(&self) -> i32 {
        self.terms.keys().map(|o| o[0]).min().unwrap_or(0)
    }

    pub(crate) fn offsets(&self) -> impl Iterator<Item = &Vec<i32>> {
        self.terms.keys()
    }

    /// `Σ c_o (u_o − u_0)` with samples looked up in `cache`.
    pub(crate) fn apply(&self, cache: &HashMap<Vec<i32>, f64>) -> f64 {
        let width = self.terms.keys().next().map_or(0, Vec::len);
        let centre = cache[&vec![0; width]];
        let sum: f64 = self.terms.iter().map(|(o, c)| c * (cache[o] - centre)).sum();
        sum / self.denom
    }
}

/// Evaluate `f` at the centre and at `(t + h·o_t, x + h·o_x)` for every
/// offset of the stencils.
pub(crate) fn sample_offsets<'a>(
    stencils: impl IntoIterator<Item = &'a Stencil>,
    x: &[f64],
    t: f64,
    h: f64,
    f: impl Fn(&[f64], f64) -> Result<f64>,
) -> Result<HashMap<Vec<i32>, f64>> {
    let mut cache = HashMap::new();
    let mut xs = x.to_vec();
    let centre = vec![0; x.len() + 1];
    for st in stencils {
        for off in st.offsets().chain(std::iter::once(&centre)) {
            if cache.contains_key(off) {
                continue;
            }
            for (i, v) in xs.iter_mut().enumerate() {
                *v = x[i] + h * off[i + 1] as f64;
            }
            let value = f(&xs, t + h * off[0] as f64)?;
            if !value.is_finite() {
                return Err(BiwaveError::NonFiniteSample(t + h * off[0] as f64));
            }
            cache.insert(off.clone(), value);
        }
    }
    Ok(cache)
}

pub(crate) fn check_probes(probes: &[(Vec<f64>, f64)], dim: usize, h: f64, reach: f64) -> Result<()> {
    if !(h.is_finite() && h > 0.0) {
        return Err(BiwaveError::InvalidConfig(format!("stencil step must be positive, got {h}")));
    }
    for (x, t) in probes {
        if x.len() != dim {
            return Err(BiwaveError::DimensionMismatch {
                expected: dim,
                got: x.len(),
            });
        }
        if !(t.is_finite() && *t >= reach * h) {
            return Err(BiwaveError::StencilOutOfDomain(format!(
                "probe t = {t} needs t >= {reach}·h = {}",
                reach * h
            )));
        }
    }
    Ok(())
}

/// Relative residual of `∂⁴u/∂t⁴ − (a²+b²)∂²Δu/∂t² + a²b²Δ²u` by composed
/// fourth-order central differences with step `h` in `x` and `t`.
pub fn biwave_residual(u: &SolutionEvaluator, probes: &[(Vec<f64>, f64)], h: f64) -> Result<ResidualReport> {
    let n = u.dim();
    let width = n + 1;
    let dt2 = Stencil::second(width, 0);
    let lap = Stencil::laplacian(width);
    let tt = dt2.compose(&dt2);
    let mixed = dt2.compose(&lap);
    let bi = lap.compose(&lap);
    check_probes(probes, n, h, -tt.min_time_offset() as f64)?;

    let p = u.params();
    let (a2, b2) = (p.a() * p.a(), p.b() * p.b());
    let h4 = h.powi(4);
    let mut max_abs: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for (x, t) in probes {
        let cache = sample_offsets([&tt, &mixed, &bi], x, *t, h, |y, s| u.eval(y, s))?;
        let d4 = tt.apply(&cache) / h4;
        let r = d4 - (a2 + b2) * mixed.apply(&cache) / h4 + a2 * b2 * bi.apply(&cache) / h4;
        max_abs = max_abs.max(r.abs());
        scale = scale.max(d4.abs());
    }
    Ok(ResidualReport::from_parts(max_abs, scale, probes.len()))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorNorms {
    pub max: f64,
    pub mean: f64,
}

/// Max and mean absolute difference over the grid, in grid order.
pub fn compare(u1: &SolutionEvaluator, u2: &SolutionEvaluator, grid: &EvalGrid) -> Result<ErrorNorms> {
    if u1.dim() != u2.dim() {
        return Err(BiwaveError::DimensionMismatch {
            expected: u1.dim(),
            got: u2.dim(),
        });
    }
    if grid.dim() != u1.dim() {
        return Err(BiwaveError::DimensionMismatch {
            expected: u1.dim(),
            got: grid.dim(),
        });
    }
    let mut max: f64 = 0.0;
    let mut sum = 0.0;
    let points = grid.points();
    for (x, t) in &points {
        let d = (u1.eval(x, *t)? - u2.eval(x, *t)?).abs();
        max = max.max(d);
        sum += d;
    }
    Ok(ErrorNorms {
        max,
        mean: sum / points.len() as f64,
    })
}

/// Weights `w_j` with `Σ w_j f(z_j) ≈ f^(k)(z0)` (Fornberg's recursion).
pub(crate) fn fd_weights(k: usize, nodes: &[f64], z0: f64) -> Vec<f64> {
    let np = nodes.len();
    let mut c = vec![vec![0.0; k + 1]; np];
    let mut c1 = 1.0;
    let mut c4 = nodes[0] - z0;
    c[0][0] = 1.0;
    for i in 1..np {
        let mn = i.min(k);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = nodes[i] - z0;
        for j in 0..i {
            let c3 = nodes[i] - nodes[j];
            c2 *= c3;
            if j == i - 1 {
                for m in (1..=mn).rev() {
                    c[i][m] = c1 * (m as f64 * c[i - 1][m - 1] - c5 * c[i - 1][m]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for m in (1..=mn).rev() {
                c[j][m] = (c4 * c[j][m] - m as f64 * c[j][m - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    c.into_iter().map(|row| row[k]).collect()
}

/// Largest `|∂ᵏu/∂tᵏ(x, 0) − φ_k(x)|` over `points`, with the derivative
/// taken by a fourth-order one-sided stencil on `t = 0, eps, 2eps, …`.
pub fn initial_probe(
    u: &SolutionEvaluator,
    data: &InitialData,
    k: usize,
    eps: f64,
    points: &[Vec<f64>],
) -> Result<f64> {
    if k > 3 {
        return Err(BiwaveError::InvalidConfig(format!("derivative order {k} not in 0..=3")));
    }
    if !(eps.is_finite() && eps > 0.0) {
        return Err(BiwaveError::InvalidConfig(format!("probe spacing must be positive, got {eps}")));
    }
    if data.dim() != u.dim() {
        return Err(BiwaveError::DimensionMismatch {
            expected: u.dim(),
            got: data.dim(),
        });
    }
    let count = if k == 0 { 1 } else { k + 4 };
    let nodes: Vec<f64> = (0..count).map(|j| j as f64).collect();
    let weights = fd_weights(k, &nodes, 0.0);
    let scale = eps.powi(k as i32);
    let mut worst: f64 = 0.0;
    for x in points {
        let mut d = 0.0;
        for (j, w) in weights.iter().enumerate() {
            if *w != 0.0 {
                d += w * u.eval(x, j as f64 * eps)?;
            }
        }
        let target = data.phi(k).eval(x)?;
        worst = worst.max((d / scale - target).abs());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{make_params, BiwaveParams, ScalarField, TrigPoly};

    fn probes(n: usize) -> Vec<(Vec<f64>, f64)> {
        (0..5)
            .map(|i| ((0..n).map(|j| 0.3 * i as f64 - 0.2 * j as f64).collect(), 0.2 + 0.3 * i as f64))
            .collect()
    }

    fn params(n: usize) -> BiwaveParams {
        make_params(1.0, 0.5, n).unwrap()
    }

    #[test]
    fn fornberg_weights() {
        let w = fd_weights(2, &[-1.0, 0.0, 1.0], 0.0);
        for (got, want) in w.iter().zip([1.0, -2.0, 1.0]) {
            assert!((got - want).abs() < 1e-14);
        }
        let w = fd_weights(1, &[0.0, 1.0, 2.0], 0.0);
        for (got, want) in w.iter().zip([-1.5, 2.0, -0.5]) {
            assert!((got - want).abs() < 1e-14);
        }
    }

    #[test]
    fn residual_examples() {
        let c = SolutionEvaluator::from_fn(params(2), |_, _| 3.5);
        assert!(biwave_residual(&c, &probes(2), DEFAULT_RESIDUAL_H).unwrap().max_abs < 1e-10);

        // Dyadic probes and step keep every sample of t·x₁ exact.
        let lin = SolutionEvaluator::from_fn(params(2), |x, t| t * x[0]);
        let dyadic: Vec<(Vec<f64>, f64)> =
            (0..5).map(|i| (vec![0.25 * i as f64 - 0.5, 0.125], 0.25 + 0.375 * i as f64)).collect();
        assert!(biwave_residual(&lin, &dyadic, 1.0 / 128.0).unwrap().max_abs < 1e-9);

        let a = 1.0;
        let wave = SolutionEvaluator::from_fn(params(1), move |x, t| (x[0] - a * t).cos());
        let r = biwave_residual(&wave, &probes(1), DEFAULT_RESIDUAL_H).unwrap();
        assert!(r.relative < 1e-6, "{r:?}");
        assert_eq!(r.probes, 5);
    }

    #[test]
    fn residual_rejects_early_probes() {
        let c = SolutionEvaluator::from_fn(params(1), |_, _| 1.0);
        let err = biwave_residual(&c, &[(vec![0.0], 0.01)], 1e-2).unwrap_err();
        assert_eq!(err.code(), "stencil-out-of-domain");
    }

    #[test]
    fn residual_converges_at_fourth_order() {
        // u = cos x cos 3t: ∂t⁴ = 81u, ∂t²Δ = 9u, Δ² = u.
        let p = params(1);
        let u = SolutionEvaluator::from_fn(p, |x, t| x[0].cos() * (3.0 * t).cos());
        let (a2, b2) = (1.0, 0.25);
        let x = 0.4f64;
        let t = 0.9f64;
        let exact = (81.0 - (a2 + b2) * 9.0 + a2 * b2) * x.cos() * (3.0 * t).cos();
        let errs: Vec<f64> = [0.04, 0.02, 0.01]
            .iter()
            .map(|&h| {
                let r = biwave_residual(&u, &[(vec![x], t)], h).unwrap();
                (r.max_abs - exact.abs()).abs()
            })
            .collect();
        let order = ((errs[0] / errs[2]).log2()) / 2.0;
        assert!(order >= 3.5, "observed order {order}, errors {errs:?}");
    }

    #[test]
    fn compare_examples() {
        let p = params(1);
        let u1 = SolutionEvaluator::from_fn(p, |x, t| x[0].sin() * t);
        let u2 = SolutionEvaluator::from_fn(p, |x, t| x[0].sin() * t + 0.5);
        let grid = EvalGrid::new(vec![vec![-1.0, 0.0, 1.0]], vec![0.0, 1.0]).unwrap();
        assert_eq!(compare(&u1, &u1, &grid).unwrap(), ErrorNorms { max: 0.0, mean: 0.0 });
        let d = compare(&u1, &u2, &grid).unwrap();
        assert!((d.max - 0.5).abs() < 1e-15 && (d.mean - 0.5).abs() < 1e-15);
        assert_eq!(d, compare(&u2, &u1, &grid).unwrap());
        let other = SolutionEvaluator::from_fn(params(2), |_, _| 0.0);
        assert_eq!(compare(&u1, &other, &grid).unwrap_err().code(), "dimension-mismatch");
    }

    #[test]
    fn probe_on_zero_data() {
        let p = params(1);
        let z = SolutionEvaluator::from_fn(p, |_, _| 0.0);
        for k in 0..4 {
            let d = initial_probe(&z, &InitialData::zero(1), k, DEFAULT_PROBE_EPS, &[vec![0.3]]).unwrap();
            assert!(d < 1e-10);
        }
    }

    #[test]
    fn probe_recovers_taylor_data() {
        let p = params(1);
        let data = InitialData::new(
            TrigPoly::cos(&[1]).unwrap().into(),
            TrigPoly::sin(&[1]).unwrap().into(),
            ScalarField::zero(1),
            TrigPoly::cos(&[2]).unwrap().into(),
        )
        .unwrap();
        let d2 = data.clone();
        let u = SolutionEvaluator::from_fn(p, move |x, t| d2.taylor(x, t));
        let pts = vec![vec![0.0], vec![1.1]];
        assert!(initial_probe(&u, &data, 0, DEFAULT_PROBE_EPS, &pts).unwrap() < 1e-15);
        for k in 1..4 {
            assert!(initial_probe(&u, &data, k, DEFAULT_PROBE_EPS, &pts).unwrap() < 1e-6);
        }
    }
}
