//! Independent reference solutions built mode by mode in Fourier space.
//!
//! For trigonometric data every mode `exp(i ω k·x)` evolves as
//! `C1 cos(aξt) + C2 sin(aξt) + C3 cos(bξt) + C4 sin(bξt)` with `ξ = |ω k|`,
//! and the zero mode as the cubic Taylor polynomial of its data. Forced modes
//! are integrated with an adaptive Runge–Kutta scheme.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{BiwaveError, Result};
use crate::field::{BiwaveParams, ForcingField, InitialData, Provenance, SolutionEvaluator, TrigPoly};
use crate::ode::{dopri5, OdeOptions};

/// Default local tolerance of the forced-mode integrator.
pub const DEFAULT_ODE_TOL: f64 = 1e-11;

const SELF_TEST_TOL: f64 = 1e-10;

/// Coefficients of one oscillatory mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeCoefficients {
    pub xi: f64,
    pub c: [Complex64; 4],
}

impl ModeCoefficients {
    /// The `order`-th time derivative of the mode amplitude at `t`.
    pub fn derivative(&self, params: &BiwaveParams, t: f64, order: u32) -> Complex64 {
        let (wa, wb) = (params.a() * self.xi, params.b() * self.xi);
        // d^j/dt^j cos(wt) = w^j cos(wt + jπ/2), likewise for sin.
        let shift = order as f64 * std::f64::consts::FRAC_PI_2;
        let pa = wa.powi(order as i32);
        let pb = wb.powi(order as i32);
        self.c[0] * pa * (wa * t + shift).cos()
            + self.c[1] * pa * (wa * t + shift).sin()
            + self.c[2] * pb * (wb * t + shift).cos()
            + self.c[3] * pb * (wb * t + shift).sin()
    }

    pub fn value(&self, params: &BiwaveParams, t: f64) -> Complex64 {
        self.derivative(params, t, 0)
    }
}

/// Closed-form solution of the 4×4 initial-value system.
pub fn closed_form_coefficients(xi: f64, spec: [Complex64; 4], params: &BiwaveParams) -> [Complex64; 4] {
    let (a, b) = (params.a(), params.b());
    let (a2, b2) = (a * a, b * b);
    let gap = a2 - b2;
    let x2 = xi * xi;
    let x3 = x2 * xi;
    let [p0, p1, p2, p3] = spec;
    [
        -(p0 * (b2 * x2) + p2) / (gap * x2),
        -(p1 * (b2 * x2) + p3) / ((a * gap) * x3),
        (p0 * (a2 * x2) + p2) / (gap * x2),
        (p1 * (a2 * x2) + p3) / ((b * gap) * x3),
    ]
}

fn solve4(mut m: [[Complex64; 4]; 4], mut rhs: [Complex64; 4]) -> [Complex64; 4] {
    for col in 0..4 {
        let pivot = (col..4)
            .max_by(|&i, &j| m[i][col].norm().total_cmp(&m[j][col].norm()))
            .unwrap_or(col);
        m.swap(col, pivot);
        rhs.swap(col, pivot);
        for row in col + 1..4 {
            let factor = m[row][col] / m[col][col];
            let pivot_row = m[col];
            for (dst, v) in m[row][col..].iter_mut().zip(&pivot_row[col..]) {
                *dst -= factor * v;
            }
            let v = rhs[col];
            rhs[row] -= factor * v;
        }
    }
    let mut out = [Complex64::default(); 4];
    for row in (0..4).rev() {
        let mut acc = rhs[row];
        for k in row + 1..4 {
            acc -= m[row][k] * out[k];
        }
        out[row] = acc / m[row][row];
    }
    out
}

/// Solve for the mode coefficients matching `spec = (φ̂0, φ̂1, φ̂2, φ̂3)` and
/// cross-check the linear solve against the closed form.
pub fn mode_coefficients(xi: f64, spec: [Complex64; 4], params: &BiwaveParams) -> Result<ModeCoefficients> {
    if !xi.is_finite() {
        return Err(BiwaveError::NonFinite("mode frequency"));
    }
    if xi == 0.0 {
        return Err(BiwaveError::ZeroFrequency);
    }
    let xi = xi.abs();
    let (wa, wb) = (params.a() * xi, params.b() * xi);
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::default();
    let m = [
        [one, zero, one, zero],
        [zero, one * wa, zero, one * wb],
        [-one * wa * wa, zero, -one * wb * wb, zero],
        [zero, -one * wa.powi(3), zero, -one * wb.powi(3)],
    ];
    let numeric = solve4(m, spec);
    let closed = closed_form_coefficients(xi, spec, params);
    let scale = closed.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let diff = numeric
        .iter()
        .zip(&closed)
        .map(|(n, c)| (n - c).norm())
        .fold(0.0, f64::max);
    if scale > 0.0 && diff > SELF_TEST_TOL * scale {
        return Err(BiwaveError::OracleSelfTest(diff / scale));
    }
    Ok(ModeCoefficients { xi, c: closed })
}

/// Zero-mode evolution `φ̂0 + φ̂1 t + φ̂2 t²/2 + φ̂3 t³/6`.
pub fn zero_mode(spec: [Complex64; 4], t: f64) -> Complex64 {
    spec[0] + spec[1] * t + spec[2] * (t * t / 2.0) + spec[3] * (t * t * t / 6.0)
}

#[derive(Debug, Clone)]
struct OracleMode {
    wavevector: Vec<f64>,
    /// `None` for the zero mode.
    coefficients: Option<ModeCoefficients>,
    spec: [Complex64; 4],
}

fn common_base_frequency(polys: &[&TrigPoly]) -> Result<f64> {
    let mut base = None;
    for p in polys.iter().filter(|p| !p.is_empty()) {
        match base {
            None => base = Some(p.base_frequency()),
            Some(w) if w != p.base_frequency() => {
                return Err(BiwaveError::IncompatibleTrigPoly(format!(
                    "base frequencies {w} and {}",
                    p.base_frequency()
                )))
            }
            _ => {}
        }
    }
    Ok(base.unwrap_or(1.0))
}

fn build_modes(data: &InitialData, params: &BiwaveParams) -> Result<Vec<OracleMode>> {
    let polys = data.to_trig()?;
    let base = common_base_frequency(&polys.iter().collect::<Vec<_>>())?;
    let mut specs: BTreeMap<Vec<i32>, [Complex64; 4]> = BTreeMap::new();
    for (j, p) in polys.iter().enumerate() {
        for mode in p.modes() {
            specs.entry(mode.k.clone()).or_default()[j] += mode.amplitude;
        }
    }
    specs
        .into_iter()
        .map(|(k, spec)| {
            let wavevector: Vec<f64> = k.iter().map(|&v| base * v as f64).collect();
            let xi = wavevector.iter().map(|v| v * v).sum::<f64>().sqrt();
            let coefficients = if xi == 0.0 {
                None
            } else {
                Some(mode_coefficients(xi, spec, params)?)
            };
            Ok(OracleMode {
                wavevector,
                coefficients,
                spec,
            })
        })
        .collect()
}

fn sum_modes(modes: &[OracleMode], params: &BiwaveParams, x: &[f64], t: f64) -> Complex64 {
    modes
        .iter()
        .map(|m| {
            let amp = match &m.coefficients {
                Some(c) => c.value(params, t),
                None => zero_mode(m.spec, t),
            };
            let phase: f64 = m.wavevector.iter().zip(x).map(|(k, v)| k * v).sum();
            amp * Complex64::from_polar(1.0, phase)
        })
        .sum()
}

/// Spectral reference solution for trigonometric data.
pub fn oracle_solution(data: &InitialData, params: &BiwaveParams) -> Result<SolutionEvaluator> {
    if data.dim() != params.n() {
        return Err(BiwaveError::DimensionMismatch {
            expected: params.n(),
            got: data.dim(),
        });
    }
    let modes = Arc::new(build_modes(data, params)?);
    let p = *params;
    Ok(SolutionEvaluator::new(*params, Provenance::Oracle, move |x, t| {
        Ok(sum_modes(&modes, &p, x, t).re)
    }))
}

/// Imaginary residue `max |Im u|` of the oracle sum at the given points; it
/// vanishes for conjugate-symmetric data up to rounding.
pub fn oracle_imaginary_residue(
    data: &InitialData,
    params: &BiwaveParams,
    points: &[(Vec<f64>, f64)],
) -> Result<f64> {
    let modes = build_modes(data, params)?;
    Ok(points
        .iter()
        .map(|(x, t)| sum_modes(&modes, params, x, *t).im.abs())
        .fold(0.0, f64::max))
}

/// Amplitude `y(t)` of a forced mode:
/// `y'''' + (a²+b²)ξ² y'' + a²b²ξ⁴ y = g(t)` with `y^(j)(0) = spec[j]`.
pub fn forced_mode_solution(
    xi: f64,
    g: &dyn Fn(f64) -> Complex64,
    spec: [Complex64; 4],
    params: &BiwaveParams,
    t: f64,
    tol: f64,
) -> Result<Complex64> {
    if !(tol.is_finite() && tol > 0.0) {
        return Err(BiwaveError::InvalidConfig(format!("ODE tolerance must be positive, got {tol}")));
    }
    if !(t.is_finite() && xi.is_finite()) {
        return Err(BiwaveError::NonFinite("forced mode input"));
    }
    if t < 0.0 {
        return Err(BiwaveError::NegativeTime(t));
    }
    let (a2, b2) = (params.a().powi(2), params.b().powi(2));
    let x2 = xi * xi;
    let c2 = (a2 + b2) * x2;
    let c0 = a2 * b2 * x2 * x2;
    // State: (y, y', y'', y''') real parts, then imaginary parts.
    let mut y0 = [0.0; 8];
    for j in 0..4 {
        y0[j] = spec[j].re;
        y0[4 + j] = spec[j].im;
    }
    let rhs = |s: f64, y: &[f64; 8]| {
        let gv = g(s);
        [
            y[1],
            y[2],
            y[3],
            gv.re - c2 * y[2] - c0 * y[0],
            y[5],
            y[6],
            y[7],
            gv.im - c2 * y[6] - c0 * y[4],
        ]
    };
    let y = dopri5(rhs, 0.0, y0, t, &OdeOptions::with_tolerance(tol))?;
    Ok(Complex64::new(y[0], y[4]))
}

/// A wavevector and its amplitude within one `|k|` shell.
type ShellMode = (Vec<f64>, Complex64);

/// Reference solution of the forced problem for trigonometric data and
/// separable forcing `Σ g_j(t) S_j(x)` with trigonometric `S_j`.
///
/// Each distinct `|k|` of each forcing term gets one real mode integration
/// per evaluation.
pub fn forced_oracle_solution(
    data: &InitialData,
    forcing: &ForcingField,
    params: &BiwaveParams,
    tol: f64,
) -> Result<SolutionEvaluator> {
    let homogeneous = oracle_solution(data, params)?;
    if forcing.dim() != params.n() {
        return Err(BiwaveError::DimensionMismatch {
            expected: params.n(),
            got: forcing.dim(),
        });
    }
    let terms = match forcing {
        ForcingField::Zero { .. } => Vec::new(),
        ForcingField::Separable { terms, .. } => terms.clone(),
        ForcingField::Closure { .. } => return Err(BiwaveError::NotTrigPoly("forcing")),
    };
    // Group each term's modes by |ω k|.
    let mut groups = Vec::new();
    for term in &terms {
        let mut by_radius: Vec<(f64, Vec<ShellMode>)> = Vec::new();
        for mode in term.space.modes() {
            let w = term.space.wavevector(&mode.k);
            let xi = w.iter().map(|v| v * v).sum::<f64>().sqrt();
            match by_radius.iter_mut().find(|(r, _)| (*r - xi).abs() <= 1e-14 * xi.max(1.0)) {
                Some((_, list)) => list.push((w, mode.amplitude)),
                None => by_radius.push((xi, vec![(w, mode.amplitude)])),
            }
        }
        groups.push((term.time.clone(), by_radius));
    }
    let p = *params;
    let forcing = forcing.clone();
    Ok(SolutionEvaluator::new(*params, Provenance::Oracle, move |x, t| {
        forcing.check_horizon(t)?;
        let mut acc = homogeneous.eval(x, t)?;
        for (time, by_radius) in &groups {
            let g = |s: f64| Complex64::new(time.value(s), 0.0);
            for (xi, list) in by_radius {
                let y = forced_mode_solution(*xi, &g, [Complex64::default(); 4], &p, t, tol)?;
                let spatial: Complex64 = list
                    .iter()
                    .map(|(w, c)| {
                        let phase: f64 = w.iter().zip(x).map(|(k, v)| k * v).sum();
                        c * Complex64::from_polar(1.0, phase)
                    })
                    .sum();
                acc += (spatial * y).re;
            }
        }
        Ok(acc)
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{make_params, ScalarField};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn coefficients_reproduce_initial_derivatives() {
        let p = make_params(2.0, 1.0, 3).unwrap();
        let spec = [c(1.0), Complex64::new(0.5, -0.2), c(-3.0), Complex64::new(0.0, 2.0)];
        for xi in [0.3, 1.0, 4.5] {
            let m = mode_coefficients(xi, spec, &p).unwrap();
            for (j, want) in spec.iter().enumerate() {
                let d = m.derivative(&p, 0.0, j as u32);
                assert!((d - want).norm() < 1e-11 * (1.0 + xi.powi(3)));
            }
        }
    }

    #[test]
    fn coefficient_examples() {
        let p = make_params(2.0, 1.0, 1).unwrap();
        let m = mode_coefficients(1.0, [c(1.0), c(0.0), c(0.0), c(0.0)], &p).unwrap();
        let want = [-1.0 / 3.0, 0.0, 4.0 / 3.0, 0.0];
        for (got, w) in m.c.iter().zip(want) {
            assert!((got - c(w)).norm() < 1e-14);
        }
        let pure = mode_coefficients(1.0, [c(1.0), c(0.0), c(-4.0), c(0.0)], &p).unwrap();
        assert!((pure.c[0] - c(1.0)).norm() < 1e-14);
        assert!(pure.c[2].norm() < 1e-14);
        assert_eq!(
            mode_coefficients(0.0, [c(1.0); 4], &p).unwrap_err().code(),
            "zero-frequency"
        );
    }

    #[test]
    fn zero_mode_polynomial() {
        let v = zero_mode([c(1.0), c(2.0), c(3.0), c(6.0)], 2.0);
        assert!((v - c(1.0 + 4.0 + 6.0 + 8.0)).norm() < 1e-14);
    }

    #[test]
    fn oracle_matches_worked_example_closed_form() {
        let p = make_params(1.0, 0.5, 1).unwrap();
        let data = InitialData::new(
            ScalarField::zero(1),
            TrigPoly::sin(&[1]).unwrap().into(),
            TrigPoly::cos(&[1]).unwrap().into(),
            ScalarField::zero(1),
        )
        .unwrap();
        let u = oracle_solution(&data, &p).unwrap();
        let pi = std::f64::consts::PI;
        assert!((u.eval(&[0.0], pi).unwrap() - 4.0 / 3.0).abs() < 1e-13);
        assert!((u.eval(&[pi / 2.0], pi).unwrap() - 8.0 / 3.0).abs() < 1e-13);
    }

    #[test]
    fn forced_mode_examples() {
        let p = make_params(1.0, 0.5, 1).unwrap();
        let one = |_: f64| c(1.0);
        let y = forced_mode_solution(0.0, &one, [c(0.0); 4], &p, 2.0, DEFAULT_ODE_TOL).unwrap();
        assert!((y - c(2.0 / 3.0)).norm() < 1e-10);

        // Unforced mode agrees with the closed form.
        let zero = |_: f64| c(0.0);
        let spec = [c(0.3), c(-1.0), c(2.0), Complex64::new(0.0, 0.5)];
        let y = forced_mode_solution(1.7, &zero, spec, &p, 2.5, DEFAULT_ODE_TOL).unwrap();
        let exact = mode_coefficients(1.7, spec, &p).unwrap().value(&p, 2.5);
        assert!((y - exact).norm() < 1e-8);
    }

    #[test]
    fn forced_oracle_constant_forcing() {
        use crate::field::{ForcingTerm, TimeProfile};
        let p = make_params(1.0, 0.5, 1).unwrap();
        let f = ForcingField::separable(
            1,
            vec![ForcingTerm {
                space: TrigPoly::constant(1, 1.0).unwrap(),
                time: TimeProfile::constant(1.0),
            }],
        )
        .unwrap();
        let u = forced_oracle_solution(&InitialData::zero(1), &f, &p, DEFAULT_ODE_TOL).unwrap();
        for t in [0.5, 1.0, 2.0] {
            assert!((u.eval(&[0.3], t).unwrap() - t.powi(4) / 24.0).abs() < 1e-10);
        }
    }
}
