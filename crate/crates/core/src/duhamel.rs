//! Nonhomogeneous problem by Duhamel's principle:
//!
//! ```text
//! u(x, t) = ũ(x, t) + ∫_0^t ω(x, t, τ) dτ,
//! ω(·, ·, τ) = solution with data (0, 0, 0, f(·, τ)) evaluated at time t − τ.
//! ```

use std::sync::Arc;

use crate::error::{BiwaveError, Result};
use crate::field::{BiwaveParams, ForcingField, InitialData, Provenance, SolutionEvaluator};
use crate::quadrature::cached_gauss_legendre;
use crate::solvers::{CauchySolver, SolverConfig};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DuhamelConfig {
    /// Gauss–Legendre order in τ; `None` uses `max(16, ⌈8t⌉)`.
    pub tau_order: Option<usize>,
    pub solver: SolverConfig,
}

impl DuhamelConfig {
    pub fn tau_order_for(&self, t: f64) -> usize {
        self.tau_order
            .unwrap_or_else(|| 16usize.max((8.0 * t).ceil() as usize))
    }
}

pub fn solve_nonhomogeneous(
    data: InitialData,
    forcing: ForcingField,
    params: BiwaveParams,
    cfg: DuhamelConfig,
) -> Result<SolutionEvaluator> {
    if let Some(order) = cfg.tau_order.filter(|&o| o < 4) {
        return Err(BiwaveError::InvalidOrder { min: 4, got: order });
    }
    for got in [data.dim(), forcing.dim()] {
        if got != params.n() {
            return Err(BiwaveError::DimensionMismatch {
                expected: params.n(),
                got,
            });
        }
    }
    let solver = Arc::new(CauchySolver::new(params, cfg.solver)?);
    let homogeneous_zero = data.fields().iter().all(|f| f.is_zero());
    Ok(SolutionEvaluator::new(params, Provenance::Duhamel, move |x, t| {
        forcing.check_horizon(t)?;
        let mut acc = if homogeneous_zero {
            0.0
        } else {
            solver.evaluate(&data, x, t)?
        };
        if !forcing.is_zero() && t > 0.0 {
            let rule = cached_gauss_legendre(cfg.tau_order_for(t))?;
            acc += rule.try_integrate(0.0, t, |tau| {
                let slice = InitialData::top_derivative(forcing.slice(tau)?);
                solver.evaluate(&slice, x, t - tau)
            })?;
        }
        Ok(acc)
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{make_params, ForcingTerm, TimeProfile, TrigPoly};

    fn constant_forcing(n: usize) -> ForcingField {
        ForcingField::separable(
            n,
            vec![ForcingTerm {
                space: TrigPoly::constant(n, 1.0).unwrap(),
                time: TimeProfile::constant(1.0),
            }],
        )
        .unwrap()
    }

    #[test]
    fn constant_forcing_quartic() {
        let p = make_params(1.0, 0.5, 1).unwrap();
        let u = solve_nonhomogeneous(InitialData::zero(1), constant_forcing(1), p, DuhamelConfig::default())
            .unwrap();
        for t in [0.0, 0.5, 1.0, 2.0] {
            assert!((u.eval(&[0.4], t).unwrap() - t.powi(4) / 24.0).abs() < 1e-8);
        }
    }

    #[test]
    fn zero_forcing_reduces_to_homogeneous() {
        let p = make_params(1.0, 0.5, 1).unwrap();
        let data = InitialData::new(
            crate::field::ScalarField::zero(1),
            TrigPoly::sin(&[1]).unwrap().into(),
            TrigPoly::cos(&[1]).unwrap().into(),
            crate::field::ScalarField::zero(1),
        )
        .unwrap();
        let u = solve_nonhomogeneous(data.clone(), ForcingField::zero(1), p, DuhamelConfig::default()).unwrap();
        let h = crate::solvers::solve_1d(data, p, SolverConfig::default()).unwrap();
        for (x, t) in [(0.0, 1.0), (1.3, 2.2)] {
            assert_eq!(u.eval(&[x], t).unwrap(), h.eval(&[x], t).unwrap());
        }
    }

    #[test]
    fn horizon_is_enforced() {
        let p = make_params(1.0, 0.5, 1).unwrap();
        let f = constant_forcing(1).with_horizon(1.0);
        let u = solve_nonhomogeneous(InitialData::zero(1), f, p, DuhamelConfig::default()).unwrap();
        assert!(u.eval(&[0.0], 0.9).is_ok());
        assert_eq!(u.eval(&[0.0], 1.5).unwrap_err().code(), "forcing-horizon");
    }

    #[test]
    fn tau_order_default() {
        let cfg = DuhamelConfig::default();
        assert_eq!(cfg.tau_order_for(0.5), 16);
        assert_eq!(cfg.tau_order_for(3.1), 25);
    }
}
