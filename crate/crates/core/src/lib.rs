//! Exact solutions of the Cauchy problem for the biwave equation
//!
//! ```text
//! (∂²/∂t² − a²Δ)(∂²/∂t² − b²Δ) u = f(x, t),   x ∈ ℝⁿ, t > 0, a² > b² > 0,
//! ```
//!
//! with closed-form solvers for n = 1, odd n and even n, a Duhamel solver for
//! the forced problem, a per-mode spectral reference solution, residual and
//! error checks, and the link to isotropic elastodynamics.

pub mod duhamel;
pub mod elasto;
pub mod error;
pub mod field;
pub mod ode;
pub mod oracle;
pub mod quadrature;
pub mod solvers;
pub mod spherical;
pub mod verification;

pub use duhamel::{solve_nonhomogeneous, DuhamelConfig};
pub use elasto::{cks_displacement, lame_to_speeds, navier_residual, ElasticParams, VectorFieldEvaluator};
pub use error::{BiwaveError, Result};
pub use field::{
    eval_field, linspace, make_params, BiwaveParams, EvalGrid, ForcingField, ForcingTerm, Gaussian,
    InitialData, Provenance, ScalarField, SolutionEvaluator, TimeProfile, TrigMode, TrigPoly,
};
pub use oracle::{forced_mode_solution, forced_oracle_solution, mode_coefficients, oracle_solution, zero_mode};
pub use quadrature::{
    gauss_legendre, integrate_interval, integrate_nested, sphere_surface_rule, weighted_ball_rule,
    NestedBounds, QuadratureRule, RuleDomain,
};
pub use solvers::{
    pure_speed_projection_check, solve_1d, solve_even, solve_homogeneous, solve_odd, CauchySolver,
    SolverConfig,
};
pub use spherical::{modified_spherical_mean, radial_derivative_power, spherical_mean, time_derivative, RadialProfile};
pub use verification::{biwave_residual, compare, initial_probe, ErrorNorms, ResidualReport};
