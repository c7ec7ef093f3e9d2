mod common;

use biwave_core::oracle::{closed_form_coefficients, oracle_imaginary_residue};
use biwave_core::*;
use common::*;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::SeedableRng;

const DOCUMENTED: [&str; 5] = [
    "non-finite-speed",
    "non-positive-speed",
    "degenerate-speeds",
    "ordering",
    "invalid-dimension",
];

fn any_speed() -> impl Strategy<Value = f64> {
    prop_oneof![
        -5.0..5.0f64,
        Just(0.0),
        Just(f64::NAN),
        Just(f64::INFINITY),
        Just(-f64::INFINITY),
        Just(1.0),
    ]
}

proptest! {
    #[test]
    fn make_params_is_total(a in any_speed(), b in any_speed(), n in 0usize..10) {
        match make_params(a, b, n) {
            Ok(p) => {
                prop_assert!(a.is_finite() && b.is_finite() && n >= 1);
                prop_assert!(a > 0.0 && b > 0.0 && a * a > b * b);
                prop_assert_eq!(p.n(), n);
            }
            Err(e) => prop_assert!(DOCUMENTED.contains(&e.code()), "{}", e.code()),
        }
    }

    #[test]
    fn equal_speeds_are_degenerate(a in 0.01..10.0f64) {
        prop_assert_eq!(make_params(a, a, 2).unwrap_err().code(), "degenerate-speeds");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn mode_coefficients_reproduce_data(
        xi in 0.05..6.0f64,
        re in proptest::array::uniform4(-1.0..1.0f64),
        im in proptest::array::uniform4(-1.0..1.0f64),
        b in 0.1..0.9f64,
    ) {
        let p = make_params(1.0, b, 1).unwrap();
        let spec: [Complex64; 4] = std::array::from_fn(|j| Complex64::new(re[j], im[j]));
        let m = mode_coefficients(xi, spec, &p).unwrap();
        let closed = closed_form_coefficients(xi, spec, &p);
        prop_assert_eq!(m.c, closed);
        for (j, want) in spec.iter().enumerate() {
            let d = m.derivative(&p, 0.0, j as u32);
            let tol = 1e-12 * (1.0 + want.norm()) * (1.0 + xi).powi(3) / (b * b);
            prop_assert!((d - want).norm() < tol, "j={} {} vs {}", j, d, want);
        }
    }

    #[test]
    fn oracle_mode_solves_fourth_order_ode(
        xi in 0.2..3.0f64,
        re in proptest::array::uniform4(-1.0..1.0f64),
        t in 0.5..3.0f64,
    ) {
        let p = make_params(1.0, 0.5, 1).unwrap();
        let spec: [Complex64; 4] = std::array::from_fn(|j| Complex64::new(re[j], 0.0));
        let m = mode_coefficients(xi, spec, &p).unwrap();
        let y = |s: f64| m.value(&p, s).re;
        // fourth-order central differences of the mode amplitude
        let h = 2e-2;
        let d2 = (-y(t - 2.0 * h) + 16.0 * y(t - h) - 30.0 * y(t) + 16.0 * y(t + h) - y(t + 2.0 * h))
            / (12.0 * h * h);
        let d4 = (-y(t - 3.0 * h) + 12.0 * y(t - 2.0 * h) - 39.0 * y(t - h) + 56.0 * y(t)
            - 39.0 * y(t + h) + 12.0 * y(t + 2.0 * h) - y(t + 3.0 * h))
            / (6.0 * h.powi(4));
        let (a2, b2) = (p.a().powi(2), p.b().powi(2));
        let x2 = xi * xi;
        let lead = (a2 * x2).powi(2) * y(t).abs().max(1e-3) + d4.abs();
        let r = d4 + (a2 + b2) * x2 * d2 + a2 * b2 * x2 * x2 * y(t);
        prop_assert!(r.abs() < 1e-6 * lead.max(1.0) * 10.0, "residual {} lead {}", r, lead);
    }

    #[test]
    fn oracle_is_real(seed in 0u64..1000) {
        let mut rng = StdRng::seed_from_u64(seed);
        let n = 1 + (seed as usize % 3);
        let p = make_params(1.0, 0.5, n).unwrap();
        let data = random_data(&mut rng, n, 3, 3);
        let pts: Vec<(Vec<f64>, f64)> = (0..8).map(|i| (vec![0.37 * i as f64; n], 0.25 * i as f64)).collect();
        prop_assert!(oracle_imaginary_residue(&data, &p, &pts).unwrap() < 1e-10);
    }
}

fn combine(alpha: f64, d1: &InitialData, beta: f64, d2: &InitialData) -> InitialData {
    let t1 = d1.to_trig().unwrap();
    let t2 = d2.to_trig().unwrap();
    let f: [ScalarField; 4] =
        std::array::from_fn(|j| trig(t1[j].scale(alpha).unwrap().add(&t2[j].scale(beta).unwrap()).unwrap()));
    data4(f)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn solvers_are_linear(seed in 0u64..1000, alpha in -2.0..2.0f64, beta in -2.0..2.0f64) {
        let mut rng = StdRng::seed_from_u64(seed);
        for n in [1usize, 2, 3] {
            let p = make_params(1.0, 0.5, n).unwrap();
            let cfg = SolverConfig { sphere_level: Some(8), interval_order: 12, ..SolverConfig::default() };
            let d1 = random_data(&mut rng, n, 1, 2);
            let d2 = random_data(&mut rng, n, 1, 2);
            let sum = combine(alpha, &d1, beta, &d2);
            let u1 = solve_homogeneous(d1, p, cfg).unwrap();
            let u2 = solve_homogeneous(d2, p, cfg).unwrap();
            let us = solve_homogeneous(sum, p, cfg).unwrap();
            let x = vec![0.3; n];
            for t in [0.4, 1.3] {
                let lhs = us.eval(&x, t).unwrap();
                let rhs = alpha * u1.eval(&x, t).unwrap() + beta * u2.eval(&x, t).unwrap();
                prop_assert!((lhs - rhs).abs() < 1e-10, "n={} {} vs {}", n, lhs, rhs);
            }
        }
    }

    #[test]
    fn solvers_are_translation_equivariant(seed in 0u64..1000, shift in -2.0..2.0f64) {
        let mut rng = StdRng::seed_from_u64(seed);
        for n in [1usize, 2, 3] {
            let p = make_params(1.0, 0.5, n).unwrap();
            let cfg = SolverConfig { sphere_level: Some(8), interval_order: 12, ..SolverConfig::default() };
            let data = random_data(&mut rng, n, 1, 2);
            let dx: Vec<f64> = (0..n).map(|i| shift / (i + 1) as f64).collect();
            let moved: [ScalarField; 4] = std::array::from_fn(|j| {
                trig(data.to_trig().unwrap()[j].translate(&dx).unwrap())
            });
            let u = solve_homogeneous(data, p, cfg).unwrap();
            let v = solve_homogeneous(data4(moved), p, cfg).unwrap();
            let x = vec![-0.2; n];
            let xs: Vec<f64> = x.iter().zip(&dx).map(|(a, b)| a + b).collect();
            for t in [0.5, 1.7] {
                let d = (v.eval(&xs, t).unwrap() - u.eval(&x, t).unwrap()).abs();
                prop_assert!(d < 1e-10, "n={} diff {:e}", n, d);
            }
        }
    }
}
