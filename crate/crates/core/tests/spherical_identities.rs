use biwave_core::quadrature::unit_sphere_area;
use biwave_core::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

#[test]
fn three_dimensional_multipliers() {
    let mut rng = StdRng::seed_from_u64(3);
    let rule = sphere_surface_rule(3, 32).unwrap();
    let a = 1.5;
    for _ in 0..20 {
        let k: Vec<i32> = (0..3).map(|_| rng.gen_range(-3..=3)).collect();
        if k.iter().all(|&v| v == 0) {
            continue;
        }
        let knorm = k.iter().map(|&v| (v * v) as f64).sum::<f64>().sqrt();
        let phi = ScalarField::Trig(TrigPoly::cos(&k).unwrap());
        let x: Vec<f64> = (0..3).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let t = rng.gen_range(0.1..2.0);
        let g = |s: f64| Ok(a * s * spherical_mean(&phi, &x, a * s, &rule)?);
        let plane = phi.value(&x);
        let value = g(t).unwrap();
        assert!((value - plane * (a * knorm * t).sin() / knorm).abs() < 1e-6);
        let slope = time_derivative(&g, t, 1e-3).unwrap() / a;
        assert!((slope - plane * (a * knorm * t).cos()).abs() < 1e-5);
    }
}

#[test]
fn descent_matches_sphere_mean_one_dimension_up() {
    for n in [1usize, 2] {
        let ball = weighted_ball_rule(n, 32).unwrap();
        let sphere = sphere_surface_rule(n + 1, 32).unwrap();
        let mut terms = vec![(vec![1i32; n], 0.8, -0.3)];
        let mut k2 = vec![0i32; n];
        k2[0] = 2;
        terms.push((k2, 0.1, 0.6));
        let phi = TrigPoly::from_real_terms(n, 1.0, &terms).unwrap();
        let lifted_terms: Vec<_> = terms
            .iter()
            .map(|(k, c, s)| {
                let mut k = k.clone();
                k.push(0);
                (k, *c, *s)
            })
            .collect();
        let lifted = TrigPoly::from_real_terms(n + 1, 1.0, &lifted_terms).unwrap();
        let phi = ScalarField::Trig(phi);
        let lifted = ScalarField::Trig(lifted);
        for (x0, t) in [(0.3, 0.5), (-1.2, 1.7), (2.0, 0.05)] {
            let x = vec![x0; n];
            let mut xl = x.clone();
            xl.push(0.7);
            let m = modified_spherical_mean(&phi, &x, t, &ball).unwrap();
            let s = spherical_mean(&lifted, &xl, t, &sphere).unwrap();
            assert!((m - s).abs() < 1e-8, "n={n} t={t}: {m} vs {s}");
        }
    }
}

#[test]
fn spherical_mean_rotation_invariant() {
    // |y − x|² style fields: a rotated plane wave about x has the same mean.
    let rule = sphere_surface_rule(3, 32).unwrap();
    let x = [0.0, 0.0, 0.0];
    let a = ScalarField::Trig(TrigPoly::cos(&[2, 1, 0]).unwrap());
    let b = ScalarField::Trig(TrigPoly::cos(&[0, 2, 1]).unwrap());
    let c = ScalarField::Trig(TrigPoly::cos(&[1, 0, -2]).unwrap());
    for r in [0.3, 1.0, 2.2] {
        let ma = spherical_mean(&a, &x, r, &rule).unwrap();
        assert!((ma - spherical_mean(&b, &x, r, &rule).unwrap()).abs() < 1e-12);
        assert!((ma - spherical_mean(&c, &x, r, &rule).unwrap()).abs() < 1e-12);
    }
}

#[test]
fn spherical_mean_is_linear() {
    let rule = sphere_surface_rule(2, 16).unwrap();
    let f = TrigPoly::sin(&[1, 2]).unwrap();
    let g = TrigPoly::cos(&[3, -1]).unwrap();
    let h = f.scale(2.5).unwrap().add(&g.scale(-0.5).unwrap()).unwrap();
    let x = [0.4, -0.9];
    let m = |p: &TrigPoly| spherical_mean(&ScalarField::Trig(p.clone()), &x, 0.8, &rule).unwrap();
    assert!((m(&h) - (2.5 * m(&f) - 0.5 * m(&g))).abs() < 1e-13);
}

#[test]
fn sphere_rules_kill_linear_functionals() {
    for n in 2..=5 {
        let rule = sphere_surface_rule(n, 6).unwrap();
        let v: Vec<f64> = (0..n).map(|i| 0.3 + i as f64).collect();
        let s: f64 = rule
            .iter()
            .map(|(y, w)| w * y.iter().zip(&v).map(|(a, b)| a * b).sum::<f64>())
            .sum();
        assert!(s.abs() < 1e-12);
        assert!((rule.weight_sum() - unit_sphere_area(n)).abs() < 1e-12 * unit_sphere_area(n));
    }
}
