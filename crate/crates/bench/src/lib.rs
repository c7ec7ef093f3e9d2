//! Shared fixtures for the benchmarks.

use biwave_core::{InitialData, ScalarField, TrigPoly};

/// Four single-mode fields on the wavevector `(1, 0, ..., -2)`.
pub fn data(n: usize) -> InitialData {
    let mut k = vec![0i32; n];
    k[0] = 1;
    k[n - 1] -= 2;
    let f = |c: f64, s: f64| ScalarField::Trig(TrigPoly::from_real_terms(n, 1.0, &[(k.clone(), c, s)]).unwrap());
    InitialData::new(f(0.5, 0.0), f(0.0, 1.0), f(1.0, 0.2), f(-0.3, 0.4)).unwrap()
}

pub fn point(n: usize) -> Vec<f64> {
    (0..n).map(|i| 0.3 - 0.2 * i as f64).collect()
}
