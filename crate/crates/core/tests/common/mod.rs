#![allow(dead_code)]

use biwave_core::{InitialData, ScalarField, TrigPoly};
use rand::rngs::StdRng;
use rand::Rng;

/// Random nonzero integer wavevector with Euclidean norm at most `max`.
pub fn random_k(rng: &mut StdRng, n: usize, max: i32) -> Vec<i32> {
    loop {
        let k: Vec<i32> = (0..n).map(|_| rng.gen_range(-max..=max)).collect();
        let norm2: i32 = k.iter().map(|v| v * v).sum();
        if norm2 > 0 && norm2 <= max * max {
            return k;
        }
    }
}

/// Random real trig polynomial with `terms` cos/sin pairs on the given wavevectors.
pub fn random_trig(rng: &mut StdRng, n: usize, ks: &[Vec<i32>]) -> TrigPoly {
    let terms: Vec<(Vec<i32>, f64, f64)> = ks
        .iter()
        .map(|k| (k.clone(), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    TrigPoly::from_real_terms(n, 1.0, &terms).unwrap()
}

pub fn random_data(rng: &mut StdRng, n: usize, modes: usize, kmax: i32) -> InitialData {
    let ks: Vec<Vec<i32>> = (0..modes).map(|_| random_k(rng, n, kmax)).collect();
    let f: Vec<ScalarField> = (0..4).map(|_| random_trig(rng, n, &ks).into()).collect();
    InitialData::new(f[0].clone(), f[1].clone(), f[2].clone(), f[3].clone()).unwrap()
}

pub fn amplitude_scale(data: &InitialData) -> f64 {
    data.to_trig()
        .unwrap()
        .iter()
        .map(TrigPoly::amplitude_scale)
        .fold(0.0, f64::max)
}

pub fn trig(p: TrigPoly) -> ScalarField {
    ScalarField::Trig(p)
}

pub fn data4(f: [ScalarField; 4]) -> InitialData {
    let [a, b, c, d] = f;
    InitialData::new(a, b, c, d).unwrap()
}
