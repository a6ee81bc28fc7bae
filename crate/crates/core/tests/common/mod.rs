#![allow(dead_code)]

use quantum_otto::{BlochVector, CycleSpec};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Spectrum from a flat Dirichlet draw, polarization along a random axis.
pub fn random_state(rng: &mut ChaCha8Rng) -> BlochVector {
    let mut w: [f64; 4] = std::array::from_fn(|_| -rng.random::<f64>().max(1e-300).ln());
    let sum: f64 = w.iter().sum();
    w.iter_mut().for_each(|x| *x /= sum);
    if w[3] < w[0] {
        w.swap(0, 3);
    }
    let axis = [
        rng.random::<f64>() - 0.5,
        rng.random::<f64>() - 0.5,
        rng.random::<f64>() - 0.5,
    ];
    BlochVector::from_spectrum(w, axis).unwrap()
}

/// Mixes in states close to the boundary of the physical set.
pub fn random_state_with_edges(rng: &mut ChaCha8Rng) -> BlochVector {
    let b = random_state(rng);
    if rng.random_bool(0.3) {
        let mut l = quantum_otto::algebra::vn_eigenvalues(&b).lambdas;
        let k = rng.random_range(0..4);
        l[k] = 0.0;
        let s: f64 = l.iter().sum();
        l.iter_mut().for_each(|x| *x /= s);
        if l[3] < l[0] {
            l.swap(0, 3);
        }
        return BlochVector::from_spectrum(l, b.polarization()).unwrap_or(b);
    }
    b
}

pub fn random_spec(rng: &mut ChaCha8Rng) -> CycleSpec {
    CycleSpec {
        t_cold: rng.random_range(0.5..3.0),
        t_hot: rng.random_range(4.0..12.0),
        omega_a: rng.random_range(3.0..7.0),
        omega_b: rng.random_range(8.0..15.0),
        j: rng.random_range(0.5..2.5),
        conductance_cold: rng.random_range(0.1..1.5),
        conductance_hot: rng.random_range(0.1..1.5),
        dephasing_cold: rng.random_range(0.0..0.02),
        dephasing_hot: rng.random_range(0.0..0.02),
        tau_cold: rng.random_range(0.1..3.0),
        tau_hot: rng.random_range(0.1..3.0),
        tau_ab: rng.random_range(0.01..0.5),
        tau_ba: rng.random_range(0.01..0.5),
    }
}

/// Ordinary least squares `y = a + b x`; returns `(a, b, R²)`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|v| (v - my).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = x.iter().zip(y).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum();
    (intercept, slope, 1.0 - ss_res / syy)
}
