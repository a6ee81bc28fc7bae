//! Entropies and distances between states.
//!
//! All logarithms are natural. Energy-basis measures use the four diagonal
//! populations of the state in the eigenbasis of `H = ωB1 + JB2`, the two
//! zero-energy states counted separately.

use std::f64::consts::SQRT_2;

use crate::algebra::{
    energy_populations, floored_ln, matrix_function, reconstruct_density, vn_eigenvalues,
    BlochVector, DensityMatrix, LOG_FLOOR, PHYSICALITY_TOL,
};
use crate::error::{invalid, Error, Result};

/// Accepted negative probability in [`measurement_entropy`].
pub const PROBABILITY_TOL: f64 = 1e-12;
/// Accepted normalization defect in [`measurement_entropy`].
pub const NORMALIZATION_TOL: f64 = 1e-10;

fn shannon(p: &[f64]) -> f64 {
    -p.iter().filter(|&&x| x > 0.0).map(|&x| x * x.ln()).sum::<f64>()
}

/// `−Σ p log p` with `0 log 0 = 0`.
pub fn measurement_entropy(p: &[f64]) -> Result<f64> {
    if let Some(&bad) = p.iter().find(|&&x| !(x >= -PROBABILITY_TOL)) {
        return Err(invalid("p", format!("negative probability {bad:e}")));
    }
    let sum: f64 = p.iter().sum();
    if (sum - 1.0).abs() > NORMALIZATION_TOL {
        return Err(Error::NotNormalized { sum });
    }
    Ok(shannon(p))
}

pub fn vn_entropy(b: &BlochVector) -> Result<f64> {
    let spec = vn_eigenvalues(b);
    spec.check_physical()?;
    Ok(shannon(&spec.lambdas))
}

pub fn energy_entropy(b: &BlochVector, omega: f64, j: f64) -> Result<f64> {
    vn_eigenvalues(b).check_physical()?;
    Ok(shannon(&energy_populations(b, omega, j)?))
}

/// Relative entropy `tr ρ(log ρ − log ρ_ref)` with its support diagnosis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionalEntropy {
    /// `+∞` when `ρ` has weight outside the support of `ρ_ref`.
    pub value: f64,
    pub support_violation: bool,
}

/// Weights of `ρ` on the eigenvectors of `ρ_ref`, labelled like
/// [`vn_eigenvalues`] of the reference.
fn weights_on_reference(b: &BlochVector, reference: &BlochVector) -> [f64; 4] {
    let l = vn_eigenvalues(b).lambdas;
    let r = 0.25 + b.b5 / 2.0;
    let d_ref = reference.polarization_norm();
    let along = if d_ref > 0.0 {
        let dot = b.b1 * reference.b1 + b.b2 * reference.b2 + b.b3 * reference.b3;
        dot / (SQRT_2 * d_ref)
    } else {
        // any basis of the degenerate external block will do
        b.b1 / SQRT_2
    };
    [r - along, l[1], l[2], r + along]
}

pub fn conditional_entropy_checked(b: &BlochVector, reference: &BlochVector) -> Result<ConditionalEntropy> {
    let s = vn_entropy(b)?;
    let l_ref = vn_eigenvalues(reference);
    l_ref.check_physical()?;
    let w = weights_on_reference(b, reference);
    let mut cross = 0.0;
    for (wk, lk) in w.iter().zip(l_ref.lambdas) {
        if lk < LOG_FLOOR && *wk > PHYSICALITY_TOL {
            return Ok(ConditionalEntropy {
                value: f64::INFINITY,
                support_violation: true,
            });
        }
        if *wk > 0.0 {
            cross += wk * floored_ln(lk);
        }
    }
    Ok(ConditionalEntropy {
        value: -s - cross,
        support_violation: false,
    })
}

/// `tr ρ(log ρ − log ρ_ref) ≥ 0`, `+∞` on a support violation.
///
/// Evaluated in the eigenbasis of `ρ_ref`: the weight of `ρ` on the outer
/// reference eigenvectors is `r ∓ √2 q / D_ref`, on the inner ones `λ2, λ3`.
pub fn conditional_entropy(b: &BlochVector, reference: &BlochVector) -> Result<f64> {
    conditional_entropy_checked(b, reference).map(|c| c.value)
}

/// [`conditional_entropy`] through numerical matrix logarithms.
pub fn conditional_entropy_matrix(b: &BlochVector, reference: &BlochVector) -> Result<f64> {
    vn_eigenvalues(b).check_physical()?;
    vn_eigenvalues(reference).check_physical()?;
    let rho = reconstruct_density(b);
    let log_rho = matrix_function(&rho, floored_ln);
    let log_ref = matrix_function(&reconstruct_density(reference), floored_ln);
    Ok((rho.matrix() * (log_rho - log_ref)).trace().re)
}

/// `Σ p log(p/q)` over energy-basis populations, `+∞` if `q_j = 0 < p_j`.
pub fn energy_conditional_entropy(b: &BlochVector, reference: &BlochVector, omega: f64, j: f64) -> Result<f64> {
    vn_eigenvalues(b).check_physical()?;
    vn_eigenvalues(reference).check_physical()?;
    let p = energy_populations(b, omega, j)?;
    let q = energy_populations(reference, omega, j)?;
    let mut sum = 0.0;
    for (pk, qk) in p.into_iter().zip(q) {
        if pk <= 0.0 {
            continue;
        }
        if qk < LOG_FLOOR {
            if pk > PHYSICALITY_TOL {
                return Ok(f64::INFINITY);
            }
            continue;
        }
        sum += pk * (pk / qk).ln();
    }
    Ok(sum)
}

/// `arccos Σ √p √q` over the energy-basis populations, in `[0, π/2]`.
///
/// Evaluated as `2 asin(|√p − √q| / 2)`, which keeps full precision near 0.
pub fn wootters_energy_distance(b: &BlochVector, reference: &BlochVector, omega: f64, j: f64) -> Result<f64> {
    let p = energy_populations(b, omega, j)?;
    let q = energy_populations(reference, omega, j)?;
    let chord2: f64 = p
        .iter()
        .zip(q)
        .map(|(a, c)| (a.max(0.0).sqrt() - c.max(0.0).sqrt()).powi(2))
        .sum();
    Ok(2.0 * (chord2.sqrt() / 2.0).min(1.0).asin())
}

/// Ingredients of the closed-form distance between `ρ_n` (`b`) and
/// `ρ_lc` (`reference`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistanceIntermediates {
    /// Half the scalar product of the `(b1, b2, b3)` parts.
    pub q: f64,
    pub x_n: f64,
    pub x_lc: f64,
    pub r_n: f64,
    pub r_lc: f64,
    pub d_n: f64,
    pub d_lc: f64,
    /// `2(r_n − x_n)/D_n²`, written as `1/(r_n + x_n)`.
    pub y_n: f64,
    pub big_y: f64,
    /// Generalized scalar product `r_n r_lc + q`.
    pub q_gen: f64,
    pub zeta1: f64,
    pub zeta4: f64,
    pub lambda2: f64,
    pub lambda3: f64,
}

pub fn distance_intermediates(b: &BlochVector, reference: &BlochVector) -> DistanceIntermediates {
    let sn = vn_eigenvalues(b);
    let sl = vn_eigenvalues(reference);
    let r_n = 0.25 + b.b5 / 2.0;
    let r_lc = 0.25 + reference.b5 / 2.0;
    let x_n = (sn.lambdas[0] * sn.lambdas[3]).max(0.0).sqrt();
    let x_lc = (sl.lambdas[0] * sl.lambdas[3]).max(0.0).sqrt();
    let q = (b.b1 * reference.b1 + b.b2 * reference.b2 + b.b3 * reference.b3) / 2.0;
    let y_n = 1.0 / (r_n + x_n);
    let big_y = r_lc + q * y_n;
    let q_gen = r_n * r_lc + q;
    let disc = (big_y * sn.d / SQRT_2).powi(2) + (x_n * sl.d / SQRT_2).powi(2) + 2.0 * x_n * q * big_y;
    let root = disc.max(0.0).sqrt();
    let sq = |x: f64| x.max(0.0).sqrt();
    DistanceIntermediates {
        q,
        x_n,
        x_lc,
        r_n,
        r_lc,
        d_n: sn.d,
        d_lc: sl.d,
        y_n,
        big_y,
        q_gen,
        zeta1: q_gen + root,
        zeta4: q_gen - root,
        lambda2: sq(sn.lambdas[1]) * sq(sl.lambdas[1]),
        lambda3: sq(sn.lambdas[2]) * sq(sl.lambdas[2]),
    }
}

/// `sqrt(2(1 − tr√M))` assembled from the `ζ` eigenvalues and inner products.
pub fn quantum_distance_closed_form(b: &BlochVector, reference: &BlochVector) -> f64 {
    let m = distance_intermediates(b, reference);
    let fidelity = m.zeta1.max(0.0).sqrt() + m.zeta4.max(0.0).sqrt() + m.lambda2 + m.lambda3;
    (2.0 * (1.0 - fidelity)).max(0.0).sqrt()
}

/// Quantum distance `sqrt(2(1 − tr√(√ρ ρ_ref √ρ)))`.
///
/// `1 − tr√M` is summed from nonnegative pieces: the external block gives
/// `[(x_n − x_lc)² + |b_n − b_lc|²/2] / (r_n + r_lc + √(2(Q + x_n x_lc)))`
/// and each internal level `(√λ(n) − √λ(lc))²/2`.
pub fn quantum_distance(b: &BlochVector, reference: &BlochVector) -> f64 {
    let sn = vn_eigenvalues(b);
    let sl = vn_eigenvalues(reference);
    let r_n = 0.25 + b.b5 / 2.0;
    let r_lc = 0.25 + reference.b5 / 2.0;
    let x_n = (sn.lambdas[0] * sn.lambdas[3]).max(0.0).sqrt();
    let x_lc = (sl.lambdas[0] * sl.lambdas[3]).max(0.0).sqrt();
    let q = (b.b1 * reference.b1 + b.b2 * reference.b2 + b.b3 * reference.b3) / 2.0;
    let db2 = (b.b1 - reference.b1).powi(2) + (b.b2 - reference.b2).powi(2) + (b.b3 - reference.b3).powi(2);
    let sqrt_sum = (2.0 * (r_n * r_lc + q + x_n * x_lc)).max(0.0).sqrt();
    let denom = r_n + r_lc + sqrt_sum;
    let external = if denom > 0.0 {
        ((x_n - x_lc).powi(2) + db2 / 2.0) / denom
    } else {
        0.0
    };
    let internal: f64 = (1..3)
        .map(|k| (sn.lambdas[k].max(0.0).sqrt() - sl.lambdas[k].max(0.0).sqrt()).powi(2) / 2.0)
        .sum();
    (2.0 * (external + internal)).sqrt()
}

/// `M = √ρ ρ_ref √ρ` built numerically.
pub fn fidelity_operator(b: &BlochVector, reference: &BlochVector) -> DensityMatrix {
    let sqrt_rho = matrix_function(&reconstruct_density(b), |l| l.max(0.0).sqrt());
    let m = sqrt_rho * reconstruct_density(reference).matrix() * sqrt_rho;
    DensityMatrix::from_matrix(m)
}

/// [`quantum_distance`] by numerical eigendecomposition of `M`.
pub fn quantum_distance_matrix(b: &BlochVector, reference: &BlochVector) -> f64 {
    let m = fidelity_operator(b, reference);
    let tr_sqrt: f64 = m.eigenvalues().iter().map(|z| z.max(0.0).sqrt()).sum();
    (2.0 * (1.0 - tr_sqrt)).max(0.0).sqrt()
}

/// Trace of the `{|↑↑⟩, |↓↓⟩}` block of [`fidelity_operator`].
pub fn external_block_trace(b: &BlochVector, reference: &BlochVector) -> f64 {
    let m = fidelity_operator(b, reference);
    let mm = m.matrix();
    (mm[(0, 0)] + mm[(3, 3)]).re
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{bloch_function, thermal_state};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_PI_2, LN_2};

    fn random_state(rng: &mut ChaCha8Rng) -> BlochVector {
        let mut w: [f64; 4] = std::array::from_fn(|_| -rng.random::<f64>().max(1e-300).ln());
        let sum: f64 = w.iter().sum();
        w.iter_mut().for_each(|x| *x /= sum);
        if w[3] < w[0] {
            w.swap(0, 3);
        }
        let axis = [rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5];
        BlochVector::from_spectrum(w, axis).unwrap()
    }

    #[test]
    fn measurement_entropy_examples() {
        assert_eq!(measurement_entropy(&[1.0, 0.0, 0.0, 0.0]).unwrap(), 0.0);
        assert!((measurement_entropy(&[0.25; 4]).unwrap() - 4f64.ln()).abs() < 1e-15);
        assert!((measurement_entropy(&[0.5, 0.5, 0.0, 0.0]).unwrap() - LN_2).abs() < 1e-15);
        assert!(matches!(measurement_entropy(&[0.5, 0.4]), Err(Error::NotNormalized { .. })));
        assert!(measurement_entropy(&[1.1, -0.1]).is_err());
    }

    #[test]
    fn vn_entropy_examples() {
        assert!((vn_entropy(&BlochVector::ZERO).unwrap() - 4f64.ln()).abs() < 1e-15);
        let pure = BlochVector::from_spectrum([0.0, 0.0, 0.0, 1.0], [0.3, -1.0, 0.2]).unwrap();
        assert!(vn_entropy(&pure).unwrap().abs() < 1e-14);
        assert!(vn_entropy(&BlochVector::new(1.0, 0.0, 0.0, 0.0, 0.0)).is_err());
    }

    #[test]
    fn thermal_vn_entropy_matches_matrix_log() {
        for t in [0.3, 1.5, 7.5, 50.0] {
            let b = thermal_state(12.6355, 2.0, t).unwrap();
            let rho = reconstruct_density(&b);
            let oracle = -(rho.matrix() * matrix_function(&rho, floored_ln)).trace().re;
            assert!((vn_entropy(&b).unwrap() - oracle).abs() < 1e-12);
            assert!((energy_entropy(&b, 12.6355, 2.0).unwrap() - oracle).abs() < 1e-12);
        }
    }

    #[test]
    fn energy_entropy_bounds_vn_entropy() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..500 {
            let b = random_state(&mut rng);
            let w = rng.random_range(0.5..15.0);
            assert!(energy_entropy(&b, w, 2.0).unwrap() >= vn_entropy(&b).unwrap() - 1e-12);
        }
        let mut b = thermal_state(5.08, 2.0, 1.5).unwrap();
        b.b3 = 0.05;
        assert!(energy_entropy(&b, 5.08, 2.0).unwrap() > vn_entropy(&b).unwrap() + 1e-6);
    }

    #[test]
    fn conditional_entropy_matches_matrix_logs() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..300 {
            let a = random_state(&mut rng);
            let b = random_state(&mut rng);
            let c = conditional_entropy(&a, &b).unwrap();
            let m = conditional_entropy_matrix(&a, &b).unwrap();
            assert!(c >= -1e-12);
            assert!((c - m).abs() < 1e-8 * (1.0 + c.abs()), "{c} vs {m}");
        }
        let a = random_state(&mut rng);
        assert!(conditional_entropy(&a, &a).unwrap().abs() < 1e-13);
    }

    #[test]
    fn conditional_entropy_reference_basis_matches_analytic_log() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..100 {
            let a = random_state(&mut rng);
            let b = random_state(&mut rng);
            let rho = reconstruct_density(&a);
            let log_a = bloch_function(&a, floored_ln);
            let log_b = bloch_function(&b, floored_ln);
            let oracle = (rho.matrix() * (log_a - log_b)).trace().re;
            let c = conditional_entropy(&a, &b).unwrap();
            assert!((c - oracle).abs() < 1e-11 * (1.0 + c.abs()));
        }
    }

    #[test]
    fn conditional_entropy_support_violation() {
        let pure = BlochVector::from_spectrum([0.0, 0.0, 0.0, 1.0], [1.0, 0.0, 0.0]).unwrap();
        let c = conditional_entropy_checked(&BlochVector::ZERO, &pure).unwrap();
        assert!(c.support_violation);
        assert_eq!(c.value, f64::INFINITY);
        let ok = conditional_entropy_checked(&pure, &BlochVector::ZERO).unwrap();
        assert!(!ok.support_violation);
        assert!((ok.value - 4f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn energy_conditional_entropy_properties() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..300 {
            let a = random_state(&mut rng);
            let b = random_state(&mut rng);
            let s = energy_conditional_entropy(&a, &b, 7.0, 2.0).unwrap();
            assert!(s >= -1e-14);
            // against the uniform reference the relative entropy is log 4 − S_E
            let u = energy_conditional_entropy(&a, &BlochVector::ZERO, 7.0, 2.0).unwrap();
            assert!((u - (4f64.ln() - energy_entropy(&a, 7.0, 2.0).unwrap())).abs() < 1e-12);
        }
        let a = random_state(&mut rng);
        assert!(energy_conditional_entropy(&a, &a, 7.0, 2.0).unwrap().abs() < 1e-15);
        // both states diagonal in the energy basis
        let t1 = thermal_state(7.0, 2.0, 1.0).unwrap();
        let mut t2 = thermal_state(7.0, 2.0, 4.0).unwrap();
        t2.b4 = 0.03;
        let e = energy_conditional_entropy(&t2, &t1, 7.0, 2.0).unwrap();
        assert!((e - conditional_entropy(&t2, &t1).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn wootters_distance_properties() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..500 {
            let [a, b, c] = std::array::from_fn(|_| random_state(&mut rng));
            let d = |x: &BlochVector, y: &BlochVector| wootters_energy_distance(x, y, 9.0, 2.0).unwrap();
            let (ab, bc, ac) = (d(&a, &b), d(&b, &c), d(&a, &c));
            assert!((0.0..=FRAC_PI_2 + 1e-15).contains(&ab));
            assert!((ab - d(&b, &a)).abs() < 1e-15);
            assert!(ac <= ab + bc + 1e-12);
            let p = energy_populations(&a, 9.0, 2.0).unwrap();
            let q = energy_populations(&b, 9.0, 2.0).unwrap();
            let f: f64 = p.iter().zip(q).map(|(x, y)| (x * y).max(0.0).sqrt()).sum();
            assert!((ab - f.min(1.0).acos()).abs() < 1e-7);
        }
        let a = random_state(&mut rng);
        assert_eq!(wootters_energy_distance(&a, &a, 9.0, 2.0).unwrap(), 0.0);
    }

    #[test]
    fn wootters_disjoint_supports() {
        // lowest level only vs highest level only
        let low = thermal_state(9.0, 2.0, 1e-3).unwrap();
        let high = BlochVector::new(-low.b1, -low.b2, 0.0, 0.0, low.b5);
        let d = wootters_energy_distance(&low, &high, 9.0, 2.0).unwrap();
        // round-off populations of ~1e-17 enter through their square roots
        assert!((d - FRAC_PI_2).abs() < 1e-7, "{d}");
    }

    #[test]
    fn quantum_distance_routes_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..500 {
            let a = random_state(&mut rng);
            let b = random_state(&mut rng);
            let d = quantum_distance(&a, &b);
            assert!((d - quantum_distance(&b, &a)).abs() < 1e-13);
            assert!((d - quantum_distance_closed_form(&a, &b)).abs() < 1e-7);
            assert!((d - quantum_distance_matrix(&a, &b)).abs() < 1e-7);
            let m = distance_intermediates(&a, &b);
            assert!((m.zeta1 + m.zeta4 - 2.0 * m.q_gen).abs() < 1e-15);
            assert!(m.zeta4 >= -1e-12);
            assert!((external_block_trace(&a, &b) - 2.0 * m.q_gen).abs() < 1e-12);
        }
        let a = random_state(&mut rng);
        assert_eq!(quantum_distance(&a, &a), 0.0);
    }

    #[test]
    fn quantum_distance_is_small_for_close_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let a = random_state(&mut rng);
        let mut b = a;
        b.b2 += 1e-9;
        let d = quantum_distance(&a, &b);
        assert!(d > 0.0 && d < 1e-8, "{d:e}");
    }
}
