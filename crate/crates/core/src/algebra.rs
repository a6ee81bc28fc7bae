//! State bookkeeping for the two-spin working medium.
//!
//! The state is carried by five expectation values `b1..b5` of an
//! orthonormal, traceless operator set `{B_k}` on the 4-dimensional two-spin
//! space. In the direct-product basis `|↑↑⟩, |↑↓⟩, |↓↑⟩, |↓↓⟩`
//!
//! ```text
//! B1 = 2^{-3/2} (σz⊗I + I⊗σz)      (external field, H_ext = ω B1)
//! B2 = 2^{-3/2} (σx⊗σx − σy⊗σy)    (coupling, H_int = J B2)
//! B3 = [B1, B2] / (√2 i)
//! B4 = diag(0, 1, −1, 0) / √2
//! B5 = diag(1, −1, −1, 1) / 2
//! ```
//!
//! so the density matrix splits into an "external" 2×2 block on `{|↑↑⟩, |↓↓⟩}`
//! carrying `b1, b2, b3` and a diagonal "internal" block carrying `b4`.
//! All spectral quantities follow in closed form from that split.

use std::f64::consts::SQRT_2;

use nalgebra::Matrix4;
use num_complex::Complex64;

use crate::error::{invalid, Error, Result};

/// Eigenvalues are floored here before taking logarithms.
pub const LOG_FLOOR: f64 = 1e-300;

/// Largest negative eigenvalue still accepted as physical.
pub const PHYSICALITY_TOL: f64 = 1e-10;

const C0: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BlochVector {
    pub b1: f64,
    pub b2: f64,
    pub b3: f64,
    pub b4: f64,
    pub b5: f64,
}

impl BlochVector {
    /// The maximally mixed state.
    pub const ZERO: BlochVector = BlochVector {
        b1: 0.0,
        b2: 0.0,
        b3: 0.0,
        b4: 0.0,
        b5: 0.0,
    };

    pub const fn new(b1: f64, b2: f64, b3: f64, b4: f64, b5: f64) -> Self {
        Self { b1, b2, b3, b4, b5 }
    }

    pub const fn from_array(b: [f64; 5]) -> Self {
        Self::new(b[0], b[1], b[2], b[3], b[4])
    }

    pub const fn to_array(&self) -> [f64; 5] {
        [self.b1, self.b2, self.b3, self.b4, self.b5]
    }

    /// The `(b1, b2, b3)` part, closed under the branch dynamics.
    pub const fn polarization(&self) -> [f64; 3] {
        [self.b1, self.b2, self.b3]
    }

    /// `D = |(b1, b2, b3)|`.
    pub fn polarization_norm(&self) -> f64 {
        self.b1.hypot(self.b2).hypot(self.b3)
    }

    /// Builds the state with von Neumann probabilities `lambdas` (in the labelled
    /// order `λ1..λ4`, with `λ4 ≥ λ1`) whose polarization points along `axis`.
    pub fn from_spectrum(lambdas: [f64; 4], axis: [f64; 3]) -> Result<Self> {
        let [l1, l2, l3, l4] = lambdas;
        if l4 < l1 {
            return Err(invalid("lambdas", "λ4 must not be smaller than λ1"));
        }
        let d = (l4 - l1) / SQRT_2;
        let norm = axis[0].hypot(axis[1]).hypot(axis[2]);
        let dir = if norm > 0.0 {
            [axis[0] / norm, axis[1] / norm, axis[2] / norm]
        } else if d == 0.0 {
            [0.0; 3]
        } else {
            return Err(invalid("axis", "zero axis for a polarized state"));
        };
        Ok(Self {
            b1: d * dir[0],
            b2: d * dir[1],
            b3: d * dir[2],
            b4: (l2 - l3) / SQRT_2,
            b5: l1 + l4 - 0.5,
        })
    }

    pub fn is_physical(&self) -> bool {
        vn_eigenvalues(self).min() >= -PHYSICALITY_TOL
    }

    pub fn distance(&self, other: &BlochVector) -> f64 {
        self.to_array()
            .iter()
            .zip(other.to_array())
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }
}

/// Von Neumann probabilities in the labelled order `λ1..λ4` (not sorted).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralInfo {
    pub lambdas: [f64; 4],
    pub d: f64,
}

impl SpectralInfo {
    pub fn min(&self) -> f64 {
        self.lambdas.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn check_physical(&self) -> Result<()> {
        let value = self.min();
        if value < -PHYSICALITY_TOL || !value.is_finite() {
            return Err(Error::NonPhysical { value });
        }
        Ok(())
    }

    pub fn sorted(&self) -> [f64; 4] {
        let mut l = self.lambdas;
        l.sort_by(f64::total_cmp);
        l
    }
}

/// A 4×4 complex Hermitian matrix of unit trace.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix(Matrix4<Complex64>);

impl DensityMatrix {
    /// Wraps `m` without checking; use [`DensityMatrix::hermiticity_defect`] and
    /// [`DensityMatrix::trace`] when the origin is untrusted.
    pub fn from_matrix(m: Matrix4<Complex64>) -> Self {
        Self(m)
    }

    pub fn matrix(&self) -> &Matrix4<Complex64> {
        &self.0
    }

    pub fn into_matrix(self) -> Matrix4<Complex64> {
        self.0
    }

    pub fn trace(&self) -> Complex64 {
        self.0.trace()
    }

    /// Largest entry of `|ρ − ρ†|`.
    pub fn hermiticity_defect(&self) -> f64 {
        (self.0 - self.0.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Numerical spectrum, ascending.
    pub fn eigenvalues(&self) -> [f64; 4] {
        let eig = hermitian_part(&self.0).symmetric_eigen();
        let mut l = [0.0; 4];
        l.copy_from_slice(eig.eigenvalues.as_slice());
        l.sort_by(f64::total_cmp);
        l
    }

    pub fn diagonal(&self) -> [f64; 4] {
        [self.0[(0, 0)].re, self.0[(1, 1)].re, self.0[(2, 2)].re, self.0[(3, 3)].re]
    }
}

/// The real symmetric involution `C` that maps the direct-product basis onto
/// the eigenbasis of `H = ωB1 + JB2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyBasisTransform {
    /// `sign(J)·sqrt((Ω−ω)/(2Ω))`; the sign keeps `C` diagonalizing for `J < 0`.
    pub mu_c: f64,
    pub chi: f64,
    pub omega: f64,
    pub j: f64,
    /// `Ω = sqrt(ω² + J²)`.
    pub big_omega: f64,
}

impl EnergyBasisTransform {
    pub fn new(omega: f64, j: f64) -> Result<Self> {
        let big_omega = omega.hypot(j);
        if !(big_omega > 0.0) || !big_omega.is_finite() {
            return Err(invalid("omega", "Ω = sqrt(ω²+J²) must be positive and finite"));
        }
        let sign = if j < 0.0 { -1.0 } else { 1.0 };
        let mu_c = sign * ((big_omega - omega) / (2.0 * big_omega)).max(0.0).sqrt();
        let chi = ((big_omega + omega) / (2.0 * big_omega)).max(0.0).sqrt();
        Ok(Self {
            mu_c,
            chi,
            omega,
            j,
            big_omega,
        })
    }

    pub fn matrix(&self) -> Matrix4<Complex64> {
        let mut c = Matrix4::identity();
        c[(0, 0)] = Complex64::from(-self.mu_c);
        c[(0, 3)] = Complex64::from(self.chi);
        c[(3, 0)] = Complex64::from(self.chi);
        c[(3, 3)] = Complex64::from(self.mu_c);
        c
    }

    /// `C ρ C`; applying it twice is the identity.
    pub fn conjugate(&self, rho: &DensityMatrix) -> DensityMatrix {
        let c = self.matrix();
        DensityMatrix(c * rho.matrix() * c)
    }
}

/// The state operator `I/4 + Σ b_k B_k` in the direct-product basis.
pub fn reconstruct_density(b: &BlochVector) -> DensityMatrix {
    let r = 0.25 + b.b5 / 2.0;
    let mut m = Matrix4::from_element(C0);
    m[(0, 0)] = Complex64::from(r + b.b1 / SQRT_2);
    m[(1, 1)] = Complex64::from(0.25 + b.b4 / SQRT_2 - b.b5 / 2.0);
    m[(2, 2)] = Complex64::from(0.25 - b.b4 / SQRT_2 - b.b5 / 2.0);
    m[(3, 3)] = Complex64::from(r - b.b1 / SQRT_2);
    m[(0, 3)] = Complex64::new(b.b2, -b.b3) / SQRT_2;
    m[(3, 0)] = Complex64::new(b.b2, b.b3) / SQRT_2;
    DensityMatrix(m)
}

pub fn vn_eigenvalues(b: &BlochVector) -> SpectralInfo {
    let d = b.polarization_norm();
    let r = 0.25 + b.b5 / 2.0;
    SpectralInfo {
        lambdas: [
            r - d / SQRT_2,
            0.25 + b.b4 / SQRT_2 - b.b5 / 2.0,
            0.25 - b.b4 / SQRT_2 - b.b5 / 2.0,
            r + d / SQRT_2,
        ],
        d,
    }
}

pub fn to_energy_basis(b: &BlochVector, omega: f64, j: f64) -> Result<DensityMatrix> {
    let c = EnergyBasisTransform::new(omega, j)?;
    Ok(c.conjugate(&reconstruct_density(b)))
}

/// Diagonal of [`to_energy_basis`] in closed form, ordered from the lowest
/// level (`−Ω/√2`) through the two zero-energy states to the highest.
pub fn energy_populations(b: &BlochVector, omega: f64, j: f64) -> Result<[f64; 4]> {
    let c = EnergyBasisTransform::new(omega, j)?;
    let e = omega * b.b1 + j * b.b2;
    let shift = e / (c.big_omega * SQRT_2);
    Ok([
        0.25 - shift + b.b5 / 2.0,
        0.25 + b.b4 / SQRT_2 - b.b5 / 2.0,
        0.25 - b.b4 / SQRT_2 - b.b5 / 2.0,
        0.25 + shift + b.b5 / 2.0,
    ])
}

/// `ln(max(x, LOG_FLOOR))`.
pub fn floored_ln(x: f64) -> f64 {
    x.max(LOG_FLOOR).ln()
}

fn hermitian_part(m: &Matrix4<Complex64>) -> Matrix4<Complex64> {
    (m + m.adjoint()) * Complex64::from(0.5)
}

/// `Q† f(Λ) Q` from a numerical eigendecomposition of the Hermitian part of `rho`.
pub fn matrix_function(rho: &DensityMatrix, f: impl Fn(f64) -> f64) -> Matrix4<Complex64> {
    let eig = hermitian_part(rho.matrix()).symmetric_eigen();
    let q = &eig.eigenvectors;
    let fl = Matrix4::from_diagonal(&eig.eigenvalues.map(|l| Complex64::from(f(l))));
    q * fl * q.adjoint()
}

/// The unitary `Q_p` with `Q_p ρ_p Q_p† = diag(λ1, λ2, λ3, λ4)`.
///
/// Each external row is built from whichever of `D ± b1` is larger, so the
/// `D + b1 = 0` and `D − b1 = 0` edges never divide by zero. `D = 0` gives the
/// identity.
pub fn polarization_diagonalizer(b: &BlochVector) -> Matrix4<Complex64> {
    let d = b.polarization_norm();
    let mut q = Matrix4::identity();
    if d == 0.0 {
        return q;
    }
    let z = Complex64::new(b.b2, b.b3);
    let plus = d + b.b1;
    let minus = d - b.b1;
    if b.b1 >= 0.0 {
        let n = (2.0 * d * plus).sqrt();
        q[(0, 0)] = -z / n;
        q[(0, 3)] = Complex64::from((plus / (2.0 * d)).sqrt());
        q[(3, 0)] = Complex64::from((plus / (2.0 * d)).sqrt());
        q[(3, 3)] = z.conj() / n;
    } else {
        let n = (2.0 * d * minus).sqrt();
        q[(0, 0)] = Complex64::from((minus / (2.0 * d)).sqrt());
        q[(0, 3)] = -z.conj() / n;
        q[(3, 0)] = z / n;
        q[(3, 3)] = Complex64::from((minus / (2.0 * d)).sqrt());
    }
    q
}

/// `f(ρ_p)` through the closed-form diagonalizer.
pub fn bloch_function(b: &BlochVector, f: impl Fn(f64) -> f64) -> Matrix4<Complex64> {
    let q = polarization_diagonalizer(b);
    let l = vn_eigenvalues(b).lambdas;
    let fl = Matrix4::from_diagonal(&nalgebra::Vector4::from(l.map(|x| Complex64::from(f(x)))));
    q.adjoint() * fl * q
}

/// `tanh(Ω / (2√2 T))`, the equilibrium population imbalance between the
/// outer levels.
pub(crate) fn thermal_imbalance(big_omega: f64, temperature: f64) -> f64 {
    (big_omega / (2.0 * SQRT_2 * temperature)).tanh()
}

/// Gibbs state of `H = ωB1 + JB2` at temperature `T` (`T = ∞` allowed).
pub fn thermal_state(omega: f64, j: f64, temperature: f64) -> Result<BlochVector> {
    if !(temperature > 0.0) {
        return Err(invalid("temperature", format!("must be positive, got {temperature}")));
    }
    let big_omega = omega.hypot(j);
    if !(big_omega > 0.0) {
        return Err(invalid("omega", "Ω = sqrt(ω²+J²) must be positive"));
    }
    let t = thermal_imbalance(big_omega, temperature);
    Ok(BlochVector {
        b1: -omega * t / (SQRT_2 * big_omega),
        b2: -j * t / (SQRT_2 * big_omega),
        b3: 0.0,
        b4: 0.0,
        // 1/2 − 2/Z with Z = 2 + 2cosh(Ω/(√2T)).
        b5: t * t / 2.0,
    })
}
