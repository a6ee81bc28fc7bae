//! Branch maps of the cycle.
//!
//! Every branch acts on the augmented vector `(b1, b2, b3, b4, b5, 1)` as a
//! real 6×6 matrix. The `(b1, b2, b3, 1)` rows form a closed 4×4 block; the
//! `b4, b5` rows (the closure rule) may read the closed set but never feed
//! back into it.
//!
//! Isochores are solved in closed form. On the isochores `b4` relaxes at `Γ`
//! and `b5` at `2Γ`, with `b5` driven by the energy `ωb1 + Jb2` through the
//! population ladder `low ↔ middle ↔ high` that the bath rates `k↑, k↓`
//! connect. Adiabats are rotations obtained from the Wei–Norman angles, with
//! a direct time-ordered product as oracle; `b4, b5` commute with `H(t)` and
//! stay fixed there.

use std::f64::consts::SQRT_2;

use nalgebra::{Matrix3, Matrix6};

use crate::algebra::{thermal_imbalance, BlochVector};
use crate::error::{invalid, Error, Result};
use crate::ode::{self, DenseSolution, Tolerance};

/// Column of the constant term in the augmented representation.
pub const CONST: usize = 5;

/// Wei–Norman integration stops once `|cos α2|` drops below this.
pub const SINGULARITY_GUARD: f64 = 1e-6;

/// Bath contact of one isochore.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BathParams {
    /// Heat conductance `Γ = k↑ + k↓`.
    pub conductance: f64,
    /// Dephasing constant `γ` (rate per squared frequency).
    pub dephasing: f64,
    pub temperature: f64,
}

impl BathParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.conductance >= 0.0) || !self.conductance.is_finite() {
            return Err(invalid("conductance", format!("must be ≥ 0, got {}", self.conductance)));
        }
        if !(self.dephasing >= 0.0) || !self.dephasing.is_finite() {
            return Err(invalid("dephasing", format!("must be ≥ 0, got {}", self.dephasing)));
        }
        if !(self.temperature > 0.0) {
            return Err(invalid("temperature", format!("must be > 0, got {}", self.temperature)));
        }
        Ok(())
    }

    /// `(k↑, k↓)` at level spacing `Ω/√2`.
    pub fn rates(&self, big_omega: f64) -> Result<(f64, f64)> {
        bath_rates(self.conductance, self.temperature, big_omega)
    }
}

/// Splits `Γ` into `(k↑, k↓)` with `k↑/k↓ = exp(−Ω/(√2T))`.
pub fn bath_rates(conductance: f64, temperature: f64, big_omega: f64) -> Result<(f64, f64)> {
    if !(conductance >= 0.0) {
        return Err(invalid("conductance", "must be ≥ 0"));
    }
    if !(temperature > 0.0) {
        return Err(invalid("temperature", "must be > 0"));
    }
    if !(big_omega > 0.0) {
        return Err(invalid("omega", "Ω must be > 0"));
    }
    let boltzmann = (-big_omega / (SQRT_2 * temperature)).exp();
    let k_down = conductance / (1.0 + boltzmann);
    let k_up = conductance * boltzmann / (1.0 + boltzmann);
    Ok((k_up, k_down))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IsochoreParams {
    pub omega: f64,
    pub j: f64,
    pub bath: BathParams,
    pub tau: f64,
}

impl IsochoreParams {
    pub fn big_omega(&self) -> f64 {
        self.omega.hypot(self.j)
    }

    pub fn validate(&self) -> Result<()> {
        self.bath.validate()?;
        if !(self.tau >= 0.0) || !self.tau.is_finite() {
            return Err(invalid("tau", format!("must be ≥ 0, got {}", self.tau)));
        }
        if !(self.big_omega() > 0.0) || !self.big_omega().is_finite() {
            return Err(invalid("omega", "Ω = sqrt(ω²+J²) must be positive"));
        }
        Ok(())
    }
}

/// A linear field sweep `ω(t) = ω_start + (ω_end − ω_start)·t/τ` without bath.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdiabatParams {
    pub omega_start: f64,
    pub omega_end: f64,
    pub j: f64,
    pub tau: f64,
    pub tolerance: Tolerance,
}

impl AdiabatParams {
    pub fn new(omega_start: f64, omega_end: f64, j: f64, tau: f64) -> Self {
        Self {
            omega_start,
            omega_end,
            j,
            tau,
            tolerance: Tolerance::default(),
        }
    }

    pub fn omega_at(&self, t: f64) -> f64 {
        if self.tau == 0.0 {
            return self.omega_start;
        }
        self.omega_start + (self.omega_end - self.omega_start) * (t / self.tau)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tau >= 0.0) || !self.tau.is_finite() {
            return Err(invalid("tau", format!("must be ≥ 0, got {}", self.tau)));
        }
        if !self.omega_start.is_finite() || !self.omega_end.is_finite() || !self.j.is_finite() {
            return Err(invalid("omega", "field values must be finite"));
        }
        Ok(())
    }
}

/// Affine map on `(b1, b2, b3, b4, b5, 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffinePropagator {
    m: Matrix6<f64>,
}

impl Default for AffinePropagator {
    fn default() -> Self {
        Self::identity()
    }
}

impl AffinePropagator {
    pub fn identity() -> Self {
        Self {
            m: Matrix6::identity(),
        }
    }

    /// Wraps a full augmented matrix. The last row must be `(0,…,0,1)`.
    pub fn from_matrix(m: Matrix6<f64>) -> Result<Self> {
        let last_ok = (0..CONST).all(|c| m[(CONST, c)] == 0.0) && m[(CONST, CONST)] == 1.0;
        if !last_ok {
            return Err(invalid("matrix", "bottom row must be (0,0,0,0,0,1)"));
        }
        Ok(Self { m })
    }

    fn from_rotation(r: &Matrix3<f64>) -> Self {
        let mut m = Matrix6::identity();
        m.fixed_view_mut::<3, 3>(0, 0).copy_from(r);
        Self { m }
    }

    pub fn matrix(&self) -> &Matrix6<f64> {
        &self.m
    }

    /// The 3×3 block acting on `(b1, b2, b3)`.
    pub fn rotation_block(&self) -> Matrix3<f64> {
        self.m.fixed_view::<3, 3>(0, 0).into_owned()
    }

    /// The closed `(b1, b2, b3, 1)` block as a 4×4 matrix.
    pub fn bloch_block(&self) -> nalgebra::Matrix4<f64> {
        let idx = [0, 1, 2, CONST];
        nalgebra::Matrix4::from_fn(|r, c| self.m[(idx[r], idx[c])])
    }

    /// Rows producing `b4'` and `b5'` from `(b1, b2, b3, b4, b5, 1)`.
    pub fn closure_rows(&self) -> [[f64; 6]; 2] {
        let row = |r: usize| std::array::from_fn(|c| self.m[(r, c)]);
        [row(3), row(4)]
    }

    /// `next ∘ self`: apply `self` first.
    pub fn then(&self, next: &AffinePropagator) -> AffinePropagator {
        AffinePropagator { m: next.m * self.m }
    }

    pub fn apply(&self, b: &BlochVector) -> BlochVector {
        let v = nalgebra::Vector6::new(b.b1, b.b2, b.b3, b.b4, b.b5, 1.0);
        let w = self.m * v;
        BlochVector::new(w[0], w[1], w[2], w[3], w[4])
    }

    /// Frobenius distance between the full augmented matrices.
    pub fn distance(&self, other: &AffinePropagator) -> f64 {
        (self.m - other.m).norm()
    }
}

pub fn apply(prop: &AffinePropagator, b: &BlochVector) -> BlochVector {
    prop.apply(b)
}

/// Free precession about `(ω, J, 0)` at angular rate `√2Ω` for time `tau`.
fn precession(omega: f64, j: f64, tau: f64) -> Matrix3<f64> {
    let big = omega.hypot(j);
    if big == 0.0 || tau == 0.0 {
        return Matrix3::identity();
    }
    let (s, c) = (SQRT_2 * big * tau).sin_cos();
    let o2 = big * big;
    Matrix3::new(
        (omega * omega + c * j * j) / o2,
        omega * j * (1.0 - c) / o2,
        j * s / big,
        omega * j * (1.0 - c) / o2,
        (j * j + c * omega * omega) / o2,
        -omega * s / big,
        -j * s / big,
        omega * s / big,
        c,
    )
}

pub fn isochore_propagator(p: &IsochoreParams) -> Result<AffinePropagator> {
    p.validate()?;
    let (omega, j, tau) = (p.omega, p.j, p.tau);
    let big = p.big_omega();
    let gamma = p.bath.conductance;
    let o2 = big * big;
    let deph = 2.0 * p.bath.dephasing * o2 * tau;
    // K·X = e^{−Γτ} along the field axis, K across it.
    let relax = (-gamma * tau).exp();
    let k = (-gamma * tau - deph).exp();
    let kx = relax;
    let (s, c) = (SQRT_2 * big * tau).sin_cos();

    // (k↓ − k↑)/Γ, finite at Γ = 0.
    let imbalance = thermal_imbalance(big, p.bath.temperature);
    let b1_eq = -omega * imbalance / (SQRT_2 * big);
    let b2_eq = -j * imbalance / (SQRT_2 * big);
    let b5_eq = imbalance * imbalance / 2.0;

    let mut m = Matrix6::zeros();
    m[(0, 0)] = (kx * omega * omega + k * c * j * j) / o2;
    m[(0, 1)] = omega * j * (kx - k * c) / o2;
    m[(0, 2)] = k * j * s / big;
    m[(1, 0)] = omega * j * (kx - k * c) / o2;
    m[(1, 1)] = (kx * j * j + k * c * omega * omega) / o2;
    m[(1, 2)] = -k * omega * s / big;
    m[(2, 0)] = -k * j * s / big;
    m[(2, 1)] = k * omega * s / big;
    m[(2, 2)] = k * c;
    m[(0, CONST)] = b1_eq * (1.0 - relax);
    m[(1, CONST)] = b2_eq * (1.0 - relax);

    // b4' = b4 e^{−Γτ}
    m[(3, 3)] = relax;
    // b5' = b5_eq + (b5 − b5_eq) e^{−2Γτ} − t (e^{−Γτ} − e^{−2Γτ}) (√2E/Ω + t)
    let relax2 = relax * relax;
    let drive = -imbalance * (relax - relax2);
    m[(4, 0)] = drive * SQRT_2 * omega / big;
    m[(4, 1)] = drive * SQRT_2 * j / big;
    m[(4, 4)] = relax2;
    m[(4, CONST)] = b5_eq * (1.0 - relax2) + drive * imbalance;
    m[(CONST, CONST)] = 1.0;
    Ok(AffinePropagator { m })
}

/// Wei–Norman angles along one adiabat.
#[derive(Debug, Clone)]
pub struct WeiNormanAngles {
    pub tau: f64,
    /// `(α1, α2, α3)` at `t = τ`.
    pub alpha: [f64; 3],
    pub max_abs_alpha2: f64,
    path: DenseSolution<3>,
}

impl WeiNormanAngles {
    /// Angles at elapsed time `t ∈ [0, τ]` (cubic Hermite between steps).
    pub fn at(&self, t: f64) -> [f64; 3] {
        self.path.sample(t)
    }

    pub fn steps(&self) -> usize {
        self.path.steps()
    }

    pub fn propagator(&self) -> AffinePropagator {
        adiabat_propagator(self.alpha)
    }

    pub fn propagator_at(&self, t: f64) -> AffinePropagator {
        adiabat_propagator(self.at(t))
    }
}

/// Integrates
///
/// ```text
/// α̇1 = √2 ω(t) + √2 J sin α1 sin α2 / cos α2
/// α̇2 = √2 J cos α1
/// α̇3 = √2 J sin α1 / cos α2
/// ```
///
/// from `α(0) = 0`, failing with [`Error::Singularity`] when `|cos α2|` falls
/// below [`SINGULARITY_GUARD`].
pub fn wei_norman_alphas(p: &AdiabatParams) -> Result<WeiNormanAngles> {
    p.validate()?;
    let j = p.j;
    let rhs = |t: f64, a: &[f64; 3]| {
        let (s1, c1) = a[0].sin_cos();
        let (s2, c2) = a[1].sin_cos();
        [
            SQRT_2 * p.omega_at(t) + SQRT_2 * j * s1 * s2 / c2,
            SQRT_2 * j * c1,
            SQRT_2 * j * s1 / c2,
        ]
    };
    let mut max_a2 = 0.0f64;
    let mut prev_c2 = 1.0f64;
    let path = ode::integrate(rhs, 0.0, p.tau, [0.0; 3], p.tolerance, |t, a| {
        max_a2 = max_a2.max(a[1].abs());
        let c2 = a[1].cos();
        // a sign flip means a step crossed cos α2 = 0
        if c2.abs() < SINGULARITY_GUARD || c2.signum() != prev_c2.signum() {
            return Err(Error::Singularity { t, cos_alpha2: c2.abs() });
        }
        prev_c2 = c2;
        Ok(())
    })?;
    Ok(WeiNormanAngles {
        tau: p.tau,
        alpha: path.final_state(),
        max_abs_alpha2: max_a2,
        path,
    })
}

/// The triple-rotation matrix in the printed layout,
///
/// ```text
/// | c2c3   −s3c1+c3s2s1   c3s2c1+s3s1 |
/// | c2s3    c3c1+s3s2s1   s3s2c1−c3s1 |
/// | −s2     c2s1          c2c1        |
/// ```
///
/// i.e. `R3(a3) R2(a2) R1(a1)` with right-handed rotations about the `b` axes.
pub fn triple_rotation(a: [f64; 3]) -> Matrix3<f64> {
    let (s1, c1) = a[0].sin_cos();
    let (s2, c2) = a[1].sin_cos();
    let (s3, c3) = a[2].sin_cos();
    Matrix3::new(
        c2 * c3,
        -s3 * c1 + c3 * s2 * s1,
        c3 * s2 * c1 + s3 * s1,
        c2 * s3,
        c3 * c1 + s3 * s2 * s1,
        s3 * s2 * c1 - c3 * s1,
        -s2,
        c2 * s1,
        c2 * c1,
    )
}

/// Adiabat map from Wei–Norman angles.
///
/// The angle equations generate `R1(α1) R2(α2) R3(−α3)` acting on the
/// expectation values, which is the transpose of [`triple_rotation`] at
/// `(−α1, −α2, α3)`.
pub fn adiabat_propagator(alpha: [f64; 3]) -> AffinePropagator {
    let r = triple_rotation([-alpha[0], -alpha[1], alpha[2]]).transpose();
    AffinePropagator::from_rotation(&r)
}

/// Time-ordered product of `n_steps` free precessions, each at the field of
/// its interval midpoint. Second order in `τ/n_steps`.
pub fn adiabat_propagator_direct(p: &AdiabatParams, n_steps: usize) -> Result<AffinePropagator> {
    p.validate()?;
    if n_steps == 0 {
        return Err(invalid("n_steps", "must be ≥ 1"));
    }
    let dt = p.tau / n_steps as f64;
    let mut r = Matrix3::identity();
    for k in 0..n_steps {
        let w = p.omega_at((k as f64 + 0.5) * dt);
        r = precession(w, p.j, dt) * r;
    }
    Ok(AffinePropagator::from_rotation(&r))
}
