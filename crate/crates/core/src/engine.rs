//! The four-stroke cycle: composition, limit cycle, spectrum and ledger.
//!
//! Corners are labelled in stroke order starting from the hot isochore:
//!
//! ```text
//! A ──hot isochore (ω_b, T_h, τ_h)──▶ B
//! B ──adiabat ω_b → ω_a (τ_ba)─────▶ C
//! C ──cold isochore (ω_a, T_c, τ_c)─▶ D
//! D ──adiabat ω_a → ω_b (τ_ab)─────▶ A
//! ```
//!
//! so the cycle map anchored at `A` is `U_ab · U_isc · U_ba · U_ish`.

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;

use crate::algebra::{vn_eigenvalues, BlochVector};
use crate::error::{invalid, Error, Result};
use crate::measures::{energy_entropy, vn_entropy};
use crate::propagators::{
    adiabat_propagator_direct, isochore_propagator, wei_norman_alphas, AdiabatParams,
    AffinePropagator, BathParams, IsochoreParams, WeiNormanAngles, CONST,
};

/// A second eigenvalue this close to the unit circle means no unique limit cycle.
pub const UNIQUENESS_GAP: f64 = 1e-9;

/// Eigenvalues with `|Im| / |z|` below this are treated as real.
const REAL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CycleSpec {
    pub t_cold: f64,
    pub t_hot: f64,
    /// Field on the cold isochore.
    pub omega_a: f64,
    /// Field on the hot isochore.
    pub omega_b: f64,
    pub j: f64,
    pub conductance_cold: f64,
    pub conductance_hot: f64,
    pub dephasing_cold: f64,
    pub dephasing_hot: f64,
    pub tau_cold: f64,
    pub tau_hot: f64,
    /// Adiabat from the cold field to the hot field (`D → A`).
    pub tau_ab: f64,
    /// Adiabat from the hot field to the cold field (`B → C`).
    pub tau_ba: f64,
}

impl CycleSpec {
    pub fn period(&self) -> f64 {
        self.tau_hot + self.tau_ba + self.tau_cold + self.tau_ab
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("t_cold", self.t_cold), ("t_hot", self.t_hot)] {
            if !(v > 0.0) {
                return Err(invalid(name, format!("temperature must be > 0, got {v}")));
            }
        }
        for (name, v) in [
            ("tau_cold", self.tau_cold),
            ("tau_hot", self.tau_hot),
            ("tau_ab", self.tau_ab),
            ("tau_ba", self.tau_ba),
        ] {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(invalid(name, format!("time must be finite and ≥ 0, got {v}")));
            }
        }
        for (name, v) in [
            ("conductance_cold", self.conductance_cold),
            ("conductance_hot", self.conductance_hot),
            ("dephasing_cold", self.dephasing_cold),
            ("dephasing_hot", self.dephasing_hot),
        ] {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(invalid(name, format!("must be finite and ≥ 0, got {v}")));
            }
        }
        for (name, v) in [("omega_a", self.omega_a), ("omega_b", self.omega_b), ("j", self.j)] {
            if !v.is_finite() {
                return Err(invalid(name, format!("must be finite, got {v}")));
            }
        }
        for (name, w) in [("omega_a", self.omega_a), ("omega_b", self.omega_b)] {
            if !(w.hypot(self.j) > 0.0) {
                return Err(invalid(name, "Ω = sqrt(ω²+J²) must be positive"));
            }
        }
        if !(self.period() > 0.0) {
            return Err(invalid("tau_hot", "total period must be > 0"));
        }
        Ok(())
    }

    pub fn hot_isochore(&self) -> IsochoreParams {
        IsochoreParams {
            omega: self.omega_b,
            j: self.j,
            bath: BathParams {
                conductance: self.conductance_hot,
                dephasing: self.dephasing_hot,
                temperature: self.t_hot,
            },
            tau: self.tau_hot,
        }
    }

    pub fn cold_isochore(&self) -> IsochoreParams {
        IsochoreParams {
            omega: self.omega_a,
            j: self.j,
            bath: BathParams {
                conductance: self.conductance_cold,
                dephasing: self.dephasing_cold,
                temperature: self.t_cold,
            },
            tau: self.tau_cold,
        }
    }

    /// `B → C`.
    pub fn hot_to_cold(&self) -> AdiabatParams {
        AdiabatParams::new(self.omega_b, self.omega_a, self.j, self.tau_ba)
    }

    /// `D → A`.
    pub fn cold_to_hot(&self) -> AdiabatParams {
        AdiabatParams::new(self.omega_a, self.omega_b, self.j, self.tau_ab)
    }

    /// Accumulated bath contact `Γ_h τ_h + Γ_c τ_c`.
    pub fn relaxation_exponent(&self) -> f64 {
        self.conductance_hot * self.tau_hot + self.conductance_cold * self.tau_cold
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Corner {
    A,
    B,
    C,
    D,
}

impl Corner {
    pub const ALL: [Corner; 4] = [Corner::A, Corner::B, Corner::C, Corner::D];

    fn index(self) -> usize {
        self as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Branch {
    HotIsochore,
    HotToCold,
    ColdIsochore,
    ColdToHot,
}

impl Branch {
    pub const ALL: [Branch; 4] = [Branch::HotIsochore, Branch::HotToCold, Branch::ColdIsochore, Branch::ColdToHot];

    pub fn name(self) -> &'static str {
        match self {
            Branch::HotIsochore => "hot_isochore",
            Branch::HotToCold => "adiabat_ba",
            Branch::ColdIsochore => "cold_isochore",
            Branch::ColdToHot => "adiabat_ab",
        }
    }

    /// Corner at which the branch starts.
    pub fn start(self) -> Corner {
        Corner::ALL[self as usize]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AdiabatMethod {
    WeiNorman,
    /// Midpoint product of free precessions with this many slices.
    Direct { steps: usize },
}

#[derive(Debug, Clone)]
pub struct BranchMap {
    pub branch: Branch,
    pub duration: f64,
    pub propagator: AffinePropagator,
    /// Present for adiabats composed with [`AdiabatMethod::WeiNorman`].
    pub angles: Option<WeiNormanAngles>,
}

#[derive(Debug, Clone)]
pub struct CyclePropagator {
    pub spec: CycleSpec,
    branches: [BranchMap; 4],
    map: AffinePropagator,
}

/// `μ0 = 1`, `μ1` real, `μ2 = μ3*`, `μ4, μ5` from the `(b4, b5)` rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spectrum {
    pub mu: [Complex64; 6],
    /// `|arg μ2|`.
    pub phi: f64,
}

impl Spectrum {
    pub fn moduli(&self) -> [f64; 6] {
        self.mu.map(|z| z.norm())
    }

    /// Largest modulus among `μ1..μ5`.
    pub fn subdominant(&self) -> f64 {
        self.mu[1..].iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn gap(&self) -> f64 {
        1.0 - self.subdominant()
    }

    pub fn is_unique(&self) -> bool {
        self.gap() > UNIQUENESS_GAP
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitCycleReport {
    pub b_a: BlochVector,
    /// States at `A, B, C, D`.
    pub corners: [BlochVector; 4],
    pub spectrum: Spectrum,
    pub unique: bool,
    pub gap: f64,
    /// `‖M(b_A) − b_A‖₂`.
    pub residual: f64,
}

impl LimitCycleReport {
    pub fn corner(&self, c: Corner) -> BlochVector {
        self.corners[c.index()]
    }
}

pub fn compose_cycle(spec: &CycleSpec) -> Result<CyclePropagator> {
    compose_cycle_with(spec, AdiabatMethod::WeiNorman)
}

pub fn compose_cycle_with(spec: &CycleSpec, method: AdiabatMethod) -> Result<CyclePropagator> {
    spec.validate()?;
    let adiabat = |branch: Branch, p: AdiabatParams| -> Result<BranchMap> {
        Ok(match method {
            AdiabatMethod::WeiNorman => {
                let angles = wei_norman_alphas(&p)?;
                BranchMap {
                    branch,
                    duration: p.tau,
                    propagator: angles.propagator(),
                    angles: Some(angles),
                }
            }
            AdiabatMethod::Direct { steps } => BranchMap {
                branch,
                duration: p.tau,
                propagator: adiabat_propagator_direct(&p, steps)?,
                angles: None,
            },
        })
    };
    let hot = spec.hot_isochore();
    let cold = spec.cold_isochore();
    let branches = [
        BranchMap {
            branch: Branch::HotIsochore,
            duration: hot.tau,
            propagator: isochore_propagator(&hot)?,
            angles: None,
        },
        adiabat(Branch::HotToCold, spec.hot_to_cold())?,
        BranchMap {
            branch: Branch::ColdIsochore,
            duration: cold.tau,
            propagator: isochore_propagator(&cold)?,
            angles: None,
        },
        adiabat(Branch::ColdToHot, spec.cold_to_hot())?,
    ];
    let map = branches
        .iter()
        .fold(AffinePropagator::identity(), |acc, b| acc.then(&b.propagator));
    Ok(CyclePropagator {
        spec: *spec,
        branches,
        map,
    })
}

impl CyclePropagator {
    /// The cycle map anchored at `A`.
    pub fn map(&self) -> &AffinePropagator {
        &self.map
    }

    pub fn branch(&self, b: Branch) -> &BranchMap {
        &self.branches[b as usize]
    }

    pub fn branches(&self) -> &[BranchMap; 4] {
        &self.branches
    }

    /// The cycle map starting and ending at `corner`.
    pub fn anchored_at(&self, corner: Corner) -> AffinePropagator {
        let k = corner.index();
        (0..4).fold(AffinePropagator::identity(), |acc, i| {
            acc.then(&self.branches[(k + i) % 4].propagator)
        })
    }

    /// States at `A, B, C, D` for a cycle entered at `A` with `b_a`.
    pub fn corners(&self, b_a: &BlochVector) -> [BlochVector; 4] {
        let mut out = [*b_a; 4];
        for i in 1..4 {
            out[i] = self.branches[i - 1].propagator.apply(&out[i - 1]);
        }
        out
    }

    pub fn spectrum(&self) -> Spectrum {
        spectrum_of(&self.map)
    }

    pub fn limit_cycle(&self) -> Result<LimitCycleReport> {
        let spectrum = self.spectrum();
        let gap = spectrum.gap();
        if !spectrum.is_unique() {
            return Err(Error::NonUniqueLimitCycle {
                modulus: spectrum.subdominant(),
            });
        }
        let b_a = fixed_point(&self.map)?;
        let residual = self.map.apply(&b_a).distance(&b_a);
        Ok(LimitCycleReport {
            b_a,
            corners: self.corners(&b_a),
            spectrum,
            unique: true,
            gap,
            residual,
        })
    }

    /// `b_k = M^k(b0)` for `k = 0..=n` at corner `A`.
    pub fn iterate(&self, b0: &BlochVector, n: usize) -> Result<Vec<BlochVector>> {
        vn_eigenvalues(b0).check_physical()?;
        let mut out = Vec::with_capacity(n + 1);
        out.push(*b0);
        for k in 0..n {
            out.push(self.map.apply(&out[k]));
        }
        Ok(out)
    }

    /// Dense samples along one cycle entered at `A`. Each branch contributes
    /// `samples_per_branch` evenly spaced points including both ends, so the
    /// corner states appear twice.
    pub fn trajectory(&self, b_start: &BlochVector, samples_per_branch: usize) -> Result<Vec<TrajectoryPoint>> {
        if samples_per_branch < 2 {
            return Err(invalid("samples_per_branch", "must be ≥ 2"));
        }
        let spec = &self.spec;
        let mut out = Vec::with_capacity(4 * samples_per_branch);
        let mut start = *b_start;
        let mut t0 = 0.0;
        for bm in &self.branches {
            let n = samples_per_branch - 1;
            for i in 0..=n {
                let dt = bm.duration * i as f64 / n as f64;
                let (state, omega) = if i == 0 || i == n {
                    let at_end = i == n;
                    let omega = match (bm.branch, at_end) {
                        (Branch::HotIsochore, _) | (Branch::ColdToHot, true) | (Branch::HotToCold, false) => spec.omega_b,
                        _ => spec.omega_a,
                    };
                    let state = if at_end { bm.propagator.apply(&start) } else { start };
                    (state, omega)
                } else {
                    match bm.branch {
                        Branch::HotIsochore => {
                            let p = IsochoreParams { tau: dt, ..spec.hot_isochore() };
                            (isochore_propagator(&p)?.apply(&start), spec.omega_b)
                        }
                        Branch::ColdIsochore => {
                            let p = IsochoreParams { tau: dt, ..spec.cold_isochore() };
                            (isochore_propagator(&p)?.apply(&start), spec.omega_a)
                        }
                        Branch::HotToCold | Branch::ColdToHot => {
                            let p = if bm.branch == Branch::HotToCold {
                                spec.hot_to_cold()
                            } else {
                                spec.cold_to_hot()
                            };
                            let prop = match &bm.angles {
                                Some(a) => a.propagator_at(dt),
                                None => adiabat_propagator_direct(
                                    &AdiabatParams::new(p.omega_start, p.omega_at(dt), p.j, dt),
                                    10_000,
                                )?,
                            };
                            (prop.apply(&start), p.omega_at(dt))
                        }
                    }
                };
                out.push(TrajectoryPoint {
                    t: t0 + dt,
                    omega,
                    branch: bm.branch,
                    state,
                });
            }
            start = bm.propagator.apply(&start);
            t0 += bm.duration;
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryPoint {
    pub t: f64,
    pub omega: f64,
    pub branch: Branch,
    pub state: BlochVector,
}

fn spectrum_of(map: &AffinePropagator) -> Spectrum {
    let m = map.matrix();
    let block: Matrix3<f64> = map.rotation_block();
    let eig = block.complex_eigenvalues();
    let mut ev: Vec<Complex64> = eig.iter().map(|z| Complex64::new(z.re, z.im)).collect();
    let mu4 = m[(3, 3)];
    let mu5 = m[(4, 4)];
    let is_real = |z: &Complex64| z.im.abs() <= REAL_TOL * z.norm().max(1e-300);
    let (mu1, mu2, mu3);
    if ev.iter().all(is_real) {
        ev.iter_mut().for_each(|z| z.im = 0.0);
        // all real: μ1 is the one following the longitudinal law
        let i1 = (0..3)
            .min_by(|&a, &b| (ev[a].re - mu4).abs().total_cmp(&(ev[b].re - mu4).abs()))
            .unwrap_or(0);
        mu1 = ev.remove(i1);
        ev.sort_by(|a, b| b.re.total_cmp(&a.re));
        mu2 = ev[0];
        mu3 = ev[1];
    } else {
        let i1 = (0..3)
            .min_by(|&a, &b| ev[a].im.abs().total_cmp(&ev[b].im.abs()))
            .unwrap_or(0);
        mu1 = Complex64::new(ev.remove(i1).re, 0.0);
        let upper = if ev[0].im >= 0.0 { ev[0] } else { ev[1] };
        mu2 = upper;
        mu3 = upper.conj();
    }
    Spectrum {
        mu: [
            Complex64::new(1.0, 0.0),
            mu1,
            mu2,
            mu3,
            Complex64::new(mu4, 0.0),
            Complex64::new(mu5, 0.0),
        ],
        phi: mu2.arg().abs(),
    }
}

/// Solves `(I − M₃ₓ₃) b = v` for `(b1, b2, b3)`, then the `(b4, b5)` rule.
fn fixed_point(map: &AffinePropagator) -> Result<BlochVector> {
    let m = map.matrix();
    let a = Matrix3::identity() - map.rotation_block();
    let v = Vector3::new(m[(0, CONST)], m[(1, CONST)], m[(2, CONST)]);
    let lu = a.lu();
    let scale = a.norm().max(1.0);
    let det = lu.determinant();
    if !(det.abs() > 1e-14 * scale * scale * scale) {
        return Err(Error::SingularSystem);
    }
    let x = lu.solve(&v).ok_or(Error::SingularSystem)?;
    let [r4, r5] = map.closure_rows();
    let b4 = (r4[0] * x[0] + r4[1] * x[1] + r4[2] * x[2] + r4[CONST]) / (1.0 - r4[3]);
    let b5 = (r5[0] * x[0] + r5[1] * x[1] + r5[2] * x[2] + r5[3] * b4 + r5[CONST]) / (1.0 - r5[4]);
    Ok(BlochVector::new(x[0], x[1], x[2], b4, b5))
}

pub fn limit_cycle(spec: &CycleSpec) -> Result<LimitCycleReport> {
    compose_cycle(spec)?.limit_cycle()
}

pub fn spectrum(spec: &CycleSpec) -> Result<Spectrum> {
    Ok(compose_cycle(spec)?.spectrum())
}

pub fn iterate(spec: &CycleSpec, b0: &BlochVector, n: usize) -> Result<Vec<BlochVector>> {
    compose_cycle(spec)?.iterate(b0, n)
}

pub fn trajectory(spec: &CycleSpec, b_start: &BlochVector, samples_per_branch: usize) -> Result<Vec<TrajectoryPoint>> {
    compose_cycle(spec)?.trajectory(b_start, samples_per_branch)
}

/// `⟨H⟩ = ω b1 + J b2`.
pub fn energy(b: &BlochVector, omega: f64, j: f64) -> f64 {
    omega * b.b1 + j * b.b2
}

/// Heats, work and entropy production of the limit cycle.
///
/// Heats and works are energy gained by the working medium; `power > 0`
/// means the device delivers work.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermoLedger {
    pub q_hot: f64,
    pub q_cold: f64,
    /// `E_A − E_D`.
    pub w_ab: f64,
    /// `E_C − E_B`.
    pub w_ba: f64,
    pub power: f64,
    /// `−(Q_h/T_h + Q_c/T_c)`.
    pub ds_ext: f64,
    /// `S(A) − S(B) − Q_h/T_h`.
    pub dsu_hot: f64,
    /// `S(C) − S(D) − Q_c/T_c`.
    pub dsu_cold: f64,
    /// `S_E(A) − S_E(B) − Q_h/T_h`.
    pub dse_hot: f64,
    /// `S_E(C) − S_E(D) − Q_c/T_c`.
    pub dse_cold: f64,
    /// `S_E(A) − S_E(D)`.
    pub dse_ab: f64,
    /// `S_E(C) − S_E(B)`.
    pub dse_ba: f64,
    pub period: f64,
}

impl ThermoLedger {
    pub fn dsu_total(&self) -> f64 {
        self.dsu_hot + self.dsu_cold
    }

    pub fn dse_total(&self) -> f64 {
        self.dse_hot + self.dse_cold
    }

    /// `Q_h + Q_c + W_ab + W_ba`.
    pub fn first_law_defect(&self) -> f64 {
        self.q_hot + self.q_cold + self.w_ab + self.w_ba
    }

    /// `ΔS^u_h + ΔS^u_c − ΔS_ext`.
    pub fn vn_identity_defect(&self) -> f64 {
        self.dsu_total() - self.ds_ext
    }

    /// `ΔS^E_h + ΔS^E_c − (ΔS_ext + ΔS^E_ba + ΔS^E_ab)`.
    pub fn energy_identity_defect(&self) -> f64 {
        self.dse_total() - (self.ds_ext + self.dse_ba + self.dse_ab)
    }
}

/// Ledger for a cycle whose corner states are `corners` (normally the limit cycle).
pub fn ledger_from_corners(spec: &CycleSpec, corners: &[BlochVector; 4]) -> Result<ThermoLedger> {
    let [a, b, c, d] = corners;
    let (wa, wb, j) = (spec.omega_a, spec.omega_b, spec.j);
    let (ea, eb) = (energy(a, wb, j), energy(b, wb, j));
    let (ec, ed) = (energy(c, wa, j), energy(d, wa, j));
    let q_hot = eb - ea;
    let q_cold = ed - ec;
    let (sa, sb, sc, sd) = (vn_entropy(a)?, vn_entropy(b)?, vn_entropy(c)?, vn_entropy(d)?);
    let (ea_s, eb_s) = (energy_entropy(a, wb, j)?, energy_entropy(b, wb, j)?);
    let (ec_s, ed_s) = (energy_entropy(c, wa, j)?, energy_entropy(d, wa, j)?);
    let ext_h = -q_hot / spec.t_hot;
    let ext_c = -q_cold / spec.t_cold;
    let period = spec.period();
    Ok(ThermoLedger {
        q_hot,
        q_cold,
        w_ab: ea - ed,
        w_ba: ec - eb,
        power: (q_hot + q_cold) / period,
        ds_ext: ext_h + ext_c,
        dsu_hot: sa - sb + ext_h,
        dsu_cold: sc - sd + ext_c,
        dse_hot: ea_s - eb_s + ext_h,
        dse_cold: ec_s - ed_s + ext_c,
        dse_ab: ea_s - ed_s,
        dse_ba: ec_s - eb_s,
        period,
    })
}

pub fn thermo_ledger(spec: &CycleSpec) -> Result<ThermoLedger> {
    let lc = limit_cycle(spec)?;
    ledger_from_corners(spec, &lc.corners)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::thermal_state;
    use crate::measures::vn_entropy;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn fig1() -> CycleSpec {
        CycleSpec {
            t_cold: 1.5,
            t_hot: 7.5,
            omega_a: 5.08364,
            omega_b: 12.6355,
            j: 2.0,
            conductance_cold: 0.3423,
            conductance_hot: 0.3423,
            dephasing_cold: 0.0,
            dephasing_hot: 0.0,
            tau_cold: 3.0,
            tau_hot: 2.5,
            tau_ab: 0.01,
            tau_ba: 0.01,
        }
    }

    fn random_spec(rng: &mut ChaCha8Rng) -> CycleSpec {
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

    #[test]
    fn zero_times_compose_to_identity() {
        let spec = CycleSpec {
            tau_cold: 0.0,
            tau_hot: 0.0,
            tau_ab: 0.0,
            tau_ba: 0.0,
            ..fig1()
        };
        assert!(spec.validate().is_err());
        // the map itself is still well defined branch by branch
        let hot = isochore_propagator(&spec.hot_isochore()).unwrap();
        assert!(hot.distance(&AffinePropagator::identity()) < 1e-15);
    }

    #[test]
    fn fig1_has_unique_limit_cycle() {
        let cp = compose_cycle(&fig1()).unwrap();
        let s = cp.spectrum();
        assert!((s.mu[0] - 1.0).norm() < 1e-10);
        assert!(s.is_unique());
        let lc = cp.limit_cycle().unwrap();
        assert!(lc.residual < 1e-12);
        assert!(vn_eigenvalues(&lc.b_a).min() > 0.0);
        // power iteration from a thermal start reaches the same point
        let start = thermal_state(12.6355, 2.0, 7.5).unwrap();
        let it = cp.iterate(&start, 400).unwrap();
        assert!(it.last().unwrap().distance(&lc.b_a) < 1e-10);
    }

    #[test]
    fn unitary_cycle_has_unit_spectrum() {
        let spec = CycleSpec {
            conductance_cold: 0.0,
            conductance_hot: 0.0,
            ..fig1()
        };
        let cp = compose_cycle(&spec).unwrap();
        let r = cp.map().rotation_block();
        assert!((r * r.transpose() - Matrix3::identity()).norm() < 1e-12);
        for m in cp.spectrum().moduli() {
            assert!((m - 1.0).abs() < 1e-10);
        }
        assert!(matches!(cp.limit_cycle(), Err(Error::NonUniqueLimitCycle { .. })));
    }

    #[test]
    fn no_isochore_time_means_no_unique_cycle() {
        let spec = CycleSpec {
            tau_cold: 0.0,
            tau_hot: 0.0,
            ..fig1()
        };
        assert!(matches!(limit_cycle(&spec), Err(Error::NonUniqueLimitCycle { .. })));
        for m in spectrum(&spec).unwrap().moduli() {
            assert!((m - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn closure_eigenvalues_follow_the_longitudinal_law() {
        let spec = fig1();
        let s = spectrum(&spec).unwrap();
        let expect = (-spec.relaxation_exponent()).exp();
        assert!((s.mu[4].re - expect).abs() < 1e-14);
        assert!((s.mu[5].re - expect * expect).abs() < 1e-14);
        assert!((s.mu[1].re - expect).abs() < 1e-12);
        assert_eq!(s.mu[1].im, 0.0);
        assert_eq!(s.mu[2], s.mu[3].conj());
    }

    #[test]
    fn anchor_invariance_of_spectrum() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..10 {
            let cp = compose_cycle(&random_spec(&mut rng)).unwrap();
            let base = spectrum_of(&cp.anchored_at(Corner::A));
            assert_eq!(cp.anchored_at(Corner::A), *cp.map());
            for c in [Corner::B, Corner::C, Corner::D] {
                let s = spectrum_of(&cp.anchored_at(c));
                for k in 0..6 {
                    assert!((s.mu[k] - base.mu[k]).norm() < 1e-12, "{c:?} μ{k}");
                }
            }
        }
    }

    #[test]
    fn limit_cycle_invariants_on_random_specs() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        for _ in 0..30 {
            let spec = random_spec(&mut rng);
            let cp = compose_cycle(&spec).unwrap();
            let lc = cp.limit_cycle().unwrap();
            assert!(lc.residual < 1e-10);
            assert!(lc.spectrum.subdominant() <= 1.0 + 1e-10);
            let led = ledger_from_corners(&spec, &lc.corners).unwrap();
            assert!(led.first_law_defect().abs() < 1e-12);
            assert!(led.vn_identity_defect().abs() < 1e-10);
            assert!(led.energy_identity_defect().abs() < 1e-10);
            assert!(led.ds_ext >= -1e-12);
            // corner D feeds back into A
            let back = cp.branch(Branch::ColdToHot).propagator.apply(&lc.corner(Corner::D));
            assert!(back.distance(&lc.b_a) < 1e-10);
        }
    }

    #[test]
    fn energy_examples() {
        assert_eq!(energy(&BlochVector::ZERO, 5.0, 2.0), 0.0);
        let (w, j, t) = (12.6355, 2.0, 7.5);
        let b = thermal_state(w, j, t).unwrap();
        // tr(H ρ_Gibbs) with levels −Ω/√2, 0, 0, Ω/√2
        let big = w.hypot(j);
        let e = big / std::f64::consts::SQRT_2;
        let z = 2.0 + 2.0 * (e / t).cosh();
        let oracle = (-e * (e / t).exp() + e * (-e / t).exp()) / z;
        assert!((energy(&b, w, j) - oracle).abs() < 1e-12);
        let u = BlochVector::new(0.1, -0.2, 0.3, 0.05, 0.1);
        let v = BlochVector::new(-0.04, 0.07, 0.0, 0.0, -0.2);
        let mix = BlochVector::from_array(std::array::from_fn(|k| 3.0 * u.to_array()[k] - 2.0 * v.to_array()[k]));
        assert!((energy(&mix, w, j) - (3.0 * energy(&u, w, j) - 2.0 * energy(&v, w, j))).abs() < 1e-14);
    }

    #[test]
    fn trajectory_endpoints_and_adiabat_entropy() {
        let spec = fig1();
        let cp = compose_cycle(&spec).unwrap();
        let lc = cp.limit_cycle().unwrap();
        let n = 11;
        let tr = cp.trajectory(&lc.b_a, n).unwrap();
        assert_eq!(tr.len(), 4 * n);
        for (k, c) in Corner::ALL.iter().enumerate() {
            assert!(tr[k * n].state.distance(&lc.corner(*c)) < 1e-12);
        }
        for k in 0..3 {
            assert_eq!(tr[k * n + n - 1].state, tr[(k + 1) * n].state);
        }
        assert!(tr[4 * n - 1].state.distance(&lc.b_a) < 1e-12);
        for seg in [1, 3] {
            let s0 = vn_entropy(&tr[seg * n].state).unwrap();
            for p in &tr[seg * n..(seg + 1) * n] {
                assert!((vn_entropy(&p.state).unwrap() - s0).abs() < 1e-10);
            }
        }
        assert!((tr.last().unwrap().t - spec.period()).abs() < 1e-15);
        assert!(cp.trajectory(&lc.b_a, 1).is_err());
    }

    #[test]
    fn direct_adiabats_reproduce_wei_norman_cycle() {
        let spec = fig1();
        let wn = compose_cycle(&spec).unwrap();
        let direct = compose_cycle_with(&spec, AdiabatMethod::Direct { steps: 20_000 }).unwrap();
        assert!(wn.map().distance(direct.map()) < 1e-9);
    }

    #[test]
    fn validation_rejects_bad_specs() {
        assert!(CycleSpec { t_hot: -1.0, ..fig1() }.validate().is_err());
        assert!(CycleSpec { tau_ab: -0.1, ..fig1() }.validate().is_err());
        assert!(CycleSpec { conductance_cold: f64::NAN, ..fig1() }.validate().is_err());
        assert!(CycleSpec { omega_a: 0.0, j: 0.0, ..fig1() }.validate().is_err());
        assert!(iterate(&fig1(), &BlochVector::new(1.0, 0.0, 0.0, 0.0, 0.0), 3).is_err());
    }
}
