//! Parameter sets of the published figures.
//!
//! Only the values printed in each caption are encoded. Where a caption
//! leaves a parameter open the Fig.-1 value is used and the field is listed
//! in [`Preset::fallback`].

use crate::algebra::{thermal_state, BlochVector};
use crate::engine::CycleSpec;
use crate::error::{invalid, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Preset {
    pub name: String,
    pub spec: CycleSpec,
    /// Fields not stated in the caption.
    pub fallback: Vec<&'static str>,
}

/// The typical cycle `ABCD`.
pub fn fig1() -> CycleSpec {
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

/// Two-start convergence runs on the Fig.-1 cycle.
pub fn fig2() -> Preset {
    Preset {
        name: "fig2".into(),
        spec: fig1(),
        fallback: vec![
            "t_cold", "t_hot", "omega_a", "omega_b", "j", "conductance_cold", "conductance_hot",
            "dephasing_cold", "dephasing_hot", "tau_cold", "tau_hot", "tau_ab", "tau_ba",
        ],
    }
}

/// Initial states for [`fig2`]: equilibrium with the cold bath at `ω_b`,
/// and the infinite-temperature state.
pub fn fig2_starts(spec: &CycleSpec) -> Result<[BlochVector; 2]> {
    Ok([thermal_state(spec.omega_b, spec.j, spec.t_cold)?, BlochVector::ZERO])
}

/// Distance-to-limit-cycle runs. Cases 1, 2 have short adiabats (0.01),
/// cases 3, 4 long ones (1.0); cases 2, 4 dephase on the isochores.
pub fn fig3(case: u8) -> Result<Preset> {
    let (tau_adiabat, dephasing) = match case {
        1 => (0.01, false),
        2 => (0.01, true),
        3 => (1.0, false),
        4 => (1.0, true),
        _ => return Err(invalid("case", format!("fig3 has cases 1..=4, got {case}"))),
    };
    let (dh, dc) = if dephasing { (0.01, 0.03) } else { (0.0, 0.0) };
    Ok(Preset {
        name: format!("fig3-{case}"),
        spec: CycleSpec {
            tau_hot: 0.6,
            tau_cold: 0.6,
            tau_ab: tau_adiabat,
            tau_ba: tau_adiabat,
            dephasing_hot: dh,
            dephasing_cold: dc,
            ..fig1()
        },
        fallback: vec![
            "t_cold", "t_hot", "omega_a", "omega_b", "j", "conductance_cold", "conductance_hot",
            "tau_ab", "tau_ba",
        ],
    })
}

/// Offset from the limit cycle used as the initial state of the [`fig3`] runs.
pub const FIG3_OFFSET: [f64; 5] = [0.0, 0.0, 0.1, 0.0, 0.0];

pub fn fig3_start(limit_cycle_a: &BlochVector) -> BlochVector {
    let b = limit_cycle_a.to_array();
    BlochVector::from_array(std::array::from_fn(|k| b[k] + FIG3_OFFSET[k]))
}

/// Cycles "1" (shortest), "2" (zero power) and "3" (positive power).
pub fn fig5(cycle: u8) -> Result<CycleSpec> {
    let (tau_hot, tau_cold) = match cycle {
        1 => (0.32, 0.64),
        2 => (0.581, 1.1602),
        3 => (1.5, 3.6),
        _ => return Err(invalid("cycle", format!("fig5 has cycles 1..=3, got {cycle}"))),
    };
    Ok(CycleSpec {
        t_cold: 1.5,
        t_hot: 7.5,
        omega_a: 5.0836387,
        omega_b: 12.63545,
        j: 2.0,
        conductance_cold: 0.10662,
        conductance_hot: 1.0048,
        dephasing_cold: 0.0,
        dephasing_hot: 0.0,
        tau_cold,
        tau_hot,
        tau_ab: 0.05,
        tau_ba: 0.06,
    })
}

/// The friction cycle with no time on the hot isochore. `Γ_h` is irrelevant
/// at `τ_h = 0` and set equal to `Γ_c`.
pub fn fig6() -> Preset {
    Preset {
        name: "fig6".into(),
        spec: CycleSpec {
            t_cold: 1.5,
            t_hot: 7.5,
            omega_a: 5.0836387,
            omega_b: 12.635485,
            j: 2.0,
            conductance_cold: 1.7,
            conductance_hot: 1.7,
            dephasing_cold: 0.0,
            dephasing_hot: 0.0,
            tau_cold: 0.6,
            tau_hot: 0.0,
            tau_ab: 0.03,
            tau_ba: 0.03,
        },
        fallback: vec!["conductance_hot", "dephasing_cold", "dephasing_hot"],
    }
}
