//! Command runners. Each returns the tables to write; nothing here touches
//! the file system.

use quantum_otto::algebra::vn_eigenvalues;
use quantum_otto::engine::{ledger_from_corners, TrajectoryPoint};
use quantum_otto::measures::{conditional_entropy, energy_entropy, quantum_distance, vn_entropy, wootters_energy_distance};
use quantum_otto::presets::{self, Preset};
use quantum_otto::{compose_cycle, energy, thermal_state, BlochVector, Corner, CyclePropagator, CycleSpec};
use rayon::prelude::*;

use crate::config::{config_key, engine_echo, set_engine_key, validate_spec, InitialState, RunConfig};
use crate::error::{engine_kind, CliError};
use crate::table::{Cell, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    LimitCycle,
    Iterate,
    Trajectory,
    Spectrum,
    Sweep,
    Figure(Figure),
    Equilibrium,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::LimitCycle => "limit-cycle",
            Command::Iterate => "iterate",
            Command::Trajectory => "trajectory",
            Command::Spectrum => "spectrum",
            Command::Sweep => "sweep",
            Command::Figure(_) => "figure",
            Command::Equilibrium => "equilibrium",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Figure {
    Fig1,
    Fig2,
    Fig3,
    Fig5,
    Fig6,
}

impl Figure {
    pub fn name(self) -> &'static str {
        match self {
            Figure::Fig1 => "fig1",
            Figure::Fig2 => "fig2",
            Figure::Fig3 => "fig3",
            Figure::Fig5 => "fig5",
            Figure::Fig6 => "fig6",
        }
    }
}

/// Output of one command: the main table plus optional named companions.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifacts {
    pub primary: Table,
    pub secondary: Vec<(&'static str, Table)>,
}

impl From<Table> for Artifacts {
    fn from(primary: Table) -> Self {
        Artifacts {
            primary,
            secondary: Vec::new(),
        }
    }
}

/// `threads = None` uses rayon's global pool.
pub fn run_command(cfg: &RunConfig, cmd: Command, threads: Option<usize>) -> Result<Artifacts, CliError> {
    let mut art = match cmd {
        Command::LimitCycle => limit_cycle_table(cfg)?.into(),
        Command::Iterate => iterate_table(cfg)?.into(),
        Command::Trajectory => trajectory_table(cfg)?.into(),
        Command::Spectrum => spectrum_table(cfg)?.into(),
        Command::Sweep => sweep_table(cfg, threads)?.into(),
        Command::Equilibrium => equilibrium_table(cfg)?.into(),
        Command::Figure(f) => figure(cfg, f)?,
    };
    let run = serde_json::Value::Object(cfg.run_echo.clone()).to_string();
    for t in std::iter::once(&mut art.primary).chain(art.secondary.iter_mut().map(|(_, t)| t)) {
        t.meta.insert(0, ("command".into(), cmd.name().into()));
        t.meta.push(("run".into(), run.clone()));
        t.meta.push(("precision".into(), cfg.output.precision.to_string()));
    }
    Ok(art)
}

fn names(prefix: &str, items: &[&str]) -> Vec<String> {
    items.iter().map(|s| format!("{prefix}{s}")).collect()
}

fn bloch_header() -> Vec<String> {
    names("", &["b1", "b2", "b3", "b4", "b5"])
}

fn bloch_cells(b: &BlochVector) -> Vec<Cell> {
    b.to_array().into_iter().map(Cell::Num).collect()
}

fn meta_engine(t: &mut Table, key: &str, spec: &CycleSpec, fallback: &[&str]) {
    t.meta(key, engine_echo(spec).to_string());
    let fb: Vec<&str> = fallback.iter().map(|f| config_key(f)).collect();
    let fb = if fb.is_empty() { "none".to_string() } else { fb.join(",") };
    t.meta(format!("fallback{}", &key["engine".len()..]), fb);
}

fn meta_preset(t: &mut Table, key: &str, p: &Preset) {
    meta_engine(t, key, &p.spec, &p.fallback);
}

pub fn limit_cycle_header() -> Vec<String> {
    let mut h = Vec::new();
    for c in ["A", "B", "C", "D"] {
        h.extend(names(&format!("{c}_"), &["b1", "b2", "b3", "b4", "b5"]));
    }
    for k in 0..6 {
        h.push(format!("mu{k}_re"));
        h.push(format!("mu{k}_im"));
    }
    h.extend(names(
        "",
        &[
            "phi", "gap", "Q_h", "Q_c", "W_ab", "W_ba", "P", "dS_ext", "dSu_h", "dSu_c", "dSu_total", "dSE_h", "dSE_c",
            "dSE_ab", "dSE_ba", "dSE_total", "period",
        ],
    ));
    h
}

pub fn limit_cycle_cells(spec: &CycleSpec) -> quantum_otto::Result<Vec<Cell>> {
    let lc = compose_cycle(spec)?.limit_cycle()?;
    let led = ledger_from_corners(spec, &lc.corners)?;
    let mut row: Vec<Cell> = lc.corners.iter().flat_map(bloch_cells).collect();
    for mu in lc.spectrum.mu {
        row.push(mu.re.into());
        row.push(mu.im.into());
    }
    row.extend(
        [
            lc.spectrum.phi,
            lc.gap,
            led.q_hot,
            led.q_cold,
            led.w_ab,
            led.w_ba,
            led.power,
            led.ds_ext,
            led.dsu_hot,
            led.dsu_cold,
            led.dsu_total(),
            led.dse_hot,
            led.dse_cold,
            led.dse_ab,
            led.dse_ba,
            led.dse_total(),
            led.period,
        ]
        .map(Cell::Num),
    );
    Ok(row)
}

fn limit_cycle_table(cfg: &RunConfig) -> Result<Table, CliError> {
    let spec = cfg.engine()?;
    let mut t = Table::new(limit_cycle_header());
    meta_engine(&mut t, "engine", spec, &[]);
    t.push(limit_cycle_cells(spec)?);
    Ok(t)
}

fn resolve_start(sel: &InitialState, spec: &CycleSpec, cp: &CyclePropagator) -> Result<BlochVector, CliError> {
    Ok(match sel {
        InitialState::Cold => thermal_state(spec.omega_a, spec.j, spec.t_cold)?,
        InitialState::Hot => thermal_state(spec.omega_b, spec.j, spec.t_hot)?,
        InitialState::InfiniteTemperature => BlochVector::ZERO,
        InitialState::LimitCycle => cp.limit_cycle()?.b_a,
        InitialState::Vector(b) => {
            let b = BlochVector::from_array(*b);
            vn_eigenvalues(&b)
                .check_physical()
                .map_err(|e| CliError::config("run.initial_state", e.to_string()))?;
            b
        }
    })
}

fn iterate_header() -> Vec<String> {
    let mut h = vec!["k".to_string()];
    h.extend(bloch_header());
    h.extend(names("", &["quantum_distance", "wootters_energy_distance", "conditional_entropy"]));
    h
}

/// Rows `k, b_k, D, D_E, S(b_k|b_lc)` with distances taken at corner `A`.
fn iterate_rows(t: &mut Table, prefix: &[Cell], spec: &CycleSpec, cp: &CyclePropagator, b0: &BlochVector, n: usize) -> Result<(), CliError> {
    let lc = cp.limit_cycle()?.b_a;
    for (k, b) in cp.iterate(b0, n)?.iter().enumerate() {
        let mut row = prefix.to_vec();
        row.push(k.into());
        row.extend(bloch_cells(b));
        row.push(quantum_distance(b, &lc).into());
        row.push(wootters_energy_distance(b, &lc, spec.omega_b, spec.j)?.into());
        row.push(conditional_entropy(b, &lc)?.into());
        t.push(row);
    }
    Ok(())
}

fn iterate_table(cfg: &RunConfig) -> Result<Table, CliError> {
    let spec = cfg.engine()?;
    let cp = compose_cycle(spec)?;
    let sel = cfg.run.initial_state.clone().unwrap_or(InitialState::InfiniteTemperature);
    let b0 = resolve_start(&sel, spec, &cp)?;
    let mut t = Table::new(iterate_header());
    meta_engine(&mut t, "engine", spec, &[]);
    iterate_rows(&mut t, &[], spec, &cp, &b0, cfg.run.n_cycles)?;
    Ok(t)
}

fn trajectory_header() -> Vec<String> {
    let mut h = names("", &["t", "branch", "omega"]);
    h.extend(bloch_header());
    h.extend(names("", &["S_vn", "S_E", "E"]));
    h
}

fn trajectory_cells(p: &TrajectoryPoint, j: f64) -> Result<Vec<Cell>, CliError> {
    let mut row = vec![p.t.into(), p.branch.name().into(), p.omega.into()];
    row.extend(bloch_cells(&p.state));
    row.push(vn_entropy(&p.state)?.into());
    row.push(energy_entropy(&p.state, p.omega, j)?.into());
    row.push(energy(&p.state, p.omega, j).into());
    Ok(row)
}

fn trajectory_rows(t: &mut Table, prefix: &[Cell], spec: &CycleSpec, start: Option<&InitialState>, samples: usize) -> Result<(), CliError> {
    let cp = compose_cycle(spec)?;
    let b0 = resolve_start(start.unwrap_or(&InitialState::LimitCycle), spec, &cp)?;
    for p in cp.trajectory(&b0, samples)? {
        let mut row = prefix.to_vec();
        row.extend(trajectory_cells(&p, spec.j)?);
        t.push(row);
    }
    Ok(())
}

fn trajectory_table(cfg: &RunConfig) -> Result<Table, CliError> {
    let spec = cfg.engine()?;
    let mut t = Table::new(trajectory_header());
    meta_engine(&mut t, "engine", spec, &[]);
    trajectory_rows(&mut t, &[], spec, cfg.run.initial_state.as_ref(), cfg.run.samples_per_branch)?;
    Ok(t)
}

fn spectrum_table(cfg: &RunConfig) -> Result<Table, CliError> {
    let spec = cfg.engine()?;
    let s = compose_cycle(spec)?.spectrum();
    let mut t = Table::new(names("", &["k", "re", "im", "modulus", "arg"]));
    meta_engine(&mut t, "engine", spec, &[]);
    for (k, mu) in s.mu.iter().enumerate() {
        t.push(vec![k.into(), mu.re.into(), mu.im.into(), mu.norm().into(), mu.arg().into()]);
    }
    Ok(t)
}

fn sweep_table(cfg: &RunConfig, threads: Option<usize>) -> Result<Table, CliError> {
    let base = cfg.engine()?;
    let axis = cfg
        .run
        .sweep
        .as_ref()
        .ok_or_else(|| CliError::config("run.sweep", "missing section (required by sweep)"))?;
    let mut specs = Vec::with_capacity(axis.steps);
    for v in axis.grid() {
        let mut s = *base;
        set_engine_key(&mut s, &axis.key, v)?;
        validate_spec(&s).map_err(|e| CliError::config("run.sweep", format!("grid point {}={v}: {e}", axis.key)))?;
        specs.push(s);
    }

    let compute = || -> Vec<quantum_otto::Result<Vec<Cell>>> { specs.par_iter().map(limit_cycle_cells).collect() };
    let results = match threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::config("--threads", e.to_string()))?
            .install(compute),
        None => compute(),
    };

    let mut header = vec!["index".to_string(), axis.key.clone(), "status".to_string()];
    let lc_header = limit_cycle_header();
    let width = lc_header.len();
    header.extend(lc_header);
    let mut t = Table::new(header);
    meta_engine(&mut t, "engine", base, &[]);
    for (i, (v, r)) in axis.grid().into_iter().zip(results).enumerate() {
        let mut row = vec![i.into(), v.into()];
        match r {
            Ok(cells) => {
                row.push("ok".into());
                row.extend(cells);
            }
            Err(e) => {
                row.push(engine_kind(&e).into());
                row.extend(std::iter::repeat_n(Cell::Empty, width));
            }
        }
        t.push(row);
    }
    Ok(t)
}

/// Energy entropy of the Gibbs state on an evenly spaced `ω` grid.
pub fn equilibrium_curve(omega_from: f64, omega_to: f64, steps: usize, j: f64, temperature: f64) -> quantum_otto::Result<Vec<(f64, f64)>> {
    let grid: Vec<f64> = if steps <= 1 {
        vec![omega_from]
    } else {
        (0..steps)
            .map(|i| omega_from + (omega_to - omega_from) * i as f64 / (steps - 1) as f64)
            .collect()
    };
    grid.into_iter()
        .map(|w| Ok((w, energy_entropy(&thermal_state(w, j, temperature)?, w, j)?)))
        .collect()
}

fn equilibrium_table(cfg: &RunConfig) -> Result<Table, CliError> {
    let r = cfg
        .run
        .equilibrium
        .as_ref()
        .ok_or_else(|| CliError::config("run.equilibrium", "missing section (required by equilibrium)"))?;
    let mut t = Table::new(names("", &["omega", "S_E"]));
    for (w, s) in equilibrium_curve(r.omega_from, r.omega_to, r.steps, r.j, r.temperature)? {
        t.push(vec![w.into(), s.into()]);
    }
    Ok(t)
}

fn figure(cfg: &RunConfig, f: Figure) -> Result<Artifacts, CliError> {
    let run = &cfg.run;
    let mut art = match f {
        Figure::Fig1 => {
            let spec = presets::fig1();
            let mut t = Table::new(trajectory_header());
            meta_engine(&mut t, "engine", &spec, &[]);
            trajectory_rows(&mut t, &[], &spec, None, run.samples_per_branch)?;
            Artifacts::from(t)
        }
        Figure::Fig2 => {
            let p = presets::fig2();
            let cp = compose_cycle(&p.spec)?;
            let mut h = names("", &["start", "k", "corner", "omega"]);
            h.extend(bloch_header());
            h.extend(names("", &["S_vn", "S_E", "E"]));
            let mut t = Table::new(h);
            meta_preset(&mut t, "engine", &p);
            let labels = ["cold_equilibrium", "infinite_temperature"];
            for (label, b0) in labels.into_iter().zip(presets::fig2_starts(&p.spec)?) {
                for (k, b) in cp.iterate(&b0, run.n_cycles)?.iter().enumerate() {
                    for (corner, s) in Corner::ALL.into_iter().zip(cp.corners(b)) {
                        let omega = match corner {
                            Corner::A | Corner::B => p.spec.omega_b,
                            Corner::C | Corner::D => p.spec.omega_a,
                        };
                        let mut row = vec![label.into(), k.into(), format!("{corner:?}").as_str().into(), omega.into()];
                        row.extend(bloch_cells(&s));
                        row.push(vn_entropy(&s)?.into());
                        row.push(energy_entropy(&s, omega, p.spec.j)?.into());
                        row.push(energy(&s, omega, p.spec.j).into());
                        t.push(row);
                    }
                }
            }
            Artifacts::from(t)
        }
        Figure::Fig3 => {
            let mut h = vec!["case".to_string()];
            h.extend(iterate_header());
            let mut t = Table::new(h);
            for case in 1..=4u8 {
                let p = presets::fig3(case)?;
                meta_preset(&mut t, &format!("engine.case{case}"), &p);
                let cp = compose_cycle(&p.spec)?;
                let b0 = presets::fig3_start(&cp.limit_cycle()?.b_a);
                iterate_rows(&mut t, &[(case as usize).into()], &p.spec, &cp, &b0, run.n_cycles)?;
            }
            Artifacts::from(t)
        }
        Figure::Fig5 => {
            let mut h = vec!["cycle".to_string()];
            h.extend(limit_cycle_header());
            let mut t = Table::new(h.clone());
            let mut h2 = vec!["cycle".to_string()];
            h2.extend(trajectory_header());
            let mut tr = Table::new(h2);
            for cycle in 1..=3u8 {
                let spec = presets::fig5(cycle)?;
                let key = format!("engine.cycle{cycle}");
                meta_engine(&mut t, &key, &spec, &[]);
                meta_engine(&mut tr, &key, &spec, &[]);
                let mut row = vec![Cell::from(cycle as usize)];
                row.extend(limit_cycle_cells(&spec)?);
                t.push(row);
                trajectory_rows(&mut tr, &[(cycle as usize).into()], &spec, None, run.samples_per_branch)?;
            }
            Artifacts {
                primary: t,
                secondary: vec![("trajectory", tr)],
            }
        }
        Figure::Fig6 => {
            let p = presets::fig6();
            let mut t = Table::new(limit_cycle_header());
            meta_preset(&mut t, "engine", &p);
            t.push(limit_cycle_cells(&p.spec)?);
            let mut tr = Table::new(trajectory_header());
            meta_preset(&mut tr, "engine", &p);
            trajectory_rows(&mut tr, &[], &p.spec, None, run.samples_per_branch)?;
            Artifacts {
                primary: t,
                secondary: vec![("trajectory", tr)],
            }
        }
    };
    for t in std::iter::once(&mut art.primary).chain(art.secondary.iter_mut().map(|(_, t)| t)) {
        t.meta.insert(0, ("preset".into(), f.name().into()));
    }
    Ok(art)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equilibrium_curve_limits() {
        for (w, s) in equilibrium_curve(1.0, 20.0, 7, 2.0, 1e12).unwrap() {
            assert!((s - 4f64.ln()).abs() < 1e-9, "ω = {w}: {s}");
        }
        for (_, s) in equilibrium_curve(5.0, 20.0, 4, 2.0, 1e-3).unwrap() {
            assert!(s < 1e-12);
        }
        let (w, s) = equilibrium_curve(12.6355, 12.6355, 1, 2.0, 7.5).unwrap()[0];
        let direct = energy_entropy(&thermal_state(12.6355, 2.0, 7.5).unwrap(), 12.6355, 2.0).unwrap();
        assert_eq!((w, s), (12.6355, direct));
    }

    #[test]
    fn limit_cycle_row_matches_header() {
        let row = limit_cycle_cells(&presets::fig1()).unwrap();
        assert_eq!(row.len(), limit_cycle_header().len());
    }
}
