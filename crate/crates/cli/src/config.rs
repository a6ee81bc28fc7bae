//! JSON run configuration.
//!
//! Three top-level sections: `engine` (cycle parameters, all required),
//! `run` (command options) and `output`. Unknown keys are rejected at every
//! level and each error carries the dotted key path.

use std::path::{Path, PathBuf};

use quantum_otto::CycleSpec;
use serde_json::{Map, Value};

use crate::error::CliError;

/// Engine keys in column order.
pub const ENGINE_KEYS: [&str; 13] = [
    "t_cold",
    "t_hot",
    "omega_a",
    "omega_b",
    "j",
    "gamma_cold_conductance",
    "gamma_hot_conductance",
    "dephasing_cold",
    "dephasing_hot",
    "tau_cold",
    "tau_hot",
    "tau_ab",
    "tau_ba",
];

pub const DEFAULT_PRECISION: usize = 12;
pub const DEFAULT_CYCLES: usize = 50;
pub const DEFAULT_SAMPLES: usize = 50;

#[derive(Debug, Clone, PartialEq)]
pub enum InitialState {
    /// Equilibrium with the cold bath at `ω_a`.
    Cold,
    /// Equilibrium with the hot bath at `ω_b`.
    Hot,
    InfiniteTemperature,
    LimitCycle,
    Vector([f64; 5]),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepAxis {
    pub key: String,
    pub from: f64,
    pub to: f64,
    pub steps: usize,
}

impl SweepAxis {
    pub fn grid(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.from];
        }
        let n = (self.steps - 1) as f64;
        (0..self.steps)
            .map(|i| self.from + (self.to - self.from) * i as f64 / n)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EquilibriumRange {
    pub omega_from: f64,
    pub omega_to: f64,
    pub steps: usize,
    pub j: f64,
    pub temperature: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOptions {
    pub n_cycles: usize,
    pub samples_per_branch: usize,
    pub initial_state: Option<InitialState>,
    pub sweep: Option<SweepAxis>,
    pub equilibrium: Option<EquilibriumRange>,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            n_cycles: DEFAULT_CYCLES,
            samples_per_branch: DEFAULT_SAMPLES,
            initial_state: None,
            sweep: None,
            equilibrium: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputOptions {
    pub path: Option<PathBuf>,
    pub precision: usize,
}

impl Default for OutputOptions {
    fn default() -> Self {
        OutputOptions {
            path: None,
            precision: DEFAULT_PRECISION,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunConfig {
    pub engine: Option<CycleSpec>,
    pub run: RunOptions,
    pub output: OutputOptions,
    /// Normalized `run` section, echoed into the CSV metadata.
    pub run_echo: Map<String, Value>,
}

impl RunConfig {
    pub fn engine(&self) -> Result<&CycleSpec, CliError> {
        self.engine
            .as_ref()
            .ok_or_else(|| CliError::config("engine", "missing section"))
    }
}

pub fn load_config(path: &Path) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::config("$", format!("cannot read {}: {e}", path.display())))?;
    parse_config(&text)
}

pub fn parse_config(text: &str) -> Result<RunConfig, CliError> {
    let root: Value = serde_json::from_str(text).map_err(|e| {
        CliError::config("$", format!("parse error at line {} column {}: {e}", e.line(), e.column()))
    })?;
    let root = object(&root, "$")?;
    reject_unknown(root, &["engine", "run", "output"], "")?;

    let engine = root
        .get("engine")
        .map(|v| object(v, "engine").and_then(parse_engine))
        .transpose()?;
    let (run, run_echo) = match root.get("run") {
        Some(v) => parse_run(object(v, "run")?)?,
        None => parse_run(&Map::new())?,
    };
    let output = match root.get("output") {
        Some(v) => parse_output(object(v, "output")?)?,
        None => OutputOptions::default(),
    };
    Ok(RunConfig {
        engine,
        run,
        output,
        run_echo,
    })
}

pub fn parse_engine(map: &Map<String, Value>) -> Result<CycleSpec, CliError> {
    reject_unknown(map, &ENGINE_KEYS, "engine")?;
    let mut v = [0.0; 13];
    for (slot, key) in v.iter_mut().zip(ENGINE_KEYS) {
        *slot = number(map, key, "engine")?
            .ok_or_else(|| CliError::config(format!("engine.{key}"), "missing required key"))?;
    }
    let spec = CycleSpec {
        t_cold: v[0],
        t_hot: v[1],
        omega_a: v[2],
        omega_b: v[3],
        j: v[4],
        conductance_cold: v[5],
        conductance_hot: v[6],
        dephasing_cold: v[7],
        dephasing_hot: v[8],
        tau_cold: v[9],
        tau_hot: v[10],
        tau_ab: v[11],
        tau_ba: v[12],
    };
    validate_spec(&spec)?;
    Ok(spec)
}

/// Range check with errors keyed by config names.
pub fn validate_spec(spec: &CycleSpec) -> Result<(), CliError> {
    spec.validate().map_err(|e| match e {
        quantum_otto::Error::InvalidParameter { name, reason } => {
            CliError::config(format!("engine.{}", config_key(name)), format!("out of range: {reason}"))
        }
        other => CliError::Engine(other),
    })
}

/// Config key of a [`CycleSpec`] field.
pub fn config_key(field: &str) -> &str {
    match field {
        "conductance_cold" => "gamma_cold_conductance",
        "conductance_hot" => "gamma_hot_conductance",
        other => other,
    }
}

pub fn engine_values(spec: &CycleSpec) -> [f64; 13] {
    [
        spec.t_cold,
        spec.t_hot,
        spec.omega_a,
        spec.omega_b,
        spec.j,
        spec.conductance_cold,
        spec.conductance_hot,
        spec.dephasing_cold,
        spec.dephasing_hot,
        spec.tau_cold,
        spec.tau_hot,
        spec.tau_ab,
        spec.tau_ba,
    ]
}

/// Sets one engine parameter by config key.
pub fn set_engine_key(spec: &mut CycleSpec, key: &str, value: f64) -> Result<(), CliError> {
    let slot = match key {
        "t_cold" => &mut spec.t_cold,
        "t_hot" => &mut spec.t_hot,
        "omega_a" => &mut spec.omega_a,
        "omega_b" => &mut spec.omega_b,
        "j" => &mut spec.j,
        "gamma_cold_conductance" => &mut spec.conductance_cold,
        "gamma_hot_conductance" => &mut spec.conductance_hot,
        "dephasing_cold" => &mut spec.dephasing_cold,
        "dephasing_hot" => &mut spec.dephasing_hot,
        "tau_cold" => &mut spec.tau_cold,
        "tau_hot" => &mut spec.tau_hot,
        "tau_ab" => &mut spec.tau_ab,
        "tau_ba" => &mut spec.tau_ba,
        _ => return Err(CliError::config("run.sweep.key", format!("unknown engine key {key:?}"))),
    };
    *slot = value;
    Ok(())
}

/// The engine section as JSON, keys sorted.
pub fn engine_echo(spec: &CycleSpec) -> Value {
    let map: Map<String, Value> = ENGINE_KEYS
        .iter()
        .zip(engine_values(spec))
        .map(|(k, v)| (k.to_string(), Value::from(v)))
        .collect();
    Value::Object(map)
}

fn parse_run(map: &Map<String, Value>) -> Result<(RunOptions, Map<String, Value>), CliError> {
    reject_unknown(
        map,
        &["n_cycles", "samples_per_branch", "initial_state", "sweep", "equilibrium"],
        "run",
    )?;
    let mut opts = RunOptions::default();
    if let Some(n) = count(map, "n_cycles", "run")? {
        opts.n_cycles = n;
    }
    if let Some(n) = count(map, "samples_per_branch", "run")? {
        if n < 2 {
            return Err(CliError::config("run.samples_per_branch", "must be ≥ 2"));
        }
        opts.samples_per_branch = n;
    }
    opts.initial_state = map.get("initial_state").map(parse_initial_state).transpose()?;
    opts.sweep = map
        .get("sweep")
        .map(|v| object(v, "run.sweep").and_then(parse_sweep))
        .transpose()?;
    opts.equilibrium = map
        .get("equilibrium")
        .map(|v| object(v, "run.equilibrium").and_then(parse_equilibrium))
        .transpose()?;

    let mut echo = map.clone();
    echo.insert("n_cycles".into(), opts.n_cycles.into());
    echo.insert("samples_per_branch".into(), opts.samples_per_branch.into());
    Ok((opts, echo))
}

fn parse_initial_state(v: &Value) -> Result<InitialState, CliError> {
    const PATH: &str = "run.initial_state";
    match v {
        Value::String(s) => match s.as_str() {
            "cold" => Ok(InitialState::Cold),
            "hot" => Ok(InitialState::Hot),
            "infinite_temperature" => Ok(InitialState::InfiniteTemperature),
            "limit_cycle" => Ok(InitialState::LimitCycle),
            other => Err(CliError::config(
                PATH,
                format!("expected cold, hot, infinite_temperature, limit_cycle or [b1..b5], got {other:?}"),
            )),
        },
        Value::Array(items) if items.len() == 5 => {
            let mut b = [0.0; 5];
            for (k, item) in items.iter().enumerate() {
                b[k] = item
                    .as_f64()
                    .filter(|x| x.is_finite())
                    .ok_or_else(|| CliError::config(format!("{PATH}[{k}]"), "expected a finite number"))?;
            }
            Ok(InitialState::Vector(b))
        }
        _ => Err(CliError::config(PATH, "expected a selector string or an array of 5 numbers")),
    }
}

fn parse_sweep(map: &Map<String, Value>) -> Result<SweepAxis, CliError> {
    reject_unknown(map, &["key", "from", "to", "steps"], "run.sweep")?;
    let key = match map.get("key") {
        Some(Value::String(s)) if ENGINE_KEYS.contains(&s.as_str()) => s.clone(),
        Some(Value::String(s)) => {
            return Err(CliError::config("run.sweep.key", format!("unknown engine key {s:?}")))
        }
        Some(_) => return Err(CliError::config("run.sweep.key", "expected a string")),
        None => return Err(CliError::config("run.sweep.key", "missing required key")),
    };
    let req = |k: &str| {
        number(map, k, "run.sweep")?.ok_or_else(|| CliError::config(format!("run.sweep.{k}"), "missing required key"))
    };
    let (from, to) = (req("from")?, req("to")?);
    let steps = count(map, "steps", "run.sweep")?
        .ok_or_else(|| CliError::config("run.sweep.steps", "missing required key"))?;
    if steps == 0 {
        return Err(CliError::config("run.sweep.steps", "must be ≥ 1"));
    }
    Ok(SweepAxis { key, from, to, steps })
}

fn parse_equilibrium(map: &Map<String, Value>) -> Result<EquilibriumRange, CliError> {
    const P: &str = "run.equilibrium";
    reject_unknown(map, &["omega_from", "omega_to", "steps", "j", "temperature"], P)?;
    let req = |k: &str| number(map, k, P)?.ok_or_else(|| CliError::config(format!("{P}.{k}"), "missing required key"));
    let range = EquilibriumRange {
        omega_from: req("omega_from")?,
        omega_to: req("omega_to")?,
        steps: count(map, "steps", P)?.ok_or_else(|| CliError::config(format!("{P}.steps"), "missing required key"))?,
        j: req("j")?,
        temperature: req("temperature")?,
    };
    for (k, v) in [("omega_from", range.omega_from), ("omega_to", range.omega_to), ("temperature", range.temperature)] {
        if !(v > 0.0) {
            return Err(CliError::config(format!("{P}.{k}"), format!("out of range: must be > 0, got {v}")));
        }
    }
    if range.steps == 0 {
        return Err(CliError::config(format!("{P}.steps"), "must be ≥ 1"));
    }
    Ok(range)
}

fn parse_output(map: &Map<String, Value>) -> Result<OutputOptions, CliError> {
    reject_unknown(map, &["path", "precision"], "output")?;
    let mut out = OutputOptions::default();
    match map.get("path") {
        Some(Value::String(s)) => out.path = Some(PathBuf::from(s)),
        Some(_) => return Err(CliError::config("output.path", "expected a string")),
        None => {}
    }
    if let Some(p) = count(map, "precision", "output")? {
        if !(1..=17).contains(&p) {
            return Err(CliError::config("output.precision", format!("must be in 1..=17, got {p}")));
        }
        out.precision = p;
    }
    Ok(out)
}

fn object<'a>(v: &'a Value, path: &str) -> Result<&'a Map<String, Value>, CliError> {
    v.as_object().ok_or_else(|| CliError::config(path, "expected an object"))
}

fn join(prefix: &str, key: &str) -> String {
    if prefix.is_empty() {
        key.to_string()
    } else {
        format!("{prefix}.{key}")
    }
}

fn reject_unknown(map: &Map<String, Value>, allowed: &[&str], prefix: &str) -> Result<(), CliError> {
    match map.keys().find(|k| !allowed.contains(&k.as_str())) {
        Some(k) => Err(CliError::config(join(prefix, k), "unknown key")),
        None => Ok(()),
    }
}

fn number(map: &Map<String, Value>, key: &str, prefix: &str) -> Result<Option<f64>, CliError> {
    match map.get(key) {
        None => Ok(None),
        Some(v) => v
            .as_f64()
            .filter(|x| x.is_finite())
            .map(Some)
            .ok_or_else(|| CliError::config(join(prefix, key), "expected a finite number")),
    }
}

fn count(map: &Map<String, Value>, key: &str, prefix: &str) -> Result<Option<usize>, CliError> {
    match map.get(key) {
        None => Ok(None),
        Some(v) => v
            .as_u64()
            .map(|n| Some(n as usize))
            .ok_or_else(|| CliError::config(join(prefix, key), "expected a non-negative integer")),
    }
}
