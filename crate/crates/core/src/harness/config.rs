use std::collections::HashSet;
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::PathBuf;

use super::data::{DataId, GuessPreset, GuessReading};
use super::HarnessError;
use crate::bounds::BoundKind;
use crate::grid::{cfl_number, Partition1D, SpaceGrid1D};
use crate::methods::{Arrangement, Method, Metric, WrConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    Heat1d,
    Wave1d,
    Wave2d,
}

impl ModelKind {
    pub fn id(self) -> &'static str {
        match self {
            ModelKind::Heat1d => "heat1d",
            ModelKind::Wave1d => "wave1d",
            ModelKind::Wave2d => "wave2d",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PartitionSpec {
    /// Boundaries including both ends; each must be a grid node.
    Boundaries(Vec<f64>),
    /// `n` subdomains of equal width, rounded to grid nodes.
    Equal(usize),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundChoice {
    /// Overlay a heat estimate whenever one applies.
    Auto,
    Off,
    Kind(BoundKind),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DataSpec {
    pub initial: DataId,
    pub initial_rate: DataId,
    pub left: DataId,
    pub right: DataId,
    pub bottom: DataId,
    pub top: DataId,
    pub source: DataId,
}

impl DataSpec {
    pub fn all_zero(&self) -> bool {
        [
            self.initial,
            self.initial_rate,
            self.left,
            self.right,
            self.bottom,
            self.top,
            self.source,
        ]
        .iter()
        .all(|d| d.is_zero())
    }
}

impl Default for DataSpec {
    fn default() -> Self {
        Self {
            initial: DataId::Zero,
            initial_rate: DataId::Zero,
            left: DataId::Zero,
            right: DataId::Zero,
            bottom: DataId::Zero,
            top: DataId::Zero,
            source: DataId::Zero,
        }
    }
}

/// A fully resolved experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub name: String,
    pub model: ModelKind,
    pub interval: (f64, f64),
    pub partition: PartitionSpec,
    /// Height of the 2D rectangle `(0, y_end)`.
    pub y_end: f64,
    pub y_cells: usize,
    pub nu: f64,
    /// One speed, or one per subdomain.
    pub speeds: Vec<f64>,
    pub dx: f64,
    /// One step, or one per subdomain.
    pub dt: Vec<f64>,
    pub t_end: f64,
    pub data: DataSpec,
    pub config: WrConfig,
    pub guess: GuessPreset,
    pub guess_reading: GuessReading,
    pub bound: BoundChoice,
    pub out: Option<PathBuf>,
    /// Free-form lines echoed into the manifest.
    pub notes: Vec<String>,
}

const KEYS: &[&str] = &[
    "name", "model", "interval", "partition", "subdomains", "y_end", "y_cells", "dy", "nu", "c",
    "dx", "dt", "T", "initial", "initial_rate", "left", "right", "bottom", "top", "source",
    "method", "robin_p", "theta", "arrangement", "max_iters", "tol", "overlap_cells", "seed",
    "metric", "parallel", "guess", "guess_reading", "bound", "out", "note",
];

/// Parses `key = value` lines. `#` starts a comment; `note` may repeat.
pub fn load_config(text: &str) -> Result<ExperimentSpec, HarnessError> {
    let mut b = Builder::default();
    let mut seen = HashSet::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content.split_once('=').ok_or_else(|| HarnessError::Parse {
            line,
            msg: format!("expected `key = value`, got `{content}`"),
        })?;
        let (key, value) = (key.trim(), value.trim());
        if !KEYS.contains(&key) {
            return Err(HarnessError::UnknownKey { line, key: key.to_string() });
        }
        if key != "note" && !seen.insert(key.to_string()) {
            return Err(HarnessError::Parse { line, msg: format!("duplicate key `{key}`") });
        }
        b.set(key, value).map_err(|msg| HarnessError::Parse { line, msg })?;
    }
    let spec = b.finish()?;
    spec.validate()?;
    Ok(spec)
}

#[derive(Default)]
struct Builder {
    name: Option<String>,
    model: Option<ModelKind>,
    interval: Option<(f64, f64)>,
    partition: Option<Vec<f64>>,
    subdomains: Option<usize>,
    y_end: Option<f64>,
    y_cells: Option<usize>,
    dy: Option<f64>,
    nu: Option<f64>,
    c: Option<Vec<f64>>,
    dx: Option<f64>,
    dt: Option<Vec<f64>>,
    t_end: Option<f64>,
    data: DataSpec,
    method: Option<String>,
    robin_p: Option<f64>,
    theta: Option<f64>,
    arrangement: Option<Arrangement>,
    max_iters: Option<usize>,
    tol: Option<f64>,
    overlap_cells: Option<usize>,
    seed: Option<u64>,
    metric: Option<Metric>,
    parallel: Option<bool>,
    guess: Option<GuessPreset>,
    guess_reading: Option<GuessReading>,
    bound: Option<BoundChoice>,
    out: Option<PathBuf>,
    notes: Vec<String>,
}

fn number(s: &str) -> Result<f64, String> {
    let v = match s {
        "pi" => PI,
        _ => s.parse::<f64>().map_err(|_| format!("`{s}` is not a number"))?,
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("`{s}` is not finite"))
    }
}

fn numbers(s: &str) -> Result<Vec<f64>, String> {
    let v: Vec<f64> = s
        .split(|c: char| c.is_whitespace() || c == ',')
        .filter(|t| !t.is_empty())
        .map(number)
        .collect::<Result<_, _>>()?;
    if v.is_empty() {
        return Err("expected at least one number".into());
    }
    Ok(v)
}

fn integer<T: std::str::FromStr>(s: &str) -> Result<T, String> {
    s.parse().map_err(|_| format!("`{s}` is not a nonnegative integer"))
}

fn data_id(s: &str) -> Result<DataId, String> {
    DataId::parse(s).ok_or_else(|| format!("unknown data preset `{s}`"))
}

impl Builder {
    fn set(&mut self, key: &str, v: &str) -> Result<(), String> {
        match key {
            "name" => self.name = Some(v.to_string()),
            "model" => {
                self.model = Some(match v {
                    "heat1d" => ModelKind::Heat1d,
                    "wave1d" => ModelKind::Wave1d,
                    "wave2d" => ModelKind::Wave2d,
                    _ => return Err(format!("unknown model `{v}`")),
                })
            }
            "interval" => match numbers(v)?.as_slice() {
                [a, b] => self.interval = Some((*a, *b)),
                _ => return Err("interval needs two numbers".into()),
            },
            "partition" => self.partition = Some(numbers(v)?),
            "subdomains" => self.subdomains = Some(integer(v)?),
            "y_end" => self.y_end = Some(number(v)?),
            "y_cells" => self.y_cells = Some(integer(v)?),
            "dy" => self.dy = Some(number(v)?),
            "nu" => self.nu = Some(number(v)?),
            "c" => self.c = Some(numbers(v)?),
            "dx" => self.dx = Some(number(v)?),
            "dt" => self.dt = Some(numbers(v)?),
            "T" => self.t_end = Some(number(v)?),
            "initial" => self.data.initial = data_id(v)?,
            "initial_rate" => self.data.initial_rate = data_id(v)?,
            "left" => self.data.left = data_id(v)?,
            "right" => self.data.right = data_id(v)?,
            "bottom" => self.data.bottom = data_id(v)?,
            "top" => self.data.top = data_id(v)?,
            "source" => self.data.source = data_id(v)?,
            "method" => self.method = Some(v.to_string()),
            "robin_p" => self.robin_p = Some(number(v)?),
            "theta" => self.theta = Some(number(v)?),
            "arrangement" => {
                self.arrangement = Some(match v {
                    "A1" | "a1" => Arrangement::A1,
                    "A2" | "a2" => Arrangement::A2,
                    "A3" | "a3" => Arrangement::A3,
                    _ => return Err(format!("unknown arrangement `{v}`")),
                })
            }
            "max_iters" => self.max_iters = Some(integer(v)?),
            "tol" => self.tol = Some(number(v)?),
            "overlap_cells" => self.overlap_cells = Some(integer(v)?),
            "seed" => self.seed = Some(integer(v)?),
            "metric" => {
                self.metric = Some(match v {
                    "error" => Metric::Error,
                    "update" => Metric::Update,
                    _ => return Err(format!("unknown metric `{v}`")),
                })
            }
            "parallel" => {
                self.parallel = Some(match v {
                    "true" => true,
                    "false" => false,
                    _ => return Err(format!("`{v}` is not a boolean")),
                })
            }
            "guess" => {
                // `random(SEED)` is shorthand for `guess = random` plus `seed = SEED`
                if let Some(inner) = v.strip_prefix("random(").and_then(|r| r.strip_suffix(')')) {
                    if self.seed.is_some() {
                        return Err("seed given twice".into());
                    }
                    self.seed = Some(integer(inner.trim())?);
                    self.guess = Some(GuessPreset::Random);
                } else {
                    self.guess =
                        Some(GuessPreset::parse(v).ok_or_else(|| format!("unknown guess preset `{v}`"))?);
                }
            }
            "guess_reading" => {
                self.guess_reading = Some(match v {
                    "dirichlet" => GuessReading::Dirichlet,
                    "neumann" => GuessReading::Neumann,
                    _ => return Err(format!("unknown guess reading `{v}`")),
                })
            }
            "bound" => {
                self.bound = Some(match v {
                    "auto" => BoundChoice::Auto,
                    "none" => BoundChoice::Off,
                    "heat-unequal" => BoundChoice::Kind(BoundKind::HeatUnequal),
                    "heat-even" => BoundChoice::Kind(BoundKind::HeatEven),
                    "heat-equal" => BoundChoice::Kind(BoundKind::HeatEqual),
                    _ => return Err(format!("unknown bound `{v}`")),
                })
            }
            "out" => self.out = Some(PathBuf::from(v)),
            "note" => self.notes.push(v.to_string()),
            _ => unreachable!("checked against KEYS"),
        }
        Ok(())
    }

    fn finish(self) -> Result<ExperimentSpec, HarnessError> {
        let missing = |k: &str| HarnessError::Validation(format!("missing required key `{k}`"));
        let model = self.model.ok_or_else(|| missing("model"))?;
        let interval = self.interval.ok_or_else(|| missing("interval"))?;
        let partition = match (self.partition, self.subdomains) {
            (Some(b), None) => PartitionSpec::Boundaries(b),
            (None, Some(n)) => PartitionSpec::Equal(n),
            (None, None) => return Err(missing("partition")),
            (Some(_), Some(_)) => {
                return Err(HarnessError::Validation(
                    "give either `partition` or `subdomains`, not both".into(),
                ))
            }
        };
        let y_end = self.y_end.unwrap_or(PI);
        let y_cells = match (self.y_cells, self.dy) {
            (Some(n), None) => n,
            (None, Some(dy)) if dy > 0.0 => (y_end / dy).round().max(1.0) as usize,
            (None, Some(dy)) => return Err(HarnessError::Validation(format!("dy = {dy} must be positive"))),
            (None, None) => 20,
            (Some(_), Some(_)) => {
                return Err(HarnessError::Validation("give either `y_cells` or `dy`, not both".into()))
            }
        };
        let mut notes = self.notes;
        if let Some(dy) = self.dy {
            let used = y_end / y_cells as f64;
            if (used - dy).abs() > 1e-12 * dy {
                notes.push(format!("dy = {dy:?} snapped to {used:?} ({y_cells} cells)"));
            }
        }
        let method = match self.method.as_deref().unwrap_or("dnwr") {
            "dnwr" => Method::Dnwr,
            "nnwr" => Method::Nnwr,
            "swr-classical" => Method::SwrClassical,
            "swr-robin" => Method::SwrRobin { p: self.robin_p.unwrap_or(1.0) },
            other => return Err(HarnessError::Validation(format!("unknown method `{other}`"))),
        };
        if self.robin_p.is_some() && !matches!(method, Method::SwrRobin { .. }) {
            return Err(HarnessError::Validation("robin_p only applies to swr-robin".into()));
        }
        let defaults = WrConfig::default();
        let theta = self
            .theta
            .unwrap_or(if method == Method::Nnwr { 0.25 } else { defaults.theta });
        let config = WrConfig {
            theta,
            max_iters: self.max_iters.unwrap_or(defaults.max_iters),
            tol: self.tol.unwrap_or(defaults.tol),
            arrangement: self.arrangement.unwrap_or(defaults.arrangement),
            method,
            overlap_cells: self.overlap_cells.unwrap_or(defaults.overlap_cells),
            rng_seed: self.seed.unwrap_or(defaults.rng_seed),
            metric: self.metric.unwrap_or(defaults.metric),
            parallel: self.parallel.unwrap_or(defaults.parallel),
            exec_order: defaults.exec_order,
        };
        Ok(ExperimentSpec {
            name: self.name.unwrap_or_else(|| "experiment".into()),
            model,
            interval,
            partition,
            y_end,
            y_cells,
            nu: self.nu.unwrap_or(1.0),
            speeds: self.c.unwrap_or_else(|| vec![1.0]),
            dx: self.dx.ok_or_else(|| missing("dx"))?,
            dt: self.dt.ok_or_else(|| missing("dt"))?,
            t_end: self.t_end.ok_or_else(|| missing("T"))?,
            data: self.data,
            config,
            guess: self.guess.unwrap_or(GuessPreset::T2),
            guess_reading: self.guess_reading.unwrap_or_default(),
            bound: self.bound.unwrap_or(BoundChoice::Auto),
            out: self.out,
            notes,
        })
    }
}

impl ExperimentSpec {
    pub fn space(&self) -> Result<SpaceGrid1D, HarnessError> {
        Ok(SpaceGrid1D::new(self.interval.0, self.interval.1, self.dx)?)
    }

    /// Global node index of every partition boundary.
    pub fn partition_nodes(&self) -> Result<Vec<usize>, HarnessError> {
        let space = self.space()?;
        let cells = space.cells();
        match &self.partition {
            PartitionSpec::Equal(n) => {
                if *n < 2 || 2 * n > cells {
                    return Err(HarnessError::Validation(format!(
                        "{n} equal subdomains do not fit {cells} cells"
                    )));
                }
                Ok((0..=*n)
                    .map(|i| (i as f64 * cells as f64 / *n as f64).round() as usize)
                    .collect())
            }
            PartitionSpec::Boundaries(b) => {
                let ends_ok = (b[0] - self.interval.0).abs() <= 1e-12 * self.dx
                    && (b[b.len() - 1] - self.interval.1).abs() <= 1e-9 * self.dx.max(1.0);
                if !ends_ok {
                    return Err(HarnessError::Validation(
                        "partition must start and end at the interval ends".into(),
                    ));
                }
                let p = Partition1D::new(b)?;
                space
                    .partition_nodes(&p)
                    .map_err(|e| HarnessError::Validation(format!("partition does not snap to the grid: {e}")))
            }
        }
    }

    pub fn subdomain_count(&self) -> usize {
        match &self.partition {
            PartitionSpec::Equal(n) => *n,
            PartitionSpec::Boundaries(b) => b.len().saturating_sub(1),
        }
    }

    /// Speed of subdomain `i`.
    pub fn speed(&self, i: usize) -> f64 {
        if self.speeds.len() == 1 {
            self.speeds[0]
        } else {
            self.speeds[i]
        }
    }

    /// Time step of subdomain `i`.
    pub fn step(&self, i: usize) -> f64 {
        if self.dt.len() == 1 {
            self.dt[0]
        } else {
            self.dt[i]
        }
    }

    pub fn dy(&self) -> f64 {
        self.y_end / self.y_cells as f64
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let invalid = |m: String| Err(HarnessError::Validation(m));
        self.config
            .validate()
            .map_err(|e| HarnessError::Validation(e.to_string()))?;
        if !(self.interval.0 < self.interval.1) {
            return invalid("interval must be increasing".into());
        }
        if !(self.t_end > 0.0) {
            return invalid(format!("T = {} must be positive", self.t_end));
        }
        let n = self.partition_nodes()?.len() - 1;
        if !(self.dt.len() == 1 || self.dt.len() == n) {
            return invalid(format!("dt needs 1 or {n} values, got {}", self.dt.len()));
        }
        if let Some(dt) = self.dt.iter().find(|dt| !(**dt > 0.0 && **dt <= self.t_end)) {
            return invalid(format!("dt = {dt} must lie in (0, T]"));
        }
        if !(self.speeds.len() == 1 || self.speeds.len() == n) {
            return invalid(format!("c needs 1 or {n} values, got {}", self.speeds.len()));
        }
        if self.speeds.iter().any(|c| !(*c > 0.0)) {
            return invalid("speeds must be positive".into());
        }
        match self.model {
            ModelKind::Heat1d => {
                if !(self.nu > 0.0) {
                    return invalid(format!("nu = {} must be positive", self.nu));
                }
            }
            ModelKind::Wave1d | ModelKind::Wave2d => {
                if self.model == ModelKind::Wave2d && self.speeds.len() != 1 {
                    return invalid("wave2d takes a single speed".into());
                }
                if self.model == ModelKind::Wave2d && (self.y_cells < 2 || !(self.y_end > 0.0)) {
                    return invalid("wave2d needs y_end > 0 and at least 2 y cells".into());
                }
                let dy = (self.model == ModelKind::Wave2d).then(|| self.dy());
                for i in 0..n {
                    let cfl = cfl_number(self.speed(i), self.dx, self.step(i), dy);
                    if cfl > 1.0 + 1e-12 {
                        return invalid(format!("CFL number {cfl} exceeds 1 on subdomain {}", i + 1));
                    }
                }
            }
        }
        if self.guess == GuessPreset::TSin && self.model != ModelKind::Wave2d {
            return invalid("guess tsin needs a wave2d model".into());
        }
        if self.guess_reading == GuessReading::Neumann && self.model != ModelKind::Wave2d {
            return invalid("guess_reading = neumann needs a wave2d model".into());
        }
        if let BoundChoice::Kind(_) = self.bound {
            if !self.bound_applies() {
                return invalid("a heat bound needs heat1d, dnwr, A3, theta = 0.5 and the error metric".into());
            }
        }
        Ok(())
    }

    /// Heat estimates hold for DNWR in arrangement A3 with `θ = 1/2`.
    pub fn bound_applies(&self) -> bool {
        self.model == ModelKind::Heat1d
            && self.config.method == Method::Dnwr
            && self.config.arrangement == Arrangement::A3
            && self.config.theta == 0.5
            && self.config.metric == Metric::Error
    }

    /// Resolved spec in config syntax; `load_config` reads it back.
    pub fn to_config_text(&self) -> String {
        let list = |v: &[f64]| v.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(" ");
        let mut s = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        kv("name", self.name.clone());
        kv("model", self.model.id().into());
        kv("interval", list(&[self.interval.0, self.interval.1]));
        match &self.partition {
            PartitionSpec::Boundaries(b) => kv("partition", list(b)),
            PartitionSpec::Equal(n) => kv("subdomains", n.to_string()),
        }
        if self.model == ModelKind::Wave2d {
            kv("y_end", format!("{:?}", self.y_end));
            kv("y_cells", self.y_cells.to_string());
        }
        match self.model {
            ModelKind::Heat1d => kv("nu", format!("{:?}", self.nu)),
            _ => kv("c", list(&self.speeds)),
        }
        kv("dx", format!("{:?}", self.dx));
        kv("dt", list(&self.dt));
        kv("T", format!("{:?}", self.t_end));
        let d = &self.data;
        kv("initial", d.initial.id().into());
        if self.model != ModelKind::Heat1d {
            kv("initial_rate", d.initial_rate.id().into());
        }
        kv("left", d.left.id().into());
        kv("right", d.right.id().into());
        if self.model == ModelKind::Wave2d {
            kv("bottom", d.bottom.id().into());
            kv("top", d.top.id().into());
        }
        kv("source", d.source.id().into());
        let c = &self.config;
        kv("method", c.method.name().into());
        if let Method::SwrRobin { p } = c.method {
            kv("robin_p", format!("{p:?}"));
        }
        kv("theta", format!("{:?}", c.theta));
        kv("arrangement", c.arrangement.name().into());
        kv("max_iters", c.max_iters.to_string());
        kv("tol", format!("{:?}", c.tol));
        kv("overlap_cells", c.overlap_cells.to_string());
        kv("seed", c.rng_seed.to_string());
        kv("metric", match c.metric {
            Metric::Error => "error".into(),
            Metric::Update => "update".into(),
        });
        kv("parallel", c.parallel.to_string());
        kv("guess", self.guess.id().into());
        if self.model == ModelKind::Wave2d {
            kv("guess_reading", self.guess_reading.id().into());
        }
        kv("bound", match self.bound {
            BoundChoice::Auto => "auto".into(),
            BoundChoice::Off => "none".into(),
            BoundChoice::Kind(k) => k.tag().into(),
        });
        if let Some(out) = &self.out {
            kv("out", out.display().to_string());
        }
        for n in &self.notes {
            kv("note", n.clone());
        }
        s
    }
}
