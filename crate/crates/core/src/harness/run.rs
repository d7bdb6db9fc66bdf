use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use super::config::{BoundChoice, ExperimentSpec, ModelKind};
use super::data::{make_guesses, GuessReading};
use super::HarnessError;
use crate::bounds::{wave_steps_heuristic, wave_steps_needed, BoundCurve, BoundKind};
use crate::grid::{InterfaceTrace, Side, TimeGrid, TraceKind};
use crate::methods::{
    dnwr_run, nnwr_run, swr_run, IterationHistory, Layout, Method, Reference, SplitModel, WrConfig,
};
use crate::problem::{HeatProblem, Problem, Speed, Wave2DProblem, WaveProblem};
use crate::projection::to_grid;

/// Everything a run needs besides the relaxation parameters.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub model: SplitModel,
    pub layout: Layout,
    pub reference: Reference,
    pub guesses: Vec<InterfaceTrace>,
    pub widths: Vec<f64>,
    /// Facts derived while building grids, for the manifest.
    pub derived: Vec<String>,
}

pub fn build_problem(spec: &ExperimentSpec) -> Result<Problem, HarnessError> {
    let (a, b) = spec.interval;
    let d = &spec.data;
    let source = (!d.source.is_zero()).then(|| d.source.to_fn());
    Ok(match spec.model {
        ModelKind::Heat1d => Problem::Heat(HeatProblem {
            initial: d.initial.to_fn(),
            left: d.left.to_fn(),
            right: d.right.to_fn(),
            source,
            ..HeatProblem::error_equation(a, b, spec.nu)
        }),
        ModelKind::Wave1d => {
            let speed = if spec.speeds.len() == 1 {
                Speed::Uniform(spec.speeds[0])
            } else {
                let space = spec.space()?;
                let boundaries = spec.partition_nodes()?.iter().map(|&j| space.node(j)).collect();
                Speed::Piecewise { boundaries, speeds: spec.speeds.clone() }
            };
            Problem::Wave(WaveProblem {
                initial_u: d.initial.to_fn(),
                initial_ut: d.initial_rate.to_fn(),
                left: d.left.to_fn(),
                right: d.right.to_fn(),
                source,
                ..WaveProblem::error_equation(a, b, speed)
            })
        }
        ModelKind::Wave2d => Problem::Wave2D(Wave2DProblem {
            initial_u: d.initial.to_fn(),
            initial_ut: d.initial_rate.to_fn(),
            left: d.left.to_fn(),
            right: d.right.to_fn(),
            bottom: d.bottom.to_fn(),
            top: d.top.to_fn(),
            source,
            ..Wave2DProblem::error_equation(a, b, spec.y_end, spec.y_cells, spec.speeds[0])
        }),
    })
}

/// Builds grids, the reference and the initial guesses.
pub fn prepare(spec: &ExperimentSpec) -> Result<Prepared, HarnessError> {
    spec.validate()?;
    let model = SplitModel::new(build_problem(spec)?, spec.dx)?;
    let nodes = spec.partition_nodes()?;
    let widths: Vec<f64> = nodes.windows(2).map(|w| (w[1] - w[0]) as f64 * spec.dx).collect();
    let mut derived = Vec::new();
    let mut grids = Vec::with_capacity(spec.dt.len());
    for &dt in &spec.dt {
        let grid = TimeGrid::truncated(spec.t_end, dt)?;
        if !grid.is_uniform() {
            derived.push(format!(
                "dt = {dt:?} does not divide T = {:?}; closing step {:?}",
                spec.t_end,
                grid.step(grid.steps() - 1)
            ));
        }
        grids.push(Arc::new(grid));
    }
    let layout = Layout::from_nodes(nodes, grids)?;
    let fine = layout.finest_grid().clone();
    let reference = if spec.data.all_zero() {
        derived.push("reference: zero (error equation)".into());
        Reference::Zero
    } else {
        derived.push(format!("reference: monodomain solve with {} steps", fine.steps()));
        Reference::from_field(&model.monodomain(&fine)?, &layout)?
    };
    let dy = spec.dy();
    let mut guesses = make_guesses(
        spec.guess,
        layout.interface_count(),
        &fine,
        model.rows(),
        |r| (r + 1) as f64 * dy,
        spec.config.rng_seed,
    )?;
    if spec.guess_reading == GuessReading::Neumann {
        guesses = neumann_reading(&model, &layout, &guesses)?;
        derived.push("initial guess read as interface fluxes; Dirichlet guess from one priming sweep".into());
    }
    Ok(Prepared { model, layout, reference, guesses, widths, derived })
}

/// Dirichlet guesses from flux guesses: every subdomain is solved with the fluxes on
/// its interface sides, and each interface takes the mean of its two neighbours.
fn neumann_reading(model: &SplitModel, layout: &Layout, fluxes: &[InterfaceTrace]) -> Result<Vec<InterfaceTrace>, HarnessError> {
    let n = layout.count();
    let mut fields = Vec::with_capacity(n);
    for i in 0..n {
        let grid = &layout.grids[i];
        let left = if i == 0 {
            model.boundary(Side::Left, grid)
        } else {
            to_grid(&fluxes[i - 1], grid)?.with_kind(TraceKind::Neumann)
        };
        let right = if i == n - 1 {
            model.boundary(Side::Right, grid)
        } else {
            to_grid(&fluxes[i], grid)?.with_kind(TraceKind::Neumann)
        };
        fields.push(model.solve(layout.nodes[i], layout.nodes[i + 1], grid, &left, &right, false)?);
    }
    (0..n - 1)
        .map(|j| {
            let node = layout.interface_node(j);
            let grid = fluxes[j].grid();
            let a = to_grid(&fields[j].trace_at_node(node)?, grid)?;
            let b = to_grid(&fields[j + 1].trace_at_node(node)?, grid)?;
            let s = a.samples().iter().zip(b.samples()).map(|(x, y)| 0.5 * (x + y)).collect();
            Ok(InterfaceTrace::new(TraceKind::Dirichlet, grid.clone(), a.rows(), s)?)
        })
        .collect()
}

pub fn run_method(prepared: &Prepared, config: &WrConfig) -> Result<IterationHistory, HarnessError> {
    let p = prepared;
    let f = match config.method {
        Method::Dnwr => dnwr_run,
        Method::Nnwr => nnwr_run,
        Method::SwrClassical | Method::SwrRobin { .. } => swr_run,
    };
    Ok(f(&p.model, &p.layout, config, &p.guesses, Some(&p.reference))?)
}

/// Interface errors of one run, iterations `1..=K` plus the initial state.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorReport {
    pub initial: Vec<f64>,
    pub per_interface: Vec<Vec<f64>>,
    pub max: Vec<f64>,
    /// Absolute bound `B(k)·e_0` per row, when a heat estimate applies.
    pub bound: Option<Vec<f64>>,
    pub bound_kind: Option<BoundKind>,
    pub converged_at: Option<usize>,
}

impl ErrorReport {
    fn from_errors(initial: Vec<f64>, per_interface: Vec<Vec<f64>>, converged_at: Option<usize>) -> Self {
        let max = per_interface.iter().map(|e| e.iter().cloned().fold(0.0, f64::max)).collect();
        Self { initial, per_interface, max, bound: None, bound_kind: None, converged_at }
    }

    pub fn from_history(history: &IterationHistory) -> Self {
        Self::from_errors(history.initial_errors.clone(), history.errors.clone(), history.converged_at)
    }

    pub fn initial_max(&self) -> f64 {
        self.initial.iter().cloned().fold(0.0, f64::max)
    }

    pub fn iterations(&self) -> usize {
        self.max.len()
    }

    pub fn iterations_to(&self, tol: f64) -> Option<usize> {
        self.max.iter().position(|e| *e <= tol).map(|i| i + 1)
    }

    pub fn interface_count(&self) -> usize {
        self.initial.len()
    }

    /// Attaches `B(k)·e_0` for every row.
    pub fn with_bound(mut self, curve: &BoundCurve) -> Self {
        let e0 = self.initial_max();
        self.bound = Some((1..=self.iterations()).map(|k| curve.value(k).unwrap_or(f64::NAN) * e0).collect());
        self.bound_kind = Some(curve.kind);
        self
    }

    pub fn csv_header(&self) -> String {
        let mut h = String::from("iteration,err_max");
        for j in 1..=self.interface_count() {
            let _ = write!(h, ",err_if_{j}");
        }
        if self.bound.is_some() {
            h.push_str(",bound");
        }
        h
    }

    pub fn to_csv(&self) -> String {
        let mut s = self.csv_header();
        s.push('\n');
        for (i, row) in self.per_interface.iter().enumerate() {
            let _ = write!(s, "{},{:?}", i + 1, self.max[i]);
            for e in row {
                let _ = write!(s, ",{e:?}");
            }
            if let Some(b) = &self.bound {
                let _ = write!(s, ",{:?}", b[i]);
            }
            s.push('\n');
        }
        s
    }
}

/// Max over time nodes (and rows) of each recorded Dirichlet iterate against `reference`.
pub fn interface_error(history: &IterationHistory, reference: &Reference) -> Result<ErrorReport, HarnessError> {
    let measure = |traces: &[InterfaceTrace]| -> Result<Vec<f64>, HarnessError> {
        traces
            .iter()
            .enumerate()
            .map(|(j, t)| Ok(reference.deviation(j, &[t])?))
            .collect()
    };
    let initial = measure(&history.initial_traces)?;
    let rows = history.dirichlet.iter().map(|g| measure(g)).collect::<Result<_, _>>()?;
    Ok(ErrorReport::from_errors(initial, rows, history.converged_at))
}

/// Estimate that applies to `spec`, if any.
pub fn bound_kind_for(spec: &ExperimentSpec, widths: &[f64]) -> Option<BoundKind> {
    if !spec.bound_applies() {
        return None;
    }
    match spec.bound {
        BoundChoice::Off => None,
        BoundChoice::Kind(k) => Some(k),
        BoundChoice::Auto => {
            let n = widths.len();
            let equal = widths.iter().all(|h| (h - widths[0]).abs() <= 1e-9 * widths[0]);
            Some(match (n % 2, equal) {
                (0, _) => BoundKind::HeatEven,
                (_, true) => BoundKind::HeatEqual,
                _ => BoundKind::HeatUnequal,
            })
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentResult {
    pub spec: ExperimentSpec,
    pub report: ErrorReport,
    pub history: IterationHistory,
    pub csv: String,
    pub manifest: String,
}

/// Runs `spec` and, when `spec.out` is set, writes `<name>.csv` and `<name>.manifest.txt` there.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentResult, HarnessError> {
    let prepared = prepare(spec)?;
    let history = run_method(&prepared, &spec.config)?;
    let mut report = ErrorReport::from_history(&history);
    if let Some(kind) = bound_kind_for(spec, &prepared.widths) {
        let k_max = report.iterations() as u32;
        let curve = BoundCurve::evaluate(kind, &prepared.widths, spec.nu, spec.t_end, k_max)?;
        report = report.with_bound(&curve);
    }
    let csv = report.to_csv();
    let manifest = manifest_text(spec, &prepared, &report)?;
    let result = ExperimentResult { spec: spec.clone(), report, history, csv, manifest };
    if let Some(dir) = &spec.out {
        write_outputs(&result, dir)?;
    }
    Ok(result)
}

fn manifest_text(spec: &ExperimentSpec, prepared: &Prepared, report: &ErrorReport) -> Result<String, HarnessError> {
    let mut s = String::from("# wrkit run manifest\n");
    s.push_str(&spec.to_config_text());
    for d in &prepared.derived {
        let _ = writeln!(s, "# derived: {d}");
    }
    let opt = |v: Option<usize>| v.map_or("none".into(), |k| k.to_string());
    let _ = writeln!(s, "# result: initial_error = {:?}", report.initial_max());
    let _ = writeln!(s, "# result: iterations = {}", report.iterations());
    let _ = writeln!(s, "# result: converged_at = {}", opt(report.converged_at));
    if let Some(last) = report.max.last() {
        let _ = writeln!(s, "# result: final_error = {last:?}");
    }
    let _ = writeln!(
        s,
        "# result: bound = {}",
        report.bound_kind.map_or("none", |k| k.tag())
    );
    if spec.model != ModelKind::Heat1d {
        let strict = spec.model == ModelKind::Wave2d;
        let k = wave_steps_needed(spec.t_end, &prepared.widths, &spec.speeds, strict)?;
        let heuristic = if wave_steps_heuristic(&spec.speeds) { " (heuristic: speeds differ)" } else { "" };
        let _ = writeln!(s, "# result: wave_steps_needed = {k}{heuristic}");
    }
    Ok(s)
}

pub fn write_outputs(result: &ExperimentResult, dir: &Path) -> Result<Vec<PathBuf>, HarnessError> {
    fs::create_dir_all(dir)?;
    let csv = dir.join(format!("{}.csv", result.spec.name));
    let manifest = dir.join(format!("{}.manifest.txt", result.spec.name));
    fs::write(&csv, &result.csv)?;
    fs::write(&manifest, &result.manifest)?;
    Ok(vec![csv, manifest])
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompareRow {
    pub label: String,
    pub method: Method,
    pub theta: f64,
    pub iterations: usize,
    pub iterations_to_tol: Option<usize>,
    pub final_error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompareTable {
    pub tol: f64,
    pub rows: Vec<CompareRow>,
}

impl CompareTable {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("label,method,theta,iterations,iterations_to_tol,final_err_max\n");
        for r in &self.rows {
            let to_tol = r.iterations_to_tol.map_or(String::new(), |k| k.to_string());
            let _ = writeln!(
                s,
                "{},{},{:?},{},{},{:?}",
                r.label,
                r.method.name(),
                r.theta,
                r.iterations,
                to_tol,
                r.final_error
            );
        }
        s
    }

    pub fn row(&self, method: &str) -> Option<&CompareRow> {
        self.rows.iter().find(|r| r.method.name() == method)
    }
}

/// The spec with every method-specific field reset.
fn without_method(spec: &ExperimentSpec) -> ExperimentSpec {
    let mut s = spec.clone();
    let d = WrConfig::default();
    s.name.clear();
    s.out = None;
    s.notes.clear();
    s.bound = BoundChoice::Auto;
    s.config.method = d.method;
    s.config.theta = d.theta;
    s.config.arrangement = d.arrangement;
    s.config.overlap_cells = d.overlap_cells;
    s
}

/// Runs every spec against one shared reference and guess set.
pub fn compare_methods(specs: &[ExperimentSpec]) -> Result<CompareTable, HarnessError> {
    let first = specs
        .first()
        .ok_or_else(|| HarnessError::InconsistentSpecs("no specs given".into()))?;
    let base = without_method(first);
    if let Some(other) = specs.iter().find(|s| without_method(s) != base) {
        return Err(HarnessError::InconsistentSpecs(format!(
            "`{}` differs from `{}` outside the method fields",
            other.name, first.name
        )));
    }
    let prepared = prepare(first)?;
    let mut rows = Vec::with_capacity(specs.len());
    for spec in specs {
        spec.validate()?;
        let h = run_method(&prepared, &spec.config)?;
        rows.push(CompareRow {
            label: spec.name.clone(),
            method: spec.config.method,
            theta: spec.config.theta,
            iterations: h.iterations(),
            iterations_to_tol: h.iterations_to(spec.config.tol),
            final_error: h.error_at(h.iterations()).unwrap_or(f64::NAN),
        });
    }
    Ok(CompareTable { tol: first.config.tol, rows })
}
