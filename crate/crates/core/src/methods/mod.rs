//! Waveform relaxation drivers.

mod dnwr;
mod model;
mod nnwr;
mod schedule;
mod swr;

use std::sync::Arc;

use rayon::prelude::*;

pub use dnwr::dnwr_run;
pub use model::{Layout, SplitModel};
pub use nnwr::nnwr_run;
pub use schedule::{arrangement_schedule, Arrangement, Role, Schedule, Task};
pub use swr::swr_run;

use crate::error::{Result, WrError};
use crate::grid::{InterfaceTrace, Side, TimeGrid, TraceKind};
use crate::kernels::SpaceTimeField;
use crate::projection::to_grid;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Method {
    Dnwr,
    Nnwr,
    SwrClassical,
    SwrRobin { p: f64 },
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::Dnwr => "dnwr",
            Method::Nnwr => "nnwr",
            Method::SwrClassical => "swr-classical",
            Method::SwrRobin { .. } => "swr-robin",
        }
    }
}

/// Order in which solves inside one stage are issued. Results never depend on it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ExecOrder {
    #[default]
    Forward,
    Reverse,
}

/// What the per-iteration error measures and what stopping is based on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Metric {
    /// Distance to a reference; needs one.
    #[default]
    Error,
    /// Relative size of the last interface update.
    Update,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WrConfig {
    pub theta: f64,
    pub max_iters: usize,
    pub tol: f64,
    pub arrangement: Arrangement,
    pub method: Method,
    pub overlap_cells: usize,
    pub rng_seed: u64,
    pub metric: Metric,
    pub parallel: bool,
    pub exec_order: ExecOrder,
}

impl Default for WrConfig {
    fn default() -> Self {
        Self {
            theta: 0.5,
            max_iters: 30,
            tol: 1e-10,
            arrangement: Arrangement::A3,
            method: Method::Dnwr,
            overlap_cells: 2,
            rng_seed: 0,
            metric: Metric::Error,
            parallel: true,
            exec_order: ExecOrder::Forward,
        }
    }
}

impl WrConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.theta > 0.0 && self.theta <= 1.0) {
            return Err(WrError::InvalidParameter(format!(
                "theta = {} outside (0, 1]",
                self.theta
            )));
        }
        if self.max_iters == 0 {
            return Err(WrError::InvalidParameter("max_iters must be positive".into()));
        }
        if !(self.tol > 0.0) {
            return Err(WrError::InvalidParameter("tol must be positive".into()));
        }
        match self.method {
            Method::SwrClassical if self.overlap_cells == 0 => Err(WrError::InvalidParameter(
                "classical Schwarz needs at least one overlap cell".into(),
            )),
            Method::SwrRobin { p } if !(p > 0.0) => {
                Err(WrError::InvalidParameter(format!("Robin parameter p = {p} must be positive")))
            }
            _ => Ok(()),
        }
    }
}

/// Exact interface values to compare iterates against.
#[derive(Debug, Clone, PartialEq)]
pub enum Reference {
    /// Error-equation mode: the iterates are the error.
    Zero,
    /// One trace per interface.
    Traces(Vec<InterfaceTrace>),
}

impl Reference {
    /// Interface traces of a monodomain field.
    pub fn from_field(field: &SpaceTimeField, layout: &Layout) -> Result<Self> {
        (0..layout.interface_count())
            .map(|j| field.trace_at_node(layout.interface_node(j)))
            .collect::<Result<Vec<_>>>()
            .map(Reference::Traces)
    }

    /// Largest deviation of any candidate trace at interface `j`.
    pub fn deviation(&self, j: usize, candidates: &[&InterfaceTrace]) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for c in candidates {
            let e = match self {
                Reference::Zero => c.max_abs(),
                Reference::Traces(refs) => {
                    let r = refs.get(j).ok_or(WrError::NoReference)?;
                    to_grid(c, r.grid())?.with_kind(r.kind).max_abs_diff(r)?
                }
            };
            worst = worst.max(e);
        }
        Ok(worst)
    }
}

/// Per-iteration record of one relaxation run.
///
/// `errors` and the trace lists hold one entry per iteration performed; the state
/// before the first iteration is kept in the `initial_*` fields.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationHistory {
    pub method: Method,
    pub metric: Metric,
    pub initial_traces: Vec<InterfaceTrace>,
    pub initial_errors: Vec<f64>,
    pub dirichlet: Vec<Vec<InterfaceTrace>>,
    pub neumann: Vec<Vec<InterfaceTrace>>,
    pub errors: Vec<Vec<f64>>,
    pub converged_at: Option<usize>,
    /// Subdomain fields of the last iteration.
    pub fields: Vec<SpaceTimeField>,
}

impl IterationHistory {
    fn new(method: Method, metric: Metric, initial_traces: Vec<InterfaceTrace>, initial_errors: Vec<f64>) -> Self {
        Self {
            method,
            metric,
            initial_traces,
            initial_errors,
            dirichlet: Vec::new(),
            neumann: Vec::new(),
            errors: Vec::new(),
            converged_at: None,
            fields: Vec::new(),
        }
    }

    pub fn iterations(&self) -> usize {
        self.errors.len()
    }

    pub fn initial_error(&self) -> f64 {
        self.initial_errors.iter().cloned().fold(0.0, f64::max)
    }

    /// Maximum interface error after iteration `k` (`k = 0` is the initial guess).
    pub fn error_at(&self, k: usize) -> Option<f64> {
        if k == 0 {
            Some(self.initial_error())
        } else {
            self.errors.get(k - 1).map(|e| e.iter().cloned().fold(0.0, f64::max))
        }
    }

    pub fn max_errors(&self) -> Vec<f64> {
        (1..=self.iterations()).filter_map(|k| self.error_at(k)).collect()
    }

    /// First iteration whose error is at most `tol`.
    pub fn iterations_to(&self, tol: f64) -> Option<usize> {
        (1..=self.iterations()).find(|&k| self.error_at(k).is_some_and(|e| e <= tol))
    }

    /// Dirichlet solves with the last interface iterates, glued into one field. At a
    /// fixed point this is the monodomain solution. Needs a common time grid.
    pub fn glued_solution(&self, model: &SplitModel, layout: &Layout) -> Result<SpaceTimeField> {
        let g = self.dirichlet.last().unwrap_or(&self.initial_traces);
        let n = layout.count();
        let parts = (0..n)
            .map(|i| {
                let grid = &layout.grids[i];
                let left = match i {
                    0 => model.boundary(Side::Left, grid),
                    _ => dirichlet_on(&g[i - 1], grid)?,
                };
                let right = match i + 1 == n {
                    true => model.boundary(Side::Right, grid),
                    false => dirichlet_on(&g[i], grid)?,
                };
                model.solve(layout.nodes[i], layout.nodes[i + 1], grid, &left, &right, false)
            })
            .collect::<Result<Vec<_>>>()?;
        SpaceTimeField::glue(&parts)
    }
}

/// `θ·new + (1 − θ)·old` sample by sample.
pub fn relax_update(theta: f64, new: &InterfaceTrace, old: &InterfaceTrace) -> Result<InterfaceTrace> {
    new.check_compatible(old)?;
    if new.kind != old.kind {
        return Err(WrError::IncompatibleGrids("traces of different kinds".into()));
    }
    let samples = new
        .samples()
        .iter()
        .zip(old.samples())
        .map(|(n, o)| if theta == 1.0 { *n } else { theta * n + (1.0 - theta) * o })
        .collect();
    InterfaceTrace::new(old.kind, old.grid().clone(), old.rows(), samples)
}

/// Tracks errors or update sizes and decides when to stop.
struct Monitor<'a> {
    reference: Option<&'a Reference>,
    metric: Metric,
    tol: f64,
}

impl<'a> Monitor<'a> {
    fn new(config: &WrConfig, reference: Option<&'a Reference>) -> Result<Self> {
        if config.metric == Metric::Error && reference.is_none() {
            return Err(WrError::NoReference);
        }
        Ok(Self {
            reference,
            metric: config.metric,
            tol: config.tol,
        })
    }

    /// Per-interface values for the current iterate. `previous` is the iterate before.
    fn measure(
        &self,
        candidates: &[Vec<&InterfaceTrace>],
        current: &[InterfaceTrace],
        previous: Option<&[InterfaceTrace]>,
    ) -> Result<Vec<f64>> {
        match self.metric {
            Metric::Error => {
                let reference = self.reference.ok_or(WrError::NoReference)?;
                candidates
                    .iter()
                    .enumerate()
                    .map(|(j, c)| reference.deviation(j, c))
                    .collect()
            }
            Metric::Update => {
                let Some(prev) = previous else {
                    return Ok(current.iter().map(|c| c.max_abs()).collect());
                };
                let scale = current.iter().map(|c| c.max_abs()).fold(0.0, f64::max).max(1e-300);
                current
                    .iter()
                    .zip(prev)
                    .map(|(c, p)| Ok(c.max_abs_diff(p)? / scale))
                    .collect()
            }
        }
    }

    fn converged(&self, errors: &[f64]) -> bool {
        errors.iter().all(|e| *e <= self.tol)
    }
}

/// Runs `f` for every task of a stage, possibly concurrently, and returns the
/// results in task order.
fn run_stage<T, F>(count: usize, config: &WrConfig, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync,
{
    let mut order: Vec<usize> = (0..count).collect();
    if config.exec_order == ExecOrder::Reverse {
        order.reverse();
    }
    let done: Vec<(usize, Result<T>)> = if config.parallel {
        order.par_iter().map(|&i| (i, f(i))).collect()
    } else {
        order.iter().map(|&i| (i, f(i))).collect()
    };
    let mut slots: Vec<Option<T>> = (0..count).map(|_| None).collect();
    for (i, r) in done {
        slots[i] = Some(r?);
    }
    Ok(slots.into_iter().map(|s| s.expect("every task ran")).collect())
}

fn check_guesses(guesses: &[InterfaceTrace], layout: &Layout, rows: usize) -> Result<()> {
    if guesses.len() != layout.interface_count() {
        return Err(WrError::InvalidParameter(format!(
            "{} initial guesses for {} interfaces",
            guesses.len(),
            layout.interface_count()
        )));
    }
    if let Some(g) = guesses.iter().find(|g| g.rows() != rows) {
        return Err(WrError::IncompatibleGrids(format!(
            "initial guess has {} rows, expected {rows}",
            g.rows()
        )));
    }
    Ok(())
}

fn dirichlet_on(trace: &InterfaceTrace, grid: &Arc<TimeGrid>) -> Result<InterfaceTrace> {
    Ok(to_grid(trace, grid)?.with_kind(TraceKind::Dirichlet))
}
