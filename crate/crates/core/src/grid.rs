//! Spatial partitions, time grids and interface traces.

use std::sync::Arc;

use crate::error::{Result, WrError};

/// Non-overlapping split of an interval into subdomains `(x_{i-1}, x_i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Partition1D {
    boundaries: Vec<f64>,
}

impl Partition1D {
    pub fn new(boundaries: &[f64]) -> Result<Self> {
        if boundaries.len() < 3 {
            return Err(WrError::TooFewSubdomains(boundaries.len().saturating_sub(1)));
        }
        if boundaries.iter().any(|b| !b.is_finite())
            || boundaries.windows(2).any(|w| w[1] <= w[0])
        {
            return Err(WrError::NonIncreasingBoundaries);
        }
        Ok(Self {
            boundaries: boundaries.to_vec(),
        })
    }

    /// `n` equal subdomains of `(a, b)`.
    pub fn uniform(a: f64, b: f64, n: usize) -> Result<Self> {
        let h = (b - a) / n as f64;
        let mut bounds: Vec<f64> = (0..=n).map(|i| a + i as f64 * h).collect();
        bounds[n] = b;
        Self::new(&bounds)
    }

    pub fn boundaries(&self) -> &[f64] {
        &self.boundaries
    }

    pub fn count(&self) -> usize {
        self.boundaries.len() - 1
    }

    pub fn interface_count(&self) -> usize {
        self.count() - 1
    }

    /// Interior interface positions `x_1 .. x_{N-1}`.
    pub fn interfaces(&self) -> &[f64] {
        &self.boundaries[1..self.boundaries.len() - 1]
    }

    pub fn widths(&self) -> Vec<f64> {
        self.boundaries.windows(2).map(|w| w[1] - w[0]).collect()
    }

    pub fn h_min(&self) -> f64 {
        self.widths().into_iter().fold(f64::INFINITY, f64::min)
    }

    pub fn h_max(&self) -> f64 {
        self.widths().into_iter().fold(0.0, f64::max)
    }

    /// 1-based index of the middle subdomain for an odd count.
    pub fn middle_index(&self) -> Option<usize> {
        let n = self.count();
        (n % 2 == 1).then_some(n.div_ceil(2))
    }

    pub fn start(&self) -> f64 {
        self.boundaries[0]
    }

    pub fn end(&self) -> f64 {
        self.boundaries[self.boundaries.len() - 1]
    }

    /// True when all widths agree to `rel_tol` relative to the mean width.
    pub fn is_equal_width(&self, rel_tol: f64) -> bool {
        let w = self.widths();
        let mean = (self.end() - self.start()) / w.len() as f64;
        w.iter().all(|h| (h - mean).abs() <= rel_tol * mean)
    }
}

/// Increasing list of time nodes `0 = t_0 < ... < t_M = T`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeGrid {
    times: Vec<f64>,
    dt: Option<f64>,
}

impl TimeGrid {
    /// Uniform grid; `t_end / dt` must be integral to within 1e-9.
    pub fn uniform(t_end: f64, dt: f64) -> Result<Self> {
        if !(t_end > 0.0 && dt > 0.0 && t_end.is_finite() && dt.is_finite()) {
            return Err(WrError::InvalidTimeGrid(format!(
                "T = {t_end} and dt = {dt} must be positive"
            )));
        }
        let ratio = t_end / dt;
        let steps = ratio.round();
        if steps < 1.0 || (ratio - steps).abs() > 1e-9 {
            return Err(WrError::NonDivisibleWindow { t_end, dt });
        }
        Ok(Self::with_steps(t_end, steps as usize))
    }

    /// Uniform grid with `steps` equal steps.
    pub fn with_steps(t_end: f64, steps: usize) -> Self {
        assert!(steps > 0 && t_end > 0.0);
        let dt = t_end / steps as f64;
        let mut times: Vec<f64> = (0..=steps).map(|i| i as f64 * dt).collect();
        times[steps] = t_end;
        Self {
            times,
            dt: Some(dt),
        }
    }

    /// Steps of `dt` and a shorter closing step when `dt` does not divide `t_end`.
    pub fn truncated(t_end: f64, dt: f64) -> Result<Self> {
        match Self::uniform(t_end, dt) {
            Err(WrError::NonDivisibleWindow { .. }) => {}
            other => return other,
        }
        let full = (t_end / dt).floor() as usize;
        let mut times: Vec<f64> = (0..=full).map(|i| i as f64 * dt).collect();
        // drop a node that would leave a sliver step
        if t_end - times[full] < 1e-9 * t_end {
            times.pop();
        }
        times.push(t_end);
        Self::from_times(times)
    }

    pub fn from_times(times: Vec<f64>) -> Result<Self> {
        if times.len() < 2 {
            return Err(WrError::InvalidTimeGrid("need at least two nodes".into()));
        }
        if times[0] != 0.0 {
            return Err(WrError::InvalidTimeGrid("first node must be 0".into()));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) || times.iter().any(|t| !t.is_finite()) {
            return Err(WrError::InvalidTimeGrid("nodes must be strictly increasing".into()));
        }
        let t_end = times[times.len() - 1];
        let steps = times.len() - 1;
        let dt0 = t_end / steps as f64;
        let uniform = times
            .iter()
            .enumerate()
            .all(|(i, t)| (t - i as f64 * dt0).abs() <= 1e-12 * t_end);
        Ok(Self {
            times,
            dt: uniform.then_some(dt0),
        })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn steps(&self) -> usize {
        self.times.len() - 1
    }

    pub fn t_end(&self) -> f64 {
        self.times[self.times.len() - 1]
    }

    pub fn is_uniform(&self) -> bool {
        self.dt.is_some()
    }

    pub fn dt(&self) -> Option<f64> {
        self.dt
    }

    /// Length of step `n -> n + 1`.
    pub fn step(&self, n: usize) -> f64 {
        match self.dt {
            Some(dt) => dt,
            None => self.times[n + 1] - self.times[n],
        }
    }

    pub fn max_step(&self) -> f64 {
        match self.dt {
            Some(dt) => dt,
            None => (0..self.steps()).map(|n| self.step(n)).fold(0.0, f64::max),
        }
    }

    pub fn min_step(&self) -> f64 {
        match self.dt {
            Some(dt) => dt,
            None => (0..self.steps())
                .map(|n| self.step(n))
                .fold(f64::INFINITY, f64::min),
        }
    }
}

/// Equispaced nodes on `[start, end]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceGrid1D {
    start: f64,
    end: f64,
    cells: usize,
    dx: f64,
}

impl SpaceGrid1D {
    pub fn new(start: f64, end: f64, dx: f64) -> Result<Self> {
        if !(end > start && dx > 0.0) {
            return Err(WrError::InvalidSpaceGrid(format!(
                "interval ({start}, {end}) with dx = {dx}"
            )));
        }
        let ratio = (end - start) / dx;
        let cells = ratio.round();
        if cells < 1.0 || (ratio - cells).abs() > 1e-9 * ratio.max(1.0) {
            return Err(WrError::InvalidSpaceGrid(format!(
                "dx = {dx} does not divide ({start}, {end})"
            )));
        }
        Ok(Self::with_cells(start, end, cells as usize))
    }

    pub fn with_cells(start: f64, end: f64, cells: usize) -> Self {
        assert!(cells > 0 && end > start);
        Self {
            start,
            end,
            cells,
            dx: (end - start) / cells as f64,
        }
    }

    /// Nodes `lo..=hi` of this grid, keeping the spacing bit-identical.
    pub fn subgrid(&self, lo: usize, hi: usize) -> Self {
        assert!(lo < hi && hi <= self.cells);
        Self {
            start: self.node(lo),
            end: self.node(hi),
            cells: hi - lo,
            dx: self.dx,
        }
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn cells(&self) -> usize {
        self.cells
    }

    pub fn node_count(&self) -> usize {
        self.cells + 1
    }

    pub fn start(&self) -> f64 {
        self.start
    }

    pub fn end(&self) -> f64 {
        self.end
    }

    pub fn node(&self, j: usize) -> f64 {
        if j == self.cells {
            self.end
        } else {
            self.start + j as f64 * self.dx
        }
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..=self.cells).map(|j| self.node(j)).collect()
    }

    /// Index of the node at `x`; fails unless `x` lies within 1e-12·dx of a node.
    pub fn snap(&self, x: f64) -> Result<usize> {
        let j = ((x - self.start) / self.dx).round();
        if j < 0.0 || j > self.cells as f64 {
            return Err(WrError::InterfaceOffGrid { x });
        }
        let j = j as usize;
        if (self.node(j) - x).abs() > 1e-12 * self.dx {
            return Err(WrError::InterfaceOffGrid { x });
        }
        Ok(j)
    }

    /// Node indices of every partition boundary, including the two ends.
    pub fn partition_nodes(&self, partition: &Partition1D) -> Result<Vec<usize>> {
        let nodes: Vec<usize> = partition
            .boundaries()
            .iter()
            .map(|&x| self.snap(x))
            .collect::<Result<_>>()?;
        if nodes[0] != 0 || nodes[nodes.len() - 1] != self.cells {
            return Err(WrError::IncompatibleGrids(
                "partition does not span the space grid".into(),
            ));
        }
        Ok(nodes)
    }
}

/// `c·dt/dx` in 1D, `c·dt·sqrt(1/dx² + 1/dy²)` in 2D.
pub fn cfl_number(c: f64, dx: f64, dt: f64, dy: Option<f64>) -> f64 {
    match dy {
        None => c * dt / dx,
        Some(dy) => c * dt * (1.0 / (dx * dx) + 1.0 / (dy * dy)).sqrt(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Right,
}

/// What an interface trace prescribes.
///
/// Neumann samples are `∂u/∂x` in the global x orientation. Robin samples are
/// the value of `∂u/∂n + p·u` with the outward normal of the receiving subdomain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TraceKind {
    Dirichlet,
    Neumann,
    Robin { p: f64 },
}

/// Time history on one interface: one sample per (time node, row).
///
/// `rows` is 1 in 1D and the number of interior y-nodes on a 2D strip.
#[derive(Debug, Clone, PartialEq)]
pub struct InterfaceTrace {
    pub kind: TraceKind,
    grid: Arc<TimeGrid>,
    rows: usize,
    samples: Vec<f64>,
}

impl InterfaceTrace {
    pub fn new(kind: TraceKind, grid: Arc<TimeGrid>, rows: usize, samples: Vec<f64>) -> Result<Self> {
        if rows == 0 || samples.len() != grid.len() * rows {
            return Err(WrError::IncompatibleGrids(format!(
                "{} samples for {} time nodes x {} rows",
                samples.len(),
                grid.len(),
                rows
            )));
        }
        Ok(Self {
            kind,
            grid,
            rows,
            samples,
        })
    }

    pub fn zeros(kind: TraceKind, grid: Arc<TimeGrid>, rows: usize) -> Self {
        let samples = vec![0.0; grid.len() * rows];
        Self {
            kind,
            grid,
            rows,
            samples,
        }
    }

    /// Samples `f(t, row)` at every node.
    pub fn from_fn(
        kind: TraceKind,
        grid: Arc<TimeGrid>,
        rows: usize,
        f: impl Fn(f64, usize) -> f64,
    ) -> Self {
        let samples = grid
            .times()
            .iter()
            .flat_map(|&t| (0..rows).map(move |r| (t, r)))
            .map(|(t, r)| f(t, r))
            .collect();
        Self {
            kind,
            grid,
            rows,
            samples,
        }
    }

    pub fn grid(&self) -> &Arc<TimeGrid> {
        &self.grid
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn samples_mut(&mut self) -> &mut [f64] {
        &mut self.samples
    }

    /// Samples at time node `n`, one per row.
    pub fn at(&self, n: usize) -> &[f64] {
        &self.samples[n * self.rows..(n + 1) * self.rows]
    }

    pub fn value(&self, n: usize, row: usize) -> f64 {
        self.samples[n * self.rows + row]
    }

    pub fn with_kind(mut self, kind: TraceKind) -> Self {
        self.kind = kind;
        self
    }

    /// Checks that `other` lives on the same time grid and row layout.
    pub fn check_compatible(&self, other: &InterfaceTrace) -> Result<()> {
        if self.rows != other.rows || *self.grid != *other.grid {
            return Err(WrError::IncompatibleGrids(
                "traces live on different time grids".into(),
            ));
        }
        Ok(())
    }

    /// `max |self - other|` over time nodes `1..=M` (the initial node is excluded).
    pub fn max_abs_diff(&self, other: &InterfaceTrace) -> Result<f64> {
        self.check_compatible(other)?;
        Ok(self.samples[self.rows..]
            .iter()
            .zip(&other.samples[other.rows..])
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }

    /// `max |self|` over time nodes `1..=M`.
    pub fn max_abs(&self) -> f64 {
        self.samples[self.rows..]
            .iter()
            .map(|a| a.abs())
            .fold(0.0, f64::max)
    }
}
