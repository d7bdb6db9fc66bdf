use std::sync::Arc;

use crate::error::{Result, WrError};
use crate::grid::{InterfaceTrace, Side, SpaceGrid1D, TimeGrid, TraceKind};

/// Nodal values of one subdomain solve over its space × time grid.
///
/// Values are stored time-major, then y-row, then x-node. In 1D there is a single
/// row. On a 2D strip rows `0` and `ny - 1` are the Dirichlet edges `y = 0, π`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceTimeField {
    space: SpaceGrid1D,
    node_offset: usize,
    ny: usize,
    dy: f64,
    time: Arc<TimeGrid>,
    values: Vec<f64>,
    pub(crate) left_kind: TraceKind,
    pub(crate) right_kind: TraceKind,
    pub(crate) initial_rate: Option<Vec<f64>>,
}

impl SpaceTimeField {
    pub(crate) fn new(
        space: SpaceGrid1D,
        ny: usize,
        dy: f64,
        time: Arc<TimeGrid>,
        values: Vec<f64>,
        left_kind: TraceKind,
        right_kind: TraceKind,
    ) -> Self {
        debug_assert_eq!(values.len(), time.len() * ny * space.node_count());
        Self {
            space,
            node_offset: 0,
            ny,
            dy,
            time,
            values,
            left_kind,
            right_kind,
            initial_rate: None,
        }
    }

    /// Tags the field with the global index of its first node.
    pub fn with_offset(mut self, offset: usize) -> Self {
        self.node_offset = offset;
        self
    }

    pub fn space(&self) -> &SpaceGrid1D {
        &self.space
    }

    pub fn time(&self) -> &Arc<TimeGrid> {
        &self.time
    }

    pub fn nx(&self) -> usize {
        self.space.node_count()
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn dy(&self) -> f64 {
        self.dy
    }

    pub fn node_offset(&self) -> usize {
        self.node_offset
    }

    pub fn kind(&self, side: Side) -> TraceKind {
        match side {
            Side::Left => self.left_kind,
            Side::Right => self.right_kind,
        }
    }

    /// Number of rows carried by interface traces (interior y-rows in 2D).
    pub fn trace_rows(&self) -> usize {
        if self.ny == 1 {
            1
        } else {
            self.ny - 2
        }
    }

    pub(crate) fn trace_row_index(&self, r: usize) -> usize {
        if self.ny == 1 {
            0
        } else {
            r + 1
        }
    }

    pub fn value(&self, n: usize, ix: usize, iy: usize) -> f64 {
        self.values[(n * self.ny + iy) * self.nx() + ix]
    }

    /// All values at time node `n`, row-major in (y, x).
    pub fn level(&self, n: usize) -> &[f64] {
        let stride = self.ny * self.nx();
        &self.values[n * stride..(n + 1) * stride]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Local x-index of global node `global`, if the field covers it.
    pub fn local_index(&self, global: usize) -> Option<usize> {
        global
            .checked_sub(self.node_offset)
            .filter(|&j| j < self.nx())
    }

    pub fn boundary_index(&self, side: Side) -> usize {
        match side {
            Side::Left => 0,
            Side::Right => self.nx() - 1,
        }
    }

    /// Dirichlet trace of the values in x-column `ix` (local index).
    pub fn column_trace(&self, ix: usize) -> InterfaceTrace {
        let rows = self.trace_rows();
        let mut samples = Vec::with_capacity(self.time.len() * rows);
        for n in 0..self.time.len() {
            for r in 0..rows {
                samples.push(self.value(n, ix, self.trace_row_index(r)));
            }
        }
        InterfaceTrace::new(TraceKind::Dirichlet, self.time.clone(), rows, samples)
            .expect("column trace layout")
    }

    /// Dirichlet trace at global node `global`.
    pub fn trace_at_node(&self, global: usize) -> Result<InterfaceTrace> {
        let ix = self.local_index(global).ok_or_else(|| {
            WrError::IncompatibleGrids(format!("node {global} outside field"))
        })?;
        Ok(self.column_trace(ix))
    }

    pub fn boundary_trace(&self, side: Side) -> InterfaceTrace {
        self.column_trace(self.boundary_index(side))
    }

    /// The boundary column on `side` and its inner neighbour, interpolated in time
    /// onto `grid`. Flux formulas applied to it use the target grid's stencils.
    pub(crate) fn edge_on_grid(&self, side: Side, grid: &Arc<TimeGrid>) -> Result<SpaceTimeField> {
        let plan = crate::projection::build_plan(&self.time, grid)?;
        let nx = self.nx();
        let first = match side {
            Side::Left => 0,
            Side::Right => nx - 2,
        };
        let cols = [first, first + 1];
        let mut values = Vec::with_capacity(grid.len() * self.ny * 2);
        for &(lo, hi, wl, wh) in plan.entries() {
            for iy in 0..self.ny {
                for ix in cols {
                    let a = self.value(lo, ix, iy);
                    values.push(if wh == 0.0 { a } else { wl * a + wh * self.value(hi, ix, iy) });
                }
            }
        }
        let mut out = SpaceTimeField::new(
            self.space.subgrid(first, first + 1),
            self.ny,
            self.dy,
            grid.clone(),
            values,
            self.left_kind,
            self.right_kind,
        );
        out.node_offset = self.node_offset + first;
        out.initial_rate = self.initial_rate.as_ref().map(|r| {
            (0..self.ny)
                .flat_map(|iy| cols.map(|ix| r[iy * nx + ix]))
                .collect()
        });
        Ok(out)
    }

    /// Maximum absolute nodal difference to a field on the same grids.
    pub fn max_abs_diff(&self, other: &SpaceTimeField) -> Result<f64> {
        if self.nx() != other.nx() || self.ny != other.ny || *self.time != *other.time {
            return Err(WrError::IncompatibleGrids("fields differ in shape".into()));
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }

    /// Joins subdomain fields that share one time grid into a field over the union
    /// of their node ranges. Later fields overwrite shared interface nodes.
    pub fn glue(parts: &[SpaceTimeField]) -> Result<SpaceTimeField> {
        let first = parts
            .first()
            .ok_or_else(|| WrError::IncompatibleGrids("nothing to glue".into()))?;
        let dx = first.space.dx();
        let lo = parts.iter().map(|p| p.node_offset).min().unwrap();
        let hi = parts
            .iter()
            .map(|p| p.node_offset + p.nx() - 1)
            .max()
            .unwrap();
        for p in parts {
            if *p.time != *first.time || p.ny != first.ny {
                return Err(WrError::IncompatibleGrids(
                    "glued fields need a common time grid".into(),
                ));
            }
            if ((p.space.dx() - dx) / dx).abs() > 1e-12 {
                return Err(WrError::IncompatibleGrids("glued fields differ in dx".into()));
            }
        }
        let start = first.space.start() - (first.node_offset - lo) as f64 * dx;
        let cells = hi - lo;
        let end = start + cells as f64 * dx;
        let space = SpaceGrid1D::with_cells(start, end, cells);
        let nx = cells + 1;
        let ny = first.ny;
        let mut values = vec![0.0; first.time.len() * ny * nx];
        for p in parts {
            for n in 0..first.time.len() {
                for iy in 0..ny {
                    for ix in 0..p.nx() {
                        let g = p.node_offset + ix - lo;
                        values[(n * ny + iy) * nx + g] = p.value(n, ix, iy);
                    }
                }
            }
        }
        let mut out = SpaceTimeField::new(
            space,
            ny,
            first.dy,
            first.time.clone(),
            values,
            first.left_kind,
            parts.last().unwrap().right_kind,
        );
        out.node_offset = lo;
        Ok(out)
    }
}
