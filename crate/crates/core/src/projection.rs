//! Piecewise-linear transfer of traces between time grids over the same window.

use std::sync::Arc;

use crate::error::{Result, WrError};
use crate::grid::{InterfaceTrace, TimeGrid};

/// Bracketing source nodes and weights for every target node.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionPlan {
    src: Arc<TimeGrid>,
    dst: Arc<TimeGrid>,
    /// `(lo, hi, w_lo, w_hi)` per target node.
    entries: Vec<(usize, usize, f64, f64)>,
    steps: usize,
}

impl ProjectionPlan {
    pub fn src(&self) -> &Arc<TimeGrid> {
        &self.src
    }

    pub fn dst(&self) -> &Arc<TimeGrid> {
        &self.dst
    }

    pub fn entries(&self) -> &[(usize, usize, f64, f64)] {
        &self.entries
    }

    /// Work done by the merge traversal that built the plan.
    pub fn traversal_steps(&self) -> usize {
        self.steps
    }

    pub fn is_identity(&self) -> bool {
        self.entries
            .iter()
            .enumerate()
            .all(|(n, &(lo, _, w, _))| lo == n && w == 1.0)
            && self.src.len() == self.dst.len()
    }
}

/// Builds the interpolation plan with one merged pass over both node lists.
pub fn build_plan(src: &Arc<TimeGrid>, dst: &Arc<TimeGrid>) -> Result<ProjectionPlan> {
    let (ts, td) = (src.t_end(), dst.t_end());
    if (ts - td).abs() > 1e-12 * ts.max(td).max(1.0) {
        return Err(WrError::WindowMismatch { src: ts, dst: td });
    }
    let s = src.times();
    let last = s.len() - 1;
    let scale = ts.max(1.0);
    let mut entries = Vec::with_capacity(dst.len());
    let mut i = 0;
    let mut steps = 0;
    for &t in dst.times() {
        steps += 1;
        while i + 1 < last && s[i + 1] <= t {
            i += 1;
            steps += 1;
        }
        let (a, b) = (s[i], s[i + 1]);
        let entry = if (t - a).abs() <= 1e-12 * scale {
            (i, i, 1.0, 0.0)
        } else if (t - b).abs() <= 1e-12 * scale {
            (i + 1, i + 1, 1.0, 0.0)
        } else {
            let w = ((t - a) / (b - a)).clamp(0.0, 1.0);
            (i, i + 1, 1.0 - w, w)
        };
        entries.push(entry);
    }
    assert!(steps <= src.steps() + dst.steps() + 1, "projection traversal is not linear");
    Ok(ProjectionPlan {
        src: src.clone(),
        dst: dst.clone(),
        entries,
        steps,
    })
}

/// Interpolates `trace` onto the plan's target grid, row by row.
pub fn project_trace(trace: &InterfaceTrace, plan: &ProjectionPlan) -> Result<InterfaceTrace> {
    if **trace.grid() != *plan.src {
        return Err(WrError::IncompatibleGrids(
            "trace is not on the plan's source grid".into(),
        ));
    }
    let rows = trace.rows();
    let mut out = Vec::with_capacity(plan.dst.len() * rows);
    for &(lo, hi, wl, wh) in &plan.entries {
        let a = trace.at(lo);
        let b = trace.at(hi);
        for r in 0..rows {
            out.push(if wh == 0.0 { a[r] } else { wl * a[r] + wh * b[r] });
        }
    }
    InterfaceTrace::new(trace.kind, plan.dst.clone(), rows, out)
}

/// Returns `trace` on `grid`, interpolating only when the grids differ.
pub fn to_grid(trace: &InterfaceTrace, grid: &Arc<TimeGrid>) -> Result<InterfaceTrace> {
    if **trace.grid() == **grid {
        Ok(trace.clone())
    } else {
        project_trace(trace, &build_plan(trace.grid(), grid)?)
    }
}
