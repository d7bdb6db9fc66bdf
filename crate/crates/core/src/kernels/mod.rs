//! Single-subdomain solvers and the fields they produce.

mod field;
mod heat;
mod tridiag;
mod wave;

use std::sync::Arc;

pub use field::SpaceTimeField;
pub use heat::{heat_interface_flux, solve_heat_subdomain};
pub(crate) use heat::heat_flux_any;
pub use tridiag::solve_tridiagonal;
pub use wave::{
    solve_wave_profile, solve_wave_strip_2d, solve_wave_subdomain, wave_interface_flux, StripGrid,
};
pub(crate) use wave::wave_flux_any;

use crate::error::{Result, WrError};
use crate::grid::{InterfaceTrace, Side, TimeGrid, TraceKind};

/// A boundary trace checked against the solver's time grid.
pub(crate) struct BoundaryData<'a> {
    pub kind: TraceKind,
    pub trace: &'a InterfaceTrace,
}

impl<'a> BoundaryData<'a> {
    pub fn new(trace: &'a InterfaceTrace, time: &Arc<TimeGrid>, rows: usize) -> Result<Self> {
        if **trace.grid() != **time {
            return Err(WrError::IncompatibleGrids(
                "boundary trace is not on the solver time grid".into(),
            ));
        }
        if trace.rows() != rows {
            return Err(WrError::IncompatibleGrids(format!(
                "boundary trace has {} rows, expected {rows}",
                trace.rows()
            )));
        }
        Ok(Self {
            kind: trace.kind,
            trace,
        })
    }

    /// Outward-derivative data `(q, p)` meaning `∂u/∂n = q - p·u` at node `n`.
    pub fn outward(&self, side: Side, n: usize, row: usize, kind: TraceKind) -> (f64, f64) {
        let v = self.trace.value(n, row);
        match kind {
            TraceKind::Neumann => match side {
                Side::Left => (-v, 0.0),
                Side::Right => (v, 0.0),
            },
            TraceKind::Robin { p } => (v, p),
            TraceKind::Dirichlet => (0.0, 0.0),
        }
    }
}
