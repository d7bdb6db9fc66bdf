//! Backward-Euler heat solves on one subdomain.
//!
//! Neumann and Robin data enter through a ghost node `u_ghost = u_inner + 2Δx·q`,
//! `q` being the outward normal derivative. The flux read back from a solved field
//! uses the half-cell balance at the boundary node, so a Dirichlet solve followed by
//! a Neumann solve with the extracted flux reproduces the single-domain scheme.

use std::sync::Arc;

use super::field::SpaceTimeField;
use super::tridiag::solve_tridiagonal;
use super::BoundaryData;
use crate::data::DataFn;
use crate::error::{Result, WrError};
use crate::grid::{InterfaceTrace, Side, SpaceGrid1D, TimeGrid, TraceKind};

/// Solves `u_t = ν u_xx + f` on `grid` with backward Euler and centered differences.
pub fn solve_heat_subdomain(
    grid: &SpaceGrid1D,
    nu: f64,
    time: &Arc<TimeGrid>,
    initial: &[f64],
    left: &InterfaceTrace,
    right: &InterfaceTrace,
    source: Option<&DataFn>,
) -> Result<SpaceTimeField> {
    if nu <= 0.0 {
        return Err(WrError::InvalidParameter(format!("diffusivity {nu} must be positive")));
    }
    let nx = grid.node_count();
    if nx < 2 {
        return Err(WrError::InvalidSpaceGrid("subdomain needs two nodes".into()));
    }
    if initial.len() != nx {
        return Err(WrError::IncompatibleGrids(format!(
            "{} initial values for {nx} nodes",
            initial.len()
        )));
    }
    let lb = BoundaryData::new(left, time, 1)?;
    let rb = BoundaryData::new(right, time, 1)?;
    let dx = grid.dx();
    let xs = grid.nodes();
    let steps = time.steps();

    let mut values = Vec::with_capacity(time.len() * nx);
    values.extend_from_slice(initial);
    let mut lower = vec![0.0; nx];
    let mut diag = vec![0.0; nx];
    let mut upper = vec![0.0; nx];
    let mut rhs = vec![0.0; nx];

    for n in 0..steps {
        let dt = time.step(n);
        let t1 = time.times()[n + 1];
        let r = nu * dt / (dx * dx);
        let prev = &values[n * nx..(n + 1) * nx];
        for j in 0..nx {
            let f = source.map_or(0.0, |s| s.eval(xs[j], 0.0, t1));
            rhs[j] = prev[j] + dt * f;
            lower[j] = -r;
            diag[j] = 1.0 + 2.0 * r;
            upper[j] = -r;
        }
        for (side, data) in [(Side::Left, &lb), (Side::Right, &rb)] {
            let (b, inner) = match side {
                Side::Left => (0, 1),
                Side::Right => (nx - 1, nx - 2),
            };
            match data.kind {
                TraceKind::Dirichlet => {
                    lower[b] = 0.0;
                    upper[b] = 0.0;
                    diag[b] = 1.0;
                    rhs[b] = data.trace.value(n + 1, 0);
                }
                kind => {
                    let (q, p) = data.outward(side, n + 1, 0, kind);
                    diag[b] = 1.0 + 2.0 * r + 2.0 * r * dx * p;
                    rhs[b] += 2.0 * r * dx * q;
                    if inner > b {
                        upper[b] = -2.0 * r;
                        lower[b] = 0.0;
                    } else {
                        lower[b] = -2.0 * r;
                        upper[b] = 0.0;
                    }
                }
            }
        }
        solve_tridiagonal(&lower, &diag, &upper, &mut rhs)?;
        values.extend_from_slice(&rhs);
    }

    Ok(SpaceTimeField::new(
        grid.clone(),
        1,
        0.0,
        time.clone(),
        values,
        left.kind,
        right.kind,
    ))
}

/// Schur-consistent `∂u/∂x` (global orientation) at a Dirichlet boundary of `field`.
pub fn heat_interface_flux(
    field: &SpaceTimeField,
    side: Side,
    nu: f64,
    source: Option<&DataFn>,
) -> Result<InterfaceTrace> {
    if field.kind(side) != TraceKind::Dirichlet {
        return Err(WrError::WrongBoundaryKind);
    }
    Ok(heat_flux_any(field, side, nu, source))
}

/// Flux extraction without the boundary-kind check (Robin exchanges need it).
pub(crate) fn heat_flux_any(
    field: &SpaceTimeField,
    side: Side,
    nu: f64,
    source: Option<&DataFn>,
) -> InterfaceTrace {
    let nx = field.nx();
    let (b, inner) = match side {
        Side::Left => (0, 1),
        Side::Right => (nx - 1, nx - 2),
    };
    let dx = field.space().dx();
    let xb = field.space().node(b);
    let time = field.time();
    let sign = match side {
        Side::Left => -1.0,
        Side::Right => 1.0,
    };
    let samples = (0..time.len())
        .map(|n| {
            let ub = field.value(n, b, 0);
            let ui = field.value(n, inner, 0);
            let mut outward = (ub - ui) / dx;
            if n > 0 {
                let dt = time.step(n - 1);
                let f = source.map_or(0.0, |s| s.eval(xb, 0.0, time.times()[n]));
                let rate = (ub - field.value(n - 1, b, 0)) / dt;
                outward += dx / (2.0 * nu) * (rate - f);
            }
            sign * outward
        })
        .collect();
    InterfaceTrace::new(TraceKind::Neumann, time.clone(), 1, samples).expect("flux layout")
}
