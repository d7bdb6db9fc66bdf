use std::sync::Arc;

use super::{
    check_guesses, dirichlet_on, run_stage, IterationHistory, Layout, Method, Monitor, Reference,
    SplitModel, WrConfig,
};
use crate::error::{Result, WrError};
use crate::grid::{InterfaceTrace, Side, TimeGrid, TraceKind};
use crate::kernels::SpaceTimeField;
use crate::projection::to_grid;

/// Schwarz waveform relaxation, Jacobi style.
///
/// `SwrClassical` overlaps neighbours by `overlap_cells` cells (the left subdomain
/// takes the larger half) and exchanges Dirichlet values. `SwrRobin` keeps the
/// partition and exchanges `∂u/∂n + p·u`. The recorded interface iterate is the mean
/// of both neighbours' values; the error is the worse of the two.
pub fn swr_run(
    model: &SplitModel,
    layout: &Layout,
    config: &WrConfig,
    guesses: &[InterfaceTrace],
    reference: Option<&Reference>,
) -> Result<IterationHistory> {
    config.validate()?;
    check_guesses(guesses, layout, model.rows())?;
    let monitor = Monitor::new(config, reference)?;
    let n = layout.count();
    let grids = &layout.grids;
    let robin = match config.method {
        Method::SwrRobin { p } => Some(p),
        Method::SwrClassical => None,
        _ => {
            return Err(WrError::InvalidParameter(
                "swr_run needs a Schwarz method".into(),
            ))
        }
    };
    let ranges = subdomain_ranges(layout, if robin.is_some() { 0 } else { config.overlap_cells })?;

    // transmission data per subdomain, on that subdomain's grid
    let mut left_data: Vec<Option<InterfaceTrace>> = vec![None; n];
    let mut right_data: Vec<Option<InterfaceTrace>> = vec![None; n];
    let start_kind = match robin {
        Some(p) => TraceKind::Robin { p },
        None => TraceKind::Dirichlet,
    };
    for (j, guess) in guesses.iter().enumerate() {
        let into = |i: usize| -> Result<InterfaceTrace> {
            let mut t = to_grid(guess, &grids[i])?.with_kind(start_kind);
            if let Some(p) = robin {
                t.samples_mut().iter_mut().for_each(|v| *v *= p);
            }
            Ok(t)
        };
        right_data[j] = Some(into(j)?);
        left_data[j + 1] = Some(into(j + 1)?);
    }
    left_data[0] = Some(model.boundary(Side::Left, &grids[0]));
    right_data[n - 1] = Some(model.boundary(Side::Right, &grids[n - 1]));

    let initial: Vec<InterfaceTrace> = guesses
        .iter()
        .enumerate()
        .map(|(j, gs)| dirichlet_on(gs, &grids[j]))
        .collect::<Result<_>>()?;
    let cands: Vec<Vec<&InterfaceTrace>> = initial.iter().map(|t| vec![t]).collect();
    let initial_errors = monitor.measure(&cands, &initial, None)?;
    let mut history =
        IterationHistory::new(config.method, config.metric, initial.clone(), initial_errors);
    let mut previous = initial;

    for k in 1..=config.max_iters {
        let fields = run_stage(n, config, |i| {
            let (lo, hi) = ranges[i];
            let left = left_data[i].as_ref().expect("set");
            let right = right_data[i].as_ref().expect("set");
            model.solve(lo, hi, &grids[i], left, right, false)
        })?;

        // values of both neighbours at each interface node
        let mut own = Vec::with_capacity(n - 1);
        for j in 0..n - 1 {
            let node = layout.interface_node(j);
            let a = dirichlet_on(&fields[j].trace_at_node(node)?, &grids[j])?;
            let b = dirichlet_on(&fields[j + 1].trace_at_node(node)?, &grids[j])?;
            own.push((a, b));
        }
        let cands: Vec<Vec<&InterfaceTrace>> = own.iter().map(|(a, b)| vec![a, b]).collect();
        let mean: Vec<InterfaceTrace> = own
            .iter()
            .map(|(a, b)| {
                let s = a.samples().iter().zip(b.samples()).map(|(x, y)| 0.5 * (x + y)).collect();
                InterfaceTrace::new(TraceKind::Dirichlet, a.grid().clone(), a.rows(), s)
            })
            .collect::<Result<_>>()?;
        let errors = monitor.measure(&cands, &mean, Some(&previous))?;
        let done = monitor.converged(&errors);

        let mut fluxes = Vec::with_capacity(n - 1);
        for j in 0..n - 1 {
            match robin {
                None => {
                    let (lo, _) = ranges[j + 1];
                    let (_, hi) = ranges[j];
                    right_data[j] = Some(dirichlet_on(&fields[j + 1].trace_at_node(hi)?, &grids[j])?);
                    left_data[j + 1] = Some(dirichlet_on(&fields[j].trace_at_node(lo)?, &grids[j + 1])?);
                    fluxes.push(model.flux(&fields[j], Side::Right, false));
                }
                Some(p) => {
                    right_data[j] = Some(robin_data(model, &fields[j + 1], Side::Left, p, &grids[j])?);
                    left_data[j + 1] = Some(robin_data(model, &fields[j], Side::Right, p, &grids[j + 1])?);
                    fluxes.push(model.flux(&fields[j], Side::Right, false));
                }
            }
        }
        previous = mean.clone();
        history.dirichlet.push(mean);
        history.neumann.push(fluxes);
        history.errors.push(errors);
        history.fields = fields;
        if done {
            history.converged_at = Some(k);
            break;
        }
    }
    Ok(history)
}

/// Robin data on `grid` for the neighbour across `side` of `field`: the neighbour's
/// outward normal is opposite to `field`'s, so `∂u/∂n_nb + p·u = ∓∂u/∂x + p·u`.
fn robin_data(
    model: &SplitModel,
    field: &SpaceTimeField,
    side: Side,
    p: f64,
    grid: &Arc<TimeGrid>,
) -> Result<InterfaceTrace> {
    let w = model.flux_on(field, side, grid, false)?;
    let u = to_grid(&field.boundary_trace(side), grid)?;
    let sign = match side {
        // neighbour lies to the left; its outward normal points +x
        Side::Left => 1.0,
        Side::Right => -1.0,
    };
    let samples = w
        .samples()
        .iter()
        .zip(u.samples())
        .map(|(d, v)| sign * d + p * v)
        .collect();
    InterfaceTrace::new(TraceKind::Robin { p }, w.grid().clone(), w.rows(), samples)
}

/// Global node ranges of the (possibly extended) subdomains.
fn subdomain_ranges(layout: &Layout, overlap: usize) -> Result<Vec<(usize, usize)>> {
    let n = layout.count();
    let right_ext = overlap.div_ceil(2);
    let left_ext = overlap / 2;
    let ranges: Vec<(usize, usize)> = (0..n)
        .map(|i| {
            let lo = if i == 0 { layout.nodes[0] } else { layout.nodes[i] - left_ext.min(layout.nodes[i]) };
            let hi = if i == n - 1 { layout.nodes[n] } else { layout.nodes[i + 1] + right_ext };
            (lo, hi)
        })
        .collect();
    for i in 0..n {
        let (lo, hi) = ranges[i];
        let fits_left = i == 0 || lo > layout.nodes[i - 1];
        let fits_right = i == n - 1 || hi < layout.nodes[i + 2];
        if !fits_left || !fits_right || hi - lo < 2 {
            return Err(WrError::InvalidParameter(format!(
                "overlap of {overlap} cells does not fit subdomain {}",
                i + 1
            )));
        }
    }
    Ok(ranges)
}
