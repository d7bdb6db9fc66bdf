use super::{
    check_guesses, dirichlet_on, run_stage, IterationHistory, Layout, Monitor, Reference,
    SplitModel, WrConfig,
};
use crate::error::Result;
use crate::grid::{InterfaceTrace, Side, TraceKind};
use crate::projection::to_grid;

/// Neumann-Neumann waveform relaxation.
///
/// Each iteration solves Dirichlet problems everywhere, then homogeneous correction
/// problems driven by the flux jump at each interface, and subtracts the weighted sum
/// of the two corrections. `g_j` lives on the grid of subdomain `j`.
pub fn nnwr_run(
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

    let mut g: Vec<InterfaceTrace> = guesses
        .iter()
        .enumerate()
        .map(|(j, guess)| dirichlet_on(guess, &grids[j]))
        .collect::<Result<_>>()?;
    let left_bc = model.boundary(Side::Left, &grids[0]);
    let right_bc = model.boundary(Side::Right, &grids[n - 1]);

    let cands: Vec<Vec<&InterfaceTrace>> = g.iter().map(|t| vec![t]).collect();
    let initial_errors = monitor.measure(&cands, &g, None)?;
    let mut history = IterationHistory::new(config.method, config.metric, g.clone(), initial_errors);

    for k in 1..=config.max_iters {
        let fields = run_stage(n, config, |i| {
            let left = if i == 0 { left_bc.clone() } else { dirichlet_on(&g[i - 1], &grids[i])? };
            let right = if i == n - 1 { right_bc.clone() } else { dirichlet_on(&g[i], &grids[i])? };
            model.solve(layout.nodes[i], layout.nodes[i + 1], &grids[i], &left, &right, false)
        })?;

        // outward derivatives summed over both sides: w_left - w_right in global ∂x
        let jumps: Vec<InterfaceTrace> = (0..n - 1)
            .map(|j| {
                let wl = model.flux(&fields[j], Side::Right, false);
                let wr = model.flux_on(&fields[j + 1], Side::Left, &grids[j], false)?;
                let samples = wl.samples().iter().zip(wr.samples()).map(|(a, b)| a - b).collect();
                InterfaceTrace::new(TraceKind::Neumann, grids[j].clone(), model.rows(), samples)
            })
            .collect::<Result<_>>()?;

        let corrections = run_stage(n, config, |i| {
            let grid = &grids[i];
            let left = if i == 0 {
                model.zero_trace(TraceKind::Dirichlet, grid)
            } else {
                negate(&to_grid(&jumps[i - 1], grid)?)
            };
            let right = if i == n - 1 {
                model.zero_trace(TraceKind::Dirichlet, grid)
            } else {
                to_grid(&jumps[i], grid)?
            };
            model.solve(layout.nodes[i], layout.nodes[i + 1], grid, &left, &right, true)
        })?;

        let mut next = Vec::with_capacity(n - 1);
        for j in 0..n - 1 {
            let node = layout.interface_node(j);
            let a = corrections[j].trace_at_node(node)?;
            let b = to_grid(&corrections[j + 1].trace_at_node(node)?, &grids[j])?;
            let samples = g[j]
                .samples()
                .iter()
                .zip(a.samples().iter().zip(b.samples()))
                .map(|(old, (x, y))| old - config.theta * (x + y))
                .collect();
            next.push(InterfaceTrace::new(TraceKind::Dirichlet, grids[j].clone(), model.rows(), samples)?);
        }
        let cands: Vec<Vec<&InterfaceTrace>> = next.iter().map(|t| vec![t]).collect();
        let errors = monitor.measure(&cands, &next, Some(&g))?;
        let done = monitor.converged(&errors);
        g = next;
        history.dirichlet.push(g.clone());
        history.neumann.push(jumps);
        history.errors.push(errors);
        history.fields = fields;
        if done {
            history.converged_at = Some(k);
            break;
        }
    }
    Ok(history)
}

fn negate(trace: &InterfaceTrace) -> InterfaceTrace {
    let mut t = trace.clone();
    t.samples_mut().iter_mut().for_each(|v| *v = -*v);
    t
}
