use super::{
    arrangement_schedule, check_guesses, dirichlet_on, relax_update, run_stage, IterationHistory,
    Layout, Monitor, Reference, Role, SplitModel, WrConfig,
};
use crate::error::Result;
use crate::grid::{InterfaceTrace, Side};
use crate::kernels::SpaceTimeField;

/// Dirichlet-Neumann waveform relaxation.
///
/// Interface iterate `g_j` lives on the time grid of the Neumann side of interface
/// `j` and is interpolated for the Dirichlet solve. The Neumann side reads the flux
/// its neighbour produced earlier in the same iteration, realised on its own grid.
pub fn dnwr_run(
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
    let schedule = arrangement_schedule(n, config.arrangement)?;
    let sides: Vec<(usize, usize)> = (0..n - 1).map(|j| schedule.interface_sides(j)).collect();

    let mut g: Vec<InterfaceTrace> = guesses
        .iter()
        .zip(&sides)
        .map(|(guess, &(_, ns))| dirichlet_on(guess, &layout.grids[ns]))
        .collect::<Result<_>>()?;
    let left_bc = model.boundary(Side::Left, &layout.grids[0]);
    let right_bc = model.boundary(Side::Right, &layout.grids[n - 1]);

    let cands: Vec<Vec<&InterfaceTrace>> = g.iter().map(|t| vec![t]).collect();
    let initial_errors = monitor.measure(&cands, &g, None)?;
    let mut history = IterationHistory::new(config.method, config.metric, g.clone(), initial_errors);

    for k in 1..=config.max_iters {
        let mut fields: Vec<Option<SpaceTimeField>> = (0..n).map(|_| None).collect();
        for stage in &schedule.stages {
            let solved = run_stage(stage.len(), config, |s| {
                let task = &stage[s];
                let i = task.subdomain;
                let grid = &layout.grids[i];
                let data = |role: Role, side: Side| -> Result<InterfaceTrace> {
                    Ok(match (role, side) {
                        (Role::Physical, Side::Left) => left_bc.clone(),
                        (Role::Physical, Side::Right) => right_bc.clone(),
                        (Role::Dirichlet, Side::Left) => dirichlet_on(&g[i - 1], grid)?,
                        (Role::Dirichlet, Side::Right) => dirichlet_on(&g[i], grid)?,
                        (Role::Neumann, Side::Left) => {
                            let nb = fields[i - 1].as_ref().expect("neighbour solved earlier");
                            model.flux_on(nb, Side::Right, grid, false)?
                        }
                        (Role::Neumann, Side::Right) => {
                            let nb = fields[i + 1].as_ref().expect("neighbour solved earlier");
                            model.flux_on(nb, Side::Left, grid, false)?
                        }
                    })
                };
                let left = data(task.left, Side::Left)?;
                let right = data(task.right, Side::Right)?;
                model.solve(layout.nodes[i], layout.nodes[i + 1], grid, &left, &right, false)
            })?;
            for (task, field) in stage.iter().zip(solved) {
                fields[task.subdomain] = Some(field);
            }
        }
        let fields: Vec<SpaceTimeField> = fields.into_iter().map(|f| f.expect("all solved")).collect();

        let mut fluxes = Vec::with_capacity(n - 1);
        let mut next = Vec::with_capacity(n - 1);
        for (j, &(d, ns)) in sides.iter().enumerate() {
            let d_side = if d == j { Side::Right } else { Side::Left };
            fluxes.push(model.flux(&fields[d], d_side, false));
            let value = dirichlet_on(
                &fields[ns].trace_at_node(layout.interface_node(j))?,
                &layout.grids[ns],
            )?;
            next.push(relax_update(config.theta, &value, &g[j])?);
        }
        let cands: Vec<Vec<&InterfaceTrace>> = next.iter().map(|t| vec![t]).collect();
        let errors = monitor.measure(&cands, &next, Some(&g))?;
        let done = monitor.converged(&errors);
        g = next;
        history.dirichlet.push(g.clone());
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
