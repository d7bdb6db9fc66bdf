use std::sync::Arc;

use crate::error::{Result, WrError};
use crate::grid::{InterfaceTrace, Partition1D, Side, SpaceGrid1D, TimeGrid, TraceKind};
use crate::kernels::{
    heat_flux_any, solve_heat_subdomain, solve_wave_profile, solve_wave_strip_2d, wave_flux_any,
    SpaceTimeField,
};
use crate::problem::{dirichlet_1d, Problem};

/// A problem on a global x-grid, solvable on any node range.
#[derive(Debug, Clone)]
pub struct SplitModel {
    problem: Problem,
    space: SpaceGrid1D,
}

impl SplitModel {
    pub fn new(problem: Problem, dx: f64) -> Result<Self> {
        let space = SpaceGrid1D::new(problem.start(), problem.end(), dx)?;
        if let Problem::Wave(w) = &problem {
            w.speed.validate()?;
        }
        Ok(Self { problem, space })
    }

    pub fn problem(&self) -> &Problem {
        &self.problem
    }

    pub fn space(&self) -> &SpaceGrid1D {
        &self.space
    }

    /// Samples per interface time node.
    pub fn rows(&self) -> usize {
        match &self.problem {
            Problem::Wave2D(p) => p.y_cells - 1,
            _ => 1,
        }
    }

    /// Solves on global nodes `lo..=hi`; `homogeneous` zeroes all problem data.
    pub fn solve(
        &self,
        lo: usize,
        hi: usize,
        time: &Arc<TimeGrid>,
        left: &InterfaceTrace,
        right: &InterfaceTrace,
        homogeneous: bool,
    ) -> Result<SpaceTimeField> {
        let grid = self.space.subgrid(lo, hi);
        let xs = grid.nodes();
        let field = match &self.problem {
            Problem::Heat(p) => {
                let u0: Vec<f64> = if homogeneous {
                    vec![0.0; xs.len()]
                } else {
                    xs.iter().map(|&x| p.initial.eval(x, 0.0, 0.0)).collect()
                };
                let src = if homogeneous { None } else { p.source.as_ref() };
                solve_heat_subdomain(&grid, p.nu, time, &u0, left, right, src)?
            }
            Problem::Wave(p) => {
                let (u0, v0): (Vec<f64>, Vec<f64>) = if homogeneous {
                    (vec![0.0; xs.len()], vec![0.0; xs.len()])
                } else {
                    xs.iter()
                        .map(|&x| (p.initial_u.eval(x, 0.0, 0.0), p.initial_ut.eval(x, 0.0, 0.0)))
                        .unzip()
                };
                let c2 = p.speed.node_c2(&self.space, lo, hi);
                let src = if homogeneous { None } else { p.source.as_ref() };
                solve_wave_profile(&grid, &c2, time, &u0, &v0, left, right, src)?
            }
            Problem::Wave2D(p) => {
                let strip = p.strip(grid);
                let (u0, v0) = if homogeneous {
                    let size = strip.ny() * strip.x.node_count();
                    (vec![0.0; size], vec![0.0; size])
                } else {
                    p.initial_levels(&strip)
                };
                let (bottom, top, src) = if homogeneous {
                    (None, None, None)
                } else {
                    (Some(&p.bottom), Some(&p.top), p.source.as_ref())
                };
                solve_wave_strip_2d(&strip, p.c, time, &u0, &v0, left, right, bottom, top, src)?
            }
        };
        Ok(field.with_offset(lo))
    }

    /// Discrete `∂u/∂x` realised at one end of `field`, whatever its boundary kind.
    pub fn flux(&self, field: &SpaceTimeField, side: Side, homogeneous: bool) -> InterfaceTrace {
        match &self.problem {
            Problem::Heat(p) => {
                let src = if homogeneous { None } else { p.source.as_ref() };
                heat_flux_any(field, side, p.nu, src)
            }
            Problem::Wave(p) => {
                let cell = match side {
                    Side::Left => field.node_offset(),
                    Side::Right => field.node_offset() + field.nx() - 2,
                };
                let src = if homogeneous { None } else { p.source.as_ref() };
                wave_flux_any(field, side, p.speed.cell_c2(&self.space, cell), src)
            }
            Problem::Wave2D(p) => {
                let src = if homogeneous { None } else { p.source.as_ref() };
                wave_flux_any(field, side, p.c * p.c, src)
            }
        }
    }

    /// Like [`flux`](Self::flux), but realised on `grid`: the two edge columns are
    /// interpolated onto `grid` first, so the time stencils match the receiver's.
    pub fn flux_on(
        &self,
        field: &SpaceTimeField,
        side: Side,
        grid: &Arc<TimeGrid>,
        homogeneous: bool,
    ) -> Result<InterfaceTrace> {
        if **field.time() == **grid {
            Ok(self.flux(field, side, homogeneous))
        } else {
            Ok(self.flux(&field.edge_on_grid(side, grid)?, side, homogeneous))
        }
    }

    /// Physical Dirichlet data at the left or right end of the domain.
    pub fn boundary(&self, side: Side, time: &Arc<TimeGrid>) -> InterfaceTrace {
        let x = match side {
            Side::Left => self.space.start(),
            Side::Right => self.space.end(),
        };
        match &self.problem {
            Problem::Heat(p) => dirichlet_1d(if side == Side::Left { &p.left } else { &p.right }, x, time),
            Problem::Wave(p) => dirichlet_1d(if side == Side::Left { &p.left } else { &p.right }, x, time),
            Problem::Wave2D(p) => {
                let strip = p.strip(self.space.clone());
                p.vertical_trace(if side == Side::Left { &p.left } else { &p.right }, x, &strip, time)
            }
        }
    }

    pub fn zero_trace(&self, kind: TraceKind, time: &Arc<TimeGrid>) -> InterfaceTrace {
        InterfaceTrace::zeros(kind, time.clone(), self.rows())
    }

    pub fn monodomain(&self, time: &Arc<TimeGrid>) -> Result<SpaceTimeField> {
        crate::problem::solve_monodomain(&self.problem, &self.space, time)
    }
}

/// Subdomain node ranges and per-subdomain time grids.
#[derive(Debug, Clone, PartialEq)]
pub struct Layout {
    /// Global node index of every partition boundary, ends included.
    pub nodes: Vec<usize>,
    pub grids: Vec<Arc<TimeGrid>>,
}

impl Layout {
    pub fn new(model: &SplitModel, partition: &Partition1D, grids: Vec<Arc<TimeGrid>>) -> Result<Self> {
        let nodes = model.space().partition_nodes(partition)?;
        Self::from_nodes(nodes, grids)
    }

    pub fn from_nodes(nodes: Vec<usize>, grids: Vec<Arc<TimeGrid>>) -> Result<Self> {
        if nodes.len() < 3 {
            return Err(WrError::TooFewSubdomains(nodes.len().saturating_sub(1)));
        }
        if nodes.windows(2).any(|w| w[1] <= w[0]) {
            return Err(WrError::NonIncreasingBoundaries);
        }
        let grids = match grids.len() {
            1 => vec![grids[0].clone(); nodes.len() - 1],
            n if n == nodes.len() - 1 => grids,
            n => {
                return Err(WrError::IncompatibleGrids(format!(
                    "{n} time grids for {} subdomains",
                    nodes.len() - 1
                )))
            }
        };
        let t = grids[0].t_end();
        if let Some(g) = grids.iter().find(|g| (g.t_end() - t).abs() > 1e-12 * t.max(1.0)) {
            return Err(WrError::WindowMismatch { src: t, dst: g.t_end() });
        }
        Ok(Self { nodes, grids })
    }

    pub fn count(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn interface_count(&self) -> usize {
        self.nodes.len() - 2
    }

    /// Global node of interface `j` (0-based, between subdomains `j` and `j + 1`).
    pub fn interface_node(&self, j: usize) -> usize {
        self.nodes[j + 1]
    }

    /// Grid with the smallest largest step, used for references.
    pub fn finest_grid(&self) -> &Arc<TimeGrid> {
        self.grids
            .iter()
            .min_by(|a, b| a.max_step().total_cmp(&b.max_step()))
            .unwrap()
    }

    pub fn has_common_grid(&self) -> bool {
        self.grids.iter().all(|g| **g == *self.grids[0])
    }
}
