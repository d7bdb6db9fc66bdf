//! Global problem definitions and their single-domain reference solves.

use std::sync::Arc;

use crate::data::DataFn;
use crate::error::{Result, WrError};
use crate::grid::{InterfaceTrace, SpaceGrid1D, TimeGrid, TraceKind};
use crate::kernels::{
    solve_heat_subdomain, solve_wave_profile, solve_wave_strip_2d, SpaceTimeField, StripGrid,
};

/// `u_t = ν u_xx + f` on `(start, end)` with Dirichlet data at both ends.
#[derive(Debug, Clone)]
pub struct HeatProblem {
    pub start: f64,
    pub end: f64,
    pub nu: f64,
    pub initial: DataFn,
    pub left: DataFn,
    pub right: DataFn,
    pub source: Option<DataFn>,
}

impl HeatProblem {
    /// All data zero: interface iterates are then the iteration error itself.
    pub fn error_equation(start: f64, end: f64, nu: f64) -> Self {
        Self {
            start,
            end,
            nu,
            initial: DataFn::zero(),
            left: DataFn::zero(),
            right: DataFn::zero(),
            source: None,
        }
    }

    pub fn solve_monodomain(&self, space: &SpaceGrid1D, time: &Arc<TimeGrid>) -> Result<SpaceTimeField> {
        let u0: Vec<f64> = space.nodes().iter().map(|&x| self.initial.eval(x, 0.0, 0.0)).collect();
        let left = dirichlet_1d(&self.left, space.start(), time);
        let right = dirichlet_1d(&self.right, space.end(), time);
        solve_heat_subdomain(space, self.nu, time, &u0, &left, &right, self.source.as_ref())
    }
}

/// Wave speed, constant or constant per piece.
#[derive(Debug, Clone, PartialEq)]
pub enum Speed {
    Uniform(f64),
    /// `speeds[i]` holds on `(boundaries[i], boundaries[i + 1])`.
    Piecewise { boundaries: Vec<f64>, speeds: Vec<f64> },
}

impl Speed {
    pub fn validate(&self) -> Result<()> {
        match self {
            Speed::Uniform(c) if *c > 0.0 => Ok(()),
            Speed::Piecewise { boundaries, speeds }
                if boundaries.len() == speeds.len() + 1 && speeds.iter().all(|c| *c > 0.0) =>
            {
                Ok(())
            }
            _ => Err(WrError::InvalidParameter("wave speeds must be positive".into())),
        }
    }

    pub fn at(&self, x: f64) -> f64 {
        match self {
            Speed::Uniform(c) => *c,
            Speed::Piecewise { boundaries, speeds } => {
                let i = boundaries[1..]
                    .iter()
                    .position(|b| x < *b)
                    .unwrap_or(speeds.len() - 1);
                speeds[i]
            }
        }
    }

    pub fn max(&self) -> f64 {
        match self {
            Speed::Uniform(c) => *c,
            Speed::Piecewise { speeds, .. } => speeds.iter().cloned().fold(0.0, f64::max),
        }
    }

    /// Squared speed of cell `(x_j, x_{j+1})`.
    pub(crate) fn cell_c2(&self, space: &SpaceGrid1D, j: usize) -> f64 {
        let c = self.at(0.5 * (space.node(j) + space.node(j + 1)));
        c * c
    }

    /// Squared speed per node of `lo..=hi`. Range ends take the adjacent inner cell,
    /// interior nodes between cells of different speed take the harmonic mean.
    pub(crate) fn node_c2(&self, space: &SpaceGrid1D, lo: usize, hi: usize) -> Vec<f64> {
        (lo..=hi)
            .map(|j| {
                if j == lo {
                    self.cell_c2(space, j)
                } else if j == hi {
                    self.cell_c2(space, j - 1)
                } else {
                    let a = self.cell_c2(space, j - 1);
                    let b = self.cell_c2(space, j);
                    if a == b {
                        a
                    } else {
                        2.0 / (1.0 / a + 1.0 / b)
                    }
                }
            })
            .collect()
    }
}

/// `u_tt = c² u_xx + f` on `(start, end)` with Dirichlet data at both ends.
#[derive(Debug, Clone)]
pub struct WaveProblem {
    pub start: f64,
    pub end: f64,
    pub speed: Speed,
    pub initial_u: DataFn,
    pub initial_ut: DataFn,
    pub left: DataFn,
    pub right: DataFn,
    pub source: Option<DataFn>,
}

impl WaveProblem {
    pub fn error_equation(start: f64, end: f64, speed: Speed) -> Self {
        Self {
            start,
            end,
            speed,
            initial_u: DataFn::zero(),
            initial_ut: DataFn::zero(),
            left: DataFn::zero(),
            right: DataFn::zero(),
            source: None,
        }
    }

    pub fn solve_monodomain(&self, space: &SpaceGrid1D, time: &Arc<TimeGrid>) -> Result<SpaceTimeField> {
        self.speed.validate()?;
        let xs = space.nodes();
        let u0: Vec<f64> = xs.iter().map(|&x| self.initial_u.eval(x, 0.0, 0.0)).collect();
        let v0: Vec<f64> = xs.iter().map(|&x| self.initial_ut.eval(x, 0.0, 0.0)).collect();
        let c2 = self.speed.node_c2(space, 0, space.cells());
        let left = dirichlet_1d(&self.left, space.start(), time);
        let right = dirichlet_1d(&self.right, space.end(), time);
        solve_wave_profile(space, &c2, time, &u0, &v0, &left, &right, self.source.as_ref())
    }
}

/// `u_tt = c²(u_xx + u_yy) + f` on `(start, end) × (0, y_end)`, Dirichlet on all sides.
#[derive(Debug, Clone)]
pub struct Wave2DProblem {
    pub start: f64,
    pub end: f64,
    pub y_end: f64,
    pub y_cells: usize,
    pub c: f64,
    pub initial_u: DataFn,
    pub initial_ut: DataFn,
    pub left: DataFn,
    pub right: DataFn,
    pub bottom: DataFn,
    pub top: DataFn,
    pub source: Option<DataFn>,
}

impl Wave2DProblem {
    pub fn error_equation(start: f64, end: f64, y_end: f64, y_cells: usize, c: f64) -> Self {
        Self {
            start,
            end,
            y_end,
            y_cells,
            c,
            initial_u: DataFn::zero(),
            initial_ut: DataFn::zero(),
            left: DataFn::zero(),
            right: DataFn::zero(),
            bottom: DataFn::zero(),
            top: DataFn::zero(),
            source: None,
        }
    }

    pub fn strip(&self, x: SpaceGrid1D) -> StripGrid {
        StripGrid::new(x, self.y_end, self.y_cells)
    }

    /// Initial values and rates on a strip, row-major in (y, x).
    pub(crate) fn initial_levels(&self, strip: &StripGrid) -> (Vec<f64>, Vec<f64>) {
        let xs = strip.x.nodes();
        let ny = strip.ny();
        let mut u = Vec::with_capacity(ny * xs.len());
        let mut v = Vec::with_capacity(ny * xs.len());
        for iy in 0..ny {
            let y = strip.y(iy);
            for &x in &xs {
                u.push(self.initial_u.eval(x, y, 0.0));
                v.push(self.initial_ut.eval(x, y, 0.0));
            }
        }
        (u, v)
    }

    pub(crate) fn vertical_trace(&self, f: &DataFn, x: f64, strip: &StripGrid, time: &Arc<TimeGrid>) -> InterfaceTrace {
        InterfaceTrace::from_fn(TraceKind::Dirichlet, time.clone(), strip.interior_rows(), |t, r| {
            f.eval(x, strip.y(r + 1), t)
        })
    }

    pub fn solve_monodomain(&self, space: &SpaceGrid1D, time: &Arc<TimeGrid>) -> Result<SpaceTimeField> {
        let strip = self.strip(space.clone());
        let (u0, v0) = self.initial_levels(&strip);
        let left = self.vertical_trace(&self.left, space.start(), &strip, time);
        let right = self.vertical_trace(&self.right, space.end(), &strip, time);
        solve_wave_strip_2d(
            &strip,
            self.c,
            time,
            &u0,
            &v0,
            &left,
            &right,
            Some(&self.bottom),
            Some(&self.top),
            self.source.as_ref(),
        )
    }
}

/// Any of the supported models.
#[derive(Debug, Clone)]
pub enum Problem {
    Heat(HeatProblem),
    Wave(WaveProblem),
    Wave2D(Wave2DProblem),
}

impl Problem {
    pub fn start(&self) -> f64 {
        match self {
            Problem::Heat(p) => p.start,
            Problem::Wave(p) => p.start,
            Problem::Wave2D(p) => p.start,
        }
    }

    pub fn end(&self) -> f64 {
        match self {
            Problem::Heat(p) => p.end,
            Problem::Wave(p) => p.end,
            Problem::Wave2D(p) => p.end,
        }
    }
}

/// Single-domain solve with the same scheme the subdomain kernels use.
pub fn solve_monodomain(problem: &Problem, space: &SpaceGrid1D, time: &Arc<TimeGrid>) -> Result<SpaceTimeField> {
    match problem {
        Problem::Heat(p) => p.solve_monodomain(space, time),
        Problem::Wave(p) => p.solve_monodomain(space, time),
        Problem::Wave2D(p) => p.solve_monodomain(space, time),
    }
}

pub(crate) fn dirichlet_1d(f: &DataFn, x: f64, time: &Arc<TimeGrid>) -> InterfaceTrace {
    InterfaceTrace::from_fn(TraceKind::Dirichlet, time.clone(), 1, |t, _| f.eval(x, 0.0, t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn zero_heat_problem_gives_zero() {
        let p = HeatProblem::error_equation(0.0, 1.0, 1.0);
        let space = SpaceGrid1D::new(0.0, 1.0, 0.1).unwrap();
        let time = Arc::new(TimeGrid::uniform(1.0, 0.1).unwrap());
        let f = p.solve_monodomain(&space, &time).unwrap();
        assert!(f.values().iter().all(|v| *v == 0.0));
    }

    #[test]
    fn heat_manufactured_solution_is_first_order_in_time() {
        let p = HeatProblem {
            start: 0.0,
            end: 1.0,
            nu: 1.0,
            initial: DataFn::of_x(|x| (PI * x).sin()),
            left: DataFn::zero(),
            right: DataFn::zero(),
            source: Some(DataFn::new(|x, _, t| (PI * PI - 1.0) * (-t).exp() * (PI * x).sin())),
        };
        let space = SpaceGrid1D::new(0.0, 1.0, 0.002).unwrap();
        let errors: Vec<f64> = [0.1, 0.05, 0.025]
            .iter()
            .map(|&dt| {
                let time = Arc::new(TimeGrid::uniform(1.0, dt).unwrap());
                let f = p.solve_monodomain(&space, &time).unwrap();
                let mut worst: f64 = 0.0;
                for (n, t) in time.times().iter().enumerate() {
                    for (j, x) in space.nodes().iter().enumerate() {
                        let exact = (-t).exp() * (PI * x).sin();
                        worst = worst.max((f.value(n, j, 0) - exact).abs());
                    }
                }
                worst
            })
            .collect();
        for w in errors.windows(2) {
            let ratio = w[0] / w[1];
            assert!((1.7..2.3).contains(&ratio), "ratio {ratio} from {errors:?}");
        }
    }

    #[test]
    fn harmonic_mean_at_speed_jump() {
        let space = SpaceGrid1D::new(0.0, 4.0, 1.0).unwrap();
        let speed = Speed::Piecewise {
            boundaries: vec![0.0, 2.0, 4.0],
            speeds: vec![1.0, 2.0],
        };
        let c2 = speed.node_c2(&space, 0, 4);
        assert_eq!(c2, vec![1.0, 1.0, 2.0 / (1.0 + 0.25), 4.0, 4.0]);
        assert_eq!(speed.node_c2(&space, 2, 4)[0], 4.0);
    }

    #[test]
    fn wave_monodomain_ramp() {
        let p = WaveProblem {
            left: DataFn::of_t(|t| t),
            ..WaveProblem::error_equation(0.0, 3.0, Speed::Uniform(1.0))
        };
        let space = SpaceGrid1D::new(0.0, 3.0, 0.05).unwrap();
        let time = Arc::new(TimeGrid::uniform(2.0, 0.05).unwrap());
        let f = p.solve_monodomain(&space, &time).unwrap();
        for (n, t) in time.times().iter().enumerate() {
            for (j, x) in space.nodes().iter().enumerate() {
                assert!((f.value(n, j, 0) - (t - x).max(0.0)).abs() < 1e-12);
            }
        }
    }
}
