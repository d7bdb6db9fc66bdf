//! Explicit leapfrog solves of `u_tt = c² Δu + f` on a 1D subdomain or a 2D strip.
//!
//! The first step uses the Taylor start
//! `u¹ = u⁰ + Δt·u_t(0) + Δt²/2 (c² Δ_h u⁰ + f⁰)`, later steps the three-level
//! scheme (with its variable-step form when the time grid is not uniform).

use std::sync::Arc;

use super::field::SpaceTimeField;
use super::BoundaryData;
use crate::data::DataFn;
use crate::error::{Result, WrError};
use crate::grid::{cfl_number, InterfaceTrace, Side, SpaceGrid1D, TimeGrid, TraceKind};

/// Node layout of a strip `(a, b) × (0, Y)`.
#[derive(Debug, Clone, PartialEq)]
pub struct StripGrid {
    pub x: SpaceGrid1D,
    pub y_cells: usize,
    pub y_end: f64,
}

impl StripGrid {
    pub fn new(x: SpaceGrid1D, y_end: f64, y_cells: usize) -> Self {
        assert!(y_cells >= 2, "a strip needs at least one interior row");
        Self { x, y_cells, y_end }
    }

    pub fn dy(&self) -> f64 {
        self.y_end / self.y_cells as f64
    }

    pub fn ny(&self) -> usize {
        self.y_cells + 1
    }

    pub fn y(&self, iy: usize) -> f64 {
        if iy == self.y_cells {
            self.y_end
        } else {
            iy as f64 * self.dy()
        }
    }

    pub fn interior_rows(&self) -> usize {
        self.y_cells - 1
    }
}

pub(crate) struct WaveSetup<'a> {
    pub space: &'a SpaceGrid1D,
    /// Squared speed at every x-node.
    pub c2: &'a [f64],
    /// 1 in 1D, otherwise y-node count including both edges.
    pub ny: usize,
    pub dy: f64,
    pub time: &'a Arc<TimeGrid>,
    pub initial_u: &'a [f64],
    pub initial_ut: &'a [f64],
    pub left: &'a InterfaceTrace,
    pub right: &'a InterfaceTrace,
    pub bottom: Option<&'a DataFn>,
    pub top: Option<&'a DataFn>,
    pub source: Option<&'a DataFn>,
}

impl WaveSetup<'_> {
    fn y(&self, iy: usize) -> f64 {
        if self.ny == 1 {
            0.0
        } else if iy == self.ny - 1 {
            self.dy * (self.ny - 1) as f64
        } else {
            iy as f64 * self.dy
        }
    }

    fn cfl(&self) -> f64 {
        let cmax = self.c2.iter().cloned().fold(0.0, f64::max).sqrt();
        let dy = (self.ny > 1).then_some(self.dy);
        cfl_number(cmax, self.space.dx(), self.time.max_step(), dy)
    }
}

pub(crate) fn solve_wave(s: &WaveSetup<'_>) -> Result<SpaceTimeField> {
    let nx = s.space.node_count();
    let ny = s.ny;
    if nx < 2 {
        return Err(WrError::InvalidSpaceGrid("subdomain needs two nodes".into()));
    }
    if s.c2.len() != nx || s.c2.iter().any(|c| *c <= 0.0) {
        return Err(WrError::InvalidParameter("one positive speed per node required".into()));
    }
    if s.initial_u.len() != nx * ny || s.initial_ut.len() != nx * ny {
        return Err(WrError::IncompatibleGrids("initial data shape".into()));
    }
    let cfl = s.cfl();
    if cfl > 1.0 + 1e-12 {
        return Err(WrError::CflViolation { cfl });
    }
    let rows = if ny == 1 { 1 } else { ny - 2 };
    let lb = BoundaryData::new(s.left, s.time, rows)?;
    let rb = BoundaryData::new(s.right, s.time, rows)?;
    let dx = s.space.dx();
    let xs = s.space.nodes();
    let times = s.time.times();
    let stride = nx * ny;
    let y_interior = if ny == 1 { 0..1 } else { 1..ny - 1 };

    let mut values = Vec::with_capacity(s.time.len() * stride);
    values.extend_from_slice(s.initial_u);
    let mut lap = vec![0.0; stride];

    for n in 0..s.time.steps() {
        let t = times[n];
        let cur = &values[n * stride..(n + 1) * stride];
        // c² Δ_h u^n + f^n on every node that is not Dirichlet-pinned
        for iy in y_interior.clone() {
            let y = s.y(iy);
            for ix in 0..nx {
                let u = cur[iy * nx + ix];
                let dxx = if ix == 0 || ix == nx - 1 {
                    let (side, data, inner) = if ix == 0 {
                        (Side::Left, &lb, 1)
                    } else {
                        (Side::Right, &rb, nx - 2)
                    };
                    if data.kind == TraceKind::Dirichlet {
                        continue;
                    }
                    let (q, p) = data.outward(side, n, row_of(iy, ny), data.kind);
                    let ui = cur[iy * nx + inner];
                    (2.0 * ui - 2.0 * u + 2.0 * dx * (q - p * u)) / (dx * dx)
                } else {
                    (cur[iy * nx + ix - 1] - 2.0 * u + cur[iy * nx + ix + 1]) / (dx * dx)
                };
                let dyy = if ny == 1 {
                    0.0
                } else {
                    (cur[(iy - 1) * nx + ix] - 2.0 * u + cur[(iy + 1) * nx + ix]) / (s.dy * s.dy)
                };
                let f = s.source.map_or(0.0, |src| src.eval(xs[ix], y, t));
                lap[iy * nx + ix] = s.c2[ix] * (dxx + dyy) + f;
            }
        }
        let mut next = vec![0.0; stride];
        let dtp = s.time.step(n);
        if n == 0 {
            let half = 0.5 * dtp * dtp;
            for k in 0..stride {
                next[k] = cur[k] + dtp * s.initial_ut[k] + half * lap[k];
            }
        } else {
            let dtm = s.time.step(n - 1);
            let prev = &values[(n - 1) * stride..n * stride];
            let (a, b) = if s.time.is_uniform() {
                (1.0, dtp * dtp)
            } else {
                (dtp / dtm, 0.5 * dtp * (dtp + dtm))
            };
            for k in 0..stride {
                next[k] = cur[k] + a * (cur[k] - prev[k]) + b * lap[k];
            }
        }
        // pinned values at t^{n+1}
        let t1 = times[n + 1];
        for iy in y_interior.clone() {
            let r = row_of(iy, ny);
            if lb.kind == TraceKind::Dirichlet {
                next[iy * nx] = lb.trace.value(n + 1, r);
            }
            if rb.kind == TraceKind::Dirichlet {
                next[iy * nx + nx - 1] = rb.trace.value(n + 1, r);
            }
        }
        if ny > 1 {
            let y_top = s.y(ny - 1);
            for ix in 0..nx {
                next[ix] = s.bottom.map_or(0.0, |g| g.eval(xs[ix], 0.0, t1));
                next[(ny - 1) * nx + ix] = s.top.map_or(0.0, |g| g.eval(xs[ix], y_top, t1));
            }
        }
        values.extend_from_slice(&next);
    }

    let mut field = SpaceTimeField::new(
        s.space.clone(),
        ny,
        s.dy,
        s.time.clone(),
        values,
        s.left.kind,
        s.right.kind,
    );
    field.initial_rate = Some(s.initial_ut.to_vec());
    Ok(field)
}

fn row_of(iy: usize, ny: usize) -> usize {
    if ny == 1 {
        0
    } else {
        iy - 1
    }
}

/// Leapfrog solve on a 1D subdomain with constant speed `c`.
#[allow(clippy::too_many_arguments)]
pub fn solve_wave_subdomain(
    grid: &SpaceGrid1D,
    c: f64,
    time: &Arc<TimeGrid>,
    initial_u: &[f64],
    initial_ut: &[f64],
    left: &InterfaceTrace,
    right: &InterfaceTrace,
    source: Option<&DataFn>,
) -> Result<SpaceTimeField> {
    let c2 = vec![c * c; grid.node_count()];
    solve_wave_profile(grid, &c2, time, initial_u, initial_ut, left, right, source)
}

/// Leapfrog solve with a squared speed given per node.
#[allow(clippy::too_many_arguments)]
pub fn solve_wave_profile(
    grid: &SpaceGrid1D,
    c2: &[f64],
    time: &Arc<TimeGrid>,
    initial_u: &[f64],
    initial_ut: &[f64],
    left: &InterfaceTrace,
    right: &InterfaceTrace,
    source: Option<&DataFn>,
) -> Result<SpaceTimeField> {
    solve_wave(&WaveSetup {
        space: grid,
        c2,
        ny: 1,
        dy: 0.0,
        time,
        initial_u,
        initial_ut,
        left,
        right,
        bottom: None,
        top: None,
        source,
    })
}

/// Five-point leapfrog on a strip with Dirichlet data on `y = 0` and `y = Y`.
///
/// Left and right traces carry one sample per interior y-row.
#[allow(clippy::too_many_arguments)]
pub fn solve_wave_strip_2d(
    strip: &StripGrid,
    c: f64,
    time: &Arc<TimeGrid>,
    initial_u: &[f64],
    initial_ut: &[f64],
    left: &InterfaceTrace,
    right: &InterfaceTrace,
    bottom: Option<&DataFn>,
    top: Option<&DataFn>,
    source: Option<&DataFn>,
) -> Result<SpaceTimeField> {
    let c2 = vec![c * c; strip.x.node_count()];
    solve_wave(&WaveSetup {
        space: &strip.x,
        c2: &c2,
        ny: strip.ny(),
        dy: strip.dy(),
        time,
        initial_u,
        initial_ut,
        left,
        right,
        bottom,
        top,
        source,
    })
}

/// Schur-consistent `∂u/∂x` at a Dirichlet boundary of a wave field.
pub fn wave_interface_flux(
    field: &SpaceTimeField,
    side: Side,
    c: f64,
    source: Option<&DataFn>,
) -> Result<InterfaceTrace> {
    if field.kind(side) != TraceKind::Dirichlet {
        return Err(WrError::WrongBoundaryKind);
    }
    Ok(wave_flux_any(field, side, c * c, source))
}

/// Flux extraction without the boundary-kind check; `c2` is the squared speed of
/// the half-cell inside the field.
pub(crate) fn wave_flux_any(
    field: &SpaceTimeField,
    side: Side,
    c2: f64,
    source: Option<&DataFn>,
) -> InterfaceTrace {
    let nx = field.nx();
    let ny = field.ny();
    let (b, inner) = match side {
        Side::Left => (0, 1),
        Side::Right => (nx - 1, nx - 2),
    };
    let sign = match side {
        Side::Left => -1.0,
        Side::Right => 1.0,
    };
    let dx = field.space().dx();
    let dy = field.dy();
    let xb = field.space().node(b);
    let time = field.time().clone();
    let times = time.times();
    let m = time.steps();
    let rows = field.trace_rows();
    let rate0 = field.initial_rate.as_ref();

    let second_diff = |n: usize, iy: usize| -> f64 {
        let u = |k: usize| field.value(k, b, iy);
        let centered = |k: usize| {
            let dtp = time.step(k);
            let dtm = time.step(k - 1);
            2.0 / (dtp + dtm) * ((u(k + 1) - u(k)) / dtp - (u(k) - u(k - 1)) / dtm)
        };
        let start = || {
            let dt0 = time.step(0);
            let v0 = rate0.map_or(0.0, |r| r[iy * nx + b]);
            2.0 * (u(1) - u(0) - dt0 * v0) / (dt0 * dt0)
        };
        if n == 0 {
            start()
        } else if n < m {
            centered(n)
        } else if m >= 2 {
            centered(m - 1)
        } else {
            start()
        }
    };

    let mut samples = Vec::with_capacity(time.len() * rows);
    for n in 0..time.len() {
        for r in 0..rows {
            let iy = field.trace_row_index(r);
            let ub = field.value(n, b, iy);
            let ui = field.value(n, inner, iy);
            let dyy = if ny == 1 {
                0.0
            } else {
                (field.value(n, b, iy - 1) - 2.0 * ub + field.value(n, b, iy + 1)) / (dy * dy)
            };
            let y = if ny == 1 { 0.0 } else { iy as f64 * dy };
            let f = source.map_or(0.0, |s| s.eval(xb, y, times[n]));
            let outward =
                (ub - ui) / dx + dx / (2.0 * c2) * (second_diff(n, iy) - c2 * dyy - f);
            samples.push(sign * outward);
        }
    }
    InterfaceTrace::new(TraceKind::Neumann, time, rows, samples).expect("flux layout")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zeros(time: &Arc<TimeGrid>, rows: usize) -> InterfaceTrace {
        InterfaceTrace::zeros(TraceKind::Dirichlet, time.clone(), rows)
    }

    #[test]
    fn ramp_is_exact_at_unit_cfl() {
        let grid = SpaceGrid1D::new(0.0, 4.0, 0.02).unwrap();
        let time = Arc::new(TimeGrid::uniform(2.0, 0.02).unwrap());
        let left = InterfaceTrace::from_fn(TraceKind::Dirichlet, time.clone(), 1, |t, _| t);
        let nx = grid.node_count();
        let f = solve_wave_subdomain(
            &grid, 1.0, &time, &vec![0.0; nx], &vec![0.0; nx], &left, &zeros(&time, 1), None,
        )
        .unwrap();
        let mut worst: f64 = 0.0;
        for (n, t) in time.times().iter().enumerate() {
            for (j, x) in grid.nodes().iter().enumerate() {
                worst = worst.max((f.value(n, j, 0) - (t - x).max(0.0)).abs());
            }
        }
        assert!(worst <= 1e-12, "ramp deviation {worst}");

        // oracle derivative of max(0, t - x) at x = 0 is -1 for t > 0
        let w = wave_interface_flux(&f, Side::Left, 1.0, None).unwrap();
        for n in 1..time.len() {
            assert!((w.value(n, 0) + 1.0).abs() < 1e-10, "n = {n}: {}", w.value(n, 0));
        }
    }

    #[test]
    fn zero_data_gives_zero() {
        let grid = SpaceGrid1D::new(0.0, 1.0, 0.1).unwrap();
        let time = Arc::new(TimeGrid::uniform(1.0, 0.05).unwrap());
        let f = solve_wave_subdomain(
            &grid, 1.0, &time, &[0.0; 11], &[0.0; 11], &zeros(&time, 1), &zeros(&time, 1), None,
        )
        .unwrap();
        assert!(f.values().iter().all(|v| *v == 0.0));
        let w = wave_interface_flux(&f, Side::Right, 1.0, None).unwrap();
        assert!(w.samples().iter().all(|v| *v == 0.0));
    }

    #[test]
    fn linear_steady_field_has_exact_flux() {
        let grid = SpaceGrid1D::new(0.0, 1.0, 0.1).unwrap();
        let time = Arc::new(TimeGrid::uniform(1.0, 0.05).unwrap());
        let u0 = grid.nodes();
        let right = InterfaceTrace::from_fn(TraceKind::Dirichlet, time.clone(), 1, |_, _| 1.0);
        let f = solve_wave_subdomain(
            &grid, 1.5, &time, &u0, &[0.0; 11], &zeros(&time, 1), &right, None,
        )
        .unwrap();
        for side in [Side::Left, Side::Right] {
            let w = wave_interface_flux(&f, side, 1.5, None).unwrap();
            assert!(w.samples().iter().all(|v| (v - 1.0).abs() < 1e-12));
        }
    }

    #[test]
    fn cfl_violation_rejected() {
        let grid = SpaceGrid1D::new(0.0, 1.0, 0.1).unwrap();
        let time = Arc::new(TimeGrid::uniform(1.0, 0.2).unwrap());
        let err = solve_wave_subdomain(
            &grid, 1.0, &time, &[0.0; 11], &[0.0; 11], &zeros(&time, 1), &zeros(&time, 1), None,
        );
        assert!(matches!(err, Err(WrError::CflViolation { .. })));
    }

    /// Discrete energy E^n over levels n, n+1, evaluated directly from the field.
    fn energy(f: &SpaceTimeField, c: f64, n: usize) -> f64 {
        let dt = f.time().step(n);
        let dx = f.space().dx();
        let nx = f.nx();
        let kinetic: f64 = (0..nx)
            .map(|j| ((f.value(n + 1, j, 0) - f.value(n, j, 0)) / dt).powi(2))
            .sum();
        let potential: f64 = (0..nx - 1)
            .map(|j| {
                (f.value(n, j + 1, 0) - f.value(n, j, 0)) / dx
                    * ((f.value(n + 1, j + 1, 0) - f.value(n + 1, j, 0)) / dx)
            })
            .sum();
        0.5 * kinetic + 0.5 * c * c * potential
    }

    #[test]
    fn standing_mode_conserves_discrete_energy() {
        let grid = SpaceGrid1D::new(0.0, 1.0, 0.02).unwrap();
        let time = Arc::new(TimeGrid::with_steps(1.0, 100));
        let nx = grid.node_count();
        let u0: Vec<f64> = grid.nodes().iter().map(|x| (std::f64::consts::PI * x).sin()).collect();
        let mut u0 = u0;
        u0[nx - 1] = 0.0;
        let f = solve_wave_subdomain(
            &grid, 1.0, &time, &u0, &vec![0.0; nx], &zeros(&time, 1), &zeros(&time, 1), None,
        )
        .unwrap();
        assert!((cfl_number(1.0, 0.02, 0.01, None) - 0.5).abs() < 1e-15);
        let e0 = energy(&f, 1.0, 0);
        for n in 1..100 {
            assert!((energy(&f, 1.0, n) - e0).abs() <= 1e-10 * e0.max(1.0), "step {n}");
        }
    }

    #[test]
    fn quadratic_in_time_is_exact_on_truncated_grid() {
        let grid = SpaceGrid1D::new(0.0, 1.0, 0.2).unwrap();
        let time = Arc::new(TimeGrid::truncated(2.0, 0.13).unwrap());
        assert!(!time.is_uniform());
        let bc = InterfaceTrace::from_fn(TraceKind::Dirichlet, time.clone(), 1, |t, _| t * t);
        let two = DataFn::new(|_, _, _| 2.0);
        let f = solve_wave_subdomain(
            &grid, 1.0, &time, &[0.0; 6], &[0.0; 6], &bc, &bc, Some(&two),
        )
        .unwrap();
        for (n, t) in time.times().iter().enumerate() {
            for j in 0..6 {
                assert!((f.value(n, j, 0) - t * t).abs() < 1e-12);
            }
        }
        let w = wave_interface_flux(&f, Side::Left, 1.0, Some(&two)).unwrap();
        assert!(w.samples().iter().all(|v| v.abs() < 1e-9));
    }

    #[test]
    fn strip_zero_data() {
        let strip = StripGrid::new(SpaceGrid1D::new(0.0, 0.4, 0.05).unwrap(), std::f64::consts::PI, 20);
        let time = Arc::new(TimeGrid::uniform(0.4, 0.04).unwrap());
        let size = strip.ny() * strip.x.node_count();
        let z = zeros(&time, strip.interior_rows());
        let f = solve_wave_strip_2d(
            &strip, 1.0, &time, &vec![0.0; size], &vec![0.0; size], &z, &z, None, None, None,
        )
        .unwrap();
        assert!(f.values().iter().all(|v| *v == 0.0));
    }

    /// Leapfrog for `U_tt = c² U_xx - c² λ U`, the 1D equation a single sine mode obeys.
    fn mode_oracle(nx: usize, dx: f64, dt: f64, steps: usize, lambda: f64, u0: &[f64], left: impl Fn(f64) -> f64) -> Vec<Vec<f64>> {
        let op = |u: &[f64], j: usize| (u[j - 1] - 2.0 * u[j] + u[j + 1]) / (dx * dx) - lambda * u[j];
        let mut levels = vec![u0.to_vec()];
        for n in 0..steps {
            let cur = &levels[n];
            let mut next = vec![0.0; nx];
            for j in 1..nx - 1 {
                next[j] = if n == 0 {
                    cur[j] + 0.5 * dt * dt * op(cur, j)
                } else {
                    2.0 * cur[j] - levels[n - 1][j] + dt * dt * op(cur, j)
                };
            }
            next[0] = left((n + 1) as f64 * dt);
            levels.push(next);
        }
        levels
    }

    #[test]
    fn strip_keeps_single_sine_mode() {
        let strip = StripGrid::new(SpaceGrid1D::new(0.0, 0.4, 0.05).unwrap(), std::f64::consts::PI, 20);
        let time = Arc::new(TimeGrid::uniform(1.2, 0.04).unwrap());
        let nx = strip.x.node_count();
        let ny = strip.ny();
        let shape: Vec<f64> = strip.x.nodes().iter().map(|x| x * (0.4 - x)).collect();
        let mut u0 = vec![0.0; nx * ny];
        for iy in 0..ny {
            for ix in 0..nx {
                u0[iy * nx + ix] = shape[ix] * strip.y(iy).sin();
            }
        }
        for ix in 0..nx {
            u0[(ny - 1) * nx + ix] = 0.0;
        }
        let rows = strip.interior_rows();
        let left = InterfaceTrace::from_fn(TraceKind::Dirichlet, time.clone(), rows, |t, r| {
            t * t * strip.y(r + 1).sin()
        });
        let right = zeros(&time, rows);
        let f = solve_wave_strip_2d(
            &strip, 1.0, &time, &u0, &vec![0.0; nx * ny], &left, &right, None, None, None,
        )
        .unwrap();
        let dy = strip.dy();
        let lambda = 4.0 / (dy * dy) * (0.5 * dy).sin().powi(2);
        let oracle = mode_oracle(nx, 0.05, 0.04, time.steps(), lambda, &shape, |t| t * t);
        let mut worst: f64 = 0.0;
        for n in 0..time.len() {
            for iy in 1..ny - 1 {
                let s = strip.y(iy).sin();
                for ix in 0..nx {
                    worst = worst.max((f.value(n, ix, iy) - oracle[n][ix] * s).abs());
                }
            }
        }
        assert!(worst <= 1e-12, "cross-mode residual {worst}");
    }
}
