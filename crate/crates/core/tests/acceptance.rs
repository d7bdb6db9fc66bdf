//! Acceptance criteria. Runs without the libtest harness so that every criterion
//! prints exactly one PASS/FAIL line, in order.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use wrkit::bounds::{erfc, heat_bound_equal, wave_steps_needed};
use wrkit::grid::{InterfaceTrace, SpaceGrid1D, TimeGrid, TraceKind};
use wrkit::harness::{
    compare_methods, load_config, prepare, preset_spec, presets, run_experiment, run_method, ExperimentSpec,
};
use wrkit::kernels::{solve_wave_strip_2d, solve_wave_subdomain, SpaceTimeField, StripGrid};
use wrkit::methods::{ExecOrder, IterationHistory};
use wrkit::projection::{build_plan, project_trace};

type Check = fn() -> Result<String, String>;

struct Criterion {
    id: u32,
    name: &'static str,
    limit_secs: f64,
    check: Check,
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn spec(name: &str) -> ExperimentSpec {
    preset_spec(name).unwrap_or_else(|e| panic!("{name}: {e}"))
}

/// Runs exactly `iters` iterations unless the error becomes exactly zero first.
fn run_fixed(mut s: ExperimentSpec, iters: usize) -> IterationHistory {
    s.config.max_iters = iters;
    s.config.tol = f64::MIN_POSITIVE;
    run_experiment(&s).unwrap().history
}

fn error_after(h: &IterationHistory, k: usize) -> f64 {
    h.error_at(k.min(h.iterations())).unwrap()
}

fn timed<T>(limit: f64, what: &str, f: impl FnOnce() -> T) -> Result<T, String> {
    let start = Instant::now();
    let out = f();
    let secs = start.elapsed().as_secs_f64();
    ensure(secs < limit, || format!("{what} took {secs:.2}s, limit {limit}s"))?;
    Ok(out)
}

fn wave_two_step() -> Result<String, String> {
    let h = run_fixed(spec("fig_wave_twostep"), 2);
    let e1 = error_after(&h, 1);
    let e2 = error_after(&h, 2);
    ensure(e2 <= 1e-10, || format!("error at iteration 2 is {e2:e}"))?;
    Ok(format!("e0 {:e}, e1 {e1:e}, e2 {e2:e}", h.initial_error()))
}

fn wave_finite_steps() -> Result<String, String> {
    let s = spec("fig_wave_T5");
    let widths = prepare(&s).unwrap().widths;
    let needed = wave_steps_needed(s.t_end, &widths, &s.speeds, false).unwrap();
    ensure(needed == 11, || format!("wave_steps_needed = {needed}, expected 11"))?;
    let r = run_experiment(&s).unwrap();
    let h = &r.history;
    let at = h.iterations_to(1e-10);
    ensure(at.is_some_and(|k| k <= needed), || format!("reached 1e-10 at {at:?}"))?;
    let e5 = error_after(h, 5);
    ensure(h.iterations() >= 5 && e5 > 1e-6, || format!("error at iteration 5 is {e5:e}"))?;
    Ok(format!("converged at {}, error at 5 = {e5:e}", at.unwrap()))
}

fn heat_superlinear() -> Result<String, String> {
    let mut detail = Vec::new();
    for name in ["fig_heat_5sub_T0.2", "fig_heat_5sub_T2", "fig_heat_5sub_T8"] {
        let s = spec(name);
        let widths = prepare(&s).unwrap().widths;
        let r = timed(60.0, name, || run_experiment(&s).unwrap())?;
        let e0 = r.report.initial_max();
        let mut checked = 0;
        for (i, &e) in r.report.max.iter().enumerate() {
            if e < 1e-10 {
                break;
            }
            let k = (i + 1) as u32;
            let b = heat_bound_equal(&widths, s.nu, s.t_end, k).unwrap() * e0;
            ensure(e <= b, || format!("{name}: k = {k}, error {e:e} above bound {b:e}"))?;
            checked += 1;
        }
        ensure(r.report.converged_at.is_some(), || format!("{name} did not converge"))?;
        detail.push(format!("T={} {checked} rows", s.t_end));
    }
    Ok(detail.join(", "))
}

fn subdomain_degradation() -> Result<String, String> {
    let mut counts = Vec::new();
    for n in 3..=6 {
        let r = run_experiment(&spec(&format!("fig_heat_nsub{n}"))).unwrap();
        let k = r.report.iterations_to(1e-8).ok_or(format!("n = {n} did not reach 1e-8"))?;
        counts.push(k);
    }
    ensure(counts.windows(2).all(|w| w[0] <= w[1]), || format!("counts {counts:?}"))?;
    Ok(format!("iterations {counts:?} for n = 3..6"))
}

const FIXED_POINT_HEAT: &str = "\
name = fixed_point_heat
model = heat1d
interval = 0 1
subdomains = 3
dx = 0.03333333333333333
dt = 0.05
T = 1
initial = x5mx
left = t2
right = texp
guess = t2
max_iters = 60
tol = 1e-13
";

const FIXED_POINT_WAVE: &str = "\
name = fixed_point_wave
model = wave1d
interval = 0 1
subdomains = 3
c = 1
dx = 0.03333333333333333
dt = 0.025
T = 0.5
initial = x5mx
left = t2
right = t2exp
guess = t2
max_iters = 60
tol = 1e-13
";

fn fixed_point() -> Result<String, String> {
    let mut detail = Vec::new();
    for text in [FIXED_POINT_HEAT, FIXED_POINT_WAVE] {
        let s = load_config(text).unwrap();
        let p = prepare(&s).unwrap();
        ensure(p.model.space().node_count() == 31, || "expected 31 nodes".into())?;
        let h = run_method(&p, &s.config).unwrap();
        ensure(h.converged_at.is_some(), || format!("{} did not reach 1e-13", s.name))?;
        let glued = h.glued_solution(&p.model, &p.layout).unwrap();
        let mono = p.model.monodomain(p.layout.finest_grid()).unwrap();
        let d = glued.max_abs_diff(&mono).unwrap();
        ensure(d <= 1e-11, || format!("{}: glued vs monodomain {d:e}", s.name))?;
        detail.push(format!("{} {d:e} after {}", s.name, h.iterations()));
    }
    Ok(detail.join(", "))
}

fn theta_sweep() -> Result<String, String> {
    let thetas = [0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8];
    let mut detail = Vec::new();
    for name in ["fig_wave_T5", "fig_heat_5sub_T2"] {
        let base = spec(name);
        let counts: Vec<Option<usize>> = thetas
            .iter()
            .map(|&th| {
                let mut s = base.clone();
                s.config.theta = th;
                s.config.max_iters = 80;
                s.config.tol = 1e-8;
                run_experiment(&s).unwrap().report.iterations_to(1e-8)
            })
            .collect();
        let key = |c: &Option<usize>| c.unwrap_or(usize::MAX);
        let best = counts.iter().map(key).min().unwrap();
        ensure(key(&counts[3]) == best && best != usize::MAX, || format!("{name}: counts {counts:?}"))?;
        detail.push(format!("{name} {counts:?}"));
    }
    Ok(detail.join("; "))
}

fn wave2d_finite_steps() -> Result<String, String> {
    let h = run_fixed(spec("fig_wave2d_mode_T0.24"), 2);
    let e0 = h.initial_error();
    let e2 = error_after(&h, 2);
    ensure(e0 > 0.0 && e2 <= 1e-6 * e0, || format!("e0 {e0:e}, e2 {e2:e}"))?;
    Ok(format!("e0 {e0:e}, e2 {e2:e}"))
}

fn nonmatching_grids() -> Result<String, String> {
    let h = run_fixed(spec("fig_wave_nonmatching"), 3);
    let e0 = h.initial_error();
    let errs: Vec<String> = h.max_errors().iter().map(|e| format!("{e:.3e}")).collect();
    let e3 = error_after(&h, 3);
    ensure(e3 <= 1e-4 * e0, || format!("e0 {e0:.3e}, errors {errs:?}, ratio {:.3e}", e3 / e0))?;
    Ok(format!("e0 {e0:e}, e3 {e3:e}"))
}

fn method_ordering() -> Result<String, String> {
    let mut detail = Vec::new();
    for n in ["2sub", "3sub"] {
        let specs: Vec<_> = ["nnwr", "dnwr", "swr"]
            .iter()
            .map(|m| spec(&format!("cmp_wave2d_{n}_{m}")))
            .collect();
        ensure(specs[2].config.overlap_cells == 2, || "overlap must be 2 cells".into())?;
        let table = compare_methods(&specs).unwrap();
        let count = |m: &str| table.row(m).unwrap().iterations_to_tol.unwrap_or(usize::MAX);
        let (nn, dn, sw) = (count("nnwr"), count("dnwr"), count("swr-classical"));
        ensure(nn <= dn && dn <= sw && dn != usize::MAX, || format!("{n}: nnwr {nn}, dnwr {dn}, swr {sw}"))?;
        detail.push(format!("{n}: nnwr {nn} <= dnwr {dn} <= swr {sw}"));
    }
    Ok(detail.join(", "))
}

fn erfc_oracle() -> Result<usize, String> {
    let text = include_str!("oracles/erfc_values.txt");
    let mut n = 0;
    for line in text.lines().filter(|l| !l.trim().is_empty() && !l.starts_with('#')) {
        let mut it = line.split_whitespace().map(|v| v.parse::<f64>().unwrap());
        let (x, want) = (it.next().unwrap(), it.next().unwrap());
        let rel = ((erfc(x) - want) / want).abs();
        ensure(rel <= 1e-12, || format!("erfc({x}) relative error {rel:e}"))?;
        n += 1;
    }
    ensure(n == 50, || format!("oracle has {n} points"))?;
    Ok(n)
}

fn dirichlet(time: &Arc<TimeGrid>, f: impl Fn(f64) -> f64) -> InterfaceTrace {
    InterfaceTrace::from_fn(TraceKind::Dirichlet, time.clone(), 1, |t, _| f(t))
}

/// A pulse entering at the left end travels along characteristics exactly.
fn dalembert() -> Result<f64, String> {
    let grid = SpaceGrid1D::new(0.0, 2.0, 0.02).unwrap();
    let time = Arc::new(TimeGrid::uniform(1.5, 0.02).unwrap());
    let g = |t: f64| if t <= 0.0 { 0.0 } else { (5.0 * t).sin() * (1.0 - t.cos()) };
    let nx = grid.node_count();
    let zero = vec![0.0; nx];
    let f = solve_wave_subdomain(&grid, 1.0, &time, &zero, &zero, &dirichlet(&time, g), &dirichlet(&time, |_| 0.0), None)
        .unwrap();
    let mut worst: f64 = 0.0;
    for (n, t) in time.times().iter().enumerate() {
        for (j, x) in grid.nodes().iter().enumerate() {
            worst = worst.max((f.value(n, j, 0) - g(t - x)).abs());
        }
    }
    ensure(worst <= 1e-12, || format!("d'Alembert deviation {worst:e}"))?;
    Ok(worst)
}

fn energy(f: &SpaceTimeField, c: f64, n: usize) -> f64 {
    let dt = f.time().step(n);
    let dx = f.space().dx();
    let u = |m: usize, j: usize| f.value(m, j, 0);
    let kinetic: f64 = (0..f.nx()).map(|j| ((u(n + 1, j) - u(n, j)) / dt).powi(2)).sum();
    let potential: f64 = (0..f.nx() - 1)
        .map(|j| (u(n, j + 1) - u(n, j)) * (u(n + 1, j + 1) - u(n + 1, j)) / (dx * dx))
        .sum();
    0.5 * dx * (kinetic + c * c * potential)
}

fn energy_conservation() -> Result<f64, String> {
    let grid = SpaceGrid1D::new(0.0, 1.0, 0.01).unwrap();
    let time = Arc::new(TimeGrid::with_steps(2.0, 280));
    let c = 1.3;
    let mut u0: Vec<f64> = grid.nodes().iter().map(|x| (x * (1.0 - x)).powi(2) * (9.0 * x).sin()).collect();
    let last = u0.len() - 1;
    u0[last] = 0.0;
    let v0: Vec<f64> = grid.nodes().iter().map(|x| x * (1.0 - x)).collect();
    let zero = dirichlet(&time, |_| 0.0);
    let f = solve_wave_subdomain(&grid, c, &time, &u0, &v0, &zero, &zero, None).unwrap();
    let e0 = energy(&f, c, 0);
    let worst = (1..time.steps()).map(|n| (energy(&f, c, n) - e0).abs() / e0).fold(0.0, f64::max);
    ensure(worst <= 1e-10, || format!("relative energy drift {worst:e}"))?;
    Ok(worst)
}

/// A product of discrete sine modes in x and y only changes its amplitude.
fn sine_mode() -> Result<f64, String> {
    let (l, dx, dt, c) = (0.4, 0.05, 0.03, 1.0);
    let strip = StripGrid::new(SpaceGrid1D::new(0.0, l, dx).unwrap(), std::f64::consts::PI, 20);
    let time = Arc::new(TimeGrid::uniform(1.5, dt).unwrap());
    let (nx, ny) = (strip.x.node_count(), strip.ny());
    let kx = std::f64::consts::PI / l;
    let mut shape = vec![0.0; nx * ny];
    for iy in 1..ny - 1 {
        for ix in 1..nx - 1 {
            shape[iy * nx + ix] = (kx * strip.x.node(ix)).sin() * strip.y(iy).sin();
        }
    }
    let rows = strip.interior_rows();
    let zero = InterfaceTrace::zeros(TraceKind::Dirichlet, time.clone(), rows);
    let f = solve_wave_strip_2d(&strip, c, &time, &shape, &vec![0.0; nx * ny], &zero, &zero, None, None, None)
        .unwrap();
    let dy = strip.dy();
    let lambda = 4.0 / (dx * dx) * (0.5 * kx * dx).sin().powi(2) + 4.0 / (dy * dy) * (0.5 * dy).sin().powi(2);
    let r = (c * dt).powi(2) * lambda;
    let mut amp = vec![1.0, 1.0 - 0.5 * r];
    while amp.len() < time.len() {
        let n = amp.len();
        amp.push((2.0 - r) * amp[n - 1] - amp[n - 2]);
    }
    let mut worst: f64 = 0.0;
    for (n, a) in amp.iter().enumerate() {
        for iy in 0..ny {
            for ix in 0..nx {
                worst = worst.max((f.value(n, ix, iy) - a * shape[iy * nx + ix]).abs());
            }
        }
    }
    ensure(worst <= 1e-12, || format!("sine mode deviation {worst:e}"))?;
    Ok(worst)
}

fn random_trace(grid: &Arc<TimeGrid>, rows: usize, rng: &mut ChaCha8Rng) -> InterfaceTrace {
    let samples = (0..grid.len() * rows).map(|_| rng.gen_range(-5.0..5.0)).collect();
    InterfaceTrace::new(TraceKind::Dirichlet, grid.clone(), rows, samples).unwrap()
}

fn projection_properties() -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let grids: Vec<_> = [0.13, 0.039, 0.1, 0.02]
        .iter()
        .map(|dt| Arc::new(TimeGrid::truncated(2.0, *dt).unwrap()))
        .collect();
    for src in &grids {
        for dst in &grids {
            let plan = build_plan(src, dst).unwrap();
            for _ in 0..20 {
                let (a, b) = (random_trace(src, 3, &mut rng), random_trace(src, 3, &mut rng));
                let (alpha, beta) = (rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
                let mix: Vec<f64> =
                    a.samples().iter().zip(b.samples()).map(|(x, y)| alpha * x + beta * y).collect();
                let mix = InterfaceTrace::new(TraceKind::Dirichlet, src.clone(), 3, mix).unwrap();
                let (pa, pb, pm) = (
                    project_trace(&a, &plan).unwrap(),
                    project_trace(&b, &plan).unwrap(),
                    project_trace(&mix, &plan).unwrap(),
                );
                for i in 0..pm.samples().len() {
                    let want = alpha * pa.samples()[i] + beta * pb.samples()[i];
                    let got = pm.samples()[i];
                    ensure((got - want).abs() <= 1e-13 * (1.0 + want.abs()), || {
                        format!("projection not linear: {got} vs {want}")
                    })?;
                }
                for (n, &t) in dst.times().iter().enumerate() {
                    let hi = src.times().partition_point(|&s| s < t).min(src.len() - 1);
                    let lo = if src.times()[hi] <= t { hi } else { hi - 1 };
                    for row in 0..3 {
                        let (u, v) = (a.value(lo, row), a.value(hi, row));
                        let p = pa.value(n, row);
                        ensure(p >= u.min(v) - 1e-14 && p <= u.max(v) + 1e-14, || {
                            format!("overshoot at t = {t}: {p} outside [{u}, {v}]")
                        })?;
                    }
                }
            }
        }
    }
    Ok(())
}

fn same_bits(a: &IterationHistory, b: &IterationHistory) -> bool {
    let bits = |h: &IterationHistory| -> Vec<u64> {
        let mut v: Vec<u64> = h.errors.iter().flatten().map(|e| e.to_bits()).collect();
        for traces in h.dirichlet.iter().chain(&h.neumann) {
            for t in traces {
                v.extend(t.samples().iter().map(|x| x.to_bits()));
            }
        }
        for f in &h.fields {
            v.extend(f.values().iter().map(|x| x.to_bits()));
        }
        v
    };
    a.iterations() == b.iterations() && bits(a) == bits(b)
}

fn stage_determinism() -> Result<(), String> {
    for name in ["fig_wave2d_mode_T2", "cmp_wave2d_3sub_nnwr", "cmp_wave2d_3sub_swr", "fig_wave_nonmatching"] {
        let mut s = spec(name);
        s.config.max_iters = 6;
        let p = prepare(&s).unwrap();
        let base = run_method(&p, &s.config).unwrap();
        for (parallel, order) in [(false, ExecOrder::Forward), (true, ExecOrder::Reverse), (false, ExecOrder::Reverse)] {
            let mut cfg = s.config.clone();
            cfg.parallel = parallel;
            cfg.exec_order = order;
            let h = run_method(&p, &cfg).unwrap();
            ensure(same_bits(&base, &h), || format!("{name}: parallel {parallel}, {order:?} differs"))?;
        }
    }
    Ok(())
}

fn property_suites() -> Result<String, String> {
    let n = erfc_oracle()?;
    let d = dalembert()?;
    let e = energy_conservation()?;
    let m = sine_mode()?;
    projection_properties()?;
    stage_determinism()?;
    Ok(format!(
        "erfc {n} points, d'Alembert {d:e}, energy drift {e:e}, sine mode {m:e}, projection ok, bitwise ok"
    ))
}

/// Not a numbered criterion: every shipped run with a bound column must stay below it.
fn bound_overlay_dominates() -> Result<String, String> {
    let mut checked = 0;
    for p in presets() {
        let r = run_experiment(&spec(p.name)).unwrap();
        let Some(bound) = &r.report.bound else { continue };
        for (i, (e, b)) in r.report.max.iter().zip(bound).enumerate() {
            ensure(e <= b, || format!("{}: row {} error {e:e} above bound {b:e}", p.name, i + 1))?;
        }
        checked += 1;
    }
    Ok(format!("{checked} presets with a bound column"))
}

/// Not a numbered criterion: successive bound ratios shrink, and at k = 20 are at least
/// ten times below the first ratio for the five-subdomain heat runs.
fn bound_superlinearity() -> Result<String, String> {
    let widths = [1.0; 5];
    let mut detail = Vec::new();
    for t in [0.2, 2.0, 8.0] {
        let b = |k: u32| heat_bound_equal(&widths, 1.0, t, k).unwrap();
        // erfc underflows for large k at small T
        let ratios: Vec<f64> = (0..60).take_while(|&k| b(k + 1) > 1e-290).map(|k| b(k + 1) / b(k)).collect();
        ensure(ratios.windows(2).skip(1).all(|w| w[1] < w[0]), || format!("T = {t}: ratios not decreasing"))?;
        let gain = ratios[0] / ratios[20];
        detail.push(format!("T={t} gain {gain:.3e}"));
        ensure(gain >= 10.0, || format!("T = {t}: B(21)/B(20) only {gain:.3} times below B(1)/B(0)"))?;
    }
    Ok(detail.join(", "))
}

const CRITERIA: [Criterion; 12] = [
    Criterion { id: 1, name: "wave two-step convergence", limit_secs: 5.0, check: wave_two_step },
    Criterion { id: 2, name: "wave finite-step count", limit_secs: 30.0, check: wave_finite_steps },
    Criterion { id: 3, name: "heat superlinear bound", limit_secs: 180.0, check: heat_superlinear },
    Criterion { id: 4, name: "subdomain-count degradation", limit_secs: 120.0, check: subdomain_degradation },
    Criterion { id: 5, name: "fixed point equals monodomain", limit_secs: 5.0, check: fixed_point },
    Criterion { id: 6, name: "theta sweep optimum", limit_secs: 120.0, check: theta_sweep },
    Criterion { id: 7, name: "2D finite-step convergence", limit_secs: 60.0, check: wave2d_finite_steps },
    Criterion { id: 8, name: "non-matching time grids", limit_secs: 30.0, check: nonmatching_grids },
    Criterion { id: 9, name: "method ordering", limit_secs: 300.0, check: method_ordering },
    Criterion { id: 10, name: "property suites", limit_secs: 60.0, check: property_suites },
    Criterion { id: 0, name: "bound column dominates error", limit_secs: 60.0, check: bound_overlay_dominates },
    Criterion { id: 0, name: "bound ratios shrink by k = 20", limit_secs: 5.0, check: bound_superlinearity },
];

fn label(id: u32) -> String {
    match id {
        0 => "invariant   ".to_string(),
        n => format!("criterion {n:>2}"),
    }
}

fn main() -> ExitCode {
    std::panic::set_hook(Box::new(|_| {}));
    let mut failed = Vec::new();
    for c in &CRITERIA {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(c.check)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        let outcome = outcome.and_then(|d| {
            ensure(secs < c.limit_secs, || format!("{secs:.2}s over the {}s limit", c.limit_secs)).map(|_| d)
        });
        match outcome {
            Ok(d) => println!("{} PASS  {} ({secs:.2}s): {d}", label(c.id), c.name),
            Err(e) => {
                println!("{} FAIL  {} ({secs:.2}s): {e}", label(c.id), c.name);
                failed.push(match c.id {
                    0 => c.name.to_string(),
                    n => n.to_string(),
                });
            }
        }
    }
    if failed.is_empty() {
        println!("acceptance: all {} checks passed", CRITERIA.len());
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failed {}", failed.join("; "));
        ExitCode::FAILURE
    }
}
