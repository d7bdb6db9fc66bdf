use super::config::{load_config, ExperimentSpec};
use super::HarnessError;

/// A shipped experiment: shared config lines, per-preset lines and a wall-clock
/// budget in seconds.
#[derive(Debug, Clone, Copy)]
pub struct Preset {
    pub name: &'static str,
    pub budget_secs: f64,
    base: &'static str,
    extra: &'static str,
}

impl Preset {
    pub fn text(&self) -> String {
        format!("name = {}\n{}{}", self.name, self.base, self.extra)
    }
}

const HEAT_5SUB: &str = "\
model = heat1d
interval = 0 5
subdomains = 5
nu = 1
dx = 0.02
dt = 0.004
initial = x5mx
left = t2
right = texp
method = dnwr
theta = 0.5
arrangement = A3
guess = t2
max_iters = 40
tol = 1e-10
";

const HEAT_NSUB: &str = "\
model = heat1d
interval = 0 5
nu = 1
dx = 0.02
dt = 0.004
T = 2
initial = x5mx
left = t2
right = texp
method = dnwr
theta = 0.5
arrangement = A3
guess = t2
max_iters = 60
tol = 1e-8
";

const WAVE_5SUB: &str = "\
model = wave1d
interval = 0 5
partition = 0 1 1.5 3 4 5
c = 1
dx = 0.02
dt = 0.02
initial = zero
initial_rate = zero
left = t2
right = t2exp
method = dnwr
theta = 0.5
arrangement = A3
guess = t2
tol = 1e-10
";

const WAVE2D_MODE: &str = "\
model = wave2d
interval = 0 1
partition = 0 0.4 0.75 1
y_end = pi
dy = 0.16
c = 1
dx = 0.05
dt = 0.04
initial = mode2d
method = dnwr
theta = 0.5
arrangement = A3
guess = tsin
max_iters = 20
tol = 1e-10
";

const WAVE2D_COMPARE: &str = "\
model = wave2d
interval = 0 1
y_end = pi
dy = 0.16
c = 1
dx = 0.05
dt = 0.04
T = 2
left = t2siny
right = yypit3
guess = random
seed = 7
max_iters = 60
tol = 1e-6
overlap_cells = 2
";

macro_rules! preset {
    ($name:literal, $budget:expr, $base:expr, $extra:literal) => {
        Preset { name: $name, budget_secs: $budget, base: $base, extra: $extra }
    };
}

static PRESETS: &[Preset] = &[
    preset!("fig_heat_5sub_T0.2", 20.0, HEAT_5SUB, "T = 0.2\n"),
    preset!("fig_heat_5sub_T2", 30.0, HEAT_5SUB, "T = 2\n"),
    preset!(
        "fig_heat_5sub_T8",
        60.0,
        HEAT_5SUB,
        "T = 8\nnote = grid steps for T = 8 assumed equal to those of the T = 2 run\n"
    ),
    preset!("fig_heat_nsub3", 30.0, HEAT_NSUB, "subdomains = 3\n"),
    preset!("fig_heat_nsub4", 30.0, HEAT_NSUB, "subdomains = 4\n"),
    preset!("fig_heat_nsub5", 30.0, HEAT_NSUB, "subdomains = 5\n"),
    preset!("fig_heat_nsub6", 30.0, HEAT_NSUB, "subdomains = 6\n"),
    preset!("fig_wave_twostep", 5.0, WAVE_5SUB, "T = 0.5\nmax_iters = 10\n"),
    preset!("fig_wave_T5", 30.0, WAVE_5SUB, "T = 5\nmax_iters = 20\n"),
    preset!("fig_wave2d_mode_T0.24", 20.0, WAVE2D_MODE, "T = 0.24\n"),
    preset!("fig_wave2d_mode_T2", 30.0, WAVE2D_MODE, "T = 2\n"),
    preset!(
        "fig_wave2d_mode_T2_fluxguess",
        30.0,
        WAVE2D_MODE,
        "T = 2\nguess_reading = neumann\n"
    ),
    preset!(
        "fig_wave_nonmatching",
        30.0,
        "\
model = wave1d
interval = 0 6
subdomains = 3
c = 0.25 2 0.5
dx = 0.1
dt = 0.13 0.039 0.1
T = 2
left = t2
right = t3
method = dnwr
theta = 0.5
arrangement = A3
guess = random
seed = 1
max_iters = 20
tol = 1e-10
",
        ""
    ),
    preset!("cmp_wave2d_2sub_dnwr", 60.0, WAVE2D_COMPARE, "partition = 0 0.6 1\nmethod = dnwr\ntheta = 0.5\n"),
    preset!("cmp_wave2d_2sub_nnwr", 60.0, WAVE2D_COMPARE, "partition = 0 0.6 1\nmethod = nnwr\ntheta = 0.25\n"),
    preset!("cmp_wave2d_2sub_swr", 60.0, WAVE2D_COMPARE, "partition = 0 0.6 1\nmethod = swr-classical\ntheta = 0.5\n"),
    preset!("cmp_wave2d_3sub_dnwr", 60.0, WAVE2D_COMPARE, "partition = 0 0.4 0.75 1\nmethod = dnwr\ntheta = 0.5\n"),
    preset!("cmp_wave2d_3sub_nnwr", 60.0, WAVE2D_COMPARE, "partition = 0 0.4 0.75 1\nmethod = nnwr\ntheta = 0.25\n"),
    preset!(
        "cmp_wave2d_3sub_swr",
        60.0,
        WAVE2D_COMPARE,
        "partition = 0 0.4 0.75 1\nmethod = swr-classical\ntheta = 0.5\n"
    ),
    preset!(
        "zero_smoke",
        2.0,
        "\
model = heat1d
interval = 0 1
subdomains = 3
dx = 0.05
dt = 0.05
T = 1
guess = zero
",
        ""
    ),
];

pub fn presets() -> &'static [Preset] {
    PRESETS
}

pub fn find_preset(name: &str) -> Result<&'static Preset, HarnessError> {
    PRESETS
        .iter()
        .find(|p| p.name == name)
        .ok_or_else(|| HarnessError::UnknownPreset(name.to_string()))
}

pub fn preset_spec(name: &str) -> Result<ExperimentSpec, HarnessError> {
    load_config(&find_preset(name)?.text())
}
