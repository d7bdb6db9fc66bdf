use std::f64::consts::PI;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::data::DataFn;
use crate::error::Result;
use crate::grid::{InterfaceTrace, TimeGrid, TraceKind};

/// Named data functions of `(x, y, t)` usable in experiment configs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DataId {
    Zero,
    /// `t²`
    T2,
    /// `t·e^{-t}`
    TExp,
    /// `t²·e^{-t}`
    T2Exp,
    /// `t³`
    T3,
    /// `x(5 - x)`
    X5mx,
    /// `xy(x - 1)(y - π)(5x - 2)(4x - 3)`
    Mode2d,
    /// `t²·sin y`
    T2Siny,
    /// `y(y - π)·t³`
    YYpiT3,
    /// `t·sin y`
    TSiny,
}

pub const DATA_IDS: [DataId; 10] = [
    DataId::Zero,
    DataId::T2,
    DataId::TExp,
    DataId::T2Exp,
    DataId::T3,
    DataId::X5mx,
    DataId::Mode2d,
    DataId::T2Siny,
    DataId::YYpiT3,
    DataId::TSiny,
];

impl DataId {
    pub fn id(self) -> &'static str {
        match self {
            DataId::Zero => "zero",
            DataId::T2 => "t2",
            DataId::TExp => "texp",
            DataId::T2Exp => "t2exp",
            DataId::T3 => "t3",
            DataId::X5mx => "x5mx",
            DataId::Mode2d => "mode2d",
            DataId::T2Siny => "t2siny",
            DataId::YYpiT3 => "yypit3",
            DataId::TSiny => "tsiny",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        DATA_IDS.iter().copied().find(|d| d.id() == s)
    }

    pub fn eval(self, x: f64, y: f64, t: f64) -> f64 {
        match self {
            DataId::Zero => 0.0,
            DataId::T2 => t * t,
            DataId::TExp => t * (-t).exp(),
            DataId::T2Exp => t * t * (-t).exp(),
            DataId::T3 => t * t * t,
            DataId::X5mx => x * (5.0 - x),
            DataId::Mode2d => x * y * (x - 1.0) * (y - PI) * (5.0 * x - 2.0) * (4.0 * x - 3.0),
            DataId::T2Siny => t * t * y.sin(),
            DataId::YYpiT3 => y * (y - PI) * t * t * t,
            DataId::TSiny => t * y.sin(),
        }
    }

    pub fn is_zero(self) -> bool {
        self == DataId::Zero
    }

    pub fn to_fn(self) -> DataFn {
        DataFn::new(move |x, y, t| self.eval(x, y, t))
    }
}

/// Initial interface guesses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GuessPreset {
    T2,
    T2Exp,
    /// `t·sin y` on the interior y-rows; two-dimensional models only.
    TSin,
    /// Seeded uniform values in `[-1, 1]`, zero at `t = 0`.
    Random,
    Zero,
}

impl GuessPreset {
    pub fn id(self) -> &'static str {
        match self {
            GuessPreset::T2 => "t2",
            GuessPreset::T2Exp => "t2exp",
            GuessPreset::TSin => "tsin",
            GuessPreset::Random => "random",
            GuessPreset::Zero => "zero",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [
            GuessPreset::T2,
            GuessPreset::T2Exp,
            GuessPreset::TSin,
            GuessPreset::Random,
            GuessPreset::Zero,
        ]
        .into_iter()
        .find(|g| g.id() == s)
    }
}

/// How a 2D guess written as `w` is read: as Dirichlet values or as fluxes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GuessReading {
    #[default]
    Dirichlet,
    Neumann,
}

impl GuessReading {
    pub fn id(self) -> &'static str {
        match self {
            GuessReading::Dirichlet => "dirichlet",
            GuessReading::Neumann => "neumann",
        }
    }
}

/// One trace per interface. `row_y` maps a trace row to its `y`.
pub fn make_guesses(
    preset: GuessPreset,
    interfaces: usize,
    grid: &Arc<TimeGrid>,
    rows: usize,
    row_y: impl Fn(usize) -> f64,
    seed: u64,
) -> Result<Vec<InterfaceTrace>> {
    let kind = TraceKind::Dirichlet;
    match preset {
        GuessPreset::Random => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..interfaces)
                .map(|_| {
                    let mut samples = vec![0.0; grid.len() * rows];
                    for v in samples.iter_mut().skip(rows) {
                        *v = rng.gen_range(-1.0..=1.0);
                    }
                    InterfaceTrace::new(kind, grid.clone(), rows, samples)
                })
                .collect()
        }
        _ => {
            let f = |t: f64, r: usize| match preset {
                GuessPreset::T2 => t * t,
                GuessPreset::T2Exp => t * t * (-t).exp(),
                GuessPreset::TSin => t * row_y(r).sin(),
                _ => 0.0,
            };
            Ok((0..interfaces)
                .map(|_| InterfaceTrace::from_fn(kind, grid.clone(), rows, f))
                .collect())
        }
    }
}
