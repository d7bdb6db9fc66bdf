//! Convergence estimates for DNWR and the complementary error function they use.

use crate::error::{Result, WrError};

const FRAC_2_SQRT_PI: f64 = std::f64::consts::FRAC_2_SQRT_PI;

/// Complementary error function, relative error below 1e-12 on `|x| <= 10`.
pub fn erfc(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x < 0.0 {
        return 2.0 - erfc(-x);
    }
    if x < 1.0 {
        1.0 - erf_series(x)
    } else {
        erfc_continued_fraction(x)
    }
}

/// Maclaurin series `2/√π Σ (-1)^n x^{2n+1} / (n! (2n+1))`.
fn erf_series(x: f64) -> f64 {
    let x2 = x * x;
    let mut power = x;
    let mut sum = x;
    for n in 1..200 {
        power *= -x2 / n as f64;
        let term = power / (2 * n + 1) as f64;
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    FRAC_2_SQRT_PI * sum
}

/// Laplace continued fraction `e^{-x²}/√π · 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + ...))))`,
/// evaluated with the modified Lentz method.
fn erfc_continued_fraction(x: f64) -> f64 {
    let tiny = 1e-300;
    let mut f = x;
    let mut c = x;
    let mut d = 0.0;
    for n in 1..5000 {
        let a = 0.5 * n as f64;
        d = x + a * d;
        if d.abs() < tiny {
            d = tiny;
        }
        c = x + a / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    0.5 * FRAC_2_SQRT_PI * (-x * x).exp() / f
}

/// Superlinear estimate for `2m+1` subdomains of arbitrary widths.
pub fn heat_bound_unequal(widths: &[f64], nu: f64, t_end: f64, k: u32) -> Result<f64> {
    let n = check_widths(widths, nu, t_end)?;
    if n % 2 == 0 {
        return Err(WrError::EvenCount);
    }
    let m = (n - 1) / 2;
    let (h_min, h_max) = extremes(widths);
    let mult = 2.0 * m as f64 - 3.0 + 2.0 * h_max / widths[m];
    Ok(power_times_erfc(mult, k, h_min, nu, t_end))
}

/// Estimate for an even count `2m+2`; the extra Neumann solve costs `2m - 1` instead of `2m - 3`.
pub fn heat_bound_even(widths: &[f64], nu: f64, t_end: f64, k: u32) -> Result<f64> {
    let n = check_widths(widths, nu, t_end)?;
    if n % 2 == 1 {
        return Err(WrError::OddCount);
    }
    let m = (n - 2) / 2;
    let (h_min, h_max) = extremes(widths);
    let mult = 2.0 * m as f64 - 1.0 + 2.0 * h_max / widths[m];
    Ok(power_times_erfc(mult, k, h_min, nu, t_end))
}

/// Sharper estimate for `2m+1` equal subdomains: multiplier `min{2m - 1, Q}`.
pub fn heat_bound_equal(widths: &[f64], nu: f64, t_end: f64, k: u32) -> Result<f64> {
    let n = check_widths(widths, nu, t_end)?;
    if n % 2 == 0 {
        return Err(WrError::EvenCount);
    }
    check_equal(widths)?;
    let h = extremes(widths).0;
    let m = (n - 1) / 2;
    let mult = equal_multiplier(m, h, nu, t_end)?;
    Ok(power_times_erfc(mult, k, h, nu, t_end))
}

/// `Q = 2 erfc(a) + Σ_{i≥0} 2^{i+1} erfc(i a)` with `a = h / (2√(νT))`.
pub fn q_series(h: f64, nu: f64, t_end: f64) -> Result<f64> {
    q_series_capped(h, nu, t_end, f64::INFINITY).map(|(q, _)| q)
}

/// Sums Q until the relative truncation criterion holds or the partial sum exceeds
/// `cap`; the flag reports the second case.
fn q_series_capped(h: f64, nu: f64, t_end: f64, cap: f64) -> Result<(f64, bool)> {
    const MAX_TERMS: usize = 400;
    let a = h / (2.0 * (nu * t_end).sqrt());
    let mut sum = 2.0 * erfc(a);
    let mut weight = 2.0;
    for i in 0..MAX_TERMS {
        let term = weight * erfc(i as f64 * a);
        sum += term;
        if sum > cap {
            return Ok((sum, true));
        }
        if term < 1e-16 * sum {
            return Ok((sum, false));
        }
        weight *= 2.0;
    }
    Err(WrError::QDiverged(MAX_TERMS))
}

fn equal_multiplier(m: usize, h: f64, nu: f64, t_end: f64) -> Result<f64> {
    let crude = 2.0 * m as f64 - 1.0;
    let (q, capped) = q_series_capped(h, nu, t_end, crude)?;
    Ok(if capped { crude } else { q.min(crude) })
}

/// Which of the two equal-width multipliers is smaller.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundRegion {
    MultiplierEstimate,
    QEstimate,
}

pub fn bound_region(m: usize, h: f64, nu: f64, t_end: f64) -> Result<BoundRegion> {
    let crude = 2.0 * m as f64 - 1.0;
    let (q, capped) = q_series_capped(h, nu, t_end, crude)?;
    Ok(if !capped && q < crude {
        BoundRegion::QEstimate
    } else {
        BoundRegion::MultiplierEstimate
    })
}

/// Iterations after which DNWR for the wave equation is exact:
/// `k + 1` for the smallest `k` with `T <= k · min(h_i / c_i)` (`<` when `strict`).
///
/// `speeds` holds one global speed or one per subdomain.
pub fn wave_steps_needed(t_end: f64, widths: &[f64], speeds: &[f64], strict: bool) -> Result<usize> {
    if !(t_end > 0.0) || widths.is_empty() || widths.iter().any(|h| !(*h > 0.0)) {
        return Err(WrError::InvalidParameter("window and widths must be positive".into()));
    }
    if speeds.iter().any(|c| !(*c > 0.0)) || !(speeds.len() == 1 || speeds.len() == widths.len()) {
        return Err(WrError::InvalidParameter(
            "give one positive speed or one per subdomain".into(),
        ));
    }
    let crossing = widths
        .iter()
        .enumerate()
        .map(|(i, h)| h / speeds[if speeds.len() == 1 { 0 } else { i }])
        .fold(f64::INFINITY, f64::min);
    let ratio = t_end / crossing;
    let k = if strict {
        (ratio + 1e-12).floor() + 1.0
    } else {
        (ratio - 1e-12).ceil().max(1.0)
    };
    Ok(k as usize + 1)
}

/// True when per-subdomain speeds differ, i.e. the step count is outside the proven regime.
pub fn wave_steps_heuristic(speeds: &[f64]) -> bool {
    speeds.windows(2).any(|w| w[0] != w[1])
}

/// Which estimate a curve evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundKind {
    HeatUnequal,
    HeatEven,
    HeatEqual,
}

impl BoundKind {
    pub fn tag(self) -> &'static str {
        match self {
            BoundKind::HeatUnequal => "heat-unequal",
            BoundKind::HeatEven => "heat-even",
            BoundKind::HeatEqual => "heat-equal",
        }
    }
}

/// Bound values `B(0..=k_max)` relative to the initial error.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundCurve {
    pub kind: BoundKind,
    pub ks: Vec<u32>,
    pub values: Vec<f64>,
}

impl BoundCurve {
    pub fn evaluate(kind: BoundKind, widths: &[f64], nu: f64, t_end: f64, k_max: u32) -> Result<Self> {
        let f = match kind {
            BoundKind::HeatUnequal => heat_bound_unequal,
            BoundKind::HeatEven => heat_bound_even,
            BoundKind::HeatEqual => heat_bound_equal,
        };
        let ks: Vec<u32> = (0..=k_max).collect();
        let values = ks
            .iter()
            .map(|&k| f(widths, nu, t_end, k))
            .collect::<Result<_>>()?;
        Ok(Self { kind, ks, values })
    }

    pub fn value(&self, k: usize) -> Option<f64> {
        self.values.get(k).copied()
    }
}

fn power_times_erfc(mult: f64, k: u32, h: f64, nu: f64, t_end: f64) -> f64 {
    if k == 0 {
        return 1.0;
    }
    mult.powi(k as i32) * erfc(k as f64 * h / (2.0 * (nu * t_end).sqrt()))
}

fn check_widths(widths: &[f64], nu: f64, t_end: f64) -> Result<usize> {
    if widths.len() < 2 {
        return Err(WrError::TooFewSubdomains(widths.len()));
    }
    if widths.iter().any(|h| !(*h > 0.0)) || !(nu > 0.0) || !(t_end > 0.0) {
        return Err(WrError::InvalidParameter(
            "widths, diffusivity and window must be positive".into(),
        ));
    }
    Ok(widths.len())
}

fn check_equal(widths: &[f64]) -> Result<()> {
    let mean = widths.iter().sum::<f64>() / widths.len() as f64;
    if widths.iter().any(|h| (h - mean).abs() > 1e-9 * mean) {
        return Err(WrError::UnequalWidths);
    }
    Ok(())
}

fn extremes(widths: &[f64]) -> (f64, f64) {
    widths
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), h| (lo.min(*h), hi.max(*h)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn erfc_examples() {
        assert_eq!(erfc(0.0), 1.0);
        assert!((erfc(-0.7) - (2.0 - erfc(0.7))).abs() < 1e-15);
        assert!((erfc(0.353553) - 0.617075).abs() < 5e-7);
    }

    #[test]
    fn erfc_matches_high_precision_table() {
        let table = include_str!("../tests/oracles/erfc_values.txt");
        let mut count = 0;
        for line in table.lines() {
            let mut it = line.split_whitespace();
            let x: f64 = it.next().unwrap().parse().unwrap();
            let want: f64 = it.next().unwrap().parse().unwrap();
            let rel = ((erfc(x) - want) / want).abs();
            assert!(rel <= 1e-12, "erfc({x}): relative error {rel:e}");
            count += 1;
        }
        assert_eq!(count, 50);
    }

    #[test]
    fn erfc_is_decreasing_and_reflects() {
        let mut prev = erfc(-6.0);
        for i in -599..=1000 {
            let x = i as f64 * 0.01;
            let v = erfc(x);
            // near -6 the values sit within an ulp of 2
            if x > -4.0 {
                assert!(v < prev, "not decreasing at {x}");
            } else {
                assert!(v <= prev, "increasing at {x}");
            }
            assert!((erfc(x) - (2.0 - erfc(-x))).abs() <= 1e-13);
            prev = v;
        }
    }

    #[test]
    fn unequal_examples() {
        let eq = [1.0; 5];
        assert_eq!(heat_bound_unequal(&eq, 1.0, 2.0, 0).unwrap(), 1.0);
        let b = heat_bound_unequal(&eq, 1.0, 2.0, 1).unwrap();
        assert!((b - 3.0 * erfc(1.0 / (2.0 * 2f64.sqrt()))).abs() < 1e-14);
        assert!((b - 1.851).abs() < 1e-3);
        let b = heat_bound_unequal(&[1.0, 0.5, 1.5, 1.0, 1.0], 1.0, 2.0, 2).unwrap();
        assert!((b - 9.0 * erfc(0.5 / 2f64.sqrt())).abs() < 1e-13);
        assert!((b - 5.554).abs() < 1e-3);
        assert_eq!(heat_bound_unequal(&[1.0; 4], 1.0, 2.0, 1), Err(WrError::EvenCount));
    }

    #[test]
    fn even_examples() {
        assert_eq!(heat_bound_even(&[1.0; 4], 1.0, 2.0, 0).unwrap(), 1.0);
        let b = heat_bound_even(&[1.0; 4], 1.0, 2.0, 1).unwrap();
        assert!((b - 1.851).abs() < 1e-3);
        let b = heat_bound_even(&[1.0; 6], 1.0, 2.0, 1).unwrap();
        assert!((b - 5.0 * erfc(1.0 / (2.0 * 2f64.sqrt()))).abs() < 1e-14);
        assert_eq!(heat_bound_even(&[1.0; 5], 1.0, 2.0, 1), Err(WrError::OddCount));
    }

    #[test]
    fn equal_examples() {
        assert_eq!(heat_bound_equal(&[1.0; 5], 1.0, 0.2, 0).unwrap(), 1.0);
        let q = q_series(1.0, 1.0, 0.2).unwrap();
        assert!((q - 2.695).abs() < 1e-3, "Q = {q}");
        let b = heat_bound_equal(&[1.0; 5], 1.0, 0.2, 2).unwrap();
        assert!((b - q * q * erfc(2.0 / (2.0 * 0.2f64.sqrt()))).abs() < 1e-14);
        assert!(q_series(1.0, 1.0, 100.0).unwrap() > 3.0);
        let b = heat_bound_equal(&[1.0; 5], 1.0, 100.0, 3).unwrap();
        assert!((b - 27.0 * erfc(3.0 / 20.0)).abs() < 1e-12);
        assert_eq!(
            heat_bound_equal(&[1.0, 0.5, 1.5, 1.0, 1.0], 1.0, 2.0, 1),
            Err(WrError::UnequalWidths)
        );
    }

    #[test]
    fn equal_never_exceeds_unequal() {
        for t in [0.05, 0.2, 1.0, 2.0, 8.0, 50.0] {
            for n in [3usize, 5, 7, 9] {
                let w = vec![0.8; n];
                for k in 0..30 {
                    let a = heat_bound_equal(&w, 1.0, t, k).unwrap();
                    let b = heat_bound_unequal(&w, 1.0, t, k).unwrap();
                    assert!(a <= b * (1.0 + 1e-14), "T = {t}, n = {n}, k = {k}");
                }
            }
        }
    }

    #[test]
    fn region_examples() {
        assert_eq!(bound_region(2, 1.0, 1.0, 0.2).unwrap(), BoundRegion::QEstimate);
        assert_eq!(bound_region(2, 1.0, 1.0, 100.0).unwrap(), BoundRegion::MultiplierEstimate);
        assert_eq!(bound_region(50, 1.0, 1.0, 2.0).unwrap(), BoundRegion::QEstimate);
    }

    #[test]
    fn wave_step_examples() {
        let w = [1.0, 0.5, 1.5, 1.0, 1.0];
        assert_eq!(wave_steps_needed(0.5, &w, &[1.0], false).unwrap(), 2);
        assert_eq!(wave_steps_needed(5.0, &w, &[1.0], false).unwrap(), 11);
        assert_eq!(wave_steps_needed(2.0, &[2.0; 3], &[0.25, 2.0, 0.5], false).unwrap(), 3);
        assert!(wave_steps_heuristic(&[0.25, 2.0, 0.5]));
        // strict inequality in 2D
        assert_eq!(wave_steps_needed(0.24, &[0.4, 0.35, 0.25], &[1.0], true).unwrap(), 2);
        assert_eq!(wave_steps_needed(0.25, &[0.4, 0.35, 0.25], &[1.0], true).unwrap(), 3);
        assert_eq!(wave_steps_needed(0.25, &[0.4, 0.35, 0.25], &[1.0], false).unwrap(), 2);
    }

    #[test]
    fn wave_steps_monotone() {
        let mut prev = 0;
        for i in 1..200 {
            let k = wave_steps_needed(i as f64 * 0.05, &[0.5, 1.0], &[1.0], false).unwrap();
            assert!(k >= prev);
            prev = k;
        }
        let mut prev = usize::MAX;
        for i in 1..100 {
            let k = wave_steps_needed(3.0, &[i as f64 * 0.02, 2.0], &[1.0], false).unwrap();
            assert!(k <= prev);
            prev = k;
        }
    }

    #[test]
    fn curves_start_at_one() {
        let c = BoundCurve::evaluate(BoundKind::HeatEqual, &[1.0; 5], 1.0, 2.0, 25).unwrap();
        assert_eq!(c.value(0), Some(1.0));
        assert!(c.values.iter().all(|v| *v >= 0.0));
        assert_eq!(c.ks.len(), 26);
    }
}
