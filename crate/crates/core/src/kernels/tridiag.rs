use crate::error::{Result, WrError};

/// Solves a tridiagonal system by forward elimination and back substitution.
///
/// `lower[i]` multiplies `x[i - 1]` in row `i` (entry 0 unused), `upper[i]`
/// multiplies `x[i + 1]` (last entry unused). No pivoting is done; the heat
/// matrices built here are diagonally dominant.
pub fn solve_tridiagonal(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &mut [f64]) -> Result<()> {
    let n = diag.len();
    debug_assert!(lower.len() == n && upper.len() == n && rhs.len() == n);
    let mut c = vec![0.0; n];
    let mut beta = diag[0];
    if beta.abs() < f64::MIN_POSITIVE {
        return Err(WrError::SingularSystem);
    }
    rhs[0] /= beta;
    for i in 1..n {
        c[i - 1] = upper[i - 1] / beta;
        beta = diag[i] - lower[i] * c[i - 1];
        if beta.abs() < f64::MIN_POSITIVE {
            return Err(WrError::SingularSystem);
        }
        rhs[i] = (rhs[i] - lower[i] * rhs[i - 1]) / beta;
    }
    for i in (0..n - 1).rev() {
        rhs[i] -= c[i] * rhs[i + 1];
    }
    Ok(())
}
