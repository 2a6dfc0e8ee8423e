use crate::error::{Error, Result};

/// Thomas algorithm for `lower[i] x[i-1] + diag[i] x[i] + upper[i] x[i+1] = rhs[i]`.
///
/// `lower[0]` and `upper[m-1]` are ignored. No pivoting; the systems built by
/// the integrator are diagonally dominant under the step-size limit.
pub fn solve_tridiagonal(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &[f64]) -> Result<Vec<f64>> {
    let m = diag.len();
    if lower.len() != m || upper.len() != m || rhs.len() != m {
        return Err(Error::SolverFailure(format!(
            "band lengths {}/{}/{} and rhs {} do not match",
            lower.len(),
            m,
            upper.len(),
            rhs.len()
        )));
    }
    if m == 0 {
        return Ok(Vec::new());
    }
    let mut c = vec![0.0; m];
    let mut d = vec![0.0; m];
    let mut pivot = diag[0];
    check_pivot(pivot, 0)?;
    c[0] = upper[0] / pivot;
    d[0] = rhs[0] / pivot;
    for i in 1..m {
        pivot = diag[i] - lower[i] * c[i - 1];
        check_pivot(pivot, i)?;
        c[i] = upper[i] / pivot;
        d[i] = (rhs[i] - lower[i] * d[i - 1]) / pivot;
    }
    let mut x = d;
    for i in (0..m - 1).rev() {
        x[i] -= c[i] * x[i + 1];
    }
    Ok(x)
}

fn check_pivot(pivot: f64, row: usize) -> Result<()> {
    if pivot.abs() < 1e-300 || !pivot.is_finite() {
        return Err(Error::SolverFailure(format!("zero pivot at row {row}")));
    }
    Ok(())
}
