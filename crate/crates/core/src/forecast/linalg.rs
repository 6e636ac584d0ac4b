//! Small dense least-squares helpers.
//!
//! Every design matrix in this crate has at most a few dozen columns, so
//! ordinary least squares goes through the normal equations with Gaussian
//! elimination — no external linear algebra dependency.

/// Marker for an (effectively) singular system.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Singular;

/// Solves `a x = b` in place by Gaussian elimination with partial pivoting.
pub(crate) fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Result<Vec<f64>, Singular> {
    let n = a.len();
    debug_assert!(a.iter().all(|row| row.len() == n) && b.len() == n);

    let scale = a
        .iter()
        .flat_map(|row| row.iter())
        .fold(0.0f64, |acc, v| acc.max(v.abs()));
    let tol = (scale * 1e-12).max(1e-300);

    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap())
            .unwrap();
        if a[pivot][col].abs() < tol {
            return Err(Singular);
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let factor = a[row][col] / a[col][col];
            if factor == 0.0 {
                continue;
            }
            for k in col..n {
                a[row][k] -= factor * a[col][k];
            }
            b[row] -= factor * b[col];
        }
    }

    let mut x = vec![0.0; n];
    for col in (0..n).rev() {
        let mut acc = b[col];
        for k in col + 1..n {
            acc -= a[col][k] * x[k];
        }
        x[col] = acc / a[col][col];
    }
    Ok(x)
}

/// An OLS fit: coefficients in design-column order plus the residual sum of
/// squares over the `n_rows` observations.
#[derive(Debug, Clone)]
pub(crate) struct OlsFit {
    pub coef: Vec<f64>,
    pub sse: f64,
    pub n_rows: usize,
}

/// Least-squares fit of `y` on the design `rows` (one Vec per observation).
pub(crate) fn ols(rows: &[Vec<f64>], y: &[f64]) -> Result<OlsFit, Singular> {
    debug_assert_eq!(rows.len(), y.len());
    let n = rows.len();
    let k = rows.first().map_or(0, |r| r.len());
    if n == 0 || k == 0 || n < k {
        return Err(Singular);
    }

    // Normal equations: (X'X) beta = X'y.
    let mut xtx = vec![vec![0.0; k]; k];
    let mut xty = vec![0.0; k];
    for (row, &yi) in rows.iter().zip(y) {
        for i in 0..k {
            xty[i] += row[i] * yi;
            for j in i..k {
                xtx[i][j] += row[i] * row[j];
            }
        }
    }
    for i in 0..k {
        for j in 0..i {
            xtx[i][j] = xtx[j][i];
        }
    }

    let coef = solve(xtx, xty)?;
    let mut sse = 0.0;
    for (row, &yi) in rows.iter().zip(y) {
        let fit: f64 = row.iter().zip(&coef).map(|(x, c)| x * c).sum();
        let e = yi - fit;
        sse += e * e;
    }
    Ok(OlsFit { coef, sse, n_rows: n })
}

/// Standard error of coefficient `idx`: `sqrt(sse / (n - k) * inv(X'X)[idx][idx])`.
pub(crate) fn coefficient_se(rows: &[Vec<f64>], sse: f64, idx: usize) -> Result<f64, Singular> {
    let n = rows.len();
    let k = rows.first().map_or(0, |r| r.len());
    if n <= k || idx >= k {
        return Err(Singular);
    }

    let mut xtx = vec![vec![0.0; k]; k];
    for row in rows {
        for i in 0..k {
            for j in i..k {
                xtx[i][j] += row[i] * row[j];
            }
        }
    }
    for i in 0..k {
        for j in 0..i {
            xtx[i][j] = xtx[j][i];
        }
    }

    // Column `idx` of inv(X'X) via one solve against a unit vector.
    let mut unit = vec![0.0; k];
    unit[idx] = 1.0;
    let inv_col = solve(xtx, unit)?;
    let sigma2 = sse / (n - k) as f64;
    let var = sigma2 * inv_col[idx];
    if var < 0.0 || !var.is_finite() {
        return Err(Singular);
    }
    Ok(var.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn solve_recovers_known_solution() {
        let a = vec![vec![2.0, 1.0], vec![1.0, 3.0]];
        let b = vec![5.0, 10.0];
        let x = solve(a, b).unwrap();
        assert_relative_eq!(x[0], 1.0, epsilon = 1e-12);
        assert_relative_eq!(x[1], 3.0, epsilon = 1e-12);
    }

    #[test]
    fn solve_detects_singularity() {
        let a = vec![vec![1.0, 2.0], vec![2.0, 4.0]];
        assert_eq!(solve(a, vec![1.0, 2.0]), Err(Singular));
    }

    #[test]
    fn ols_fits_exact_line() {
        // y = 3 + 2x, noiseless.
        let rows: Vec<Vec<f64>> = (0..10).map(|i| vec![1.0, i as f64]).collect();
        let y: Vec<f64> = (0..10).map(|i| 3.0 + 2.0 * i as f64).collect();
        let fit = ols(&rows, &y).unwrap();
        assert_relative_eq!(fit.coef[0], 3.0, epsilon = 1e-10);
        assert_relative_eq!(fit.coef[1], 2.0, epsilon = 1e-10);
        assert!(fit.sse < 1e-18);
    }

    #[test]
    fn ols_rejects_constant_regressor_pair() {
        let rows: Vec<Vec<f64>> = (0..5).map(|_| vec![1.0, 4.0]).collect();
        let y = vec![1.0, 2.0, 3.0, 4.0, 5.0];
        assert!(ols(&rows, &y).is_err());
    }

    #[test]
    fn coefficient_se_matches_hand_computation() {
        // Simple regression of y on (1, x): Var(b1) = sigma2 / Sxx.
        let xs = [0.0, 1.0, 2.0, 3.0, 4.0];
        let rows: Vec<Vec<f64>> = xs.iter().map(|&x| vec![1.0, x]).collect();
        let y = vec![0.1, 1.0, 2.2, 2.9, 4.1];
        let fit = ols(&rows, &y).unwrap();
        let se = coefficient_se(&rows, fit.sse, 1).unwrap();

        let mean_x = 2.0;
        let sxx: f64 = xs.iter().map(|x| (x - mean_x).powi(2)).sum();
        let sigma2 = fit.sse / (5 - 2) as f64;
        assert_relative_eq!(se, (sigma2 / sxx).sqrt(), epsilon = 1e-10);
    }
}
