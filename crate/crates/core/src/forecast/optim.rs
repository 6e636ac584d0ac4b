//! Derivative-free minimization via the Nelder–Mead simplex method, used to
//! fit ARIMA coefficients by conditional sum of squares.

/// Outcome of a minimization run.
#[derive(Debug, Clone)]
pub(crate) struct MinimizeOutcome {
    pub x: Vec<f64>,
    pub value: f64,
    pub converged: bool,
}

/// Minimizes `f` starting from `start` with the standard Nelder–Mead
/// coefficients (reflect 1, expand 2, contract 0.5, shrink 0.5).
///
/// Convergence is declared when the simplex's value spread falls below
/// `tol * (1 + |f_best|)`. The objective may return non-finite values for
/// wild parameter regions; they are treated as +inf so the simplex backs off.
pub(crate) fn minimize(
    f: impl Fn(&[f64]) -> f64,
    start: &[f64],
    max_iters: usize,
    tol: f64,
) -> MinimizeOutcome {
    let dim = start.len();
    debug_assert!(dim > 0);
    let eval = |x: &[f64]| {
        let v = f(x);
        if v.is_finite() {
            v
        } else {
            f64::INFINITY
        }
    };

    // Initial simplex: start plus a perturbation of each coordinate.
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(dim + 1);
    simplex.push((start.to_vec(), eval(start)));
    for i in 0..dim {
        let mut v = start.to_vec();
        v[i] += if v[i].abs() > 1e-8 { 0.1 * v[i].abs() } else { 0.1 };
        let fv = eval(&v);
        simplex.push((v, fv));
    }

    let mut converged = false;
    for _ in 0..max_iters {
        simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
        let best = simplex[0].1;
        let worst = simplex[dim].1;
        if worst.is_finite() && (worst - best).abs() <= tol * (1.0 + best.abs()) {
            converged = true;
            break;
        }

        // Centroid of all but the worst vertex.
        let mut centroid = vec![0.0; dim];
        for (v, _) in &simplex[..dim] {
            for (c, x) in centroid.iter_mut().zip(v) {
                *c += x / dim as f64;
            }
        }

        let point_at = |coef: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&simplex[dim].0)
                .map(|(c, w)| c + coef * (c - w))
                .collect()
        };

        let reflected = point_at(1.0);
        let f_ref = eval(&reflected);
        if f_ref < simplex[0].1 {
            let expanded = point_at(2.0);
            let f_exp = eval(&expanded);
            simplex[dim] = if f_exp < f_ref {
                (expanded, f_exp)
            } else {
                (reflected, f_ref)
            };
        } else if f_ref < simplex[dim - 1].1 {
            simplex[dim] = (reflected, f_ref);
        } else {
            let contracted = if f_ref < simplex[dim].1 {
                point_at(0.5)
            } else {
                point_at(-0.5)
            };
            let f_con = eval(&contracted);
            if f_con < simplex[dim].1.min(f_ref) {
                simplex[dim] = (contracted, f_con);
            } else {
                // Shrink toward the best vertex.
                let best_v = simplex[0].0.clone();
                for (v, fv) in simplex.iter_mut().skip(1) {
                    for (x, b) in v.iter_mut().zip(&best_v) {
                        *x = b + 0.5 * (*x - b);
                    }
                    *fv = eval(v);
                }
            }
        }
    }

    simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
    MinimizeOutcome {
        x: simplex[0].0.clone(),
        value: simplex[0].1,
        converged,
    }
}
