//! Dense Cholesky factorization and triangular solves for the small
//! symmetric systems the emulators need.

/// In-place lower Cholesky of a row-major symmetric matrix. On success
/// the returned vector holds L (lower triangle; upper is zeroed). Fails
/// with `(row, pivot)` on a non-positive pivot.
pub(crate) fn cholesky(n: usize, a: &[f64]) -> Result<Vec<f64>, (usize, f64)> {
    debug_assert_eq!(a.len(), n * n);
    let mut l = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let mut sum = a[i * n + j];
            for k in 0..j {
                sum -= l[i * n + k] * l[j * n + k];
            }
            if i == j {
                if sum <= 0.0 || !sum.is_finite() {
                    return Err((i, sum));
                }
                l[i * n + i] = sum.sqrt();
            } else {
                l[i * n + j] = sum / l[j * n + j];
            }
        }
    }
    Ok(l)
}

/// Solve `L x = b` for lower-triangular L.
pub(crate) fn solve_lower(n: usize, l: &[f64], b: &[f64]) -> Vec<f64> {
    let mut x = b.to_vec();
    for i in 0..n {
        let mut sum = x[i];
        for k in 0..i {
            sum -= l[i * n + k] * x[k];
        }
        x[i] = sum / l[i * n + i];
    }
    x
}

/// Solve `L' x = b` for lower-triangular L.
pub(crate) fn solve_lower_transpose(n: usize, l: &[f64], b: &[f64]) -> Vec<f64> {
    let mut x = b.to_vec();
    for i in (0..n).rev() {
        let mut sum = x[i];
        for k in (i + 1)..n {
            sum -= l[k * n + i] * x[k];
        }
        x[i] = sum / l[i * n + i];
    }
    x
}

/// Solve `(L L') x = b`.
pub(crate) fn solve_spd(n: usize, l: &[f64], b: &[f64]) -> Vec<f64> {
    let y = solve_lower(n, l, b);
    solve_lower_transpose(n, l, &y)
}

/// Full inverse of `L L'`, row-major. O(n^3); only used on desk-scale
/// Gram matrices inside the likelihood gradient.
pub(crate) fn spd_inverse(n: usize, l: &[f64]) -> Vec<f64> {
    let mut inv = vec![0.0; n * n];
    let mut e = vec![0.0; n];
    for j in 0..n {
        e.fill(0.0);
        e[j] = 1.0;
        let col = solve_spd(n, l, &e);
        for i in 0..n {
            inv[i * n + j] = col[i];
        }
    }
    inv
}
