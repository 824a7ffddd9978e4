//! One-sided Jacobi singular value decomposition.
//!
//! Rotations are applied to column pairs of a working copy until all
//! columns are mutually orthogonal; column norms are then the singular
//! values, the normalized columns the left vectors, and the accumulated
//! rotations the right vectors. Tall input is required internally; wide
//! matrices are handled by factoring the transpose and swapping factors.

use crate::EofError;

const MAX_SWEEPS: usize = 64;
// relative off-diagonal threshold |b_p . b_q| <= TOL * |b_p| |b_q|
const TOL: f64 = 1e-14;

/// Thin SVD `A = U diag(S) V'` with `S` sorted non-increasing.
///
/// For an `m x n` input, `u` is `m x min(m,n)` with orthonormal columns,
/// `s` has `min(m,n)` entries, and `v` is `n x min(m,n)` with orthonormal
/// columns (so `v_t()` rows are the right singular vectors).
#[derive(Debug, Clone)]
pub struct Svd {
    pub rows: usize,
    pub cols: usize,
    /// m x min(m,n), row-major.
    pub u: Vec<f64>,
    pub s: Vec<f64>,
    /// n x min(m,n), row-major (columns are right singular vectors).
    pub v: Vec<f64>,
}

impl Svd {
    /// Right singular vectors as rows: a `min(m,n) x n` row-major matrix.
    pub fn v_t(&self) -> Vec<f64> {
        let k = self.s.len();
        let n = self.cols;
        let mut out = vec![0.0; k * n];
        for i in 0..n {
            for j in 0..k {
                out[j * n + i] = self.v[i * k + j];
            }
        }
        out
    }
}

/// Compute the thin SVD of a row-major `rows x cols` matrix.
pub fn svd(rows: usize, cols: usize, a: &[f64]) -> Result<Svd, EofError> {
    if a.len() != rows * cols {
        return Err(EofError::Dimension(format!(
            "matrix data length {} does not match {rows}x{cols}",
            a.len()
        )));
    }
    if rows == 0 || cols == 0 {
        return Err(EofError::Dimension("empty matrix".into()));
    }
    if rows >= cols {
        let (u, s, v) = jacobi_tall(rows, cols, a)?;
        Ok(Svd { rows, cols, u, s, v })
    } else {
        // factor the transpose and swap the roles of U and V
        let mut at = vec![0.0; rows * cols];
        for i in 0..rows {
            for j in 0..cols {
                at[j * rows + i] = a[i * cols + j];
            }
        }
        let (u_t, s, v_t) = jacobi_tall(cols, rows, &at)?;
        Ok(Svd { rows, cols, u: v_t, s, v: u_t })
    }
}

/// One-sided Jacobi on a tall matrix (`m >= n`). Returns
/// `(u: m x n, s: n, v: n x n)`, all row-major, singular values sorted
/// non-increasing.
fn jacobi_tall(m: usize, n: usize, a: &[f64]) -> Result<(Vec<f64>, Vec<f64>, Vec<f64>), EofError> {
    // column-major working copies: column j of `work` is contiguous
    let mut work = vec![0.0; m * n];
    for i in 0..m {
        for j in 0..n {
            work[j * m + i] = a[i * n + j];
        }
    }
    let mut v = vec![0.0; n * n]; // column-major as well
    for j in 0..n {
        v[j * n + j] = 1.0;
    }

    let mut converged = false;
    for _sweep in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let (alpha, beta, gamma) = {
                    let (cp, cq) = column_pair(&work, m, p, q);
                    let mut alpha = 0.0;
                    let mut beta = 0.0;
                    let mut gamma = 0.0;
                    for i in 0..m {
                        alpha += cp[i] * cp[i];
                        beta += cq[i] * cq[i];
                        gamma += cp[i] * cq[i];
                    }
                    (alpha, beta, gamma)
                };
                if gamma.abs() <= TOL * (alpha * beta).sqrt() || gamma == 0.0 {
                    continue;
                }
                rotated = true;
                // rotation zeroing the off-diagonal of [[alpha, gamma], [gamma, beta]]
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate_columns(&mut work, m, p, q, c, s);
                rotate_columns(&mut v, n, p, q, c, s);
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(EofError::NonConvergence(MAX_SWEEPS));
    }

    // singular values and left vectors from the orthogonalized columns
    let mut order: Vec<usize> = (0..n).collect();
    let norms: Vec<f64> =
        (0..n).map(|j| work[j * m..(j + 1) * m].iter().map(|x| x * x).sum::<f64>().sqrt()).collect();
    order.sort_by(|&i, &j| norms[j].partial_cmp(&norms[i]).unwrap());

    let mut u = vec![0.0; m * n];
    let mut s = vec![0.0; n];
    let mut v_sorted = vec![0.0; n * n];
    for (new_j, &old_j) in order.iter().enumerate() {
        let norm = norms[old_j];
        s[new_j] = norm;
        if norm > 0.0 {
            for i in 0..m {
                u[i * n + new_j] = work[old_j * m + i] / norm;
            }
        }
        for i in 0..n {
            v_sorted[i * n + new_j] = v[old_j * n + i];
        }
    }
    Ok((u, s, v_sorted))
}

/// Two disjoint column views of a column-major matrix.
fn column_pair(data: &[f64], m: usize, p: usize, q: usize) -> (&[f64], &[f64]) {
    debug_assert!(p < q);
    let (head, tail) = data.split_at(q * m);
    (&head[p * m..(p + 1) * m], &tail[..m])
}

fn rotate_columns(data: &mut [f64], m: usize, p: usize, q: usize, c: f64, s: f64) {
    let (head, tail) = data.split_at_mut(q * m);
    let cp = &mut head[p * m..(p + 1) * m];
    let cq = &mut tail[..m];
    for i in 0..m {
        let (x, y) = (cp[i], cq[i]);
        cp[i] = c * x - s * y;
        cq[i] = s * x + c * y;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn reconstruct(svd: &Svd) -> Vec<f64> {
        let (m, n, k) = (svd.rows, svd.cols, svd.s.len());
        let mut out = vec![0.0; m * n];
        for i in 0..m {
            for j in 0..n {
                let mut acc = 0.0;
                for l in 0..k {
                    acc += svd.u[i * k + l] * svd.s[l] * svd.v[j * k + l];
                }
                out[i * n + j] = acc;
            }
        }
        out
    }

    #[test]
    fn factors_identity() {
        let a = vec![1.0, 0.0, 0.0, 1.0];
        let f = svd(2, 2, &a).unwrap();
        assert_abs_diff_eq!(f.s[0], 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(f.s[1], 1.0, epsilon = 1e-14);
        for (got, want) in reconstruct(&f).iter().zip(&a) {
            assert_abs_diff_eq!(got, want, epsilon = 1e-13);
        }
    }

    #[test]
    fn factors_known_diagonal() {
        // diag(3, 2) embedded in a 3x2 matrix
        let a = vec![3.0, 0.0, 0.0, 2.0, 0.0, 0.0];
        let f = svd(3, 2, &a).unwrap();
        assert_abs_diff_eq!(f.s[0], 3.0, epsilon = 1e-14);
        assert_abs_diff_eq!(f.s[1], 2.0, epsilon = 1e-14);
    }

    #[test]
    fn wide_matrix_via_transpose() {
        let a = vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]; // 2x3
        let f = svd(2, 3, &a).unwrap();
        assert_eq!(f.s.len(), 2);
        for (got, want) in reconstruct(&f).iter().zip(&a) {
            assert_abs_diff_eq!(got, want, epsilon = 1e-12);
        }
        // columns of v orthonormal
        for c1 in 0..2 {
            for c2 in 0..2 {
                let dot: f64 = (0..3).map(|i| f.v[i * 2 + c1] * f.v[i * 2 + c2]).sum();
                let want = if c1 == c2 { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(dot, want, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn zero_matrix_has_zero_spectrum() {
        let f = svd(3, 2, &[0.0; 6]).unwrap();
        assert_eq!(f.s, vec![0.0, 0.0]);
    }
}
