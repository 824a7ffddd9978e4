use plume_core::{GridSpec, Plume, PlumeSet, SensitivityUnits};

use crate::{svd, EofError};

/// Relative cutoff below which a singular value counts as zero for
/// regression purposes.
const RANK_TOL: f64 = 1e-12;

/// A truncated orthogonal basis fitted to a plume set.
#[derive(Debug, Clone, PartialEq)]
pub struct EofBasis {
    r: usize,
    grid: GridSpec,
    /// r values, non-increasing, >= 0.
    singular_values: Vec<f64>,
    /// r x K row-major; rows are orthonormal spatial patterns.
    right_vectors: Vec<f64>,
    /// N x r row-major; row i holds the coefficients of training plume i.
    train_coeffs: Vec<f64>,
    n_train: usize,
}

impl EofBasis {
    pub fn r(&self) -> usize {
        self.r
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn cells(&self) -> usize {
        self.grid.cells()
    }

    pub fn singular_values(&self) -> &[f64] {
        &self.singular_values
    }

    /// Spatial pattern of component `gamma` (length K).
    pub fn right_vector(&self, gamma: usize) -> &[f64] {
        let k = self.cells();
        &self.right_vectors[gamma * k..(gamma + 1) * k]
    }

    pub fn n_train(&self) -> usize {
        self.n_train
    }

    /// Coefficients of training plume `i` (length r).
    pub fn train_coeff(&self, i: usize) -> &[f64] {
        &self.train_coeffs[i * self.r..(i + 1) * self.r]
    }

    pub fn train_coeffs(&self) -> Vec<Vec<f64>> {
        (0..self.n_train).map(|i| self.train_coeff(i).to_vec()).collect()
    }

    pub(crate) fn from_parts(
        r: usize,
        grid: GridSpec,
        singular_values: Vec<f64>,
        right_vectors: Vec<f64>,
        train_coeffs: Vec<f64>,
        n_train: usize,
    ) -> Result<Self, EofError> {
        let k = grid.cells();
        if singular_values.len() != r
            || right_vectors.len() != r * k
            || train_coeffs.len() != n_train * r
        {
            return Err(EofError::Dimension("basis part lengths are inconsistent".into()));
        }
        Ok(Self { r, grid, singular_values, right_vectors, train_coeffs, n_train })
    }

    /// Max deviation of `right_vectors * right_vectors'` from the identity.
    pub fn orthonormality_defect(&self) -> f64 {
        let k = self.cells();
        let mut worst: f64 = 0.0;
        for a in 0..self.r {
            for b in a..self.r {
                let dot: f64 = self.right_vector(a)
                    .iter()
                    .zip(self.right_vector(b))
                    .map(|(x, y)| x * y)
                    .sum();
                let want = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((dot - want).abs());
            }
        }
        let _ = k;
        worst
    }
}

/// Fit a rank-`r` basis to the plume set by singular value decomposition
/// of the `N x K` value matrix.
pub fn fit_eof(plumes: &PlumeSet, r: usize) -> Result<EofBasis, EofError> {
    let n = plumes.len();
    let k = plumes.grid().cells();
    let max = n.min(k);
    if r == 0 || r > max {
        return Err(EofError::RankOutOfRange { r, max });
    }

    let mut b = Vec::with_capacity(n * k);
    for p in plumes.iter() {
        b.extend_from_slice(p.values());
    }
    let f = svd(n, k, &b)?;

    let kk = f.s.len();
    let mut singular_values = Vec::with_capacity(r);
    singular_values.extend_from_slice(&f.s[..r]);

    // rows of V' for the leading r components
    let mut right_vectors = vec![0.0; r * k];
    for gamma in 0..r {
        for cell in 0..k {
            right_vectors[gamma * k + cell] = f.v[cell * kk + gamma];
        }
    }

    // leading r columns of U
    let mut train_coeffs = vec![0.0; n * r];
    for i in 0..n {
        for gamma in 0..r {
            train_coeffs[i * r + gamma] = f.u[i * kk + gamma];
        }
    }

    EofBasis::from_parts(r, *plumes.grid(), singular_values, right_vectors, train_coeffs, n)
}

/// Map coefficient rows back to plume images: row `m` of the output is
/// `sum_gamma coeffs[m][gamma] * d_gamma * v_gamma`.
///
/// The result lives on the basis grid in the canonical frame (origin
/// (0,0), time 0); callers re-anchor metadata as needed. Negative values
/// are left in place — truncation happens downstream.
pub fn reconstruct(basis: &EofBasis, coeffs: &[Vec<f64>]) -> Result<PlumeSet, EofError> {
    let k = basis.cells();
    let mut set = PlumeSet::new(*basis.grid());
    for (m, row) in coeffs.iter().enumerate() {
        if row.len() != basis.r {
            return Err(EofError::Dimension(format!(
                "coefficient row {m} has length {}, basis rank is {}",
                row.len(),
                basis.r
            )));
        }
        let mut values = vec![0.0; k];
        for gamma in 0..basis.r {
            let scale = row[gamma] * basis.singular_values[gamma];
            if scale == 0.0 {
                continue;
            }
            let v = basis.right_vector(gamma);
            for (out, vi) in values.iter_mut().zip(v) {
                *out += scale * vi;
            }
        }
        let plume =
            Plume::new(*basis.grid(), values, SensitivityUnits::NsPerG, (0.0, 0.0), 0, None)?;
        set.push(plume)?;
    }
    Ok(set)
}

/// Least-squares coefficients of new plumes in the fitted basis.
///
/// With orthonormal right vectors the normal equations collapse to the
/// closed form `c_gamma = (b . v_gamma) / d_gamma`.
pub fn regress_coefficients(
    basis: &EofBasis,
    new_plumes: &PlumeSet,
) -> Result<Vec<Vec<f64>>, EofError> {
    if new_plumes.grid() != basis.grid() {
        return Err(EofError::Dimension("plumes are not on the basis grid".into()));
    }
    let sigma_max = basis.singular_values.first().copied().unwrap_or(0.0);
    for (gamma, &s) in basis.singular_values.iter().enumerate() {
        if s <= RANK_TOL * sigma_max || s == 0.0 {
            return Err(EofError::RankDeficient { index: gamma, value: s });
        }
    }
    let mut out = Vec::with_capacity(new_plumes.len());
    for p in new_plumes.iter() {
        let b = p.values();
        let mut row = Vec::with_capacity(basis.r);
        for gamma in 0..basis.r {
            let dot: f64 = b.iter().zip(basis.right_vector(gamma)).map(|(x, y)| x * y).sum();
            row.push(dot / basis.singular_values[gamma]);
        }
        out.push(row);
    }
    Ok(out)
}
