use crate::chol::{cholesky, solve_lower, solve_spd, spd_inverse};
use crate::{kernel, GpError, GpHyper, StPoint};

/// How much diagonal inflation to try when factorizing the Gram matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum JitterSchedule {
    /// Start at `start_frac * trace/N`, escalate by x10 on failure up to
    /// `max_frac * trace/N`.
    RelativeToTrace { start_frac: f64, max_frac: f64 },
    /// A fixed absolute jitter; `Fixed(0.0)` factorizes the raw Gram
    /// matrix and fails if it is not positive definite.
    Fixed(f64),
}

impl Default for JitterSchedule {
    fn default() -> Self {
        JitterSchedule::RelativeToTrace { start_frac: 1e-10, max_frac: 1e-4 }
    }
}

/// A fitted per-feature emulator: hyperparameters, training data, and the
/// Cholesky factor of the jittered Gram matrix.
#[derive(Debug, Clone)]
pub struct GpModel {
    hyper: GpHyper,
    points: Vec<StPoint>,
    targets: Vec<f64>,
    /// Lower-triangular factor of `S(W, W) + jitter*I`, row-major n x n.
    gram_factor: Vec<f64>,
    /// `(S + jitter*I)^-1 targets`.
    alpha: Vec<f64>,
    jitter: f64,
}

impl GpModel {
    /// Factorize the training Gram matrix under fixed hyperparameters.
    pub fn fit(
        points: Vec<StPoint>,
        targets: Vec<f64>,
        hyper: GpHyper,
        schedule: JitterSchedule,
    ) -> Result<Self, GpError> {
        let n = points.len();
        if n < 1 {
            return Err(GpError::TooFewPoints { need: 1, got: n });
        }
        if targets.len() != n {
            return Err(GpError::LengthMismatch { points: n, targets: targets.len() });
        }
        if !targets.iter().all(|t| t.is_finite()) {
            return Err(GpError::NonFinite("targets"));
        }

        let gram = build_gram(&points, &hyper);
        let (gram_factor, jitter) = factorize_with_jitter(n, &gram, hyper.variance(), schedule)?;
        let alpha = solve_spd(n, &gram_factor, &targets);
        Ok(Self { hyper, points, targets, gram_factor, alpha, jitter })
    }

    pub fn hyper(&self) -> &GpHyper {
        &self.hyper
    }

    pub fn jitter(&self) -> f64 {
        self.jitter
    }

    pub fn train_points(&self) -> &[StPoint] {
        &self.points
    }

    pub fn train_targets(&self) -> &[f64] {
        &self.targets
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Exact conditional mean and variance at a query point. The variance
    /// is floored at zero against round-off.
    pub fn posterior(&self, query: &StPoint) -> (f64, f64) {
        let n = self.points.len();
        let k_star: Vec<f64> = self.points.iter().map(|p| kernel(query, p, &self.hyper)).collect();
        let mean: f64 = k_star.iter().zip(&self.alpha).map(|(k, a)| k * a).sum();
        let v = solve_lower(n, &self.gram_factor, &k_star);
        let reduction: f64 = v.iter().map(|x| x * x).sum();
        let var = (kernel(query, query, &self.hyper) - reduction).max(0.0);
        (mean, var)
    }

    /// Batched posterior over many queries.
    pub fn emulate_feature(&self, queries: &[StPoint]) -> Vec<(f64, f64)> {
        queries.iter().map(|q| self.posterior(q)).collect()
    }

    /// Exact Gaussian log marginal likelihood of the training targets.
    pub fn log_marginal_likelihood(&self) -> f64 {
        let n = self.points.len();
        let data_fit: f64 = self.targets.iter().zip(&self.alpha).map(|(y, a)| y * a).sum();
        let log_det: f64 =
            (0..n).map(|i| self.gram_factor[i * n + i].ln()).sum::<f64>() * 2.0;
        -0.5 * data_fit - 0.5 * log_det - 0.5 * n as f64 * (2.0 * std::f64::consts::PI).ln()
    }

    /// Max abs deviation of `L L'` from the jittered Gram matrix,
    /// for invariant checks.
    pub fn factorization_defect(&self) -> f64 {
        let n = self.points.len();
        let gram = build_gram(&self.points, &self.hyper);
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let mut acc = 0.0;
                for k in 0..n {
                    acc += self.gram_factor[i * n + k] * self.gram_factor[j * n + k];
                }
                let want = gram[i * n + j] + if i == j { self.jitter } else { 0.0 };
                worst = worst.max((acc - want).abs());
            }
        }
        worst
    }
}

pub(crate) fn build_gram(points: &[StPoint], hyper: &GpHyper) -> Vec<f64> {
    let n = points.len();
    let mut gram = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let v = kernel(&points[i], &points[j], hyper);
            gram[i * n + j] = v;
            gram[j * n + i] = v;
        }
    }
    gram
}

pub(crate) fn factorize_with_jitter(
    n: usize,
    gram: &[f64],
    variance: f64,
    schedule: JitterSchedule,
) -> Result<(Vec<f64>, f64), GpError> {
    // the kernel diagonal is constant, so trace/N is just the variance
    let (mut jitter, max_jitter) = match schedule {
        JitterSchedule::RelativeToTrace { start_frac, max_frac } => {
            (start_frac * variance, max_frac * variance)
        }
        JitterSchedule::Fixed(j) => (j, j),
    };
    loop {
        let mut work = gram.to_vec();
        for i in 0..n {
            work[i * n + i] += jitter;
        }
        match cholesky(n, &work) {
            Ok(l) => return Ok((l, jitter)),
            Err((row, pivot)) => {
                if jitter >= max_jitter || jitter == 0.0 && max_jitter == 0.0 {
                    return Err(GpError::NotPositiveDefinite { row, pivot, jitter });
                }
                let next = (jitter * 10.0).min(max_jitter);
                log::debug!("Cholesky failed at row {row} (pivot {pivot:.3e}); jitter {jitter:.3e} -> {next:.3e}");
                jitter = next;
            }
        }
    }
}

/// Negative log marginal likelihood and its gradient with respect to the
/// log-hyperparameters, or `None` when the Gram matrix cannot be
/// factorized at these hyperparameters.
///
/// With the relative jitter `delta = frac * sigma^2`, the jittered matrix
/// scales exactly with `sigma^2`, so `dK/dlog sigma^2 = K`; the length
/// scales enter elementwise as `S_ij * d/l`.
pub(crate) fn neg_log_likelihood_and_grad(
    points: &[StPoint],
    targets: &[f64],
    x: [f64; 3],
    jitter_frac: f64,
) -> Option<(f64, [f64; 3])> {
    let hyper = GpHyper::from_log_array(x);
    let n = points.len();
    let gram = build_gram(points, &hyper);
    let jitter = jitter_frac * hyper.variance();
    let mut work = gram.clone();
    for i in 0..n {
        work[i * n + i] += jitter;
    }
    let l = cholesky(n, &work).ok()?;
    let alpha = solve_spd(n, &l, targets);
    let data_fit: f64 = targets.iter().zip(&alpha).map(|(y, a)| y * a).sum();
    let log_det: f64 = (0..n).map(|i| l[i * n + i].ln()).sum::<f64>() * 2.0;
    let nll = 0.5 * data_fit + 0.5 * log_det + 0.5 * n as f64 * (2.0 * std::f64::consts::PI).ln();
    if !nll.is_finite() {
        return None;
    }

    let k_inv = spd_inverse(n, &l);
    let (l_s, l_t) = (hyper.length_space(), hyper.length_time());

    // dlog-likelihood/dtheta = 0.5 * tr((alpha alpha' - K^-1) dK/dtheta)
    let mut grad_ll = [0.0f64; 3];
    for i in 0..n {
        for j in 0..n {
            let a = alpha[i] * alpha[j] - k_inv[i * n + j];
            let s_ij = gram[i * n + j];
            // dK/dlog sigma^2 includes the relative jitter on the diagonal
            let dk_dv = if i == j { s_ij + jitter } else { s_ij };
            grad_ll[0] += a * dk_dv;
            let ds = points[i].spatial_dist_sq(&points[j]);
            let dt = points[i].time_dist(&points[j]);
            grad_ll[1] += a * s_ij * ds / l_s;
            grad_ll[2] += a * s_ij * dt / l_t;
        }
    }
    let grad = [-0.5 * grad_ll[0], -0.5 * grad_ll[1], -0.5 * grad_ll[2]];
    Some((nll, grad))
}
