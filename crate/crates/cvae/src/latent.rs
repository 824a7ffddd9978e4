use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A variational posterior on the latent space: per-dimension mean and
/// log-variance of a diagonal Gaussian.
#[derive(Debug, Clone, PartialEq)]
pub struct LatentCode {
    pub mean: Vec<f64>,
    pub log_variance: Vec<f64>,
}

impl LatentCode {
    pub fn r(&self) -> usize {
        self.mean.len()
    }

    pub fn is_finite(&self) -> bool {
        self.mean.iter().chain(&self.log_variance).all(|v| v.is_finite())
    }
}

/// Closed-form KL divergence from the code's Gaussian to the
/// standard-normal prior: `-1/2 * sum (log s^2 + 1 - s^2 - m^2)`.
pub fn kl_term(code: &LatentCode) -> f64 {
    debug_assert_eq!(code.mean.len(), code.log_variance.len());
    let mut acc = 0.0;
    for (m, lv) in code.mean.iter().zip(&code.log_variance) {
        acc += lv + 1.0 - lv.exp() - m * m;
    }
    -0.5 * acc
}

/// One reparameterized draw: `mean + exp(log_variance/2) * eps` with
/// `eps` standard normal from a seeded stream.
pub fn sample_latent(code: &LatentCode, rng_seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    sample_latent_with(code, &mut rng)
}

pub fn sample_latent_with<R: Rng + ?Sized>(code: &LatentCode, rng: &mut R) -> Vec<f64> {
    code.mean
        .iter()
        .zip(&code.log_variance)
        .map(|(m, lv)| m + (0.5 * lv).exp() * standard_normal(rng))
        .collect()
}

/// Box-Muller standard normal; self-contained so draws are reproducible
/// across dependency upgrades.
pub(crate) fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen_range(0.0..1.0);
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn kl_of_the_prior_is_zero() {
        let code = LatentCode { mean: vec![0.0; 5], log_variance: vec![0.0; 5] };
        assert_eq!(kl_term(&code), 0.0);
    }

    #[test]
    fn kl_closed_form_spot_values() {
        // r=1, mean 1, variance 1 -> 1/2
        let code = LatentCode { mean: vec![1.0], log_variance: vec![0.0] };
        assert_abs_diff_eq!(kl_term(&code), 0.5, epsilon = 1e-15);
        // r=1, mean 0, log-variance 1 -> (e - 2)/2
        let code = LatentCode { mean: vec![0.0], log_variance: vec![1.0] };
        assert_abs_diff_eq!(kl_term(&code), (std::f64::consts::E - 2.0) / 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(kl_term(&code), 0.35914, epsilon = 1e-5);
    }

    #[test]
    fn kl_is_nonnegative_with_equality_only_at_the_prior() {
        // random search plus the exact zero case
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10_000 {
            let r = rng.gen_range(1..6);
            let code = LatentCode {
                mean: (0..r).map(|_| rng.gen_range(-3.0..3.0)).collect(),
                log_variance: (0..r).map(|_| rng.gen_range(-3.0..3.0)).collect(),
            };
            let kl = kl_term(&code);
            assert!(kl >= 0.0, "negative KL {kl} for {code:?}");
            let at_prior = code.mean.iter().all(|&m| m == 0.0)
                && code.log_variance.iter().all(|&lv| lv == 0.0);
            if !at_prior {
                assert!(kl > 0.0, "zero KL away from the prior: {code:?}");
            }
        }
    }

    #[test]
    fn degenerate_variance_collapses_to_the_mean() {
        let code = LatentCode { mean: vec![1.5, -2.0, 0.25], log_variance: vec![-50.0; 3] };
        let draw = sample_latent(&code, 42);
        for (d, m) in draw.iter().zip(&code.mean) {
            assert_abs_diff_eq!(d, m, epsilon = 1e-10);
        }
    }

    #[test]
    fn sample_moments_match_the_gaussian() {
        let code = LatentCode { mean: vec![0.7, -1.2], log_variance: vec![0.4, -0.9] };
        let n = 100_000;
        let mut sums = [0.0f64; 2];
        let mut sq_sums = [0.0f64; 2];
        let mut rng = ChaCha8Rng::seed_from_u64(123);
        for _ in 0..n {
            let d = sample_latent_with(&code, &mut rng);
            for j in 0..2 {
                sums[j] += d[j];
                sq_sums[j] += d[j] * d[j];
            }
        }
        for j in 0..2 {
            let mean = sums[j] / n as f64;
            let var = sq_sums[j] / n as f64 - mean * mean;
            let true_var = code.log_variance[j].exp();
            let se = (true_var / n as f64).sqrt();
            assert!(
                (mean - code.mean[j]).abs() < 4.0 * se,
                "dim {j}: sample mean {mean} vs {} (se {se})",
                code.mean[j]
            );
            assert!(
                (var - true_var).abs() < 0.05 * true_var,
                "dim {j}: sample variance {var} vs {true_var}"
            );
        }
    }

    #[test]
    fn same_seed_same_draw() {
        let code = LatentCode { mean: vec![0.0; 4], log_variance: vec![0.0; 4] };
        assert_eq!(sample_latent(&code, 7), sample_latent(&code, 7));
        assert_ne!(sample_latent(&code, 7), sample_latent(&code, 8));
    }
}
