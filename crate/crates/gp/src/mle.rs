use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::{neg_log_likelihood_and_grad, GpModel};
use crate::{GpError, GpHyper, JitterSchedule, StPoint};

/// Box for the log-hyperparameters; the lower edge doubles as the "driven
/// to its lower bound" floor for degenerate data (variance ~ 9.4e-14).
const LOG_BOUND: f64 = 30.0;
const MAX_BACKTRACKS: usize = 40;
const ARMIJO_C1: f64 = 1e-4;

#[derive(Debug, Clone)]
pub struct FitOptions {
    pub restarts: usize,
    pub seed: u64,
    pub max_iterations: usize,
    pub jitter: JitterSchedule,
}

impl FitOptions {
    pub fn new(restarts: usize, seed: u64) -> Self {
        Self { restarts, seed, max_iterations: 150, jitter: JitterSchedule::default() }
    }
}

impl Default for FitOptions {
    fn default() -> Self {
        Self::new(5, 0)
    }
}

/// Maximum-likelihood hyperparameter fit.
///
/// Runs a quasi-Newton (BFGS) minimization of the negative log marginal
/// likelihood on the log-hyperparameters, once from `init` and once from
/// each of `restarts - 1` seeded perturbations of a data-driven
/// initialization (variance of the targets, median pairwise distances).
/// Every line-search step must decrease the objective, so the returned
/// likelihood is at least as good as every restart's initialization.
pub fn fit_mle(
    points: &[StPoint],
    targets: &[f64],
    init: GpHyper,
    opts: &FitOptions,
) -> Result<GpModel, GpError> {
    let n = points.len();
    if n < 2 {
        return Err(GpError::TooFewPoints { need: 2, got: n });
    }
    if targets.len() != n {
        return Err(GpError::LengthMismatch { points: n, targets: targets.len() });
    }

    let jitter_frac = match opts.jitter {
        JitterSchedule::RelativeToTrace { start_frac, .. } => start_frac,
        // keep the optimization surface factorizable even when the final
        // model is asked for a fixed jitter
        JitterSchedule::Fixed(_) => 1e-10,
    };

    let heuristic = data_heuristic(points, targets);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut best: Option<([f64; 3], f64)> = None;
    for restart in 0..opts.restarts.max(1) {
        let x0 = if restart == 0 {
            init.logs()
        } else {
            let base = heuristic.logs();
            [
                base[0] + rng.gen_range(-1.5..1.5),
                base[1] + rng.gen_range(-1.5..1.5),
                base[2] + rng.gen_range(-1.5..1.5),
            ]
        };
        let Some((x, f)) = bfgs(points, targets, x0, jitter_frac, opts.max_iterations) else {
            log::warn!("restart {restart}: likelihood not evaluable at start, skipped");
            continue;
        };
        if best.as_ref().is_none_or(|(_, bf)| f < *bf) {
            best = Some((x, f));
        }
    }

    let (x, _) = best.ok_or_else(|| {
        GpError::FitFailure("no restart produced an evaluable likelihood".into())
    })?;
    GpModel::fit(points.to_vec(), targets.to_vec(), GpHyper::from_log_array(x), opts.jitter)
}

fn data_heuristic(points: &[StPoint], targets: &[f64]) -> GpHyper {
    let n = targets.len() as f64;
    let mean: f64 = targets.iter().sum::<f64>() / n;
    let var = (targets.iter().map(|t| (t - mean) * (t - mean)).sum::<f64>() / n).max(1e-10);

    let mut d_space = Vec::new();
    let mut d_time = Vec::new();
    for (i, a) in points.iter().enumerate() {
        for b in &points[i + 1..] {
            let ds = a.spatial_dist_sq(b);
            let dt = a.time_dist(b);
            if ds > 0.0 {
                d_space.push(ds);
            }
            if dt > 0.0 {
                d_time.push(dt);
            }
        }
    }
    GpHyper::new(var, median_or(d_space, 1.0), median_or(d_time, 1.0))
}

fn median_or(mut v: Vec<f64>, fallback: f64) -> f64 {
    if v.is_empty() {
        return fallback;
    }
    let mid = v.len() / 2;
    v.select_nth_unstable_by(mid, |a, b| a.partial_cmp(b).unwrap());
    v[mid]
}

fn clamp(x: [f64; 3]) -> [f64; 3] {
    x.map(|v| v.clamp(-LOG_BOUND, LOG_BOUND))
}

/// Gradient with bound-pinned coordinates zeroed, so convergence checks
/// do not spin on constraints.
fn projected(x: &[f64; 3], g: &[f64; 3]) -> [f64; 3] {
    let mut out = *g;
    for i in 0..3 {
        let at_lo = x[i] <= -LOG_BOUND && g[i] > 0.0;
        let at_hi = x[i] >= LOG_BOUND && g[i] < 0.0;
        if at_lo || at_hi {
            out[i] = 0.0;
        }
    }
    out
}

fn dot(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn norm(a: &[f64; 3]) -> f64 {
    dot(a, a).sqrt()
}

/// Monotone BFGS with backtracking on the clamped log-hyperparameter box.
/// Returns the final point and objective, or None when the objective is
/// not evaluable at the start.
fn bfgs(
    points: &[StPoint],
    targets: &[f64],
    x0: [f64; 3],
    jitter_frac: f64,
    max_iterations: usize,
) -> Option<([f64; 3], f64)> {
    let eval = |x: [f64; 3]| neg_log_likelihood_and_grad(points, targets, x, jitter_frac);

    let mut x = clamp(x0);
    let (mut f, mut g) = eval(x)?;
    let mut h_inv = identity();

    for _ in 0..max_iterations {
        let pg = projected(&x, &g);
        if pg.iter().map(|v| v.abs()).fold(0.0, f64::max) < 1e-6 * (1.0 + f.abs()) {
            break;
        }

        let mut dir = mat_vec_neg(&h_inv, &g);
        if dot(&dir, &g) >= 0.0 {
            // stale curvature; fall back to steepest descent
            h_inv = identity();
            dir = [-g[0], -g[1], -g[2]];
        }

        let mut accepted = false;
        let mut t = 1.0;
        for _ in 0..MAX_BACKTRACKS {
            let cand = clamp([x[0] + t * dir[0], x[1] + t * dir[1], x[2] + t * dir[2]]);
            let step = [cand[0] - x[0], cand[1] - x[1], cand[2] - x[2]];
            if norm(&step) < 1e-14 {
                break;
            }
            if let Some((fc, gc)) = eval(cand) {
                let slope = dot(&g, &step);
                if fc <= f + ARMIJO_C1 * slope.min(0.0) && fc < f {
                    let y = [gc[0] - g[0], gc[1] - g[1], gc[2] - g[2]];
                    let sy = dot(&step, &y);
                    if sy > 1e-12 * norm(&step) * norm(&y) {
                        bfgs_update(&mut h_inv, &step, &y, sy);
                    } else {
                        h_inv = identity();
                    }
                    x = cand;
                    f = fc;
                    g = gc;
                    accepted = true;
                    break;
                }
            }
            t *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    Some((x, f))
}

type Mat3 = [[f64; 3]; 3];

fn identity() -> Mat3 {
    [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]
}

fn mat_vec_neg(m: &Mat3, v: &[f64; 3]) -> [f64; 3] {
    let mut out = [0.0; 3];
    for (i, row) in m.iter().enumerate() {
        out[i] = -(row[0] * v[0] + row[1] * v[1] + row[2] * v[2]);
    }
    out
}

/// Standard inverse-Hessian BFGS update
/// `H <- (I - rho s y')(H)(I - rho y s') + rho s s'`.
fn bfgs_update(h: &mut Mat3, s: &[f64; 3], y: &[f64; 3], sy: f64) {
    let rho = 1.0 / sy;
    let mut a = identity(); // I - rho s y'
    for i in 0..3 {
        for j in 0..3 {
            a[i][j] -= rho * s[i] * y[j];
        }
    }
    // tmp = a * h * a'
    let mut ah = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                ah[i][j] += a[i][k] * h[k][j];
            }
        }
    }
    let mut new_h = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                new_h[i][j] += ah[i][k] * a[j][k];
            }
            new_h[i][j] += rho * s[i] * s[j];
        }
    }
    *h = new_h;
}
