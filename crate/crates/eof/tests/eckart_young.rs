//! Spectral oracles for the SVD-based basis.
//!
//! The independent oracle is a classical two-sided Jacobi eigensolver on
//! the Gram matrix `B'B`, written here in test code and sharing nothing
//! with the one-sided implementation under test: its eigenvalues must be
//! the squared singular values, and the Eckart-Young identity must tie
//! truncated reconstruction error to the discarded part of the spectrum.

use eof::{fit_eof, reconstruct, regress_coefficients, svd};
use plume_core::{GridSpec, Plume, PlumeSet, SensitivityUnits};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Eigenvalues of a symmetric matrix by cyclic two-sided Jacobi.
fn symmetric_eigenvalues(n: usize, a: &[f64]) -> Vec<f64> {
    let mut m = a.to_vec();
    for _sweep in 0..100 {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += m[p * n + q] * m[p * n + q];
            }
        }
        if off.sqrt() < 1e-13 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[p * n + q];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let theta = (m[q * n + q] - m[p * n + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (1.0 + theta * theta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // rotate rows p, q
                for j in 0..n {
                    let (x, y) = (m[p * n + j], m[q * n + j]);
                    m[p * n + j] = c * x - s * y;
                    m[q * n + j] = s * x + c * y;
                }
                // rotate columns p, q
                for i in 0..n {
                    let (x, y) = (m[i * n + p], m[i * n + q]);
                    m[i * n + p] = c * x - s * y;
                    m[i * n + q] = s * x + c * y;
                }
            }
        }
    }
    let mut eig: Vec<f64> = (0..n).map(|i| m[i * n + i]).collect();
    eig.sort_by(|a, b| b.partial_cmp(a).unwrap());
    eig
}

fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Vec<f64> {
    (0..rows * cols).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

fn frob_norm_sq(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum()
}

fn set_from_matrix(rows: usize, cols: usize, data: &[f64]) -> PlumeSet {
    let grid = GridSpec::new(cols, 1, 0.0, 0.0, 0.1, 0.1).unwrap();
    let mut set = PlumeSet::new(grid);
    for i in 0..rows {
        set.push(
            Plume::new(
                grid,
                data[i * cols..(i + 1) * cols].to_vec(),
                SensitivityUnits::NsPerG,
                (0.0, 0.0),
                0,
                None,
            )
            .unwrap(),
        )
        .unwrap();
    }
    set
}

#[test]
fn singular_values_match_gram_eigenvalues() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let (n, k) = (5, 4);
    let b = random_matrix(&mut rng, n, k);

    let f = svd(n, k, &b).unwrap();

    // oracle: eigenvalues of B'B
    let mut gram = vec![0.0; k * k];
    for i in 0..k {
        for j in 0..k {
            let mut acc = 0.0;
            for row in 0..n {
                acc += b[row * k + i] * b[row * k + j];
            }
            gram[i * k + j] = acc;
        }
    }
    let eig = symmetric_eigenvalues(k, &gram);
    for (sv, ev) in f.s.iter().zip(&eig) {
        assert!(
            (sv * sv - ev).abs() <= 1e-10 * (1.0 + ev.abs()),
            "sigma^2 {} vs eigenvalue {}",
            sv * sv,
            ev
        );
    }
}

#[test]
fn eckart_young_identity_on_random_matrices() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for trial in 0..3 {
        let (n, k) = (50, 64);
        let b = random_matrix(&mut rng, n, k);
        let set = set_from_matrix(n, k, &b);
        let full = svd(n, k, &b).unwrap();

        for r in [1, 5, 20, 50] {
            let basis = fit_eof(&set, r).unwrap();
            let recon = reconstruct(&basis, &basis.train_coeffs()).unwrap();

            let mut err_sq = 0.0;
            for (orig, rec) in set.iter().zip(recon.iter()) {
                for (a, c) in orig.values().iter().zip(rec.values()) {
                    err_sq += (a - c) * (a - c);
                }
            }
            let discarded: f64 = full.s[r..].iter().map(|s| s * s).sum();
            if r == 50 {
                assert!(err_sq.sqrt() < 1e-10, "full-rank residual {err_sq:e} (trial {trial})");
            } else {
                assert!(
                    (err_sq - discarded).abs() <= 1e-8 * discarded.max(1e-30),
                    "trial {trial} r {r}: error^2 {err_sq} vs discarded spectrum {discarded}"
                );
            }
        }
    }
}

#[test]
fn reconstruction_error_is_non_increasing_in_r() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let (n, k) = (12, 10);
    let b = random_matrix(&mut rng, n, k);
    let set = set_from_matrix(n, k, &b);
    let mut last = f64::INFINITY;
    for r in 1..=10 {
        let basis = fit_eof(&set, r).unwrap();
        let recon = reconstruct(&basis, &basis.train_coeffs()).unwrap();
        let err: f64 = set
            .iter()
            .zip(recon.iter())
            .map(|(a, c)| {
                a.values().iter().zip(c.values()).map(|(x, y)| (x - y) * (x - y)).sum::<f64>()
            })
            .sum();
        assert!(err <= last + 1e-9, "error rose from {last} to {err} at r{r}");
        last = err;
    }
}

#[test]
fn singular_values_are_invariant_under_row_permutation() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (n, k) = (6, 9);
    let b = random_matrix(&mut rng, n, k);
    let mut permuted = vec![0.0; n * k];
    let perm = [3usize, 0, 5, 1, 4, 2];
    for (dst, &src) in perm.iter().enumerate() {
        permuted[dst * k..(dst + 1) * k].copy_from_slice(&b[src * k..(src + 1) * k]);
    }
    let s1 = svd(n, k, &b).unwrap().s;
    let s2 = svd(n, k, &permuted).unwrap().s;
    for (a, c) in s1.iter().zip(&s2) {
        assert!((a - c).abs() <= 1e-10 * (1.0 + a.abs()));
    }
}

#[test]
fn regress_then_reconstruct_is_a_projection() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let (n, k) = (8, 12);
    let b = random_matrix(&mut rng, n, k);
    let set = set_from_matrix(n, k, &b);
    let basis = fit_eof(&set, 4).unwrap();

    let probe = set_from_matrix(2, k, &random_matrix(&mut rng, 2, k));
    let once = reconstruct(&basis, &regress_coefficients(&basis, &probe).unwrap()).unwrap();
    let twice = reconstruct(&basis, &regress_coefficients(&basis, &once).unwrap()).unwrap();
    for (a, c) in once.iter().zip(twice.iter()) {
        for (x, y) in a.values().iter().zip(c.values()) {
            assert!((x - y).abs() < 1e-8, "projection not idempotent: {x} vs {y}");
        }
    }

    // residual of the projection is orthogonal to every basis vector
    for (orig, rec) in probe.iter().zip(once.iter()) {
        let residual: Vec<f64> =
            orig.values().iter().zip(rec.values()).map(|(x, y)| x - y).collect();
        for gamma in 0..basis.r() {
            let dot: f64 =
                residual.iter().zip(basis.right_vector(gamma)).map(|(x, y)| x * y).sum();
            assert!(dot.abs() < 1e-8, "residual not orthogonal to component {gamma}: {dot}");
        }
    }
}
