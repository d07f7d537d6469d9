//! Small dense symmetric linear algebra: cyclic Jacobi eigendecomposition,
//! eigenvalue-thresholded pseudo-inverse solves, and Cholesky solves.
//!
//! Everything here targets matrices of modest size (block subproblems are
//! `p_d·R × p_d·R`, Gram diagnostics `R × R`), where Jacobi sweeps are
//! accurate and fast enough.

use ndarray::{Array1, Array2};

/// Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
/// Returns eigenvalues in ascending order with matching eigenvector columns.
pub fn sym_eigh(a: &Array2<f64>) -> (Array1<f64>, Array2<f64>) {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "sym_eigh needs a square matrix");
    let mut m = a.clone();
    let mut v = Array2::eye(n);
    if n == 1 {
        return (Array1::from_elem(1, m[(0, 0)]), v);
    }
    let max_sweeps = 64;
    for _ in 0..max_sweeps {
        let mut off = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                off += m[(i, j)] * m[(i, j)];
            }
        }
        let scale: f64 = (0..n).map(|i| m[(i, i)].abs()).fold(0.0, f64::max).max(1e-300);
        if off.sqrt() <= 1e-15 * scale * (n as f64) {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let app = m[(p, p)];
                let aqq = m[(q, q)];
                let tau = (aqq - app) / (2.0 * apq);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[(k, p)];
                    let mkq = m[(k, q)];
                    m[(k, p)] = c * mkp - s * mkq;
                    m[(k, q)] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[(p, k)];
                    let mqk = m[(q, k)];
                    m[(p, k)] = c * mpk - s * mqk;
                    m[(q, k)] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].partial_cmp(&m[(j, j)]).unwrap());
    let vals = Array1::from_iter(order.iter().map(|&i| m[(i, i)]));
    let mut vecs = Array2::zeros((n, n));
    for (dst, &src) in order.iter().enumerate() {
        for k in 0..n {
            vecs[(k, dst)] = v[(k, src)];
        }
    }
    (vals, vecs)
}

/// Minimum eigenvalue of a symmetric matrix.
pub fn sym_lambda_min(a: &Array2<f64>) -> f64 {
    let (vals, _) = sym_eigh(a);
    vals[0]
}

/// Minimum-norm solution of the symmetric system `a x = rhs` through the
/// eigenvalue-thresholded pseudo-inverse: eigenvalues at or below
/// `rel_cutoff * λ_max` are treated as zero.
pub fn solve_sym_pinv(a: &Array2<f64>, rhs: &Array1<f64>, rel_cutoff: f64) -> Array1<f64> {
    let (vals, vecs) = sym_eigh(a);
    let n = a.nrows();
    let lam_max = vals.iter().fold(0.0_f64, |m, &v| m.max(v));
    let cut = rel_cutoff * lam_max;
    let mut x = Array1::zeros(n);
    for k in 0..n {
        let lam = vals[k];
        if lam > cut {
            let col = vecs.column(k);
            let proj: f64 = col.iter().zip(rhs.iter()).map(|(v, r)| v * r).sum();
            let w = proj / lam;
            for i in 0..n {
                x[i] += w * col[i];
            }
        }
    }
    x
}

/// Cholesky solve of a positive definite system. Returns `None` when a pivot
/// falls below `rel_pivot * max_diag`, signalling the caller to fall back to
/// the pseudo-inverse route.
pub fn solve_cholesky(
    a: &Array2<f64>,
    rhs: &Array1<f64>,
    rel_pivot: f64,
) -> Option<Array1<f64>> {
    let n = a.nrows();
    let max_diag = (0..n).map(|i| a[(i, i)].abs()).fold(0.0, f64::max);
    let floor = rel_pivot * max_diag;
    let mut l = Array2::<f64>::zeros((n, n));
    for j in 0..n {
        let mut s = a[(j, j)];
        for k in 0..j {
            s -= l[(j, k)] * l[(j, k)];
        }
        if s <= floor || !s.is_finite() {
            return None;
        }
        let ljj = s.sqrt();
        l[(j, j)] = ljj;
        for i in (j + 1)..n {
            let mut s2 = a[(i, j)];
            for k in 0..j {
                s2 -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = s2 / ljj;
        }
    }
    let mut y = Array1::zeros(n);
    for i in 0..n {
        let mut s = rhs[i];
        for k in 0..i {
            s -= l[(i, k)] * y[k];
        }
        y[i] = s / l[(i, i)];
    }
    let mut x = Array1::zeros(n);
    for i in (0..n).rev() {
        let mut s = y[i];
        for k in (i + 1)..n {
            s -= l[(k, i)] * x[k];
        }
        x[i] = s / l[(i, i)];
    }
    Some(x)
}

/// Singular values of a general matrix via the eigenvalues of `AᵀA`
/// (descending). Adequate for the modest sizes used in rank checks.
pub fn singular_values(a: &Array2<f64>) -> Vec<f64> {
    let gram = a.t().dot(a);
    let (vals, _) = sym_eigh(&gram);
    let mut sv: Vec<f64> = vals.iter().map(|&l| l.max(0.0).sqrt()).collect();
    sv.reverse();
    sv
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use ndarray::array;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn random_sym(n: usize, seed: u64) -> Array2<f64> {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let b = Array2::from_shape_fn((n, n), |_| rng.random::<f64>() - 0.5);
        &b + &b.t()
    }

    #[test]
    fn eigh_reconstructs_matrix() {
        for n in [1, 2, 3, 5, 10, 15] {
            let a = random_sym(n, 100 + n as u64);
            let (vals, vecs) = sym_eigh(&a);
            let mut recon = Array2::<f64>::zeros((n, n));
            for k in 0..n {
                let col = vecs.column(k);
                for i in 0..n {
                    for j in 0..n {
                        recon[(i, j)] += vals[k] * col[i] * col[j];
                    }
                }
            }
            for (x, y) in recon.iter().zip(a.iter()) {
                assert_abs_diff_eq!(x, y, epsilon = 1e-10);
            }
            // ascending order, orthonormal vectors
            for k in 1..n {
                assert!(vals[k] >= vals[k - 1]);
            }
            let vtv = vecs.t().dot(&vecs);
            for i in 0..n {
                for j in 0..n {
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert_abs_diff_eq!(vtv[(i, j)], want, epsilon = 1e-10);
                }
            }
        }
    }

    #[test]
    fn eigh_known_2x2() {
        let a = array![[2.0, 1.0], [1.0, 2.0]];
        let (vals, _) = sym_eigh(&a);
        assert_abs_diff_eq!(vals[0], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(vals[1], 3.0, epsilon = 1e-12);
    }

    #[test]
    fn pinv_solves_nonsingular_system() {
        let a = random_sym(6, 7);
        let spd = a.dot(&a.t()) + Array2::<f64>::eye(6);
        let mut rng = ChaCha12Rng::seed_from_u64(8);
        let x_true = ndarray::Array1::from_shape_fn(6, |_| rng.random::<f64>());
        let rhs = spd.dot(&x_true);
        let x = solve_sym_pinv(&spd, &rhs, 1e-12);
        for (a, b) in x.iter().zip(x_true.iter()) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-8);
        }
    }

    #[test]
    fn pinv_returns_minimum_norm_solution_on_singular_system() {
        // rank-1 system: a = v vᵀ, rhs = v -> x = v / |v|²
        let v = array![1.0, 2.0, 2.0];
        let mut a = Array2::<f64>::zeros((3, 3));
        for i in 0..3 {
            for j in 0..3 {
                a[(i, j)] = v[i] * v[j];
            }
        }
        let x = solve_sym_pinv(&a, &v, 1e-12);
        let nrm2: f64 = v.iter().map(|t| t * t).sum();
        for i in 0..3 {
            assert_abs_diff_eq!(x[i], v[i] / nrm2, epsilon = 1e-12);
        }
    }

    #[test]
    fn cholesky_matches_pinv_on_spd() {
        let a = random_sym(8, 21);
        let spd = a.dot(&a.t()) + Array2::<f64>::eye(8) * 2.0;
        let mut rng = ChaCha12Rng::seed_from_u64(22);
        let rhs = ndarray::Array1::from_shape_fn(8, |_| rng.random::<f64>());
        let x1 = solve_cholesky(&spd, &rhs, 1e-14).expect("spd system");
        let x2 = solve_sym_pinv(&spd, &rhs, 1e-12);
        for (a, b) in x1.iter().zip(x2.iter()) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-9);
        }
    }

    #[test]
    fn cholesky_flags_singular_matrix() {
        let v = array![1.0, 1.0];
        let mut a = Array2::<f64>::zeros((2, 2));
        for i in 0..2 {
            for j in 0..2 {
                a[(i, j)] = v[i] * v[j];
            }
        }
        assert!(solve_cholesky(&a, &v, 1e-12).is_none());
    }

    #[test]
    fn singular_values_of_diagonal() {
        let a = array![[3.0, 0.0], [0.0, 4.0], [0.0, 0.0]];
        let sv = singular_values(&a);
        assert_abs_diff_eq!(sv[0], 4.0, epsilon = 1e-10);
        assert_abs_diff_eq!(sv[1], 3.0, epsilon = 1e-10);
    }
}
