use super::{Matrix, NumericsError, Rng};

/// Householder QR factorization `A = Q R` of an `m × n` matrix.
///
/// Returns the full `m × m` orthogonal `Q` and the `m × n` upper-triangular
/// `R`, normalized so that `R` has a nonnegative diagonal.
pub fn householder_qr(a: &Matrix) -> (Matrix, Matrix) {
    let (m, n) = (a.rows(), a.cols());
    // Column-major working copy: reflectors touch contiguous column tails.
    let mut work = vec![0.0; m * n];
    for i in 0..m {
        for j in 0..n {
            work[j * m + i] = a[(i, j)];
        }
    }

    let steps = n.min(m.saturating_sub(1));
    let mut reflectors: Vec<(usize, Vec<f64>, f64)> = Vec::with_capacity(steps);
    for k in 0..steps {
        let col = &work[k * m + k..(k + 1) * m];
        let alpha = col.iter().map(|v| v * v).sum::<f64>().sqrt();
        if alpha == 0.0 {
            continue;
        }
        let mut v = col.to_vec();
        v[0] += if v[0] >= 0.0 { alpha } else { -alpha };
        let vv: f64 = v.iter().map(|x| x * x).sum();
        let tau = 2.0 / vv;
        for j in k..n {
            let c = &mut work[j * m + k..(j + 1) * m];
            let s: f64 = v.iter().zip(c.iter()).map(|(a, b)| a * b).sum();
            let f = tau * s;
            for (ci, vi) in c.iter_mut().zip(&v) {
                *ci -= f * vi;
            }
        }
        reflectors.push((k, v, tau));
    }

    // Q = H_0 H_1 ... H_{K-1}, accumulated right to left on the identity.
    let mut q = vec![0.0; m * m];
    for i in 0..m {
        q[i * m + i] = 1.0;
    }
    for (k, v, tau) in reflectors.iter().rev() {
        for j in 0..m {
            let c = &mut q[j * m + k..(j + 1) * m];
            let s: f64 = v.iter().zip(c.iter()).map(|(a, b)| a * b).sum();
            if s == 0.0 {
                continue;
            }
            let f = tau * s;
            for (ci, vi) in c.iter_mut().zip(v) {
                *ci -= f * vi;
            }
        }
    }

    let mut r = Matrix::zeros(m, n);
    for j in 0..n {
        for i in 0..=j.min(m - 1) {
            r[(i, j)] = work[j * m + i];
        }
    }
    let mut q_out = Matrix::zeros(m, m);
    for j in 0..m {
        for i in 0..m {
            q_out[(i, j)] = q[j * m + i];
        }
    }

    for d in 0..m.min(n) {
        if r[(d, d)] < 0.0 {
            for j in 0..n {
                r[(d, j)] = -r[(d, j)];
            }
            for i in 0..m {
                q_out[(i, d)] = -q_out[(i, d)];
            }
        }
    }
    (q_out, r)
}

/// Haar-distributed `n × n` orthogonal matrix: the `Q` factor of a
/// standard-Gaussian matrix (drawn row by row), sign-normalized.
pub fn random_orthogonal(n: usize, rng: &mut Rng) -> Result<Matrix, NumericsError> {
    if n == 0 {
        return Err(NumericsError::EmptyDimension);
    }
    let data: Vec<f64> = (0..n * n).map(|_| rng.standard_normal()).collect();
    let g = Matrix::from_row_major(n, n, data);
    Ok(householder_qr(&g).0)
}

/// Solves the square system `A z = rhs` by Householder QR and back
/// substitution.
pub fn solve_qr(a: &Matrix, rhs: &[f64]) -> Result<Vec<f64>, NumericsError> {
    let n = a.rows();
    assert_eq!(a.cols(), n, "solve_qr: matrix must be square");
    assert_eq!(rhs.len(), n, "solve_qr: dimension mismatch");
    if n == 0 {
        return Err(NumericsError::EmptyDimension);
    }
    let (q, r) = householder_qr(a);
    let scale = (0..n).map(|i| r[(i, i)].abs()).fold(0.0, f64::max);
    if (0..n).any(|i| r[(i, i)].abs() <= scale * 1e-14) {
        return Err(NumericsError::Singular);
    }
    let mut z = q.tr_matvec(rhs);
    for i in (0..n).rev() {
        let mut acc = z[i];
        for j in i + 1..n {
            acc -= r[(i, j)] * z[j];
        }
        z[i] = acc / r[(i, i)];
    }
    Ok(z)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn orthogonality_error(q: &Matrix) -> f64 {
        q.transpose()
            .matmul(q)
            .max_abs_diff(&Matrix::identity(q.cols()))
    }

    #[test]
    fn reconstructs_input() {
        let a = Matrix::from_rows(&[
            vec![12.0, -51.0, 4.0],
            vec![6.0, 167.0, -68.0],
            vec![-4.0, 24.0, -41.0],
        ]);
        let (q, r) = householder_qr(&a);
        assert!(q.matmul(&r).max_abs_diff(&a) < 1e-12);
        assert!(orthogonality_error(&q) < 1e-14);
        // Textbook example: R = [[14, 21, -14], [0, 175, -70], [0, 0, 35]].
        assert!((r[(0, 0)] - 14.0).abs() < 1e-12);
        assert!((r[(1, 1)] - 175.0).abs() < 1e-12);
        assert!((r[(2, 2)] - 35.0).abs() < 1e-12);
        assert_eq!(r[(2, 0)], 0.0);
    }

    #[test]
    fn tall_matrix() {
        let mut rng = Rng::new(5);
        let data: Vec<f64> = (0..7 * 3).map(|_| rng.standard_normal()).collect();
        let a = Matrix::from_row_major(7, 3, data);
        let (q, r) = householder_qr(&a);
        assert_eq!((q.rows(), q.cols()), (7, 7));
        assert!(q.matmul(&r).max_abs_diff(&a) < 1e-12);
        for d in 0..3 {
            assert!(r[(d, d)] >= 0.0);
        }
    }

    #[test]
    fn one_by_one() {
        for seed in 0..20 {
            let q = random_orthogonal(1, &mut Rng::new(seed)).unwrap();
            assert_eq!(q[(0, 0)].abs(), 1.0);
        }
    }

    #[test]
    fn orthogonal_for_many_sizes() {
        let mut rng = Rng::new(11);
        for n in [2, 3, 5, 17, 64, 200] {
            let q = random_orthogonal(n, &mut rng).unwrap();
            let err = orthogonality_error(&q);
            assert!(err < 1e-10, "n={n}: {err}");
        }
    }

    #[test]
    fn deterministic() {
        let a = random_orthogonal(12, &mut Rng::new(99)).unwrap();
        let b = random_orthogonal(12, &mut Rng::new(99)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn zero_dimension_rejected() {
        assert_eq!(
            random_orthogonal(0, &mut Rng::new(1)),
            Err(NumericsError::EmptyDimension)
        );
    }

    #[test]
    fn solve_small_system() {
        let a = Matrix::from_rows(&[
            vec![4.0, 1.0, 0.0],
            vec![1.0, 3.0, -1.0],
            vec![0.0, -1.0, 2.0],
        ]);
        let z = solve_qr(&a, &[1.0, 2.0, 3.0]).unwrap();
        let back = a.matvec(&z);
        for (b, e) in back.iter().zip([1.0, 2.0, 3.0]) {
            assert!((b - e).abs() < 1e-14);
        }
        let sing = Matrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]);
        assert_eq!(solve_qr(&sing, &[1.0, 1.0]), Err(NumericsError::Singular));
    }
}
