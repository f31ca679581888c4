use super::{dot, norm2, Matrix, NumericsError};

/// Result of a power-iteration run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralEstimate {
    /// Estimated largest singular value.
    pub value: f64,
    pub iterations: usize,
    /// `false` when `max_iter` was hit before the relative change fell
    /// below `tol`; `value` is then the best estimate available.
    pub converged: bool,
}

/// Largest singular value of `m` by power iteration on `MᵀM`.
///
/// Starts from the normalized all-ones vector and stops once the Rayleigh
/// quotient changes by less than `tol` relative to its current value.
pub fn spectral_norm(
    m: &Matrix,
    tol: f64,
    max_iter: usize,
) -> Result<SpectralEstimate, NumericsError> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(NumericsError::InvalidTolerance(tol));
    }
    if m.as_slice().iter().all(|v| *v == 0.0) {
        return Err(NumericsError::ZeroMatrix);
    }
    let n = m.cols();
    let mut v = vec![1.0 / (n as f64).sqrt(); n];
    let mut lambda = 0.0;
    for it in 1..=max_iter {
        let w = m.tr_matvec(&m.matvec(&v));
        let rayleigh = dot(&v, &w);
        let wn = norm2(&w);
        if wn == 0.0 {
            // Start vector in the null space; restart from a basis vector.
            v = vec![0.0; n];
            v[(it - 1) % n] = 1.0;
            continue;
        }
        let done = it > 1 && (rayleigh - lambda).abs() <= tol * rayleigh;
        lambda = rayleigh;
        v = w.iter().map(|x| x / wn).collect();
        if done {
            return Ok(SpectralEstimate {
                value: lambda.sqrt(),
                iterations: it,
                converged: true,
            });
        }
    }
    log::warn!("spectral_norm: no convergence within {max_iter} iterations");
    Ok(SpectralEstimate {
        value: lambda.max(0.0).sqrt(),
        iterations: max_iter,
        converged: false,
    })
}
