use nalgebra::DMatrix;
use num_complex::Complex64;

/// Eigenvalues of a Hermitian matrix by cyclic complex Jacobi rotations,
/// unsorted.
///
/// Density matrices are routinely rank deficient (pure and dephased states
/// have clusters of zero eigenvalues), and shift-based tridiagonal solvers
/// can lose orthogonality there and emit NaN or infinite eigenvalues.
/// Jacobi sweeps have no shifts to misfire and converge unconditionally on
/// Hermitian input, which is all that is needed at dimension ≤ 16.
pub fn hermitian_eigenvalues(matrix: &DMatrix<Complex64>) -> Vec<f64> {
    let d = matrix.nrows();
    debug_assert_eq!(d, matrix.ncols(), "eigenvalues of a square matrix");
    let mut a = matrix.clone();
    let scale = a.iter().map(|c| c.norm()).fold(0.0, f64::max).max(1.0);
    let tol = f64::EPSILON * scale;

    for _sweep in 0..64 {
        let mut off: f64 = 0.0;
        for p in 0..d {
            for q in (p + 1)..d {
                off = off.max(a[(p, q)].norm());
            }
        }
        if off <= tol {
            break;
        }
        for p in 0..d {
            for q in (p + 1)..d {
                let beta = a[(p, q)];
                let b = beta.norm();
                if b == 0.0 {
                    continue;
                }
                // unitary Givens rotation G with G[p][p] = c,
                // G[p][q] = s·e^{iφ}, G[q][p] = −s·e^{−iφ}, G[q][q] = c,
                // where e^{iφ} is the phase of the pivot entry; the real
                // rotation angle follows the classic symmetric recipe
                let phase = beta / b;
                let tau = (a[(q, q)].re - a[(p, p)].re) / (2.0 * b);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let s_phase = phase * s;

                // A ← G†AG: combine columns p and q, then rows p and q
                for r in 0..d {
                    let col_p = a[(r, p)];
                    let col_q = a[(r, q)];
                    a[(r, p)] = col_p * c - col_q * s_phase.conj();
                    a[(r, q)] = col_p * s_phase + col_q * c;
                }
                for r in 0..d {
                    let row_p = a[(p, r)];
                    let row_q = a[(q, r)];
                    a[(p, r)] = row_p * c - row_q * s_phase;
                    a[(q, r)] = row_p * s_phase.conj() + row_q * c;
                }
                a[(p, q)] = Complex64::ZERO;
                a[(q, p)] = Complex64::ZERO;
            }
        }
    }
    (0..d).map(|i| a[(i, i)].re).collect()
}
