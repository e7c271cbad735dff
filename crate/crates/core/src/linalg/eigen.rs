use num_complex::Complex64;

use super::ComplexMatrix;
use crate::error::{Error, Result};

const MAX_JACOBI_SWEEPS: usize = 64;
const QR_ITERATIONS_PER_EIGENVALUE: usize = 60;

/// Spectrum of a Hermitian matrix: eigenvalues in descending order and the
/// matching orthonormal eigenvectors stored as columns.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HermitianEigen<const N: usize> {
    pub values: [f64; N],
    pub vectors: ComplexMatrix<N>,
}

impl<const N: usize> HermitianEigen<N> {
    pub fn min_value(&self) -> f64 {
        self.values[N - 1]
    }

    pub fn vector(&self, i: usize) -> [Complex64; N] {
        self.vectors.column(i)
    }

    /// `Σ f(λ_i) |v_i⟩⟨v_i|`.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix<N> {
        let mut out = ComplexMatrix::zeros();
        for i in 0..N {
            let v = self.vector(i);
            out = out + ComplexMatrix::outer(&v, &v).scale(f(self.values[i]));
        }
        out
    }

    pub fn reconstruct(&self) -> ComplexMatrix<N> {
        self.reconstruct_with(|x| x)
    }
}

/// Unitary `J` on the `(p, q)` plane with `J† [[app, apq], [apq*, aqq]] J`
/// diagonal. Returned as `[[J_pp, J_pq], [J_qp, J_qq]]`.
fn jacobi_rotation(app: f64, aqq: f64, apq: Complex64) -> [[Complex64; 2]; 2] {
    let r = apq.norm();
    let phase = apq / r;
    let theta = (aqq - app) / (2.0 * r);
    let t = theta.signum() / (theta.abs() + theta.hypot(1.0));
    let c = 1.0 / t.hypot(1.0);
    let s = t * c;
    let back = phase.conj();
    [
        [Complex64::new(c, 0.0), Complex64::new(s, 0.0)],
        [back * -s, back * c],
    ]
}

/// Right-multiplies columns `p`, `q` of `m` by the 2×2 unitary `j`.
fn rotate_columns<const N: usize>(
    m: &mut ComplexMatrix<N>,
    p: usize,
    q: usize,
    j: &[[Complex64; 2]; 2],
) {
    for k in 0..N {
        let (xp, xq) = (m[(k, p)], m[(k, q)]);
        m[(k, p)] = xp * j[0][0] + xq * j[1][0];
        m[(k, q)] = xp * j[0][1] + xq * j[1][1];
    }
}

/// Left-multiplies rows `p`, `q` of `m` by `j†`.
fn rotate_rows_adjoint<const N: usize>(
    m: &mut ComplexMatrix<N>,
    p: usize,
    q: usize,
    j: &[[Complex64; 2]; 2],
) {
    for k in 0..N {
        let (xp, xq) = (m[(p, k)], m[(q, k)]);
        m[(p, k)] = j[0][0].conj() * xp + j[1][0].conj() * xq;
        m[(q, k)] = j[0][1].conj() * xp + j[1][1].conj() * xq;
    }
}

/// Eigen-decomposition of a Hermitian matrix by cyclic complex Jacobi
/// rotations.
///
/// Input whose Hermiticity violation exceeds `tol` is rejected; otherwise the
/// Hermitian part `(H + H†)/2` is diagonalised.
pub fn hermitian_eigensystem<const N: usize>(
    h: &ComplexMatrix<N>,
    tol: f64,
) -> Result<HermitianEigen<N>> {
    let violation = h.hermiticity_violation();
    if violation > tol || violation.is_nan() {
        return Err(Error::NotHermitian { violation });
    }
    let mut a = h.hermitian_part();
    let mut v = ComplexMatrix::<N>::identity();
    let scale = a.frobenius_norm();

    let mut converged = false;
    for _ in 0..MAX_JACOBI_SWEEPS {
        let off: f64 = (0..N)
            .flat_map(|p| (p + 1..N).map(move |q| (p, q)))
            .map(|(p, q)| a[(p, q)].norm_sqr())
            .sum();
        if off.sqrt() <= f64::EPSILON * scale || off == 0.0 {
            converged = true;
            break;
        }
        for p in 0..N {
            for q in p + 1..N {
                if a[(p, q)].norm() <= f64::MIN_POSITIVE {
                    continue;
                }
                let j = jacobi_rotation(a[(p, p)].re, a[(q, q)].re, a[(p, q)]);
                rotate_columns(&mut a, p, q, &j);
                rotate_rows_adjoint(&mut a, p, q, &j);
                a[(p, q)] = Complex64::new(0.0, 0.0);
                a[(q, p)] = Complex64::new(0.0, 0.0);
                a[(p, p)].im = 0.0;
                a[(q, q)].im = 0.0;
                rotate_columns(&mut v, p, q, &j);
            }
        }
    }
    if !converged {
        return Err(Error::NoConvergence {
            iterations: MAX_JACOBI_SWEEPS,
        });
    }

    let mut order: [usize; N] = std::array::from_fn(|i| i);
    order.sort_by(|&x, &y| a[(y, y)].re.total_cmp(&a[(x, x)].re));
    let values = order.map(|i| a[(i, i)].re);
    let mut vectors = ComplexMatrix::zeros();
    for (dst, &src) in order.iter().enumerate() {
        for k in 0..N {
            vectors[(k, dst)] = v[(k, src)];
        }
    }
    Ok(HermitianEigen { values, vectors })
}

/// Singular values in descending order, by one-sided Jacobi orthogonalisation
/// of the columns. Accurate to `ε·‖M‖` in absolute terms, including the
/// smallest values (no squaring of the matrix).
pub fn singular_values<const N: usize>(m: &ComplexMatrix<N>) -> Result<[f64; N]> {
    let mut w = *m;
    let mut converged = false;
    for _ in 0..MAX_JACOBI_SWEEPS {
        let mut rotated = false;
        for p in 0..N {
            for q in p + 1..N {
                let (mut alpha, mut beta) = (0.0, 0.0);
                let mut gamma = Complex64::new(0.0, 0.0);
                for k in 0..N {
                    alpha += w[(k, p)].norm_sqr();
                    beta += w[(k, q)].norm_sqr();
                    gamma += w[(k, p)].conj() * w[(k, q)];
                }
                // The accumulated inner product carries roundoff of order
                // N·ε·‖p‖‖q‖, so a tighter threshold can stall.
                if gamma.norm() <= N as f64 * f64::EPSILON * (alpha * beta).sqrt()
                    || gamma.norm() <= f64::MIN_POSITIVE
                {
                    continue;
                }
                rotated = true;
                let j = jacobi_rotation(alpha, beta, gamma);
                rotate_columns(&mut w, p, q, &j);
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NoConvergence {
            iterations: MAX_JACOBI_SWEEPS,
        });
    }
    let mut values: [f64; N] =
        std::array::from_fn(|j| (0..N).map(|k| w[(k, j)].norm_sqr()).sum::<f64>().sqrt());
    values.sort_by(|x, y| y.total_cmp(x));
    Ok(values)
}

/// Householder reduction to upper Hessenberg form (similarity transform).
fn hessenberg<const N: usize>(m: &ComplexMatrix<N>) -> ComplexMatrix<N> {
    let mut h = *m;
    for k in 0..N.saturating_sub(2) {
        let tail_norm = (k + 2..N).map(|i| h[(i, k)].norm_sqr()).sum::<f64>();
        if tail_norm == 0.0 {
            continue;
        }
        let x0 = h[(k + 1, k)];
        let norm = (tail_norm + x0.norm_sqr()).sqrt();
        let phase = if x0.norm() == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            x0 / x0.norm()
        };
        let mut v = [Complex64::new(0.0, 0.0); N];
        v[k + 1] = x0 + phase * norm;
        for i in k + 2..N {
            v[i] = h[(i, k)];
        }
        let vnorm_sqr: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        // H ← P H P with P = I − 2 v v† / (v† v)
        for j in 0..N {
            let dot: Complex64 = (k + 1..N).map(|i| v[i].conj() * h[(i, j)]).sum();
            let f = dot * (2.0 / vnorm_sqr);
            for i in k + 1..N {
                let vi = v[i];
                h[(i, j)] -= vi * f;
            }
        }
        for i in 0..N {
            let dot: Complex64 = (k + 1..N).map(|j| h[(i, j)] * v[j]).sum();
            let f = dot * (2.0 / vnorm_sqr);
            for j in k + 1..N {
                let vj = v[j].conj();
                h[(i, j)] -= f * vj;
            }
        }
        for i in k + 2..N {
            h[(i, k)] = Complex64::new(0.0, 0.0);
        }
    }
    h
}

/// Eigenvalue of the 2×2 block `[[a, b], [c, d]]` closest to `d`.
fn wilkinson_shift(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Complex64 {
    let half = (a - d) * 0.5;
    let disc = (half * half + b * c).sqrt();
    let mean = (a + d) * 0.5;
    let (r1, r2) = (mean + disc, mean - disc);
    if (r1 - d).norm() <= (r2 - d).norm() {
        r1
    } else {
        r2
    }
}

/// All eigenvalues of a general complex matrix, with multiplicity and in no
/// particular order.
///
/// Hessenberg reduction followed by single-shift QR sweeps (Wilkinson shift,
/// with an exceptional shift every tenth stalled iteration). Exhausting the
/// iteration budget is reported as [`Error::NoConvergence`].
pub fn general_eigenvalues<const N: usize>(m: &ComplexMatrix<N>) -> Result<[Complex64; N]> {
    let mut h = hessenberg(m);
    let mut eig = [Complex64::new(0.0, 0.0); N];
    let norm = h.frobenius_norm();
    if N == 0 {
        return Ok(eig);
    }
    if norm == 0.0 {
        return Ok(eig);
    }

    let mut hi = N - 1;
    let mut iterations = 0usize;
    let mut total = 0usize;
    let budget = QR_ITERATIONS_PER_EIGENVALUE * N;
    while hi > 0 {
        // Locate the start of the unreduced block ending at `hi`.
        let mut lo = hi;
        while lo > 0 {
            let diag = h[(lo, lo)].norm() + h[(lo - 1, lo - 1)].norm();
            let reference = if diag == 0.0 { norm } else { diag };
            if h[(lo, lo - 1)].norm() <= f64::EPSILON * reference {
                h[(lo, lo - 1)] = Complex64::new(0.0, 0.0);
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            eig[hi] = h[(hi, hi)];
            hi -= 1;
            iterations = 0;
            continue;
        }

        iterations += 1;
        total += 1;
        if total > budget {
            return Err(Error::NoConvergence { iterations: total });
        }

        let shift = if iterations % 10 == 0 {
            let extra = if hi >= 2 { h[(hi - 1, hi - 2)].re.abs() } else { 0.0 };
            h[(hi, hi)] + Complex64::new(h[(hi, hi - 1)].re.abs() + extra, 0.0)
        } else {
            wilkinson_shift(
                h[(hi - 1, hi - 1)],
                h[(hi - 1, hi)],
                h[(hi, hi - 1)],
                h[(hi, hi)],
            )
        };

        // One QR step on the active block: H − μI = QR, H ← RQ + μI.
        for k in lo..=hi {
            h[(k, k)] -= shift;
        }
        let mut rotations = [(Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)); N];
        for k in lo..hi {
            let (x, y) = (h[(k, k)], h[(k + 1, k)]);
            let r = x.norm().hypot(y.norm());
            if r == 0.0 {
                continue;
            }
            let (c, s) = (x / r, y / r);
            rotations[k] = (c, s);
            for j in k..=hi {
                let (a, b) = (h[(k, j)], h[(k + 1, j)]);
                h[(k, j)] = c.conj() * a + s.conj() * b;
                h[(k + 1, j)] = -s * a + c * b;
            }
        }
        for k in lo..hi {
            let (c, s) = rotations[k];
            for i in lo..=(k + 2).min(hi) {
                let (a, b) = (h[(i, k)], h[(i, k + 1)]);
                h[(i, k)] = a * c + b * s;
                h[(i, k + 1)] = -a * s.conj() + b * c.conj();
            }
        }
        for k in lo..=hi {
            h[(k, k)] += shift;
        }
    }
    eig[0] = h[(0, 0)];
    Ok(eig)
}

/// Hermitian PSD square root. Eigenvalues in `[−tol, 0)` are clamped to zero;
/// anything more negative is rejected.
pub fn matrix_sqrt_psd<const N: usize>(
    h: &ComplexMatrix<N>,
    tol: f64,
) -> Result<ComplexMatrix<N>> {
    let eig = hermitian_eigensystem(h, tol)?;
    let min = eig.min_value();
    if min < -tol {
        return Err(Error::NotPsd {
            min_eigenvalue: min,
        });
    }
    Ok(eig.reconstruct_with(|x| x.max(0.0).sqrt()))
}
