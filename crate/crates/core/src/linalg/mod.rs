//! Fixed-size complex linear algebra for qubit (2×2) and two-qubit (4×4)
//! operators.
//!
//! Everything here is stack allocated and sized at compile time through a
//! const generic, so a `Matrix2` can never be handed to a routine expecting a
//! `Matrix4`.

mod eigen;

pub use eigen::{
    general_eigenvalues, hermitian_eigensystem, matrix_sqrt_psd, singular_values,
    HermitianEigen,
};

use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Default tolerance for structural predicates (Hermiticity, PSD, unit trace).
pub const DEFAULT_TOL: f64 = 1e-9;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Dense `N × N` complex matrix, row-major.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ComplexMatrix<const N: usize> {
    entries: [[Complex64; N]; N],
}

pub type Matrix2 = ComplexMatrix<2>;
pub type Matrix4 = ComplexMatrix<4>;

/// `σ₀ = I, σ₁ = σ_x, σ₂ = σ_y, σ₃ = σ_z`.
pub const PAULI: [Matrix2; 4] = [
    ComplexMatrix::from_rows([[ONE, ZERO], [ZERO, ONE]]),
    ComplexMatrix::from_rows([[ZERO, ONE], [ONE, ZERO]]),
    ComplexMatrix::from_rows([[ZERO, Complex64::new(0.0, -1.0)], [I, ZERO]]),
    ComplexMatrix::from_rows([[ONE, ZERO], [ZERO, Complex64::new(-1.0, 0.0)]]),
];

/// Pauli matrix `σ_k`, with `k = 0` the identity.
pub fn pauli(k: usize) -> Result<Matrix2> {
    PAULI.get(k).copied().ok_or(Error::PauliIndex(k))
}

/// Kronecker product `A ⊗ B`; the first factor acts on the more significant
/// qubit, so `|jk⟩` sits at index `2j + k`.
pub fn tensor_product(a: &Matrix2, b: &Matrix2) -> Matrix4 {
    let mut out = Matrix4::zeros();
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    out[(2 * i + k, 2 * j + l)] = a[(i, j)] * b[(k, l)];
                }
            }
        }
    }
    out
}

impl<const N: usize> ComplexMatrix<N> {
    pub const fn from_rows(entries: [[Complex64; N]; N]) -> Self {
        Self { entries }
    }

    pub const fn zeros() -> Self {
        Self { entries: [[ZERO; N]; N] }
    }

    pub fn identity() -> Self {
        Self::from_real_diagonal(&[1.0; N])
    }

    pub fn from_real_diagonal(diag: &[f64; N]) -> Self {
        let mut m = Self::zeros();
        for (i, &d) in diag.iter().enumerate() {
            m.entries[i][i] = Complex64::new(d, 0.0);
        }
        m
    }

    pub fn from_real_rows(rows: [[f64; N]; N]) -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            for j in 0..N {
                m.entries[i][j] = Complex64::new(rows[i][j], 0.0);
            }
        }
        m
    }

    /// Outer product `|u⟩⟨v|`.
    pub fn outer(u: &[Complex64; N], v: &[Complex64; N]) -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            for j in 0..N {
                m.entries[i][j] = u[i] * v[j].conj();
            }
        }
        m
    }

    pub const fn dim(&self) -> usize {
        N
    }

    pub fn entries(&self) -> &[[Complex64; N]; N] {
        &self.entries
    }

    pub fn column(&self, j: usize) -> [Complex64; N] {
        std::array::from_fn(|i| self.entries[i][j])
    }

    pub fn adjoint(&self) -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            for j in 0..N {
                m.entries[j][i] = self.entries[i][j].conj();
            }
        }
        m
    }

    /// Entrywise complex conjugate (not the adjoint).
    pub fn conj(&self) -> Self {
        self.map(|z| z.conj())
    }

    pub fn transpose(&self) -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            for j in 0..N {
                m.entries[j][i] = self.entries[i][j];
            }
        }
        m
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        let mut m = *self;
        m.entries.iter_mut().flatten().for_each(|z| *z = f(*z));
        m
    }

    pub fn scale(&self, factor: f64) -> Self {
        self.map(|z| z * factor)
    }

    pub fn scale_complex(&self, factor: Complex64) -> Self {
        self.map(|z| z * factor)
    }

    pub fn trace(&self) -> Complex64 {
        (0..N).map(|i| self.entries[i][i]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries
            .iter()
            .flatten()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Largest entrywise modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.entries
            .iter()
            .flatten()
            .zip(other.entries.iter().flatten())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Largest `|H_ij − conj(H_ji)|`.
    pub fn hermiticity_violation(&self) -> f64 {
        let mut worst = 0.0_f64;
        for i in 0..N {
            for j in i..N {
                worst = worst.max((self.entries[i][j] - self.entries[j][i].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_violation() <= tol
    }

    /// Hermitian with every eigenvalue `≥ −tol`.
    pub fn is_psd(&self, tol: f64) -> bool {
        self.is_hermitian(tol)
            && hermitian_eigensystem(self, tol)
                .map(|e| e.min_value() >= -tol)
                .unwrap_or(false)
    }

    /// `(H + H†)/2`.
    pub fn hermitian_part(&self) -> Self {
        (*self + self.adjoint()).scale(0.5)
    }

    pub fn mul_vec(&self, v: &[Complex64; N]) -> [Complex64; N] {
        std::array::from_fn(|i| (0..N).map(|j| self.entries[i][j] * v[j]).sum())
    }

    /// Determinant by LU factorisation with partial pivoting.
    pub fn determinant(&self) -> Complex64 {
        let mut a = self.entries;
        let mut det = ONE;
        for col in 0..N {
            let pivot = (col..N)
                .max_by(|&x, &y| a[x][col].norm().total_cmp(&a[y][col].norm()))
                .unwrap_or(col);
            if a[pivot][col] == ZERO {
                return ZERO;
            }
            if pivot != col {
                a.swap(pivot, col);
                det = -det;
            }
            det *= a[col][col];
            for row in col + 1..N {
                let factor = a[row][col] / a[col][col];
                for k in col..N {
                    let v = a[col][k];
                    a[row][k] -= factor * v;
                }
            }
        }
        det
    }

    /// Spectral norm, as the largest singular value.
    pub fn operator_norm(&self) -> f64 {
        let gram = self.adjoint() * *self;
        hermitian_eigensystem(&gram, f64::INFINITY)
            .map(|e| e.values[0].max(0.0).sqrt())
            .unwrap_or(f64::NAN)
    }
}

impl<const N: usize> Default for ComplexMatrix<N> {
    fn default() -> Self {
        Self::zeros()
    }
}

impl<const N: usize> Index<(usize, usize)> for ComplexMatrix<N> {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.entries[i][j]
    }
}

impl<const N: usize> IndexMut<(usize, usize)> for ComplexMatrix<N> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.entries[i][j]
    }
}

impl<const N: usize> Add for ComplexMatrix<N> {
    type Output = Self;

    fn add(mut self, rhs: Self) -> Self {
        for i in 0..N {
            for j in 0..N {
                self.entries[i][j] += rhs.entries[i][j];
            }
        }
        self
    }
}

impl<const N: usize> Sub for ComplexMatrix<N> {
    type Output = Self;

    fn sub(mut self, rhs: Self) -> Self {
        for i in 0..N {
            for j in 0..N {
                self.entries[i][j] -= rhs.entries[i][j];
            }
        }
        self
    }
}

impl<const N: usize> Neg for ComplexMatrix<N> {
    type Output = Self;

    fn neg(self) -> Self {
        self.map(|z| -z)
    }
}

impl<const N: usize> Mul for ComplexMatrix<N> {
    type Output = Self;

    fn mul(self, rhs: Self) -> Self {
        let mut out = Self::zeros();
        for i in 0..N {
            for k in 0..N {
                let a = self.entries[i][k];
                if a == ZERO {
                    continue;
                }
                for j in 0..N {
                    out.entries[i][j] += a * rhs.entries[k][j];
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn pauli_matrices() {
        assert_eq!(pauli(0).unwrap(), Matrix2::identity());
        assert_eq!(
            pauli(2).unwrap(),
            Matrix2::from_rows([[c(0.0, 0.0), c(0.0, -1.0)], [c(0.0, 1.0), c(0.0, 0.0)]])
        );
        assert_eq!(
            pauli(3).unwrap(),
            Matrix2::from_real_rows([[1.0, 0.0], [0.0, -1.0]])
        );
        assert_eq!(pauli(4), Err(Error::PauliIndex(4)));
        for k in 0..4 {
            let s = pauli(k).unwrap();
            assert!(s.is_hermitian(0.0));
            assert_eq!(s * s.adjoint(), Matrix2::identity());
            if k > 0 {
                assert_eq!(s.trace(), ZERO);
            }
        }
    }

    #[test]
    fn kronecker_examples() {
        assert_eq!(
            tensor_product(&PAULI[0], &PAULI[0]),
            Matrix4::identity()
        );
        assert_eq!(
            tensor_product(&PAULI[3], &PAULI[0]),
            Matrix4::from_real_diagonal(&[1.0, 1.0, -1.0, -1.0])
        );
        let xx = tensor_product(&PAULI[1], &PAULI[1]);
        let ket00 = [ONE, ZERO, ZERO, ZERO];
        assert_eq!(xx.mul_vec(&ket00), [ZERO, ZERO, ZERO, ONE]);
    }

    #[test]
    fn mixed_product_and_trace() {
        let a = Matrix2::from_rows([[c(0.3, 0.1), c(-1.0, 0.2)], [c(0.5, 0.0), c(0.0, 2.0)]]);
        let b = Matrix2::from_rows([[c(1.0, -1.0), c(0.0, 0.7)], [c(0.2, 0.2), c(-0.4, 0.0)]]);
        let cm = PAULI[2].scale(0.7) + PAULI[1];
        let d = Matrix2::from_real_rows([[0.1, 0.2], [0.3, 0.4]]);
        let lhs = tensor_product(&a, &b) * tensor_product(&cm, &d);
        let rhs = tensor_product(&(a * cm), &(b * d));
        assert!(lhs.max_abs_diff(&rhs) < 1e-12);
        let tr = tensor_product(&a, &b).trace();
        assert!((tr - a.trace() * b.trace()).norm() < 1e-12);
        let sum = tensor_product(&(a + b), &cm);
        let split = tensor_product(&a, &cm) + tensor_product(&b, &cm);
        assert!(sum.max_abs_diff(&split) < 1e-15);
    }

    #[test]
    fn determinant_matches_closed_form_2x2() {
        let m = Matrix2::from_rows([[c(1.0, 2.0), c(3.0, -1.0)], [c(0.5, 0.5), c(-2.0, 0.0)]]);
        let direct = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
        assert!((m.determinant() - direct).norm() < 1e-14);
        assert_eq!(Matrix4::from_real_diagonal(&[4.0, 3.0, 2.0, 1.0]).determinant(), c(24.0, 0.0));
    }

    #[test]
    fn operator_norm_of_scaled_unitary() {
        assert!((PAULI[2].scale(0.5).operator_norm() - 0.5).abs() < 1e-14);
    }
}
