//! Concurrence and entanglement of formation of two-qubit states.
//!
//! `C(ρ) = max(0, λ₁ − λ₂ − λ₃ − λ₄)` where `λ_i` are, in descending order,
//! the eigenvalues of `R = √(√ρ ρ̃ √ρ)` with `ρ̃ = (σ_y⊗σ_y) ρ* (σ_y⊗σ_y)`.
//! Three equivalent routes to the `λ_i` are provided; see [`LambdaRoute`].

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{
    general_eigenvalues, hermitian_eigensystem, matrix_sqrt_psd, singular_values, tensor_product,
    Matrix4, DEFAULT_TOL, PAULI,
};
use crate::state::TwoQubitState;

/// Eigenvalues of `ρρ̃` whose real part is below `−CLAMP_TOL` or whose
/// imaginary part exceeds it are a numerical failure; smaller negatives clamp
/// to zero.
pub const CLAMP_TOL: f64 = 1e-8;

/// How the `λ_i` are obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LambdaRoute {
    /// Square roots of the eigenvalues of the non-Hermitian `ρρ̃`.
    SpinFlipProduct,
    /// Eigenvalues of the Hermitian `R = √(√ρ ρ̃ √ρ)`.
    RootForm,
    /// Singular values of `√ρ̃ √ρ`, equal to the eigenvalues of `R` without
    /// ever squaring: `(√ρ̃√ρ)†(√ρ̃√ρ) = √ρ ρ̃ √ρ`.
    SingularValues,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ConcurrenceReport {
    /// Descending, clamped to be non-negative.
    pub lambdas: [f64; 4],
    pub concurrence: f64,
    pub eof: f64,
}

impl ConcurrenceReport {
    fn from_lambdas(lambdas: [f64; 4]) -> Self {
        let concurrence = (lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3]).clamp(0.0, 1.0);
        Self {
            lambdas,
            concurrence,
            eof: eof_from_concurrence(concurrence),
        }
    }
}

fn sigma_yy() -> Matrix4 {
    tensor_product(&PAULI[2], &PAULI[2])
}

/// Spin-flipped matrix `ρ̃ = (σ_y⊗σ_y) ρ* (σ_y⊗σ_y)`.
pub fn spin_flip(s: &TwoQubitState) -> Matrix4 {
    spin_flip_matrix(s.rho())
}

pub(crate) fn spin_flip_matrix(rho: &Matrix4) -> Matrix4 {
    let yy = sigma_yy();
    yy * rho.conj() * yy
}

/// Concurrence, `λ` spectrum and EoF, along [`LambdaRoute::SingularValues`].
///
/// The other two routes take square roots of computed eigenvalues, which
/// turns `1e-17` roundoff near rank-deficient states into `~1e-8` errors in
/// the `λ_i`; they are kept as cross-checks.
pub fn concurrence(s: &TwoQubitState) -> Result<ConcurrenceReport> {
    concurrence_via(s, LambdaRoute::SingularValues)
}

pub fn concurrence_via(s: &TwoQubitState, route: LambdaRoute) -> Result<ConcurrenceReport> {
    Ok(ConcurrenceReport::from_lambdas(lambdas(s, route)?))
}

/// Descending `λ_i` computed along `route`.
pub fn lambdas(s: &TwoQubitState, route: LambdaRoute) -> Result<[f64; 4]> {
    let mut out = match route {
        LambdaRoute::SpinFlipProduct => lambdas_spin_flip_product(s)?,
        LambdaRoute::RootForm => lambdas_root_form(s)?,
        LambdaRoute::SingularValues => lambdas_singular(s)?,
    };
    out.sort_by(|x, y| y.total_cmp(x));
    Ok(out)
}

fn lambdas_spin_flip_product(s: &TwoQubitState) -> Result<[f64; 4]> {
    let product = *s.rho() * spin_flip(s);
    let eig = general_eigenvalues(&product)?;
    let mut out = [0.0; 4];
    for (dst, z) in out.iter_mut().zip(eig) {
        if z.im.abs() > CLAMP_TOL {
            return Err(Error::ComplexEigenvalue { imag: z.im });
        }
        if z.re < -CLAMP_TOL {
            return Err(Error::NegativeEigenvalue { value: z.re });
        }
        *dst = z.re.max(0.0).sqrt();
    }
    Ok(out)
}

fn lambdas_root_form(s: &TwoQubitState) -> Result<[f64; 4]> {
    let sqrt_rho = matrix_sqrt_psd(s.rho(), DEFAULT_TOL)?;
    let inner = (sqrt_rho * spin_flip(s) * sqrt_rho).hermitian_part();
    let r = matrix_sqrt_psd(&inner, CLAMP_TOL)?;
    let eig = hermitian_eigensystem(&r, DEFAULT_TOL)?;
    Ok(eig.values.map(|x| x.max(0.0)))
}

fn lambdas_singular(s: &TwoQubitState) -> Result<[f64; 4]> {
    let sqrt_rho = matrix_sqrt_psd(s.rho(), DEFAULT_TOL)?;
    let sqrt_flipped = spin_flip_matrix(&sqrt_rho);
    singular_values(&(sqrt_flipped * sqrt_rho))
}

/// Binary entropy in bits, with `h(0) = h(1) = 0`.
pub fn binary_entropy(x: f64) -> f64 {
    if x <= 0.0 || x >= 1.0 {
        return 0.0;
    }
    -x * x.log2() - (1.0 - x) * (1.0 - x).log2()
}

/// `h((1 + √(1 − C²)) / 2)`.
pub fn eof_from_concurrence(c: f64) -> f64 {
    let c = c.clamp(0.0, 1.0);
    binary_entropy(0.5 * (1.0 + (1.0 - c * c).sqrt()))
}

pub fn eof(s: &TwoQubitState) -> Result<f64> {
    Ok(concurrence(s)?.eof)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Matrix2;
    use crate::sampling::random_unitary;
    use crate::state::{random_state, BellState};
    use num_complex::Complex64;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const ROUTES: [LambdaRoute; 3] = [
        LambdaRoute::SpinFlipProduct,
        LambdaRoute::RootForm,
        LambdaRoute::SingularValues,
    ];

    #[test]
    fn bell_states_are_maximal() {
        for which in BellState::ALL {
            let r = concurrence(&TwoQubitState::bell(which)).unwrap();
            assert!((r.concurrence - 1.0).abs() < 1e-12, "{which:?}");
            assert!((r.eof - 1.0).abs() < 1e-12);
            assert!((r.lambdas[0] - 1.0).abs() < 1e-12);
            assert!(r.lambdas[1..].iter().all(|l| *l < 1e-12));
        }
    }

    #[test]
    fn werner_matches_bell_diagonal_weights() {
        // Bell-diagonal states: C = max(0, 2 w_max − 1), with the singlet
        // weight (1 + 3p)/4 dominating for p ≥ 0.
        for i in 0..=20 {
            let p = i as f64 / 20.0;
            let s = TwoQubitState::werner(p).unwrap();
            let singlet = TwoQubitState::bell(BellState::PsiMinus);
            let weight = (*s.rho() * *singlet.rho()).trace().re;
            let expected = (2.0 * weight - 1.0).max(0.0);
            let c = concurrence(&s).unwrap().concurrence;
            assert!((c - expected).abs() < 1e-12, "p = {p}: {c} vs {expected}");
        }
        let c = concurrence(&TwoQubitState::werner(0.5).unwrap()).unwrap().concurrence;
        assert!((c - 0.25).abs() < 1e-12);
    }

    #[test]
    fn eof_golden_values() {
        assert_eq!(eof_from_concurrence(1.0), 1.0);
        assert_eq!(eof_from_concurrence(0.0), 0.0);
        assert!((eof_from_concurrence(0.6) - 0.468_995_593_589_281_1).abs() < 1e-12);
        assert_eq!(binary_entropy(0.0), 0.0);
        assert_eq!(binary_entropy(1.0), 0.0);
        let mut last = 0.0;
        for i in 1..=1000 {
            let e = eof_from_concurrence(i as f64 / 1000.0);
            assert!(e >= last && e <= 1.0);
            last = e;
        }
    }

    #[test]
    fn spin_flip_examples() {
        let mixed = TwoQubitState::maximally_mixed();
        assert!(spin_flip(&mixed).max_abs_diff(mixed.rho()) < 1e-15);
        let phi = TwoQubitState::bell(BellState::PhiPlus);
        assert!(spin_flip(&phi).max_abs_diff(phi.rho()) < 1e-15);
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        let ket00 = TwoQubitState::pure([one, zero, zero, zero]).unwrap();
        let ket11 = TwoQubitState::pure([zero, zero, zero, one]).unwrap();
        assert!(spin_flip(&ket00).max_abs_diff(ket11.rho()) < 1e-15);
        for seed in 0..100 {
            let flipped = spin_flip(&random_state(seed));
            assert!(TwoQubitState::from_density_matrix(&flipped).is_ok());
        }
    }

    #[test]
    fn product_states_have_zero_concurrence() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..500 {
            let u = random_unitary(&mut rng).column(0);
            let v = random_unitary(&mut rng).column(0);
            let psi = [u[0] * v[0], u[0] * v[1], u[1] * v[0], u[1] * v[1]];
            let r = concurrence(&TwoQubitState::pure(psi).unwrap()).unwrap();
            assert!(r.concurrence < 1e-10, "{}", r.concurrence);
            assert!(r.eof < 1e-10);
        }
    }

    #[test]
    fn routes_agree_on_random_states() {
        for seed in 0..1000 {
            let s = random_state(seed);
            let reference = lambdas(&s, LambdaRoute::SingularValues).unwrap();
            for route in ROUTES {
                let l = lambdas(&s, route).unwrap();
                for i in 0..4 {
                    assert!((l[i] - reference[i]).abs() < 1e-7, "{route:?} seed {seed}");
                }
            }
        }
    }

    #[test]
    fn spin_flip_product_spectrum_is_real_and_nonnegative() {
        for seed in 0..1000 {
            let s = random_state(seed);
            let eig = general_eigenvalues(&(*s.rho() * spin_flip(&s))).unwrap();
            for z in eig {
                assert!(z.im.abs() < 1e-10 && z.re >= -1e-10, "seed {seed}: {z}");
            }
        }
    }

    #[test]
    fn local_unitary_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for seed in 0..300 {
            let s = random_state(seed);
            let (u, v): (Matrix2, Matrix2) = (random_unitary(&mut rng), random_unitary(&mut rng));
            let w = tensor_product(&u, &v);
            let rotated = TwoQubitState::from_density_matrix(&(w * *s.rho() * w.adjoint())).unwrap();
            let (c0, c1) = (
                concurrence(&s).unwrap().concurrence,
                concurrence(&rotated).unwrap().concurrence,
            );
            assert!((c0 - c1).abs() < 1e-9);
        }
    }

    #[test]
    fn pure_state_determinant_formula() {
        use rand::Rng;
        use rand_distr::StandardNormal;
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..500 {
            let raw: [Complex64; 4] = std::array::from_fn(|_| {
                Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
            });
            let norm = raw.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            let psi = raw.map(|z| z / norm);
            let expected = 2.0 * (psi[0] * psi[3] - psi[1] * psi[2]).norm();
            let c = concurrence(&TwoQubitState::pure(psi).unwrap()).unwrap().concurrence;
            assert!((c - expected).abs() < 1e-10);
        }
    }
}
