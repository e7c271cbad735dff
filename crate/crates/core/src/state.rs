//! Two-qubit density matrices and their Pauli-basis coordinates.
//!
//! A [`TwoQubitState`] stores the density matrix together with its local Bloch
//! vectors `a`, `b` and correlation matrix `T`:
//!
//! ```text
//! ρ = ¼ (I⊗I + Σ a_j σ_j⊗I + Σ b_k I⊗σ_k + Σ T_jk σ_j⊗σ_k)
//! ```
//!
//! Both representations are checked against each other at construction, so
//! downstream code can use whichever is convenient.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigensystem, tensor_product, Matrix2, Matrix4, DEFAULT_TOL, PAULI};

pub type Vec3 = [f64; 3];
pub type Mat3 = [[f64; 3]; 3];

/// Largest imaginary residue tolerated when reading a real Pauli coefficient.
const COEFFICIENT_IMAG_TOL: f64 = 1e-10;

/// Which party holds a qubit (or applies an operation).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    #[serde(rename = "A")]
    Alice,
    #[serde(rename = "B")]
    Bob,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::Alice => Side::Bob,
            Side::Bob => Side::Alice,
        }
    }

    /// Embeds a single-qubit operator as `op ⊗ I` (Alice) or `I ⊗ op` (Bob).
    pub fn embed(self, op: &Matrix2) -> Matrix4 {
        match self {
            Side::Alice => tensor_product(op, &PAULI[0]),
            Side::Bob => tensor_product(&PAULI[0], op),
        }
    }
}

impl std::fmt::Display for Side {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Side::Alice => "A",
            Side::Bob => "B",
        })
    }
}

impl std::str::FromStr for Side {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "A" | "a" | "alice" | "Alice" => Ok(Side::Alice),
            "B" | "b" | "bob" | "Bob" => Ok(Side::Bob),
            _ => Err(Error::InvalidArgument(format!("unknown side {s:?}, expected A or B"))),
        }
    }
}

pub fn norm3(v: &Vec3) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn dot3(u: &Vec3, v: &Vec3) -> f64 {
    u.iter().zip(v).map(|(x, y)| x * y).sum()
}

/// `½(c₀ I + v·σ)`.
pub(crate) fn qubit_operator(c0: f64, v: &Vec3) -> Matrix2 {
    let mut m = PAULI[0].scale(c0);
    for (j, vj) in v.iter().enumerate() {
        m = m + PAULI[j + 1].scale(*vj);
    }
    m.scale(0.5)
}

/// Real Pauli coefficients `tr(M σ_j)` for `j = 0..=3` of a Hermitian 2×2.
pub(crate) fn pauli_coefficients(m: &Matrix2) -> [f64; 4] {
    std::array::from_fn(|j| (*m * PAULI[j]).trace().re)
}

/// Reduced state of one qubit, described by its Bloch vector.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SingleQubitState {
    bloch: Vec3,
}

impl SingleQubitState {
    pub fn new(bloch: Vec3) -> Result<Self> {
        let norm = norm3(&bloch);
        if norm > 1.0 + DEFAULT_TOL || !norm.is_finite() {
            return Err(Error::BlochNorm { norm });
        }
        Ok(Self { bloch })
    }

    pub fn bloch(&self) -> Vec3 {
        self.bloch
    }

    pub fn bloch_norm(&self) -> f64 {
        norm3(&self.bloch)
    }

    /// `½(I + r·σ)`.
    pub fn density_matrix(&self) -> Matrix2 {
        qubit_operator(1.0, &self.bloch)
    }

    /// `tr(ρ²) = ½(1 + |r|²)`.
    pub fn purity(&self) -> f64 {
        0.5 * (1.0 + dot3(&self.bloch, &self.bloch))
    }
}

/// Validated two-qubit density matrix with cached Pauli decomposition.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwoQubitState {
    rho: Matrix4,
    a: Vec3,
    b: Vec3,
    t: Mat3,
}

impl TwoQubitState {
    /// Validates `m` as a density matrix: Hermitian, unit trace and PSD, each
    /// to `1e-9`. The stored matrix is the Hermitian part of `m`.
    pub fn from_density_matrix(m: &Matrix4) -> Result<Self> {
        let violation = m.hermiticity_violation();
        if violation > DEFAULT_TOL || violation.is_nan() {
            return Err(Error::NotHermitian { violation });
        }
        let rho = m.hermitian_part();
        let trace = rho.trace().re;
        if (trace - 1.0).abs() > DEFAULT_TOL {
            return Err(Error::Trace { trace });
        }
        let min_eigenvalue = hermitian_eigensystem(&rho, DEFAULT_TOL)?.min_value();
        if min_eigenvalue < -DEFAULT_TOL {
            return Err(Error::NotPsd { min_eigenvalue });
        }

        let coefficient = |op: Matrix4| -> Result<f64> {
            let z = (rho * op).trace();
            if z.im.abs() > COEFFICIENT_IMAG_TOL {
                return Err(Error::NotHermitian { violation: z.im.abs() });
            }
            Ok(z.re)
        };
        let mut a = [0.0; 3];
        let mut b = [0.0; 3];
        let mut t = [[0.0; 3]; 3];
        for j in 0..3 {
            a[j] = coefficient(tensor_product(&PAULI[j + 1], &PAULI[0]))?;
            b[j] = coefficient(tensor_product(&PAULI[0], &PAULI[j + 1]))?;
            for k in 0..3 {
                t[j][k] = coefficient(tensor_product(&PAULI[j + 1], &PAULI[k + 1]))?;
            }
        }
        for v in [&a, &b] {
            let norm = norm3(v);
            if norm > 1.0 + DEFAULT_TOL {
                return Err(Error::BlochNorm { norm });
            }
        }
        Ok(Self { rho, a, b, t })
    }

    /// Assembles `¼(I⊗I + a·σ⊗I + I⊗b·σ + Σ T_jk σ_j⊗σ_k)` and validates it.
    /// Coefficients that do not describe a physical state are rejected with
    /// the minimum eigenvalue of the assembled matrix.
    pub fn from_pauli(a: Vec3, b: Vec3, t: Mat3) -> Result<Self> {
        Self::from_density_matrix(&assemble_pauli(&a, &b, &t))
    }

    /// `|ψ⟩⟨ψ|` for a (not necessarily normalised) amplitude vector.
    pub fn pure(psi: [Complex64; 4]) -> Result<Self> {
        let norm = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidArgument("zero state vector".into()));
        }
        let psi = psi.map(|z| z / norm);
        Self::from_density_matrix(&Matrix4::outer(&psi, &psi))
    }

    pub fn maximally_mixed() -> Self {
        Self::from_density_matrix(&Matrix4::identity().scale(0.25))
            .expect("I/4 is a valid state")
    }

    /// `ρ_A ⊗ ρ_B` from two Bloch vectors.
    pub fn product(alice: &SingleQubitState, bob: &SingleQubitState) -> Result<Self> {
        Self::from_density_matrix(&tensor_product(
            &alice.density_matrix(),
            &bob.density_matrix(),
        ))
    }

    pub fn bell(which: BellState) -> Self {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let (z, p, m) = (0.0, r, -r);
        let amps = match which {
            BellState::PhiPlus => [p, z, z, p],
            BellState::PhiMinus => [p, z, z, m],
            BellState::PsiPlus => [z, p, p, z],
            BellState::PsiMinus => [z, p, m, z],
        };
        Self::pure(amps.map(|x| Complex64::new(x, 0.0))).expect("Bell states are valid")
    }

    /// `p |Ψ⁻⟩⟨Ψ⁻| + (1 − p) I/4`.
    pub fn werner(p: f64) -> Result<Self> {
        let singlet = Self::bell(BellState::PsiMinus).rho;
        Self::from_density_matrix(
            &(singlet.scale(p) + Matrix4::identity().scale((1.0 - p) / 4.0)),
        )
    }

    pub fn rho(&self) -> &Matrix4 {
        &self.rho
    }

    pub fn alice_bloch(&self) -> Vec3 {
        self.a
    }

    pub fn bob_bloch(&self) -> Vec3 {
        self.b
    }

    pub fn correlations(&self) -> Mat3 {
        self.t
    }

    pub fn bloch(&self, side: Side) -> Vec3 {
        match side {
            Side::Alice => self.a,
            Side::Bob => self.b,
        }
    }

    /// Cached `(a, b, T)`.
    pub fn pauli_decomposition(&self) -> (Vec3, Vec3, Mat3) {
        (self.a, self.b, self.t)
    }

    pub fn reduced_state(&self, side: Side) -> SingleQubitState {
        SingleQubitState {
            bloch: self.bloch(side),
        }
    }

    /// Partial trace over the other party, computed from the matrix entries
    /// rather than from the cached Bloch vectors.
    pub fn partial_trace(&self, keep: Side) -> Matrix2 {
        let mut out = Matrix2::zeros();
        for i in 0..2 {
            for j in 0..2 {
                out[(i, j)] = (0..2)
                    .map(|k| match keep {
                        Side::Alice => self.rho[(2 * i + k, 2 * j + k)],
                        Side::Bob => self.rho[(2 * k + i, 2 * k + j)],
                    })
                    .sum();
            }
        }
        out
    }

    /// `‖a‖² + ‖b‖² + ‖T‖²_F`, bounded by 3 for every state.
    pub fn pauli_weight(&self) -> f64 {
        dot3(&self.a, &self.a)
            + dot3(&self.b, &self.b)
            + self.t.iter().flatten().map(|x| x * x).sum::<f64>()
    }
}

/// The four Bell states.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BellState {
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
}

impl BellState {
    pub const ALL: [BellState; 4] = [
        BellState::PhiPlus,
        BellState::PhiMinus,
        BellState::PsiPlus,
        BellState::PsiMinus,
    ];
}

fn assemble_pauli(a: &Vec3, b: &Vec3, t: &Mat3) -> Matrix4 {
    let mut m = Matrix4::identity();
    for j in 0..3 {
        m = m + tensor_product(&PAULI[j + 1], &PAULI[0]).scale(a[j]);
        m = m + tensor_product(&PAULI[0], &PAULI[j + 1]).scale(b[j]);
        for k in 0..3 {
            m = m + tensor_product(&PAULI[j + 1], &PAULI[k + 1]).scale(t[j][k]);
        }
    }
    m.scale(0.25)
}

/// Random state `G G† / tr(G G†)` with `G` a 4×4 matrix of independent
/// standard complex Gaussians. Identical seeds give bit-identical states.
pub fn random_state(seed: u64) -> TwoQubitState {
    random_state_with(&mut ChaCha8Rng::seed_from_u64(seed))
}

pub fn random_state_with<R: Rng + ?Sized>(rng: &mut R) -> TwoQubitState {
    loop {
        let mut g = Matrix4::zeros();
        for i in 0..4 {
            for j in 0..4 {
                g[(i, j)] = Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
            }
        }
        let gg = g * g.adjoint();
        let trace = gg.trace().re;
        if trace > 0.0 {
            if let Ok(state) = TwoQubitState::from_density_matrix(&gg.scale(1.0 / trace)) {
                return state;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const PRODUCT_A: Vec3 = [0.0, 0.0, 1.0];
    const PRODUCT_B: Vec3 = [1.0, 0.0, 0.0];

    fn product_state() -> TwoQubitState {
        TwoQubitState::product(
            &SingleQubitState::new(PRODUCT_A).unwrap(),
            &SingleQubitState::new(PRODUCT_B).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn maximally_mixed_has_no_coefficients() {
        let (a, b, t) = TwoQubitState::maximally_mixed().pauli_decomposition();
        assert_eq!(a, [0.0; 3]);
        assert_eq!(b, [0.0; 3]);
        assert_eq!(t, [[0.0; 3]; 3]);
    }

    #[test]
    fn phi_plus_correlations() {
        let s = TwoQubitState::bell(BellState::PhiPlus);
        let (a, b, t) = s.pauli_decomposition();
        let expected = [[1.0, 0.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, 1.0]];
        for j in 0..3 {
            assert!(a[j].abs() < 1e-15 && b[j].abs() < 1e-15);
            for k in 0..3 {
                assert!((t[j][k] - expected[j][k]).abs() < 1e-15);
            }
        }
        assert_eq!(s.reduced_state(Side::Alice).bloch_norm(), 0.0);
    }

    #[test]
    fn singlet_from_pauli() {
        let s = TwoQubitState::from_pauli(
            [0.0; 3],
            [0.0; 3],
            [[-1.0, 0.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, -1.0]],
        )
        .unwrap();
        let singlet = TwoQubitState::bell(BellState::PsiMinus);
        assert!(s.rho().max_abs_diff(singlet.rho()) < 1e-15);
        assert_eq!(
            TwoQubitState::from_pauli([0.0; 3], [0.0; 3], [[0.0; 3]; 3]).unwrap(),
            TwoQubitState::maximally_mixed()
        );
    }

    #[test]
    fn unphysical_coefficients_rejected() {
        // Spectrum of the assembled matrix is {3/2, 0, 0, −1/2}.
        let err = TwoQubitState::from_pauli(
            [0.0, 0.0, 1.0],
            [0.0, 0.0, 1.0],
            [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
        )
        .unwrap_err();
        match err {
            Error::NotPsd { min_eigenvalue } => assert!((min_eigenvalue + 0.5).abs() < 1e-12),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn wrong_trace_rejected() {
        let err = TwoQubitState::from_density_matrix(&Matrix4::identity().scale(0.225)).unwrap_err();
        assert!(matches!(err, Error::Trace { trace } if (trace - 0.9).abs() < 1e-12));
        assert!(err.to_string().contains("trace"));
    }

    #[test]
    fn non_hermitian_rejected() {
        let mut m = Matrix4::identity().scale(0.25);
        m[(0, 1)] = Complex64::new(0.1, 0.0);
        assert!(matches!(
            TwoQubitState::from_density_matrix(&m),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn product_state_coordinates() {
        let s = product_state();
        let (a, b, t) = s.pauli_decomposition();
        for j in 0..3 {
            assert!((a[j] - PRODUCT_A[j]).abs() < 1e-15);
            assert!((b[j] - PRODUCT_B[j]).abs() < 1e-15);
            for k in 0..3 {
                assert!((t[j][k] - PRODUCT_A[j] * PRODUCT_B[k]).abs() < 1e-15);
            }
        }
        assert_eq!(s.reduced_state(Side::Bob).bloch(), PRODUCT_B);
    }

    #[test]
    fn purity_values() {
        assert_eq!(SingleQubitState::new([0.0; 3]).unwrap().purity(), 0.5);
        assert_eq!(SingleQubitState::new([0.0, 1.0, 0.0]).unwrap().purity(), 1.0);
        let q = SingleQubitState::new([0.0, 0.6, 0.0]).unwrap();
        assert!((q.purity() - 0.68).abs() < 1e-15);
        let rho = q.density_matrix();
        assert!(((rho * rho).trace().re - 0.68).abs() < 1e-15);
        assert!(SingleQubitState::new([1.0, 1.0, 0.0]).is_err());
    }

    #[test]
    fn random_state_is_deterministic_and_valid() {
        assert_eq!(random_state(99), random_state(99));
        assert_ne!(random_state(99), random_state(100));
        let mut mean = [0.0; 3];
        let n = 1000;
        for seed in 0..n {
            let s = random_state(seed);
            assert!(TwoQubitState::from_density_matrix(s.rho()).is_ok());
            assert!(s.pauli_weight() <= 3.0 + 1e-8);
            for j in 0..3 {
                mean[j] += s.alice_bloch()[j] / n as f64;
            }
        }
        assert!(mean.iter().all(|m| m.abs() < 0.1), "{mean:?}");
    }

    #[test]
    fn partial_trace_matches_bloch() {
        for seed in 0..200 {
            let s = random_state(seed);
            for side in [Side::Alice, Side::Bob] {
                let direct = s.partial_trace(side);
                let from_bloch = s.reduced_state(side).density_matrix();
                assert!(direct.max_abs_diff(&from_bloch) < 1e-12);
            }
        }
    }

    #[test]
    fn pauli_round_trip() {
        for seed in 0..200 {
            let s = random_state(seed);
            let (a, b, t) = s.pauli_decomposition();
            let back = TwoQubitState::from_pauli(a, b, t).unwrap();
            assert!(back.rho().max_abs_diff(s.rho()) < 1e-12);
        }
    }
}
