//! Expected concurrence after local two-outcome measurements.
//!
//! A dichotomic measurement shares one eigenbasis `{|m₀⟩, |m₁⟩}` between its
//! two operators. Completeness then fixes
//!
//! ```text
//! M₀ = sin θ |m₀⟩⟨m₀| + sin φ |m₁⟩⟨m₁|
//! M₁ = cos θ |m₀⟩⟨m₀| + cos φ |m₁⟩⟨m₁|
//! ```
//!
//! up to unitaries that do not affect entanglement. Every branch is itself a
//! filter, so the expected concurrence is `C · (|det M₀| + |det M₁|)`, which
//! is `C · cos(θ − φ)` and never exceeds `C`.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;

use crate::entanglement::concurrence;
use crate::error::{Error, Result};
use crate::filtering::{apply_filter, FilterOperator, FilterOutcome};
use crate::linalg::Matrix2;
use crate::state::{Side, TwoQubitState};

/// Orthonormality slack for user-supplied bases.
pub const BASIS_TOL: f64 = 1e-12;

pub type Ket = [Complex64; 2];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DichotomicMeasurement {
    basis: [Ket; 2],
    theta: f64,
    phi: f64,
}

fn computational_basis() -> [Ket; 2] {
    let (one, zero) = (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0));
    [[one, zero], [zero, one]]
}

fn inner(u: &Ket, v: &Ket) -> Complex64 {
    u[0].conj() * v[0] + u[1].conj() * v[1]
}

fn check_angle(name: &str, x: f64) -> Result<()> {
    if !(0.0..=FRAC_PI_2).contains(&x) {
        return Err(Error::InvalidArgument(format!("{name} = {x} outside [0, π/2]")));
    }
    Ok(())
}

impl DichotomicMeasurement {
    pub fn new(basis: [Ket; 2], theta: f64, phi: f64) -> Result<Self> {
        check_angle("theta", theta)?;
        check_angle("phi", phi)?;
        let gram_err = [
            (inner(&basis[0], &basis[0]) - 1.0).norm(),
            (inner(&basis[1], &basis[1]) - 1.0).norm(),
            inner(&basis[0], &basis[1]).norm(),
        ]
        .into_iter()
        .fold(0.0, f64::max);
        if !(gram_err <= BASIS_TOL) {
            return Err(Error::InvalidArgument(format!(
                "basis not orthonormal (residual {gram_err:e})"
            )));
        }
        Ok(Self { basis, theta, phi })
    }

    /// Measurement diagonal in the computational basis.
    pub fn from_angles(theta: f64, phi: f64) -> Result<Self> {
        Self::new(computational_basis(), theta, phi)
    }

    /// Strengths `m₀ = sin θ`, `m₁ = sin φ`, each in `[0, 1]`.
    pub fn from_strengths(basis: [Ket; 2], m0: f64, m1: f64) -> Result<Self> {
        for (name, m) in [("m0", m0), ("m1", m1)] {
            if !(0.0..=1.0).contains(&m) {
                return Err(Error::InvalidArgument(format!("{name} = {m} outside [0, 1]")));
            }
        }
        Self::new(basis, m0.asin(), m1.asin())
    }

    /// Projective measurement in `basis`.
    pub fn projective(basis: [Ket; 2]) -> Result<Self> {
        Self::new(basis, FRAC_PI_2, 0.0)
    }

    pub fn basis(&self) -> [Ket; 2] {
        self.basis
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn strengths(&self) -> (f64, f64) {
        (self.theta.sin(), self.phi.sin())
    }

    fn projectors(&self) -> [Matrix2; 2] {
        self.basis.map(|v| Matrix2::outer(&v, &v))
    }

    /// `[M₀, M₁]`.
    pub fn operators(&self) -> [Matrix2; 2] {
        let [p0, p1] = self.projectors();
        [
            p0.scale(self.theta.sin()) + p1.scale(self.phi.sin()),
            p0.scale(self.theta.cos()) + p1.scale(self.phi.cos()),
        ]
    }

    /// `‖M₀†M₀ + M₁†M₁ − I‖_max`.
    pub fn completeness_residual(&self) -> f64 {
        let [m0, m1] = self.operators();
        (m0.adjoint() * m0 + m1.adjoint() * m1).max_abs_diff(&Matrix2::identity())
    }

    /// `|det M₀| + |det M₁| = cos(θ − φ)`.
    pub fn determinant_sum(&self) -> f64 {
        self.theta.sin() * self.phi.sin() + self.theta.cos() * self.phi.cos()
    }

    /// Both branches as filters on `side`.
    pub fn branch_filters(&self, side: Side) -> Result<[FilterOperator; 2]> {
        let [m0, m1] = self.operators();
        Ok([
            FilterOperator::from_positive_matrix(&m0, side)?,
            FilterOperator::from_positive_matrix(&m1, side)?,
        ])
    }
}

/// Outcome of one branch, or `None` when it occurs with probability at most
/// [`crate::filtering::MIN_PROBABILITY`].
fn branch(s: &TwoQubitState, f: &FilterOperator) -> Result<Option<FilterOutcome>> {
    match apply_filter(s, f) {
        Ok(out) => Ok(Some(out)),
        Err(Error::VanishingProbability { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

/// `Σ_k p_k C(ρ_k)` with every branch evolved explicitly.
pub fn expected_concurrence(
    s: &TwoQubitState,
    m: &DichotomicMeasurement,
    side: Side,
) -> Result<f64> {
    let mut total = 0.0;
    for f in m.branch_filters(side)? {
        if let Some(out) = branch(s, &f)? {
            total += out.probability * out.concurrence_after;
        }
    }
    Ok(total)
}

/// `Σ_{k,j} p_{kj} C(ρ_{kj})` for `m_a` on Alice and `m_b` on Bob, again
/// branch by branch.
pub fn expected_concurrence_product(
    s: &TwoQubitState,
    m_a: &DichotomicMeasurement,
    m_b: &DichotomicMeasurement,
) -> Result<f64> {
    let bob = m_b.branch_filters(Side::Bob)?;
    let mut total = 0.0;
    for fa in m_a.branch_filters(Side::Alice)? {
        let Some(first) = branch(s, &fa)? else { continue };
        for fb in &bob {
            if let Some(second) = branch(&first.post_state, fb)? {
                total += first.probability * second.probability * second.concurrence_after;
            }
        }
    }
    Ok(total)
}

/// `C · cos(θ − φ)`.
pub fn predicted_expected_concurrence(s: &TwoQubitState, m: &DichotomicMeasurement) -> Result<f64> {
    Ok(concurrence(s)?.concurrence * m.determinant_sum())
}

/// `C · (Σ_k |det M_k|)(Σ_j |det N_j|)`, defined for every state.
pub fn predicted_expected_concurrence_product(
    s: &TwoQubitState,
    m_a: &DichotomicMeasurement,
    m_b: &DichotomicMeasurement,
) -> Result<f64> {
    Ok(concurrence(s)?.concurrence * m_a.determinant_sum() * m_b.determinant_sum())
}

/// `EC(M) · EC(N) / C`. Only meaningful for entangled states; returns `None`
/// when `C ≤ 1e-9`.
pub fn factorized_expected_concurrence(
    s: &TwoQubitState,
    m_a: &DichotomicMeasurement,
    m_b: &DichotomicMeasurement,
) -> Result<Option<f64>> {
    let c = concurrence(s)?.concurrence;
    if c <= 1e-9 {
        return Ok(None);
    }
    let ea = expected_concurrence(s, m_a, Side::Alice)?;
    let eb = expected_concurrence(s, m_b, Side::Bob)?;
    Ok(Some(ea * eb / c))
}
