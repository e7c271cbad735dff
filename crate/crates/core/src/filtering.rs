//! Local filtering operations and their optimal synthesis.
//!
//! A filter on one qubit is stored by the Pauli coefficients of its positive
//! part, `K = ½(x₀ I + x·σ)`. It is a legitimate filter (`K†K ≤ I`) exactly
//! when `‖x‖ ≤ x₀ ≤ 2 − ‖x‖`. Acting on a shared state it succeeds with
//! probability `p = tr((K²⊗I) ρ)` and multiplies the concurrence by
//! `|det K| / p`.
//!
//! For a marginal Bloch vector of length `a < 1` the multiplier is at most
//! `1/√(1 − a²)`, attained by [`optimal_filter`] with success probability
//! `1 − a`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::entanglement::concurrence;
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigensystem, matrix_sqrt_psd, Matrix2, DEFAULT_TOL};
use crate::state::{dot3, norm3, pauli_coefficients, qubit_operator, Side, TwoQubitState, Vec3};

/// Slack on the validity inequalities.
pub const VALIDITY_TOL: f64 = 1e-12;

/// Filters whose success probability is at or below this are rejected.
pub const MIN_PROBABILITY: f64 = 1e-12;

/// Marginals shorter than this have no preferred direction; the optimal
/// filter is then the identity.
const DEGENERATE_BLOCH: f64 = 1e-12;

/// Positive filter `K = ½(x₀ I + x·σ)` acting on one party's qubit.
///
/// Deserialisation goes through [`FilterOperator::new`], so a parsed filter
/// is always valid.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FilterParams")]
pub struct FilterOperator {
    x0: f64,
    x: Vec3,
    side: Side,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FilterParams {
    x0: f64,
    x: Vec3,
    side: Side,
}

impl TryFrom<FilterParams> for FilterOperator {
    type Error = Error;

    fn try_from(p: FilterParams) -> Result<Self> {
        Self::new(p.x0, p.x, p.side)
    }
}

impl FilterOperator {
    /// Validates `‖x‖ ≤ x₀ ≤ 2 − ‖x‖`.
    pub fn new(x0: f64, x: Vec3, side: Side) -> Result<Self> {
        let norm = norm3(&x);
        if !x0.is_finite() || !norm.is_finite() {
            return Err(Error::InvalidFilter("non-finite parameters".into()));
        }
        if norm > x0 + VALIDITY_TOL {
            return Err(Error::InvalidFilter(format!(
                "violates |x| <= x0 (|x| = {norm}, x0 = {x0})"
            )));
        }
        if x0 > 2.0 - norm + VALIDITY_TOL {
            return Err(Error::InvalidFilter(format!(
                "violates x0 <= 2 - |x| (x0 = {x0}, |x| = {norm})"
            )));
        }
        Ok(Self { x0, x, side })
    }

    pub fn identity(side: Side) -> Self {
        Self {
            x0: 2.0,
            x: [0.0; 3],
            side,
        }
    }

    /// Reads the Pauli coefficients of a Hermitian 2×2 with spectrum in
    /// `[0, 1]`.
    pub fn from_positive_matrix(k: &Matrix2, side: Side) -> Result<Self> {
        hermitian_eigensystem(k, DEFAULT_TOL)?;
        let c = pauli_coefficients(&k.hermitian_part());
        Self::new(c[0], [c[1], c[2], c[3]], side)
    }

    /// Keeps only the positive part of a general filter `F = U K`.
    pub fn from_matrix(f: &Matrix2, side: Side) -> Result<Self> {
        let (_, k) = polar_decompose(f)?;
        Self::from_positive_matrix(&k, side)
    }

    pub fn x0(&self) -> f64 {
        self.x0
    }

    pub fn x(&self) -> Vec3 {
        self.x
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn with_side(mut self, side: Side) -> Self {
        self.side = side;
        self
    }

    /// The realised 2×2 operator `K`.
    pub fn matrix(&self) -> Matrix2 {
        qubit_operator(self.x0, &self.x)
    }

    /// `(½(x₀ + ‖x‖), ½(x₀ − ‖x‖))`.
    pub fn eigenvalues(&self) -> (f64, f64) {
        let n = norm3(&self.x);
        (0.5 * (self.x0 + n), 0.5 * (self.x0 - n))
    }

    /// `ω = ‖x‖ / x₀`, undefined for the zero filter.
    pub fn omega(&self) -> Option<f64> {
        (self.x0 > 0.0).then(|| norm3(&self.x) / self.x0)
    }

    /// `|det K| = ¼(x₀² − ‖x‖²)`.
    pub fn determinant(&self) -> f64 {
        0.25 * (self.x0 * self.x0 - dot3(&self.x, &self.x))
    }

    /// `¼(x₀² + ‖x‖² + 2x₀ x·r)` with `r` the Bloch vector on the filter's
    /// side.
    pub fn success_probability(&self, s: &TwoQubitState) -> f64 {
        let r = s.bloch(self.side);
        0.25 * (self.x0 * self.x0 + dot3(&self.x, &self.x) + 2.0 * self.x0 * dot3(&self.x, &r))
    }
}

/// Free function form of [`FilterOperator::new`].
pub fn filter_from_params(x0: f64, x: Vec3, side: Side) -> Result<FilterOperator> {
    FilterOperator::new(x0, x, side)
}

/// Free function form of [`FilterOperator::determinant`].
pub fn filter_determinant(f: &FilterOperator) -> f64 {
    f.determinant()
}

/// Polar decomposition `F = U K` with `K = √(F†F)`.
///
/// `U` is built from the singular vectors of `F`. On the null space of `K`
/// the phase `f_k/|f_k|` is taken as 1, which makes the choice deterministic.
pub fn polar_decompose(f: &Matrix2) -> Result<(Matrix2, Matrix2)> {
    let gram = f.adjoint() * *f;
    let eig = hermitian_eigensystem(&gram, DEFAULT_TOL)?;
    let norm = eig.values[0];
    if norm > 1.0 + DEFAULT_TOL || !norm.is_finite() {
        return Err(Error::NotFilterOperation { norm });
    }
    let s0 = eig.values[0].max(0.0).sqrt();
    let (beta0, beta1) = (eig.vector(0), eig.vector(1));
    if s0 <= f64::EPSILON {
        return Ok((Matrix2::identity(), matrix_sqrt_psd(&gram, DEFAULT_TOL)?));
    }
    let alpha0 = f.mul_vec(&beta0).map(|z| z / s0);
    let n0 = alpha0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let alpha0 = alpha0.map(|z| z / n0);
    // The second left vector is the orthogonal complement of the first, with
    // the phase carried by F β₁ when that is non-zero.
    let complement = [-alpha0[1].conj(), alpha0[0].conj()];
    let f_beta1 = f.mul_vec(&beta1);
    let overlap = complement[0].conj() * f_beta1[0] + complement[1].conj() * f_beta1[1];
    let phase = if overlap.norm() > f64::EPSILON * s0 {
        overlap / overlap.norm()
    } else {
        Complex64::new(1.0, 0.0)
    };
    let alpha1 = complement.map(|z| z * phase);
    let u = Matrix2::outer(&alpha0, &beta0) + Matrix2::outer(&alpha1, &beta1);
    // U†F rather than √(F†F): the square root turns 1e-17 roundoff in a
    // vanishing eigenvalue into 1e-9 errors for rank-one F.
    let k = (u.adjoint() * *f).hermitian_part();
    Ok((u, k))
}

/// Result of applying a filter to a shared state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FilterOutcome {
    pub post_state: TwoQubitState,
    /// `tr((K²⊗I) ρ)`, from the evolved matrix.
    pub probability: f64,
    /// `|det K| / p` from the realised matrix.
    pub ratio: f64,
    pub concurrence_before: f64,
    pub concurrence_after: f64,
}

impl FilterOutcome {
    /// `C_after / C_before`, when the input was entangled.
    pub fn achieved_ratio(&self) -> Option<f64> {
        (self.concurrence_before > 0.0).then(|| self.concurrence_after / self.concurrence_before)
    }
}

/// Evolves `ρ → (F⊗I) ρ (F⊗I)† / p` (mirrored for Bob) for an arbitrary
/// single-qubit operator and returns the normalised state with `p`.
pub fn apply_local_operator(
    s: &TwoQubitState,
    op: &Matrix2,
    side: Side,
) -> Result<(TwoQubitState, f64)> {
    let w = side.embed(op);
    let unnormalised = w * *s.rho() * w.adjoint();
    let probability = unnormalised.trace().re;
    if probability <= MIN_PROBABILITY || !probability.is_finite() {
        return Err(Error::VanishingProbability { probability });
    }
    let post = TwoQubitState::from_density_matrix(&unnormalised.scale(1.0 / probability))?;
    Ok((post, probability))
}

/// Applies the filter and recomputes the concurrence of the result from
/// scratch.
pub fn apply_filter(s: &TwoQubitState, f: &FilterOperator) -> Result<FilterOutcome> {
    let k = f.matrix();
    let (post_state, probability) = apply_local_operator(s, &k, f.side)?;
    Ok(FilterOutcome {
        post_state,
        probability,
        ratio: k.determinant().norm() / probability,
        concurrence_before: concurrence(s)?.concurrence,
        concurrence_after: concurrence(&post_state)?.concurrence,
    })
}

/// Concurrence multiplier `|det K| / p` evaluated from `(x₀, x)` and the
/// state's Bloch vector alone.
pub fn predicted_ratio(s: &TwoQubitState, f: &FilterOperator) -> Result<f64> {
    let probability = f.success_probability(s);
    if probability <= MIN_PROBABILITY {
        return Err(Error::VanishingProbability { probability });
    }
    Ok(f.determinant() / probability)
}

/// `1/√(1 − a²)`, the largest concurrence multiplier available to a
/// one-sided filter when the filtering party's marginal has Bloch length `a`.
pub fn ratio_upper_bound(a: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&a) {
        if a >= 1.0 {
            return Err(Error::PureMarginal { norm: a });
        }
        return Err(Error::InvalidArgument(format!("Bloch length {a} outside [0, 1)")));
    }
    Ok(1.0 / (1.0 - a * a).sqrt())
}

fn checked_bloch_length(a_vec: &Vec3) -> Result<f64> {
    let a = norm3(a_vec);
    if !a.is_finite() || a > 1.0 + DEFAULT_TOL {
        return Err(Error::BlochNorm { norm: a });
    }
    if a >= 1.0 {
        return Err(Error::PureMarginal { norm: a });
    }
    Ok(a)
}

/// Largest admissible `x₀` for a filter pointing along `−a`:
/// `1 + √((1 − a)/(1 + a))`.
pub fn max_scaling(a: f64) -> f64 {
    1.0 + ((1.0 - a) / (1.0 + a)).sqrt()
}

/// Optimal one-sided filter for a marginal with Bloch vector `a_vec`:
/// `x₀ = 1 + √((1−a)/(1+a))`, `x = −(1 − √((1−a)/(1+a))) a_vec / a`.
///
/// Its larger eigenvalue is exactly 1 and `‖x‖/x₀ = (1 − √(1 − a²))/a`.
/// A vanishing marginal gives the identity filter; a pure marginal is an
/// error, since the success probability `1 − a` would be zero.
pub fn optimal_filter(a_vec: &Vec3, side: Side) -> Result<FilterOperator> {
    let a = checked_bloch_length(a_vec)?;
    if a < DEGENERATE_BLOCH {
        return Ok(FilterOperator::identity(side));
    }
    let r = ((1.0 - a) / (1.0 + a)).sqrt();
    // `+ 0.0` turns the `-0.0` of vanishing components into `0.0`.
    let x = a_vec.map(|c| -(1.0 - r) * c / a + 0.0);
    FilterOperator::new(1.0 + r, x, side)
}

/// Any member of the optimal family: `x = −x₀ (1 − √(1 − a²))/a² · a_vec`.
/// All members share the optimal ratio; `x₀` only scales the success
/// probability and must lie in `(0, max_scaling(a)]`.
pub fn optimal_family_filter(a_vec: &Vec3, x0: f64, side: Side) -> Result<FilterOperator> {
    let a = checked_bloch_length(a_vec)?;
    if x0 <= 0.0 {
        return Err(Error::InvalidFilter(format!("x0 = {x0} must be positive")));
    }
    if a < DEGENERATE_BLOCH {
        return FilterOperator::new(x0, [0.0; 3], side);
    }
    let coefficient = x0 * (1.0 - (1.0 - a * a).sqrt()) / (a * a);
    FilterOperator::new(x0, a_vec.map(|c| -coefficient * c), side)
}

/// Success probability `1 − a` of [`optimal_filter`].
pub fn optimal_success_probability(a: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&a) {
        return Err(Error::InvalidArgument(format!("Bloch length {a} outside [0, 1]")));
    }
    Ok(1.0 - a)
}

/// Success probability of an optimal-family filter with scaling `x₀`:
/// `x₀² (1 − a²)(1 − √(1 − a²)) / (2a²)`, tending to `x₀²/4` as `a → 0`.
pub fn optimal_family_probability(x0: f64, a: f64) -> f64 {
    if a < DEGENERATE_BLOCH {
        return 0.25 * x0 * x0;
    }
    let s = (1.0 - a * a).sqrt();
    x0 * x0 * (1.0 - a * a) * (1.0 - s) / (2.0 * a * a)
}

/// Filters for both parties, each synthesised from the original marginals.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwoSidedFilters {
    pub alice: FilterOperator,
    pub bob: FilterOperator,
    /// Product of the one-sided bounds, `1/√((1 − a²)(1 − b²))`.
    pub total_ratio: f64,
    /// Multiplier actually produced by `alice ⊗ bob` on this state:
    /// `√((1 − a²)(1 − b²)) / (1 − a² − b² + aᵀ T b)`.
    pub exact_ratio: f64,
}

/// Optimal filter on each side, both computed from the state as given.
/// Apply Alice's first, then Bob's, e.g. with [`apply_two_sided`].
pub fn optimal_two_sided(s: &TwoQubitState) -> Result<TwoSidedFilters> {
    let (a_vec, b_vec, t) = s.pauli_decomposition();
    let alice = optimal_filter(&a_vec, Side::Alice)?;
    let bob = optimal_filter(&b_vec, Side::Bob)?;
    let (a2, b2) = (dot3(&a_vec, &a_vec), dot3(&b_vec, &b_vec));
    let t_b: Vec3 = std::array::from_fn(|j| dot3(&t[j], &b_vec));
    let joint = 1.0 - a2 - b2 + dot3(&a_vec, &t_b);
    Ok(TwoSidedFilters {
        alice,
        bob,
        total_ratio: 1.0 / ((1.0 - a2) * (1.0 - b2)).sqrt(),
        exact_ratio: ((1.0 - a2) * (1.0 - b2)).sqrt() / joint,
    })
}

/// Applies `filters.alice` and then `filters.bob` to the resulting state.
pub fn apply_two_sided(
    s: &TwoQubitState,
    filters: &TwoSidedFilters,
) -> Result<(FilterOutcome, FilterOutcome)> {
    let first = apply_filter(s, &filters.alice)?;
    let second = apply_filter(&first.post_state, &filters.bob)?;
    Ok((first, second))
}
