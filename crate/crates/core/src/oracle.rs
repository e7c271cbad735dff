//! Brute-force certification of the optimal-filter and measurement results.
//!
//! Nothing here calls the closed forms it checks. Every candidate filter is
//! applied to the full density matrix and the concurrence recomputed from
//! the result.

use std::cmp::Ordering;
use std::f64::consts::{FRAC_PI_2, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::entanglement::concurrence;
use crate::error::{Error, Result};
use crate::filtering::{apply_local_operator, FilterOperator};
use crate::measurement::{expected_concurrence, DichotomicMeasurement};
use crate::sampling::random_unitary;
use crate::state::{norm3, Side, TwoQubitState, Vec3};

pub const MIN_RESOLUTION: usize = 8;

/// Below this input concurrence the ratio is read from `|det K| / p` instead
/// of `C_after / C_before`.
const RATIO_FROM_CONCURRENCE: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SearchResult {
    pub best_filter: FilterOperator,
    pub best_ratio: f64,
    pub best_probability: f64,
    pub samples_evaluated: usize,
    /// `1/√(1 − a²) − best_ratio`.
    pub gap_to_bound: f64,
}

/// `n` points of the Fibonacci lattice on the unit sphere.
pub fn fibonacci_sphere(n: usize) -> Vec<Vec3> {
    let golden = PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|i| {
            let z = 1.0 - (2.0 * i as f64 + 1.0) / n as f64;
            let r = (1.0 - z * z).sqrt();
            let t = golden * i as f64;
            [r * t.cos(), r * t.sin(), z]
        })
        .collect()
}

#[derive(Clone, Copy)]
struct Candidate {
    filter: FilterOperator,
    ratio: f64,
    probability: f64,
}

impl Candidate {
    fn key(&self) -> [f64; 4] {
        let x = self.filter.x();
        [self.filter.x0(), x[0], x[1], x[2]]
    }

    /// Larger ratio wins, then larger probability, then the lexicographically
    /// smaller `(x₀, x)`.
    fn beats(&self, other: &Candidate) -> bool {
        let lex = || {
            self.key()
                .iter()
                .zip(other.key())
                .map(|(a, b)| a.total_cmp(&b))
                .find(|o| *o != Ordering::Equal)
                .unwrap_or(Ordering::Equal)
        };
        match self.ratio.total_cmp(&other.ratio) {
            Ordering::Greater => true,
            Ordering::Less => false,
            Ordering::Equal => match self.probability.total_cmp(&other.probability) {
                Ordering::Greater => true,
                Ordering::Less => false,
                Ordering::Equal => lex() == Ordering::Less,
            },
        }
    }
}

/// Evolves the state under `filter` and recomputes the concurrence of the
/// result. The input concurrence is shared across candidates.
fn evaluate(s: &TwoQubitState, c_before: f64, filter: FilterOperator) -> Result<Option<Candidate>> {
    let k = filter.matrix();
    let (post, probability) = match apply_local_operator(s, &k, filter.side()) {
        Ok(out) => out,
        Err(Error::VanishingProbability { .. }) => return Ok(None),
        Err(e) => return Err(e),
    };
    let ratio = if c_before > RATIO_FROM_CONCURRENCE {
        concurrence(&post)?.concurrence / c_before
    } else {
        k.determinant().norm() / probability
    };
    Ok(Some(Candidate {
        filter,
        ratio,
        probability,
    }))
}

/// Grid search over Alice's filters. See [`grid_search_optimal_filter_on`].
pub fn grid_search_optimal_filter(s: &TwoQubitState, resolution: usize) -> Result<SearchResult> {
    grid_search_optimal_filter_on(s, resolution, Side::Alice)
}

/// Maximises the achieved concurrence multiplier over filters on `side`.
///
/// `ω = ‖x‖/x₀` runs over `i / resolution` for `i < resolution`. Directions
/// are `2·resolution` Fibonacci points plus `±r/‖r‖` for the marginal Bloch
/// vector `r`. Since the multiplier does not depend on `x₀`, each cell uses
/// the largest admissible `x₀ = 2/(1 + ω)`.
pub fn grid_search_optimal_filter_on(
    s: &TwoQubitState,
    resolution: usize,
    side: Side,
) -> Result<SearchResult> {
    if resolution < MIN_RESOLUTION {
        return Err(Error::InvalidArgument(format!(
            "resolution {resolution} below {MIN_RESOLUTION}"
        )));
    }
    let r = s.bloch(side);
    let a = norm3(&r);
    if a >= 1.0 - 1e-12 {
        return Err(Error::PureMarginal { norm: a });
    }

    let mut directions = Vec::with_capacity(2 * resolution + 2);
    if a > 1e-12 {
        let unit = r.map(|c| c / a);
        directions.push(unit.map(|c| -c));
        directions.push(unit);
    }
    directions.extend(fibonacci_sphere(2 * resolution));

    let mut filters = vec![FilterOperator::identity(side)];
    for i in 1..resolution {
        let omega = i as f64 / resolution as f64;
        let x0 = 2.0 / (1.0 + omega);
        for d in &directions {
            filters.push(FilterOperator::new(x0, d.map(|c| c * omega * x0), side)?);
        }
    }

    let c_before = concurrence(s)?.concurrence;
    let evaluated: Vec<Option<Candidate>> = filters
        .par_iter()
        .map(|f| evaluate(s, c_before, *f))
        .collect::<Result<_>>()?;

    // Index-ordered reduction keeps the result independent of scheduling.
    let mut best: Option<Candidate> = None;
    let mut count = 0;
    for c in evaluated.into_iter().flatten() {
        count += 1;
        if best.map_or(true, |b| c.beats(&b)) {
            best = Some(c);
        }
    }
    let best = best.ok_or(Error::VanishingProbability { probability: 0.0 })?;
    Ok(SearchResult {
        best_filter: best.filter,
        best_ratio: best.ratio,
        best_probability: best.probability,
        samples_evaluated: count,
        gap_to_bound: 1.0 / (1.0 - a * a).sqrt() - best.ratio,
    })
}

/// Largest expected concurrence over `samples` random dichotomic
/// measurements, with `θ, φ` uniform on `[0, π/2]`, a Haar-random basis and
/// a fair coin for the side.
pub fn random_search_measurement(s: &TwoQubitState, samples: usize, seed: u64) -> Result<f64> {
    if samples == 0 {
        return Err(Error::InvalidArgument("samples must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draws: Vec<(DichotomicMeasurement, Side)> = (0..samples)
        .map(|_| {
            let u = random_unitary(&mut rng);
            let theta = rng.random_range(0.0..=FRAC_PI_2);
            let phi = rng.random_range(0.0..=FRAC_PI_2);
            let side = if rng.random_bool(0.5) { Side::Alice } else { Side::Bob };
            let m = DichotomicMeasurement::new([u.column(0), u.column(1)], theta, phi)
                .expect("Haar columns are orthonormal");
            (m, side)
        })
        .collect();
    let values: Vec<f64> = draws
        .par_iter()
        .map(|(m, side)| expected_concurrence(s, m, *side))
        .collect::<Result<_>>()?;
    Ok(values.into_iter().fold(0.0, f64::max))
}
