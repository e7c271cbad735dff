//! Seeded samplers for property suites and the oracle.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::linalg::Matrix2;
use crate::filtering::FilterOperator;
use crate::state::{Side, Vec3};

/// Haar-random 2×2 unitary.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R) -> Matrix2 {
    let mut z: [f64; 4] = std::array::from_fn(|_| rng.sample(StandardNormal));
    let norm = z.iter().map(|x| x * x).sum::<f64>().sqrt();
    z.iter_mut().for_each(|x| *x /= norm);
    let a = Complex64::new(z[0], z[1]);
    let b = Complex64::new(z[2], z[3]);
    let phase = Complex64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU));
    Matrix2::from_rows([[a, -b.conj()], [b, a.conj()]]).scale_complex(phase)
}

/// Uniform direction on the unit sphere.
pub fn random_direction<R: Rng + ?Sized>(rng: &mut R) -> Vec3 {
    loop {
        let v: Vec3 = std::array::from_fn(|_| rng.sample(StandardNormal));
        let norm = crate::state::norm3(&v);
        if norm > 1e-12 {
            return v.map(|x| x / norm);
        }
    }
}

/// Valid filter with direction uniform on the sphere, `‖x‖` uniform in
/// `[0, 1)` and `x₀` uniform over its admissible interval.
pub fn random_filter<R: Rng + ?Sized>(rng: &mut R, side: Side) -> FilterOperator {
    let norm: f64 = rng.random_range(0.0..1.0);
    let x0 = rng.random_range(norm..=2.0 - norm);
    let x = random_direction(rng).map(|c| c * norm);
    FilterOperator::new(x0, x, side).expect("sampled inside the validity region")
}
