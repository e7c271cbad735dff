//! Local filtering of two-qubit states.
//!
//! Computes concurrence and entanglement of formation, applies one-qubit
//! filters, synthesises the filter that maximises the concurrence multiplier
//! for a given marginal, and analyses two-outcome local measurements. The
//! [`oracle`] module checks the closed forms by brute force.
//!
//! ```
//! use entfilter::{apply_filter, optimal_filter, Side, TwoQubitState};
//!
//! let s = TwoQubitState::from_pauli(
//!     [0.0, 0.0, 0.6],
//!     [0.0; 3],
//!     [[0.4, 0.0, 0.0], [0.0, -0.4, 0.0], [0.0, 0.0, 0.4]],
//! )?;
//! let f = optimal_filter(&s.alice_bloch(), Side::Alice)?;
//! let out = apply_filter(&s, &f)?;
//! assert!((out.concurrence_after / out.concurrence_before - 1.25).abs() < 1e-10);
//! assert!((out.probability - 0.4).abs() < 1e-12);
//! # Ok::<(), entfilter::Error>(())
//! ```

pub mod entanglement;
pub mod error;
pub mod filtering;
pub mod io;
pub mod linalg;
pub mod measurement;
pub mod oracle;
pub mod sampling;
pub mod state;
pub mod sweep;
pub mod verify;

pub use entanglement::{concurrence, eof, spin_flip, ConcurrenceReport, LambdaRoute};
pub use error::{Error, Result};
pub use filtering::{
    apply_filter, optimal_filter, optimal_success_probability, optimal_two_sided,
    predicted_ratio, ratio_upper_bound, FilterOperator, FilterOutcome, TwoSidedFilters,
};
pub use linalg::{Matrix2, Matrix4};
pub use measurement::{expected_concurrence, expected_concurrence_product, DichotomicMeasurement};
pub use oracle::{grid_search_optimal_filter, random_search_measurement, SearchResult};
pub use state::{random_state, BellState, Side, SingleQubitState, TwoQubitState, Vec3};
pub use sweep::{sweep, SweepRecord};
