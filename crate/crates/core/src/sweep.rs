//! Optimal ratio and success probability as functions of the marginal Bloch
//! length, tabulated for plotting.

use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::filtering::{optimal_success_probability, ratio_upper_bound};

/// Significant digits used for CSV output.
pub const CSV_DIGITS: usize = 15;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SweepRecord {
    pub a: f64,
    pub ratio: f64,
    /// `ratio − 1`.
    pub gain: f64,
    /// `1 − a`.
    pub probability: f64,
}

impl SweepRecord {
    pub fn at(a: f64) -> Result<Self> {
        let ratio = ratio_upper_bound(a)?;
        Ok(Self {
            a,
            ratio,
            gain: ratio - 1.0,
            probability: optimal_success_probability(a)?,
        })
    }
}

/// `steps` records at uniform spacing over `[a_min, a_max]`, endpoints
/// included.
pub fn sweep(a_min: f64, a_max: f64, steps: usize) -> Result<Vec<SweepRecord>> {
    if !(0.0 <= a_min && a_min < a_max && a_max < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "need 0 <= min < max < 1, got min = {a_min}, max = {a_max}"
        )));
    }
    if steps < 2 {
        return Err(Error::InvalidArgument(format!("need at least 2 steps, got {steps}")));
    }
    let last = (steps - 1) as f64;
    (0..steps)
        .map(|i| {
            let a = if i + 1 == steps {
                a_max
            } else {
                a_min + (a_max - a_min) * i as f64 / last
            };
            SweepRecord::at(a)
        })
        .collect()
}

/// Rounds to `digits` significant digits and prints the shortest decimal
/// that reads back as the rounded value. Never uses grouping or a locale.
pub fn format_significant(x: f64, digits: usize) -> String {
    if !x.is_finite() || x == 0.0 {
        return format!("{}", if x == 0.0 { 0.0 } else { x });
    }
    let rounded: f64 = format!("{:.*e}", digits.saturating_sub(1), x)
        .parse()
        .expect("formatted float parses");
    format!("{rounded}")
}

/// Header `a,ratio,gain,probability`, one row per record, `\n` line ends.
pub fn write_csv<W: Write>(out: W, records: &[SweepRecord]) -> Result<()> {
    let io_err = |e: csv::Error| Error::Io(e.to_string());
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(["a", "ratio", "gain", "probability"]).map_err(io_err)?;
    for r in records {
        w.write_record([r.a, r.ratio, r.gain, r.probability].map(|x| format_significant(x, CSV_DIGITS)))
            .map_err(io_err)?;
    }
    w.flush().map_err(|e| Error::Io(e.to_string()))
}
