//! Text and JSON reports. Text uses 12 significant digits; JSON keeps full
//! precision.

use std::fmt::{self, Display, Formatter, Write};

use entfilter::filtering::{optimal_success_probability, ratio_upper_bound};
use entfilter::state::Mat3;
use entfilter::sweep::format_significant;
use entfilter::verify::VerifyReport;
use entfilter::{concurrence, FilterOperator, FilterOutcome, Side, TwoQubitState, Vec3};
use serde::Serialize;

const DIGITS: usize = 12;

/// 12 significant digits; exponent form outside `[1e-4, 1e12)`.
fn num(x: f64) -> String {
    let plain = format_significant(x, DIGITS);
    let mag = x.abs();
    if x != 0.0 && x.is_finite() && !(1e-4..1e12).contains(&mag) {
        let rounded: f64 = plain.parse().expect("own output");
        return format!("{rounded:e}");
    }
    plain
}

fn vec3(v: &Vec3) -> String {
    format!("({}, {}, {})", num(v[0]), num(v[1]), num(v[2]))
}

fn opt(x: Option<f64>) -> String {
    x.map_or_else(|| "undefined (pure marginal)".to_string(), num)
}

#[derive(Serialize)]
pub struct SidePrediction {
    pub bloch_length: f64,
    pub purity: f64,
    /// `None` for a pure marginal, where the bound diverges.
    pub optimal_ratio: Option<f64>,
    pub optimal_probability: Option<f64>,
}

impl SidePrediction {
    fn new(s: &TwoQubitState, side: Side) -> Self {
        let marginal = s.reduced_state(side);
        let a = marginal.bloch_norm();
        let ratio = ratio_upper_bound(a).ok();
        Self {
            bloch_length: a,
            purity: marginal.purity(),
            optimal_ratio: ratio,
            optimal_probability: ratio.and_then(|_| optimal_success_probability(a).ok()),
        }
    }
}

#[derive(Serialize)]
pub struct AnalyzeReport {
    pub concurrence: f64,
    pub eof: f64,
    pub lambdas: [f64; 4],
    pub purity: f64,
    pub a: Vec3,
    pub b: Vec3,
    #[serde(rename = "T")]
    pub t: Mat3,
    pub alice: SidePrediction,
    pub bob: SidePrediction,
}

impl AnalyzeReport {
    pub fn new(s: &TwoQubitState) -> entfilter::Result<Self> {
        let c = concurrence(s)?;
        let (a, b, t) = s.pauli_decomposition();
        Ok(Self {
            concurrence: c.concurrence,
            eof: c.eof,
            lambdas: c.lambdas,
            purity: (*s.rho() * *s.rho()).trace().re,
            a,
            b,
            t,
            alice: SidePrediction::new(s, Side::Alice),
            bob: SidePrediction::new(s, Side::Bob),
        })
    }
}

impl Display for AnalyzeReport {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        writeln!(f, "concurrence          {}", num(self.concurrence))?;
        writeln!(f, "eof                  {}", num(self.eof))?;
        let l: Vec<String> = self.lambdas.iter().map(|x| num(*x)).collect();
        writeln!(f, "lambdas              [{}]", l.join(", "))?;
        writeln!(f, "purity               {}", num(self.purity))?;
        writeln!(f, "a                    {}", vec3(&self.a))?;
        writeln!(f, "b                    {}", vec3(&self.b))?;
        for (j, row) in self.t.iter().enumerate() {
            let label = if j == 0 { "T" } else { "" };
            writeln!(f, "{label:<21}{}", vec3(row))?;
        }
        for (name, p) in [("A", &self.alice), ("B", &self.bob)] {
            writeln!(f, "side {name}")?;
            writeln!(f, "  bloch length       {}", num(p.bloch_length))?;
            writeln!(f, "  marginal purity    {}", num(p.purity))?;
            writeln!(f, "  optimal ratio      {}", opt(p.optimal_ratio))?;
            writeln!(f, "  optimal prob.      {}", opt(p.optimal_probability))?;
        }
        Ok(())
    }
}

#[derive(Serialize)]
pub struct FilterReport {
    pub filter: FilterOperator,
    /// Rows of `K` as `[re, im]` pairs.
    pub matrix: [[[f64; 2]; 2]; 2],
    pub predicted_ratio: f64,
    pub predicted_probability: f64,
}

impl FilterReport {
    pub fn new(f: &FilterOperator, ratio: f64, probability: f64) -> Self {
        Self {
            filter: *f,
            matrix: f.matrix().entries().map(|row| row.map(|z| [z.re, z.im])),
            predicted_ratio: ratio,
            predicted_probability: probability,
        }
    }
}

impl Display for FilterReport {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        writeln!(f, "side                 {}", self.filter.side())?;
        writeln!(f, "x0                   {}", num(self.filter.x0()))?;
        writeln!(f, "x                    {}", vec3(&self.filter.x()))?;
        for (i, row) in self.matrix.iter().enumerate() {
            let label = if i == 0 { "K" } else { "" };
            let cells: Vec<String> = row
                .iter()
                .map(|[re, im]| {
                    let sign = if *im < 0.0 { '-' } else { '+' };
                    format!("{}{sign}{}i", num(*re), num(im.abs()))
                })
                .collect();
            writeln!(f, "{label:<21}[{}]", cells.join(", "))?;
        }
        writeln!(f, "predicted ratio      {}", num(self.predicted_ratio))?;
        writeln!(f, "predicted prob.      {}", num(self.predicted_probability))
    }
}

#[derive(Serialize)]
pub struct ApplyReport {
    pub probability: f64,
    pub concurrence_before: f64,
    pub concurrence_after: f64,
    /// `C_after / C_before`; `None` when the input is separable.
    pub achieved_ratio: Option<f64>,
    /// `|det K| / p`.
    pub determinant_ratio: f64,
}

impl ApplyReport {
    pub fn new(out: &FilterOutcome) -> Self {
        Self {
            probability: out.probability,
            concurrence_before: out.concurrence_before,
            concurrence_after: out.concurrence_after,
            achieved_ratio: out.achieved_ratio(),
            determinant_ratio: out.ratio,
        }
    }
}

impl Display for ApplyReport {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        writeln!(f, "probability          {}", num(self.probability))?;
        writeln!(f, "concurrence before   {}", num(self.concurrence_before))?;
        writeln!(f, "concurrence after    {}", num(self.concurrence_after))?;
        let achieved = self
            .achieved_ratio
            .map_or_else(|| "undefined (separable input)".to_string(), num);
        writeln!(f, "achieved ratio       {achieved}")?;
        writeln!(f, "|det K| / p          {}", num(self.determinant_ratio))
    }
}

#[derive(Serialize)]
pub struct MeasureReport {
    pub concurrence: f64,
    /// Branch-by-branch expectation.
    pub expected: f64,
    /// `C` times the determinant sums.
    pub predicted: f64,
}

impl Display for MeasureReport {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        writeln!(f, "concurrence          {}", num(self.concurrence))?;
        writeln!(f, "expected             {}", num(self.expected))?;
        writeln!(f, "predicted            {}", num(self.predicted))
    }
}

pub fn verify_summary(r: &VerifyReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "seed {} trials {}", r.seed, r.trials);
    for suite in &r.suites {
        let _ = writeln!(
            s,
            "{:<4} {:<26} cases {:>6}  worst {:<18}  tol {}",
            if suite.passed { "ok" } else { "FAIL" },
            suite.name,
            suite.cases,
            num(suite.worst_residual),
            num(suite.tolerance),
        );
    }
    let failed = r.suites.iter().filter(|x| !x.passed).count();
    let _ = writeln!(
        s,
        "{} of {} suites passed",
        r.suites.len() - failed,
        r.suites.len()
    );
    s
}
