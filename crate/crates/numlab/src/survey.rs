use std::collections::BTreeMap;
use std::fmt::Write as _;

use locext_core::extender::extension_count_bound;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::NumError;
use crate::extension::{numeric_extension_dimension, ExtensionOptions};
use crate::gauss_newton::{gauss_newton_birank, GnOptions};

/// One `(m, n, p, q)` case of a survey.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurveyCase {
    pub dims: (usize, usize),
    pub birank: (usize, usize),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SurveyOptions {
    pub samples: usize,
    pub seed: u64,
    pub gn: GnOptions,
    pub extension: ExtensionOptions,
}

impl Default for SurveyOptions {
    fn default() -> Self {
        Self { samples: 100, seed: 0, gn: GnOptions::default(), extension: ExtensionOptions::default() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SurveyReport {
    pub case: SurveyCase,
    pub samples: usize,
    pub converged: usize,
    /// Seeds whose Gauss–Newton run did not converge.
    pub failed_seeds: Vec<u64>,
    /// Seeds whose rank decisions were ambiguous.
    pub ambiguous_seeds: Vec<u64>,
    pub max_residual: Option<f64>,
    pub mean_iterations: Option<f64>,
    /// Extension dimension → number of samples.
    pub histogram: BTreeMap<usize, usize>,
    pub bound: i64,
    /// `m + max(bound, 0)`, the count expected for a generic state.
    pub expected: usize,
    /// Samples whose count differs from `expected`.
    pub deviations: usize,
    /// Smallest spectral gap, in decades, over all classified samples.
    pub min_gap_decades: Option<f64>,
    pub options: SurveyOptions,
}

enum Outcome {
    Classified { dimension: usize, iterations: usize, residual: f64, gap: f64 },
    Failed,
    Ambiguous,
}

/// Seed of sample `i`; independent of how samples are scheduled.
pub fn sample_seed(base: u64, i: usize) -> u64 {
    base.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(i as u64)
}

fn run_one(case: &SurveyCase, seed: u64, opts: &SurveyOptions) -> Result<Outcome, NumError> {
    let (m, n) = case.dims;
    let (p, q) = case.birank;
    let state = match gauss_newton_birank(m, n, p, q, seed, &opts.gn) {
        Ok(s) => s,
        Err(NumError::ConvergenceFailure { .. }) => return Ok(Outcome::Failed),
        Err(e) => return Err(e),
    };
    match numeric_extension_dimension(&state, &opts.extension) {
        Ok(e) => Ok(Outcome::Classified {
            dimension: e.dimension,
            iterations: state.iterations,
            residual: state.residual,
            gap: e.min_gap_decades(),
        }),
        Err(NumError::RankAmbiguity { .. }) => Ok(Outcome::Ambiguous),
        Err(e) => Err(e),
    }
}

/// Samples `opts.samples` states of the given birank and tallies their
/// numerical extension dimensions. Samples run in parallel; the report does
/// not depend on the thread count.
pub fn unextendibility_survey(case: SurveyCase, opts: &SurveyOptions) -> Result<SurveyReport, NumError> {
    let (m, n) = case.dims;
    let (p, q) = case.birank;
    if m == 0 || n == 0 || !(1..=m * n).contains(&p) || !(1..=m * n).contains(&q) {
        return Err(NumError::InvalidInput(format!("birank ({p}, {q}) impossible for {m}×{n}")));
    }
    let outcomes: Vec<(u64, Outcome)> = (0..opts.samples)
        .into_par_iter()
        .map(|i| {
            let seed = sample_seed(opts.seed, i);
            run_one(&case, seed, opts).map(|o| (seed, o))
        })
        .collect::<Result<_, _>>()?;

    let bound = extension_count_bound(m, n, p, q);
    let expected = m + bound.max(0) as usize;
    let mut report = SurveyReport {
        case,
        samples: opts.samples,
        converged: 0,
        failed_seeds: Vec::new(),
        ambiguous_seeds: Vec::new(),
        max_residual: None,
        mean_iterations: None,
        histogram: BTreeMap::new(),
        bound,
        expected,
        deviations: 0,
        min_gap_decades: None,
        options: opts.clone(),
    };
    let mut iterations = 0usize;
    for (seed, o) in outcomes {
        match o {
            Outcome::Failed => report.failed_seeds.push(seed),
            Outcome::Ambiguous => {
                report.converged += 1;
                report.ambiguous_seeds.push(seed);
            }
            Outcome::Classified { dimension, iterations: it, residual, gap } => {
                report.converged += 1;
                iterations += it;
                *report.histogram.entry(dimension).or_default() += 1;
                if dimension != expected {
                    report.deviations += 1;
                }
                report.max_residual = Some(report.max_residual.map_or(residual, |r: f64| r.max(residual)));
                report.min_gap_decades = Some(report.min_gap_decades.map_or(gap, |g: f64| g.min(gap)));
            }
        }
    }
    let classified: usize = report.histogram.values().sum();
    if classified > 0 {
        report.mean_iterations = Some(iterations as f64 / classified as f64);
    }
    Ok(report)
}

fn opt(x: Option<f64>, prec: usize) -> String {
    x.map_or("-".into(), |v| format!("{v:.prec$e}"))
}

/// Plain-text table, one row per report.
pub fn render_table(reports: &[SurveyReport]) -> String {
    let mut out = String::new();
    if let Some(r) = reports.first() {
        let o = &r.options;
        let _ = writeln!(
            out,
            "# gn tol {:e}, max_iter {}, start epsilon {}, rank tol {:e}, defect tol {:e}, seed {}",
            o.gn.tol, o.gn.max_iter, o.gn.start_epsilon, o.extension.rank_tol, o.extension.defect_tol, o.seed
        );
    }
    let _ = writeln!(
        out,
        "{:>5} {:>7} {:>7} {:>9} {:>6} {:>8} {:>9} {:>9} {:>9}  histogram",
        "m×n", "(p,q)", "bound", "expected", "conv", "ambig", "deviate", "max res", "gap dec"
    );
    for r in reports {
        let hist: Vec<String> = r.histogram.iter().map(|(d, c)| format!("{d}:{c}")).collect();
        let _ = writeln!(
            out,
            "{:>5} {:>7} {:>7} {:>9} {:>6} {:>8} {:>9} {:>9} {:>9}  {}",
            format!("{}×{}", r.case.dims.0, r.case.dims.1),
            format!("({},{})", r.case.birank.0, r.case.birank.1),
            r.bound,
            r.expected,
            format!("{}/{}", r.converged, r.samples),
            r.ambiguous_seeds.len(),
            r.deviations,
            opt(r.max_residual, 1),
            r.min_gap_decades.map_or("-".into(), |g| format!("{g:.1}")),
            hist.join(" ")
        );
    }
    out
}
