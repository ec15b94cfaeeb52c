use std::fmt::Write as _;
use std::path::Path;

use locext_algcert::{
    certify_sn_lower, combine_bounds, range_coordinate_matrix, sn_upper_from_decomposition, LowerOptions, LowerOutcome,
    SymbolicRangeMatrix,
};
use locext_core::exactmat::{psd_check, rank, BigRational, ExactMatrix, ExactVector, PsdVerdict};
use locext_core::extender::{
    extremality_check_ppt, extremality_check_psd, ppt_extension_space, split_blocks, ExtensionBlocks, ExtensionStep,
    PptVerdict,
};
use locext_core::qstates::{ket, BipartiteState, NamedTerm};
use locext_numlab::{gauss_newton_birank, render_table, unextendibility_survey, GnOptions, NumError, SurveyCase, SurveyOptions};
use serde_json::json;

use crate::acceptance::{run_all, AcceptanceConfig};
use crate::args::{CertifyArgs, ExtendArgs, Global, PlotArgs, SampleArgs, SurveyArgs, VerifyArgs};
use crate::cert::{parse_certificate, Certificate, PptCertificate};
use crate::error::CliError;
use crate::input::{parse_dims, parse_pair, read_json, read_text, resolve_state, Known, Resolved};
use crate::plot::plot;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Verdict,
    Inconclusive,
}

impl Status {
    pub fn code(self) -> i32 {
        match self {
            Status::Verdict => 0,
            Status::Inconclusive => 1,
        }
    }
}

/// What a verb produced. Artifacts are always written as JSON, with `text`
/// going to stderr as a summary.
pub struct Output {
    pub json: serde_json::Value,
    pub text: String,
    pub status: Status,
    pub artifact: bool,
}

impl Output {
    fn report(json: serde_json::Value, text: String, status: Status) -> Self {
        Self { json, text, status, artifact: false }
    }

    fn artifact(json: serde_json::Value, text: String, status: Status) -> Self {
        Self { json, text, status, artifact: true }
    }
}

fn to_json<T: serde::Serialize>(v: &T) -> serde_json::Value {
    serde_json::to_value(v).expect("serializable")
}

pub fn build(g: &Global) -> Result<Output, CliError> {
    let s = resolve_state(g)?.state;
    let text = format!("{} on {}x{}, birank {:?}", s.label, s.dim_a, s.dim_b, s.birank());
    Ok(Output::artifact(to_json(&s), text, Status::Verdict))
}

pub fn ppt_check(g: &Global) -> Result<Output, CliError> {
    let s = resolve_state(g)?.state;
    let c = PptCertificate::new(&s)?;
    let text = format!(
        "{}: {} (birank {:?})",
        s.label,
        if c.is_ppt() { "PPT" } else { "not PPT" },
        c.birank
    );
    Ok(Output::artifact(to_json(&Certificate::Ppt(c)), text, Status::Verdict))
}

fn read_step(path: &Path) -> Result<ExtensionStep, CliError> {
    read_json(path, "--step")
}

pub fn extend(g: &Global, a: &ExtendArgs) -> Result<Output, CliError> {
    let s = resolve_state(g)?.state;
    if let Some(path) = &a.step {
        let step = read_step(path)?;
        let out = step.apply(&s, format!("{}+ext", s.label)).map_err(|e| CliError::input("--step", e))?;
        let text = format!("extended to {}x{}, birank {:?}, PPT {}", out.dim_a, out.dim_b, out.birank(), out.is_ppt());
        return Ok(Output::artifact(to_json(&out), text, Status::Verdict));
    }
    let sp = ppt_extension_space(&s)?;
    let mut text = String::new();
    let _ = writeln!(text, "{} on {}x{}, birank {:?}", s.label, s.dim_a, s.dim_b, sp.birank);
    let _ = writeln!(text, "admissible couplings: {} (complex), {} real", sp.dimension, sp.real_dimension());
    let _ = writeln!(text, "SLOCC couplings:      {}", sp.trivial_dimension);
    let _ = writeln!(text, "nontrivial:           {}", sp.nontrivial_dimension());
    let _ = writeln!(text, "parameter-count bound (p+q-mn)n-m = {}", sp.bound);
    let json = json!({
        "label": s.label,
        "dims": sp.dims,
        "birank": sp.birank,
        "dimension": sp.dimension,
        "trivial_dimension": sp.trivial_dimension,
        "nontrivial_dimension": sp.nontrivial_dimension(),
        "bound": sp.bound,
        "basis": sp.basis,
    });
    Ok(Output::report(json, text, Status::Verdict))
}

fn read_witness(path: &Path, dim: usize) -> Result<ExactVector, CliError> {
    let v: ExactVector = read_json(path, "--witness")?;
    if v.len() != dim {
        return Err(CliError::input("--witness", format!("length {} for a {dim}-dimensional space", v.len())));
    }
    Ok(v)
}

fn ldl_terms(s: &BipartiteState) -> Result<Vec<(BigRational, ExactVector)>, CliError> {
    match psd_check(&s.matrix)? {
        PsdVerdict::Psd(f) => Ok(f.rank_one_terms()),
        PsdVerdict::NotPsd { .. } => unreachable!("states are PSD by construction"),
    }
}

fn weighted(terms: &[NamedTerm]) -> Vec<(BigRational, ExactVector)> {
    terms.iter().map(|t| (t.weight.clone(), t.vector.clone())).collect()
}

fn in_range(s: &BipartiteState, v: &ExactVector) -> Result<bool, CliError> {
    let mut cols = s.matrix.column_vectors();
    let r = rank(&s.matrix);
    cols.push(v.clone());
    Ok(rank(&ExactMatrix::from_columns(s.dim(), &cols)) == r)
}

pub fn certify_sn(g: &Global, a: &CertifyArgs) -> Result<Output, CliError> {
    let Resolved { state: s, known } = resolve_state(g)?;
    let (m, n) = (s.dim_a, s.dim_b);
    let diagonal = ket(m, n, &(0..m.min(n)).map(|i| (i, i, 1)).collect::<Vec<_>>());
    let named = |terms: &[NamedTerm], w: &str| terms.iter().find(|t| t.name == w).map(|t| t.vector.clone());
    let (matrix, witness, upper_terms, default_k, exclude) = match &known {
        Known::Terms { terms, witness, default_k, exclude } => (
            SymbolicRangeMatrix::from_terms(&s, terms, true)?,
            named(terms, witness).unwrap_or(diagonal),
            weighted(terms),
            *default_k,
            exclude.clone(),
        ),
        Known::Rho4x5 { stage, data } => {
            let terms = &data.stage_terms[*stage];
            (
                SymbolicRangeMatrix::from_terms(&s, terms, true)?,
                named(terms, "psi00").unwrap_or(diagonal),
                weighted(terms),
                if *stage == 2 { 3 } else { 2 },
                vec![],
            )
        }
        Known::Nothing => (range_coordinate_matrix(&s, false)?, diagonal, ldl_terms(&s)?, 2, vec![]),
    };
    let witness = match &a.witness {
        Some(p) => read_witness(p, s.dim())?,
        // an unnamed state may not contain the diagonal vector; use a range vector instead
        None if matches!(known, Known::Nothing) && !in_range(&s, &witness)? => upper_terms[0].1.clone(),
        None => witness,
    };
    let k = g.k.unwrap_or(default_k);
    let opts = LowerOptions { n_max: g.nmax, exclude_vars: exclude, ..LowerOptions::default() };
    let lower = certify_sn_lower(&s, &matrix, &witness, k, &opts).map_err(|e| match e {
        locext_algcert::AlgError::InvalidInput(msg) => CliError::input("--k", msg),
        other => other.into(),
    })?;
    let upper = sn_upper_from_decomposition(&upper_terms, &s)?;
    let (cert, status, text) = match lower {
        LowerOutcome::Certified(lo) => {
            let v = combine_bounds(&lo, &upper)?;
            let text = match v.exact {
                Some(sn) => format!("{}: SN = {sn} (lower {}, upper {})", s.label, v.lower, v.upper),
                None => format!("{}: {} <= SN <= {}", s.label, v.lower, v.upper),
            };
            (Certificate::SchmidtNumber { lower: Some(lo), upper: Box::new(upper), verdict: Some(v) }, Status::Verdict, text)
        }
        LowerOutcome::Inconclusive { k, n_max, generators } => {
            let text = format!(
                "{}: no certificate of SN >= {k} up to power {n_max} ({generators} generators); SN <= {}",
                s.label, upper.value
            );
            (Certificate::SchmidtNumber { lower: None, upper: Box::new(upper), verdict: None }, Status::Inconclusive, text)
        }
    };
    Ok(Output::artifact(to_json(&cert), text, status))
}

pub fn extremal(g: &Global, a: &ExtendArgs) -> Result<Output, CliError> {
    let Resolved { state: s, known } = resolve_state(g)?;
    let mut cases: Vec<(String, ExtensionBlocks)> = Vec::new();
    if let Some(path) = &a.step {
        let step = read_step(path)?;
        let b = step
            .blocks(&s)
            .map_err(|e| CliError::input("--step", e))?
            .ok_or_else(|| CliError::input("--step", "an SLOCC step has no block form"))?;
        cases.push(("step".into(), b));
    } else if let Known::Rho4x5 { stage, data } = &known {
        let cores = [&data.start, &data.stages[0], &data.stages[1]];
        for (i, (step, core)) in data.pipeline.steps.iter().zip(cores).enumerate().take(stage + 1) {
            cases.push((format!("pipeline step {}", i + 1), step.blocks(core)?.expect("pipeline steps have blocks")));
        }
    } else {
        let perp = s.dim_a - 1;
        cases.push((format!("A-index {perp} as the edge"), split_blocks(&s, locext_core::qstates::Side::A, perp)?));
    }
    let mut text = String::new();
    let mut reports = Vec::new();
    let mut status = Status::Verdict;
    for (label, b) in &cases {
        let psd = extremality_check_psd(b)?;
        let ppt = extremality_check_ppt(b)?;
        if ppt.verdict == PptVerdict::NotCertified {
            status = Status::Inconclusive;
        }
        let psd_word = match &psd {
            locext_core::extender::PsdExtremality::Flat => "flat (extremal)".to_string(),
            locext_core::extender::PsdExtremality::PureEdge => "pure edge (extremal)".to_string(),
            locext_core::extender::PsdExtremality::NotExtremal { remainders, .. } => {
                format!("not extremal: flat part + {} product terms", remainders.len())
            }
        };
        let _ = writeln!(
            text,
            "{label}: PSD cone {psd_word}; PPT cone {:?} (intersection {}, edge range intersection {})",
            ppt.verdict, ppt.intersection_dim, ppt.range_intersection_dim
        );
        reports.push(json!({ "case": label, "psd": psd, "ppt": ppt }));
    }
    Ok(Output::report(json!(reports), text, status))
}

fn gn_options(g: &Global) -> Result<GnOptions, CliError> {
    let mut o = GnOptions::default();
    if let Some(t) = g.tol {
        if !(t > 0.0 && t.is_finite()) {
            return Err(CliError::input("--tol", format!("{t} is not a positive tolerance")));
        }
        o.tol = t;
    }
    Ok(o)
}

pub fn sample(g: &Global, a: &SampleArgs) -> Result<Output, CliError> {
    let (m, n) = parse_dims(&a.dims, "--dims")?;
    let (p, q) = parse_pair(&a.birank, "--birank")?;
    let seed = g.seed.unwrap_or(0);
    match gauss_newton_birank(m, n, p, q, seed, &gn_options(g)?) {
        Ok(s) => {
            let text = format!("{m}x{n} birank ({p},{q}) seed {seed}: {} iterations, residual {:.1e}", s.iterations, s.residual);
            Ok(Output::artifact(to_json(&s), text, Status::Verdict))
        }
        Err(NumError::ConvergenceFailure { iterations, residual }) => {
            let text = format!("no convergence after {iterations} iterations (residual {residual:.1e})");
            Ok(Output::artifact(json!({ "converged": false, "iterations": iterations, "residual": residual }), text, Status::Inconclusive))
        }
        Err(NumError::InvalidInput(msg)) => Err(CliError::input("--birank", msg)),
        Err(e) => Err(e.into()),
    }
}

fn parse_case(s: &str) -> Result<SurveyCase, CliError> {
    let (d, b) = s.split_once(':').ok_or_else(|| CliError::input("--case", format!("expected MxN:P,Q, got {s:?}")))?;
    Ok(SurveyCase { dims: parse_dims(d, "--case")?, birank: parse_pair(b, "--case")? })
}

pub fn survey(g: &Global, a: &SurveyArgs) -> Result<Output, CliError> {
    let cases: Vec<SurveyCase> = a.cases.iter().map(|c| parse_case(c)).collect::<Result<_, _>>()?;
    let opts = SurveyOptions {
        samples: g.samples.unwrap_or(100),
        seed: g.seed.unwrap_or(0),
        gn: gn_options(g)?,
        ..SurveyOptions::default()
    };
    let reports = cases
        .into_iter()
        .map(|c| {
            unextendibility_survey(c, &opts).map_err(|e| match e {
                NumError::InvalidInput(msg) => CliError::input("--case", msg),
                other => other.into(),
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Output::report(to_json(&reports), render_table(&reports), Status::Verdict))
}

pub fn verify(a: &VerifyArgs) -> Result<Output, CliError> {
    let cert = parse_certificate(&read_text(&a.file, "file")?)?;
    let r = cert.replay();
    let mut text: String = r.checks.iter().map(|c| format!("ok   {c}\n")).collect();
    match &r.failure {
        Some(f) => text.push_str(&format!("FAIL {f}\n")),
        None => text.push_str("certificate verified\n"),
    }
    let status = if r.passed { Status::Verdict } else { Status::Inconclusive };
    Ok(Output::report(to_json(&r), text, status))
}

pub fn reproduce(g: &Global) -> Result<Output, CliError> {
    let cfg = AcceptanceConfig {
        seed: g.seed.unwrap_or(AcceptanceConfig::default().seed),
        family_max_k: g.k.unwrap_or(4),
        survey_samples: g.samples.unwrap_or(100),
    };
    if cfg.family_max_k < 2 {
        return Err(CliError::input("--k", "the family starts at k = 2"));
    }
    let manifest = run_all(&cfg);
    let status = if manifest.all_passed { Status::Verdict } else { Status::Inconclusive };
    Ok(Output::artifact(to_json(&manifest), manifest.text(), status))
}

pub fn plot_verb(g: &Global, a: &PlotArgs) -> Result<Output, CliError> {
    let s = resolve_state(g)?.state;
    let p = plot(&s, a.format);
    Ok(Output::report(to_json(&p), p.content.clone(), Status::Verdict))
}
