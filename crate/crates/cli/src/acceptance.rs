//! The nine acceptance criteria, shared by `locext reproduce` and the
//! `acceptance` test target.

use std::time::Instant;

use locext_algcert::{
    buchberger, certify_sn_lower, combine_bounds, edge_state_check, minor_ideal, range_coordinate_matrix,
    separability_rules, separable_by_rules, sn_upper_from_decomposition, rho4x5_identity_check, verify_certificate,
    EdgeVerdict, Evidence, GbOptions, LowerOptions, Polynomial, SNCertificate, SeparabilityVerdict, SymbolicRangeMatrix,
};
use locext_core::exactmat::{
    basis_vector, kron_vec, psd_check, ratio, vec_is_zero, BigRational, ExactMatrix, ExactVector, GaussianRational,
};
use locext_core::extender::{
    is_admissible_coupling, lift_weighted, ppt_extension_space, sn_bounds_from_projection, witness_schur_peel,
    BlockLayout, ExtensionStep,
};
use locext_core::qstates::{
    d_minimality_check, family_pt_terms, family_terms, ket, maximally_mixed, rho_3x3, rho_3x3_pt_terms, rho_4x5,
    rho_family, terms_matrix, tiles_complement, tiles_upb, BipartiteOperator, BipartiteState, FamilySpec, NamedTerm,
    Side,
};
use locext_numlab::{
    numeric_extension_dimension, unextendibility_survey, ExtensionOptions, FloatState, SurveyCase, SurveyOptions,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

#[derive(Clone, Debug, Serialize)]
pub struct AcceptanceConfig {
    pub seed: u64,
    /// Largest family parameter; 5 adds the long opt-in run.
    pub family_max_k: usize,
    pub survey_samples: usize,
}

impl Default for AcceptanceConfig {
    fn default() -> Self {
        Self { seed: 1, family_max_k: 4, survey_samples: 100 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CriterionResult {
    pub id: String,
    pub title: String,
    pub passed: bool,
    pub seconds: f64,
    pub budget_seconds: Option<f64>,
    pub detail: String,
    pub notes: Vec<String>,
    /// Opt-in results do not count towards the overall verdict.
    pub optional: bool,
}

impl CriterionResult {
    pub fn line(&self) -> String {
        let budget = self.budget_seconds.map_or(String::new(), |b| format!(" / {b} s"));
        format!(
            "[{}] {} {} ({:.2} s{budget}): {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.title,
            self.seconds,
            self.detail
        )
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Manifest {
    pub config: AcceptanceConfig,
    pub results: Vec<CriterionResult>,
    pub all_passed: bool,
}

impl Manifest {
    pub fn text(&self) -> String {
        let mut out: String = self.results.iter().map(|r| r.line() + "\n").collect();
        for r in &self.results {
            for n in &r.notes {
                out.push_str(&format!("  note {}: {n}\n", r.id));
            }
        }
        out.push_str(if self.all_passed { "all criteria passed\n" } else { "some criteria failed\n" });
        out
    }
}

type Outcome = Result<(String, Vec<String>), String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn timed(id: &str, title: &str, budget: Option<f64>, f: impl FnOnce() -> Outcome) -> CriterionResult {
    let start = Instant::now();
    let out = f();
    let seconds = start.elapsed().as_secs_f64();
    let (passed, detail, notes) = match out {
        Ok((d, n)) => match budget {
            Some(b) if seconds > b => (false, format!("over the {b} s budget; {d}"), n),
            _ => (true, d, n),
        },
        Err(e) => (false, e, vec![]),
    };
    CriterionResult {
        id: id.into(),
        title: title.into(),
        passed,
        seconds,
        budget_seconds: budget,
        detail,
        notes,
        optional: false,
    }
}

fn weighted(terms: &[NamedTerm]) -> Vec<(BigRational, ExactVector)> {
    terms.iter().map(|t| (t.weight.clone(), t.vector.clone())).collect()
}

fn term<'a>(terms: &'a [NamedTerm], name: &str) -> Result<&'a ExactVector, String> {
    terms.iter().find(|t| t.name == name).map(|t| &t.vector).ok_or_else(|| format!("no term named {name}"))
}

fn power(c: &SNCertificate) -> Option<u32> {
    match &c.evidence {
        Evidence::Nullstellensatz(ev) => Some(ev.power),
        Evidence::Decomposition(_) => None,
    }
}

fn exactly_ppt(s: &BipartiteState) -> Result<bool, String> {
    Ok(psd_check(&s.matrix).map_err(err)?.is_psd() && psd_check(&s.partial_transpose(Side::B).matrix).map_err(err)?.is_psd())
}

pub fn criterion_1() -> CriterionResult {
    timed("1", "3x3 regression", Some(1.0), || {
        let s = rho_3x3();
        ensure(exactly_ppt(&s)?, || "state is not PPT".into())?;
        ensure(s.birank() == (5, 6), || format!("birank {:?}", s.birank()))?;
        let pt_terms = rho_3x3_pt_terms();
        let weights: Vec<BigRational> = pt_terms.iter().map(|t| t.weight.clone()).collect();
        let expected: Vec<BigRational> = [1, 2, 1, 1, 1, 1].iter().map(|&w| ratio(w, 1)).collect();
        ensure(weights == expected, || "partial-transpose weights differ".into())?;
        ensure(terms_matrix(&pt_terms, 9) == s.partial_transpose(Side::B).matrix, || {
            "partial transpose differs from its decomposition".into()
        })?;

        let m = range_coordinate_matrix(&s, true).map_err(err)?;
        let ideal = minor_ideal(&m, 2, &[]).map_err(err)?;
        let gb = buchberger(&ideal.generators, GbOptions::default());
        let var = |name: &str| -> Result<Polynomial, String> {
            let i = m.variable_index(name).ok_or_else(|| format!("no variable {name}"))?;
            Ok(Polynomial::var(m.nvars(), i))
        };
        let (p00, p01, p10) = (var("psi00")?, var("psi01")?, var("psi10")?);
        ensure(gb.contains(&p00.pow(2)), || "psi00^2 not in the 2-minor ideal".into())?;
        ensure(gb.contains(&p01.mul(&p10)), || "psi01*psi10 not in the 2-minor ideal".into())?;
        ensure(!gb.contains(&p00), || "psi00 itself in the ideal".into())?;

        let e = |i| basis_vector(3, i);
        let rep = edge_state_check(&s, &[(e(0), e(2)), (e(2), e(0))]);
        ensure(rep.verdict == EdgeVerdict::EdgeState, || "candidates |02>, |20> violate the edge property".into())?;
        Ok(("PPT, birank (5,6), PT weights (1,2,1,1,1,1), psi00^2 and psi01*psi10 in the ideal, edge state".into(), vec![]))
    })
}

pub fn criterion_2() -> CriterionResult {
    timed("2", "4x5 pipeline, SN = 3", Some(10.0), || {
        let r = rho_4x5().map_err(err)?;
        ensure(r.pipeline.steps.len() == 3 && r.stages.len() == 3, || "expected three recorded steps".into())?;
        let s = r.final_state();
        ensure((s.dim_a, s.dim_b) == (4, 5), || "final state is not 4x5".into())?;
        ensure(exactly_ppt(s)?, || "final state is not PPT".into())?;

        let w = term(&r.terms, "psi00")?;
        ensure(*w == ket(4, 5, &[(0, 0, 1), (1, 1, 1), (2, 2, 1)]), || "witness is not |00>+|11>+|22>".into())?;
        let m = SymbolicRangeMatrix::from_terms(s, &r.terms, true).map_err(err)?;
        let out = certify_sn_lower(s, &m, w, 3, &LowerOptions::default()).map_err(err)?;
        let lower = out.certificate().ok_or("lower bound inconclusive")?;
        ensure(power(lower) == Some(4), || format!("power {:?}, expected 4", power(lower)))?;
        verify_certificate(lower).map_err(err)?;

        let id = rho4x5_identity_check();
        ensure(id.passes(), || "cofactor identity does not expand to psi00^4".into())?;
        let mut notes = vec![];
        if !id.printed_holds {
            notes.push(format!(
                "the cofactors as printed miss psi00^4 by {}; the halved psi02/psi20 cofactors hold",
                id.printed_residual
            ));
        }

        let upper = sn_upper_from_decomposition(&weighted(&r.terms), s).map_err(err)?;
        ensure(upper.value <= 3, || format!("upper bound {}", upper.value))?;
        let v = combine_bounds(lower, &upper).map_err(err)?;
        ensure(v.exact == Some(3), || format!("verdict {v:?}"))?;
        Ok(("3 steps, PPT, lower N=4 with k=3, identity expands, upper 3, SN = 3".into(), notes))
    })
}

pub fn criterion_3() -> CriterionResult {
    timed("3", "stage-2 projection, SN <= 2", Some(1.0), || {
        let r = rho_4x5().map_err(err)?;
        let b = sn_bounds_from_projection(r.stage2(), Side::B, &basis_vector(4, 0), separable_by_rules).map_err(err)?;
        let rule = b.separable_by.clone().ok_or("projection not certified separable")?;
        ensure(rule.contains("R2"), || format!("certified by {rule}, not R2"))?;
        let SeparabilityVerdict::Separable { blocks, .. } = separability_rules(&b.projected) else {
            return Err("rules do not certify the projection".into());
        };
        let big: Vec<_> = blocks.iter().filter(|bl| bl.rows_a.len() > 1 && bl.rows_b.len() > 1).collect();
        ensure(big.len() == 1, || format!("{} blocks of size > 1", big.len()))?;
        let dims = (big[0].rows_a.len(), big[0].rows_b.len());
        ensure(dims == (2, 3) || dims == (3, 2), || format!("block {dims:?}"))?;
        let block_state = b.projected.project_local_block(&big[0].rows_a, &big[0].rows_b).map_err(err)?;
        ensure(block_state.is_ppt(), || "the 2x3 block is not PPT".into())?;
        ensure(b.sn_upper == Some(2), || format!("bound {:?}", b.sn_upper))?;
        Ok((format!("one {}x{} PPT block plus products; {}", dims.0, dims.1, b.relation()), vec![]))
    })
}

fn family_case(k: usize) -> Result<String, String> {
    let spec = FamilySpec::new(k);
    let s = rho_family(&spec).map_err(err)?;
    ensure(exactly_ppt(&s)?, || format!("k={k}: not PPT"))?;

    let pt = BipartiteState::from_operator(s.partial_transpose(Side::A), "pt").map_err(err)?;
    let pt_terms = family_pt_terms(&spec).map_err(err)?;
    ensure(terms_matrix(&pt_terms, pt.dim()) == pt.matrix, || format!("k={k}: PT decomposition mismatch"))?;
    let pt_up = sn_upper_from_decomposition(&weighted(&pt_terms), &pt).map_err(err)?;
    ensure(pt_up.value <= 2, || format!("k={k}: PT terms of Schmidt rank {}", pt_up.value))?;

    ensure(d_minimality_check(&spec).map_err(err)?.holds(), || format!("k={k}: d-minimality fails"))?;

    let terms = family_terms(&spec).map_err(err)?;
    let m = SymbolicRangeMatrix::from_terms(&s, &terms, true).map_err(err)?;
    let exclude = (1..=2 * k - 2).map(|i| format!("delta_{i}")).collect();
    let opts = LowerOptions { exclude_vars: exclude, ..LowerOptions::default() };
    let out = certify_sn_lower(&s, &m, term(&terms, "alpha")?, k, &opts).map_err(err)?;
    let lower = out.certificate().ok_or_else(|| format!("k={k}: lower bound inconclusive"))?;
    ensure(power(lower) == Some(k as u32), || format!("k={k}: power {:?}", power(lower)))?;
    verify_certificate(lower).map_err(err)?;
    let upper = sn_upper_from_decomposition(&weighted(&terms), &s).map_err(err)?;
    let v = combine_bounds(lower, &upper).map_err(err)?;
    ensure(v.exact == Some(k), || format!("k={k}: verdict {v:?}"))?;
    Ok(format!("k={k}: SN = {k}, N = {k}, PT SR <= 2"))
}

/// Runs `k = 2..=min(max_k, 4)` against their budgets; `k = 5` is a separate opt-in result.
pub fn criterion_4(max_k: usize) -> Vec<CriterionResult> {
    let mut per_k = Vec::new();
    let main = timed("4", "scaling family", None, || {
        let mut parts = vec![];
        for k in 2..=max_k.min(4) {
            let budget = if k == 4 { 600.0 } else { 10.0 };
            let t = Instant::now();
            let d = family_case(k)?;
            let secs = t.elapsed().as_secs_f64();
            per_k.push((k, secs));
            ensure(secs < budget, || format!("k={k} took {secs:.1} s, budget {budget} s"))?;
            parts.push(format!("{d} ({secs:.2} s)"));
        }
        Ok((parts.join("; "), vec![]))
    });
    let mut out = vec![main];
    if max_k >= 5 {
        let mut r = timed("4+", "scaling family k=5 (opt-in)", Some(600.0), || family_case(5).map(|d| (d, vec![])));
        if !r.passed && r.seconds > 600.0 {
            r.detail = format!("not desk-scale: {}", r.detail);
        }
        r.optional = true;
        out.push(r);
    }
    out
}

pub fn criterion_5() -> CriterionResult {
    timed("5", "Tiles complement unextendible", Some(5.0), || {
        let s = tiles_complement();
        for (a, b) in tiles_upb() {
            let v = kron_vec(&a, &b);
            ensure(vec_is_zero(&s.matrix.mul_vec(&v).map_err(err)?), || "a tile product is not in the kernel".into())?;
        }
        ensure(exactly_ppt(&s)?, || "not PPT".into())?;
        ensure(s.birank() == (4, 4), || format!("birank {:?}", s.birank()))?;
        let sp = ppt_extension_space(&s).map_err(err)?;
        ensure(sp.dimension == 3 && sp.trivial_dimension == 3, || {
            format!("dimension {} (trivial {})", sp.dimension, sp.trivial_dimension)
        })?;
        Ok(("5 kernel products verified, birank (4,4), extension space 3 = SLOCC only".into(), vec![]))
    })
}

pub fn criterion_6() -> CriterionResult {
    timed("6", "extension counts vs bound", Some(5.0), || {
        let r = rho_4x5().map_err(err)?;
        let mut corpus = vec![rho_3x3(), tiles_complement(), maximally_mixed(2, 2), maximally_mixed(2, 3)];
        corpus.extend(r.stages.iter().cloned());
        corpus.push(rho_family(&FamilySpec::new(2)).map_err(err)?);
        corpus.push(rho_family(&FamilySpec::new(3)).map_err(err)?);
        let mut dims = vec![];
        for s in &corpus {
            let sp = ppt_extension_space(s).map_err(err)?;
            let m = s.dim_a as i64;
            ensure(sp.dimension as i64 >= m, || format!("{}: {} < m", s.label, sp.dimension))?;
            if sp.bound > 0 {
                ensure(sp.dimension as i64 >= sp.bound + m, || format!("{}: {} < bound + m", s.label, sp.dimension))?;
            }
            dims.push(format!("{} {}", s.label, sp.dimension));
        }
        let sp = ppt_extension_space(&rho_3x3()).map_err(err)?;
        ensure(sp.bound == 3, || format!("3x3 bound {}", sp.bound))?;
        ensure(sp.nontrivial_dimension() > 0, || "no nontrivial couplings for the 3x3 state".into())?;

        let cores = [&r.start, &r.stages[0], &r.stages[1]];
        for (i, (step, core)) in r.pipeline.steps.iter().zip(cores).enumerate() {
            let b = step.blocks(core).map_err(err)?.ok_or("step without blocks")?;
            let a = if b.side == Side::B { b.swapped() } else { b };
            ensure(is_admissible_coupling(&a.core, &a.coupling).map_err(err)?, || format!("step {i} coupling not admissible"))?;
            if matches!(step, ExtensionStep::ProductPair { .. }) {
                ensure(!locext_core::extender::is_trivial_coupling(&a.core, &a.coupling), || format!("step {i} is SLOCC"))?;
            }
        }
        Ok((format!("{}; pipeline couplings solve the constraints", dims.join(", ")), vec![]))
    })
}

fn small_gaussian(rng: &mut ChaCha8Rng) -> GaussianRational {
    GaussianRational::from_parts((rng.random_range(-2..=2), 1), (rng.random_range(-1..=1), 1))
}

fn random_ket(rng: &mut ChaCha8Rng, d: usize) -> ExactVector {
    (0..d).map(|_| small_gaussian(rng)).collect()
}

pub fn criterion_7(seed: u64) -> CriterionResult {
    timed("7", "lifted decompositions", None, || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut failures = vec![];
        for case in 0..50 {
            let (m, n) = (rng.random_range(2..=3), rng.random_range(2..=3));
            let kets: Vec<(BigRational, ExactVector)> =
                (0..rng.random_range(1..=5)).map(|_| (ratio(rng.random_range(1..=3), 1), random_ket(&mut rng, m * n))).collect();
            let s = BipartiteState::from_weighted_vectors(m, n, &kets, "random").map_err(err)?;
            let side = if rng.random_bool(0.5) { Side::A } else { Side::B };
            let perp = rng.random_range(0..s.local_dim(side));
            // the generating kets restricted to the core decompose the core block
            let layout = BlockLayout::new(m, n, side, perp).map_err(err)?;
            let core_terms: Vec<_> =
                kets.iter().map(|(w, v)| (w.clone(), layout.core_idx.iter().map(|&i| v[i].clone()).collect())).collect();
            let lift = lift_weighted(&s, side, perp, &core_terms).map_err(err)?;
            if lift.reconstruct().map_err(err)? != s.matrix || lift.max_increment() > 1 {
                failures.push(case);
            }
        }
        ensure(failures.is_empty(), || format!("failed cases {failures:?}"))?;
        Ok(("50/50 reconstruct exactly with SR increments <= 1".into(), vec![]))
    })
}

pub fn criterion_8(seed: u64, samples: usize) -> CriterionResult {
    timed("8", "3x3 birank (4,4) survey", Some(120.0), || {
        let opts = SurveyOptions { samples, seed, ..SurveyOptions::default() };
        let rep = unextendibility_survey(SurveyCase { dims: (3, 3), birank: (4, 4) }, &opts).map_err(err)?;
        let need = (samples * 9).div_ceil(10);
        ensure(rep.converged >= need, || format!("{}/{samples} converged", rep.converged))?;
        ensure(rep.ambiguous_seeds.is_empty(), || format!("ambiguous ranks for seeds {:?}", rep.ambiguous_seeds))?;
        ensure(rep.histogram.keys().all(|&d| d == 3), || format!("histogram {:?}", rep.histogram))?;

        let eo = ExtensionOptions::default();
        for s in [rho_3x3(), rho_family(&FamilySpec::new(2)).map_err(err)?] {
            let exact = ppt_extension_space(&s).map_err(err)?.dimension;
            let num = numeric_extension_dimension(&FloatState::from_exact(&s).map_err(err)?, &eo).map_err(err)?;
            ensure(num.dimension == exact, || format!("{}: numeric {} vs exact {exact}", s.label, num.dimension))?;
        }
        Ok((
            format!(
                "{}/{samples} converged (max residual {:.1e}), all of extension dimension 3; numeric = exact on 3x3 and family k=2",
                rep.converged,
                rep.max_residual.unwrap_or(0.0)
            ),
            vec![],
        ))
    })
}

fn random_hermitian(rng: &mut ChaCha8Rng, d: usize) -> ExactMatrix {
    let upper: Vec<GaussianRational> = (0..d * d)
        .map(|k| if k / d == k % d { GaussianRational::from_int(rng.random_range(-4..=4)) } else { small_gaussian(rng) })
        .collect();
    ExactMatrix::from_fn(d, d, |i, j| if i <= j { upper[i * d + j].clone() } else { upper[j * d + i].conj() })
}

pub fn criterion_9(seed: u64) -> CriterionResult {
    timed("9", "witness peel", None, || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(9));
        let mut failures = vec![];
        for case in 0..50 {
            let (m, n) = (rng.random_range(2..=3), rng.random_range(2..=3));
            let side = if rng.random_bool(0.5) { Side::A } else { Side::B };
            let perp = rng.random_range(0..if side == Side::A { m } else { n });
            let layout = BlockLayout::new(m, n, side, perp).map_err(err)?;
            let (cd, ed) = (layout.core_idx.len(), layout.edge_dim());
            // PSD edge block, possibly singular, and a coupling inside its range
            let mut edge = ExactMatrix::zeros(ed, ed);
            for _ in 0..rng.random_range(1..=ed) {
                let v = random_ket(&mut rng, ed);
                edge = edge.add(&ExactMatrix::outer(&v, &v)).map_err(err)?;
            }
            let y = ExactMatrix::from_fn(cd, ed, |_, _| small_gaussian(&mut rng));
            let chi = y.mul(&edge).map_err(err)?;
            let w = layout.assemble(&random_hermitian(&mut rng, cd), &chi, &edge).map_err(err)?;
            let op = BipartiteOperator::new(m, n, w.clone()).map_err(err)?;
            let p = witness_schur_peel(&op, side, perp).map_err(err)?;
            if p.reassemble().map_err(err)? != w || !psd_check(&p.psd_part).map_err(err)?.is_psd() {
                failures.push(case);
            }
        }
        ensure(failures.is_empty(), || format!("failed cases {failures:?}"))?;
        Ok(("50/50 splits reassemble exactly with a PSD flat part".into(), vec![]))
    })
}

pub fn run_all(cfg: &AcceptanceConfig) -> Manifest {
    let mut results = vec![criterion_1(), criterion_2(), criterion_3()];
    results.extend(criterion_4(cfg.family_max_k));
    results.extend([
        criterion_5(),
        criterion_6(),
        criterion_7(cfg.seed),
        criterion_8(cfg.seed, cfg.survey_samples),
        criterion_9(cfg.seed),
    ]);
    let all_passed = results.iter().filter(|r| !r.optional).all(|r| r.passed);
    Manifest { config: cfg.clone(), results, all_passed }
}
