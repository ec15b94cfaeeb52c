use std::collections::HashSet;

use locext_core::exactmat::{range, rational_string, BigRational, ExactMatrix, ExactVector};
use locext_core::qstates::{schmidt_rank, BipartiteState};
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::AlgError;
use crate::groebner::{buchberger_with, groebner_defect, normal_form, GbOptions};
use crate::poly::Polynomial;
use crate::symbolic::{minor_ideal, SymbolicRangeMatrix};

pub const MONOMIAL_ORDER: &str = "grevlex";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundKind {
    Lower,
    Upper,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NullstellensatzEvidence {
    pub state: BipartiteState,
    pub variables: Vec<String>,
    pub range_basis: Vec<ExactVector>,
    pub order: String,
    pub witness: ExactVector,
    pub witness_variable: String,
    pub minor_size: usize,
    pub excluded_variables: Vec<String>,
    pub generators: Vec<Polynomial>,
    pub groebner_basis: Vec<Polynomial>,
    /// Degree up to which `groebner_basis` is a Gröbner basis; `None` if complete.
    pub degree_bound: Option<u32>,
    pub target: Polynomial,
    pub power: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecompositionTerm {
    #[serde(with = "rational_string")]
    pub weight: BigRational,
    pub vector: ExactVector,
    pub schmidt_rank: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecompositionEvidence {
    pub state: BipartiteState,
    pub terms: Vec<DecompositionTerm>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Evidence {
    Nullstellensatz(Box<NullstellensatzEvidence>),
    Decomposition(DecompositionEvidence),
}

/// `SN ≥ value` (lower) or `SN ≤ value` (upper), with replayable evidence.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SNCertificate {
    pub kind: BoundKind,
    pub value: usize,
    pub label: String,
    pub evidence: Evidence,
    pub trusted_rules_used: Vec<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LowerOptions {
    /// Largest power tried; defaults to `2k`.
    pub n_max: Option<u32>,
    pub exclude_vars: Vec<String>,
    pub progress: bool,
}


#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum LowerOutcome {
    Certified(Box<SNCertificate>),
    Inconclusive { k: usize, n_max: u32, generators: usize },
}

impl LowerOutcome {
    pub fn certificate(&self) -> Option<&SNCertificate> {
        match self {
            LowerOutcome::Certified(c) => Some(c),
            LowerOutcome::Inconclusive { .. } => None,
        }
    }
}

fn witness_variable(m: &SymbolicRangeMatrix, s: &BipartiteState, witness: &[locext_core::exactmat::GaussianRational]) -> Result<usize, AlgError> {
    if witness.len() != s.dim() {
        return Err(AlgError::InvalidInput(format!("witness of length {} for dimension {}", witness.len(), s.dim())));
    }
    if witness.iter().all(Zero::is_zero) {
        return Err(AlgError::InvalidInput("zero witness".into()));
    }
    if !range(&s.matrix).contains(witness) {
        return Err(AlgError::WitnessNotInRange);
    }
    let overlap = m.overlap(witness);
    let nz: Vec<usize> = (0..overlap.len()).filter(|&l| !overlap[l].is_zero()).collect();
    match nz.as_slice() {
        [w] => Ok(*w),
        _ => Err(AlgError::NonSingleVariableOverlap(
            nz.iter().map(|&l| m.variables[l].clone()).collect::<Vec<_>>().join(", "),
        )),
    }
}

/// Searches the smallest `N ≤ N_max` with `x_w^N` in the ideal of
/// `k × k` minors, where `x_w` is the witness coordinate. Success means
/// every range vector of Schmidt rank `< k` is orthogonal to the witness,
/// so `SN ≥ k`.
pub fn certify_sn_lower(
    s: &BipartiteState,
    m: &SymbolicRangeMatrix,
    witness: &[locext_core::exactmat::GaussianRational],
    k: usize,
    opts: &LowerOptions,
) -> Result<LowerOutcome, AlgError> {
    m.check_spans_range(s)?;
    let w = witness_variable(m, s, witness)?;
    let n_max = opts.n_max.unwrap_or(2 * k as u32);
    let ideal = minor_ideal(m, k, &opts.exclude_vars)?;
    if ideal.generators.is_empty() {
        return Ok(LowerOutcome::Inconclusive { k, n_max, generators: 0 });
    }
    let x = Polynomial::var(m.nvars(), w);
    let gb_opts = GbOptions { degree_bound: Some(n_max), progress: opts.progress };
    let (gb, stopped) = buchberger_with(&ideal.generators, gb_opts, |d, basis| {
        d >= 1 && normal_form(&x.pow(d), basis).is_zero()
    });
    let Some(power) = stopped else {
        return Ok(LowerOutcome::Inconclusive { k, n_max, generators: ideal.generators.len() });
    };
    let evidence = NullstellensatzEvidence {
        state: s.clone(),
        variables: m.variables.clone(),
        range_basis: m.basis.clone(),
        order: MONOMIAL_ORDER.into(),
        witness: witness.to_vec(),
        witness_variable: m.variables[w].clone(),
        minor_size: k,
        excluded_variables: opts.exclude_vars.clone(),
        generators: ideal.generators,
        groebner_basis: gb.polys,
        degree_bound: gb.degree_bound,
        target: x.pow(power),
        power,
    };
    Ok(LowerOutcome::Certified(Box::new(SNCertificate {
        kind: BoundKind::Lower,
        value: k,
        label: s.label.clone(),
        evidence: Evidence::Nullstellensatz(Box::new(evidence)),
        trusted_rules_used: Vec::new(),
    })))
}

/// `SN ≤ max SR(v_i)` from an exact decomposition `Σ w_i |v_i⟩⟨v_i| = target`.
pub fn sn_upper_from_decomposition(
    terms: &[(BigRational, ExactVector)],
    target: &BipartiteState,
) -> Result<SNCertificate, AlgError> {
    let (m, n) = (target.dim_a, target.dim_b);
    let mut sum = ExactMatrix::zeros(m * n, m * n);
    let mut out = Vec::with_capacity(terms.len());
    for (w, v) in terms {
        if v.len() != m * n {
            return Err(AlgError::DecompositionMismatch(format!("vector of length {}", v.len())));
        }
        sum = sum.add(&ExactMatrix::outer(v, v).scale_rational(w))?;
        out.push(DecompositionTerm { weight: w.clone(), vector: v.clone(), schmidt_rank: schmidt_rank(v, m, n) });
    }
    if sum != target.matrix {
        return Err(AlgError::DecompositionMismatch("weighted projectors do not sum to the state".into()));
    }
    let value = out.iter().map(|t| t.schmidt_rank).max().unwrap_or(0);
    Ok(SNCertificate {
        kind: BoundKind::Upper,
        value,
        label: target.label.clone(),
        evidence: Evidence::Decomposition(DecompositionEvidence { state: target.clone(), terms: out }),
        trusted_rules_used: Vec::new(),
    })
}

/// Combined lower and upper bounds.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchmidtNumberVerdict {
    pub lower: usize,
    pub upper: usize,
    pub exact: Option<usize>,
}

pub fn combine_bounds(lower: &SNCertificate, upper: &SNCertificate) -> Result<SchmidtNumberVerdict, AlgError> {
    if lower.kind != BoundKind::Lower || upper.kind != BoundKind::Upper {
        return Err(AlgError::InvalidInput("expected one lower and one upper certificate".into()));
    }
    if lower.value > upper.value {
        return Err(AlgError::Rejected(format!("lower bound {} exceeds upper bound {}", lower.value, upper.value)));
    }
    let exact = (lower.value == upper.value).then_some(lower.value);
    Ok(SchmidtNumberVerdict { lower: lower.value, upper: upper.value, exact })
}

/// What a successful replay checked.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub kind: BoundKind,
    pub value: usize,
    pub checks: Vec<String>,
}

fn reject(msg: impl Into<String>) -> AlgError {
    AlgError::Rejected(msg.into())
}

/// Replays a certificate using reductions and exact sums only.
pub fn verify_certificate(cert: &SNCertificate) -> Result<VerifyReport, AlgError> {
    match &cert.evidence {
        Evidence::Decomposition(ev) => verify_upper(cert, ev),
        Evidence::Nullstellensatz(ev) => verify_lower(cert, ev),
    }
}

fn verify_upper(cert: &SNCertificate, ev: &DecompositionEvidence) -> Result<VerifyReport, AlgError> {
    if cert.kind != BoundKind::Upper {
        return Err(reject("decomposition evidence must back an upper bound"));
    }
    let terms: Vec<_> = ev.terms.iter().map(|t| (t.weight.clone(), t.vector.clone())).collect();
    let fresh = sn_upper_from_decomposition(&terms, &ev.state).map_err(|e| reject(e.to_string()))?;
    let Evidence::Decomposition(fresh_ev) = &fresh.evidence else { unreachable!() };
    for (a, b) in ev.terms.iter().zip(&fresh_ev.terms) {
        if a.schmidt_rank != b.schmidt_rank {
            return Err(reject(format!("recorded Schmidt rank {} but computed {}", a.schmidt_rank, b.schmidt_rank)));
        }
    }
    if fresh.value != cert.value {
        return Err(reject(format!("claimed SN ≤ {} but the largest Schmidt rank is {}", cert.value, fresh.value)));
    }
    Ok(VerifyReport {
        kind: BoundKind::Upper,
        value: cert.value,
        checks: vec!["decomposition sums to the state".into(), "Schmidt ranks recomputed".into()],
    })
}

fn verify_lower(cert: &SNCertificate, ev: &NullstellensatzEvidence) -> Result<VerifyReport, AlgError> {
    if cert.kind != BoundKind::Lower || cert.value != ev.minor_size {
        return Err(reject("Nullstellensatz evidence must back the lower bound SN ≥ minor size"));
    }
    if ev.order != MONOMIAL_ORDER {
        return Err(reject(format!("unsupported monomial order {}", ev.order)));
    }
    let nv = ev.variables.len();
    let all = ev.generators.iter().chain(&ev.groebner_basis).chain(std::iter::once(&ev.target));
    if all.into_iter().any(|p| p.nvars() != nv) {
        return Err(reject("polynomial arity differs from the variable list"));
    }
    let named: Vec<_> = ev.variables.iter().cloned().zip(ev.range_basis.iter().cloned()).collect();
    let m = SymbolicRangeMatrix::from_basis((ev.state.dim_a, ev.state.dim_b), &named, false)
        .map_err(|e| reject(e.to_string()))?;
    m.check_spans_range(&ev.state).map_err(|e| reject(e.to_string()))?;
    let w = witness_variable(&m, &ev.state, &ev.witness).map_err(|e| reject(e.to_string()))?;
    if m.variables[w] != ev.witness_variable {
        return Err(reject("witness overlap picks a different variable"));
    }
    let ideal = minor_ideal(&m, ev.minor_size, &ev.excluded_variables).map_err(|e| reject(e.to_string()))?;
    let fresh: HashSet<Polynomial> = ideal.generators.iter().map(Polynomial::monic).collect();
    let claimed: HashSet<Polynomial> = ev.generators.iter().map(Polynomial::monic).collect();
    if fresh != claimed {
        return Err(reject("generators are not the minors of the range matrix"));
    }
    if ev.degree_bound.is_some() && ev.generators.iter().any(|g| !g.is_homogeneous()) {
        return Err(reject("degree-truncated basis requires homogeneous generators"));
    }
    let in_scope = |p: &Polynomial| ev.degree_bound.is_none_or(|b| p.total_degree().unwrap_or(0) <= b);
    for (i, g) in ev.generators.iter().enumerate().filter(|(_, g)| in_scope(g)) {
        if !normal_form(g, &ev.groebner_basis).is_zero() {
            return Err(reject(format!("reduction mismatch: generator {i} does not reduce to zero")));
        }
    }
    if let Some((i, j)) = groebner_defect(&ev.groebner_basis, ev.degree_bound) {
        return Err(reject(format!("reduction mismatch: S-polynomial of basis elements {i} and {j} is nonzero")));
    }
    if ev.target != Polynomial::var(nv, w).pow(ev.power) {
        return Err(reject("target is not a power of the witness variable"));
    }
    if ev.degree_bound.is_some_and(|b| ev.power > b) {
        return Err(reject("target degree exceeds the basis degree bound"));
    }
    if !normal_form(&ev.target, &ev.groebner_basis).is_zero() {
        return Err(reject("reduction mismatch: target does not reduce to zero"));
    }
    Ok(VerifyReport {
        kind: BoundKind::Lower,
        value: cert.value,
        checks: vec![
            "range basis spans the state range".into(),
            "witness overlap is a single variable".into(),
            format!("{} generators equal the recomputed minors", ev.generators.len()),
            "generators reduce to zero".into(),
            "S-polynomials within the degree bound reduce to zero".into(),
            format!("{}^{} reduces to zero", ev.witness_variable, ev.power),
        ],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbolic::range_coordinate_matrix;
    use locext_core::exactmat::ratio;
    use locext_core::qstates::{ket, rho_3x3, rho_3x3_terms};

    #[test]
    fn separable_diagonal_is_inconclusive() {
        let terms: Vec<_> = (0..2)
            .flat_map(|i| (0..2).map(move |j| (ratio(1, 1), ket(2, 2, &[(i, j, 1)]))))
            .collect();
        let s = BipartiteState::from_weighted_vectors(2, 2, &terms, "diag").unwrap();
        let m = range_coordinate_matrix(&s, true).unwrap();
        let out = certify_sn_lower(&s, &m, &ket(2, 2, &[(0, 0, 1)]), 2, &LowerOptions::default()).unwrap();
        assert!(matches!(out, LowerOutcome::Inconclusive { .. }));
    }

    #[test]
    fn witness_errors() {
        let s = rho_3x3();
        let m = range_coordinate_matrix(&s, true).unwrap();
        let outside = ket(3, 3, &[(1, 1, 1)]);
        assert!(matches!(
            certify_sn_lower(&s, &m, &outside, 2, &LowerOptions::default()),
            Err(AlgError::WitnessNotInRange)
        ));
        let mixed = ket(3, 3, &[(0, 2, 1), (2, 0, 1)]);
        assert!(matches!(
            certify_sn_lower(&s, &m, &mixed, 2, &LowerOptions::default()),
            Err(AlgError::NonSingleVariableOverlap(_))
        ));
    }

    #[test]
    fn rho3x3_sn_two() {
        let s = rho_3x3();
        let m = range_coordinate_matrix(&s, true).unwrap();
        let w = ket(3, 3, &[(0, 0, 1), (1, 1, 1), (2, 2, 1)]);
        let out = certify_sn_lower(&s, &m, &w, 2, &LowerOptions::default()).unwrap();
        let cert = out.certificate().expect("ψ00² lies in the 2-minor ideal");
        let Evidence::Nullstellensatz(ev) = &cert.evidence else { panic!() };
        assert_eq!(ev.power, 2);
        verify_certificate(cert).unwrap();

        let terms: Vec<_> = rho_3x3_terms().into_iter().map(|t| (t.weight, t.vector)).collect();
        let up = sn_upper_from_decomposition(&terms, &s).unwrap();
        assert_eq!(up.value, 3);
        verify_certificate(&up).unwrap();
        assert_eq!(combine_bounds(cert, &up).unwrap().exact, None);
    }

    #[test]
    fn tampered_certificates_fail() {
        let s = rho_3x3();
        let m = range_coordinate_matrix(&s, true).unwrap();
        let w = ket(3, 3, &[(0, 0, 1), (1, 1, 1), (2, 2, 1)]);
        let cert = certify_sn_lower(&s, &m, &w, 2, &LowerOptions::default()).unwrap().certificate().unwrap().clone();
        let mut bad = cert.clone();
        if let Evidence::Nullstellensatz(ev) = &mut bad.evidence {
            let nv = ev.variables.len();
            ev.groebner_basis[0] = ev.groebner_basis[0].add(&Polynomial::var(nv, 4).pow(2));
        }
        assert!(matches!(verify_certificate(&bad), Err(AlgError::Rejected(msg)) if msg.contains("reduction mismatch")));

        let p = ket(3, 3, &[(0, 0, 1)]);
        let prod = BipartiteState::from_weighted_vectors(3, 3, &[(ratio(1, 1), p.clone())], "p").unwrap();
        let mut up = sn_upper_from_decomposition(&[(ratio(1, 1), p)], &prod).unwrap();
        assert_eq!(up.value, 1);
        up.value = 0;
        assert!(verify_certificate(&up).is_err());
        assert!(sn_upper_from_decomposition(&[(ratio(2, 1), ket(3, 3, &[(0, 0, 1)]))], &prod).is_err());
    }
}
