use locext_core::exactmat::{kron_vec, range, ExactVector};
use locext_core::qstates::{BipartiteState, Side};
use num_traits::Zero;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidateResult {
    pub a: ExactVector,
    pub b: ExactVector,
    pub in_range: bool,
    /// `|a b*⟩ ∈ R(ρ^{T_B})`; only evaluated for candidates in the range.
    pub conjugate_in_pt_range: Option<bool>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeVerdict {
    /// No supplied candidate satisfies the range criterion.
    EdgeState,
    /// Some candidate `|ab⟩` has `|ab*⟩` in the range of the partial transpose.
    NotEdge,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeReport {
    pub verdict: EdgeVerdict,
    pub candidates: Vec<CandidateResult>,
    /// The verdict only covers the listed candidates.
    pub scope: String,
}

/// Range-criterion check over a finite list of product vectors `|a⟩⊗|b⟩`.
pub fn edge_state_check(s: &BipartiteState, candidates: &[(ExactVector, ExactVector)]) -> EdgeReport {
    let r = range(&s.matrix);
    let rt = range(&s.partial_transpose(Side::B).matrix);
    let mut out = Vec::with_capacity(candidates.len());
    for (a, b) in candidates {
        let v = kron_vec(a, b);
        let in_range = v.len() == s.dim() && r.contains(&v);
        let conj = in_range.then(|| {
            let bc: ExactVector = b.iter().map(|z| z.conj()).collect();
            rt.contains(&kron_vec(a, &bc))
        });
        out.push(CandidateResult { a: a.clone(), b: b.clone(), in_range, conjugate_in_pt_range: conj });
    }
    let verdict =
        if out.iter().any(|c| c.conjugate_in_pt_range == Some(true)) { EdgeVerdict::NotEdge } else { EdgeVerdict::EdgeState };
    EdgeReport { verdict, candidates: out, scope: format!("{} supplied candidates", candidates.len()) }
}

/// Computational-basis product vectors `|ij⟩` lying in the range.
pub fn grid_product_candidates(s: &BipartiteState) -> Vec<(ExactVector, ExactVector)> {
    let r = range(&s.matrix);
    let (m, n) = (s.dim_a, s.dim_b);
    let e = locext_core::exactmat::basis_vector;
    let mut out = Vec::new();
    for i in 0..m {
        for j in 0..n {
            if s.matrix.get(i * n + j, i * n + j).is_zero() {
                continue;
            }
            if r.contains(&e(m * n, i * n + j)) {
                out.push((e(m, i), e(n, j)));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use locext_core::exactmat::{basis_vector as e, ratio};
    use locext_core::qstates::{ket, rho_3x3};

    #[test]
    fn rho3x3_is_edge_for_its_products() {
        let c = vec![(e(3, 0), e(3, 2)), (e(3, 2), e(3, 0))];
        let rep = edge_state_check(&rho_3x3(), &c);
        assert_eq!(rep.verdict, EdgeVerdict::EdgeState);
        assert!(rep.candidates.iter().all(|c| c.in_range && c.conjugate_in_pt_range == Some(false)));
        assert_eq!(grid_product_candidates(&rho_3x3()), c);
    }

    #[test]
    fn product_state_not_edge() {
        let s = BipartiteState::from_weighted_vectors(2, 2, &[(ratio(1, 1), ket(2, 2, &[(0, 0, 1)]))], "p").unwrap();
        assert_eq!(edge_state_check(&s, &[(e(2, 0), e(2, 0))]).verdict, EdgeVerdict::NotEdge);
    }
}
