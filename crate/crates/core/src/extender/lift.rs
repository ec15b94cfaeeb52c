use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::blocks::{generalized_schur, BlockLayout, SchurSide};
use crate::error::Error;
use crate::exactmat::{inner, psd_check, solve_on_range_many, ExactMatrix, ExactVector, GaussianRational};
use crate::qstates::{schmidt_rank, BipartiteState, Side};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LiftedTerm {
    #[serde(with = "crate::exactmat::rational_string")]
    pub weight: BigRational,
    pub vector: ExactVector,
    pub core_schmidt_rank: usize,
    pub schmidt_rank: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lift {
    pub lifted: Vec<LiftedTerm>,
    /// `ρ_{e\c}` placed on the `|⊥⟩` block of the full space.
    pub remainder: ExactMatrix,
    /// Rank-one terms of the remainder, all product vectors `|⊥⟩ ⊗ |u⟩`.
    #[serde(with = "crate::exactmat::weighted_vectors")]
    pub remainder_terms: Vec<(BigRational, ExactVector)>,
}

impl Lift {
    /// `Σ w |ψ̃⟩⟨ψ̃| + ρ_{e\c} ⊗ |⊥⟩⟨⊥|`
    pub fn reconstruct(&self) -> Result<ExactMatrix, Error> {
        let mut acc = self.remainder.clone();
        for t in &self.lifted {
            acc = acc.add(&ExactMatrix::outer(&t.vector, &t.vector).scale_rational(&t.weight))?;
        }
        Ok(acc)
    }

    pub fn max_increment(&self) -> isize {
        self.lifted.iter().map(|t| t.schmidt_rank as isize - t.core_schmidt_rank as isize).max().unwrap_or(0)
    }

    /// Every weighted term of the full decomposition.
    pub fn all_terms(&self) -> Vec<(BigRational, ExactVector)> {
        self.lifted
            .iter()
            .map(|t| (t.weight.clone(), t.vector.clone()))
            .chain(self.remainder_terms.iter().cloned())
            .collect()
    }
}

/// Lifts a conic decomposition `Σ w_i |ψ_i⟩⟨ψ_i| = ρ_c` of the core through
/// `|ψ̃⟩ = (|ψ⟩; χ†ρ_c⁻¹|ψ⟩)`.
pub fn lift_weighted(
    ext: &BipartiteState,
    side: Side,
    perp_index: usize,
    core_terms: &[(BigRational, ExactVector)],
) -> Result<Lift, Error> {
    let layout = BlockLayout::new(ext.dim_a, ext.dim_b, side, perp_index)?;
    let (core, chi, edge) = layout.split(&ext.matrix);
    let (cm, cn) = layout.core_dims();
    let cd = cm * cn;

    let mut sum = ExactMatrix::zeros(cd, cd);
    for (w, v) in core_terms {
        if v.len() != cd {
            return Err(Error::DimensionMismatch(format!("core vector of length {} for a {cd}-dimensional core", v.len())));
        }
        sum = sum.add(&ExactMatrix::outer(v, v).scale_rational(w))?;
    }
    if sum != core {
        return Err(Error::DecompositionMismatch("core vectors do not sum to the core block".into()));
    }

    let vecs: Vec<ExactVector> = core_terms.iter().map(|(_, v)| v.clone()).collect();
    let pinv = solve_on_range_many(&core, &vecs)?;
    let chi_h = chi.adjoint();
    let mut lifted = Vec::with_capacity(vecs.len());
    for ((w, v), y) in core_terms.iter().zip(&pinv) {
        let tail = chi_h.mul_vec(y)?;
        let full = layout.embed_vector(v, &tail);
        lifted.push(LiftedTerm {
            weight: w.clone(),
            core_schmidt_rank: schmidt_rank(v, cm, cn),
            schmidt_rank: schmidt_rank(&full, ext.dim_a, ext.dim_b),
            vector: full,
        });
    }

    let sc = generalized_schur(&core, &chi, &edge, SchurSide::EdgeMinusCore)?;
    let zero_core = ExactMatrix::zeros(cd, cd);
    let zero_chi = ExactMatrix::zeros(cd, layout.edge_dim());
    let remainder = layout.assemble(&zero_core, &zero_chi, &sc)?.with_hermitian_check()?;
    let remainder_terms = match psd_check(&sc)? {
        crate::exactmat::PsdVerdict::Psd(f) => f
            .rank_one_terms()
            .into_iter()
            .map(|(d, u)| (d, layout.embed_vector(&vec![GaussianRational::zero(); cd], &u)))
            .collect(),
        crate::exactmat::PsdVerdict::NotPsd { .. } => return Err(Error::NotPsd),
    };
    Ok(Lift { lifted, remainder, remainder_terms })
}

/// Unit-weight form of [`lift_weighted`].
pub fn lift_decomposition(
    ext: &BipartiteState,
    side: Side,
    perp_index: usize,
    core_vectors: &[ExactVector],
) -> Result<Lift, Error> {
    let terms: Vec<_> = core_vectors.iter().map(|v| (BigRational::one(), v.clone())).collect();
    lift_weighted(ext, side, perp_index, &terms)
}

/// Outcome of projecting away one local direction.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProjectionBound {
    pub side: Side,
    pub removed: ExactVector,
    pub projected: BipartiteState,
    /// Trusted rule that certified the projection separable, if any.
    pub separable_by: Option<String>,
    /// `SN(s) ≤ 2` when the projection is separable.
    pub sn_upper: Option<usize>,
}

impl ProjectionBound {
    pub fn relation(&self) -> String {
        match self.sn_upper {
            Some(k) => format!("SN(state) <= SN(projected) + 1 = {k}"),
            None => "SN(state) <= SN(projected) + 1".into(),
        }
    }
}

/// Applies `A = 𝟙 − |φ⟩⟨φ|/⟨φ|φ⟩` on one side and asks `separable` about the result.
pub fn sn_bounds_from_projection(
    s: &BipartiteState,
    side: Side,
    removed: &[GaussianRational],
    separable: impl Fn(&BipartiteState) -> Option<String>,
) -> Result<ProjectionBound, Error> {
    let d = s.local_dim(side);
    if removed.len() != d {
        return Err(Error::DimensionMismatch(format!("vector of length {} on a {d}-dimensional factor", removed.len())));
    }
    let nn = inner(removed, removed);
    let inv = nn.inv().ok_or_else(|| Error::InvalidInput("removed vector is zero".into()))?;
    let proj = ExactMatrix::identity(d).sub(&ExactMatrix::outer(removed, removed).scale(&inv))?;
    let op = s.apply_local(side, &proj)?;
    let projected = BipartiteState::from_operator(op, format!("{}|proj", s.label))?;
    let separable_by = separable(&projected);
    let sn_upper = separable_by.as_ref().map(|_| 2);
    Ok(ProjectionBound { side, removed: removed.to_vec(), projected, separable_by, sn_upper })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmat::{basis_vector, ratio};
    use crate::extender::blocks::split_blocks;
    use crate::qstates::{ket, rho_3x3};

    fn rho3_terms() -> Vec<(BigRational, ExactVector)> {
        crate::qstates::rho_3x3_terms().into_iter().map(|t| (t.weight, t.vector)).collect()
    }

    #[test]
    fn zero_coupling_keeps_vectors() {
        let c = rho_3x3();
        let full = BipartiteState::new(4, 3, c.matrix.direct_sum(&ExactMatrix::identity(3)), "").unwrap();
        let lift = lift_weighted(&full, Side::A, 3, &rho3_terms()).unwrap();
        assert_eq!(lift.reconstruct().unwrap(), full.matrix);
        assert_eq!(lift.max_increment(), 0);
        let l = BlockLayout::new(4, 3, Side::A, 3).unwrap();
        for (t, (_, v)) in lift.lifted.iter().zip(rho3_terms()) {
            assert_eq!(l.core_part(&t.vector), v);
            assert!(l.edge_part(&t.vector).iter().all(Zero::is_zero));
        }
        assert_eq!(lift.remainder, ExactMatrix::zeros(9, 9).direct_sum(&ExactMatrix::identity(3)));
    }

    #[test]
    fn pure_core() {
        let psi = ket(2, 2, &[(0, 0, 1), (1, 1, 1)]);
        let core = BipartiteState::from_weighted_vectors(2, 2, &[(ratio(1, 1), psi.clone())], "").unwrap();
        let chi = ExactMatrix::column_vector(&psi).mul(&ExactMatrix::from_i64(&[&[1, 2]])).unwrap();
        let b = crate::extender::flat_extension(&core, Side::A, &chi).unwrap();
        let full = crate::extender::assemble_extension(&b, "").unwrap();
        let lift = lift_decomposition(&full, Side::A, 2, &[psi]).unwrap();
        assert_eq!(lift.lifted.len(), 1);
        assert!(lift.lifted[0].schmidt_rank <= 3);
        assert_eq!(lift.reconstruct().unwrap(), full.matrix);
    }

    #[test]
    fn mismatched_core_rejected() {
        let c = rho_3x3();
        let full = BipartiteState::new(4, 3, c.matrix.direct_sum(&ExactMatrix::identity(3)), "").unwrap();
        let mut t = rho3_terms();
        t.pop();
        assert!(matches!(lift_weighted(&full, Side::A, 3, &t), Err(Error::DecompositionMismatch(_))));
    }

    #[test]
    fn projection_of_separable_state() {
        let d = ExactMatrix::diagonal(&[1, 2, 3, 4].map(GaussianRational::from_int));
        let s = BipartiteState::new(2, 2, d, "").unwrap();
        let r = sn_bounds_from_projection(&s, Side::B, &basis_vector(2, 0), |_| Some("diag".into())).unwrap();
        assert_eq!(r.sn_upper, Some(2));
        assert_eq!(r.projected.matrix, ExactMatrix::diagonal(&[0, 2, 0, 4].map(GaussianRational::from_int)));
        let b = split_blocks(&s, Side::B, 0).unwrap();
        assert!(b.coupling.is_zero());
    }
}
