use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use super::blocks::{generalized_schur, ExtensionBlocks, SchurSide};
use super::space::choi_vector;
use crate::error::Error;
use crate::exactmat::{psd_check, range, subspace_intersection, ExactMatrix, ExactVector, GaussianRational, PsdVerdict, Subspace};
use crate::qstates::Side;
use num_traits::Zero;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum PsdExtremality {
    /// `ρ_{e\c} = 0`.
    Flat,
    /// A rank-one projector living entirely on the edge block.
    PureEdge,
    /// Flat part plus rank-one product terms `|⊥⟩⊗|u⟩` from `R(ρ_{e\c})`.
    NotExtremal {
        flat_part: ExactMatrix,
        #[serde(with = "crate::exactmat::weighted_vectors")]
        remainders: Vec<(BigRational, ExactVector)>,
    },
}

impl PsdExtremality {
    pub fn is_extremal(&self) -> bool {
        !matches!(self, PsdExtremality::NotExtremal { .. })
    }
}

/// Extremality in the cone of PSD extensions of a fixed core.
pub fn extremality_check_psd(b: &ExtensionBlocks) -> Result<PsdExtremality, Error> {
    let layout = b.layout();
    let sc = generalized_schur(&b.core.matrix, &b.coupling, &b.edge, SchurSide::EdgeMinusCore)?;
    if sc.is_zero() {
        return Ok(PsdExtremality::Flat);
    }
    let factor = match psd_check(&sc)? {
        PsdVerdict::Psd(f) => f,
        PsdVerdict::NotPsd { .. } => return Err(Error::NotPsd),
    };
    if b.core.matrix.is_zero() && b.coupling.is_zero() && factor.rank() == 1 {
        return Ok(PsdExtremality::PureEdge);
    }
    let flat_edge = b.edge.sub(&sc)?;
    let flat_part = layout.assemble(&b.core.matrix, &b.coupling, &flat_edge)?;
    let cd = layout.core_idx.len();
    let remainders = factor
        .rank_one_terms()
        .into_iter()
        .map(|(d, u)| (d, layout.embed_vector(&vec![GaussianRational::zero(); cd], &u)))
        .collect();
    Ok(PsdExtremality::NotExtremal { flat_part, remainders })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PptVerdict {
    Extremal,
    /// The sufficient condition fails; nothing is claimed either way.
    NotCertified,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PptExtremality {
    pub verdict: PptVerdict,
    /// Dimension of the homogenized tripartite intersection.
    pub intersection_dim: usize,
    /// `dim R(ρ_{e\c}) ∩ R((ρ^{T_A})_{e\c})`
    pub range_intersection_dim: usize,
}

/// Sufficient test for extremality in the cone of PPT extensions.
///
/// Both coupling spaces are enlarged by `|χ̃⟩` itself, so that rescaling the
/// whole extension counts as the single trivial direction.
pub fn extremality_check_ppt(b: &ExtensionBlocks) -> Result<PptExtremality, Error> {
    let b = match b.side {
        Side::A => b.clone(),
        Side::B => b.swapped(),
    };
    let layout = b.layout();
    let (m, n) = (b.core.dim_a, b.core.dim_b);
    let full = b.assemble_operator()?;
    let pt = full.partial_transpose(Side::A);
    let (core_t, chi_t, edge_t) = layout.split(&pt.matrix);

    let sc = generalized_schur(&b.core.matrix, &b.coupling, &b.edge, SchurSide::EdgeMinusCore)?;
    let sc_t = generalized_schur(&core_t, &chi_t, &edge_t, SchurSide::EdgeMinusCore)?;

    let r_c = range(&b.core.matrix);
    let r_ct = range(&core_t).conj();
    let r_e = range(&sc).conj();
    let r_et = range(&sc_t);

    let d = m * n * n;
    let at = |i: usize, j: usize, l: usize| (i * n + j) * n + l;
    let mut u: Vec<ExactVector> = Vec::new();
    for x in r_c.basis() {
        for y in r_e.basis() {
            let mut v = vec![GaussianRational::zero(); d];
            for i in 0..m {
                for j in 0..n {
                    for l in 0..n {
                        v[at(i, j, l)] = &x[i * n + j] * &y[l];
                    }
                }
            }
            u.push(v);
        }
    }
    let mut w: Vec<ExactVector> = Vec::new();
    for x in r_ct.basis() {
        for y in r_et.basis() {
            let mut v = vec![GaussianRational::zero(); d];
            for i in 0..m {
                for j in 0..n {
                    for l in 0..n {
                        v[at(i, j, l)] = &x[i * n + l] * &y[j];
                    }
                }
            }
            w.push(v);
        }
    }
    let chi = choi_vector(&b.coupling, m, n);
    u.push(chi.clone());
    w.push(chi);
    let inter = subspace_intersection(&Subspace::span(d, &u)?, &Subspace::span(d, &w)?)?;
    let range_inter = subspace_intersection(&range(&sc), &range(&sc_t))?;
    let verdict = if inter.dim() == 1 && range_inter.dim() == 0 { PptVerdict::Extremal } else { PptVerdict::NotCertified };
    Ok(PptExtremality { verdict, intersection_dim: inter.dim(), range_intersection_dim: range_inter.dim() })
}
