use serde::{Deserialize, Serialize};

use super::blocks::{generalized_schur, BlockLayout, SchurSide};
use crate::error::Error;
use crate::exactmat::{solve_on_range_many, ExactMatrix};
use crate::qstates::{BipartiteOperator, Side};

/// `W = (W_c − χW_e⁻¹χ†) ⊕ 0 + [[χW_e⁻¹χ†, χ], [χ†, W_e]]`
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessPeel {
    /// `W_{c\e}` on the core space.
    pub peeled: ExactMatrix,
    /// `W_{c\e}` embedded in the full space.
    pub peeled_embedded: ExactMatrix,
    /// The flat PSD part on the full space.
    pub psd_part: ExactMatrix,
}

impl WitnessPeel {
    pub fn reassemble(&self) -> Result<ExactMatrix, Error> {
        self.peeled_embedded.add(&self.psd_part)
    }
}

/// Splits a Hermitian witness into a peeled core witness and a flat PSD part.
pub fn witness_schur_peel(w: &BipartiteOperator, side: Side, perp_index: usize) -> Result<WitnessPeel, Error> {
    if !w.matrix.is_hermitian() {
        return Err(Error::NotHermitian);
    }
    let layout = BlockLayout::new(w.dim_a, w.dim_b, side, perp_index)?;
    let (wc, chi, we) = layout.split(&w.matrix);
    let peeled = generalized_schur(&wc, &chi, &we, SchurSide::CoreMinusEdge)?;
    let sol = solve_on_range_many(&we, &chi.adjoint().column_vectors())?;
    let flat = chi.mul(&ExactMatrix::from_columns(we.rows(), &sol))?.with_hermitian_check()?;
    let psd_part = layout.assemble(&flat, &chi, &we)?.with_hermitian_check()?;
    let zc = ExactMatrix::zeros(layout.core_idx.len(), layout.edge_dim());
    let ze = ExactMatrix::zeros(layout.edge_dim(), layout.edge_dim());
    let peeled_embedded = layout.assemble(&peeled, &zc, &ze)?.with_hermitian_check()?;
    Ok(WitnessPeel { peeled, peeled_embedded, psd_part })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmat::{psd_check, GaussianRational};

    #[test]
    fn block_diagonal_witness() {
        let m = ExactMatrix::from_i64(&[&[1, 0, 0, 0], &[0, -1, 0, 0], &[0, 0, 2, 1], &[0, 0, 1, 3]]);
        let w = BipartiteOperator::new(2, 2, m.clone()).unwrap();
        let p = witness_schur_peel(&w, Side::A, 1).unwrap();
        assert_eq!(p.peeled, ExactMatrix::from_i64(&[&[1, 0], &[0, -1]]));
        assert_eq!(p.psd_part, ExactMatrix::zeros(2, 2).direct_sum(&ExactMatrix::from_i64(&[&[2, 1], &[1, 3]])));
        assert_eq!(p.reassemble().unwrap(), m);
    }

    #[test]
    fn swap_like_witness() {
        // SWAP + 𝟙 on 2⊗2 has invertible edge block
        let m = ExactMatrix::from_i64(&[&[2, 0, 0, 0], &[0, 1, 1, 0], &[0, 1, 1, 0], &[0, 0, 0, 2]]);
        let swap_minus = ExactMatrix::from_i64(&[&[0, 0, 0, 0], &[0, 0, -2, 0], &[0, -2, 0, 0], &[0, 0, 0, 0]]);
        let m = m.add(&swap_minus).unwrap();
        let w = BipartiteOperator::new(2, 2, m.clone()).unwrap();
        let p = witness_schur_peel(&w, Side::A, 1).unwrap();
        assert_eq!(p.reassemble().unwrap(), m);
        assert!(psd_check(&p.psd_part).unwrap().is_psd());
        assert_eq!(p.peeled.get(1, 1), &GaussianRational::from_int(0));
    }

    #[test]
    fn range_obstruction() {
        let m = ExactMatrix::from_i64(&[&[1, 1], &[1, 0]]);
        let w = BipartiteOperator::new(2, 1, m).unwrap();
        assert!(matches!(witness_schur_peel(&w, Side::A, 1), Err(Error::RangeViolation(_))));
    }
}
