use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::exactmat::{solve_on_range_many, ExactMatrix, ExactVector, GaussianRational};
use crate::qstates::{BipartiteOperator, BipartiteState, Side};
use num_traits::Zero;

/// Index bookkeeping for singling out one local basis direction `|⊥⟩`.
///
/// Core indices enumerate `(i, j)` with the `⊥` index removed, in the natural
/// order of the smaller space; edge indices enumerate `|⊥⟩ ⊗ |k⟩` over the
/// other factor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockLayout {
    pub dim_a: usize,
    pub dim_b: usize,
    pub side: Side,
    pub perp_index: usize,
    pub core_idx: Vec<usize>,
    pub edge_idx: Vec<usize>,
}

impl BlockLayout {
    pub fn new(dim_a: usize, dim_b: usize, side: Side, perp_index: usize) -> Result<Self, Error> {
        let d = match side {
            Side::A => dim_a,
            Side::B => dim_b,
        };
        if perp_index >= d {
            return Err(Error::BoundsViolation(format!("perp index {perp_index} on a {d}-dimensional factor")));
        }
        if d < 2 {
            return Err(Error::BoundsViolation("cannot split a one-dimensional factor".into()));
        }
        let mut core_idx = Vec::new();
        let mut edge_idx = Vec::new();
        for i in 0..dim_a {
            for j in 0..dim_b {
                let on_perp = match side {
                    Side::A => i == perp_index,
                    Side::B => j == perp_index,
                };
                if on_perp {
                    edge_idx.push(i * dim_b + j);
                } else {
                    core_idx.push(i * dim_b + j);
                }
            }
        }
        Ok(Self { dim_a, dim_b, side, perp_index, core_idx, edge_idx })
    }

    /// Local dimensions of the core.
    pub fn core_dims(&self) -> (usize, usize) {
        match self.side {
            Side::A => (self.dim_a - 1, self.dim_b),
            Side::B => (self.dim_a, self.dim_b - 1),
        }
    }

    pub fn edge_dim(&self) -> usize {
        self.edge_idx.len()
    }

    pub fn split(&self, m: &ExactMatrix) -> (ExactMatrix, ExactMatrix, ExactMatrix) {
        (
            m.submatrix(&self.core_idx, &self.core_idx),
            m.submatrix(&self.core_idx, &self.edge_idx),
            m.submatrix(&self.edge_idx, &self.edge_idx),
        )
    }

    pub fn assemble(&self, core: &ExactMatrix, coupling: &ExactMatrix, edge: &ExactMatrix) -> Result<ExactMatrix, Error> {
        let (c, e) = (self.core_idx.len(), self.edge_idx.len());
        if core.rows() != c || core.cols() != c || coupling.rows() != c || coupling.cols() != e || edge.rows() != e || edge.cols() != e {
            return Err(Error::DimensionMismatch(format!(
                "blocks {}x{}, {}x{}, {}x{} for a {c}+{e} split",
                core.rows(),
                core.cols(),
                coupling.rows(),
                coupling.cols(),
                edge.rows(),
                edge.cols()
            )));
        }
        let d = self.dim_a * self.dim_b;
        let mut pos = vec![(false, 0usize); d];
        for (k, &i) in self.core_idx.iter().enumerate() {
            pos[i] = (true, k);
        }
        for (k, &i) in self.edge_idx.iter().enumerate() {
            pos[i] = (false, k);
        }
        Ok(ExactMatrix::from_fn(d, d, |r, s| match (pos[r], pos[s]) {
            ((true, a), (true, b)) => core.get(a, b).clone(),
            ((true, a), (false, b)) => coupling.get(a, b).clone(),
            ((false, a), (true, b)) => coupling.get(b, a).conj(),
            ((false, a), (false, b)) => edge.get(a, b).clone(),
        }))
    }

    /// Places a core vector and an edge vector into the full space.
    pub fn embed_vector(&self, core: &[GaussianRational], edge: &[GaussianRational]) -> ExactVector {
        let mut v = vec![GaussianRational::zero(); self.dim_a * self.dim_b];
        for (k, &i) in self.core_idx.iter().enumerate() {
            v[i] = core[k].clone();
        }
        for (k, &i) in self.edge_idx.iter().enumerate() {
            v[i] = edge[k].clone();
        }
        v
    }

    pub fn core_part(&self, v: &[GaussianRational]) -> ExactVector {
        self.core_idx.iter().map(|&i| v[i].clone()).collect()
    }

    pub fn edge_part(&self, v: &[GaussianRational]) -> ExactVector {
        self.edge_idx.iter().map(|&i| v[i].clone()).collect()
    }
}

/// `ρ = [[ρ_c, χ], [χ†, ρ_e]]` relative to a layout.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtensionBlocks {
    pub core: BipartiteState,
    /// Maps the edge space `|⊥⟩ ⊗ ℂ^k` into the core space.
    pub coupling: ExactMatrix,
    pub edge: ExactMatrix,
    pub side: Side,
    pub perp_index: usize,
}

impl ExtensionBlocks {
    pub fn layout(&self) -> BlockLayout {
        let (m, n) = (self.core.dim_a, self.core.dim_b);
        let (a, b) = match self.side {
            Side::A => (m + 1, n),
            Side::B => (m, n + 1),
        };
        BlockLayout::new(a, b, self.side, self.perp_index).expect("perp index recorded at split time")
    }

    pub fn full_dims(&self) -> (usize, usize) {
        let l = self.layout();
        (l.dim_a, l.dim_b)
    }

    pub fn assemble_matrix(&self) -> Result<ExactMatrix, Error> {
        self.layout().assemble(&self.core.matrix, &self.coupling, &self.edge)
    }

    /// The assembled operator without a positivity check.
    pub fn assemble_operator(&self) -> Result<BipartiteOperator, Error> {
        let l = self.layout();
        let mut m = self.assemble_matrix()?;
        if self.edge.is_hermitian() {
            m = m.with_hermitian_check()?;
        }
        BipartiteOperator::new(l.dim_a, l.dim_b, m)
    }

    /// Relabels `A ↔ B`, so a side-B split becomes a side-A split of the swapped state.
    pub fn swapped(&self) -> ExtensionBlocks {
        let (m, n) = (self.core.dim_a, self.core.dim_b);
        let perm: Vec<usize> = (0..m * n).map(|idx| (idx % m) * n + idx / m).collect();
        let coupling = ExactMatrix::from_fn(self.coupling.rows(), self.coupling.cols(), |r, c| {
            self.coupling.get(perm[r], c).clone()
        });
        ExtensionBlocks {
            core: self.core.swap_subsystems(),
            coupling,
            edge: self.edge.clone(),
            side: self.side.other(),
            perp_index: self.perp_index,
        }
    }
}

/// Exact block extraction; the inverse of [`assemble_extension`].
pub fn split_blocks(s: &BipartiteState, side: Side, perp_index: usize) -> Result<ExtensionBlocks, Error> {
    let layout = BlockLayout::new(s.dim_a, s.dim_b, side, perp_index)?;
    let (c, x, e) = layout.split(&s.matrix);
    let (cm, cn) = layout.core_dims();
    let core = BipartiteState::new(cm, cn, c, format!("{}|core", s.label))?;
    Ok(ExtensionBlocks { core, coupling: x, edge: e.with_hermitian_check()?, side, perp_index })
}

/// Assembles the block form and verifies positivity.
pub fn assemble_extension(b: &ExtensionBlocks, label: impl Into<String>) -> Result<BipartiteState, Error> {
    BipartiteState::from_operator(b.assemble_operator()?, label)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchurSide {
    /// `ρ_{e\c} = ρ_e − χ†ρ_c⁻¹χ`
    EdgeMinusCore,
    /// `ρ_{c\e} = ρ_c − χρ_e⁻¹χ†`
    CoreMinusEdge,
}

/// Generalized Schur complement with the pseudoinverse applied through `solve_on_range`.
pub fn schur_complement(b: &ExtensionBlocks, which: SchurSide) -> Result<ExactMatrix, Error> {
    generalized_schur(&b.core.matrix, &b.coupling, &b.edge, which)
}

pub(crate) fn generalized_schur(
    core: &ExactMatrix,
    coupling: &ExactMatrix,
    edge: &ExactMatrix,
    which: SchurSide,
) -> Result<ExactMatrix, Error> {
    let (base, pivot, x) = match which {
        SchurSide::EdgeMinusCore => (edge, core, coupling.clone()),
        SchurSide::CoreMinusEdge => (core, edge, coupling.adjoint()),
    };
    // base − x† pivot⁻¹ x
    let cols = x.column_vectors();
    let sol = solve_on_range_many(pivot, &cols)
        .map_err(|_| Error::RangeViolation("coupling leaves the range of the pivot block".into()))?;
    let y = ExactMatrix::from_columns(pivot.rows(), &sol);
    let sub = x.adjoint().mul(&y)?;
    let out = base.sub(&sub)?;
    if base.is_hermitian() {
        Ok(out.with_hermitian_check()?)
    } else {
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmat::{psd_check, ratio};
    use crate::qstates::{ket, rho_3x3};
    use proptest::prelude::*;

    #[test]
    fn direct_sum_has_no_coupling() {
        let core = rho_3x3();
        let extra = ExactMatrix::identity(3);
        let m = core.matrix.direct_sum(&extra);
        let s = BipartiteState::new(4, 3, m, "").unwrap();
        let b = split_blocks(&s, Side::A, 3).unwrap();
        assert!(b.coupling.is_zero());
        assert_eq!(b.core.matrix, core.matrix);
        assert_eq!(schur_complement(&b, SchurSide::EdgeMinusCore).unwrap(), extra);
    }

    #[test]
    fn scalar_schur() {
        let s = BipartiteState::new(2, 1, ExactMatrix::from_i64(&[&[2, 1], &[1, 1]]), "").unwrap();
        let b = split_blocks(&s, Side::A, 1).unwrap();
        let half = ExactMatrix::from_fn(1, 1, |_, _| GaussianRational::from_ratio(1, 2));
        assert_eq!(schur_complement(&b, SchurSide::EdgeMinusCore).unwrap(), half);
        assert_eq!(schur_complement(&b, SchurSide::CoreMinusEdge).unwrap().get(0, 0), &GaussianRational::from_int(1));
    }

    #[test]
    fn round_trip_on_every_split() {
        let s = rho_3x3();
        for side in [Side::A, Side::B] {
            for p in 0..3 {
                let b = split_blocks(&s, side, p).unwrap();
                assert_eq!(assemble_extension(&b, "").unwrap().matrix, s.matrix);
                let w = b.swapped();
                let back = w.swapped();
                assert_eq!(back, b);
                assert_eq!(w.assemble_matrix().unwrap(), s.swap_subsystems().matrix);
            }
        }
    }

    #[test]
    fn range_violation_detected() {
        // core |0⟩⟨0| with coupling into |1⟩ cannot be PSD
        let core = BipartiteState::new(1, 2, ExactMatrix::from_i64(&[&[1, 0], &[0, 0]]), "").unwrap();
        let b = ExtensionBlocks {
            core,
            coupling: ExactMatrix::from_i64(&[&[0, 0], &[1, 0]]),
            edge: ExactMatrix::identity(2),
            side: Side::A,
            perp_index: 1,
        };
        assert!(matches!(schur_complement(&b, SchurSide::EdgeMinusCore), Err(Error::RangeViolation(_))));
        assert!(assemble_extension(&b, "").is_err());
    }

    fn arb_state_2x3() -> impl Strategy<Value = BipartiteState> {
        prop::collection::vec((prop::collection::vec(-2i64..=2, 6), 1i64..=3), 1..=4).prop_map(|terms| {
            let terms: Vec<_> = terms
                .into_iter()
                .map(|(c, w)| {
                    let sites: Vec<_> = c.iter().enumerate().map(|(k, &x)| (k / 3, k % 3, x)).collect();
                    (ratio(w, 1), ket(2, 3, &sites))
                })
                .collect();
            BipartiteState::from_weighted_vectors(2, 3, &terms, "rand").unwrap()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(20))]

        #[test]
        fn split_assemble_identity(s in arb_state_2x3(), side_a in any::<bool>(), p in 0usize..2) {
            let side = if side_a { Side::A } else { Side::B };
            let b = split_blocks(&s, side, p).unwrap();
            prop_assert_eq!(&assemble_extension(&b, "").unwrap().matrix, &s.matrix);
            let sc = schur_complement(&b, SchurSide::EdgeMinusCore).unwrap();
            prop_assert!(psd_check(&sc).unwrap().is_psd());
        }
    }
}
