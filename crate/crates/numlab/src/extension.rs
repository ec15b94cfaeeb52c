use serde::{Deserialize, Serialize};

use crate::error::NumError;
use crate::hermitian::{eig_hermitian, CMatrix, C64};
use crate::state::FloatState;

/// Cut-offs for the three rank decisions.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtensionOptions {
    /// Eigenvalues of the state and its partial transpose below this fraction
    /// of the largest one count as zero.
    pub rank_tol: f64,
    /// Singular values of the stacked projector defect below this count as zero.
    pub defect_tol: f64,
}

impl Default for ExtensionOptions {
    fn default() -> Self {
        Self { rank_tol: 1e-7, defect_tol: 1e-5 }
    }
}

/// Where one rank decision put its cut.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralGap {
    pub what: String,
    pub rank: usize,
    /// Smallest value kept as nonzero (relative to the largest).
    pub smallest_kept: Option<f64>,
    /// Largest value treated as zero (relative to the largest).
    pub largest_dropped: Option<f64>,
}

impl SpectralGap {
    /// Decades between the two sides of the cut.
    pub fn decades(&self) -> Option<f64> {
        match (self.smallest_kept, self.largest_dropped) {
            (Some(k), Some(d)) if d > 0.0 => Some((k / d).log10()),
            (Some(_), Some(_)) => Some(f64::INFINITY),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NumericExtension {
    pub dimension: usize,
    pub birank: (usize, usize),
    pub gaps: Vec<SpectralGap>,
}

impl NumericExtension {
    pub fn min_gap_decades(&self) -> f64 {
        self.gaps.iter().filter_map(SpectralGap::decades).fold(f64::INFINITY, f64::min)
    }
}

/// Splits nonnegative `values` at `tol` (times the largest value when
/// `relative`); fails when a value sits within a decade of the cut.
fn cut(what: &str, values: &[f64], tol: f64, relative: bool) -> Result<(Vec<bool>, SpectralGap), NumError> {
    let top = values.iter().cloned().fold(0.0, f64::max);
    let scaled: Vec<f64> = match relative {
        true if top > 0.0 => values.iter().map(|v| v / top).collect(),
        true => vec![0.0; values.len()],
        false => values.to_vec(),
    };
    if let Some(&bad) = scaled.iter().find(|&&v| v > tol / 10.0 && v < tol * 10.0) {
        return Err(NumError::RankAmbiguity { what: what.into(), value: bad, tol });
    }
    let keep: Vec<bool> = scaled.iter().map(|&v| v >= tol).collect();
    let side = |kept: bool| scaled.iter().zip(&keep).filter(move |(_, &k)| k == kept).map(|(v, _)| *v);
    let gap = SpectralGap {
        what: what.into(),
        rank: keep.iter().filter(|&&k| k).count(),
        smallest_kept: side(true).reduce(f64::min),
        largest_dropped: side(false).reduce(f64::max),
    };
    Ok((keep, gap))
}

/// Orthogonal projector onto the eigenvectors above the cut.
fn range_projector(what: &str, h: &CMatrix, tol: f64, gaps: &mut Vec<SpectralGap>) -> Result<CMatrix, NumError> {
    let e = eig_hermitian(h, 1e-14)?;
    let abs: Vec<f64> = e.values.iter().map(|v| v.abs()).collect();
    let (keep, gap) = cut(what, &abs, tol, true)?;
    gaps.push(gap);
    let d = h.nrows();
    let mut p = CMatrix::zeros(d, d);
    for (k, &kept) in keep.iter().enumerate() {
        if kept {
            let v = e.vectors.column(k);
            p += v * v.adjoint();
        }
    }
    Ok(p)
}

fn tri(n: usize, i: usize, j: usize, l: usize) -> usize {
    (i * n + j) * n + l
}

/// Dimension of the couplings `χ` with `|χ̃⟩ ∈ (R(ρ) ⊗ ℂ^n_B̄) ∩ (R(ρ^{T_A})*_{AB̄} ⊗ ℂ^n_B)`,
/// counted as the near-zero singular values of `[𝟙 − P₁; 𝟙 − P₂]`.
pub fn numeric_extension_dimension(state: &FloatState, opts: &ExtensionOptions) -> Result<NumericExtension, NumError> {
    let (m, n) = (state.dim_a, state.dim_b);
    let mut gaps = Vec::new();
    let pr = range_projector("range of the state", &state.matrix, opts.rank_tol, &mut gaps)?;
    let pq = range_projector("range of the partial transpose", &state.partial_transpose_a(), opts.rank_tol, &mut gaps)?;
    let birank = (gaps[0].rank, gaps[1].rank);

    let d = m * n * n;
    let one = C64::new(1.0, 0.0);
    let mut stacked = CMatrix::zeros(2 * d, d);
    for i in 0..m {
        for j in 0..n {
            for l in 0..n {
                let r = tri(n, i, j, l);
                for i2 in 0..m {
                    for j2 in 0..n {
                        // P₁ = Π_ρ ⊗ 𝟙_B̄
                        let c = tri(n, i2, j2, l);
                        stacked[(r, c)] -= pr[(i * n + j, i2 * n + j2)];
                    }
                    for l2 in 0..n {
                        // P₂ acts as conj(Π_{ρ^{T_A}}) on (A, B̄)
                        let c = tri(n, i2, j, l2);
                        stacked[(d + r, c)] -= pq[(i * n + l, i2 * n + l2)].conj();
                    }
                }
                stacked[(r, r)] += one;
                stacked[(d + r, r)] += one;
            }
        }
    }
    let sv = stacked.singular_values();
    let (keep, gap) = cut("projector defect", sv.as_slice(), opts.defect_tol, false)?;
    gaps.push(gap);
    Ok(NumericExtension { dimension: keep.iter().filter(|&&k| !k).count(), birank, gaps })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gauss_newton::{gauss_newton_birank, GnOptions};
    use locext_core::extender::ppt_extension_space;
    use locext_core::qstates::{rho_3x3, rho_family, tiles_complement, BipartiteState, FamilySpec};

    fn agree(s: &BipartiteState) {
        let exact = ppt_extension_space(s).unwrap().dimension;
        let num = numeric_extension_dimension(&FloatState::from_exact(s).unwrap(), &ExtensionOptions::default()).unwrap();
        assert_eq!(num.dimension, exact, "{}: {:?}", s.label, num.gaps);
        assert_eq!(num.birank, s.birank());
    }

    #[test]
    fn matches_exact_counts() {
        agree(&rho_3x3());
        agree(&tiles_complement());
        agree(&rho_family(&FamilySpec::new(2)).unwrap());
    }

    #[test]
    fn sampled_three_by_three_has_only_trivial_couplings() {
        for seed in 0..3 {
            let s = gauss_newton_birank(3, 3, 4, 4, seed, &GnOptions::default()).unwrap();
            let e = numeric_extension_dimension(&s, &ExtensionOptions::default()).unwrap();
            assert_eq!(e.birank, (4, 4));
            assert_eq!(e.dimension, 3, "{:?}", e.gaps);
            eprintln!("seed {seed}: {:?}", e.gaps);
        }
    }

    #[test]
    fn ambiguous_cut_is_reported() {
        let err = cut("x", &[1.0, 2e-7], 1e-7, true).unwrap_err();
        assert!(matches!(err, NumError::RankAmbiguity { .. }));
        let (keep, gap) = cut("x", &[1.0, 1e-12, 0.5], 1e-7, true).unwrap();
        assert_eq!(keep, vec![true, false, true]);
        assert_eq!(gap.rank, 2);
        assert!(gap.decades().unwrap() > 11.0);
    }
}
