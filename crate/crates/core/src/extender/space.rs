use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::exactmat::{
    psd_check, rank_and_kernel, rref_in_place, subspace_intersection, ExactMatrix, ExactVector, GaussianRational,
    Subspace,
};
use crate::qstates::{BipartiteState, Side};
use num_traits::Zero;

/// `(p + q − mn)·n − m`
pub fn extension_count_bound(m: usize, n: usize, p: usize, q: usize) -> i64 {
    let (m, n, p, q) = (m as i64, n as i64, p as i64, q as i64);
    (p + q - m * n) * n - m
}

/// Solution space of the PPT coupling constraints for extending side A.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtensionSpace {
    /// Complex dimension of the admissible couplings `χ`.
    pub dimension: usize,
    /// `mn × n` coupling matrices spanning the space.
    pub basis: Vec<ExactMatrix>,
    /// Dimension spanned by the SLOCC couplings `ρ_c(|φ⟩⊗𝟙)`.
    pub trivial_dimension: usize,
    pub bound: i64,
    pub birank: (usize, usize),
    pub dims: (usize, usize),
}

impl ExtensionSpace {
    pub fn real_dimension(&self) -> usize {
        2 * self.dimension
    }

    pub fn nontrivial_dimension(&self) -> usize {
        self.dimension - self.trivial_dimension
    }
}

/// Position of `|i⟩_A|j⟩_B|l⟩_B̄` in the tripartite space.
fn tri(n: usize, i: usize, j: usize, l: usize) -> usize {
    (i * n + j) * n + l
}

/// `|χ̃⟩ = Σ_l χ|l⟩ ⊗ |l⟩`
pub fn choi_vector(chi: &ExactMatrix, m: usize, n: usize) -> ExactVector {
    let mut v = vec![GaussianRational::zero(); m * n * n];
    for i in 0..m {
        for j in 0..n {
            for l in 0..n {
                v[tri(n, i, j, l)] = chi.get(i * n + j, l).clone();
            }
        }
    }
    v
}

pub fn choi_matrix(v: &[GaussianRational], m: usize, n: usize) -> ExactMatrix {
    ExactMatrix::from_fn(m * n, n, |r, l| v[tri(n, r / n, r % n, l)].clone())
}

/// Constraint data shared by both solution routes.
struct Constraints {
    m: usize,
    n: usize,
    p: usize,
    q: usize,
    range_p: Subspace,
    kernel_p: Subspace,
    /// `R(ρ^{T_A})` conjugated, on `A ⊗ B̄`.
    range_q: Subspace,
    kernel_q: Subspace,
}

fn constraints(core: &BipartiteState) -> Result<Constraints, Error> {
    let pt = core.partial_transpose(Side::A);
    if !psd_check(&pt.matrix)?.is_psd() {
        return Err(Error::NotPpt);
    }
    let (m, n) = (core.dim_a, core.dim_b);
    let (p, kernel_p) = rank_and_kernel(&core.matrix);
    let (q, kernel_q) = rank_and_kernel(&pt.matrix);
    // for Hermitian matrices the range is the orthogonal complement of the kernel
    let range_p = kernel_p.orthogonal_complement();
    let range_q = kernel_q.orthogonal_complement().conj();
    let kernel_q = kernel_q.conj();
    Ok(Constraints { m, n, p, q, range_p, kernel_p, range_q, kernel_q })
}

/// `R(P) ⊗ ℂ^n_B̄` and `R(Q*)_{AB̄} ⊗ ℂ^n_B` intersected exactly.
fn solve_by_intersection(c: &Constraints) -> Result<Subspace, Error> {
    let (m, n) = (c.m, c.n);
    let d = m * n * n;
    let mut u = Vec::with_capacity(c.range_p.dim() * n);
    for r in c.range_p.basis() {
        for l in 0..n {
            let mut v = vec![GaussianRational::zero(); d];
            for i in 0..m {
                for j in 0..n {
                    v[tri(n, i, j, l)] = r[i * n + j].clone();
                }
            }
            u.push(v);
        }
    }
    let mut w = Vec::with_capacity(c.range_q.dim() * n);
    for r in c.range_q.basis() {
        for j in 0..n {
            let mut v = vec![GaussianRational::zero(); d];
            for i in 0..m {
                for l in 0..n {
                    v[tri(n, i, j, l)] = r[i * n + l].clone();
                }
            }
            w.push(v);
        }
    }
    subspace_intersection(&Subspace::span(d, &u)?, &Subspace::span(d, &w)?)
}

/// Null space of the stacked kernel functionals.
fn solve_by_annihilators(c: &Constraints) -> Result<Subspace, Error> {
    let (m, n) = (c.m, c.n);
    let d = m * n * n;
    let mut rows = Vec::new();
    for k in c.kernel_p.basis() {
        for l in 0..n {
            let mut row = vec![GaussianRational::zero(); d];
            for i in 0..m {
                for j in 0..n {
                    row[tri(n, i, j, l)] = k[i * n + j].conj();
                }
            }
            rows.push(row);
        }
    }
    for k in c.kernel_q.basis() {
        for j in 0..n {
            let mut row = vec![GaussianRational::zero(); d];
            for i in 0..m {
                for l in 0..n {
                    row[tri(n, i, j, l)] = k[i * n + l].conj();
                }
            }
            rows.push(row);
        }
    }
    let ns = crate::exactmat::subspace::null_space(&rows, d);
    Subspace::span(d, &ns)
}

/// Couplings `ρ_c(|e_i⟩ ⊗ 𝟙)` of the SLOCC extensions, one per local basis vector.
pub fn slocc_couplings(core: &BipartiteState) -> Vec<ExactMatrix> {
    let (m, n) = (core.dim_a, core.dim_b);
    (0..m)
        .map(|i| {
            let idx: Vec<usize> = (0..n).map(|l| i * n + l).collect();
            let all: Vec<usize> = (0..m * n).collect();
            core.matrix.submatrix(&all, &idx)
        })
        .collect()
}

pub fn slocc_span(core: &BipartiteState) -> Subspace {
    let (m, n) = (core.dim_a, core.dim_b);
    let vs: Vec<ExactVector> = slocc_couplings(core).iter().map(|c| choi_vector(c, m, n)).collect();
    Subspace::span(m * n * n, &vs).expect("consistent dimension")
}

/// Which solver routes to run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolveRoute {
    Intersection,
    Annihilator,
    /// Runs both and fails on disagreement.
    CrossChecked,
}

/// Admissible couplings for a PPT extension of side A.
pub fn ppt_extension_space(core: &BipartiteState) -> Result<ExtensionSpace, Error> {
    ppt_extension_space_with(core, SolveRoute::CrossChecked)
}

pub fn ppt_extension_space_with(core: &BipartiteState, route: SolveRoute) -> Result<ExtensionSpace, Error> {
    let c = constraints(core)?;
    let sol = match route {
        SolveRoute::Intersection => solve_by_intersection(&c)?,
        SolveRoute::Annihilator => solve_by_annihilators(&c)?,
        SolveRoute::CrossChecked => {
            let a = solve_by_intersection(&c)?;
            let b = solve_by_annihilators(&c)?;
            if a != b {
                return Err(Error::DecompositionMismatch(
                    "intersection and annihilator solutions disagree".into(),
                ));
            }
            a
        }
    };
    let (m, n) = (c.m, c.n);
    let trivial = slocc_span(core);
    debug_assert!(sol.contains_subspace(&trivial));
    Ok(ExtensionSpace {
        dimension: sol.dim(),
        basis: sol.basis().iter().map(|v| choi_matrix(v, m, n)).collect(),
        trivial_dimension: trivial.dim(),
        bound: extension_count_bound(m, n, c.p, c.q),
        birank: (c.p, c.q),
        dims: (m, n),
    })
}

/// Extension space for either side; side B runs on the swapped state and
/// the basis is reported in the swapped (side-A) frame.
pub fn ppt_extension_space_on(core: &BipartiteState, side: Side) -> Result<ExtensionSpace, Error> {
    match side {
        Side::A => ppt_extension_space(core),
        Side::B => ppt_extension_space(&core.swap_subsystems()),
    }
}

/// True if `χ` satisfies both range constraints.
pub fn is_admissible_coupling(core: &BipartiteState, chi: &ExactMatrix) -> Result<bool, Error> {
    let c = constraints(core)?;
    let v = choi_vector(chi, c.m, c.n);
    let sol = solve_by_annihilators(&c)?;
    Ok(sol.contains(&v))
}

/// True if `χ` lies in the span of the SLOCC couplings.
pub fn is_trivial_coupling(core: &BipartiteState, chi: &ExactMatrix) -> bool {
    slocc_span(core).contains(&choi_vector(chi, core.dim_a, core.dim_b))
}

/// Rank of the stacked Choi vectors, for diagnostics.
pub fn coupling_rank(chis: &[ExactMatrix], m: usize, n: usize) -> usize {
    let mut rows: Vec<ExactVector> = chis.iter().map(|c| choi_vector(c, m, n)).collect();
    rref_in_place(&mut rows, m * n * n).len()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstates::{rho_3x3, tiles_complement};

    #[test]
    fn bound_arithmetic() {
        assert_eq!(extension_count_bound(3, 3, 5, 6), 3);
        assert_eq!(extension_count_bound(3, 3, 4, 4), -6);
        assert_eq!(extension_count_bound(2, 4, 8, 8), 30);
        assert_eq!(extension_count_bound(2, 2, 4, 4), 6);
    }

    #[test]
    fn maximally_mixed_is_unconstrained() {
        let s = BipartiteState::new(2, 2, ExactMatrix::identity(4), "mm").unwrap();
        let sp = ppt_extension_space(&s).unwrap();
        assert_eq!(sp.dimension, 8);
        assert_eq!(sp.trivial_dimension, 2);
        assert_eq!(sp.bound, 6);
    }

    #[test]
    fn rho3x3_space() {
        let sp = ppt_extension_space(&rho_3x3()).unwrap();
        assert_eq!(sp.birank, (5, 6));
        assert_eq!(sp.bound, 3);
        assert_eq!(sp.trivial_dimension, 3);
        assert!(sp.dimension >= 6);
        for chi in &sp.basis {
            assert!(is_admissible_coupling(&rho_3x3(), chi).unwrap());
        }
    }

    #[test]
    fn tiles_complement_is_unextendible() {
        let s = tiles_complement();
        assert_eq!(s.birank(), (4, 4));
        let sp = ppt_extension_space(&s).unwrap();
        assert_eq!(sp.dimension, 3);
        assert_eq!(sp.trivial_dimension, 3);
        assert_eq!(sp.bound, -6);
    }

    #[test]
    fn choi_round_trip() {
        let chi = ExactMatrix::from_fn(6, 3, |r, c| GaussianRational::from_parts((r as i64, 1), (c as i64, 2)));
        assert_eq!(choi_matrix(&choi_vector(&chi, 2, 3), 2, 3), chi);
    }

    #[test]
    fn rejects_npt_core() {
        let v = crate::qstates::ket(2, 2, &[(0, 0, 1), (1, 1, 1)]);
        let s = BipartiteState::from_weighted_vectors(2, 2, &[(crate::exactmat::ratio(1, 1), v)], "").unwrap();
        assert_eq!(ppt_extension_space(&s), Err(Error::NotPpt));
    }
}
