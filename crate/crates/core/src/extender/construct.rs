use num_rational::BigRational;
use num_traits::{Signed, Zero};

use super::blocks::{assemble_extension, ExtensionBlocks};
use super::space::is_trivial_coupling;
use crate::error::Error;
use crate::exactmat::{
    inner, kron_vec, psd_check, range, rank, solve_on_range, solve_on_range_many, ExactMatrix, ExactVector,
    GaussianRational,
};
use crate::qstates::{BipartiteState, Side};

fn check_len(v: &[GaussianRational], d: usize, what: &str) -> Result<(), Error> {
    if v.len() != d {
        return Err(Error::DimensionMismatch(format!("{what} has length {} but the factor has dimension {d}", v.len())));
    }
    Ok(())
}

/// `(S ⊗ 𝟙) ρ_c (S ⊗ 𝟙)†` with `S = 𝟙 + |⊥⟩⟨φ|`, `|⊥⟩` appended as the last index.
pub fn slocc_extension(core: &BipartiteState, side: Side, phi: &[GaussianRational]) -> Result<BipartiteState, Error> {
    let d = core.local_dim(side);
    check_len(phi, d, "phi")?;
    let s = ExactMatrix::from_fn(d + 1, d, |r, c| {
        if r < d {
            if r == c { GaussianRational::from_int(1) } else { GaussianRational::zero() }
        } else {
            phi[c].conj()
        }
    });
    let op = core.apply_local(side, &s)?;
    // congruence preserves positivity
    BipartiteState::from_operator(op, format!("{}+slocc", core.label))
}

/// Adjoins `|⊥⟩` with no coupling and edge block `Σ w |u⟩⟨u|` on the other factor.
pub fn direct_sum_extension(
    core: &BipartiteState,
    side: Side,
    edge_terms: &[(BigRational, ExactVector)],
) -> Result<ExtensionBlocks, Error> {
    let k = core.local_dim(side.other());
    let mut edge = ExactMatrix::zeros(k, k);
    for (w, u) in edge_terms {
        check_len(u, k, "edge vector")?;
        if w.is_negative() {
            return Err(Error::InvalidInput("negative edge weight".into()));
        }
        edge = edge.add(&ExactMatrix::outer(u, u).scale_rational(w))?;
    }
    Ok(ExtensionBlocks {
        core: core.clone(),
        coupling: ExactMatrix::zeros(core.dim(), k),
        edge: edge.with_hermitian_check()?,
        side,
        perp_index: core.local_dim(side),
    })
}

/// Flat extension: `ρ_e = χ†ρ_c⁻¹χ`, so the Schur complement vanishes.
pub fn flat_extension(core: &BipartiteState, side: Side, chi: &ExactMatrix) -> Result<ExtensionBlocks, Error> {
    let k = core.local_dim(side.other());
    if chi.rows() != core.dim() || chi.cols() != k {
        return Err(Error::DimensionMismatch(format!(
            "coupling is {}x{}, expected {}x{k}",
            chi.rows(),
            chi.cols(),
            core.dim()
        )));
    }
    let sol = solve_on_range_many(&core.matrix, &chi.column_vectors())
        .map_err(|_| Error::RangeViolation("R(χ) is not contained in R(ρ_c)".into()))?;
    let edge = chi.adjoint().mul(&ExactMatrix::from_columns(core.dim(), &sol))?.with_hermitian_check()?;
    Ok(ExtensionBlocks { core: core.clone(), coupling: chi.clone(), edge, side, perp_index: core.local_dim(side) })
}

/// Which sufficient condition of [`product_pair_extension`] failed.
fn precondition(msg: &str) -> Error {
    Error::PreconditionViolation(msg.into())
}

/// Nontrivial PPT extension with `χ = |αβ⟩⟨γ|`.
///
/// `alpha` lives on the extended factor, `beta` and `gamma` on the other one.
/// The edge block is the minimal-rank choice
/// `ρ_e = ⟨αβ|ρ_c⁻¹|αβ⟩ |γ⟩⟨γ| + ⟨ᾱγ|(ρ_c^{T})⁻¹|ᾱγ⟩ |β⟩⟨β|`.
pub fn product_pair_extension(
    core: &BipartiteState,
    side: Side,
    alpha: &[GaussianRational],
    beta: &[GaussianRational],
    gamma: &[GaussianRational],
) -> Result<ExtensionBlocks, Error> {
    match side {
        Side::A => product_pair_a(core, alpha, beta, gamma),
        Side::B => Ok(product_pair_a(&core.swap_subsystems(), alpha, beta, gamma)?.swapped()),
    }
}

fn product_pair_a(
    core: &BipartiteState,
    alpha: &[GaussianRational],
    beta: &[GaussianRational],
    gamma: &[GaussianRational],
) -> Result<ExtensionBlocks, Error> {
    let (m, n) = (core.dim_a, core.dim_b);
    check_len(alpha, m, "alpha")?;
    check_len(beta, n, "beta")?;
    check_len(gamma, n, "gamma")?;
    let bb = inner(beta, beta);
    let gg = inner(gamma, gamma);
    let bg = inner(beta, gamma);
    if bb.is_zero() || gg.is_zero() {
        return Err(precondition("β and γ must be nonzero"));
    }
    if bg.norm_sqr() == &bb.re * &gg.re {
        return Err(precondition("β and γ are parallel"));
    }

    let ab = kron_vec(alpha, beta);
    let alpha_bar: ExactVector = alpha.iter().map(|z| z.conj()).collect();
    let ag = kron_vec(&alpha_bar, gamma);
    let pt = core.partial_transpose(Side::A);
    if !psd_check(&pt.matrix)?.is_psd() {
        return Err(Error::NotPpt);
    }

    let x_ab = solve_on_range(&core.matrix, &ab).map_err(|_| precondition("|αβ⟩ is not in the range of the core"))?;
    let x_ag = solve_on_range(&pt.matrix, &ag)
        .map_err(|_| precondition("|ᾱγ⟩ is not in the range of the partially transposed core"))?;

    // ⟨α|ρ_c|α⟩ as an operator on the other factor
    let contract = ExactMatrix::from_fn(n, m * n, |j, r| {
        let (i, jj) = (r / n, r % n);
        if jj == j { alpha[i].conj() } else { GaussianRational::zero() }
    });
    let reduced = contract.mul(&core.matrix)?.mul(&contract.adjoint())?;
    if rank(&reduced) <= 2 {
        return Err(precondition("rank of ⟨α|ρ_c|α⟩ must exceed 2"));
    }

    let a = inner(&ab, &x_ab);
    let b = inner(&ag, &x_ag);
    let chi = ExactMatrix::outer(&ab, gamma);
    let edge = ExactMatrix::outer(gamma, gamma).scale(&a).add(&ExactMatrix::outer(beta, beta).scale(&b))?;
    let blocks = ExtensionBlocks { core: core.clone(), coupling: chi.clone(), edge: edge.with_hermitian_check()?, side: Side::A, perp_index: m };

    if is_trivial_coupling(core, &chi) {
        return Err(precondition("coupling lies in the SLOCC family"));
    }
    let full = assemble_extension(&blocks, "").map_err(|_| Error::PptFailure)?;
    if !full.is_ppt() {
        return Err(Error::PptFailure);
    }
    Ok(blocks)
}

/// `rank` of the range of a coupling, used in reports.
pub fn coupling_range_dim(chi: &ExactMatrix) -> usize {
    range(chi).dim()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmat::{basis_vector, ratio};
    use crate::extender::blocks::{schur_complement, SchurSide};
    use crate::qstates::rho_3x3;

    fn e(d: usize, i: usize) -> ExactVector {
        basis_vector(d, i)
    }

    #[test]
    fn slocc_zero_phi_is_direct_sum_with_zero() {
        let c = rho_3x3();
        let s = slocc_extension(&c, Side::A, &[GaussianRational::zero(), GaussianRational::zero(), GaussianRational::zero()]).unwrap();
        assert_eq!(s.matrix, c.matrix.direct_sum(&ExactMatrix::zeros(3, 3)));
    }

    #[test]
    fn slocc_preserves_ppt_and_birank() {
        let c = rho_3x3();
        let s = slocc_extension(&c, Side::A, &e(3, 0)).unwrap();
        assert!(s.is_ppt());
        assert_eq!(s.birank(), (5, 6));
        let t = slocc_extension(&c, Side::B, &e(3, 1)).unwrap();
        assert_eq!((t.dim_a, t.dim_b), (3, 4));
        assert!(t.is_ppt());
    }

    #[test]
    fn flat_extension_has_zero_complement() {
        let c = rho_3x3();
        let chi = ExactMatrix::from_columns(9, &[c.matrix.column(0), c.matrix.column(4), c.matrix.column(1)]);
        let b = flat_extension(&c, Side::A, &chi).unwrap();
        assert!(schur_complement(&b, SchurSide::EdgeMinusCore).unwrap().is_zero());
        let s = assemble_extension(&b, "").unwrap();
        assert_eq!(s.birank().0, c.birank().0);
        let zero = flat_extension(&c, Side::A, &ExactMatrix::zeros(9, 3)).unwrap();
        assert!(zero.edge.is_zero());
    }

    #[test]
    fn flat_extension_needs_range() {
        let c = BipartiteState::new(1, 2, ExactMatrix::from_i64(&[&[1, 0], &[0, 0]]), "").unwrap();
        let chi = ExactMatrix::from_i64(&[&[0, 0], &[1, 0]]);
        assert!(matches!(flat_extension(&c, Side::A, &chi), Err(Error::RangeViolation(_))));
    }

    #[test]
    fn first_pipeline_step() {
        // ρ³ˣ³ with |30⟩ and |32⟩ admixed on a fourth A direction
        let c = rho_3x3();
        let stage1 = direct_sum_extension(&c, Side::A, &[(ratio(3, 1), e(3, 0)), (ratio(3, 1), e(3, 2))]).unwrap();
        let s1 = assemble_extension(&stage1, "stage1").unwrap();
        assert!(s1.is_ppt());
        let b = product_pair_extension(&s1, Side::B, &e(3, 0), &e(4, 2), &e(4, 3)).unwrap();
        assert_eq!(b.side, Side::B);
        let s2 = assemble_extension(&b, "").unwrap();
        assert_eq!((s2.dim_a, s2.dim_b), (4, 4));
        assert!(s2.is_ppt());
    }

    #[test]
    fn parallel_beta_gamma_rejected() {
        let c = rho_3x3();
        let s1 = assemble_extension(
            &direct_sum_extension(&c, Side::A, &[(ratio(3, 1), e(3, 0)), (ratio(3, 1), e(3, 2))]).unwrap(),
            "",
        )
        .unwrap();
        let r = product_pair_extension(&s1, Side::B, &e(3, 0), &e(4, 2), &e(4, 2));
        assert!(matches!(r, Err(Error::PreconditionViolation(msg)) if msg.contains("parallel")));
        let r = product_pair_extension(&s1, Side::B, &e(3, 1), &e(4, 2), &e(4, 3));
        assert!(matches!(r, Err(Error::PreconditionViolation(_))));
    }
}
