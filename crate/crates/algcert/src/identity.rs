use locext_core::exactmat::{ratio, BigRational};
use locext_core::qstates::rho_4x5;
use serde::{Deserialize, Serialize};

use crate::poly::Polynomial;
use crate::symbolic::{minor_ideal, range_coordinate_matrix};

/// Variable order used by [`g_generators`].
pub const G_VARIABLES: [&str; 5] = ["psi00", "psi01", "psi10", "psi02", "psi20"];

fn v(i: usize) -> Polynomial {
    Polynomial::var(G_VARIABLES.len(), i)
}

fn c(n: i64, d: i64) -> Polynomial {
    Polynomial::constant(G_VARIABLES.len(), ratio(n, d))
}

/// The five 3×3 minors `g₁..g₅` of the 4×5 range matrix used in the
/// Schmidt-number-3 argument.
pub fn g_generators() -> [Polynomial; 5] {
    let (p00, p01, p10, p02, p20) = (v(0), v(1), v(2), v(3), v(4));
    let g1 = p20.mul(&p00.mul(&p00).sub(&p01.mul(&p10)));
    let g2 = p02.mul(&p00.mul(&p00).add(&p01.mul(&p10)));
    let g3 = p20.mul(&p01.mul(&p01).sub(&p00.mul(&p02)));
    let g4 = p02.mul(&p10.mul(&p10).add(&p00.mul(&p20))).neg();
    let g5 = p00.pow(3).add(&p01.mul(&p01).mul(&p20)).sub(&p10.mul(&p10).mul(&p02)).sub(&p00.mul(&p02).mul(&p20));
    [g1, g2, g3, g4, g5]
}

/// `Σ p_i g_i`
pub fn combine(cofactors: &[Polynomial], gens: &[Polynomial]) -> Polynomial {
    let nv = gens.first().map(Polynomial::nvars).unwrap_or(0);
    cofactors.iter().zip(gens).fold(Polynomial::zero(nv), |acc, (p, g)| acc.add(&p.mul(g)))
}

/// `ψ00(g5 − g3 − g4) − ψ02 g1 + ψ20 g2` in its printed form.
pub fn printed_cofactors() -> [Polynomial; 5] {
    let (p00, p02, p20) = (v(0), v(3), v(4));
    [p02.neg(), p20, p00.neg(), p00.neg(), p00]
}

/// `ψ00(g5 − g3 − g4) − ½ψ02 g1 − ½ψ20 g2`, which does expand to `ψ00⁴`.
pub fn corrected_cofactors() -> [Polynomial; 5] {
    let (p00, p02, p20) = (v(0), v(3), v(4));
    [p02.mul(&c(-1, 2)), p20.mul(&c(-1, 2)), p00.neg(), p00.neg(), p00]
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub printed_holds: bool,
    /// `Σ p_i g_i − ψ00⁴` for the printed cofactors.
    pub printed_residual: String,
    pub corrected_holds: bool,
    /// Each `g_i` is proportional to a 3×3 minor of the actual 4×5 range matrix.
    pub generators_are_minors: bool,
}

impl IdentityReport {
    /// `ψ00⁴` is an explicit combination of minors.
    pub fn passes(&self) -> bool {
        self.corrected_holds && self.generators_are_minors
    }
}

/// Symbolic expansion of the cofactor identity, independent of Gröbner bases.
pub fn rho4x5_identity_check() -> IdentityReport {
    let g = g_generators();
    let target = v(0).pow(4);
    let names: Vec<String> = G_VARIABLES.iter().map(|s| s.to_string()).collect();
    let residual = combine(&printed_cofactors(), &g).sub(&target);
    let corrected = combine(&corrected_cofactors(), &g).sub(&target);
    IdentityReport {
        printed_holds: residual.is_zero(),
        printed_residual: residual.display(&names).to_string(),
        corrected_holds: corrected.is_zero(),
        generators_are_minors: generators_are_minors(&g),
    }
}

fn generators_are_minors(g: &[Polynomial]) -> bool {
    let Ok(r) = rho_4x5() else { return false };
    let Ok(m) = range_coordinate_matrix(r.final_state(), true) else { return false };
    let Ok(ideal) = minor_ideal(&m, 3, &[]) else { return false };
    let map: Option<Vec<usize>> = G_VARIABLES.iter().map(|n| m.variable_index(n)).collect();
    let Some(map) = map else { return false };
    let monics: std::collections::HashSet<Polynomial> = ideal.generators.iter().map(Polynomial::monic).collect();
    g.iter().all(|gi| {
        let lifted = Polynomial::from_terms(
            m.nvars(),
            gi.terms().map(|(mono, coef)| {
                let mut e = vec![0; m.nvars()];
                for (k, &x) in mono.exponents().iter().enumerate() {
                    e[map[k]] = x;
                }
                (crate::poly::Monomial::from_exponents(e), coef.clone())
            }),
        );
        monics.contains(&lifted.monic())
    })
}

/// Both sides at a rational point.
pub fn evaluate_identity(cofactors: &[Polynomial], point: &[BigRational]) -> (BigRational, BigRational) {
    let g = g_generators();
    (combine(cofactors, &g).eval(point), v(0).pow(4).eval(point))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corrected_identity_holds_and_printed_does_not() {
        let r = rho4x5_identity_check();
        assert!(r.corrected_holds);
        assert!(r.generators_are_minors);
        assert!(!r.printed_holds);
        assert_eq!(r.printed_residual, "psi00^2*psi02*psi20 + 2*psi01*psi10*psi02*psi20");
        assert!(r.passes());
    }

    #[test]
    fn sign_flip_breaks_identity() {
        let mut cf = corrected_cofactors();
        cf[2] = cf[2].neg();
        cf[3] = cf[3].neg();
        assert!(!combine(&cf, &g_generators()).sub(&v(0).pow(4)).is_zero());
    }
}
