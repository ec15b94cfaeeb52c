use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::matrix::{ExactMatrix, ExactVector};
use super::scalar::{rational_string_vec, GaussianRational};
use crate::error::Error;

/// Symmetric-pivoted factorization `P·M·Pᵀ = L·D·L†` with `L` unit lower
/// triangular and `D` real diagonal. `perm[k]` is the original index placed at
/// position `k`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LdlFactorization {
    pub perm: Vec<usize>,
    pub l: ExactMatrix,
    #[serde(with = "rational_string_vec")]
    pub d: Vec<BigRational>,
}

impl LdlFactorization {
    pub fn rank(&self) -> usize {
        self.d.iter().filter(|x| !x.is_zero()).count()
    }

    pub fn is_nonnegative(&self) -> bool {
        self.d.iter().all(|x| !x.is_negative())
    }

    /// Rebuilds `M` from the factors.
    pub fn reconstruct(&self) -> ExactMatrix {
        let n = self.d.len();
        let mut permuted = ExactMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..=i {
                let mut s = GaussianRational::zero();
                for k in 0..=j {
                    if self.d[k].is_zero() {
                        continue;
                    }
                    let a = self.l.get(i, k);
                    let b = self.l.get(j, k);
                    if a.is_zero() || b.is_zero() {
                        continue;
                    }
                    s += &(a * &b.conj()).scale(&self.d[k]);
                }
                *permuted.entry_mut(i, j) = s.clone();
                if i != j {
                    *permuted.entry_mut(j, i) = s.conj();
                }
            }
        }
        let mut out = ExactMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                *out.entry_mut(self.perm[i], self.perm[j]) = permuted.get(i, j).clone();
            }
        }
        out
    }

    /// Checks the factorization against `m` and that the diagonal is nonnegative.
    pub fn certifies_psd(&self, m: &ExactMatrix) -> bool {
        let n = self.d.len();
        if m.rows() != n || m.cols() != n || self.l.rows() != n || self.l.cols() != n {
            return false;
        }
        let mut seen = vec![false; n];
        for &p in &self.perm {
            if p >= n || seen[p] {
                return false;
            }
            seen[p] = true;
        }
        for i in 0..n {
            if !self.l.get(i, i).is_one() {
                return false;
            }
            if (i + 1..n).any(|j| !self.l.get(i, j).is_zero()) {
                return false;
            }
        }
        self.is_nonnegative() && self.reconstruct() == *m
    }

    /// Rank-one terms `d_k · l_k l_k†` in original coordinates (zero pivots dropped).
    pub fn rank_one_terms(&self) -> Vec<(BigRational, ExactVector)> {
        let n = self.d.len();
        let mut out = Vec::new();
        for k in 0..n {
            if self.d[k].is_zero() {
                continue;
            }
            let mut v = vec![GaussianRational::zero(); n];
            for i in 0..n {
                v[self.perm[i]] = self.l.get(i, k).clone();
            }
            out.push((self.d[k].clone(), v));
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PsdVerdict {
    Psd(LdlFactorization),
    /// `v` with `v†Mv = value < 0`.
    NotPsd { witness: ExactVector, value: BigRational },
}

impl PsdVerdict {
    pub fn is_psd(&self) -> bool {
        matches!(self, PsdVerdict::Psd(_))
    }
}

/// Exact PSD decision for a Hermitian matrix.
///
/// Elimination proceeds on the trailing Schur complement, always pivoting on a
/// positive diagonal entry. A negative diagonal entry, or a zero diagonal with
/// a nonzero entry in its row, yields a witness that is mapped back through the
/// partial factor.
pub fn psd_check(m: &ExactMatrix) -> Result<PsdVerdict, Error> {
    if !m.is_hermitian() {
        return Err(Error::NotHermitian);
    }
    let n = m.rows();
    if let Some(v) = simple_witness(m) {
        return Ok(v);
    }
    let mut s = m.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut l = ExactMatrix::identity(n);
    let mut d: Vec<BigRational> = Vec::with_capacity(n);

    for k in 0..n {
        // trailing block indices are positions k..n in `perm` order
        let diag = |s: &ExactMatrix, i: usize| s.get(perm[i], perm[i]).re.clone();
        if let Some(i) = (k..n).find(|&i| diag(&s, i).is_negative()) {
            let mut y = vec![GaussianRational::zero(); n];
            y[i] = GaussianRational::one();
            return Ok(not_psd(m, &l, &perm, k, y));
        }
        let Some(p) = (k..n).find(|&i| diag(&s, i).is_positive()) else {
            // all trailing diagonals are zero: the block must vanish identically
            for a in k..n {
                for b in k..n {
                    let z = s.get(perm[a], perm[b]);
                    if !z.is_zero() {
                        let mut y = vec![GaussianRational::zero(); n];
                        y[a] = GaussianRational::one();
                        y[b] = -z.conj();
                        return Ok(not_psd(m, &l, &perm, k, y));
                    }
                }
            }
            d.extend(std::iter::repeat_n(BigRational::zero(), n - k));
            break;
        };
        perm.swap(k, p);
        // keep the already computed columns of L consistent with the swap
        for c in 0..k {
            let a = l.get(k, c).clone();
            let b = l.get(p, c).clone();
            l.set(k, c, b);
            l.set(p, c, a);
        }
        let pk = perm[k];
        let pivot = s.get(pk, pk).re.clone();
        let inv = GaussianRational::real(pivot.recip());
        for i in k + 1..n {
            let z = s.get(perm[i], pk);
            if !z.is_zero() {
                l.set(i, k, z * &inv);
            }
        }
        for i in k + 1..n {
            let li = l.get(i, k).clone();
            if li.is_zero() {
                continue;
            }
            let li_p = li.scale(&pivot);
            for j in k + 1..n {
                let lj = l.get(j, k);
                if lj.is_zero() {
                    continue;
                }
                let upd = &li_p * &lj.conj();
                *s.entry_mut(perm[i], perm[j]) -= &upd;
            }
        }
        d.push(pivot);
    }
    Ok(PsdVerdict::Psd(LdlFactorization { perm, l, d }))
}

/// Scans `e_i` and `e_i ± e_j`, `e_i ± i·e_j` for a negative expectation value.
fn simple_witness(m: &ExactMatrix) -> Option<PsdVerdict> {
    let n = m.rows();
    let unit = |i: usize| super::matrix::basis_vector(n, i);
    for i in 0..n {
        if m.get(i, i).re.is_negative() {
            return Some(PsdVerdict::NotPsd { witness: unit(i), value: m.get(i, i).re.clone() });
        }
    }
    let phases = [
        -GaussianRational::one(),
        GaussianRational::one(),
        -GaussianRational::i(),
        GaussianRational::i(),
    ];
    for i in 0..n {
        for j in i + 1..n {
            if m.get(i, j).is_zero() {
                continue;
            }
            for ph in &phases {
                let mut v = unit(i);
                v[j] = ph.clone();
                let value = m.sandwich(&v, &v).expect("square").re;
                if value.is_negative() {
                    return Some(PsdVerdict::NotPsd { witness: v, value });
                }
            }
        }
    }
    None
}

/// Maps a trailing-block witness `y` back to original coordinates by solving
/// `L† x = y`, so that `x†Mx = y†Sy`.
fn not_psd(m: &ExactMatrix, l: &ExactMatrix, perm: &[usize], k: usize, y: ExactVector) -> PsdVerdict {
    let n = perm.len();
    let mut x = y;
    for i in (0..k).rev() {
        let mut acc = x[i].clone();
        for j in i + 1..n {
            let lji = l.get(j, i);
            if !lji.is_zero() && !x[j].is_zero() {
                acc -= &(&lji.conj() * &x[j]);
            }
        }
        x[i] = acc;
    }
    let mut witness = vec![GaussianRational::zero(); n];
    for i in 0..n {
        witness[perm[i]] = x[i].clone();
    }
    let value = m.sandwich(&witness, &witness).expect("square").re;
    debug_assert!(value.is_negative());
    PsdVerdict::NotPsd { witness, value }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{Complex, DMatrix};
    use proptest::prelude::*;

    fn eigen_min(m: &ExactMatrix) -> f64 {
        let n = m.rows();
        let rows = m.to_f64_rows();
        let a = DMatrix::from_fn(n, n, |i, j| Complex::new(rows[i][j].0, rows[i][j].1));
        a.symmetric_eigenvalues().iter().cloned().fold(f64::INFINITY, f64::min)
    }

    #[test]
    fn identity_is_psd() {
        let v = psd_check(&ExactMatrix::identity(2)).unwrap();
        assert!(v.is_psd());
    }

    #[test]
    fn indefinite_two_by_two() {
        let m = ExactMatrix::from_i64(&[&[1, 2], &[2, 1]]);
        match psd_check(&m).unwrap() {
            PsdVerdict::NotPsd { witness, value } => {
                assert!(value.is_negative());
                assert_eq!(m.sandwich(&witness, &witness).unwrap().re, value);
                assert_eq!(witness, vec![GaussianRational::from_int(1), GaussianRational::from_int(-1)]);
                assert_eq!(value, BigRational::from_integer((-2).into()));
            }
            other => panic!("expected NotPsd, got {other:?}"),
        }
    }

    #[test]
    fn zero_diagonal_with_coupling() {
        let m = ExactMatrix::from_i64(&[&[0, 1], &[1, 0]]);
        assert!(!psd_check(&m).unwrap().is_psd());
        let m = ExactMatrix::from_i64(&[&[1, 1, 0], &[1, 1, 1], &[0, 1, 1]]);
        assert!(!psd_check(&m).unwrap().is_psd());
    }

    #[test]
    fn non_hermitian_rejected() {
        let m = ExactMatrix::from_i64(&[&[1, 2], &[0, 1]]);
        assert_eq!(psd_check(&m), Err(Error::NotHermitian));
    }

    #[test]
    fn factorization_replays() {
        let m = ExactMatrix::from_i64(&[&[2, 1, 1], &[1, 2, 1], &[1, 1, 2]]);
        let PsdVerdict::Psd(f) = psd_check(&m).unwrap() else { panic!() };
        assert!(f.certifies_psd(&m));
        assert_eq!(f.rank(), 3);
        let mut sum = ExactMatrix::zeros(3, 3);
        for (w, v) in f.rank_one_terms() {
            sum = sum.add(&ExactMatrix::outer(&v, &v).scale_rational(&w)).unwrap();
        }
        assert_eq!(sum, m);
    }

    fn hermitian_from(n: usize, entries: &[(i64, i64, i64)]) -> ExactMatrix {
        let mut m = ExactMatrix::zeros(n, n);
        let mut k = 0;
        for i in 0..n {
            for j in i..n {
                let (a, b, den) = entries[k];
                k += 1;
                if i == j {
                    m.set(i, i, GaussianRational::from_ratio(a, den));
                } else {
                    let z = GaussianRational::from_parts((a, den), (b, den));
                    m.set(i, j, z.clone());
                    m.set(j, i, z.conj());
                }
            }
        }
        m
    }

    fn low_rank_psd(n: usize, r: usize, entries: &[(i64, i64)]) -> ExactMatrix {
        let vs: Vec<ExactVector> = (0..r)
            .map(|c| (0..n).map(|i| {
                let (a, b) = entries[c * n + i];
                GaussianRational::from_parts((a, 1), (b, 1))
            }).collect())
            .collect();
        let mut m = ExactMatrix::zeros(n, n);
        for v in &vs {
            m = m.add(&ExactMatrix::outer(v, v)).unwrap();
        }
        m
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(128))]

        #[test]
        fn matches_floating_eigenvalues(
            (n, entries) in (1usize..=8).prop_flat_map(|n| {
                (Just(n), prop::collection::vec((-5i64..=5, -5i64..=5, 1i64..=3), n * (n + 1) / 2))
            })
        ) {
            let m = hermitian_from(n, &entries);
            let verdict = psd_check(&m).unwrap();
            let lam = eigen_min(&m);
            prop_assert_eq!(verdict.is_psd(), lam >= -1e-8, "min eigenvalue {}", lam);
            match verdict {
                PsdVerdict::Psd(f) => prop_assert!(f.certifies_psd(&m)),
                PsdVerdict::NotPsd { witness, value } => {
                    prop_assert!(value.is_negative());
                    prop_assert_eq!(m.sandwich(&witness, &witness).unwrap().re, value);
                }
            }
        }

        #[test]
        fn low_rank_gram_matrices_are_psd(
            (n, r, entries) in (1usize..=6, 1usize..=3).prop_flat_map(|(n, r)| {
                (Just(n), Just(r), prop::collection::vec((-3i64..=3, -3i64..=3), n * r))
            })
        ) {
            let m = low_rank_psd(n, r, &entries);
            let PsdVerdict::Psd(f) = psd_check(&m).unwrap() else {
                return Err(TestCaseError::fail("Gram matrix rejected"));
            };
            prop_assert!(f.certifies_psd(&m));
            prop_assert_eq!(f.rank(), crate::exactmat::rank(&m));
        }
    }
}
