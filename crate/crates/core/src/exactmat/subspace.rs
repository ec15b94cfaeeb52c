use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::matrix::{ExactMatrix, ExactVector};
use super::scalar::GaussianRational;
use crate::error::Error;

/// Gauss–Jordan elimination in place. Afterwards `rows` holds the reduced row
/// echelon form with zero rows removed, every pivot equal to 1. Returns the
/// pivot columns.
pub fn rref_in_place(rows: &mut Vec<ExactVector>, ncols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..ncols {
        if r == rows.len() {
            break;
        }
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][col].inv().expect("nonzero pivot");
        if !inv.is_one() {
            for z in rows[r][col..].iter_mut() {
                if !z.is_zero() {
                    *z = &*z * &inv;
                }
            }
        }
        let support: Vec<usize> = (col..ncols).filter(|&j| !rows[r][j].is_zero()).collect();
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || row[col].is_zero() {
                continue;
            }
            let f = row[col].clone();
            for &j in &support {
                let d = &f * &pivot_row[j];
                row[j] -= &d;
            }
        }
        pivots.push(col);
        r += 1;
    }
    rows.truncate(r);
    pivots
}

/// Kernel basis (right null space) of the matrix whose rows are given.
pub(crate) fn null_space(rows: &[ExactVector], ncols: usize) -> Vec<ExactVector> {
    let mut r = rows.to_vec();
    let pivots = rref_in_place(&mut r, ncols);
    let mut is_pivot = vec![None; ncols];
    for (i, &p) in pivots.iter().enumerate() {
        is_pivot[p] = Some(i);
    }
    let mut basis = Vec::new();
    for free in 0..ncols {
        if is_pivot[free].is_some() {
            continue;
        }
        let mut v = vec![GaussianRational::zero(); ncols];
        v[free] = GaussianRational::one();
        for (i, &p) in pivots.iter().enumerate() {
            if !r[i][free].is_zero() {
                v[p] = -&r[i][free];
            }
        }
        basis.push(v);
    }
    basis
}

/// Linear subspace of `ℂ^ambient_dim` kept in canonical reduced row echelon form.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Subspace {
    ambient_dim: usize,
    basis: Vec<ExactVector>,
}

impl std::fmt::Debug for Subspace {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Subspace(dim {} in {}) [", self.dim(), self.ambient_dim)?;
        for b in &self.basis {
            let s: Vec<String> = b.iter().map(|z| z.to_string()).collect();
            write!(f, " ({})", s.join(","))?;
        }
        write!(f, " ]")
    }
}

impl Subspace {
    /// Span of arbitrary (possibly dependent) vectors.
    pub fn span(ambient_dim: usize, vectors: &[ExactVector]) -> Result<Self, Error> {
        if let Some(v) = vectors.iter().find(|v| v.len() != ambient_dim) {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} in ambient dimension {ambient_dim}",
                v.len()
            )));
        }
        let mut rows = vectors.to_vec();
        rref_in_place(&mut rows, ambient_dim);
        Ok(Self { ambient_dim, basis: rows })
    }

    pub fn zero(ambient_dim: usize) -> Self {
        Self { ambient_dim, basis: Vec::new() }
    }

    pub fn full(ambient_dim: usize) -> Self {
        let basis = (0..ambient_dim).map(|i| super::matrix::basis_vector(ambient_dim, i)).collect();
        Self { ambient_dim, basis }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[ExactVector] {
        &self.basis
    }

    pub fn contains(&self, v: &[GaussianRational]) -> bool {
        if v.len() != self.ambient_dim {
            return false;
        }
        // reduce v against the RREF basis; the pivot structure makes this one pass
        let mut w = v.to_vec();
        for b in &self.basis {
            let p = b.iter().position(|z| !z.is_zero()).expect("nonzero basis row");
            if w[p].is_zero() {
                continue;
            }
            let f = w[p].clone();
            for (wj, bj) in w.iter_mut().zip(b) {
                if !bj.is_zero() {
                    *wj -= &(&f * bj);
                }
            }
        }
        w.iter().all(Zero::is_zero)
    }

    pub fn contains_subspace(&self, other: &Subspace) -> bool {
        other.basis.iter().all(|b| self.contains(b))
    }

    /// Vectors `w` with `Σ_i w_i v_i = 0` for every `v` in the subspace
    /// (bilinear annihilator, no conjugation).
    pub fn annihilator(&self) -> Subspace {
        let k = null_space(&self.basis, self.ambient_dim);
        Subspace::span(self.ambient_dim, &k).expect("consistent dimension")
    }

    /// Orthogonal complement with respect to the Hermitian inner product.
    pub fn orthogonal_complement(&self) -> Subspace {
        let conj_rows: Vec<ExactVector> =
            self.basis.iter().map(|b| b.iter().map(GaussianRational::conj).collect()).collect();
        let k = null_space(&conj_rows, self.ambient_dim);
        Subspace::span(self.ambient_dim, &k).expect("consistent dimension")
    }

    pub fn conj(&self) -> Subspace {
        let rows: Vec<ExactVector> =
            self.basis.iter().map(|b| b.iter().map(GaussianRational::conj).collect()).collect();
        Subspace { ambient_dim: self.ambient_dim, basis: rows }
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace, Error> {
        if self.ambient_dim != other.ambient_dim {
            return Err(Error::DimensionMismatch("subspace sum".into()));
        }
        let mut v = self.basis.clone();
        v.extend(other.basis.iter().cloned());
        Subspace::span(self.ambient_dim, &v)
    }

    /// `U ⊗ V` inside `ℂ^{a} ⊗ ℂ^{b}` with the left factor as the slow index.
    pub fn tensor(&self, other: &Subspace) -> Subspace {
        let mut vs = Vec::with_capacity(self.dim() * other.dim());
        for u in &self.basis {
            for v in &other.basis {
                vs.push(super::matrix::kron_vec(u, v));
            }
        }
        Subspace::span(self.ambient_dim * other.ambient_dim, &vs).expect("consistent dimension")
    }

    /// Applies a fixed index permutation `new[i] = old[perm[i]]` to every vector.
    pub fn permute_coordinates(&self, perm: &[usize]) -> Subspace {
        let vs: Vec<ExactVector> =
            self.basis.iter().map(|b| perm.iter().map(|&p| b[p].clone()).collect()).collect();
        Subspace::span(self.ambient_dim, &vs).expect("consistent dimension")
    }
}

/// Rank and canonical kernel of `M`.
pub fn rank_and_kernel(m: &ExactMatrix) -> (usize, Subspace) {
    let rows = m.row_vectors();
    let kernel = null_space(&rows, m.cols());
    let k = Subspace::span(m.cols(), &kernel).expect("kernel vectors have column length");
    (m.cols() - k.dim(), k)
}

pub fn rank(m: &ExactMatrix) -> usize {
    let mut rows = m.row_vectors();
    rref_in_place(&mut rows, m.cols()).len()
}

/// Column space `R(M)` in canonical form.
pub fn range(m: &ExactMatrix) -> Subspace {
    Subspace::span(m.rows(), &m.column_vectors()).expect("columns have row length")
}

/// `U ∩ V` via the Zassenhaus block elimination on `[[U, U], [V, 0]]`.
pub fn subspace_intersection(u: &Subspace, v: &Subspace) -> Result<Subspace, Error> {
    let n = u.ambient_dim();
    if n != v.ambient_dim() {
        return Err(Error::DimensionMismatch(format!(
            "intersection of subspaces in dimensions {} and {}",
            n,
            v.ambient_dim()
        )));
    }
    let zero = GaussianRational::zero();
    let mut rows: Vec<ExactVector> = Vec::with_capacity(u.dim() + v.dim());
    for b in u.basis() {
        let mut r = b.clone();
        r.extend(b.iter().cloned());
        rows.push(r);
    }
    for b in v.basis() {
        let mut r = b.clone();
        r.extend(std::iter::repeat_n(zero.clone(), n));
        rows.push(r);
    }
    let pivots = rref_in_place(&mut rows, 2 * n);
    let out: Vec<ExactVector> = rows
        .into_iter()
        .zip(pivots)
        .filter(|&(_, p)| p >= n)
        .map(|(r, _)| r[n..].to_vec())
        .collect();
    Subspace::span(n, &out)
}
