use std::ops::Deref;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::exactmat::{psd_check, rank, ExactMatrix, ExactVector, GaussianRational, PsdVerdict};

/// Which tensor factor an operation acts on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    A,
    B,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::A => Side::B,
            Side::B => Side::A,
        }
    }
}

impl std::str::FromStr for Side {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "A" | "a" => Ok(Side::A),
            "B" | "b" => Ok(Side::B),
            _ => Err(Error::Parse(format!("unknown side '{s}'"))),
        }
    }
}

/// Operator on `ℂ^m ⊗ ℂ^n`. Basis `|i⟩_A ⊗ |j⟩_B` sits at index `i·n + j`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BipartiteOperator {
    pub dim_a: usize,
    pub dim_b: usize,
    pub matrix: ExactMatrix,
}

impl BipartiteOperator {
    pub fn new(dim_a: usize, dim_b: usize, matrix: ExactMatrix) -> Result<Self, Error> {
        let d = dim_a * dim_b;
        if matrix.rows() != d || matrix.cols() != d {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix for local dimensions {dim_a}x{dim_b}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        Ok(Self { dim_a, dim_b, matrix })
    }

    pub fn dim(&self) -> usize {
        self.dim_a * self.dim_b
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.dim_b + j
    }

    pub fn site(&self, idx: usize) -> (usize, usize) {
        (idx / self.dim_b, idx % self.dim_b)
    }

    pub fn local_dim(&self, side: Side) -> usize {
        match side {
            Side::A => self.dim_a,
            Side::B => self.dim_b,
        }
    }

    /// `⟨ij|ρ|kl⟩`
    pub fn element(&self, i: usize, j: usize, k: usize, l: usize) -> &GaussianRational {
        self.matrix.get(self.index(i, j), self.index(k, l))
    }

    pub fn partial_transpose(&self, side: Side) -> BipartiteOperator {
        let (m, n) = (self.dim_a, self.dim_b);
        let matrix = ExactMatrix::from_fn(m * n, m * n, |r, c| {
            let (i, j) = (r / n, r % n);
            let (k, l) = (c / n, c % n);
            match side {
                // ⟨ij|ρ^{T_A}|kl⟩ = ⟨kj|ρ|il⟩
                Side::A => self.element(k, j, i, l).clone(),
                // ⟨ij|ρ^{T_B}|kl⟩ = ⟨il|ρ|kj⟩
                Side::B => self.element(i, l, k, j).clone(),
            }
        });
        let matrix = if self.matrix.hermitian_hint() {
            matrix.with_hermitian_check().expect("partial transpose preserves Hermiticity")
        } else {
            matrix
        };
        BipartiteOperator { dim_a: m, dim_b: n, matrix }
    }

    /// Relabels `A ↔ B`: `⟨ji|ρ'|lk⟩ = ⟨ij|ρ|kl⟩`.
    pub fn swap_subsystems(&self) -> BipartiteOperator {
        let (m, n) = (self.dim_a, self.dim_b);
        let perm: Vec<usize> = (0..m * n).map(|idx| (idx % m) * n + idx / m).collect();
        let mut matrix = ExactMatrix::from_fn(m * n, m * n, |r, c| self.matrix.get(perm[r], perm[c]).clone());
        if self.matrix.hermitian_hint() {
            matrix = matrix.with_hermitian_check().expect("relabeling preserves Hermiticity");
        }
        BipartiteOperator { dim_a: n, dim_b: m, matrix }
    }

    /// `(X ⊗ 𝟙) ρ (X ⊗ 𝟙)†` (or `𝟙 ⊗ X` for side B) for a rectangular local map `X`.
    pub fn apply_local(&self, side: Side, x: &ExactMatrix) -> Result<BipartiteOperator, Error> {
        let d = self.local_dim(side);
        if x.cols() != d {
            return Err(Error::DimensionMismatch(format!(
                "local map with {} columns on a {d}-dimensional factor",
                x.cols()
            )));
        }
        let (full, dim_a, dim_b) = match side {
            Side::A => (x.kron(&ExactMatrix::identity(self.dim_b)), x.rows(), self.dim_b),
            Side::B => (ExactMatrix::identity(self.dim_a).kron(x), self.dim_a, x.rows()),
        };
        let out = full.mul(&self.matrix)?.mul(&full.adjoint())?;
        let out = if self.matrix.is_hermitian() { out.with_hermitian_check()? } else { out };
        Ok(BipartiteOperator { dim_a, dim_b, matrix: out })
    }

    pub fn select_block(&self, rows_a: &[usize], rows_b: &[usize]) -> Result<BipartiteOperator, Error> {
        check_index_list(rows_a, self.dim_a, "A")?;
        check_index_list(rows_b, self.dim_b, "B")?;
        let idx: Vec<usize> = rows_a
            .iter()
            .flat_map(|&i| rows_b.iter().map(move |&j| (i, j)))
            .map(|(i, j)| self.index(i, j))
            .collect();
        let mut matrix = self.matrix.submatrix(&idx, &idx);
        if self.matrix.hermitian_hint() {
            matrix = matrix.with_hermitian_check()?;
        }
        Ok(BipartiteOperator { dim_a: rows_a.len(), dim_b: rows_b.len(), matrix })
    }

    pub fn is_psd(&self) -> Result<bool, Error> {
        Ok(psd_check(&self.matrix)?.is_psd())
    }
}

pub(crate) fn check_index_list(list: &[usize], dim: usize, which: &str) -> Result<(), Error> {
    if list.is_empty() {
        return Err(Error::BoundsViolation(format!("empty index list on side {which}")));
    }
    let mut seen = vec![false; dim];
    for &i in list {
        if i >= dim {
            return Err(Error::BoundsViolation(format!("index {i} on side {which} of dimension {dim}")));
        }
        if seen[i] {
            return Err(Error::BoundsViolation(format!("duplicate index {i} on side {which}")));
        }
        seen[i] = true;
    }
    Ok(())
}

/// Unnormalized bipartite density operator; Hermitian and PSD by construction.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BipartiteState {
    #[serde(flatten)]
    op: BipartiteOperator,
    pub label: String,
}

impl Deref for BipartiteState {
    type Target = BipartiteOperator;
    fn deref(&self) -> &BipartiteOperator {
        &self.op
    }
}

impl BipartiteState {
    /// Verifies Hermiticity and positive semidefiniteness exactly.
    pub fn new(dim_a: usize, dim_b: usize, matrix: ExactMatrix, label: impl Into<String>) -> Result<Self, Error> {
        Self::from_operator(BipartiteOperator::new(dim_a, dim_b, matrix)?, label)
    }

    pub fn from_operator(op: BipartiteOperator, label: impl Into<String>) -> Result<Self, Error> {
        match psd_check(&op.matrix)? {
            PsdVerdict::Psd(_) => {}
            PsdVerdict::NotPsd { .. } => return Err(Error::NotPsd),
        }
        let matrix = op.matrix.with_hermitian_check()?;
        Ok(Self { op: BipartiteOperator { matrix, ..op }, label: label.into() })
    }

    /// Sum of weighted rank-one projectors `Σ w |v⟩⟨v|` with nonnegative weights.
    pub fn from_weighted_vectors(
        dim_a: usize,
        dim_b: usize,
        terms: &[(crate::exactmat::BigRational, ExactVector)],
        label: impl Into<String>,
    ) -> Result<Self, Error> {
        let d = dim_a * dim_b;
        let mut m = ExactMatrix::zeros(d, d);
        for (w, v) in terms {
            if v.len() != d {
                return Err(Error::DimensionMismatch(format!("vector of length {} in dimension {d}", v.len())));
            }
            if num_traits::Signed::is_negative(w) {
                return Err(Error::InvalidInput("negative weight".into()));
            }
            m = m.add(&ExactMatrix::outer(v, v).scale_rational(w))?;
        }
        Self::new(dim_a, dim_b, m, label)
    }

    pub fn operator(&self) -> &BipartiteOperator {
        &self.op
    }

    pub fn into_operator(self) -> BipartiteOperator {
        self.op
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn swap_subsystems(&self) -> BipartiteState {
        BipartiteState { op: self.op.swap_subsystems(), label: self.label.clone() }
    }

    /// `(A⊗B)ρ(A⊗B)†` where `A`, `B` select the listed local basis vectors.
    pub fn project_local_block(&self, rows_a: &[usize], rows_b: &[usize]) -> Result<BipartiteState, Error> {
        let op = self.op.select_block(rows_a, rows_b)?;
        // principal submatrices of a PSD matrix are PSD
        Ok(BipartiteState { op, label: format!("{}|block", self.label) })
    }

    /// Exact PPT test (`ρ^{T_A} ≥ 0`; equivalent to `ρ^{T_B} ≥ 0`).
    pub fn is_ppt(&self) -> bool {
        psd_check(&self.op.partial_transpose(Side::A).matrix)
            .map(|v| v.is_psd())
            .unwrap_or(false)
    }

    /// `(rank ρ, rank ρ^{T_A})`
    pub fn birank(&self) -> (usize, usize) {
        (rank(&self.op.matrix), rank(&self.op.partial_transpose(Side::A).matrix))
    }

    pub fn trace(&self) -> GaussianRational {
        self.op.matrix.trace()
    }

    /// Trace-normalized copy, for display.
    pub fn normalized(&self) -> BipartiteState {
        let t = self.trace();
        if t.is_zero() {
            return self.clone();
        }
        let inv = t.inv().expect("nonzero trace");
        let mut op = self.op.clone();
        op.matrix = op.matrix.scale(&inv).with_hermitian_check().expect("real positive scaling");
        BipartiteState { op, label: self.label.clone() }
    }

    /// Embeds the state into larger local dimensions, placing old index `i`
    /// at position `i` (new directions appended at the end).
    pub fn embed(&self, dim_a: usize, dim_b: usize) -> Result<BipartiteState, Error> {
        if dim_a < self.dim_a || dim_b < self.dim_b {
            return Err(Error::DimensionMismatch("embedding into smaller dimensions".into()));
        }
        let d = dim_a * dim_b;
        let mut m = ExactMatrix::zeros(d, d);
        for r in 0..self.dim() {
            let (i, j) = self.site(r);
            for c in 0..self.dim() {
                let (k, l) = self.site(c);
                let z = self.matrix.get(r, c);
                if !z.is_zero() {
                    *m.entry_mut(i * dim_b + j, k * dim_b + l) = z.clone();
                }
            }
        }
        let op = BipartiteOperator { dim_a, dim_b, matrix: m.with_hermitian_check()? };
        Ok(BipartiteState { op, label: self.label.clone() })
    }

    /// Adds `Σ w |v⟩⟨v|` to the state.
    pub fn admix(&self, terms: &[(crate::exactmat::BigRational, ExactVector)]) -> Result<BipartiteState, Error> {
        let extra = BipartiteState::from_weighted_vectors(self.dim_a, self.dim_b, terms, "")?;
        let m = self.matrix.add(&extra.matrix)?;
        BipartiteState::new(self.dim_a, self.dim_b, m, self.label.clone())
    }
}

impl<'de> Deserialize<'de> for BipartiteState {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            dim_a: usize,
            dim_b: usize,
            matrix: ExactMatrix,
            #[serde(default)]
            label: String,
        }
        let r = Repr::deserialize(d)?;
        BipartiteState::new(r.dim_a, r.dim_b, r.matrix, r.label).map_err(serde::de::Error::custom)
    }
}

/// `|a⟩⊗|b⟩` for computational basis indices.
pub fn product_basis_vector(dim_a: usize, dim_b: usize, i: usize, j: usize) -> ExactVector {
    crate::exactmat::basis_vector(dim_a * dim_b, i * dim_b + j)
}

/// Sum of basis kets `Σ ± |ij⟩` from signed sites.
pub fn ket(dim_a: usize, dim_b: usize, sites: &[(usize, usize, i64)]) -> ExactVector {
    let mut v = vec![GaussianRational::zero(); dim_a * dim_b];
    for &(i, j, c) in sites {
        v[i * dim_b + j] += &GaussianRational::from_int(c);
    }
    v
}

/// `m×n` coefficient matrix `Ψ_ij = ⟨ij|ψ⟩`.
pub fn matricize(v: &[GaussianRational], dim_a: usize, dim_b: usize) -> ExactMatrix {
    ExactMatrix::from_fn(dim_a, dim_b, |i, j| v[i * dim_b + j].clone())
}

/// Schmidt rank of a pure vector, the exact rank of its matricization.
pub fn schmidt_rank(v: &[GaussianRational], dim_a: usize, dim_b: usize) -> usize {
    rank(&matricize(v, dim_a, dim_b))
}

/// Swaps the tensor factors of a vector on `ℂ^m ⊗ ℂ^n`.
pub fn swap_vector(v: &[GaussianRational], dim_a: usize, dim_b: usize) -> ExactVector {
    let mut out = vec![GaussianRational::zero(); v.len()];
    for i in 0..dim_a {
        for j in 0..dim_b {
            out[j * dim_a + i] = v[i * dim_b + j].clone();
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmat::ratio;

    fn phi_plus_unnormalized() -> BipartiteState {
        let v = ket(2, 2, &[(0, 0, 1), (1, 1, 1)]);
        BipartiteState::from_weighted_vectors(2, 2, &[(ratio(1, 1), v)], "phi+").unwrap()
    }

    #[test]
    fn diagonal_state_is_pt_invariant() {
        let m = ExactMatrix::diagonal(&[1, 2, 3, 4, 5, 6].map(GaussianRational::from_int));
        let s = BipartiteState::new(2, 3, m, "diag").unwrap();
        assert_eq!(s.partial_transpose(Side::A), *s.operator());
        assert_eq!(s.partial_transpose(Side::B), *s.operator());
    }

    #[test]
    fn phi_plus_transpose_is_swap() {
        let s = phi_plus_unnormalized();
        let pt = s.partial_transpose(Side::B);
        let swap = ExactMatrix::from_i64(&[&[1, 0, 0, 0], &[0, 0, 1, 0], &[0, 1, 0, 0], &[0, 0, 0, 1]]);
        assert_eq!(pt.matrix, swap);
        // SWAP has eigenvalue -1 on (|01⟩ - |10⟩)
        let v = ket(2, 2, &[(0, 1, 1), (1, 0, -1)]);
        assert_eq!(pt.matrix.sandwich(&v, &v).unwrap(), GaussianRational::from_int(-2));
        assert_eq!(pt.matrix.mul_vec(&v).unwrap(), vec_neg(&v));
        assert!(!s.is_ppt());
    }

    fn vec_neg(v: &[GaussianRational]) -> ExactVector {
        v.iter().map(|z| -z).collect()
    }

    #[test]
    fn swap_examples() {
        let v = product_basis_vector(2, 3, 0, 1);
        let s = BipartiteState::from_weighted_vectors(2, 3, &[(ratio(1, 1), v)], "").unwrap();
        let t = s.swap_subsystems();
        assert_eq!((t.dim_a, t.dim_b), (3, 2));
        assert_eq!(t.matrix, ExactMatrix::outer(&product_basis_vector(3, 2, 1, 0), &product_basis_vector(3, 2, 1, 0)));
        let p = phi_plus_unnormalized();
        assert_eq!(p.swap_subsystems(), p);
    }

    #[test]
    fn product_state_birank() {
        let v = ket(2, 2, &[(0, 0, 1), (0, 1, 1), (1, 0, 1), (1, 1, 1)]);
        let s = BipartiteState::from_weighted_vectors(2, 2, &[(ratio(1, 1), v)], "").unwrap();
        assert_eq!(s.birank(), (1, 1));
    }

    #[test]
    fn projection_rejects_bad_lists() {
        let s = phi_plus_unnormalized();
        assert!(matches!(s.project_local_block(&[0, 2], &[0]), Err(Error::BoundsViolation(_))));
        assert!(matches!(s.project_local_block(&[0, 0], &[0]), Err(Error::BoundsViolation(_))));
        assert!(matches!(s.project_local_block(&[], &[0]), Err(Error::BoundsViolation(_))));
        assert_eq!(s.project_local_block(&[0, 1], &[0, 1]).unwrap().matrix, s.matrix);
    }

    #[test]
    fn rejects_non_psd() {
        let m = ExactMatrix::from_i64(&[&[1, 2], &[2, 1]]);
        assert_eq!(BipartiteState::new(1, 2, m, ""), Err(Error::NotPsd));
    }

    #[test]
    fn schmidt_rank_of_kets() {
        assert_eq!(schmidt_rank(&ket(3, 3, &[(0, 0, 1), (1, 1, 1), (2, 2, 1)]), 3, 3), 3);
        assert_eq!(schmidt_rank(&ket(3, 3, &[(0, 1, 1), (1, 2, 1)]), 3, 3), 2);
        assert_eq!(schmidt_rank(&ket(2, 2, &[(0, 0, 1), (0, 1, 1)]), 2, 2), 1);
    }
}
