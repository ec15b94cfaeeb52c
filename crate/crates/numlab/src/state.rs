use locext_core::exactmat::{rational_from_f64, ratio, ExactMatrix, GaussianRational};
use locext_core::qstates::BipartiteState;
use serde::{Deserialize, Serialize};

use crate::error::NumError;
use crate::hermitian::{eig_hermitian, symmetrize, CMatrix, C64};

/// Floating-point bipartite state on `ℂ^m ⊗ ℂ^n` with unit trace.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FloatState {
    pub dim_a: usize,
    pub dim_b: usize,
    #[serde(with = "complex_rows")]
    pub matrix: CMatrix,
    pub birank_target: (usize, usize),
    /// Gauss–Newton iterations spent; 0 for cast states.
    pub iterations: usize,
    /// Largest absolute entry of the final residual vector.
    pub residual: f64,
}

impl FloatState {
    /// Symmetrizes and normalizes the trace.
    pub fn new(dim_a: usize, dim_b: usize, matrix: CMatrix, birank_target: (usize, usize)) -> Result<Self, NumError> {
        let d = dim_a * dim_b;
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(NumError::InvalidInput(format!("expected a {d}×{d} matrix for {dim_a}×{dim_b}")));
        }
        let matrix = normalize(&symmetrize(&matrix))?;
        Ok(Self { dim_a, dim_b, matrix, birank_target, iterations: 0, residual: 0.0 })
    }

    /// Exact state cast to floats; the birank target is the exact birank.
    pub fn from_exact(s: &BipartiteState) -> Result<Self, NumError> {
        let rows = s.matrix.to_f64_rows();
        let d = s.dim();
        let m = CMatrix::from_fn(d, d, |i, j| C64::new(rows[i][j].0, rows[i][j].1));
        Self::new(s.dim_a, s.dim_b, m, s.birank())
    }

    pub fn dim(&self) -> usize {
        self.dim_a * self.dim_b
    }

    pub fn partial_transpose_b(&self) -> CMatrix {
        partial_transpose_b(&self.matrix, self.dim_a, self.dim_b)
    }

    pub fn partial_transpose_a(&self) -> CMatrix {
        partial_transpose_a(&self.matrix, self.dim_a, self.dim_b)
    }

    /// Truncates to the `p` largest eigenpairs, rounds every entry to a
    /// dyadic rational with `bits` fractional bits and admixes `shift·𝟙`.
    pub fn to_exact(&self, bits: u32, shift: (i64, i64)) -> Result<BipartiteState, NumError> {
        let e = eig_hermitian(&self.matrix, 1e-12)?;
        let d = self.dim();
        let keep = self.birank_target.0.min(d);
        let mut t = CMatrix::zeros(d, d);
        for k in d - keep..d {
            let v = e.vectors.column(k);
            t += v * v.adjoint() * C64::new(e.values[k], 0.0);
        }
        let shift = GaussianRational::real(ratio(shift.0, shift.1));
        let round = |x: f64| rational_from_f64(x, bits);
        let m = ExactMatrix::from_fn(d, d, |i, j| {
            // fill from the upper triangle so the result is exactly Hermitian
            let z = if i <= j { t[(i, j)] } else { t[(j, i)].conj() };
            let mut g = GaussianRational::new(round(z.re), if i == j { ratio(0, 1) } else { round(z.im) });
            if i == j {
                g += &shift;
            }
            g
        });
        Ok(BipartiteState::new(self.dim_a, self.dim_b, m, "rounded")?)
    }
}

fn normalize(m: &CMatrix) -> Result<CMatrix, NumError> {
    let tr = m.trace().re;
    if !(tr.is_finite() && tr > 0.0) {
        return Err(NumError::InvalidInput(format!("trace {tr} cannot be normalized")));
    }
    Ok(m.scale(1.0 / tr))
}

/// `⟨ij|X^{T_B}|kl⟩ = ⟨il|X|kj⟩`
pub fn partial_transpose_b(x: &CMatrix, m: usize, n: usize) -> CMatrix {
    let d = m * n;
    CMatrix::from_fn(d, d, |r, c| {
        let (i, j, k, l) = (r / n, r % n, c / n, c % n);
        x[(i * n + l, k * n + j)]
    })
}

/// `⟨ij|X^{T_A}|kl⟩ = ⟨kj|X|il⟩`
pub fn partial_transpose_a(x: &CMatrix, m: usize, n: usize) -> CMatrix {
    let d = m * n;
    CMatrix::from_fn(d, d, |r, c| {
        let (i, j, k, l) = (r / n, r % n, c / n, c % n);
        x[(k * n + j, i * n + l)]
    })
}

mod complex_rows {
    use super::{CMatrix, C64};
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(m: &CMatrix, s: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<Vec<[f64; 2]>> =
            (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect()).collect();
        rows.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<CMatrix, D::Error> {
        let rows = Vec::<Vec<[f64; 2]>>::deserialize(d)?;
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(serde::de::Error::custom("matrix must be square"));
        }
        Ok(CMatrix::from_fn(n, n, |i, j| C64::new(rows[i][j][0], rows[i][j][1])))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use locext_core::qstates::{rho_3x3, Side};

    #[test]
    fn partial_transposes_match_exact() {
        let s = rho_3x3();
        let f = FloatState::from_exact(&s).unwrap();
        let tr = s.trace().to_f64_pair().0;
        for (side, got) in [(Side::A, f.partial_transpose_a()), (Side::B, f.partial_transpose_b())] {
            let rows = s.partial_transpose(side).matrix.to_f64_rows();
            for i in 0..9 {
                for j in 0..9 {
                    assert!((got[(i, j)].re - rows[i][j].0 / tr).abs() < 1e-15);
                }
            }
        }
        assert!((f.matrix.trace().re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn json_round_trip() {
        let f = FloatState::from_exact(&rho_3x3()).unwrap();
        let back: FloatState = serde_json::from_str(&serde_json::to_string(&f).unwrap()).unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn rounding_with_shift_is_ppt() {
        let f = FloatState::from_exact(&rho_3x3()).unwrap();
        let back = f.to_exact(40, (1, 1 << 24)).unwrap();
        assert!(back.is_ppt());
    }
}
