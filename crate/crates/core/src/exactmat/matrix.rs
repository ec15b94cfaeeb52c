use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::scalar::GaussianRational;
use crate::error::Error;

pub type ExactVector = Vec<GaussianRational>;

/// Dense row-major matrix over the Gaussian rationals.
#[derive(Clone)]
pub struct ExactMatrix {
    rows: usize,
    cols: usize,
    data: Vec<GaussianRational>,
    hermitian_hint: bool,
}

impl PartialEq for ExactMatrix {
    fn eq(&self, o: &Self) -> bool {
        self.rows == o.rows && self.cols == o.cols && self.data == o.data
    }
}

impl Eq for ExactMatrix {}

impl ExactMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![GaussianRational::zero(); rows * cols], hermitian_hint: false }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = GaussianRational::one();
        }
        m.hermitian_hint = true;
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> GaussianRational) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data, hermitian_hint: false }
    }

    pub fn from_rows(rows: Vec<Vec<GaussianRational>>) -> Result<Self, Error> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Ok(Self { rows: r, cols: c, data: rows.into_iter().flatten().collect(), hermitian_hint: false })
    }

    /// Convenience constructor for small integer test matrices.
    pub fn from_i64(rows: &[&[i64]]) -> Self {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&v| GaussianRational::from_int(v)).collect())
                .collect(),
        )
        .expect("rectangular input")
    }

    pub fn diagonal(entries: &[GaussianRational]) -> Self {
        let n = entries.len();
        let mut m = Self::zeros(n, n);
        for (i, e) in entries.iter().enumerate() {
            m.data[i * n + i] = e.clone();
        }
        m.hermitian_hint = entries.iter().all(|e| e.is_real());
        m
    }

    pub fn column_vector(v: &[GaussianRational]) -> Self {
        Self { rows: v.len(), cols: 1, data: v.to_vec(), hermitian_hint: false }
    }

    /// `|u⟩⟨v|`
    pub fn outer(u: &[GaussianRational], v: &[GaussianRational]) -> Self {
        Self::from_fn(u.len(), v.len(), |i, j| &u[i] * &v[j].conj())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn hermitian_hint(&self) -> bool {
        self.hermitian_hint
    }

    /// Sets the Hermitian flag after verifying the property exactly.
    pub fn with_hermitian_check(mut self) -> Result<Self, Error> {
        if !self.is_hermitian() {
            return Err(Error::NotHermitian);
        }
        self.hermitian_hint = true;
        Ok(self)
    }

    pub fn get(&self, i: usize, j: usize) -> &GaussianRational {
        &self.data[i * self.cols + j]
    }

    pub(crate) fn set(&mut self, i: usize, j: usize, v: GaussianRational) {
        self.data[i * self.cols + j] = v;
        self.hermitian_hint = false;
    }

    pub(crate) fn entry_mut(&mut self, i: usize, j: usize) -> &mut GaussianRational {
        self.hermitian_hint = false;
        &mut self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[GaussianRational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vectors(&self) -> Vec<ExactVector> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn column(&self, j: usize) -> ExactVector {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn column_vectors(&self) -> Vec<ExactVector> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn from_columns(rows: usize, columns: &[ExactVector]) -> Self {
        Self::from_fn(rows, columns.len(), |i, j| columns[j][i].clone())
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn is_real(&self) -> bool {
        self.data.iter().all(GaussianRational::is_real)
    }

    pub fn is_hermitian(&self) -> bool {
        if !self.is_square() {
            return false;
        }
        for i in 0..self.rows {
            if !self.get(i, i).is_real() {
                return false;
            }
            for j in i + 1..self.cols {
                if *self.get(i, j) != self.get(j, i).conj() {
                    return false;
                }
            }
        }
        true
    }

    pub fn adjoint(&self) -> Self {
        let mut m = Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).conj());
        m.hermitian_hint = self.hermitian_hint;
        m
    }

    pub fn transpose(&self) -> Self {
        let mut m = Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone());
        m.hermitian_hint = self.hermitian_hint;
        m
    }

    pub fn conj(&self) -> Self {
        let mut m = self.clone();
        m.data.iter_mut().for_each(|z| *z = z.conj());
        m
    }

    pub fn trace(&self) -> GaussianRational {
        let mut t = GaussianRational::zero();
        for i in 0..self.rows.min(self.cols) {
            t += self.get(i, i);
        }
        t
    }

    pub fn scale(&self, s: &GaussianRational) -> Self {
        let mut m = self.clone();
        m.data.iter_mut().for_each(|z| *z = &*z * s);
        m.hermitian_hint = self.hermitian_hint && s.is_real();
        m
    }

    pub fn scale_rational(&self, r: &BigRational) -> Self {
        let mut m = self.clone();
        m.data.iter_mut().for_each(|z| *z = z.scale(r));
        m
    }

    pub fn add(&self, o: &Self) -> Result<Self, Error> {
        self.check_same_shape(o)?;
        let data = self.data.iter().zip(&o.data).map(|(a, b)| a + b).collect();
        Ok(Self { rows: self.rows, cols: self.cols, data, hermitian_hint: self.hermitian_hint && o.hermitian_hint })
    }

    pub fn sub(&self, o: &Self) -> Result<Self, Error> {
        self.check_same_shape(o)?;
        let data = self.data.iter().zip(&o.data).map(|(a, b)| a - b).collect();
        Ok(Self { rows: self.rows, cols: self.cols, data, hermitian_hint: self.hermitian_hint && o.hermitian_hint })
    }

    fn check_same_shape(&self, o: &Self) -> Result<(), Error> {
        if self.rows != o.rows || self.cols != o.cols {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, o.rows, o.cols
            )));
        }
        Ok(())
    }

    pub fn mul(&self, o: &Self) -> Result<Self, Error> {
        if self.cols != o.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, o.rows, o.cols
            )));
        }
        let mut out = Self::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let b = o.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let prod = a * b;
                    out.data[i * o.cols + j] += &prod;
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[GaussianRational]) -> Result<ExactVector, Error> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} for {} columns",
                v.len(),
                self.cols
            )));
        }
        let mut out = vec![GaussianRational::zero(); self.rows];
        for (i, o) in out.iter_mut().enumerate() {
            for (a, b) in self.row(i).iter().zip(v) {
                if !a.is_zero() && !b.is_zero() {
                    *o += &(a * b);
                }
            }
        }
        Ok(out)
    }

    /// `⟨u|M|v⟩`
    pub fn sandwich(&self, u: &[GaussianRational], v: &[GaussianRational]) -> Result<GaussianRational, Error> {
        let mv = self.mul_vec(v)?;
        Ok(inner(u, &mv))
    }

    pub fn kron(&self, o: &Self) -> Self {
        Self::from_fn(self.rows * o.rows, self.cols * o.cols, |i, j| {
            self.get(i / o.rows, j / o.cols) * o.get(i % o.rows, j % o.cols)
        })
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        Self::from_fn(rows.len(), cols.len(), |i, j| self.get(rows[i], cols[j]).clone())
    }

    /// Block-diagonal embedding `self ⊕ other`.
    pub fn direct_sum(&self, other: &Self) -> Self {
        let (r, c) = (self.rows + other.rows, self.cols + other.cols);
        Self::from_fn(r, c, |i, j| {
            if i < self.rows && j < self.cols {
                self.get(i, j).clone()
            } else if i >= self.rows && j >= self.cols {
                other.get(i - self.rows, j - self.cols).clone()
            } else {
                GaussianRational::zero()
            }
        })
    }

    pub fn entries(&self) -> &[GaussianRational] {
        &self.data
    }

    pub fn to_f64_rows(&self) -> Vec<Vec<(f64, f64)>> {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(GaussianRational::to_f64_pair).collect())
            .collect()
    }
}

pub fn inner(u: &[GaussianRational], v: &[GaussianRational]) -> GaussianRational {
    let mut s = GaussianRational::zero();
    for (a, b) in u.iter().zip(v) {
        if !a.is_zero() && !b.is_zero() {
            s += &(&a.conj() * b);
        }
    }
    s
}

pub fn vec_is_zero(v: &[GaussianRational]) -> bool {
    v.iter().all(Zero::is_zero)
}

pub fn vec_scale(v: &[GaussianRational], s: &GaussianRational) -> ExactVector {
    v.iter().map(|z| z * s).collect()
}

pub fn vec_add(u: &[GaussianRational], v: &[GaussianRational]) -> ExactVector {
    u.iter().zip(v).map(|(a, b)| a + b).collect()
}

pub fn vec_sub(u: &[GaussianRational], v: &[GaussianRational]) -> ExactVector {
    u.iter().zip(v).map(|(a, b)| a - b).collect()
}

pub fn basis_vector(dim: usize, i: usize) -> ExactVector {
    let mut v = vec![GaussianRational::zero(); dim];
    v[i] = GaussianRational::one();
    v
}

pub fn kron_vec(u: &[GaussianRational], v: &[GaussianRational]) -> ExactVector {
    let mut out = Vec::with_capacity(u.len() * v.len());
    for a in u {
        for b in v {
            out.push(a * b);
        }
    }
    out
}

impl fmt::Debug for ExactMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ExactMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|z| z.to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

#[derive(Serialize, Deserialize)]
struct MatrixRepr {
    rows: usize,
    cols: usize,
    entries: Vec<Vec<GaussianRational>>,
}

impl Serialize for ExactMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        MatrixRepr { rows: self.rows, cols: self.cols, entries: self.row_vectors() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for ExactMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let repr = MatrixRepr::deserialize(d)?;
        if repr.entries.len() != repr.rows || repr.entries.iter().any(|r| r.len() != repr.cols) {
            return Err(serde::de::Error::custom("matrix entries do not match rows/cols"));
        }
        let mut m = ExactMatrix::from_rows(repr.entries).map_err(serde::de::Error::custom)?;
        // an empty entries list loses the column count
        m.rows = repr.rows;
        m.cols = repr.cols;
        m.hermitian_hint = m.is_hermitian();
        Ok(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kron_and_mul_compose() {
        let a = ExactMatrix::from_i64(&[&[1, 2], &[3, 4]]);
        let b = ExactMatrix::from_i64(&[&[0, 1], &[1, 0]]);
        let i = ExactMatrix::identity(2);
        // (A⊗B)(I⊗B) = A⊗B²
        let lhs = a.kron(&b).mul(&i.kron(&b)).unwrap();
        let rhs = a.kron(&b.mul(&b).unwrap());
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn json_shape() {
        let m = ExactMatrix::from_rows(vec![vec![
            GaussianRational::from_ratio(1, 2),
            GaussianRational::from_parts((1, 3), (-1, 2)),
        ]])
        .unwrap();
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(s, r#"{"rows":1,"cols":2,"entries":[["1/2","1/3-1/2 i"]]}"#);
        let back: ExactMatrix = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn hermitian_detection() {
        let h = ExactMatrix::from_rows(vec![
            vec![GaussianRational::from_int(1), GaussianRational::from_parts((0, 1), (1, 1))],
            vec![GaussianRational::from_parts((0, 1), (-1, 1)), GaussianRational::from_int(2)],
        ])
        .unwrap();
        assert!(h.is_hermitian());
        assert!(!h.transpose().mul(&ExactMatrix::from_i64(&[&[1, 1], &[0, 1]])).unwrap().is_hermitian());
        assert!(h.clone().with_hermitian_check().unwrap().hermitian_hint());
    }
}
