use nalgebra::{Complex, DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::NumError;

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;

/// Hermitian matrix with real normal diagonal and complex normal
/// off-diagonal entries (independent real and imaginary parts).
pub fn random_hermitian(n: usize, seed: u64) -> CMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_hermitian_with(n, &mut rng)
}

pub(crate) fn random_hermitian_with(n: usize, rng: &mut ChaCha8Rng) -> CMatrix {
    let mut m = CMatrix::zeros(n, n);
    for i in 0..n {
        let d: f64 = StandardNormal.sample(rng);
        m[(i, i)] = C64::new(d, 0.0);
        for j in i + 1..n {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            m[(i, j)] = C64::new(re, im);
            m[(j, i)] = C64::new(re, -im);
        }
    }
    m
}

/// `(M + M†)/2`
pub fn symmetrize(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

pub fn hermiticity_residual(m: &CMatrix) -> f64 {
    (m - m.adjoint()).norm()
}

/// Eigenvalues in ascending order with eigenvectors as matching columns.
#[derive(Clone, Debug)]
pub struct Eigen {
    pub values: DVector<f64>,
    pub vectors: CMatrix,
}

const MAX_SWEEPS: usize = 100;

/// Cyclic Jacobi for Hermitian matrices.
pub fn eig_hermitian(m: &CMatrix, tol: f64) -> Result<Eigen, NumError> {
    let n = m.nrows();
    if n != m.ncols() {
        return Err(NumError::InvalidInput(format!("{}×{} matrix is not square", n, m.ncols())));
    }
    let scale = m.norm();
    if hermiticity_residual(m) > 1e-12 * scale.max(1.0) {
        return Err(NumError::InvalidInput("matrix is not Hermitian".into()));
    }
    let mut a = symmetrize(m);
    let mut v = CMatrix::identity(n, n);
    let target = (tol * scale).powi(2) * 1e-4;
    let mut off = off_diagonal_sqr(&a);
    let mut sweeps = 0;
    while off > target && off > f64::MIN_POSITIVE {
        if sweeps == MAX_SWEEPS {
            return Err(NumError::ConvergenceFailure { iterations: sweeps, residual: off.sqrt() });
        }
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
        sweeps += 1;
        off = off_diagonal_sqr(&a);
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let values = DVector::from_iterator(n, order.iter().map(|&i| a[(i, i)].re));
    let vectors = CMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    Ok(Eigen { values, vectors })
}

fn off_diagonal_sqr(a: &CMatrix) -> f64 {
    let n = a.nrows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s
}

/// Zeroes `a[p][q]`: a phase on column/row `q` makes it real, then a real
/// Givens rotation finishes.
fn rotate(a: &mut CMatrix, v: &mut CMatrix, p: usize, q: usize) {
    let n = a.nrows();
    let apq = a[(p, q)];
    let r = apq.norm();
    if r == 0.0 {
        return;
    }
    let e = apq / r;
    let ec = e.conj();
    for k in 0..n {
        a[(k, q)] *= ec;
        v[(k, q)] *= ec;
    }
    for k in 0..n {
        a[(q, k)] *= e;
    }
    let theta = (a[(q, q)].re - a[(p, p)].re) / (2.0 * r);
    let t = if theta == 0.0 { 1.0 } else { theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt()) };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    for k in 0..n {
        let (akp, akq) = (a[(k, p)], a[(k, q)]);
        a[(k, p)] = akp * c - akq * s;
        a[(k, q)] = akp * s + akq * c;
        let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
        v[(k, p)] = vkp * c - vkq * s;
        v[(k, q)] = vkp * s + vkq * c;
    }
    for k in 0..n {
        let (apk, aqk) = (a[(p, k)], a[(q, k)]);
        a[(p, k)] = apk * c - aqk * s;
        a[(q, k)] = apk * s + aqk * c;
    }
    a[(p, q)] = C64::new(0.0, 0.0);
    a[(q, p)] = C64::new(0.0, 0.0);
    a[(p, p)].im = 0.0;
    a[(q, q)].im = 0.0;
}
