use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::NumError;
use crate::hermitian::{eig_hermitian, random_hermitian_with, symmetrize, CMatrix, Eigen, C64};
use crate::state::{partial_transpose_b, FloatState};

/// Calibration defaults; none of them come with the method itself.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GnOptions {
    pub tol: f64,
    pub max_iter: usize,
    /// Perturbation size of the start point relative to `𝟙/mn`.
    pub start_epsilon: f64,
    pub max_halvings: usize,
}

impl Default for GnOptions {
    fn default() -> Self {
        Self { tol: 1e-9, max_iter: 200, start_epsilon: 0.1, max_halvings: 30 }
    }
}

/// `𝟙/mn + ε·H/(mn‖H‖)`: positive definite for `ε < 1`.
pub fn start_point(m: usize, n: usize, epsilon: f64, rng: &mut ChaCha8Rng) -> CMatrix {
    let d = m * n;
    let h = random_hermitian_with(d, rng);
    let spec = eig_hermitian(&h, 1e-12).map(|e| e.values.amax()).unwrap_or_else(|_| h.norm());
    let scale = if spec > 0.0 { epsilon / (d as f64 * spec) } else { 0.0 };
    CMatrix::identity(d, d).scale(1.0 / d as f64) + h.scale(scale)
}

struct Spectra {
    x: Eigen,
    pt: Eigen,
}

fn spectra(x: &CMatrix, m: usize, n: usize, tol: f64) -> Result<Spectra, NumError> {
    Ok(Spectra { x: eig_hermitian(x, tol)?, pt: eig_hermitian(&partial_transpose_b(x, m, n), tol)? })
}

/// The `mn−p` smallest eigenvalues of `X` followed by the `mn−q` smallest of `X^{T_B}`.
fn residual(s: &Spectra, zp: usize, zq: usize) -> DVector<f64> {
    DVector::from_iterator(zp + zq, s.x.values.iter().take(zp).chain(s.pt.values.iter().take(zq)).copied())
}

/// Coordinates of a Hermitian `d×d` matrix: diagonal, then `(Re, Im)` of
/// each upper entry.
fn n_params(d: usize) -> usize {
    d * d
}

/// `∂ Tr(G X)/∂x` for the real coordinates of `X`; complex unless `G` is Hermitian.
fn gradient_row(g: &CMatrix, re: &mut [f64], im: &mut [f64]) {
    let d = g.nrows();
    let i_unit = C64::new(0.0, 1.0);
    let mut k = 0;
    for i in 0..d {
        (re[k], im[k]) = (g[(i, i)].re, g[(i, i)].im);
        k += 1;
    }
    for i in 0..d {
        for j in i + 1..d {
            let sym = g[(j, i)] + g[(i, j)];
            let asym = i_unit * (g[(j, i)] - g[(i, j)]);
            (re[k], im[k]) = (sym.re, sym.im);
            (re[k + 1], im[k + 1]) = (asym.re, asym.im);
            k += 2;
        }
    }
}

fn apply_step(x: &CMatrix, delta: &DVector<f64>, alpha: f64) -> CMatrix {
    let d = x.nrows();
    let mut y = x.clone();
    let mut k = 0;
    for i in 0..d {
        y[(i, i)] += C64::new(alpha * delta[k], 0.0);
        k += 1;
    }
    for i in 0..d {
        for j in i + 1..d {
            let z = C64::new(alpha * delta[k], alpha * delta[k + 1]);
            y[(i, j)] += z;
            y[(j, i)] += z.conj();
            k += 2;
        }
    }
    let y = symmetrize(&y);
    let tr = y.trace().re;
    y.scale(1.0 / tr)
}

/// Rows of one zero cluster: the eigenvalue gradients first, then the real
/// and imaginary parts of `v_k† δX v_l` for `k < l`, which keep the cluster
/// from splitting into `±` pairs at the next step.
fn cluster_rows(vectors: &CMatrix, z: usize, transform: impl Fn(&CMatrix) -> CMatrix, out: &mut Vec<Vec<f64>>, np: usize) {
    let mut re = vec![0.0; np];
    let mut im = vec![0.0; np];
    for k in 0..z {
        let v = vectors.column(k);
        gradient_row(&transform(&(v * v.adjoint())), &mut re, &mut im);
        out.push(re.clone());
    }
    for k in 0..z {
        for l in k + 1..z {
            let g = vectors.column(l) * vectors.column(k).adjoint();
            gradient_row(&transform(&g), &mut re, &mut im);
            out.push(re.clone());
            out.push(im.clone());
        }
    }
}

/// Jacobian of the stacked residual (padded with zeros for the coupling
/// rows): gradients `v v†` for `X` and `(w w†)^{T_B}` for `X^{T_B}`.
fn linear_system(s: &Spectra, r: &DVector<f64>, zp: usize, zq: usize, m: usize, n: usize) -> (DMatrix<f64>, DVector<f64>) {
    let np = n_params(m * n);
    let mut rows = Vec::new();
    cluster_rows(&s.x.vectors, zp, |g| g.clone(), &mut rows, np);
    let split = rows.len();
    cluster_rows(&s.pt.vectors, zq, |g| partial_transpose_b(g, m, n), &mut rows, np);
    let mut rhs = DVector::zeros(rows.len());
    for k in 0..zp {
        rhs[k] = r[k];
    }
    for k in 0..zq {
        rhs[split + k] = r[zp + k];
    }
    let j = DMatrix::from_fn(rows.len(), np, |i, c| rows[i][c]);
    (j, rhs)
}

fn converged(s: &Spectra, r: &DVector<f64>, tol: f64) -> bool {
    r.amax() < tol && s.x.values[0] >= -tol && s.pt.values[0] >= -tol
}

/// Drives the unwanted eigenvalues of `X` and `X^{T_B}` to zero.
pub fn gauss_newton_birank(
    m: usize,
    n: usize,
    p: usize,
    q: usize,
    seed: u64,
    opts: &GnOptions,
) -> Result<FloatState, NumError> {
    let d = m * n;
    if m == 0 || n == 0 || !(1..=d).contains(&p) || !(1..=d).contains(&q) {
        return Err(NumError::InvalidInput(format!("need 1 ≤ p, q ≤ {d}, got ({p}, {q})")));
    }
    let (zp, zq) = (d - p, d - q);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x = start_point(m, n, opts.start_epsilon, &mut rng);
    let eig_tol = 1e-14;
    let mut s = spectra(&x, m, n, eig_tol)?;
    let mut r = residual(&s, zp, zq);
    for it in 0..opts.max_iter {
        if converged(&s, &r, opts.tol) {
            return finish(m, n, p, q, x, it, r.amax());
        }
        let (j, rhs) = linear_system(&s, &r, zp, zq, m, n);
        let delta = -j
            .svd(true, true)
            .solve(&rhs, 1e-14)
            .map_err(|e| NumError::InvalidInput(format!("least-squares step failed: {e}")))?;
        let norm0 = r.norm();
        let mut alpha = 1.0;
        let mut best = None;
        for _ in 0..=opts.max_halvings {
            let y = apply_step(&x, &delta, alpha);
            let sy = spectra(&y, m, n, eig_tol)?;
            let ry = residual(&sy, zp, zq);
            // negative parts of the kept spectrum count as residual too
            let kept = sy.x.values.as_slice()[zp..].iter().chain(&sy.pt.values.as_slice()[zq..]);
            let neg: f64 = kept.filter(|&&v| v < 0.0).map(|v| v * v).sum();
            let score = (ry.norm_squared() + neg).sqrt();
            if score < norm0 {
                best = Some((y, sy, ry));
                break;
            }
            alpha *= 0.5;
        }
        let Some((y, sy, ry)) = best else {
            return Err(NumError::ConvergenceFailure { iterations: it, residual: r.amax() });
        };
        x = y;
        s = sy;
        r = ry;
    }
    if converged(&s, &r, opts.tol) {
        return finish(m, n, p, q, x, opts.max_iter, r.amax());
    }
    Err(NumError::ConvergenceFailure { iterations: opts.max_iter, residual: r.amax() })
}

fn finish(m: usize, n: usize, p: usize, q: usize, x: CMatrix, iterations: usize, residual: f64) -> Result<FloatState, NumError> {
    let mut st = FloatState::new(m, n, x, (p, q))?;
    st.iterations = iterations;
    st.residual = residual;
    Ok(st)
}
