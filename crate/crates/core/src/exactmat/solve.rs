use num_traits::{One, Zero};

use super::matrix::{ExactMatrix, ExactVector};
use super::scalar::GaussianRational;
use super::subspace::{rref_in_place, Subspace};
use crate::error::Error;

/// Inverse of a square nonsingular matrix by Gauss–Jordan on `[A | I]`.
pub fn inverse(a: &ExactMatrix) -> Result<ExactMatrix, Error> {
    let n = a.rows();
    if !a.is_square() {
        return Err(Error::DimensionMismatch("inverse of a non-square matrix".into()));
    }
    let mut rows: Vec<ExactVector> = (0..n)
        .map(|i| {
            let mut r = a.row(i).to_vec();
            r.extend((0..n).map(|j| if i == j { GaussianRational::one() } else { GaussianRational::zero() }));
            r
        })
        .collect();
    let pivots = rref_in_place(&mut rows, 2 * n);
    if pivots.len() < n || pivots[n - 1] != n - 1 {
        return Err(Error::Singular);
    }
    Ok(ExactMatrix::from_fn(n, n, |i, j| rows[i][n + j].clone()))
}

/// Orthogonal projector onto `S`: `V (V†V)⁻¹ V†` with the basis as columns of `V`.
pub fn orth_projector(s: &Subspace) -> ExactMatrix {
    let n = s.ambient_dim();
    if s.dim() == 0 {
        let mut z = ExactMatrix::zeros(n, n);
        z = z.with_hermitian_check().expect("zero matrix is Hermitian");
        return z;
    }
    let v = ExactMatrix::from_columns(n, s.basis());
    let vh = v.adjoint();
    let gram = vh.mul(&v).expect("shapes agree");
    let g_inv = inverse(&gram).expect("basis is independent");
    let p = v.mul(&g_inv).and_then(|x| x.mul(&vh)).expect("shapes agree");
    p.with_hermitian_check().expect("orthogonal projector is Hermitian")
}

/// Minimal-norm solution of `A x = b`, i.e. the action of the pseudoinverse.
///
/// Solves `A A† y = b` (consistent iff `b ∈ R(A)`) and returns `x = A† y`,
/// which lies in `R(A†)` and does not depend on the particular `y`.
pub fn solve_on_range(a: &ExactMatrix, b: &[GaussianRational]) -> Result<ExactVector, Error> {
    let xs = solve_on_range_many(a, &[b.to_vec()])?;
    Ok(xs.into_iter().next().expect("one right-hand side"))
}

/// `solve_on_range` for several right-hand sides sharing one elimination.
pub fn solve_on_range_many(a: &ExactMatrix, bs: &[ExactVector]) -> Result<Vec<ExactVector>, Error> {
    let m = a.rows();
    if let Some(b) = bs.iter().find(|b| b.len() != m) {
        return Err(Error::DimensionMismatch(format!(
            "right-hand side of length {} for {} rows",
            b.len(),
            m
        )));
    }
    let ah = a.adjoint();
    let aah = if a.hermitian_hint() || a.is_hermitian() {
        // for Hermitian A, solving A y = b with b ∈ R(A) and projecting gives the same x
        None
    } else {
        Some(a.mul(&ah)?)
    };
    let sys = aah.as_ref().unwrap_or(a);
    let k = bs.len();
    let mut rows: Vec<ExactVector> = (0..m)
        .map(|i| {
            let mut r = sys.row(i).to_vec();
            r.extend(bs.iter().map(|b| b[i].clone()));
            r
        })
        .collect();
    let pivots = rref_in_place(&mut rows, m + k);
    if pivots.iter().any(|&p| p >= m) {
        return Err(Error::RangeViolation("right-hand side is not in the range".into()));
    }
    let kernel_projector = match aah {
        Some(_) => None,
        None => {
            let (_, kernel) = super::subspace::rank_and_kernel(a);
            (kernel.dim() > 0).then(|| orth_projector(&kernel))
        }
    };
    let mut out = Vec::with_capacity(k);
    for c in 0..k {
        let mut y = vec![GaussianRational::zero(); m];
        for (row, &p) in rows.iter().zip(&pivots) {
            y[p] = row[m + c].clone();
        }
        let x = match aah {
            Some(_) => ah.mul_vec(&y)?,
            // Hermitian A: y solves A y = b; dropping its ker A component
            // leaves the solution inside R(A) = ker(A)^⊥
            None => match &kernel_projector {
                Some(pk) => {
                    let ky = pk.mul_vec(&y)?;
                    y.iter().zip(&ky).map(|(u, v)| u - v).collect()
                }
                None => y,
            },
        };
        out.push(x);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmat::matrix::basis_vector;
    use crate::exactmat::subspace::{range, rank_and_kernel};
    use proptest::prelude::*;

    fn g(v: i64) -> GaussianRational {
        GaussianRational::from_int(v)
    }

    #[test]
    fn projector_examples() {
        let s = Subspace::span(2, &[basis_vector(2, 0)]).unwrap();
        assert_eq!(orth_projector(&s), ExactMatrix::from_i64(&[&[1, 0], &[0, 0]]));
        let s = Subspace::span(2, &[vec![g(1), g(1)]]).unwrap();
        let half = GaussianRational::from_ratio(1, 2);
        assert_eq!(orth_projector(&s), ExactMatrix::from_fn(2, 2, |_, _| half.clone()));
    }

    #[test]
    fn solve_examples() {
        let b = vec![g(3), g(-1)];
        assert_eq!(solve_on_range(&ExactMatrix::identity(2), &b).unwrap(), b);
        let d = ExactMatrix::from_i64(&[&[1, 0], &[0, 0]]);
        assert_eq!(solve_on_range(&d, &[g(2), g(0)]).unwrap(), vec![g(2), g(0)]);
        assert!(matches!(solve_on_range(&d, &[g(0), g(1)]), Err(Error::RangeViolation(_))));
    }

    #[test]
    fn minimal_norm_for_rectangular() {
        // A = [1 1], b = 2: minimal-norm solution is (1,1)
        let a = ExactMatrix::from_i64(&[&[1, 1]]);
        assert_eq!(solve_on_range(&a, &[g(2)]).unwrap(), vec![g(1), g(1)]);
    }

    fn arb_matrix(r: usize, c: usize) -> impl Strategy<Value = ExactMatrix> {
        prop::collection::vec((-2i64..=2, -1i64..=1), r * c).prop_map(move |e| {
            ExactMatrix::from_fn(r, c, |i, j| GaussianRational::from_parts((e[i * c + j].0, 1), (e[i * c + j].1, 1)))
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn projectors_are_idempotent_and_complementary(m in arb_matrix(3, 4)) {
            let (r, ker) = rank_and_kernel(&m);
            let row_space = range(&m.adjoint());
            prop_assert_eq!(row_space.dim(), r);
            let pk = orth_projector(&ker);
            let pr = orth_projector(&row_space);
            prop_assert_eq!(pk.add(&pr).unwrap(), ExactMatrix::identity(4));
            prop_assert_eq!(pr.mul(&pr).unwrap(), pr.clone());
            prop_assert_eq!(pr.adjoint(), pr.clone());
            prop_assert_eq!(pr.trace(), GaussianRational::from_int(r as i64));
            for b in row_space.basis() {
                prop_assert_eq!(&pr.mul_vec(b).unwrap(), b);
            }
        }

        #[test]
        fn solve_reproduces_rhs(m in arb_matrix(4, 3), coeffs in prop::collection::vec(-3i64..=3, 3)) {
            let x0: ExactVector = coeffs.into_iter().map(g).collect();
            let b = m.mul_vec(&x0).unwrap();
            let x = solve_on_range(&m, &b).unwrap();
            prop_assert_eq!(m.mul_vec(&x).unwrap(), b);
            prop_assert!(range(&m.adjoint()).contains(&x));
        }

        #[test]
        fn hermitian_solve_is_pseudoinverse(m in arb_matrix(3, 3), coeffs in prop::collection::vec(-3i64..=3, 3)) {
            let h = m.mul(&m.adjoint()).unwrap();
            let x0: ExactVector = coeffs.into_iter().map(g).collect();
            let b = h.mul_vec(&x0).unwrap();
            let x = solve_on_range(&h, &b).unwrap();
            prop_assert_eq!(h.mul_vec(&x).unwrap(), b);
            let (_, ker) = rank_and_kernel(&h);
            for k in ker.basis() {
                prop_assert!(crate::exactmat::matrix::inner(k, &x).is_zero());
            }
        }
    }
}
