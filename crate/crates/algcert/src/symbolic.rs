use std::collections::HashSet;

use locext_core::exactmat::{inner, range, BigRational, ExactVector, GaussianRational, Subspace};
use locext_core::qstates::{site_name, BipartiteState, NamedTerm};
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::AlgError;
use crate::poly::Polynomial;

/// `Ψ_ij = Σ_l x_l ⟨ij|e_l⟩` for a range basis `{e_l}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymbolicRangeMatrix {
    pub dims: (usize, usize),
    pub variables: Vec<String>,
    pub basis: Vec<ExactVector>,
    #[serde(skip)]
    entries: Vec<Polynomial>,
}

impl SymbolicRangeMatrix {
    /// Builds from a named basis. The basis must be real; orthogonality is
    /// checked only when requested.
    pub fn from_basis(
        dims: (usize, usize),
        named: &[(String, ExactVector)],
        require_orthogonal: bool,
    ) -> Result<Self, AlgError> {
        let (m, n) = dims;
        for (name, v) in named {
            if v.len() != m * n {
                return Err(AlgError::InvalidInput(format!("basis vector {name} has length {}", v.len())));
            }
            if v.iter().any(|z| !z.im.is_zero()) {
                return Err(AlgError::InvalidInput(format!("basis vector {name} is not real")));
            }
        }
        let names: HashSet<&String> = named.iter().map(|(s, _)| s).collect();
        if names.len() != named.len() {
            return Err(AlgError::InvalidInput("duplicate variable names".into()));
        }
        if require_orthogonal {
            for i in 0..named.len() {
                for j in i + 1..named.len() {
                    if !inner(&named[i].1, &named[j].1).is_zero() {
                        return Err(AlgError::NonOrthogonalBasis(named[i].0.clone(), named[j].0.clone()));
                    }
                }
            }
        }
        let mut out = Self {
            dims,
            variables: named.iter().map(|(s, _)| s.clone()).collect(),
            basis: named.iter().map(|(_, v)| v.clone()).collect(),
            entries: Vec::new(),
        };
        out.rebuild_entries();
        Ok(out)
    }

    pub fn from_terms(s: &BipartiteState, terms: &[NamedTerm], require_orthogonal: bool) -> Result<Self, AlgError> {
        let named: Vec<_> = terms.iter().map(|t| (t.name.clone(), t.vector.clone())).collect();
        let out = Self::from_basis((s.dim_a, s.dim_b), &named, require_orthogonal)?;
        out.check_spans_range(s)?;
        Ok(out)
    }

    fn rebuild_entries(&mut self) {
        let nv = self.basis.len();
        self.entries = (0..self.dims.0 * self.dims.1)
            .map(|idx| {
                let mut p = Polynomial::zero(nv);
                for (l, e) in self.basis.iter().enumerate() {
                    if !e[idx].is_zero() {
                        p = p.add(&Polynomial::var(nv, l).scale(&e[idx].re));
                    }
                }
                p
            })
            .collect();
    }

    /// Restores the entry table after deserialization.
    pub fn restored(mut self) -> Self {
        self.rebuild_entries();
        self
    }

    pub fn nvars(&self) -> usize {
        self.variables.len()
    }

    pub fn entry(&self, i: usize, j: usize) -> &Polynomial {
        &self.entries[i * self.dims.1 + j]
    }

    pub fn variable_index(&self, name: &str) -> Option<usize> {
        self.variables.iter().position(|v| v == name)
    }

    /// Basis vectors lie in `R(s)` and are as many as its rank.
    pub fn check_spans_range(&self, s: &BipartiteState) -> Result<(), AlgError> {
        if (s.dim_a, s.dim_b) != self.dims {
            return Err(AlgError::InvalidInput("dimension mismatch between state and basis".into()));
        }
        let r = range(&s.matrix);
        let mine = Subspace::span(s.dim(), &self.basis)?;
        if mine.dim() != self.basis.len() || mine != r {
            return Err(AlgError::InvalidInput("basis does not span the range of the state".into()));
        }
        Ok(())
    }

    /// Coefficients of the linear form `⟨w|ψ(x)⟩`.
    pub fn overlap(&self, w: &[GaussianRational]) -> Vec<GaussianRational> {
        self.basis.iter().map(|e| inner(w, e)).collect()
    }

    /// Matrix values at a rational point.
    pub fn evaluate(&self, point: &[BigRational]) -> Vec<Vec<BigRational>> {
        (0..self.dims.0).map(|i| (0..self.dims.1).map(|j| self.entry(i, j).eval(point)).collect()).collect()
    }

    /// `k × k` minor on the given rows and columns.
    pub fn minor(&self, rows: &[usize], cols: &[usize]) -> Polynomial {
        determinant(self, rows, cols)
    }

    /// Text rendering with `0` for empty entries.
    pub fn render(&self) -> String {
        let cells: Vec<Vec<String>> = (0..self.dims.0)
            .map(|i| (0..self.dims.1).map(|j| self.entry(i, j).display(&self.variables).to_string()).collect())
            .collect();
        let width = cells.iter().flatten().map(|c| c.chars().count()).max().unwrap_or(1);
        cells
            .iter()
            .map(|r| r.iter().map(|c| format!("{c:>width$}")).collect::<Vec<_>>().join("  "))
            .collect::<Vec<_>>()
            .join("\n")
    }
}

/// Symbolic range matrix over the canonical (reduced echelon) range basis;
/// each variable is named `psi{i}{j}` after the pivot site of its vector.
/// For grid states whose edges have disjoint supports this recovers the edges.
pub fn range_coordinate_matrix(s: &BipartiteState, require_orthogonal: bool) -> Result<SymbolicRangeMatrix, AlgError> {
    let r = range(&s.matrix);
    let named: Vec<(String, ExactVector)> =
        r.basis().iter().map(|v| (site_name(v, s.dim_b), v.clone())).collect();
    SymbolicRangeMatrix::from_basis((s.dim_a, s.dim_b), &named, require_orthogonal)
}

fn determinant(m: &SymbolicRangeMatrix, rows: &[usize], cols: &[usize]) -> Polynomial {
    let nv = m.nvars();
    if rows.is_empty() {
        return Polynomial::constant(nv, BigRational::from_integer(1.into()));
    }
    let r = rows[0];
    let mut acc = Polynomial::zero(nv);
    for (k, &c) in cols.iter().enumerate() {
        let e = m.entry(r, c);
        if e.is_zero() {
            continue;
        }
        let rest_cols: Vec<usize> = cols.iter().enumerate().filter(|&(t, _)| t != k).map(|(_, &c)| c).collect();
        let sub = determinant(m, &rows[1..], &rest_cols);
        if sub.is_zero() {
            continue;
        }
        let term = e.mul(&sub);
        acc = if k % 2 == 0 { acc.add(&term) } else { acc.sub(&term) };
    }
    acc
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// `k × k` minors with bookkeeping of what was dropped.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinorIdeal {
    pub k: usize,
    /// `C(m,k)·C(n,k)`
    pub total: usize,
    pub zero: usize,
    pub excluded: usize,
    pub duplicates: usize,
    pub generators: Vec<Polynomial>,
}

/// All `k × k` minors, streamed. Minors that vanish identically or contain an
/// excluded variable are dropped, and the rest are deduplicated up to scaling.
pub fn minor_ideal(m: &SymbolicRangeMatrix, k: usize, exclude_vars: &[String]) -> Result<MinorIdeal, AlgError> {
    let (rows, cols) = m.dims;
    if k == 0 || k > rows.min(cols) {
        return Err(AlgError::InvalidInput(format!("minor size {k} for a {rows}×{cols} matrix")));
    }
    let excluded_idx: Vec<usize> = exclude_vars
        .iter()
        .map(|v| m.variable_index(v).ok_or_else(|| AlgError::InvalidInput(format!("unknown variable {v}"))))
        .collect::<Result<_, _>>()?;
    let row_sets = combinations(rows, k);
    let col_sets = combinations(cols, k);
    let mut seen = HashSet::new();
    let mut out = MinorIdeal {
        k,
        total: row_sets.len() * col_sets.len(),
        zero: 0,
        excluded: 0,
        duplicates: 0,
        generators: Vec::new(),
    };
    for rs in &row_sets {
        for cs in &col_sets {
            let p = determinant(m, rs, cs);
            if p.is_zero() {
                out.zero += 1;
                continue;
            }
            if p.support_variables().iter().any(|v| excluded_idx.contains(v)) {
                out.excluded += 1;
                continue;
            }
            if seen.insert(p.monic()) {
                out.generators.push(p);
            } else {
                out.duplicates += 1;
            }
        }
    }
    Ok(out)
}
