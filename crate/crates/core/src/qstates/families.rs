use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use super::grid::{grid_to_state, GridGraph};
use super::state::{ket, BipartiteState, Side};
use crate::error::Error;
use crate::exactmat::{basis_vector, inner, psd_check, ratio, ExactMatrix, ExactVector, GaussianRational};
use crate::extender::{lift_weighted, EdgeTerm, ExtensionStep, Pipeline};

/// One weighted pure term of a conic decomposition, with a symbolic name.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NamedTerm {
    pub name: String,
    #[serde(with = "crate::exactmat::rational_string")]
    pub weight: BigRational,
    pub vector: ExactVector,
}

impl NamedTerm {
    pub fn new(name: impl Into<String>, weight: BigRational, vector: ExactVector) -> Self {
        Self { name: name.into(), weight, vector }
    }
}

/// `Σ w |v⟩⟨v|`
pub fn terms_matrix(terms: &[NamedTerm], dim: usize) -> ExactMatrix {
    let mut m = ExactMatrix::zeros(dim, dim);
    for t in terms {
        m = m.add(&ExactMatrix::outer(&t.vector, &t.vector).scale_rational(&t.weight)).expect("same dimension");
    }
    m
}

/// Name `psi{i}{j}` after the first nonzero site of a vector.
pub fn site_name(v: &[GaussianRational], dim_b: usize) -> String {
    let idx = v.iter().position(|z| !z.is_zero()).unwrap_or(0);
    format!("psi{}{}", idx / dim_b, idx % dim_b)
}

fn w(n: i64) -> BigRational {
    ratio(n, 1)
}

/// Edges `e₀..e₄` of the 3×3 grid state with weights `(1,1,1,3,3)`.
pub fn rho_3x3_terms() -> Vec<NamedTerm> {
    let (m, n) = (3, 3);
    vec![
        NamedTerm::new("psi00", w(1), ket(m, n, &[(0, 0, 1), (1, 1, 1), (2, 2, 1)])),
        NamedTerm::new("psi01", w(1), ket(m, n, &[(0, 1, 1), (1, 2, 1)])),
        NamedTerm::new("psi10", w(1), ket(m, n, &[(1, 0, 1), (2, 1, -1)])),
        NamedTerm::new("psi02", w(3), ket(m, n, &[(0, 2, 1)])),
        NamedTerm::new("psi20", w(3), ket(m, n, &[(2, 0, 1)])),
    ]
}

pub fn rho_3x3_graph() -> GridGraph {
    GridGraph::empty(3, 3)
        .with_solid(&[(0, 0), (1, 1), (2, 2)], w(1))
        .and_then(|g| g.with_solid(&[(0, 1), (1, 2)], w(1)))
        .and_then(|g| g.with_dashed((1, 0), (2, 1), w(1)))
        .and_then(|g| g.with_solid(&[(0, 2)], w(3)))
        .and_then(|g| g.with_solid(&[(2, 0)], w(3)))
        .expect("fixed valid graph")
}

pub fn rho_3x3() -> BipartiteState {
    grid_to_state(&rho_3x3_graph(), "rho3x3").expect("grid states are PSD")
}

/// Terms `f₀..f₅` with weights `(1,2,1,1,1,1)` that sum to `(ρ³ˣ³)^{T_B}`.
pub fn rho_3x3_pt_terms() -> Vec<NamedTerm> {
    let (m, n) = (3, 3);
    vec![
        NamedTerm::new("f0", w(1), ket(m, n, &[(0, 2, 1), (1, 1, 1), (2, 0, -1)])),
        NamedTerm::new("f1", w(2), ket(m, n, &[(0, 2, 1), (2, 0, 1)])),
        NamedTerm::new("f2", w(1), ket(m, n, &[(0, 1, 1), (1, 0, 1)])),
        NamedTerm::new("f3", w(1), ket(m, n, &[(1, 2, 1), (2, 1, 1)])),
        NamedTerm::new("f4", w(1), ket(m, n, &[(0, 0, 1)])),
        NamedTerm::new("f5", w(1), ket(m, n, &[(2, 2, 1)])),
    ]
}

pub fn maximally_mixed(dim_a: usize, dim_b: usize) -> BipartiteState {
    BipartiteState::new(dim_a, dim_b, ExactMatrix::identity(dim_a * dim_b), format!("id{dim_a}x{dim_b}"))
        .expect("identity is PSD")
}

/// Weight used for each admixed product projector in the first pipeline step.
pub const ADMIXTURE_WEIGHT: i64 = 3;

/// The three recorded stages leading from `ρ³ˣ³` to the 4×5 state.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Rho4x5 {
    pub start: BipartiteState,
    pub pipeline: Pipeline,
    /// Stage 1 (4×3), stage 2 (4×4), final (4×5).
    pub stages: Vec<BipartiteState>,
    /// Orthogonal decomposition of the final state, obtained by lifting
    /// the core edges through every step.
    pub terms: Vec<NamedTerm>,
    /// Terms of every stage, in the same order as `stages`.
    pub stage_terms: Vec<Vec<NamedTerm>>,
    pub admixture_weight: i64,
}

impl Rho4x5 {
    pub fn final_state(&self) -> &BipartiteState {
        self.stages.last().expect("three stages")
    }

    pub fn stage2(&self) -> &BipartiteState {
        &self.stages[1]
    }
}

pub fn rho_4x5_pipeline() -> Pipeline {
    let e = basis_vector;
    let wt = w(ADMIXTURE_WEIGHT);
    Pipeline {
        steps: vec![
            ExtensionStep::DirectSum {
                side: Side::A,
                edge_terms: vec![
                    EdgeTerm { weight: wt.clone(), vector: e(3, 0) },
                    EdgeTerm { weight: wt, vector: e(3, 2) },
                ],
            },
            // χ = |20⟩⟨·| coupling A-index 3 on the new B direction 3
            ExtensionStep::ProductPair { side: Side::B, alpha: e(3, 0), beta: e(4, 2), gamma: e(4, 3) },
            // χ = |02⟩⟨·| coupling A-index 3 on the new B direction 4
            ExtensionStep::ProductPair { side: Side::B, alpha: e(4, 2), beta: e(4, 0), gamma: e(4, 3) },
        ],
    }
}

/// Runs the three-step pipeline and lifts the edge decomposition alongside.
pub fn rho_4x5() -> Result<Rho4x5, Error> {
    let start = rho_3x3();
    let pipeline = rho_4x5_pipeline();
    let stages = pipeline.replay(&start)?;
    let labels = ["rho4x3", "rho4x4", "rho4x5"];
    let stages: Vec<BipartiteState> = stages.into_iter().zip(labels).map(|(s, l)| s.with_label(l)).collect();

    let mut terms = rho_3x3_terms();
    let mut stage_terms = Vec::new();
    for (step, stage) in pipeline.steps.iter().zip(&stages) {
        let perp = stage.local_dim(step.side()) - 1;
        let weighted: Vec<_> = terms.iter().map(|t| (t.weight.clone(), t.vector.clone())).collect();
        let lift = lift_weighted(stage, step.side(), perp, &weighted)?;
        let mut next: Vec<NamedTerm> = terms
            .iter()
            .zip(&lift.lifted)
            .map(|(t, l)| NamedTerm::new(t.name.clone(), l.weight.clone(), l.vector.clone()))
            .collect();
        for (wt, v) in lift.remainder_terms {
            next.push(NamedTerm::new(site_name(&v, stage.dim_b), wt, v));
        }
        if terms_matrix(&next, stage.dim()) != stage.matrix {
            return Err(Error::DecompositionMismatch("lifted terms do not reproduce the stage".into()));
        }
        stage_terms.push(next.clone());
        terms = next;
    }
    Ok(Rho4x5 { start, pipeline, stages, terms, stage_terms, admixture_weight: ADMIXTURE_WEIGHT })
}

/// Parameters of the `(2k−1)×(2k−1)` family.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilySpec {
    pub k: usize,
    /// Custom `d_1..d_{2k−2}`; `None` selects `d_i = min(i, 2k−1−i)`.
    #[serde(default, with = "opt_rational_vec")]
    pub d_weights: Option<Vec<BigRational>>,
}

mod opt_rational_vec {
    use num_rational::BigRational;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &Option<Vec<BigRational>>, s: S) -> Result<S::Ok, S::Error> {
        v.as_ref().map(|x| x.iter().map(|r| r.to_string()).collect::<Vec<_>>()).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Vec<BigRational>>, D::Error> {
        let raw = Option::<Vec<String>>::deserialize(d)?;
        raw.map(|v| {
            v.iter()
                .map(|s| crate::exactmat::rational_string::parse(s).map_err(serde::de::Error::custom))
                .collect()
        })
        .transpose()
    }
}

impl FamilySpec {
    pub fn new(k: usize) -> Self {
        Self { k, d_weights: None }
    }

    pub fn dim(&self) -> usize {
        2 * self.k - 1
    }

    pub fn default_d(k: usize) -> Vec<BigRational> {
        (1..=2 * k - 2).map(|i| ratio(i.min(2 * k - 1 - i) as i64, 1)).collect()
    }

    pub fn resolved_d(&self) -> Result<Vec<BigRational>, Error> {
        if self.k < 2 {
            return Err(Error::InvalidK(self.k));
        }
        match &self.d_weights {
            None => Ok(Self::default_d(self.k)),
            Some(d) if d.len() != 2 * self.k - 2 => Err(Error::InvalidInput(format!(
                "expected {} d-weights, got {}",
                2 * self.k - 2,
                d.len()
            ))),
            Some(d) if d.iter().any(|x| x.is_negative()) => Err(Error::InvalidInput("negative d-weight".into())),
            Some(d) => Ok(d.clone()),
        }
    }
}

/// Defining edges `α, β_ij, γ_ij, δ_i` of `ρ^{(k)}` with their weights.
pub fn family_terms(spec: &FamilySpec) -> Result<Vec<NamedTerm>, Error> {
    let d = spec.resolved_d()?;
    let k = spec.k;
    let n = 2 * k - 1;
    let mut out = Vec::new();
    let alpha: Vec<_> = (0..k).map(|i| (i, k - 1 - i, 1)).collect();
    out.push(NamedTerm::new("alpha", w(1), ket(n, n, &alpha)));
    for i in 0..k {
        for j in 0..k {
            if i + j >= k {
                let v = ket(n, n, &[(i, j, 1), (2 * k - 1 - j, 2 * k - 1 - i, 1)]);
                out.push(NamedTerm::new(format!("beta_{i}_{j}"), w(1), v));
            }
        }
    }
    for i in 0..k {
        for j in 0..k {
            if i + j + 1 < k {
                out.push(NamedTerm::new(format!("gamma_{i}_{j}"), w(1), ket(n, n, &[(i, j, 1)])));
            }
        }
    }
    for i in 1..=2 * k - 2 {
        let wt = d[i - 1].clone();
        if !wt.is_zero() {
            out.push(NamedTerm::new(format!("delta_{i}"), wt, ket(n, n, &[(i, 2 * k - 1 - i, 1)])));
        }
    }
    Ok(out)
}

pub fn rho_family(spec: &FamilySpec) -> Result<BipartiteState, Error> {
    let terms = family_terms(spec)?;
    let n = spec.dim();
    BipartiteState::new(n, n, terms_matrix(&terms, n * n), format!("family{}", spec.k))
}

/// Schmidt-rank ≤ 2 decomposition of `ρ^{(k),T_A}` into `η_ij`, `μ_ij` and
/// diagonal product terms; fails if the leftover is not a nonnegative diagonal.
pub fn family_pt_terms(spec: &FamilySpec) -> Result<Vec<NamedTerm>, Error> {
    let rho = rho_family(spec)?;
    let k = spec.k;
    let n = spec.dim();
    let pt = rho.partial_transpose(Side::A);
    let mut out = Vec::new();
    for a in 0..k {
        for b in 0..k {
            let partner = (k - 1 - b, k - 1 - a);
            if a + b != k - 1 && (a, b) < partner {
                out.push(NamedTerm::new(format!("eta_{a}_{b}"), w(1), ket(n, n, &[(a, b, 1), (partner.0, partner.1, 1)])));
            }
        }
    }
    for i in 0..k {
        for j in 0..k {
            if i + j >= k {
                let v = ket(n, n, &[(i, 2 * k - 1 - i, 1), (2 * k - 1 - j, j, 1)]);
                out.push(NamedTerm::new(format!("mu_{i}_{j}"), w(1), v));
            }
        }
    }
    let rest = pt.matrix.sub(&terms_matrix(&out, n * n))?;
    for r in 0..n * n {
        for c in 0..n * n {
            let z = rest.get(r, c);
            if r != c && !z.is_zero() {
                return Err(Error::DecompositionMismatch(format!("off-diagonal leftover at ({r},{c})")));
            }
        }
        let z = rest.get(r, r);
        if !z.is_real() || z.re.is_negative() {
            return Err(Error::DecompositionMismatch(format!("negative diagonal leftover at {r}")));
        }
        if !z.is_zero() {
            out.push(NamedTerm::new(format!("prod_{}_{}", r / n, r % n), z.re.clone(), basis_vector(n * n, r)));
        }
    }
    Ok(out)
}

/// `|Ω⟩ = Σ_{i=1}^{k−1} (|i,2k−1−i⟩ − |2k−1−i,i⟩)`
pub fn family_omega(k: usize) -> ExactVector {
    let n = 2 * k - 1;
    let sites: Vec<_> = (1..k).flat_map(|i| [(i, 2 * k - 1 - i, 1), (2 * k - 1 - i, i, -1)]).collect();
    ket(n, n, &sites)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DMinimality {
    pub k: usize,
    pub d_block_psd: bool,
    pub omega_in_kernel: bool,
    /// `⟨Ω|δ_i⟩` for `i = 1..2k−2`.
    pub overlaps: Vec<GaussianRational>,
}

impl DMinimality {
    pub fn holds(&self) -> bool {
        self.d_block_psd && self.omega_in_kernel && self.overlaps.iter().all(|z| !z.is_zero())
    }
}

/// Kernel-vector test showing no `d_i` can be lowered while keeping the `D` block PSD.
pub fn d_minimality_check(spec: &FamilySpec) -> Result<DMinimality, Error> {
    let k = spec.k;
    let n = spec.dim();
    let rho = rho_family(spec)?;
    let pt = rho.partial_transpose(Side::A);
    let sites: Vec<usize> = (1..=2 * k - 2).map(|i| i * n + (2 * k - 1 - i)).collect();
    let d_block = pt.matrix.submatrix(&sites, &sites);
    let omega_full = family_omega(k);
    let omega: ExactVector = sites.iter().map(|&s| omega_full[s].clone()).collect();
    let d_block_psd = psd_check(&d_block)?.is_psd();
    let omega_in_kernel = d_block.mul_vec(&omega)?.iter().all(Zero::is_zero);
    let overlaps = (1..=2 * k - 2)
        .map(|i| inner(&omega_full, &ket(n, n, &[(i, 2 * k - 1 - i, 1)])))
        .collect();
    Ok(DMinimality { k, d_block_psd, omega_in_kernel, overlaps })
}

/// The five Tiles product vectors `(a, b)`, unnormalized.
pub fn tiles_upb() -> Vec<(ExactVector, ExactVector)> {
    let v = |c: [i64; 3]| -> ExactVector { c.iter().map(|&x| GaussianRational::from_int(x)).collect() };
    vec![
        (v([1, 0, 0]), v([1, -1, 0])),
        (v([1, -1, 0]), v([0, 0, 1])),
        (v([0, 0, 1]), v([0, 1, -1])),
        (v([0, 1, -1]), v([1, 0, 0])),
        (v([1, 1, 1]), v([1, 1, 1])),
    ]
}

/// `𝟙 − Σ |ψ_i⟩⟨ψ_i|` over the normalized Tiles basis: a 3×3 PPT entangled state of rank 4.
pub fn tiles_complement() -> BipartiteState {
    let mut m = ExactMatrix::identity(9);
    for (a, b) in tiles_upb() {
        let v = crate::exactmat::kron_vec(&a, &b);
        let nn = inner(&v, &v).inv().expect("nonzero vector");
        m = m.sub(&ExactMatrix::outer(&v, &v).scale(&nn)).expect("same dimension");
    }
    BipartiteState::new(3, 3, m, "tiles").expect("projector onto the UPB complement")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmat::kron_vec;

    #[test]
    fn rho3x3_facts() {
        let s = rho_3x3();
        assert_eq!(s.trace(), GaussianRational::from_int(13));
        assert!(s.is_ppt());
        assert_eq!(s.birank(), (5, 6));
        let pt = s.partial_transpose(Side::B);
        assert_eq!(pt.matrix, terms_matrix(&rho_3x3_pt_terms(), 9));
        assert_eq!(terms_matrix(&rho_3x3_terms(), 9), s.matrix);
        assert_eq!(s.swap_subsystems().swap_subsystems(), s);
    }

    #[test]
    fn family_defaults() {
        assert_eq!(FamilySpec::default_d(2), vec![w(1), w(1)]);
        assert_eq!(FamilySpec::default_d(3), vec![w(1), w(2), w(2), w(1)]);
        assert_eq!(rho_family(&FamilySpec::new(1)), Err(Error::InvalidK(1)));
        let s = rho_family(&FamilySpec::new(4)).unwrap();
        assert_eq!((s.dim_a, s.dim_b), (7, 7));
    }

    #[test]
    fn family_is_ppt_with_sr2_transpose() {
        for k in 2..=4 {
            let spec = FamilySpec::new(k);
            let s = rho_family(&spec).unwrap();
            assert!(s.is_ppt(), "k = {k}");
            let terms = family_pt_terms(&spec).unwrap();
            let n = spec.dim();
            assert_eq!(terms_matrix(&terms, n * n), s.partial_transpose(Side::A).matrix);
            assert!(terms.iter().all(|t| super::super::state::schmidt_rank(&t.vector, n, n) <= 2));
            assert!(d_minimality_check(&spec).unwrap().holds(), "k = {k}");
        }
    }

    #[test]
    fn lowering_a_d_weight_breaks_ppt() {
        let mut d = FamilySpec::default_d(3);
        d[1] = ratio(3, 2);
        let spec = FamilySpec { k: 3, d_weights: Some(d) };
        assert!(!rho_family(&spec).unwrap().is_ppt());
        assert!(family_pt_terms(&spec).is_err());
    }

    #[test]
    fn tiles_kernel_by_substitution() {
        let s = tiles_complement();
        let pt = s.partial_transpose(Side::A);
        for (a, b) in tiles_upb() {
            let v = kron_vec(&a, &b);
            assert!(s.matrix.mul_vec(&v).unwrap().iter().all(Zero::is_zero));
            let abar: ExactVector = a.iter().map(|z| z.conj()).collect();
            assert!(pt.matrix.mul_vec(&kron_vec(&abar, &b)).unwrap().iter().all(Zero::is_zero));
        }
        assert!(s.is_ppt());
        assert_eq!(s.birank(), (4, 4));
    }

    #[test]
    fn pipeline_stages() {
        let r = rho_4x5().unwrap();
        let dims: Vec<_> = r.stages.iter().map(|s| (s.dim_a, s.dim_b)).collect();
        assert_eq!(dims, vec![(4, 3), (4, 4), (4, 5)]);
        assert!(r.stages.iter().all(|s| s.is_ppt()));
        let fin = r.final_state();
        let block = fin.project_local_block(&[0, 1, 2], &[0, 1, 2]).unwrap();
        assert_eq!(block.matrix, rho_3x3().matrix);
        let names: Vec<_> = r.terms.iter().map(|t| t.name.as_str()).collect();
        assert_eq!(names, ["psi00", "psi01", "psi10", "psi02", "psi20", "psi30", "psi32", "psi23", "psi04"]);
        for (i, a) in r.terms.iter().enumerate() {
            for b in &r.terms[i + 1..] {
                assert!(inner(&a.vector, &b.vector).is_zero());
            }
        }
    }

    #[test]
    fn projections_compose() {
        let s = rho_4x5().unwrap().final_state().clone();
        let once = s.project_local_block(&[0, 2, 3], &[1, 2, 4]).unwrap();
        let twice = s.project_local_block(&[0, 1, 2, 3], &[1, 2, 3, 4]).unwrap().project_local_block(&[0, 2, 3], &[0, 1, 3]).unwrap();
        assert_eq!(once.matrix, twice.matrix);
    }
}
