use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use super::state::{ket, BipartiteState};
use crate::error::Error;
use crate::exactmat::{rational_string, ExactVector};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolidEdge {
    pub sites: Vec<(usize, usize)>,
    #[serde(with = "rational_string")]
    pub weight: BigRational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DashedEdge {
    /// `|ij⟩ − |kl⟩` for sites `[(i,j), (k,l)]`.
    pub sites: [(usize, usize); 2],
    #[serde(with = "rational_string")]
    pub weight: BigRational,
}

/// Weighted hypergraph on an `m×n` grid of computational basis sites.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GridGraph {
    pub dims: (usize, usize),
    pub solid: Vec<SolidEdge>,
    pub dashed: Vec<DashedEdge>,
}

impl GridGraph {
    pub fn new(dims: (usize, usize), solid: Vec<SolidEdge>, dashed: Vec<DashedEdge>) -> Result<Self, Error> {
        let g = Self { dims, solid, dashed };
        g.validate()?;
        Ok(g)
    }

    pub fn empty(dim_a: usize, dim_b: usize) -> Self {
        Self { dims: (dim_a, dim_b), solid: Vec::new(), dashed: Vec::new() }
    }

    pub fn with_solid(mut self, sites: &[(usize, usize)], weight: BigRational) -> Result<Self, Error> {
        self.solid.push(SolidEdge { sites: sites.to_vec(), weight });
        self.validate()?;
        Ok(self)
    }

    pub fn with_dashed(mut self, a: (usize, usize), b: (usize, usize), weight: BigRational) -> Result<Self, Error> {
        self.dashed.push(DashedEdge { sites: [a, b], weight });
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<(), Error> {
        let (m, n) = self.dims;
        if m == 0 || n == 0 {
            return Err(Error::InvalidInput("grid dimensions must be positive".into()));
        }
        let in_bounds = |&(i, j): &(usize, usize)| -> Result<(), Error> {
            if i >= m || j >= n {
                return Err(Error::BoundsViolation(format!("site ({i},{j}) outside the {m}x{n} grid")));
            }
            Ok(())
        };
        for (k, e) in self.solid.iter().enumerate() {
            if e.sites.is_empty() {
                return Err(Error::InvalidInput(format!("solid edge {k} has no sites")));
            }
            e.sites.iter().try_for_each(in_bounds)?;
            let mut s = e.sites.clone();
            s.sort_unstable();
            s.dedup();
            if s.len() != e.sites.len() {
                return Err(Error::InvalidInput(format!("solid edge {k} repeats a site")));
            }
            check_weight(&e.weight, "solid", k)?;
        }
        for (k, e) in self.dashed.iter().enumerate() {
            e.sites.iter().try_for_each(in_bounds)?;
            if e.sites[0] == e.sites[1] {
                return Err(Error::InvalidInput(format!("dashed edge {k} must join two distinct sites")));
            }
            check_weight(&e.weight, "dashed", k)?;
        }
        Ok(())
    }

    /// `(weight, |e⟩)` for every edge, solid first.
    pub fn edge_vectors(&self) -> Vec<(BigRational, ExactVector)> {
        let (m, n) = self.dims;
        let solid = self.solid.iter().map(|e| {
            let sites: Vec<(usize, usize, i64)> = e.sites.iter().map(|&(i, j)| (i, j, 1)).collect();
            (e.weight.clone(), ket(m, n, &sites))
        });
        let dashed = self.dashed.iter().map(|e| {
            let [(i, j), (k, l)] = e.sites;
            (e.weight.clone(), ket(m, n, &[(i, j, 1), (k, l, -1)]))
        });
        solid.chain(dashed).collect()
    }
}

fn check_weight(w: &BigRational, kind: &str, k: usize) -> Result<(), Error> {
    if w.is_zero() || w.is_negative() {
        return Err(Error::InvalidInput(format!("{kind} edge {k} needs a strictly positive weight")));
    }
    Ok(())
}

#[derive(Deserialize)]
struct GridRepr {
    dims: (usize, usize),
    #[serde(default)]
    solid: Vec<SolidEdge>,
    #[serde(default)]
    dashed: Vec<DashedEdge>,
}

impl<'de> Deserialize<'de> for GridGraph {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let r = GridRepr::deserialize(d)?;
        GridGraph::new(r.dims, r.solid, r.dashed).map_err(serde::de::Error::custom)
    }
}

/// `Σ w(e⁺)|e⁺⟩⟨e⁺| + Σ w(e⁻)|e⁻⟩⟨e⁻|`
pub fn grid_to_state(g: &GridGraph, label: impl Into<String>) -> Result<BipartiteState, Error> {
    g.validate()?;
    let (m, n) = g.dims;
    BipartiteState::from_weighted_vectors(m, n, &g.edge_vectors(), label)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmat::{ratio, ExactMatrix, GaussianRational};
    use proptest::prelude::*;

    #[test]
    fn single_site() {
        let g = GridGraph::empty(2, 2).with_solid(&[(0, 0)], ratio(1, 1)).unwrap();
        let s = grid_to_state(&g, "").unwrap();
        let mut e = vec![GaussianRational::zero(); 4];
        e[0] = GaussianRational::from_int(1);
        assert_eq!(s.matrix, ExactMatrix::outer(&e, &e));
    }

    #[test]
    fn dashed_pair() {
        let g = GridGraph::empty(2, 2).with_dashed((0, 0), (1, 1), ratio(1, 1)).unwrap();
        let s = grid_to_state(&g, "").unwrap();
        let expected = ExactMatrix::from_i64(&[&[1, 0, 0, -1], &[0, 0, 0, 0], &[0, 0, 0, 0], &[-1, 0, 0, 1]]);
        assert_eq!(s.matrix, expected);
    }

    #[test]
    fn rejects_bad_graphs() {
        assert!(matches!(
            GridGraph::empty(2, 2).with_solid(&[(2, 0)], ratio(1, 1)),
            Err(Error::BoundsViolation(_))
        ));
        assert!(GridGraph::empty(2, 2).with_dashed((0, 0), (0, 0), ratio(1, 1)).is_err());
        assert!(GridGraph::empty(2, 2).with_solid(&[(0, 0)], ratio(0, 1)).is_err());
        assert!(GridGraph::empty(2, 2).with_solid(&[(0, 0)], ratio(-1, 2)).is_err());
    }

    #[test]
    fn json_format() {
        let text = r#"{"dims":[2,3],"solid":[{"sites":[[0,0],[1,1]],"weight":"1/2"}],"dashed":[{"sites":[[0,1],[1,2]],"weight":"3"}]}"#;
        let g: GridGraph = serde_json::from_str(text).unwrap();
        assert_eq!(g.solid[0].weight, ratio(1, 2));
        assert_eq!(g.dashed[0].sites, [(0, 1), (1, 2)]);
        let back: GridGraph = serde_json::from_str(&serde_json::to_string(&g).unwrap()).unwrap();
        assert_eq!(back, g);
        let bad = r#"{"dims":[2,3],"solid":[{"sites":[[5,0]],"weight":"1"}]}"#;
        assert!(serde_json::from_str::<GridGraph>(bad).is_err());
    }

    fn arb_graph() -> impl Strategy<Value = GridGraph> {
        (1usize..=3, 1usize..=3).prop_flat_map(|(m, n)| {
            let site = (0..m, 0..n);
            let solid = prop::collection::vec(
                (prop::collection::btree_set(site.clone(), 1..=3), 1i64..=4),
                0..4,
            );
            let dashed = prop::collection::vec((site.clone(), site, 1i64..=4), 0..3);
            (Just((m, n)), solid, dashed).prop_map(|(dims, solid, dashed)| {
                let solid = solid
                    .into_iter()
                    .map(|(s, w)| SolidEdge { sites: s.into_iter().collect(), weight: ratio(w, 1) })
                    .collect();
                let dashed = dashed
                    .into_iter()
                    .filter(|(a, b, _)| a != b)
                    .map(|(a, b, w)| DashedEdge { sites: [a, b], weight: ratio(w, 2) })
                    .collect();
                GridGraph { dims, solid, dashed }
            })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn grid_states_are_psd(g in arb_graph()) {
            let s = grid_to_state(&g, "random").unwrap();
            prop_assert!(s.is_psd().unwrap());
            let total: BigRational = g.edge_vectors().iter()
                .map(|(w, v)| w * BigRational::from_integer((v.iter().filter(|z| !z.is_zero()).count() as i64).into()))
                .sum();
            prop_assert_eq!(s.trace(), GaussianRational::real(total));
        }
    }
}
