use std::collections::{BTreeSet, HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::poly::{Monomial, Polynomial};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GbOptions {
    /// Stop after every task of degree ≤ bound is done. For homogeneous
    /// input the result decides membership for polynomials up to that degree.
    pub degree_bound: Option<u32>,
    /// Print one line per finished degree to stderr.
    pub progress: bool,
}

/// Reduced (possibly degree-truncated) Gröbner basis under grevlex.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroebnerBasis {
    pub nvars: usize,
    pub polys: Vec<Polynomial>,
    /// `None` for a complete basis.
    pub degree_bound: Option<u32>,
}

impl GroebnerBasis {
    pub fn is_complete(&self) -> bool {
        self.degree_bound.is_none()
    }

    pub fn reduce(&self, p: &Polynomial) -> Polynomial {
        normal_form(p, &self.polys)
    }

    /// Ideal membership; for truncated bases only decisive up to the bound.
    pub fn contains(&self, p: &Polynomial) -> bool {
        self.reduce(p).is_zero()
    }
}

/// Full reduction: no term of the result is divisible by a leading monomial of `basis`.
pub fn normal_form(p: &Polynomial, basis: &[Polynomial]) -> Polynomial {
    let leads: Vec<(&Monomial, _)> =
        basis.iter().filter_map(|g| g.leading().map(|(m, c)| (m, c.clone()))).collect();
    let mut rest = p.clone();
    let mut out = Polynomial::zero(p.nvars());
    while let Some((m, c)) = rest.pop_leading() {
        match leads.iter().position(|(lm, _)| lm.divides(&m)) {
            Some(k) => {
                let shift = leads[k].0.quotient_of(&m);
                let coef = &c / &leads[k].1;
                // the leading term is already removed; subtract the tail only
                rest.push_term(m, &c);
                rest.sub_scaled_shift(&coef, &shift, &basis[k]);
            }
            None => out.push_term(m, &c),
        }
    }
    out
}

pub fn s_polynomial(f: &Polynomial, g: &Polynomial) -> Polynomial {
    let (Some((mf, cf)), Some((mg, cg))) = (f.leading(), g.leading()) else {
        return Polynomial::zero(f.nvars());
    };
    let l = mf.lcm(mg);
    let a = Polynomial::monomial(mf.quotient_of(&l), cf.recip()).mul(f);
    let b = Polynomial::monomial(mg.quotient_of(&l), cg.recip()).mul(g);
    a.sub(&b)
}

fn pair_degree(basis: &[Polynomial], i: usize, j: usize) -> (u32, Monomial) {
    let l = basis[i].leading_monomial().unwrap().lcm(basis[j].leading_monomial().unwrap());
    (l.degree(), l)
}

pub fn buchberger(generators: &[Polynomial], opts: GbOptions) -> GroebnerBasis {
    buchberger_with(generators, opts, |_, _| false).0
}

/// Buchberger with the normal selection strategy and both of Buchberger's
/// criteria. `on_degree(d, basis)` runs once every task of degree ≤ d is
/// done; returning `true` stops early. The second result is the degree at
/// which the callback stopped the run.
pub fn buchberger_with(
    generators: &[Polynomial],
    opts: GbOptions,
    mut on_degree: impl FnMut(u32, &[Polynomial]) -> bool,
) -> (GroebnerBasis, Option<u32>) {
    let nvars = generators.first().map(Polynomial::nvars).unwrap_or(0);
    let mut gens: Vec<&Polynomial> = generators.iter().filter(|g| !g.is_zero()).collect();
    gens.sort_by_key(|g| g.leading_monomial().map(Monomial::degree));
    let mut gens: VecDeque<&Polynomial> = gens.into();

    let mut basis: Vec<Polynomial> = Vec::new();
    let mut pairs: BTreeSet<(u32, Monomial, usize, usize)> = BTreeSet::new();
    let mut pending: HashSet<(usize, usize)> = HashSet::new();
    let mut reported: Option<u32> = None;
    let mut stopped = None;
    let deg_of = |p: &Polynomial| p.leading_monomial().map(Monomial::degree).unwrap_or(0);

    loop {
        let next_gen = gens.front().map(|g| deg_of(g));
        let next_pair = pairs.iter().next().map(|p| p.0);
        let next = match (next_gen, next_pair) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        let exhausted = match (next, opts.degree_bound) {
            (None, _) => true,
            (Some(d), Some(bound)) => d > bound,
            _ => false,
        };
        let finished_upto = match next {
            _ if exhausted => opts.degree_bound.or_else(|| basis.iter().map(deg_of).max()),
            Some(d) => d.checked_sub(1),
            None => None,
        };
        if let Some(upto) = finished_upto {
            let from = reported.map_or(0, |r| r + 1);
            for d in from..=upto {
                reported = Some(d);
                if opts.progress {
                    eprintln!("groebner: degree {d} done, basis size {}, pairs left {}", basis.len(), pairs.len());
                }
                if on_degree(d, &basis) {
                    stopped = Some(d);
                    break;
                }
            }
        }
        if exhausted || stopped.is_some() {
            break;
        }
        let d = next.unwrap();

        let candidate = if next_gen == Some(d) {
            gens.pop_front().unwrap().clone()
        } else {
            let (pd, l, i, j) = pairs.pop_first().unwrap();
            debug_assert_eq!(pd, d);
            pending.remove(&(i, j));
            let chain = (0..basis.len()).any(|k| {
                k != i
                    && k != j
                    && basis[k].leading_monomial().unwrap().divides(&l)
                    && !pending.contains(&(i.min(k), i.max(k)))
                    && !pending.contains(&(j.min(k), j.max(k)))
            });
            if chain {
                continue;
            }
            s_polynomial(&basis[i], &basis[j])
        };

        let h = normal_form(&candidate, &basis);
        if h.is_zero() {
            continue;
        }
        let h = h.monic();
        let n = basis.len();
        basis.push(h);
        for i in 0..n {
            let (li, ln) = (basis[i].leading_monomial().unwrap(), basis[n].leading_monomial().unwrap());
            if li.coprime(ln) {
                continue;
            }
            let (pd, l) = pair_degree(&basis, i, n);
            pairs.insert((pd, l, i, n));
            pending.insert((i, n));
        }
    }

    let degree_bound = if pairs.is_empty() && gens.is_empty() && stopped.is_none() {
        None
    } else {
        stopped.or(opts.degree_bound)
    };
    (GroebnerBasis { nvars, polys: interreduce(basis), degree_bound }, stopped)
}

/// Minimal, fully reduced, monic and sorted by leading monomial.
pub fn interreduce(basis: Vec<Polynomial>) -> Vec<Polynomial> {
    let mut basis: Vec<Polynomial> = basis.into_iter().filter(|p| !p.is_zero()).map(|p| p.monic()).collect();
    basis.sort_by(|a, b| a.leading_monomial().cmp(&b.leading_monomial()));
    let mut minimal: Vec<Polynomial> = Vec::new();
    for p in basis {
        let lm = p.leading_monomial().unwrap();
        if !minimal.iter().any(|q| q.leading_monomial().unwrap().divides(lm)) {
            minimal.push(p);
        }
    }
    let mut out = Vec::with_capacity(minimal.len());
    for i in 0..minimal.len() {
        let others: Vec<Polynomial> =
            minimal.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, q)| q.clone()).collect();
        let lead = Polynomial::monomial(
            minimal[i].leading_monomial().unwrap().clone(),
            minimal[i].leading().unwrap().1.clone(),
        );
        let tail = normal_form(&minimal[i].sub(&lead), &others);
        out.push(lead.add(&tail));
    }
    out
}

/// First non-coprime pair (with lcm degree within `degree_bound`) whose
/// S-polynomial does not reduce to zero.
pub fn groebner_defect(basis: &[Polynomial], degree_bound: Option<u32>) -> Option<(usize, usize)> {
    for i in 0..basis.len() {
        for j in i + 1..basis.len() {
            let (Some(li), Some(lj)) = (basis[i].leading_monomial(), basis[j].leading_monomial()) else {
                return Some((i, j));
            };
            if li.coprime(lj) || degree_bound.is_some_and(|b| li.lcm(lj).degree() > b) {
                continue;
            }
            if !normal_form(&s_polynomial(&basis[i], &basis[j]), basis).is_zero() {
                return Some((i, j));
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use locext_core::exactmat::ratio;
    use proptest::prelude::*;

    fn x(n: usize, i: usize) -> Polynomial {
        Polynomial::var(n, i)
    }

    #[test]
    fn single_variable() {
        let gb = buchberger(&[x(1, 0)], GbOptions::default());
        assert_eq!(gb.polys, vec![x(1, 0)]);
        assert!(gb.is_complete());
    }

    #[test]
    fn pure_power_appears() {
        // x³ = (x − y)(x² + xy) + x·y²
        let (a, b) = (x(2, 0), x(2, 1));
        let gens = [a.mul(&a).add(&a.mul(&b)), b.mul(&b)];
        let gb = buchberger(&gens, GbOptions::default());
        assert!(gb.contains(&a.pow(3)));
        assert!(!gb.contains(&a.pow(2)));
        assert!(groebner_defect(&gb.polys, None).is_none());
        for g in &gens {
            assert!(gb.contains(g));
        }
        // leading monomials x² and y² are coprime, so the input is already a reduced basis
        assert_eq!(gb.polys, vec![b.mul(&b), gens[0].clone()]);
    }

    #[test]
    fn unit_not_in_proper_ideal() {
        let one = Polynomial::constant(2, ratio(1, 1));
        let gb = buchberger(&[x(2, 0).mul(&x(2, 1))], GbOptions::default());
        assert_eq!(gb.reduce(&one), one);
    }

    #[test]
    fn truncation_reports_degrees() {
        let (a, b) = (x(2, 0), x(2, 1));
        let gens = [a.mul(&a).add(&a.mul(&b)), b.mul(&b)];
        let mut seen = Vec::new();
        let (gb, stop) = buchberger_with(&gens, GbOptions { degree_bound: Some(3), progress: false }, |d, g| {
            seen.push(d);
            normal_form(&a.pow(d), g).is_zero()
        });
        assert_eq!(stop, Some(3));
        assert_eq!(seen, vec![0, 1, 2, 3]);
        assert_eq!(gb.degree_bound, Some(3));
    }

    fn small_poly() -> impl Strategy<Value = Polynomial> {
        prop::collection::vec(((0u32..3, 0u32..3, 0u32..3), -3i64..4), 1..5).prop_map(|ts| {
            Polynomial::from_terms(
                3,
                ts.into_iter().map(|((a, b, c), k)| (Monomial::from_exponents(vec![a, b, c]), ratio(k, 1))),
            )
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]
        #[test]
        fn gb_properties(gens in prop::collection::vec(small_poly(), 1..3), ps in prop::collection::vec(small_poly(), 5)) {
            let gb = buchberger(&gens, GbOptions::default());
            prop_assert!(groebner_defect(&gb.polys, None).is_none());
            for g in &gens {
                prop_assert!(gb.contains(g));
            }
            for p in &ps {
                let r = gb.reduce(p);
                prop_assert_eq!(gb.reduce(&r), r.clone());
                for (m, _) in r.terms() {
                    prop_assert!(gb.polys.iter().all(|g| !g.leading_monomial().unwrap().divides(m)));
                }
            }
        }

        #[test]
        fn membership_ignores_scaling_and_order(gens in prop::collection::vec(small_poly(), 2..4), p in small_poly(), q in small_poly()) {
            let member = p.mul(&gens[0]).add(&q.mul(&gens[1]));
            let mut shuffled: Vec<Polynomial> = gens.iter().rev().map(|g| g.scale(&ratio(-2, 3))).collect();
            shuffled.rotate_left(1);
            let a = buchberger(&gens, GbOptions::default());
            let b = buchberger(&shuffled, GbOptions::default());
            prop_assert!(a.contains(&member));
            prop_assert!(b.contains(&member));
            prop_assert_eq!(a.polys, b.polys);
        }
    }
}
