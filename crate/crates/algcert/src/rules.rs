use locext_core::exactmat::{ExactMatrix, GaussianRational};
use locext_core::qstates::BipartiteState;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

/// Trusted separability and Schmidt-number rules. R1 is the Peres–Horodecki
/// theorem; R3 and R4 are external results taken on trust and named as such
/// in every verdict that uses them.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Rule {
    R1,
    R2,
    R3,
    R4,
}

impl Rule {
    pub fn name(self) -> &'static str {
        match self {
            Rule::R1 => "R1: PPT in 2x2 or 2x3 is separable (Peres-Horodecki)",
            Rule::R2 => "R2: direct sum of separable local blocks",
            Rule::R3 => "R3: 2x4 PPT with a product vector in the kernel is separable (assumed)",
            Rule::R4 => "R4: 3x3 PPT has Schmidt number at most 2 (assumed)",
        }
    }

    pub fn is_assumed(self) -> bool {
        matches!(self, Rule::R3 | Rule::R4)
    }
}

/// One connected block of the site interaction graph.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalBlock {
    pub rows_a: Vec<usize>,
    pub rows_b: Vec<usize>,
    pub sites: Vec<(usize, usize)>,
    /// `"product"` for blocks with a one-dimensional factor, otherwise the rule name.
    pub certified_by: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum SeparabilityVerdict {
    Separable { rule: Rule, rules_used: Vec<String>, blocks: Vec<LocalBlock> },
    SchmidtNumberAtMost { bound: usize, rule: Rule, rules_used: Vec<String> },
    Unknown,
}

impl SeparabilityVerdict {
    pub fn is_separable(&self) -> bool {
        matches!(self, SeparabilityVerdict::Separable { .. })
    }
}

/// Indices of each factor that carry weight.
pub fn local_support(s: &BipartiteState) -> (Vec<usize>, Vec<usize>) {
    let (m, n) = (s.dim_a, s.dim_b);
    let diag = |i: usize, j: usize| !s.matrix.get(i * n + j, i * n + j).is_zero();
    let a = (0..m).filter(|&i| (0..n).any(|j| diag(i, j))).collect();
    let b = (0..n).filter(|&j| (0..m).any(|i| diag(i, j))).collect();
    (a, b)
}

fn restricted(s: &BipartiteState) -> Option<BipartiteState> {
    let (a, b) = local_support(s);
    if a.is_empty() {
        return None;
    }
    s.project_local_block(&a, &b).ok()
}

/// Connected components of sites linked by nonzero matrix entries.
pub fn interaction_blocks(s: &BipartiteState) -> Vec<LocalBlock> {
    let d = s.dim();
    let n = s.dim_b;
    let mut parent: Vec<usize> = (0..d).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        let mut y = x;
        while p[y] != r {
            let nx = p[y];
            p[y] = r;
            y = nx;
        }
        r
    }
    for r in 0..d {
        for c in r + 1..d {
            if !s.matrix.get(r, c).is_zero() {
                let (x, y) = (find(&mut parent, r), find(&mut parent, c));
                parent[x] = y;
            }
        }
    }
    let live: Vec<usize> = (0..d).filter(|&r| !s.matrix.get(r, r).is_zero()).collect();
    let mut roots: Vec<usize> = Vec::new();
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for &r in &live {
        let root = find(&mut parent, r);
        match roots.iter().position(|&x| x == root) {
            Some(k) => groups[k].push(r),
            None => {
                roots.push(root);
                groups.push(vec![r]);
            }
        }
    }
    groups
        .into_iter()
        .map(|g| {
            let sites: Vec<(usize, usize)> = g.iter().map(|&r| (r / n, r % n)).collect();
            let mut rows_a: Vec<usize> = sites.iter().map(|s| s.0).collect();
            let mut rows_b: Vec<usize> = sites.iter().map(|s| s.1).collect();
            rows_a.sort_unstable();
            rows_a.dedup();
            rows_b.sort_unstable();
            rows_b.dedup();
            LocalBlock { rows_a, rows_b, sites, certified_by: None }
        })
        .collect()
}

fn overlaps(a: &LocalBlock, b: &LocalBlock) -> bool {
    a.rows_a.iter().any(|i| b.rows_a.contains(i)) || a.rows_b.iter().any(|j| b.rows_b.contains(j))
}

fn merge(a: &mut LocalBlock, b: LocalBlock) {
    a.sites.extend(b.sites);
    a.rows_a.extend(b.rows_a);
    a.rows_b.extend(b.rows_b);
    a.rows_a.sort_unstable();
    a.rows_a.dedup();
    a.rows_b.sort_unstable();
    a.rows_b.dedup();
}

/// Groups interaction components into blocks whose sum is `ρ`: components
/// sharing a local index are merged, and single sites inside a merged
/// rectangle are absorbed (a diagonal product term never breaks PPT).
pub fn local_blocks(s: &BipartiteState) -> Vec<LocalBlock> {
    let comps = interaction_blocks(s);
    let (singles, mut multi): (Vec<LocalBlock>, Vec<LocalBlock>) = comps.into_iter().partition(|b| b.sites.len() == 1);
    let mut changed = true;
    while changed {
        changed = false;
        'outer: for i in 0..multi.len() {
            for j in i + 1..multi.len() {
                if overlaps(&multi[i], &multi[j]) {
                    let b = multi.remove(j);
                    merge(&mut multi[i], b);
                    changed = true;
                    break 'outer;
                }
            }
        }
    }
    let mut rest = Vec::new();
    for single in singles {
        let (i, j) = single.sites[0];
        match multi.iter_mut().find(|b| b.rows_a.contains(&i) && b.rows_b.contains(&j)) {
            Some(b) => b.sites.push((i, j)),
            None => rest.push(single),
        }
    }
    multi.extend(rest);
    multi
}

/// The block as a state on its bounding rectangle.
fn block_state(s: &BipartiteState, b: &LocalBlock) -> BipartiteState {
    let n = s.dim_b;
    let (p, q) = (b.rows_a.len(), b.rows_b.len());
    let inside: Vec<Option<usize>> = (0..s.dim())
        .map(|r| {
            let site = (r / n, r % n);
            if !b.sites.contains(&site) {
                return None;
            }
            let i = b.rows_a.iter().position(|&x| x == site.0).unwrap();
            let j = b.rows_b.iter().position(|&x| x == site.1).unwrap();
            Some(i * q + j)
        })
        .collect();
    let mut entries = vec![vec![GaussianRational::zero(); p * q]; p * q];
    for r in 0..s.dim() {
        for c in 0..s.dim() {
            if let (Some(x), Some(y)) = (inside[r], inside[c]) {
                entries[x][y] = s.matrix.get(r, c).clone();
            }
        }
    }
    let m = ExactMatrix::from_fn(p * q, p * q, |x, y| entries[x][y].clone());
    BipartiteState::new(p, q, m, format!("{}[block]", s.label)).expect("principal block of a PSD matrix")
}

fn r1(s: &BipartiteState) -> bool {
    let (p, q) = (s.dim_a, s.dim_b);
    p.min(q) >= 2 && p * q <= 6 && s.is_ppt()
}

fn r3(s: &BipartiteState) -> bool {
    let (p, q) = (s.dim_a, s.dim_b);
    if p.min(q) != 2 || p.max(q) != 4 || !s.is_ppt() {
        return false;
    }
    (0..s.dim()).any(|r| (0..s.dim()).all(|c| s.matrix.get(c, r).is_zero()))
}

fn r4(s: &BipartiteState) -> bool {
    s.dim_a <= 3 && s.dim_b <= 3 && s.is_ppt()
}

/// Applies R1–R4 in order to the state restricted to its local support.
pub fn separability_rules(s: &BipartiteState) -> SeparabilityVerdict {
    let Some(core) = restricted(s) else {
        return SeparabilityVerdict::Separable { rule: Rule::R2, rules_used: vec![Rule::R2.name().into()], blocks: vec![] };
    };
    let sep = |rule: Rule, blocks| SeparabilityVerdict::Separable { rule, rules_used: vec![rule.name().into()], blocks };
    if core.dim_a.min(core.dim_b) == 1 {
        return sep(Rule::R2, vec![]);
    }
    if r1(&core) {
        return sep(Rule::R1, vec![]);
    }
    let mut blocks = local_blocks(&core);
    if blocks.len() > 1 {
        let mut used = vec![Rule::R2.name().to_string()];
        let mut ok = true;
        for b in blocks.iter_mut() {
            let bs = block_state(&core, b);
            if bs.dim_a.min(bs.dim_b) <= 1 {
                b.certified_by = Some("product".into());
            } else if r1(&bs) {
                b.certified_by = Some(Rule::R1.name().into());
                if !used.iter().any(|u| u == Rule::R1.name()) {
                    used.push(Rule::R1.name().into());
                }
            } else {
                ok = false;
            }
        }
        if ok {
            // report blocks in the original index space
            let (sa, sb) = local_support(s);
            for b in blocks.iter_mut() {
                b.rows_a.iter_mut().for_each(|i| *i = sa[*i]);
                b.rows_b.iter_mut().for_each(|j| *j = sb[*j]);
                b.sites.iter_mut().for_each(|(i, j)| (*i, *j) = (sa[*i], sb[*j]));
            }
            return SeparabilityVerdict::Separable { rule: Rule::R2, rules_used: used, blocks };
        }
    }
    if r3(&core) {
        return sep(Rule::R3, vec![]);
    }
    if r4(&core) {
        return SeparabilityVerdict::SchmidtNumberAtMost { bound: 2, rule: Rule::R4, rules_used: vec![Rule::R4.name().into()] };
    }
    SeparabilityVerdict::Unknown
}

/// Closure form for projection bounds: the rule names when separable.
pub fn separable_by_rules(s: &BipartiteState) -> Option<String> {
    match separability_rules(s) {
        SeparabilityVerdict::Separable { rules_used, .. } => Some(rules_used.join("; ")),
        _ => None,
    }
}

/// The rules give the same separability verdict for `s` and its swap.
pub fn rules_symmetric(s: &BipartiteState) -> bool {
    separability_rules(s).is_separable() == separability_rules(&s.swap_subsystems()).is_separable()
}

#[cfg(test)]
mod tests {
    use super::*;
    use locext_core::exactmat::ratio;
    use locext_core::qstates::{ket, rho_3x3, rho_4x5, tiles_complement};

    #[test]
    fn diagonal_is_r2() {
        let terms: Vec<_> = (0..3).flat_map(|i| (0..3).map(move |j| (ratio(1 + i as i64, 1), ket(3, 3, &[(i, j, 1)])))).collect();
        let s = BipartiteState::from_weighted_vectors(3, 3, &terms, "diag").unwrap();
        let v = separability_rules(&s);
        assert!(matches!(v, SeparabilityVerdict::Separable { rule: Rule::R2, .. }));
    }

    #[test]
    fn rho3x3_only_sn_bound() {
        assert!(matches!(separability_rules(&rho_3x3()), SeparabilityVerdict::SchmidtNumberAtMost { bound: 2, rule: Rule::R4, .. }));
        assert!(matches!(separability_rules(&tiles_complement()), SeparabilityVerdict::SchmidtNumberAtMost { .. }));
    }

    #[test]
    fn projected_stage_two_is_separable() {
        let r = rho_4x5().unwrap();
        let p = r.stage2().project_local_block(&[0, 1, 2, 3], &[1, 2, 3]).unwrap();
        match separability_rules(&p) {
            SeparabilityVerdict::Separable { rule: Rule::R2, blocks, .. } => {
                let big: Vec<_> = blocks.iter().filter(|b| b.rows_a.len() > 1 && b.rows_b.len() > 1).collect();
                assert_eq!(big.len(), 1);
                assert_eq!((big[0].rows_a.len(), big[0].rows_b.len()), (3, 2));
            }
            other => panic!("{other:?}"),
        }
        assert!(rules_symmetric(&p));
    }

    #[test]
    fn npt_two_qubits_unknown() {
        let v = ket(2, 2, &[(0, 0, 1), (1, 1, 1)]);
        let s = BipartiteState::from_weighted_vectors(2, 2, &[(ratio(1, 1), v)], "bell").unwrap();
        assert_eq!(separability_rules(&s), SeparabilityVerdict::Unknown);
    }
}
