//! Transfer-EFX for agents split into a general group, an additive
//! 2-ratio-bounded group, and at most one further general agent.
//!
//! Positions are 0-based here: the C1 positions of a k-level allocation are
//! `0..=n-k`, the C2-only positions `n-k+1..n`.

use crate::allocation::Allocation;
use crate::chores::ChoreSet;
use crate::error::{Error, Result};
use crate::fairness::{argmax_removal, check_tefx, is_efx_feasible, is_tefx_feasible, max_removal_cost};
use crate::instance::Instance;
use crate::oracles::CostOracle;
use crate::rational::{int, Rational};
use crate::verify::{search_space, Assignments, DEFAULT_ENUM_LIMIT};

fn min_cost_index(oracle: &CostOracle, bundles: &[ChoreSet], range: impl Iterator<Item = usize>) -> Option<usize> {
    let mut best: Option<(usize, Rational)> = None;
    for i in range {
        let c = oracle.cost(bundles[i]);
        if best.as_ref().map_or(true, |(_, b)| c < *b) {
            best = Some((i, c));
        }
    }
    best.map(|b| b.0)
}

fn all_efx_feasible(oracle: &CostOracle, bundles: &[ChoreSet]) -> bool {
    (0..bundles.len()).all(|i| is_efx_feasible(oracle, bundles, i))
}

/// `k` bundles covering all `m` chores, every one EFX-feasible under the
/// single oracle. Greedy seeding, local repair, then exhaustive search.
pub fn identical_cost_efx(m: usize, k: usize, oracle: &CostOracle) -> Result<Vec<ChoreSet>> {
    identical_cost_efx_limited(m, k, oracle, DEFAULT_ENUM_LIMIT)
}

pub fn identical_cost_efx_limited(m: usize, k: usize, oracle: &CostOracle, limit: u64) -> Result<Vec<ChoreSet>> {
    if k == 0 {
        return Err(Error::InvalidInput("bundle count must be positive".into()));
    }
    if oracle.chore_count() != m {
        return Err(Error::DimensionMismatch(format!("oracle has {} chores, expected {m}", oracle.chore_count())));
    }
    let mut order: Vec<usize> = (0..m).collect();
    let single = oracle.singletons();
    order.sort_by(|&a, &b| single[b].cmp(&single[a]).then(a.cmp(&b)));
    let mut bundles = vec![ChoreSet::EMPTY; k];
    for c in order {
        let i = min_cost_index(oracle, &bundles, 0..k).expect("k > 0");
        bundles[i].insert(c);
    }

    let budget = m * m * k;
    for _ in 0..budget {
        let Some(v) = (0..k).find(|&i| !is_efx_feasible(oracle, &bundles, i)) else {
            break;
        };
        // the chore whose removal leaves the costliest rest has the least marginal cost
        let (c, _) = argmax_removal(|s| oracle.cost(s), bundles[v]).expect("violator is non-empty");
        let t = min_cost_index(oracle, &bundles, 0..k).expect("k > 0");
        bundles[v].remove(c);
        bundles[t].insert(c);
    }
    if all_efx_feasible(oracle, &bundles) {
        return Ok(bundles);
    }

    let needed = search_space(m, k);
    if needed > limit as u128 {
        return Err(Error::EnumerationLimit {
            what: "identical-cost EFX search".into(),
            needed: needed.to_string(),
            limit: limit.to_string(),
        });
    }
    let mut it = Assignments::new(m, k);
    while it.advance() {
        if all_efx_feasible(oracle, it.bundles()) {
            return Ok(it.bundles().to_vec());
        }
    }
    Err(Error::GuaranteeViolated {
        what: "identical-cost EFX".into(),
        trace: format!("no EFX split of {m} chores into {k} bundles"),
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TefxMove {
    pub k: usize,
    pub from: usize,
    pub to: usize,
    pub chore: usize,
    pub phi_before: usize,
    pub phi_after: usize,
    /// C1 positions still EFX-feasible after the move.
    pub c1_bundles_efx: bool,
    /// C2-only positions still tEFX-feasible after the move.
    pub c2_bundles_tefx: bool,
    /// The chosen target is also a global C2 minimum.
    pub target_global_min: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TefxTrace {
    pub moves: Vec<TefxMove>,
    /// Per level k ≥ 2: (k, Φ on entry, position swapped to n-k on exit).
    pub levels: Vec<(usize, usize, usize)>,
}

fn phi(bundles: &[ChoreSet], k: usize) -> usize {
    let n = bundles.len();
    bundles[..=n - k].iter().map(|b| b.len()).sum()
}

fn check_c2(c2: &CostOracle) -> Result<()> {
    if !c2.is_additive() {
        return Err(Error::Precondition("C2 must be additive".into()));
    }
    let r = crate::oracles::ratio_bound(c2)?;
    if r > int(2) {
        return Err(Error::Precondition(format!("C2 ratio bound {} exceeds 2", crate::rational::format_rational(&r))));
    }
    Ok(())
}

/// Positions 0..=n-k EFX-feasible under C1 and positions n-k..n tEFX-feasible
/// under C2.
pub fn tefx_two_group(m: usize, n: usize, c1: &CostOracle, c2: &CostOracle, k: usize) -> Result<Vec<ChoreSet>> {
    Ok(tefx_two_group_traced(m, n, c1, c2, k)?.0)
}

pub fn tefx_two_group_traced(
    m: usize,
    n: usize,
    c1: &CostOracle,
    c2: &CostOracle,
    k: usize,
) -> Result<(Vec<ChoreSet>, TefxTrace)> {
    if k == 0 || k > n {
        return Err(Error::InvalidInput(format!("k must lie in 1..={n}, got {k}")));
    }
    for o in [c1, c2] {
        if o.chore_count() != m {
            return Err(Error::DimensionMismatch(format!("oracle has {} chores, expected {m}", o.chore_count())));
        }
    }
    check_c2(c2)?;
    let mut trace = TefxTrace::default();
    let bundles = level(m, n, c1, c2, k, &mut trace)?;
    if !split_properties(&bundles, c1, c2, k) {
        return Err(Error::GuaranteeViolated {
            what: "two-group tEFX properties".into(),
            trace: format!("k = {k}, bundles {bundles:?}"),
        });
    }
    Ok((bundles, trace))
}

fn split_properties(b: &[ChoreSet], c1: &CostOracle, c2: &CostOracle, k: usize) -> bool {
    let n = b.len();
    (0..=n - k).all(|i| is_efx_feasible(c1, b, i)) && (n - k..n).all(|i| is_tefx_feasible(c2, b, i))
}

fn level(m: usize, n: usize, c1: &CostOracle, c2: &CostOracle, k: usize, trace: &mut TefxTrace) -> Result<Vec<ChoreSet>> {
    if k == 1 {
        let mut x = identical_cost_efx(m, n, c1)?;
        let t = min_cost_index(c2, &x, 0..n).expect("n > 0");
        x.swap(t, n - 1);
        return Ok(x);
    }
    let mut x = level(m, n, c1, c2, k - 1, trace)?;
    let last_c1 = n - k;
    trace.levels.push((k, phi(&x, k), last_c1));
    loop {
        if let Some(i) = (0..=last_c1).find(|&i| is_tefx_feasible(c2, &x, i)) {
            x.swap(i, last_c1);
            trace.levels.last_mut().expect("pushed").2 = i;
            return Ok(x);
        }
        let t = min_cost_index(c2, &x, last_c1 + 1..n).expect("k >= 2");
        let global = min_cost_index(c2, &x, 0..n).expect("n > 0");
        let target_global_min = c2.cost(x[global]) == c2.cost(x[t]);
        let mut best: Option<(usize, Rational)> = None;
        for i in 0..=last_c1 {
            let r = max_removal_cost(c1, x[i]);
            if x[i].len() > 0 && best.as_ref().map_or(true, |(_, b)| r > *b) {
                best = Some((i, r));
            }
        }
        let (s, _) = best.expect("an infeasible bundle is non-empty");
        let (chore, _) = argmax_removal(|b| c1.cost(b), x[s]).expect("non-empty");
        let phi_before = phi(&x, k);
        x[s].remove(chore);
        x[t].insert(chore);
        let phi_after = phi(&x, k);
        trace.moves.push(TefxMove {
            k,
            from: s,
            to: t,
            chore,
            phi_before,
            phi_after,
            c1_bundles_efx: (0..=last_c1).all(|i| is_efx_feasible(c1, &x, i)),
            c2_bundles_tefx: (last_c1 + 1..n).all(|i| is_tefx_feasible(c2, &x, i)),
            target_global_min,
        });
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupSpec {
    pub group1: Vec<usize>,
    pub group2: Vec<usize>,
    pub group3: Option<usize>,
}

impl GroupSpec {
    pub fn validate(&self, inst: &Instance) -> Result<()> {
        let n = inst.n();
        let mut seen = vec![false; n];
        for &a in self.group1.iter().chain(&self.group2).chain(self.group3.iter()) {
            if a >= n || seen[a] {
                return Err(Error::InvalidInput(format!("groups must partition the {n} agents (agent {})", a + 1)));
            }
            seen[a] = true;
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::InvalidInput(format!("groups must partition the {n} agents")));
        }
        for g in [&self.group1, &self.group2] {
            if let Some(&first) = g.first() {
                if let Some(&other) = g.iter().find(|&&a| inst.oracle(a) != inst.oracle(first)) {
                    return Err(Error::InvalidInput(format!("agents {} and {} share a group but not a cost function", first + 1, other + 1)));
                }
            }
        }
        if let Some(&a) = self.group2.first() {
            check_c2(inst.oracle(a))?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct ThreeGroupRun {
    pub allocation: Allocation,
    /// Bundles as produced by the two-group routine, before assignment.
    pub positions: Vec<ChoreSet>,
    pub trace: TefxTrace,
    /// Position taken by the group-3 agent.
    pub group3_pick: Option<usize>,
}

pub fn tefx_three_group(inst: &Instance, groups: &GroupSpec) -> Result<Allocation> {
    Ok(tefx_three_group_traced(inst, groups)?.allocation)
}

pub fn tefx_three_group_traced(inst: &Instance, groups: &GroupSpec) -> Result<ThreeGroupRun> {
    groups.validate(inst)?;
    let (m, n) = (inst.m(), inst.n());
    let l = groups.group2.len();
    let mut g1 = groups.group1.clone();
    let mut g2 = groups.group2.clone();
    g1.sort_unstable();
    g2.sort_unstable();
    let c2 = g2.first().map(|&a| inst.oracle(a));
    let c1 = match (g1.first(), groups.group3, c2) {
        (Some(&a), _, _) => inst.oracle(a),
        (None, Some(a), _) => inst.oracle(a),
        (None, None, Some(c)) => c,
        (None, None, None) => unreachable!("n >= 1"),
    };

    let mut trace = TefxTrace::default();
    let k = l + usize::from(groups.group3.is_some());
    let x = match c2 {
        Some(c2) if k >= 1 => {
            let (x, t) = tefx_two_group_traced(m, n, c1, c2, k)?;
            trace = t;
            x
        }
        _ => identical_cost_efx(m, n, c1)?,
    };

    let mut bundles = vec![ChoreSet::EMPTY; n];
    let mut pick = None;
    // 0-based split: positions 0..n-l for group 1 (plus the pick), the rest for group 2
    let split = n - l;
    let mut to_g1: Vec<usize> = (0..split).collect();
    let mut to_g2: Vec<usize> = (split..n).collect();
    if let Some(a3) = groups.group3 {
        let i = min_cost_index(inst.oracle(a3), &x, 0..n).expect("n > 0");
        pick = Some(i);
        bundles[a3] = x[i];
        if i < split {
            to_g1.retain(|&p| p != i);
        } else {
            to_g1 = (0..split - 1).collect();
            to_g2 = (split - 1..n).filter(|&p| p != i).collect();
        }
    }
    for (a, p) in g1.iter().zip(&to_g1) {
        bundles[*a] = x[*p];
    }
    for (a, p) in g2.iter().zip(&to_g2) {
        bundles[*a] = x[*p];
    }
    let allocation = Allocation::new(m, bundles)?;
    let report = check_tefx(&allocation, inst)?;
    if !report.verdict {
        return Err(Error::GuaranteeViolated {
            what: "three-group tEFX".into(),
            trace: format!("{allocation}: {}", report.witnesses.iter().map(|w| w.to_string()).collect::<Vec<_>>().join(" ")),
        });
    }
    Ok(ThreeGroupRun { allocation, positions: x, trace, group3_pick: pick })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::frac;
    use crate::set;

    fn add(v: &[Rational]) -> CostOracle {
        CostOracle::additive(v.to_vec()).unwrap()
    }

    fn ints(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| int(x)).collect()
    }

    #[test]
    fn identical_examples() {
        let o = add(&ints(&[5, 3, 3, 3]));
        assert_eq!(identical_cost_efx(4, 2, &o).unwrap(), vec![set![1, 4], set![2, 3]]);
        let o = add(&ints(&[4, 3, 2, 1]));
        assert_eq!(identical_cost_efx(4, 2, &o).unwrap(), vec![set![1, 4], set![2, 3]]);
        let o = add(&ints(&[7, 1, 2]));
        let b = identical_cost_efx(3, 3, &o).unwrap();
        assert!(b.iter().all(|x| x.len() == 1));
    }

    #[test]
    fn identical_rejects_bad_args() {
        let o = add(&ints(&[1, 1]));
        assert!(identical_cost_efx(2, 0, &o).is_err());
        assert!(identical_cost_efx(3, 2, &o).is_err());
    }

    #[test]
    fn two_group_base_case_reorders() {
        let c1 = add(&ints(&[4, 3, 2, 1]));
        let c2 = add(&[int(1), int(2), frac(3, 2), frac(19, 10)]);
        let x = tefx_two_group(4, 2, &c1, &c2, 1).unwrap();
        assert_eq!(x, vec![set![2, 3], set![1, 4]]);
    }

    #[test]
    fn two_group_rejects() {
        let c1 = add(&ints(&[4, 3, 2, 1]));
        let steep = add(&ints(&[1, 3, 1, 1]));
        assert!(matches!(tefx_two_group(4, 2, &c1, &steep, 1), Err(Error::Precondition(_))));
        assert!(matches!(tefx_two_group(4, 2, &c1, &c1.clone(), 3), Err(Error::InvalidInput(_))));
        let table = CostOracle::tabulated(2, ints(&[0, 1, 1, 2])).unwrap();
        assert!(tefx_two_group(2, 2, &table, &table, 1).is_err());
    }

    #[test]
    fn loop_moves_decrease_phi() {
        // C1 piles everything on few bundles relative to C2
        let c1 = add(&ints(&[9, 8, 1, 1, 1, 1, 1, 1]));
        let c2 = add(&ints(&[1, 1, 2, 2, 2, 2, 1, 1]));
        for k in 1..=3 {
            let (x, trace) = tefx_two_group_traced(8, 3, &c1, &c2, k).unwrap();
            assert!(split_properties(&x, &c1, &c2, k));
            for mv in &trace.moves {
                assert_eq!(mv.phi_before, mv.phi_after + 1);
                assert!(mv.c1_bundles_efx && mv.c2_bundles_tefx && mv.target_global_min);
            }
        }
    }

    #[test]
    fn three_group_singletons() {
        let c1 = add(&ints(&[6, 5, 4, 3, 2, 1]));
        let c2 = add(&ints(&[2, 1, 2, 1, 2, 2]));
        let c3 = CostOracle::capped_additive(ints(&[3, 3, 3, 1, 1, 1]), int(5)).unwrap();
        let inst = Instance::new(6, vec![c1, c2, c3]).unwrap();
        let g = GroupSpec { group1: vec![0], group2: vec![1], group3: Some(2) };
        let x = tefx_three_group(&inst, &g).unwrap();
        assert!(check_tefx(&x, &inst).unwrap().verdict);
        assert!(x.is_full());
    }

    #[test]
    fn degenerate_group_shapes() {
        let c1 = add(&ints(&[6, 5, 4, 3, 2, 1]));
        let c2 = add(&ints(&[2, 1, 2, 1, 2, 2]));
        let c3 = CostOracle::capped_additive(ints(&[3, 3, 3, 1, 1, 1]), int(5)).unwrap();
        let shapes = [
            (vec![c1.clone(), c2.clone()], GroupSpec { group1: vec![0], group2: vec![1], group3: None }),
            (vec![c2.clone(), c3.clone()], GroupSpec { group1: vec![], group2: vec![0], group3: Some(1) }),
            (vec![c1.clone(), c3.clone()], GroupSpec { group1: vec![0], group2: vec![], group3: Some(1) }),
            (vec![c2.clone(), c2.clone()], GroupSpec { group1: vec![], group2: vec![0, 1], group3: None }),
            (vec![c3.clone()], GroupSpec { group1: vec![], group2: vec![], group3: Some(0) }),
        ];
        for (oracles, g) in shapes {
            let inst = Instance::new(6, oracles).unwrap();
            let x = tefx_three_group(&inst, &g).unwrap();
            assert!(check_tefx(&x, &inst).unwrap().verdict, "{g:?}");
        }
    }

    #[test]
    fn group_validation() {
        let c1 = add(&ints(&[6, 5, 4]));
        let c2 = add(&ints(&[1, 1, 1]));
        let inst = Instance::new(3, vec![c1.clone(), c2.clone(), c1]).unwrap();
        let bad = [
            GroupSpec { group1: vec![0], group2: vec![1], group3: None },
            GroupSpec { group1: vec![0, 1], group2: vec![], group3: Some(2) },
            GroupSpec { group1: vec![0, 0], group2: vec![1], group3: Some(2) },
            GroupSpec { group1: vec![], group2: vec![0, 1], group3: Some(2) },
        ];
        for g in bad {
            assert!(tefx_three_group(&inst, &g).is_err(), "{g:?}");
        }
        let ok = GroupSpec { group1: vec![0, 2], group2: vec![1], group3: None };
        assert!(tefx_three_group(&inst, &ok).is_ok());
    }
}
