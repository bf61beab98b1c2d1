//! Invariants over seeded and arbitrary instances.

mod support;

use chorefair::fairness::{check_alpha_efx, check_partial_property2, is_efx_feasible};
use chorefair::oracles::{generate_instance, perturb_nondegenerate, CostOracle, Family};
use chorefair::rational::int;
use chorefair::round_robin::round_robin_allocate;
use chorefair::tefx::identical_cost_efx;
use chorefair::three_agent::{classify_case, find_subset_d, solve_case, three_agent_2efx, CaseId};
use chorefair::{ChoreSet, Instance, Rational};
use proptest::prelude::*;

fn family(k: u8) -> Family {
    match k % 3 {
        0 => Family::Additive,
        1 => Family::CappedAdditive,
        _ => Family::MaxOfAdditive,
    }
}

fn arb_costs(n: usize, m: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = Vec<Vec<i64>>> {
    m.prop_flat_map(move |m| prop::collection::vec(prop::collection::vec(1i64..12, m), n))
}

fn additive(rows: &[Vec<i64>]) -> Instance {
    let refs: Vec<&[i64]> = rows.iter().map(|r| r.as_slice()).collect();
    support::additive(&refs)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn exactly_one_case_matches(fam in 0u8..3, seed in 0u64..5000, m in 6usize..11, perturb in any::<bool>()) {
        let mut inst = generate_instance(&family(fam), 3, m, seed).unwrap();
        if perturb {
            inst = perturb_nondegenerate(&inst, None).unwrap().0;
        }
        let cases = support::matching_cases(&inst);
        prop_assert_eq!(cases.len(), 1, "{:?}", cases);
        let (case, ctx) = classify_case(&inst).unwrap();
        prop_assert_eq!(case, cases[0]);
        let top = |r: usize, t: usize| ctx.anchors[r][t];
        match case {
            CaseId::A2 | CaseId::D23 => prop_assert_eq!(top(0, 1), top(1, 1)),
            CaseId::C => prop_assert_eq!(top(0, 0), top(1, 0)),
            CaseId::D1 => prop_assert_eq!(top(0, 0), top(1, 1)),
            CaseId::B1 | CaseId::B21 | CaseId::B221 | CaseId::B2221 | CaseId::B2222 => {
                let mut a = [top(0, 0), top(0, 1)];
                let mut b = [top(1, 0), top(1, 1)];
                a.sort();
                b.sort();
                prop_assert_eq!(a, b);
            }
            _ => {}
        }
    }

    #[test]
    fn small_integer_instances_are_total(rows in arb_costs(3, 6..=8)) {
        let inst = additive(&rows);
        let cases = support::matching_cases(&inst);
        prop_assert_eq!(cases.len(), 1);
        prop_assert_eq!(classify_case(&inst).unwrap().0, cases[0]);
        let x = three_agent_2efx(&inst).unwrap();
        prop_assert!(check_alpha_efx(&x, &inst, &int(2)).unwrap().verdict);
    }

    #[test]
    fn case_outcomes_and_certificates(fam in 0u8..3, seed in 0u64..5000, m in 6usize..11) {
        let inst = generate_instance(&family(fam), 3, m, seed).unwrap();
        let (case, ctx) = classify_case(&inst).unwrap();
        let out = solve_case(&inst, case, &ctx).unwrap();
        prop_assert!(check_alpha_efx(&out.allocation, &inst, &int(2)).unwrap().verdict);
        let prop2 = check_partial_property2(&out.allocation, &inst);
        for i in 0..3 {
            let t = inst.oracle(i).top_chore_order();
            let (a, b) = (out.allocation.owner(t[0]), out.allocation.owner(t[1]));
            if a.is_some() && b.is_some() && a != b {
                prop_assert!(prop2[i], "agent {} with split top pair", i + 1);
            }
        }
        for c in &out.certificates {
            prop_assert!(c.holds(), "{:?}", c);
        }
    }

    #[test]
    fn subset_d_meets_both_inequalities(costs in prop::collection::vec(0i64..10, 3..10), anchor_cost in 0i64..10, thr in 1i64..30) {
        let mut all = vec![anchor_cost];
        all.extend(&costs);
        let o = CostOracle::additive(all.iter().map(|&x| int(x)).collect()).unwrap();
        let pool = ChoreSet::full(all.len()).without(0);
        let thr = int(thr);
        match find_subset_d(&o, 0, pool, &thr) {
            Ok(d) => {
                prop_assert!(d.is_subset(pool));
                prop_assert!(o.cost(d.with(0)) >= thr);
                for c in d {
                    prop_assert!(o.cost(d.without(c).with(0)) < thr);
                }
            }
            Err(_) => prop_assert!(o.cost(pool.with(0)) < thr || int(anchor_cost) >= thr),
        }
    }

    #[test]
    fn identical_cost_bundles_are_efx(fam in 0u8..3, seed in 0u64..5000, m in 1usize..12, k in 1usize..5) {
        let inst = generate_instance(&family(fam), 1, m, seed).unwrap();
        let o = inst.oracle(0);
        let b = identical_cost_efx(m, k, o).unwrap();
        prop_assert_eq!(b.len(), k);
        let mut union = ChoreSet::EMPTY;
        for x in &b {
            prop_assert!(union.is_disjoint(*x));
            union = union.union(*x);
        }
        prop_assert_eq!(union, ChoreSet::full(m));
        for i in 0..k {
            prop_assert!(is_efx_feasible(o, &b, i));
        }
    }

    #[test]
    fn round_robin_earlier_agents_do_weakly_better(rows in (2usize..5).prop_flat_map(|n| arb_costs(n, 3..=14))) {
        let inst = additive(&rows);
        let n = inst.n();
        let order: Vec<usize> = (0..n).collect();
        let (_, trace) = round_robin_allocate(&inst, &order).unwrap();
        for p in &trace.picks {
            for q in &trace.picks {
                if p.round == q.round && p.agent < q.agent {
                    let o = inst.oracle(p.agent);
                    prop_assert!(o.singleton(p.chore) <= o.singleton(q.chore));
                }
            }
        }
        for a in 0..n {
            let mine: Vec<Rational> = trace.picks.iter().filter(|p| p.agent == a).map(|p| inst.oracle(a).singleton(p.chore)).collect();
            prop_assert!(mine.windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn generation_is_reproducible(fam in 0u8..3, seed in any::<u64>(), n in 1usize..5, m in 1usize..12) {
        let a = generate_instance(&family(fam), n, m, seed).unwrap();
        let b = generate_instance(&family(fam), n, m, seed).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn perturbed_additive_singletons_positive(costs in prop::collection::vec(0i64..5, 1..12)) {
        let o = CostOracle::additive(costs.iter().map(|&x| int(x)).collect()).unwrap();
        let inst = Instance::new(costs.len(), vec![o]).unwrap();
        let (p, _) = perturb_nondegenerate(&inst, None).unwrap();
        prop_assert!(p.oracle(0).singletons().iter().all(|c| *c > int(0)));
        prop_assert!(p.oracle(0).ratio_bound().is_ok());
    }
}
