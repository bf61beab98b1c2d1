//! Round robin: agents take turns picking their least costly remaining chore.

use num_bigint::BigInt;
use num_traits::One;

use crate::allocation::Allocation;
use crate::chores::ChoreSet;
use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::rational::Rational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pick {
    pub round: usize,
    pub agent: usize,
    pub chore: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RoundRobinTrace {
    pub picks: Vec<Pick>,
    /// ⌈m/n⌉.
    pub rounds: usize,
}

impl RoundRobinTrace {
    /// The guarantees below need at least three rounds.
    pub fn in_guarantee_scope(&self) -> bool {
        self.rounds >= 3
    }
}

pub fn rounds(m: usize, n: usize) -> usize {
    m.div_ceil(n)
}

/// 1 + (α−1)/(ℓ−1) for ℓ = ⌈m/n⌉ ≥ 2.
pub fn efx_factor(alpha: &Rational, m: usize, n: usize) -> Option<Rational> {
    let l = rounds(m, n);
    (l >= 2).then(|| Rational::one() + (alpha - Rational::one()) / Rational::from_integer(BigInt::from(l - 1)))
}

pub fn validate_order(order: &[usize], n: usize) -> Result<()> {
    let mut seen = vec![false; n];
    for &a in order {
        if a >= n || std::mem::replace(&mut seen[a], true) {
            return Err(Error::InvalidInput(format!("agent order must be a permutation of 1..={n}")));
        }
    }
    if order.len() != n {
        return Err(Error::InvalidInput(format!("agent order must be a permutation of 1..={n}")));
    }
    Ok(())
}

pub fn round_robin_allocate(inst: &Instance, order: &[usize]) -> Result<(Allocation, RoundRobinTrace)> {
    let (n, m) = (inst.n(), inst.m());
    validate_order(order, n)?;
    let singles: Vec<Vec<Rational>> = inst.oracles().iter().map(|o| o.singletons()).collect();
    let mut remaining = ChoreSet::full(m);
    let mut x = Allocation::empty(m, n);
    let mut picks = Vec::with_capacity(m);
    let mut round = 0;
    while !remaining.is_empty() {
        for &a in order {
            let Some(c) = remaining.iter().min_by(|&p, &q| singles[a][p].cmp(&singles[a][q]).then(p.cmp(&q))) else {
                break;
            };
            remaining.remove(c);
            x.assign(a, c)?;
            picks.push(Pick { round, agent: a, chore: c });
        }
        round += 1;
    }
    Ok((x, RoundRobinTrace { picks, rounds: rounds(m, n) }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fairness::{check_alpha_efx, check_tefx};
    use crate::oracles::CostOracle;
    use crate::rational::{frac, int};
    use crate::set;

    fn identical(costs: Vec<Rational>, n: usize) -> Instance {
        let m = costs.len();
        Instance::new(m, vec![CostOracle::additive(costs).unwrap(); n]).unwrap()
    }

    #[test]
    fn two_three_three_four() {
        let inst = identical(vec![int(2), int(3), int(3), int(4)], 2);
        let (x, tr) = round_robin_allocate(&inst, &[0, 1]).unwrap();
        assert_eq!(x, Allocation::new(4, vec![set![1, 3], set![2, 4]]).unwrap());
        assert_eq!(tr.rounds, 2);
        assert!(!tr.in_guarantee_scope());
        assert!(check_tefx(&x, &inst).unwrap().verdict);
    }

    #[test]
    fn m_equals_n() {
        let inst = identical(vec![int(2), int(7), int(1)], 3);
        let (x, _) = round_robin_allocate(&inst, &[2, 0, 1]).unwrap();
        assert!(x.bundles().iter().all(|b| b.len() == 1));
        assert!(check_alpha_efx(&x, &inst, &int(1)).unwrap().verdict);
    }

    #[test]
    fn six_chores_factor() {
        let inst = identical(vec![int(1), frac(3, 2), int(2), frac(5, 2), int(3), int(4)], 2);
        let (x, tr) = round_robin_allocate(&inst, &[0, 1]).unwrap();
        assert_eq!(inst.cost(0, x.bundle(0)), int(6));
        assert_eq!(inst.cost(1, x.bundle(1)), int(8));
        assert_eq!(tr.rounds, 3);
        let f = efx_factor(&int(4), 6, 2).unwrap();
        assert_eq!(f, frac(5, 2));
        assert!(check_alpha_efx(&x, &inst, &f).unwrap().verdict);
    }

    #[test]
    fn bad_orders() {
        let inst = identical(vec![int(1); 3], 2);
        for o in [&[0][..], &[0, 0], &[0, 2], &[0, 1, 1]] {
            assert!(round_robin_allocate(&inst, o).is_err());
        }
    }

    #[test]
    fn trace_monotone_per_agent() {
        let inst = identical(vec![int(5), int(1), int(4), int(2), int(3), int(6), int(7)], 3);
        let (_, tr) = round_robin_allocate(&inst, &[1, 2, 0]).unwrap();
        assert_eq!(tr.picks.len(), 7);
        assert_eq!(tr.picks.iter().map(|p| p.chore).collect::<Vec<_>>(), vec![1, 3, 4, 2, 0, 5, 6]);
        assert_eq!(tr.picks.last().unwrap().round, 2);
    }
}
