//! Cost oracles, structural validators, generators and the non-degeneracy perturbation.

mod generate;
mod perturb;
mod validate;

pub use generate::{generate_instance, Family};
pub use perturb::{min_positive_gap, perturb_nondegenerate, PerturbationParams};
pub use validate::{validate_oracle, Check, CheckLimits, OracleReport, Violation};

use num_traits::{Signed, Zero};

use crate::chores::ChoreSet;
use crate::error::{Error, Result};
use crate::rational::Rational;

/// Largest m a tabulated oracle may have (2^m stored values).
pub const MAX_TABLE_CHORES: usize = 20;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CostOracle {
    Additive(Vec<Rational>),
    /// `values[mask]` is the cost of the subset with that bitmask.
    TabulatedMonotone { m: usize, values: Vec<Rational> },
    CappedAdditive { costs: Vec<Rational>, cap: Rational },
    MaxOfAdditive(Vec<Vec<Rational>>),
}

fn check_nonneg(what: &str, v: &[Rational]) -> Result<()> {
    match v.iter().position(|x| x.is_negative()) {
        Some(c) => Err(Error::InvalidOracle(format!("{what}: negative cost for c{}", c + 1))),
        None => Ok(()),
    }
}

fn sum_over(costs: &[Rational], s: ChoreSet) -> Rational {
    let mut acc = Rational::zero();
    for c in s {
        acc += &costs[c];
    }
    acc
}

impl CostOracle {
    pub fn additive(costs: Vec<Rational>) -> Result<Self> {
        check_nonneg("additive", &costs)?;
        Ok(CostOracle::Additive(costs))
    }

    /// The table must hold all 2^m values with a zero empty-set entry and no
    /// negative entries. Monotonicity is checked by [`validate_oracle`].
    pub fn tabulated(m: usize, values: Vec<Rational>) -> Result<Self> {
        if m > MAX_TABLE_CHORES {
            return Err(Error::InvalidOracle(format!("table with m = {m} exceeds {MAX_TABLE_CHORES} chores")));
        }
        if values.len() != 1usize << m {
            return Err(Error::InvalidOracle(format!("table has {} entries, need 2^{m}", values.len())));
        }
        if !values[0].is_zero() {
            return Err(Error::InvalidOracle("table assigns non-zero cost to the empty set".into()));
        }
        if let Some(mask) = values.iter().position(|v| v.is_negative()) {
            return Err(Error::InvalidOracle(format!("negative table entry for {}", ChoreSet::from_bits(mask as u64))));
        }
        Ok(CostOracle::TabulatedMonotone { m, values })
    }

    pub fn capped_additive(costs: Vec<Rational>, cap: Rational) -> Result<Self> {
        check_nonneg("capped_additive", &costs)?;
        if cap.is_negative() {
            return Err(Error::InvalidOracle("capped_additive: negative cap".into()));
        }
        Ok(CostOracle::CappedAdditive { costs, cap })
    }

    pub fn max_of_additive(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let Some(first) = rows.first() else {
            return Err(Error::InvalidOracle("max_of_additive needs at least one row".into()));
        };
        if rows.iter().any(|r| r.len() != first.len()) {
            return Err(Error::InvalidOracle("max_of_additive rows differ in length".into()));
        }
        for r in &rows {
            check_nonneg("max_of_additive", r)?;
        }
        Ok(CostOracle::MaxOfAdditive(rows))
    }

    pub fn chore_count(&self) -> usize {
        match self {
            CostOracle::Additive(c) => c.len(),
            CostOracle::TabulatedMonotone { m, .. } => *m,
            CostOracle::CappedAdditive { costs, .. } => costs.len(),
            CostOracle::MaxOfAdditive(rows) => rows[0].len(),
        }
    }

    pub fn is_additive(&self) -> bool {
        matches!(self, CostOracle::Additive(_))
    }

    /// Cost of `s`. The caller guarantees `s ⊆ [m]`; see [`CostOracle::evaluate`]
    /// for the checked form.
    pub fn cost(&self, s: ChoreSet) -> Rational {
        if s.is_empty() {
            return Rational::zero();
        }
        match self {
            CostOracle::Additive(c) => sum_over(c, s),
            CostOracle::TabulatedMonotone { values, .. } => values[s.bits() as usize].clone(),
            CostOracle::CappedAdditive { costs, cap } => {
                let t = sum_over(costs, s);
                if &t > cap {
                    cap.clone()
                } else {
                    t
                }
            }
            CostOracle::MaxOfAdditive(rows) => {
                rows.iter().map(|r| sum_over(r, s)).max().expect("at least one row")
            }
        }
    }

    pub fn evaluate(&self, s: ChoreSet) -> Result<Rational> {
        let m = self.chore_count();
        if s.span() > m {
            return Err(Error::ChoreOutOfRange { chore: s.span(), m });
        }
        Ok(self.cost(s))
    }

    pub fn singleton(&self, c: usize) -> Rational {
        self.cost(ChoreSet::singleton(c))
    }

    pub fn singletons(&self) -> Vec<Rational> {
        (0..self.chore_count()).map(|c| self.singleton(c)).collect()
    }

    /// All 2^m costs indexed by mask.
    pub fn tabulate(&self) -> Result<Vec<Rational>> {
        let m = self.chore_count();
        if m > MAX_TABLE_CHORES {
            return Err(Error::EnumerationLimit {
                what: "tabulation".into(),
                needed: format!("2^{m}"),
                limit: format!("2^{MAX_TABLE_CHORES}"),
            });
        }
        if let CostOracle::TabulatedMonotone { values, .. } = self {
            return Ok(values.clone());
        }
        Ok((0..1u64 << m).map(|b| self.cost(ChoreSet::from_bits(b))).collect())
    }

    pub fn to_table(&self) -> Result<CostOracle> {
        Ok(CostOracle::TabulatedMonotone { m: self.chore_count(), values: self.tabulate()? })
    }

    /// max singleton / min singleton. `agent` only labels the error.
    pub fn ratio_bound_of(&self, agent: usize) -> Result<Rational> {
        let s = self.singletons();
        if let Some(c) = s.iter().position(|x| x.is_zero()) {
            return Err(Error::ZeroSingletonCost { agent: agent + 1, chore: c + 1 });
        }
        let max = s.iter().max().ok_or_else(|| Error::InvalidOracle("no chores".into()))?;
        let min = s.iter().min().expect("non-empty");
        Ok(max / min)
    }

    pub fn ratio_bound(&self) -> Result<Rational> {
        self.ratio_bound_of(0)
    }

    /// Chores by descending singleton cost, ties to the lower index.
    pub fn top_chore_order(&self) -> Vec<usize> {
        let s = self.singletons();
        let mut order: Vec<usize> = (0..s.len()).collect();
        order.sort_by(|&a, &b| s[b].cmp(&s[a]).then(a.cmp(&b)));
        order
    }
}

pub fn ratio_bound(oracle: &CostOracle) -> Result<Rational> {
    oracle.ratio_bound()
}

pub fn top_chore_order(oracle: &CostOracle) -> Vec<usize> {
    oracle.top_chore_order()
}

pub fn evaluate_cost(oracle: &CostOracle, s: ChoreSet) -> Result<Rational> {
    oracle.evaluate(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};
    use crate::set;
    use crate::verify::counterexample_instance;

    fn ints(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| int(x)).collect()
    }

    #[test]
    fn counterexample_agent1_bundle_cost() {
        let inst = counterexample_instance(int(26), int(12)).unwrap();
        assert_eq!(inst.oracle(0).evaluate(set![3, 4, 5]).unwrap(), int(5));
    }

    #[test]
    fn empty_set_costs_zero_everywhere() {
        let table = CostOracle::tabulated(1, vec![int(0), int(4)]).unwrap();
        for o in [
            CostOracle::additive(ints(&[3, 4])).unwrap(),
            CostOracle::capped_additive(ints(&[3, 4]), int(5)).unwrap(),
            CostOracle::max_of_additive(vec![ints(&[1, 2]), ints(&[2, 1])]).unwrap(),
            table,
        ] {
            assert_eq!(o.cost(ChoreSet::EMPTY), int(0));
        }
    }

    #[test]
    fn capped_and_max_of_additive() {
        let o = CostOracle::capped_additive(ints(&[3, 3, 3]), int(5)).unwrap();
        assert_eq!(o.evaluate(set![1, 2, 3]).unwrap(), int(5));
        assert_eq!(o.evaluate(set![1]).unwrap(), int(3));
        let o = CostOracle::max_of_additive(vec![ints(&[1, 5, 0]), ints(&[4, 1, 1])]).unwrap();
        assert_eq!(o.cost(set![1, 3]), int(5));
        assert_eq!(o.cost(set![2]), int(5));
        assert_eq!(o.cost(set![1, 2, 3]), int(6));
    }

    #[test]
    fn evaluate_errors() {
        let o = CostOracle::additive(ints(&[1, 2])).unwrap();
        assert!(matches!(o.evaluate(set![3]), Err(Error::ChoreOutOfRange { chore: 3, m: 2 })));
        assert!(CostOracle::tabulated(2, ints(&[0, 1, 1])).is_err());
        assert!(CostOracle::tabulated(1, ints(&[1, 1])).is_err());
        assert!(CostOracle::additive(vec![int(-1)]).is_err());
        assert!(CostOracle::max_of_additive(vec![]).is_err());
        assert!(CostOracle::max_of_additive(vec![ints(&[1]), ints(&[1, 2])]).is_err());
    }

    #[test]
    fn ratio_bound_examples() {
        let inst = counterexample_instance(int(26), int(12)).unwrap();
        assert_eq!(inst.oracle(0).ratio_bound().unwrap(), int(20));
        assert_eq!(CostOracle::additive(ints(&[7, 7, 7])).unwrap().ratio_bound().unwrap(), int(1));
        let o = CostOracle::additive(vec![int(2), frac(9, 5), frac(6, 5), int(1)]).unwrap();
        assert_eq!(o.ratio_bound().unwrap(), int(2));
        let z = CostOracle::additive(ints(&[2, 0])).unwrap();
        assert_eq!(z.ratio_bound_of(1), Err(Error::ZeroSingletonCost { agent: 2, chore: 2 }));
    }

    #[test]
    fn top_orders() {
        let inst = counterexample_instance(int(26), int(12)).unwrap();
        assert_eq!(inst.oracle(0).top_chore_order(), vec![0, 1, 2, 5, 3, 4]);
        assert_eq!(inst.oracle(1).top_chore_order(), vec![1, 0, 2, 3, 4, 5]);
        assert_eq!(inst.oracle(2).top_chore_order(), vec![3, 4, 5, 2, 1, 0]);
        let flat = CostOracle::additive(ints(&[1, 1, 1, 1])).unwrap();
        assert_eq!(flat.top_chore_order(), vec![0, 1, 2, 3]);
    }

    #[test]
    fn tabulate_matches_cost() {
        let o = CostOracle::capped_additive(ints(&[3, 1, 2]), int(4)).unwrap();
        let t = o.to_table().unwrap();
        for b in 0..8 {
            let s = ChoreSet::from_bits(b);
            assert_eq!(t.cost(s), o.cost(s));
        }
    }
}
