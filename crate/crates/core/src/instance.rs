use std::borrow::Cow;

use crate::chores::{ChoreSet, MAX_CHORES};
use crate::error::{Error, Result};
use crate::oracles::CostOracle;
use crate::rational::Rational;

/// Anything that can answer "what does agent i pay for S".
pub trait CostView {
    fn m(&self) -> usize;
    fn n(&self) -> usize;
    fn cost(&self, agent: usize, s: ChoreSet) -> Cow<'_, Rational>;
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    m: usize,
    oracles: Vec<CostOracle>,
}

impl Instance {
    pub fn new(m: usize, oracles: Vec<CostOracle>) -> Result<Self> {
        if m == 0 || m > MAX_CHORES {
            return Err(Error::InvalidInput(format!("m must be in 1..={MAX_CHORES}, got {m}")));
        }
        if oracles.is_empty() {
            return Err(Error::InvalidInput("at least one agent required".into()));
        }
        for (i, o) in oracles.iter().enumerate() {
            if o.chore_count() != m {
                return Err(Error::DimensionMismatch(format!(
                    "agent {} oracle covers {} chores, instance has {m}",
                    i + 1,
                    o.chore_count()
                )));
            }
        }
        Ok(Instance { m, oracles })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.oracles.len()
    }

    pub fn oracle(&self, i: usize) -> &CostOracle {
        &self.oracles[i]
    }

    pub fn oracles(&self) -> &[CostOracle] {
        &self.oracles
    }

    pub fn into_oracles(self) -> Vec<CostOracle> {
        self.oracles
    }

    pub fn cost(&self, i: usize, s: ChoreSet) -> Rational {
        self.oracles[i].cost(s)
    }

    pub fn all_chores(&self) -> ChoreSet {
        ChoreSet::full(self.m)
    }

    /// Same chores, agents listed in `order` (`order[r]` becomes agent r).
    pub fn permuted(&self, order: &[usize]) -> Instance {
        Instance { m: self.m, oracles: order.iter().map(|&i| self.oracles[i].clone()).collect() }
    }

    /// Every agent's 2^m costs, for repeated exact queries.
    pub fn cost_table(&self) -> Result<CostTable> {
        CostTable::new(self)
    }
}

impl CostView for Instance {
    fn m(&self) -> usize {
        self.m
    }
    fn n(&self) -> usize {
        self.oracles.len()
    }
    fn cost(&self, agent: usize, s: ChoreSet) -> Cow<'_, Rational> {
        match &self.oracles[agent] {
            CostOracle::TabulatedMonotone { values, .. } => Cow::Borrowed(&values[s.bits() as usize]),
            o => Cow::Owned(o.cost(s)),
        }
    }
}

/// Fully tabulated costs of an instance.
#[derive(Clone, Debug)]
pub struct CostTable {
    m: usize,
    rows: Vec<Vec<Rational>>,
}

impl CostTable {
    pub fn new(inst: &Instance) -> Result<Self> {
        let rows = inst.oracles.iter().map(|o| o.tabulate()).collect::<Result<Vec<_>>>()?;
        Ok(CostTable { m: inst.m, rows })
    }

    pub fn row(&self, agent: usize) -> &[Rational] {
        &self.rows[agent]
    }
}

impl CostView for CostTable {
    fn m(&self) -> usize {
        self.m
    }
    fn n(&self) -> usize {
        self.rows.len()
    }
    fn cost(&self, agent: usize, s: ChoreSet) -> Cow<'_, Rational> {
        Cow::Borrowed(&self.rows[agent][s.bits() as usize])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    #[test]
    fn rejects_bad_dimensions() {
        let o = CostOracle::additive(vec![int(1), int(2)]).unwrap();
        assert!(Instance::new(3, vec![o.clone()]).is_err());
        assert!(Instance::new(2, vec![]).is_err());
        assert!(Instance::new(0, vec![]).is_err());
        let inst = Instance::new(2, vec![o.clone(), o]).unwrap();
        assert_eq!((inst.m(), inst.n()), (2, 2));
    }

    #[test]
    fn table_view_agrees() {
        let a = CostOracle::additive(vec![int(1), int(2), int(4)]).unwrap();
        let b = CostOracle::capped_additive(vec![int(3), int(3), int(3)], int(5)).unwrap();
        let inst = Instance::new(3, vec![a, b]).unwrap();
        let t = inst.cost_table().unwrap();
        for i in 0..2 {
            for s in ChoreSet::full(3).subsets() {
                assert_eq!(CostView::cost(&t, i, s).as_ref(), &inst.cost(i, s));
                assert_eq!(CostView::cost(&inst, i, s).as_ref(), &inst.cost(i, s));
            }
        }
    }
}
