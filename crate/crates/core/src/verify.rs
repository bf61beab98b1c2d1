//! Brute-force search and the rival-algorithm counterexample.

use std::borrow::Cow;

use num_bigint::BigInt;

use crate::allocation::Allocation;
use crate::chores::ChoreSet;
use crate::envy_graph::{top_trading_extension, Extension, TopTradingGraph};
use crate::error::{Error, Result};
use crate::fairness::{max_removal_cost, satisfies_bundles, Criterion};
use crate::instance::{CostTable, CostView, Instance};
use crate::oracles::CostOracle;
use crate::rational::{frac, int, Rational};
use crate::set;

pub const DEFAULT_ENUM_LIMIT: u64 = 10_000_000;

/// Tabulate costs for search when 2^m is small.
const TABLE_CHORES: usize = 16;

/// n^m, saturating.
pub fn search_space(m: usize, n: usize) -> u128 {
    (n as u128).checked_pow(m as u32).unwrap_or(u128::MAX)
}

/// Every assignment of m chores to n agents, lexicographic in the
/// assignment vector (chore 1 most significant), as bundle lists.
pub struct Assignments {
    n: usize,
    digits: Vec<usize>,
    bundles: Vec<ChoreSet>,
    started: bool,
    done: bool,
}

impl Assignments {
    pub fn new(m: usize, n: usize) -> Self {
        let mut bundles = vec![ChoreSet::EMPTY; n];
        if n > 0 {
            bundles[0] = ChoreSet::full(m);
        }
        Assignments { n, digits: vec![0; m], bundles, started: false, done: n == 0 }
    }

    /// Advances in place; `false` once exhausted.
    pub fn advance(&mut self) -> bool {
        if self.done {
            return false;
        }
        if !self.started {
            self.started = true;
            return true;
        }
        for c in (0..self.digits.len()).rev() {
            let d = self.digits[c];
            self.bundles[d].remove(c);
            if d + 1 < self.n {
                self.digits[c] = d + 1;
                self.bundles[d + 1].insert(c);
                return true;
            }
            self.digits[c] = 0;
            self.bundles[0].insert(c);
        }
        self.done = true;
        false
    }

    pub fn bundles(&self) -> &[ChoreSet] {
        &self.bundles
    }
}

enum View<'a> {
    Table(CostTable),
    Direct(&'a Instance),
}

impl CostView for View<'_> {
    fn m(&self) -> usize {
        match self {
            View::Table(t) => t.m(),
            View::Direct(i) => CostView::m(*i),
        }
    }
    fn n(&self) -> usize {
        match self {
            View::Table(t) => t.n(),
            View::Direct(i) => CostView::n(*i),
        }
    }
    fn cost(&self, agent: usize, s: ChoreSet) -> Cow<'_, Rational> {
        match self {
            View::Table(t) => t.cost(agent, s),
            View::Direct(i) => CostView::cost(*i, agent, s),
        }
    }
}

pub fn exhaustive_search(inst: &Instance, criterion: &Criterion) -> Result<Option<Allocation>> {
    exhaustive_search_limited(inst, criterion, DEFAULT_ENUM_LIMIT)
}

/// First full allocation (lexicographic over assignment vectors) meeting
/// `criterion`; `None` certifies that none exists.
pub fn exhaustive_search_limited(inst: &Instance, criterion: &Criterion, limit: u64) -> Result<Option<Allocation>> {
    let (m, n) = (inst.m(), inst.n());
    let space = search_space(m, n);
    if space > limit as u128 {
        return Err(Error::EnumerationLimit {
            what: "exhaustive allocation search".into(),
            needed: format!("{n}^{m}"),
            limit: limit.to_string(),
        });
    }
    if let Criterion::AlphaEfx(a) = criterion {
        if a < &int(1) {
            return Err(Error::InvalidInput("alpha must be >= 1".into()));
        }
    }
    let view = if m <= TABLE_CHORES { View::Table(inst.cost_table()?) } else { View::Direct(inst) };
    let mut it = Assignments::new(m, n);
    while it.advance() {
        if satisfies_bundles(it.bundles(), &view, criterion) {
            return Ok(Some(Allocation::new(m, it.bundles().to_vec())?));
        }
    }
    Ok(None)
}

fn counterexample_params(m1: &Rational, m2: &Rational) -> Result<()> {
    if !(m1 / int(2) > *m2 && *m2 > int(6)) {
        return Err(Error::InvalidInput(format!("counterexample needs m1/2 > m2 > 6, got m1 = {m1}, m2 = {m2}")));
    }
    Ok(())
}

/// Three agents, six chores:
/// C1 = (10, 6, 4, 1/2, 1/2, 3), C2 = (6, 10, 3, 2, 2, 3/2),
/// C3 = (1, 3, 4, m1/2, m1/2, m2), all additive.
pub fn counterexample_instance(m1: Rational, m2: Rational) -> Result<Instance> {
    counterexample_params(&m1, &m2)?;
    let half = &m1 / int(2);
    let c1 = vec![int(10), int(6), int(4), frac(1, 2), frac(1, 2), int(3)];
    let c2 = vec![int(6), int(10), int(3), int(2), int(2), frac(3, 2)];
    let c3 = vec![int(1), int(3), int(4), half.clone(), half, m2];
    Instance::new(6, vec![CostOracle::additive(c1)?, CostOracle::additive(c2)?, CostOracle::additive(c3)?])
}

#[derive(Clone, Debug)]
pub struct RivalRun {
    pub instance: Instance,
    pub seed: Allocation,
    pub order: Vec<usize>,
    pub extension: Extension,
    /// Graph before each placement, then the final graph.
    pub graphs: Vec<TopTradingGraph>,
    /// max_{c∈X3} C3(X3 \ c) / C3(X1).
    pub ratio: Rational,
}

impl RivalRun {
    pub fn allocation(&self) -> &Allocation {
        &self.extension.allocation
    }
}

/// The competing procedure: seed ({c2},{c3},{c1}), then top-trading
/// extension over the pool in decreasing C3 order with lexicographic sinks.
pub fn rival_counterexample_run(m1: Rational, m2: Rational) -> Result<RivalRun> {
    let instance = counterexample_instance(m1, m2)?;
    let seed = Allocation::new(6, vec![set![2], set![3], set![1]])?;
    let pool = seed.pool();
    let order: Vec<usize> = instance.oracle(2).top_chore_order().into_iter().filter(|&c| pool.contains(c)).collect();
    let extension = top_trading_extension(&seed, &instance, &order, None);
    let mut graphs: Vec<TopTradingGraph> = extension.steps.iter().map(|s| s.graph.clone()).collect();
    if let Some(last) = extension.steps.last() {
        graphs.push(last.graph_after.clone());
    }
    let x = &extension.allocation;
    let c3 = instance.oracle(2);
    let denom = c3.cost(x.bundle(0));
    if denom == int(0) {
        return Err(Error::GuaranteeViolated { what: "rival ratio denominator".into(), trace: x.to_string() });
    }
    let ratio = max_removal_cost(c3, x.bundle(2)) / denom;
    Ok(RivalRun { instance, seed, order, extension, graphs, ratio })
}

/// m2 / 3, the ratio the rival run attains.
pub fn expected_rival_ratio(m2: &Rational) -> Rational {
    m2 / Rational::from_integer(BigInt::from(3))
}
