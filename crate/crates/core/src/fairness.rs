//! Exact α-EFX / tEFX predicates with exhaustive witness lists.

use std::fmt;

use num_traits::{One, Zero};

use crate::allocation::Allocation;
use crate::chores::ChoreSet;
use crate::error::{Error, Result};
use crate::instance::CostView;
use crate::oracles::CostOracle;
use crate::rational::{format_rational, Rational};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Criterion {
    AlphaEfx(Rational),
    Tefx,
}

impl Criterion {
    pub fn efx() -> Self {
        Criterion::AlphaEfx(Rational::one())
    }
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Criterion::AlphaEfx(a) if a.is_one() => f.write_str("efx"),
            Criterion::AlphaEfx(a) => write!(f, "alpha_efx({})", format_rational(a)),
            Criterion::Tefx => f.write_str("tefx"),
        }
    }
}

/// Agent `i` strongly envies agent `j` through chore `c`: `lhs > rhs`.
/// Indices are 0-based; `Display` prints them 1-based.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub i: usize,
    pub j: usize,
    pub c: usize,
    pub lhs: Rational,
    pub rhs: Rational,
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},c{},{},{})", self.i + 1, self.j + 1, self.c + 1, format_rational(&self.lhs), format_rational(&self.rhs))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FairnessReport {
    pub criterion: Criterion,
    pub verdict: bool,
    pub witnesses: Vec<Witness>,
}

impl FairnessReport {
    fn from_witnesses(criterion: Criterion, witnesses: Vec<Witness>) -> Self {
        FairnessReport { criterion, verdict: witnesses.is_empty(), witnesses }
    }
}

/// max over c ∈ S of C(S \ c); 0 for the empty set.
pub fn max_removal_cost(oracle: &CostOracle, s: ChoreSet) -> Rational {
    s.iter().map(|c| oracle.cost(s.without(c))).max().unwrap_or_else(Rational::zero)
}

/// The chore whose removal leaves the costliest remainder (lowest index on
/// ties), with that remainder's cost. `None` for the empty set.
pub fn argmax_removal<F: Fn(ChoreSet) -> Rational>(cost: F, s: ChoreSet) -> Option<(usize, Rational)> {
    let mut best: Option<(usize, Rational)> = None;
    for c in s {
        let v = cost(s.without(c));
        if best.as_ref().map_or(true, |(_, b)| &v > b) {
            best = Some((c, v));
        }
    }
    best
}

fn check_dims<V: CostView + ?Sized>(alloc: &Allocation, view: &V) -> Result<()> {
    if alloc.n() != view.n() || alloc.m() != view.m() {
        return Err(Error::DimensionMismatch(format!(
            "allocation has n = {}, m = {}; instance has n = {}, m = {}",
            alloc.n(),
            alloc.m(),
            view.n(),
            view.m()
        )));
    }
    Ok(())
}

fn check_alpha(alpha: &Rational) -> Result<()> {
    if alpha < &Rational::one() {
        return Err(Error::InvalidInput(format!("alpha must be >= 1, got {}", format_rational(alpha))));
    }
    Ok(())
}

pub fn check_alpha_efx<V: CostView + ?Sized>(alloc: &Allocation, view: &V, alpha: &Rational) -> Result<FairnessReport> {
    check_dims(alloc, view)?;
    check_alpha(alpha)?;
    let n = alloc.n();
    let mut out = Vec::new();
    for i in 0..n {
        let xi = alloc.bundle(i);
        if xi.len() < 2 {
            continue;
        }
        let removals: Vec<(usize, Rational)> = xi.iter().map(|c| (c, view.cost(i, xi.without(c)).into_owned())).collect();
        for j in (0..n).filter(|&j| j != i) {
            let rhs = alpha * view.cost(i, alloc.bundle(j)).as_ref();
            for (c, lhs) in &removals {
                if lhs > &rhs {
                    out.push(Witness { i, j, c: *c, lhs: lhs.clone(), rhs: rhs.clone() });
                }
            }
        }
    }
    Ok(FairnessReport::from_witnesses(Criterion::AlphaEfx(alpha.clone()), out))
}

pub fn check_tefx<V: CostView + ?Sized>(alloc: &Allocation, view: &V) -> Result<FairnessReport> {
    check_dims(alloc, view)?;
    let n = alloc.n();
    let mut out = Vec::new();
    for i in 0..n {
        let xi = alloc.bundle(i);
        if xi.len() < 2 {
            continue;
        }
        let removals: Vec<(usize, Rational)> = xi.iter().map(|c| (c, view.cost(i, xi.without(c)).into_owned())).collect();
        for j in (0..n).filter(|&j| j != i) {
            let xj = alloc.bundle(j);
            for (c, lhs) in &removals {
                let rhs = view.cost(i, xj.with(*c));
                if lhs > rhs.as_ref() {
                    out.push(Witness { i, j, c: *c, lhs: lhs.clone(), rhs: rhs.into_owned() });
                }
            }
        }
    }
    Ok(FairnessReport::from_witnesses(Criterion::Tefx, out))
}

pub fn check<V: CostView + ?Sized>(alloc: &Allocation, view: &V, criterion: &Criterion) -> Result<FairnessReport> {
    match criterion {
        Criterion::AlphaEfx(a) => check_alpha_efx(alloc, view, a),
        Criterion::Tefx => check_tefx(alloc, view),
    }
}

/// Same verdict as [`check`], stopping at the first violation.
pub fn satisfies<V: CostView + ?Sized>(alloc: &Allocation, view: &V, criterion: &Criterion) -> Result<bool> {
    check_dims(alloc, view)?;
    if let Criterion::AlphaEfx(a) = criterion {
        check_alpha(a)?;
    }
    Ok(satisfies_bundles(alloc.bundles(), view, criterion))
}

/// Unchecked core of [`satisfies`]; `bundles.len()` must equal `view.n()`.
pub fn satisfies_bundles<V: CostView + ?Sized>(bundles: &[ChoreSet], view: &V, criterion: &Criterion) -> bool {
    let n = bundles.len();
    for i in 0..n {
        let xi = bundles[i];
        if xi.len() < 2 {
            continue;
        }
        match criterion {
            Criterion::AlphaEfx(alpha) => {
                let worst = xi.iter().map(|c| view.cost(i, xi.without(c))).max().expect("non-empty");
                for j in (0..n).filter(|&j| j != i) {
                    let own = view.cost(i, bundles[j]);
                    if worst.as_ref() > own.as_ref() && worst.as_ref() > &(alpha * own.as_ref()) {
                        return false;
                    }
                }
            }
            Criterion::Tefx => {
                for c in xi {
                    let lhs = view.cost(i, xi.without(c));
                    for j in (0..n).filter(|&j| j != i) {
                        if lhs.as_ref() > view.cost(i, bundles[j].with(c)).as_ref() {
                            return false;
                        }
                    }
                }
            }
        }
    }
    true
}

/// Per agent: every pool chore b has at least n−1 bundles j with C_i(b) ≤ C_i(X_j).
/// Panics if the allocation and view disagree on n.
pub fn check_partial_property2<V: CostView + ?Sized>(alloc: &Allocation, view: &V) -> Vec<bool> {
    assert_eq!(alloc.n(), view.n(), "allocation and instance disagree on n");
    let n = alloc.n();
    let pool = alloc.pool();
    (0..n)
        .map(|i| {
            let bundle_costs: Vec<Rational> = alloc.bundles().iter().map(|b| view.cost(i, *b).into_owned()).collect();
            pool.iter().all(|b| {
                let cb = view.cost(i, ChoreSet::singleton(b));
                bundle_costs.iter().filter(|x| cb.as_ref() <= *x).count() + 1 >= n
            })
        })
        .collect()
}

/// Bundle `idx` held by an agent with cost `oracle` has no strong envy
/// (α = 1) towards any other bundle.
pub fn is_efx_feasible(oracle: &CostOracle, bundles: &[ChoreSet], idx: usize) -> bool {
    let x = bundles[idx];
    if x.len() < 2 {
        return true;
    }
    let worst = max_removal_cost(oracle, x);
    bundles.iter().enumerate().all(|(j, b)| j == idx || worst <= oracle.cost(*b))
}

/// Bundle `idx` held by an agent with cost `oracle` has no transfer envy.
pub fn is_tefx_feasible(oracle: &CostOracle, bundles: &[ChoreSet], idx: usize) -> bool {
    let x = bundles[idx];
    if x.len() < 2 {
        return true;
    }
    x.iter().all(|c| {
        let lhs = oracle.cost(x.without(c));
        bundles.iter().enumerate().all(|(j, b)| j == idx || lhs <= oracle.cost(b.with(c)))
    })
}
