//! Top-trading envy graph, cycle elimination and the extension of a partial
//! allocation (Algorithm 1).

use std::fmt;

use num_traits::{One, Signed};

use crate::allocation::Allocation;
use crate::chores::ChoreSet;
use crate::error::{Error, Result};
use crate::fairness::{check_alpha_efx, satisfies, Criterion};
use crate::instance::CostView;
use crate::rational::{format_rational, Rational};

/// Out-degree at most one: `targets[i]` is the agent i points to.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TopTradingGraph {
    pub targets: Vec<Option<usize>>,
}

impl TopTradingGraph {
    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.targets.iter().enumerate().filter_map(|(i, t)| t.map(|j| (i, j))).collect()
    }

    pub fn sinks(&self) -> Vec<usize> {
        (0..self.targets.len()).filter(|&i| self.targets[i].is_none()).collect()
    }

    /// Lowest-index agent without an outgoing edge.
    pub fn sink(&self) -> Option<usize> {
        self.targets.iter().position(Option::is_none)
    }

    /// First cycle reachable from the lowest start node, listed from its
    /// lowest-index member in edge order.
    pub fn find_cycle(&self) -> Option<Vec<usize>> {
        let n = self.targets.len();
        let mut state = vec![0u8; n]; // 0 unseen, 1 on current walk, 2 done
        for s in 0..n {
            let mut walk = Vec::new();
            let mut cur = Some(s);
            while let Some(v) = cur {
                match state[v] {
                    2 => break,
                    1 => {
                        let at = walk.iter().position(|&w| w == v).expect("on walk");
                        let mut cyc = walk[at..].to_vec();
                        let lo = (0..cyc.len()).min_by_key(|&k| cyc[k]).expect("non-empty");
                        cyc.rotate_left(lo);
                        return Some(cyc);
                    }
                    _ => {
                        state[v] = 1;
                        walk.push(v);
                        cur = self.targets[v];
                    }
                }
            }
            for w in walk {
                state[w] = 2;
            }
        }
        None
    }

    pub fn is_acyclic(&self) -> bool {
        self.find_cycle().is_none()
    }
}

impl fmt::Display for TopTradingGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, (i, j)) in self.edges().into_iter().enumerate() {
            if k > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{}->{}", i + 1, j + 1)?;
        }
        f.write_str("}")
    }
}

/// Edge i→j when C_i(X_i) > min_k C_i(X_k), j the lowest-index minimizer.
pub fn build_top_trading_graph<V: CostView + ?Sized>(alloc: &Allocation, view: &V) -> TopTradingGraph {
    let n = alloc.n();
    let targets = (0..n)
        .map(|i| {
            let costs: Vec<_> = alloc.bundles().iter().map(|b| view.cost(i, *b)).collect();
            let mut best = 0;
            for k in 1..n {
                if costs[k] < costs[best] {
                    best = k;
                }
            }
            (costs[i] > costs[best]).then_some(best)
        })
        .collect();
    TopTradingGraph { targets }
}

/// One rotation along a cycle; `efx_*` are the monitored α-EFX verdicts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycleRemoval {
    pub cycle: Vec<usize>,
    pub efx_before: Option<bool>,
    pub efx_after: Option<bool>,
}

impl CycleRemoval {
    /// An α-EFX allocation stays α-EFX across the rotation.
    pub fn preserves_efx(&self) -> bool {
        self.efx_before != Some(true) || self.efx_after == Some(true)
    }
}

fn rotate(alloc: &mut Allocation, cycle: &[usize]) {
    let old: Vec<ChoreSet> = cycle.iter().map(|&i| alloc.bundle(i)).collect();
    let k = cycle.len();
    for (p, &i) in cycle.iter().enumerate() {
        alloc.set_bundle(i, old[(p + 1) % k]);
    }
}

/// Removes cycles until the graph has a sink, recording each rotation.
/// With `monitor = Some(α)` the α-EFX verdict is evaluated around every
/// rotation.
pub fn eliminate_cycles_logged<V: CostView + ?Sized>(
    alloc: &Allocation,
    view: &V,
    monitor: Option<&Rational>,
) -> (Allocation, Vec<CycleRemoval>) {
    let mut cur = alloc.clone();
    let mut log = Vec::new();
    let verdict = |x: &Allocation| monitor.map(|a| satisfies(x, view, &Criterion::AlphaEfx(a.clone())).unwrap_or(false));
    // Rotated agents end up holding a minimum-cost bundle and keep it, so
    // there are at most n/2 rotations.
    for _ in 0..=alloc.n() {
        let Some(cycle) = build_top_trading_graph(&cur, view).find_cycle() else {
            return (cur, log);
        };
        let efx_before = verdict(&cur);
        rotate(&mut cur, &cycle);
        let efx_after = verdict(&cur);
        log.push(CycleRemoval { cycle, efx_before, efx_after });
    }
    unreachable!("cycle elimination exceeded n rotations");
}

pub fn eliminate_top_trading_cycles<V: CostView + ?Sized>(alloc: &Allocation, view: &V) -> Allocation {
    eliminate_cycles_logged(alloc, view, None).0
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtensionStep {
    pub cycles: Vec<CycleRemoval>,
    /// Graph after cycle elimination, from which the sink is taken.
    pub graph: TopTradingGraph,
    pub sink: usize,
    pub chore: usize,
    /// Graph once the chore is placed.
    pub graph_after: TopTradingGraph,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Extension {
    pub allocation: Allocation,
    pub steps: Vec<ExtensionStep>,
}

impl Extension {
    pub fn cycle_removals(&self) -> impl Iterator<Item = &CycleRemoval> {
        self.steps.iter().flat_map(|s| s.cycles.iter())
    }

    pub fn rotations_keep_efx(&self) -> bool {
        self.cycle_removals().all(CycleRemoval::preserves_efx)
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        for (k, st) in self.steps.iter().enumerate() {
            for c in &st.cycles {
                let names: Vec<String> = c.cycle.iter().map(|i| (i + 1).to_string()).collect();
                s.push_str(&format!("step {}: rotate cycle {}\n", k + 1, names.join("->")));
            }
            s.push_str(&format!(
                "step {}: graph {} sink {} takes c{}; graph {}\n",
                k + 1,
                st.graph,
                st.sink + 1,
                st.chore + 1,
                st.graph_after
            ));
        }
        s
    }
}

/// Algorithm 1 over pool chores in `order`: eliminate cycles, hand the next
/// chore to the lowest-index sink.
pub fn top_trading_extension<V: CostView + ?Sized>(
    alloc: &Allocation,
    view: &V,
    order: &[usize],
    monitor: Option<&Rational>,
) -> Extension {
    let mut cur = alloc.clone();
    let mut steps = Vec::with_capacity(order.len());
    for &b in order {
        let (next, cycles) = eliminate_cycles_logged(&cur, view, monitor);
        cur = next;
        let graph = build_top_trading_graph(&cur, view);
        let sink = graph.sink().expect("acyclic out-degree-one graph has a sink");
        cur.assign(sink, b).expect("order lists pool chores once");
        let graph_after = build_top_trading_graph(&cur, view);
        steps.push(ExtensionStep { cycles, graph, sink, chore: b, graph_after });
    }
    Extension { allocation: cur, steps }
}

/// R_i = {j : max_{b∈pool} C_i(b) ≤ β·C_i(X_j)} for each agent i (j = i
/// allowed). Errors if some |R_i| < n−1.
pub fn extension_witness<V: CostView + ?Sized>(alloc: &Allocation, view: &V, beta: &Rational) -> Result<Vec<Vec<usize>>> {
    let n = alloc.n();
    let pool = alloc.pool();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let worst = pool.iter().map(|b| (view.cost(i, ChoreSet::singleton(b)).into_owned(), b)).max_by(|a, b| a.0.cmp(&b.0).then(b.1.cmp(&a.1)));
        let r: Vec<usize> = match &worst {
            None => (0..n).collect(),
            Some((w, _)) => (0..n).filter(|&j| w <= &(beta * view.cost(i, alloc.bundle(j)).as_ref())).collect(),
        };
        if r.len() + 1 < n {
            let chore = worst.map(|(_, b)| b).expect("pool non-empty when R_i is short");
            return Err(Error::ExtensionPrecondition {
                agent: i + 1,
                chore: chore + 1,
                eligible: r.iter().map(|j| j + 1).collect(),
            });
        }
        out.push(r);
    }
    Ok(out)
}

/// Completes an α-EFX partial allocation whose pool satisfies the β
/// extension condition into a max(α, β+1)-EFX full allocation. The result is
/// verified before it is returned.
pub fn extend_partial<V: CostView + ?Sized>(
    alloc: &Allocation,
    view: &V,
    alpha: &Rational,
    beta: &Rational,
    check_preconditions: bool,
    order: Option<&[usize]>,
) -> Result<Extension> {
    if alpha < &Rational::one() || !beta.is_positive() {
        return Err(Error::InvalidInput(format!(
            "need alpha >= 1 and beta > 0, got alpha = {}, beta = {}",
            format_rational(alpha),
            format_rational(beta)
        )));
    }
    let pool = alloc.pool();
    let order: Vec<usize> = match order {
        Some(o) => {
            let set = ChoreSet::from_chores(o.iter().copied());
            if o.len() != pool.len() || set != pool {
                return Err(Error::InvalidInput("extension order must list every pool chore exactly once".into()));
            }
            o.to_vec()
        }
        None => pool.to_vec(),
    };
    if check_preconditions {
        let r = check_alpha_efx(alloc, view, alpha)?;
        if !r.verdict {
            return Err(Error::Precondition(format!(
                "partial allocation is not {}-EFX; first violation {}",
                format_rational(alpha),
                r.witnesses[0]
            )));
        }
        extension_witness(alloc, view, beta)?;
    }
    let target = std::cmp::max(alpha.clone(), beta + Rational::one());
    let ext = top_trading_extension(alloc, view, &order, Some(&target));
    let report = check_alpha_efx(&ext.allocation, view, &target)?;
    if !report.verdict {
        return Err(Error::GuaranteeViolated {
            what: format!("extension to a {}-EFX allocation from {alloc}", format_rational(&target)),
            trace: format!("{}result {}\nfirst violation {}", ext.render(), ext.allocation, report.witnesses[0]),
        });
    }
    Ok(ext)
}
