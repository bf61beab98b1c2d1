//! 2-EFX for three agents with subadditive costs: classify by the agents'
//! most costly chores, build a partial allocation per case, then extend.
//!
//! Inside a case everything is phrased over *roles* 0, 1, 2; `Roles` maps a
//! role to the actual agent and outputs are mapped back before returning.

use std::fmt;

use num_traits::One;

use crate::allocation::Allocation;
use crate::chores::ChoreSet;
use crate::envy_graph::{extend_partial, Extension};
use crate::error::{Error, Result};
use crate::fairness::{argmax_removal, check_alpha_efx, check_partial_property2, max_removal_cost, Criterion};
use crate::instance::Instance;
use crate::oracles::{perturb_nondegenerate, CostOracle};
use crate::rational::{format_rational, int, Rational};
use crate::verify::{exhaustive_search, exhaustive_search_limited, search_space, DEFAULT_ENUM_LIMIT};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CaseId {
    A1,
    A2,
    A3,
    B1,
    B21,
    B221,
    B2221,
    B2222,
    C,
    D1,
    D21,
    D22,
    D23,
}

impl CaseId {
    pub const ALL: [CaseId; 13] = [
        CaseId::A1,
        CaseId::A2,
        CaseId::A3,
        CaseId::B1,
        CaseId::B21,
        CaseId::B221,
        CaseId::B2221,
        CaseId::B2222,
        CaseId::C,
        CaseId::D1,
        CaseId::D21,
        CaseId::D22,
        CaseId::D23,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CaseId::A1 => "A1",
            CaseId::A2 => "A2",
            CaseId::A3 => "A3",
            CaseId::B1 => "B1",
            CaseId::B21 => "B21",
            CaseId::B221 => "B221",
            CaseId::B2221 => "B2221",
            CaseId::B2222 => "B2222",
            CaseId::C => "C",
            CaseId::D1 => "D1",
            CaseId::D21 => "D21",
            CaseId::D22 => "D22",
            CaseId::D23 => "D23",
        }
    }
}

impl fmt::Display for CaseId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// `Roles([a, b, c])`: role 0 is agent a, role 1 agent b, role 2 agent c.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Roles(pub [usize; 3]);

impl Roles {
    pub const IDENTITY: Roles = Roles([0, 1, 2]);

    pub fn agent(self, role: usize) -> usize {
        self.0[role]
    }

    pub fn role_of(self, agent: usize) -> usize {
        self.0.iter().position(|&a| a == agent).expect("agent has a role")
    }

    /// Role-indexed bundles to agent-indexed bundles.
    pub fn to_actual(self, by_role: &[ChoreSet; 3]) -> Vec<ChoreSet> {
        let mut out = vec![ChoreSet::EMPTY; 3];
        for r in 0..3 {
            out[self.0[r]] = by_role[r];
        }
        out
    }

    pub fn to_roles(self, actual: &[ChoreSet]) -> [ChoreSet; 3] {
        [actual[self.0[0]], actual[self.0[1]], actual[self.0[2]]]
    }

    fn with_pair(i: usize, j: usize) -> Roles {
        Roles([i, j, 3 - i - j])
    }
}

/// The two extremes of role 2's top pair under roles 0 and 1: `b1_r` is the
/// costlier of the two for role r, `b2_r` the other.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BSymbols {
    pub b1_1: usize,
    pub b2_1: usize,
    pub b1_2: usize,
    pub b2_2: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CaseContext {
    pub roles: Roles,
    /// `anchors[r][t]`: the (t+1)-th most costly chore of role r.
    pub anchors: [[usize; 3]; 3],
    pub b: Option<BSymbols>,
    /// Chores left unallocated after the anchors are placed (set by `solve_case`).
    pub pool: ChoreSet,
    pub subset_d: Option<ChoreSet>,
}

fn top3(o: &CostOracle) -> [usize; 3] {
    let t = o.top_chore_order();
    [t[0], t[1], t[2]]
}

fn first_pair(f: impl Fn(usize, usize) -> bool) -> Option<(usize, usize)> {
    [(0, 1), (0, 2), (1, 2)].into_iter().find(|&(i, j)| f(i, j))
}

fn distinct(v: [usize; 3]) -> usize {
    1 + usize::from(v[1] != v[0]) + usize::from(v[2] != v[0] && v[2] != v[1])
}

fn check_shape(inst: &Instance) -> Result<()> {
    if inst.n() != 3 {
        return Err(Error::Precondition(format!("three agents required, got {}", inst.n())));
    }
    if inst.m() < 6 {
        return Err(Error::Precondition(format!("case analysis needs m >= 6, got {} (use exhaustive search)", inst.m())));
    }
    Ok(())
}

/// Picks the case under the priority A, then B, then C/D, and the role
/// assignment realizing the case's normalization.
pub fn classify_case(inst: &Instance) -> Result<(CaseId, CaseContext)> {
    check_shape(inst)?;
    let t: Vec<[usize; 3]> = inst.oracles().iter().map(top3).collect();
    let top = [t[0][0], t[1][0], t[2][0]];
    let sec = [t[0][1], t[1][1], t[2][1]];
    let pair_set = |i: usize| {
        let (a, b) = (t[i][0], t[i][1]);
        (a.min(b), a.max(b))
    };

    let (case, roles) = if distinct(top) == 1 {
        match distinct(sec) {
            1 => (CaseId::A1, Roles::IDENTITY),
            2 => {
                let (i, j) = first_pair(|i, j| sec[i] == sec[j]).expect("two equal seconds");
                (CaseId::A2, Roles::with_pair(i, j))
            }
            _ => (CaseId::A3, Roles::IDENTITY),
        }
    } else if let Some((i, j)) = first_pair(|i, j| pair_set(i) == pair_set(j)) {
        let roles = Roles::with_pair(i, j);
        let a = |r: usize, k: usize| t[roles.agent(r)][k];
        let case = if [a(2, 0), a(2, 1)].iter().any(|c| *c == a(0, 0) || *c == a(0, 1)) {
            CaseId::B1
        } else if a(0, 2) != a(1, 2) {
            CaseId::B21
        } else if a(0, 2) == a(2, 0) || a(0, 2) == a(2, 1) {
            CaseId::B221
        } else if a(0, 0) == a(1, 0) {
            CaseId::B2221
        } else {
            CaseId::B2222
        };
        (case, roles)
    } else if distinct(top) == 2 {
        let (i, j) = first_pair(|i, j| top[i] == top[j]).expect("two equal tops");
        (CaseId::C, Roles::with_pair(i, j))
    } else {
        let d1 = (0..3).flat_map(|i| (0..3).map(move |j| (i, j))).find(|&(i, j)| i != j && top[i] == sec[j]);
        match d1 {
            Some((i, j)) => (CaseId::D1, Roles::with_pair(i, j)),
            None => match distinct(sec) {
                3 => (CaseId::D21, Roles::IDENTITY),
                1 => (CaseId::D22, Roles::IDENTITY),
                _ => {
                    let (i, j) = first_pair(|i, j| sec[i] == sec[j]).expect("two equal seconds");
                    (CaseId::D23, Roles::with_pair(i, j))
                }
            },
        }
    };

    let anchors = [t[roles.agent(0)], t[roles.agent(1)], t[roles.agent(2)]];
    let b = matches!(case, CaseId::B2221 | CaseId::B2222).then(|| {
        let pair = [anchors[2][0], anchors[2][1]];
        let ext = |r: usize| {
            let o = inst.oracle(roles.agent(r));
            let (x, y) = (o.singleton(pair[0]), o.singleton(pair[1]));
            // ties go to the chore earlier in role 2's order, i.e. the lower index rule
            if y > x || (y == x && pair[1] < pair[0]) {
                (pair[1], pair[0])
            } else {
                (pair[0], pair[1])
            }
        };
        let (b1_1, b2_1) = ext(0);
        let (b1_2, b2_2) = ext(1);
        BSymbols { b1_1, b2_1, b1_2, b2_2 }
    });
    let ctx = CaseContext { roles, anchors, b, pool: inst.all_chores(), subset_d: None };
    Ok((case, ctx))
}

/// Which peel step is allowed while shrinking D.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PeelRule {
    /// Drop d′ while C(anchor ∪ (D \ d′)) > threshold.
    KeepAbove,
    /// Drop d′ while C(anchor ∪ (D \ d′)) ≥ threshold.
    KeepAtLeast,
}

/// Greedy peeling from D = pool, rescanning in ascending chore index after
/// every removal.
pub fn find_subset_d_with(
    oracle: &CostOracle,
    anchor: usize,
    pool: ChoreSet,
    threshold: &Rational,
    rule: PeelRule,
) -> Result<ChoreSet> {
    if pool.contains(anchor) {
        return Err(Error::InvalidInput("anchor must not be in the pool".into()));
    }
    let with = |d: ChoreSet| oracle.cost(d.with(anchor));
    if &with(pool) < threshold {
        return Err(Error::NoSuchSubset);
    }
    let base = with(ChoreSet::EMPTY);
    let base_ok = match rule {
        PeelRule::KeepAbove => &base <= threshold,
        PeelRule::KeepAtLeast => &base < threshold,
    };
    if !base_ok {
        return Err(Error::Precondition("anchor alone already reaches the threshold".into()));
    }
    let keeps = |v: &Rational| match rule {
        PeelRule::KeepAbove => v > threshold,
        PeelRule::KeepAtLeast => v >= threshold,
    };
    let mut d = pool;
    'peel: loop {
        for c in d {
            if keeps(&with(d.without(c))) {
                d.remove(c);
                continue 'peel;
            }
        }
        return Ok(d);
    }
}

/// Peeling with the "≥" rule: C(anchor ∪ D) ≥ threshold > C(anchor ∪ (D \ d)).
pub fn find_subset_d(oracle: &CostOracle, anchor: usize, pool: ChoreSet, threshold: &Rational) -> Result<ChoreSet> {
    find_subset_d_with(oracle, anchor, pool, threshold, PeelRule::KeepAtLeast)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutcomeKind {
    PartialWithProperties,
    Full2Efx,
}

/// A bound the case analysis guarantees, evaluated on the branch that
/// relies on it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Certificate {
    /// C(D) ≤ 2·C(c) for the role holding b ∪ D with b the min-marginal chore.
    DCost { role: usize, lhs: Rational, rhs: Rational },
    /// max removal of `role`'s bundle ≤ 2·C_role(D) once D goes to role 2.
    RemovalVsD { role: usize, lhs: Rational, rhs: Rational },
    /// The agent's two most costly chores sit in different bundles and its
    /// pool condition holds.
    TopTwoSplit { agent: usize, holds: bool },
}

impl Certificate {
    pub fn holds(&self) -> bool {
        match self {
            Certificate::DCost { lhs, rhs, .. } | Certificate::RemovalVsD { lhs, rhs, .. } => lhs <= rhs,
            Certificate::TopTwoSplit { holds, .. } => *holds,
        }
    }
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ok = if self.holds() { "holds" } else { "FAILS" };
        match self {
            Certificate::DCost { role, lhs, rhs } => {
                write!(f, "C(D) <= 2 C(c) for role {role}: {} <= {} {ok}", format_rational(lhs), format_rational(rhs))
            }
            Certificate::RemovalVsD { role, lhs, rhs } => {
                write!(f, "removal <= 2 C(D) for role {role}: {} <= {} {ok}", format_rational(lhs), format_rational(rhs))
            }
            Certificate::TopTwoSplit { agent, .. } => write!(f, "agent {} has its top pair split, pool condition {ok}", agent + 1),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CaseOutcome {
    pub case: CaseId,
    pub kind: OutcomeKind,
    pub allocation: Allocation,
    pub context: CaseContext,
    pub branches: Vec<String>,
    pub certificates: Vec<Certificate>,
}

struct Builder<'a> {
    ri: Instance,
    x: [ChoreSet; 3],
    m: usize,
    branches: Vec<String>,
    certs: Vec<Certificate>,
    ctx: &'a mut CaseContext,
}

impl Builder<'_> {
    fn c(&self, r: usize, s: ChoreSet) -> Rational {
        self.ri.cost(r, s)
    }

    fn single(&self, r: usize, c: usize) -> Rational {
        self.ri.oracle(r).singleton(c)
    }

    fn allocated(&self) -> ChoreSet {
        self.x[0].union(self.x[1]).union(self.x[2])
    }

    fn pool(&self) -> ChoreSet {
        ChoreSet::full(self.m).difference(self.allocated())
    }

    fn set(&mut self, bundles: [ChoreSet; 3], note: &str) {
        self.x = bundles;
        self.branches.push(format!("{note}: ({},{},{})", bundles[0], bundles[1], bundles[2]));
    }

    /// Roles in `who` each take role 2's most costly remaining chore.
    fn picks(&mut self, who: &[usize]) {
        let order = self.ri.oracle(2).top_chore_order();
        for &r in who {
            let pool = self.pool();
            if let Some(&c) = order.iter().find(|&&c| pool.contains(c)) {
                self.x[r].insert(c);
                self.branches.push(format!("role {r} picks c{}", c + 1));
            }
        }
    }

    fn max_removal(&self, r: usize, s: ChoreSet) -> Rational {
        max_removal_cost(self.ri.oracle(r), s)
    }

    /// Role r has no 2-strong-envy towards the other roles.
    fn two_efx_for(&self, r: usize) -> bool {
        let worst = self.max_removal(r, self.x[r]);
        (0..3).all(|j| j == r || worst <= int(2) * self.c(r, self.x[j]))
    }

    fn b2221(&mut self) {
        let [top, sec, _] = self.ctx.anchors[0];
        let b = self.ctx.b.expect("b symbols");
        let (b1, b2) = (b.b1_1, b.b2_1);
        let s = ChoreSet::singleton;
        self.set([s(b2).with(sec), s(b1), s(top)], "anchors placed");
        let mp = self.pool();
        self.ctx.pool = mp;
        let thr = self.single(0, sec);
        if self.c(0, mp.with(b1)) >= thr {
            let d = find_subset_d_with(self.ri.oracle(0), b1, mp, &thr, PeelRule::KeepAbove)
                .expect("threshold reached by the whole pool");
            self.ctx.subset_d = Some(d);
            self.set([self.x[0], d.with(b1), self.x[2]], "role 1 takes b ∪ D");
            if self.c(1, self.x[1]) > self.c(1, self.x[0]) {
                self.set([self.x[1], self.x[0], self.x[2]], "role 1 envies role 0: swap");
                if argmax_removal(|t| self.c(0, t), self.x[0]).map(|p| p.0) == Some(b1) {
                    self.certs.push(Certificate::DCost { role: 0, lhs: self.c(0, d), rhs: int(2) * &thr });
                }
            }
        } else {
            self.set([self.x[0], mp.with(b1), self.x[2]], "pool below threshold: role 1 takes b ∪ M'");
            if self.c(1, self.x[1]) > self.c(1, self.x[0]) {
                self.set([self.x[1], self.x[0], self.x[2]], "role 1 envies role 0: swap");
            } else if !self.two_efx_for(0) {
                self.set([mp.with(b1).with(b2), s(sec), s(top)], "role 0 strongly envies: role 0 takes b1 ∪ b2 ∪ M'");
            }
        }
    }

    fn b2222(&mut self) {
        let [top, sec, _] = self.ctx.anchors[0];
        let [a20, a21, _] = self.ctx.anchors[2];
        let b = self.ctx.b.expect("b symbols");
        let (b1, b2) = (b.b1_1, b.b2_1);
        let s = ChoreSet::singleton;
        self.set([s(b2).with(sec), s(b1), s(top)], "anchors placed");
        let mp = self.pool();
        self.ctx.pool = mp;
        if self.two_efx_for(0) {
            self.branches.push("role 0 has no strong envy".into());
            return;
        }
        let thr = self.single(0, sec);
        if self.c(0, mp.with(b1)) >= thr {
            let d = find_subset_d(self.ri.oracle(0), b1, mp, &thr).expect("threshold reached by the whole pool");
            self.ctx.subset_d = Some(d);
            self.set([self.x[0], d.with(b1), self.x[2]], "role 1 takes b ∪ D");
            if self.c(1, self.x[1]) > self.c(1, self.x[0]) {
                self.set([d.with(b1), s(top).with(b2), s(sec)], "role 1 envies role 0");
                if argmax_removal(|t| self.c(0, t), self.x[0]).map(|p| p.0) == Some(b1) {
                    self.certs.push(Certificate::DCost { role: 0, lhs: self.c(0, d), rhs: int(2) * &thr });
                }
            } else if self.max_removal(1, self.x[1]) > int(2) * self.c(1, self.x[2]) {
                if self.c(2, d) <= self.single(2, a21) {
                    self.set([s(sec).with(a20), s(top).with(a21), d], "role 1 strongly envies role 2, D cheap for role 2");
                    for r in 0..2 {
                        let lhs = self.max_removal(r, self.x[r]);
                        self.certs.push(Certificate::RemovalVsD { role: r, lhs, rhs: int(2) * self.c(r, d) });
                    }
                } else {
                    self.set([d, s(top).with(a20), s(sec)], "role 1 strongly envies role 2, D costly for role 2");
                }
            }
        } else {
            self.set([mp.with(b1), s(top).with(b2), s(sec)], "pool below threshold");
            if self.max_removal(1, self.x[1]) > int(2) * self.c(1, self.x[0]) {
                self.set([s(top), mp.with(b1).with(b2), s(sec)], "role 1 strongly envies role 0");
            }
        }
    }

    fn run(&mut self, case: CaseId) {
        let a = self.ctx.anchors;
        let s = ChoreSet::singleton;
        let e = ChoreSet::EMPTY;
        match case {
            CaseId::A1 => self.set([s(a[0][2]).with(a[1][2]).with(a[2][2]), s(a[0][1]), s(a[0][0])], "A1"),
            CaseId::A2 => self.set([s(a[0][0]), s(a[0][2]).with(a[1][2]).with(a[2][1]), s(a[0][1])], "A2"),
            CaseId::A3 => {
                self.set([s(a[1][1]), s(a[0][1]), s(a[0][0])], "A3");
                self.picks(&[0, 1]);
            }
            CaseId::B1 => {
                self.set([e, s(a[0][1]), s(a[0][0])], "B1");
                self.picks(&[0]);
            }
            CaseId::B21 => {
                self.set([s(a[1][2]), s(a[0][2]), s(a[0][0]).with(a[0][1])], "B21");
                let pair = s(a[2][0]).with(a[2][1]);
                for c in [a[2][0], a[2][1]] {
                    if !self.allocated().contains(c) {
                        let r = (0..2).find(|&r| self.x[r].is_disjoint(pair)).expect("a role without role 2's top pair");
                        self.x[r].insert(c);
                        self.branches.push(format!("role {r} takes c{}", c + 1));
                    }
                }
            }
            CaseId::B221 => self.set([s(a[2][1]), s(a[2][0]), s(a[0][0]).with(a[0][1])], "B221"),
            CaseId::B2221 => self.b2221(),
            CaseId::B2222 => self.b2222(),
            CaseId::C => {
                self.set([s(a[1][1]), s(a[0][1]), s(a[0][0])], "C");
                self.picks(&[0, 1]);
            }
            CaseId::D1 => {
                self.set([s(a[1][0]), s(a[0][1]), s(a[0][0])], "D1");
                self.picks(&[0, 1]);
            }
            CaseId::D21 => self.set([s(a[1][0]).with(a[2][1]), s(a[2][0]).with(a[0][1]), s(a[0][0]).with(a[1][1])], "D21"),
            CaseId::D22 => self.set([s(a[2][0]).with(a[1][0]), s(a[0][1]), s(a[0][0])], "D22"),
            CaseId::D23 => {
                self.set([s(a[1][0]), s(a[0][0]), s(a[0][1])], "D23");
                self.picks(&[0, 1]);
            }
        }
    }
}

/// Builds the case's allocation and verifies it: 2-EFX on the allocated
/// bundles plus the pool condition when chores remain.
pub fn solve_case(inst: &Instance, case: CaseId, ctx: &CaseContext) -> Result<CaseOutcome> {
    check_shape(inst)?;
    let mut ctx = ctx.clone();
    let roles = ctx.roles;
    let ri = inst.permuted(&roles.0);
    let mut b = Builder { ri, x: [ChoreSet::EMPTY; 3], m: inst.m(), branches: Vec::new(), certs: Vec::new(), ctx: &mut ctx };
    b.run(case);
    let (x, branches, mut certificates) = (b.x, b.branches, b.certs);
    let allocation = Allocation::new(inst.m(), roles.to_actual(&x))?;
    if !matches!(case, CaseId::B2221 | CaseId::B2222) {
        ctx.pool = allocation.pool();
    }
    let prop2 = check_partial_property2(&allocation, inst);
    for i in 0..3 {
        let t = inst.oracle(i).top_chore_order();
        let (o1, o2) = (allocation.owner(t[0]), allocation.owner(t[1]));
        if o1.is_some() && o2.is_some() && o1 != o2 {
            certificates.push(Certificate::TopTwoSplit { agent: i, holds: prop2[i] });
        }
    }
    let kind = if allocation.is_full() { OutcomeKind::Full2Efx } else { OutcomeKind::PartialWithProperties };
    let efx = check_alpha_efx(&allocation, inst, &int(2))?;
    let ok = efx.verdict && (kind == OutcomeKind::Full2Efx || prop2.iter().all(|&p| p));
    if !ok {
        let mut trace = format!("case {case}, roles {:?}\n", roles.0);
        for s in &branches {
            trace.push_str(s);
            trace.push('\n');
        }
        trace.push_str(&format!("2-EFX witnesses {:?}, pool condition {prop2:?}", efx.witnesses.iter().map(|w| w.to_string()).collect::<Vec<_>>()));
        return Err(Error::GuaranteeViolated { what: format!("case {case} construction"), trace });
    }
    Ok(CaseOutcome { case, kind, allocation, context: ctx, branches, certificates })
}

/// How the final allocation was obtained.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Route {
    /// m ≤ 5: exhaustive EFX search.
    Exhaustive,
    /// Case construction (and extension) on the instance itself.
    Direct,
    /// The direct route failed on a tie; solved on the perturbed instance.
    Perturbed { reason: String },
    /// Both constructive routes failed; exhaustive 2-EFX search.
    ExhaustiveFallback { reason: String },
}

#[derive(Clone, Debug)]
pub struct ThreeAgentRun {
    pub allocation: Allocation,
    pub route: Route,
    pub outcome: Option<CaseOutcome>,
    pub extension: Option<Extension>,
}

fn constructive(inst: &Instance) -> Result<(CaseOutcome, Option<Extension>, Allocation)> {
    let (case, ctx) = classify_case(inst)?;
    let outcome = solve_case(inst, case, &ctx)?;
    match outcome.kind {
        OutcomeKind::Full2Efx => {
            let x = outcome.allocation.clone();
            Ok((outcome, None, x))
        }
        OutcomeKind::PartialWithProperties => {
            let ext = extend_partial(&outcome.allocation, inst, &int(2), &Rational::one(), true, None)?;
            let x = ext.allocation.clone();
            Ok((outcome, Some(ext), x))
        }
    }
}

pub fn three_agent_2efx_traced(inst: &Instance) -> Result<ThreeAgentRun> {
    if inst.n() != 3 {
        return Err(Error::Precondition(format!("three agents required, got {}", inst.n())));
    }
    if inst.m() <= 5 {
        let x = exhaustive_search(inst, &Criterion::efx())?.ok_or_else(|| Error::GuaranteeViolated {
            what: "EFX search for m <= 5".into(),
            trace: "no EFX allocation found".into(),
        })?;
        return Ok(ThreeAgentRun { allocation: x, route: Route::Exhaustive, outcome: None, extension: None });
    }
    let first = match constructive(inst) {
        Ok((o, e, x)) => return Ok(ThreeAgentRun { allocation: x, route: Route::Direct, outcome: Some(o), extension: e }),
        Err(e @ Error::GuaranteeViolated { .. }) | Err(e @ Error::ExtensionPrecondition { .. }) => e,
        Err(e) => return Err(e),
    };
    let two = int(2);
    let mut reason = first.to_string();
    if let Ok((p, _)) = perturb_nondegenerate(inst, None) {
        match constructive(&p) {
            Ok((o, e, x)) if check_alpha_efx(&x, inst, &two)?.verdict => {
                return Ok(ThreeAgentRun { allocation: x, route: Route::Perturbed { reason }, outcome: Some(o), extension: e });
            }
            Ok(_) => reason.push_str("\nperturbed result not 2-EFX on the original"),
            Err(e) => reason.push_str(&format!("\nperturbed: {e}")),
        }
    }
    if search_space(inst.m(), 3) <= DEFAULT_ENUM_LIMIT as u128 {
        if let Some(x) = exhaustive_search_limited(inst, &Criterion::AlphaEfx(two), DEFAULT_ENUM_LIMIT)? {
            return Ok(ThreeAgentRun { allocation: x, route: Route::ExhaustiveFallback { reason }, outcome: None, extension: None });
        }
    }
    Err(first)
}

pub fn three_agent_2efx(inst: &Instance) -> Result<Allocation> {
    Ok(three_agent_2efx_traced(inst)?.allocation)
}
