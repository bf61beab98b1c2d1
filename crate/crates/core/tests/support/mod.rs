//! Test-side oracles written without the library's checker or classifier.
#![allow(dead_code)]

use chorefair::oracles::CostOracle;
use chorefair::three_agent::CaseId;
use chorefair::{ChoreSet, Instance, Rational};

fn set_of(chores: &[usize]) -> ChoreSet {
    let mut bits = 0u64;
    for &c in chores {
        bits |= 1 << c;
    }
    ChoreSet::from_bits(bits)
}

fn cost(o: &CostOracle, chores: &[usize]) -> Rational {
    o.cost(set_of(chores))
}

fn without(v: &[usize], c: usize) -> Vec<usize> {
    v.iter().copied().filter(|&x| x != c).collect()
}

fn with(v: &[usize], c: usize) -> Vec<usize> {
    let mut out = v.to_vec();
    out.push(c);
    out
}

/// Plain list-of-lists view of an allocation, chores ascending.
pub fn lists(bundles: &[ChoreSet]) -> Vec<Vec<usize>> {
    bundles.iter().map(|b| (0..64).filter(|&c| b.bits() >> c & 1 == 1).collect()).collect()
}

/// (i, j, c) triples violating α-EFX, in i, j, c order.
pub fn alpha_efx_violations(inst: &Instance, bundles: &[Vec<usize>], alpha: &Rational) -> Vec<(usize, usize, usize)> {
    let mut out = Vec::new();
    for i in 0..bundles.len() {
        let o = inst.oracle(i);
        for j in 0..bundles.len() {
            if i == j {
                continue;
            }
            let other = alpha * cost(o, &bundles[j]);
            for &c in &bundles[i] {
                if cost(o, &without(&bundles[i], c)) > other {
                    out.push((i, j, c));
                }
            }
        }
    }
    out
}

pub fn tefx_violations(inst: &Instance, bundles: &[Vec<usize>]) -> Vec<(usize, usize, usize)> {
    let mut out = Vec::new();
    for i in 0..bundles.len() {
        let o = inst.oracle(i);
        for j in 0..bundles.len() {
            if i == j {
                continue;
            }
            for &c in &bundles[i] {
                if cost(o, &without(&bundles[i], c)) > cost(o, &with(&bundles[j], c)) {
                    out.push((i, j, c));
                }
            }
        }
    }
    out
}

/// Chores by decreasing singleton cost, ties to the lower index.
fn order(o: &CostOracle, m: usize) -> Vec<usize> {
    let mut v: Vec<usize> = (0..m).collect();
    v.sort_by(|&a, &b| cost(o, &[b]).cmp(&cost(o, &[a])).then(a.cmp(&b)));
    v
}

const PERMS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];

/// Every leaf case whose defining predicate holds, each B leaf taken
/// existentially over role assignments.
pub fn matching_cases(inst: &Instance) -> Vec<CaseId> {
    let t: Vec<Vec<usize>> = (0..3).map(|i| order(inst.oracle(i), inst.m())).collect();
    let tops = [t[0][0], t[1][0], t[2][0]];
    let secs = [t[0][1], t[1][1], t[2][1]];
    let count = |v: [usize; 3]| {
        let mut s = v.to_vec();
        s.sort();
        s.dedup();
        s.len()
    };
    let same_pair = |i: usize, j: usize| {
        let (mut a, mut b) = ([t[i][0], t[i][1]], [t[j][0], t[j][1]]);
        a.sort();
        b.sort();
        a == b
    };
    let in_a = count(tops) == 1;
    let in_b = !in_a && (same_pair(0, 1) || same_pair(0, 2) || same_pair(1, 2));
    let mut out = Vec::new();
    if in_a {
        out.push(match count(secs) {
            1 => CaseId::A1,
            2 => CaseId::A2,
            _ => CaseId::A3,
        });
    }
    if in_b {
        let mut leaves = Vec::new();
        for p in PERMS {
            if !same_pair(p[0], p[1]) {
                continue;
            }
            let a = |r: usize, k: usize| t[p[r]][k];
            let leaf = if [a(2, 0), a(2, 1)].iter().any(|&c| c == a(0, 0) || c == a(0, 1)) {
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
            if !leaves.contains(&leaf) {
                leaves.push(leaf);
            }
        }
        out.extend(leaves);
    }
    if !in_a && !in_b {
        if count(tops) == 2 {
            out.push(CaseId::C);
        } else {
            let d1 = (0..3).any(|i| (0..3).any(|j| i != j && tops[i] == secs[j]));
            out.push(if d1 {
                CaseId::D1
            } else {
                match count(secs) {
                    3 => CaseId::D21,
                    1 => CaseId::D22,
                    _ => CaseId::D23,
                }
            });
        }
    }
    out
}

pub fn additive(rows: &[&[i64]]) -> Instance {
    let m = rows[0].len();
    let oracles = rows
        .iter()
        .map(|r| CostOracle::additive(r.iter().map(|&x| Rational::from_integer(x.into())).collect()).unwrap())
        .collect();
    Instance::new(m, oracles).unwrap()
}

/// One hand-built instance per case.
pub fn case_fixtures() -> Vec<(CaseId, Instance)> {
    use chorefair::rational::int;
    use chorefair::verify::counterexample_instance;
    vec![
        (CaseId::A1, additive(&[&[10, 9, 8, 3, 2, 1], &[10, 9, 8, 3, 2, 1], &[10, 9, 8, 3, 2, 1]])),
        (CaseId::A2, additive(&[&[10, 9, 8, 3, 2, 1], &[10, 9, 3, 8, 2, 1], &[10, 3, 9, 8, 2, 1]])),
        (CaseId::A3, additive(&[&[10, 9, 1, 1, 1, 1], &[10, 1, 9, 1, 1, 1], &[10, 1, 1, 9, 1, 1]])),
        (CaseId::B1, additive(&[&[10, 9, 1, 1, 1, 1], &[9, 10, 1, 1, 1, 1], &[10, 1, 1, 9, 1, 1]])),
        (CaseId::B21, additive(&[&[10, 9, 8, 1, 1, 1], &[9, 10, 1, 8, 1, 1], &[1, 1, 1, 1, 10, 9]])),
        (CaseId::B221, additive(&[&[10, 9, 8, 1, 1, 1], &[9, 10, 8, 1, 1, 1], &[1, 1, 10, 9, 2, 2]])),
        (CaseId::B2221, additive(&[&[10, 9, 8, 1, 1, 1], &[12, 9, 7, 2, 1, 1], &[1, 1, 1, 10, 9, 2]])),
        (CaseId::B2222, counterexample_instance(int(26), int(12)).unwrap()),
        (CaseId::C, additive(&[&[10, 9, 1, 1, 1, 1], &[10, 1, 9, 1, 1, 1], &[1, 1, 1, 10, 9, 1]])),
        (CaseId::D1, additive(&[&[10, 9, 1, 1, 1, 1], &[1, 10, 9, 1, 1, 1], &[1, 1, 1, 1, 10, 9]])),
        (CaseId::D21, additive(&[&[10, 9, 1, 1, 1, 1], &[1, 1, 10, 9, 1, 1], &[1, 1, 1, 1, 10, 9]])),
        (CaseId::D22, additive(&[&[10, 1, 2, 9, 3, 1], &[1, 10, 2, 9, 3, 1], &[2, 1, 10, 9, 3, 1]])),
        (CaseId::D23, additive(&[&[10, 1, 1, 9, 1, 1], &[1, 10, 1, 9, 1, 1], &[1, 1, 10, 1, 9, 1]])),
    ]
}
