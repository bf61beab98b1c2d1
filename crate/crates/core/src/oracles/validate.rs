use crate::chores::ChoreSet;
use crate::error::{Error, Result};
use crate::rational::Rational;

use super::CostOracle;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Check {
    Monotone,
    Subadditive,
    Nondegenerate,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CheckLimits {
    pub monotone: usize,
    pub subadditive: usize,
    pub nondegenerate: usize,
}

impl Default for CheckLimits {
    fn default() -> Self {
        CheckLimits { monotone: 14, subadditive: 10, nondegenerate: 14 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    /// C(S) > C(S ∪ {c}).
    Monotone { s: ChoreSet, c: usize, cost_s: Rational, cost_with: Rational },
    /// C(S ∪ T) > C(S) + C(T) for disjoint S, T.
    Subadditive { s: ChoreSet, t: ChoreSet, cost_union: Rational, sum: Rational },
    /// Distinct S, T with equal cost.
    Degenerate { s: ChoreSet, t: ChoreSet, cost: Rational },
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct OracleReport {
    pub results: Vec<(Check, Vec<Violation>)>,
}

impl OracleReport {
    pub fn passed(&self, check: Check) -> Option<bool> {
        self.results.iter().find(|(c, _)| *c == check).map(|(_, v)| v.is_empty())
    }

    pub fn all_passed(&self) -> bool {
        self.results.iter().all(|(_, v)| v.is_empty())
    }

    pub fn violations(&self, check: Check) -> &[Violation] {
        self.results.iter().find(|(c, _)| *c == check).map_or(&[], |(_, v)| v.as_slice())
    }
}

fn refuse(what: &str, m: usize, limit: usize) -> Error {
    Error::EnumerationLimit { what: format!("{what} check"), needed: format!("m = {m}"), limit: format!("m <= {limit}") }
}

/// Runs the requested structural checks by full enumeration. Exceeding a
/// limit is an error, never a silent pass.
pub fn validate_oracle(oracle: &CostOracle, checks: &[Check], limits: &CheckLimits) -> Result<OracleReport> {
    let m = oracle.chore_count();
    for &c in checks {
        let (name, lim) = match c {
            Check::Monotone => ("monotone", limits.monotone),
            Check::Subadditive => ("subadditive", limits.subadditive),
            Check::Nondegenerate => ("nondegenerate", limits.nondegenerate),
        };
        if m > lim {
            return Err(refuse(name, m, lim));
        }
    }
    let table = oracle.tabulate()?;
    let results = checks
        .iter()
        .map(|&c| {
            let v = match c {
                Check::Monotone => monotone(&table, m),
                Check::Subadditive => subadditive(&table, m),
                Check::Nondegenerate => nondegenerate(&table),
            };
            (c, v)
        })
        .collect();
    Ok(OracleReport { results })
}

fn monotone(t: &[Rational], m: usize) -> Vec<Violation> {
    let mut out = Vec::new();
    for s in 0..t.len() as u64 {
        for c in 0..m {
            if s >> c & 1 == 0 {
                let w = s | 1 << c;
                if t[s as usize] > t[w as usize] {
                    out.push(Violation::Monotone {
                        s: ChoreSet::from_bits(s),
                        c,
                        cost_s: t[s as usize].clone(),
                        cost_with: t[w as usize].clone(),
                    });
                }
            }
        }
    }
    out
}

fn subadditive(t: &[Rational], m: usize) -> Vec<Violation> {
    let mut out = Vec::new();
    for u in ChoreSet::full(m).subsets() {
        for s in u.subsets() {
            let rest = u.difference(s);
            if s.is_empty() || rest.is_empty() || s.bits() > rest.bits() {
                continue;
            }
            let sum = &t[s.bits() as usize] + &t[rest.bits() as usize];
            if t[u.bits() as usize] > sum {
                out.push(Violation::Subadditive { s, t: rest, cost_union: t[u.bits() as usize].clone(), sum });
            }
        }
    }
    out
}

/// Each run of equal costs is reported as (first subset, other subset) pairs.
fn nondegenerate(t: &[Rational]) -> Vec<Violation> {
    let mut idx: Vec<usize> = (0..t.len()).collect();
    idx.sort_by(|&a, &b| t[a].cmp(&t[b]).then(a.cmp(&b)));
    let mut out = Vec::new();
    let mut k = 0;
    while k < idx.len() {
        let mut e = k + 1;
        while e < idx.len() && t[idx[e]] == t[idx[k]] {
            out.push(Violation::Degenerate {
                s: ChoreSet::from_bits(idx[k] as u64),
                t: ChoreSet::from_bits(idx[e] as u64),
                cost: t[idx[k]].clone(),
            });
            e += 1;
        }
        k = e;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;
    use crate::set;
    use crate::verify::counterexample_instance;

    const ALL: [Check; 3] = [Check::Monotone, Check::Subadditive, Check::Nondegenerate];

    #[test]
    fn additive_is_monotone_and_subadditive() {
        let o = CostOracle::additive(vec![int(3), int(0), int(7), int(2)]).unwrap();
        let r = validate_oracle(&o, &ALL[..2], &CheckLimits::default()).unwrap();
        assert!(r.all_passed());
    }

    #[test]
    fn counterexample_agent3_is_degenerate() {
        let inst = counterexample_instance(int(26), int(12)).unwrap();
        let r = validate_oracle(inst.oracle(2), &[Check::Nondegenerate], &CheckLimits::default()).unwrap();
        assert_eq!(r.passed(Check::Nondegenerate), Some(false));
        assert!(r.violations(Check::Nondegenerate).contains(&Violation::Degenerate { s: set![4], t: set![5], cost: int(13) }));
    }

    #[test]
    fn capped_is_subadditive() {
        let o = CostOracle::capped_additive(vec![int(3), int(3)], int(4)).unwrap();
        let r = validate_oracle(&o, &ALL[..2], &CheckLimits::default()).unwrap();
        assert!(r.all_passed());
    }

    #[test]
    fn detects_non_monotone_and_superadditive() {
        // C({c1}) = 2, C({c2}) = 2, C({c1,c2}) = 1 then 5.
        let bad = CostOracle::tabulated(2, vec![int(0), int(2), int(2), int(1)]).unwrap();
        let r = validate_oracle(&bad, &ALL, &CheckLimits::default()).unwrap();
        assert_eq!(r.violations(Check::Monotone).len(), 2);
        assert_eq!(r.passed(Check::Subadditive), Some(true));
        let sup = CostOracle::tabulated(2, vec![int(0), int(2), int(2), int(5)]).unwrap();
        let r = validate_oracle(&sup, &ALL, &CheckLimits::default()).unwrap();
        assert_eq!(
            r.violations(Check::Subadditive),
            &[Violation::Subadditive { s: set![1], t: set![2], cost_union: int(5), sum: int(4) }]
        );
        assert_eq!(r.violations(Check::Nondegenerate).len(), 1);
    }

    #[test]
    fn refuses_beyond_limits() {
        let o = CostOracle::additive(vec![int(1); 11]).unwrap();
        assert!(matches!(
            validate_oracle(&o, &[Check::Subadditive], &CheckLimits::default()),
            Err(Error::EnumerationLimit { .. })
        ));
        assert!(validate_oracle(&o, &[Check::Monotone], &CheckLimits::default()).is_ok());
    }
}
