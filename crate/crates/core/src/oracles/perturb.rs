use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::chores::ChoreSet;
use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::rational::{pow2, Rational};

use super::{CostOracle, MAX_TABLE_CHORES};

/// Largest m for which δ is computed over subset sums of an additive oracle.
pub const MAX_DELTA_ADDITIVE: usize = 20;
/// Largest m for which δ is computed for any other oracle.
pub const MAX_DELTA_GENERAL: usize = 14;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PerturbationParams {
    pub delta: Rational,
    pub epsilon: Rational,
}

fn subset_values(o: &CostOracle, m: usize) -> Result<Vec<Rational>> {
    match o {
        CostOracle::Additive(c) if m <= MAX_DELTA_ADDITIVE => {
            let mut v = vec![Rational::zero(); 1 << m];
            for mask in 1usize..1 << m {
                let low = mask.trailing_zeros() as usize;
                v[mask] = &v[mask & (mask - 1)] + &c[low];
            }
            Ok(v)
        }
        _ if m <= MAX_DELTA_GENERAL => o.tabulate(),
        _ => Err(Error::Precondition(format!(
            "delta not computable for m = {m} (additive m <= {MAX_DELTA_ADDITIVE}, otherwise m <= {MAX_DELTA_GENERAL}); supply it"
        ))),
    }
}

/// Smallest positive |C_i(S) − C_i(T)| over all agents and subset pairs;
/// `None` when every agent's costs are constant.
pub fn min_positive_gap(inst: &Instance) -> Result<Option<Rational>> {
    let mut best: Option<Rational> = None;
    for o in inst.oracles() {
        let mut v = subset_values(o, inst.m())?;
        v.sort_unstable();
        v.dedup();
        for w in v.windows(2) {
            let g = &w[1] - &w[0];
            if best.as_ref().map_or(true, |b| &g < b) {
                best = Some(g);
            }
        }
    }
    Ok(best)
}

/// C′_i(S) = C_i(S) + ε Σ_{j∈S} 2^j with 1-based j and ε = δ / 2^{m+2}.
/// δ is computed when `delta` is `None`; if no two subsets differ in cost
/// for any agent, δ = 1.
pub fn perturb_nondegenerate(inst: &Instance, delta: Option<Rational>) -> Result<(Instance, PerturbationParams)> {
    let m = inst.m();
    let delta = match delta {
        Some(d) if !d.is_positive() => return Err(Error::InvalidInput("delta must be positive".into())),
        Some(d) => d,
        None => min_positive_gap(inst)?.unwrap_or_else(|| Rational::from_integer(BigInt::from(1))),
    };
    let epsilon = &delta / pow2(m as u32 + 2);
    let mut oracles = Vec::with_capacity(inst.n());
    for o in inst.oracles() {
        let p = match o {
            CostOracle::Additive(c) => {
                CostOracle::Additive(c.iter().enumerate().map(|(j, x)| x + &epsilon * pow2(j as u32 + 1)).collect())
            }
            _ => {
                if m > MAX_TABLE_CHORES {
                    return Err(Error::EnumerationLimit {
                        what: "perturbation of a non-additive oracle".into(),
                        needed: format!("2^{m} table entries"),
                        limit: format!("2^{MAX_TABLE_CHORES}"),
                    });
                }
                let values = (0..1u64 << m)
                    .map(|b| {
                        let s = ChoreSet::from_bits(b);
                        // Σ_{j∈S} 2^j over 1-based j is twice the 0-based mask.
                        o.cost(s) + &epsilon * Rational::from_integer(BigInt::from(b) * 2)
                    })
                    .collect();
                CostOracle::tabulated(m, values)?
            }
        };
        oracles.push(p);
    }
    Ok((Instance::new(m, oracles)?, PerturbationParams { delta, epsilon }))
}
