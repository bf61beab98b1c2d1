//! 2-EFX for n agents whose cost functions agree on the order of their
//! n−1 most costly chores.

use num_traits::One;

use crate::allocation::Allocation;
use crate::error::{Error, Result};
use crate::envy_graph::{extend_partial, Extension};
use crate::instance::Instance;
use crate::rational::{int, Rational};

/// First 0-based position t < min(k, m) where two agents' top orders differ,
/// with the agents involved.
pub fn first_ido_disagreement(inst: &Instance, k: usize) -> Option<(usize, usize, usize)> {
    let orders: Vec<Vec<usize>> = inst.oracles().iter().map(|o| o.top_chore_order()).collect();
    let depth = k.min(inst.m());
    for t in 0..depth {
        for i in 1..orders.len() {
            if orders[i][t] != orders[0][t] {
                return Some((t, 0, i));
            }
        }
    }
    None
}

pub fn check_k_partial_ido(inst: &Instance, k: usize) -> bool {
    first_ido_disagreement(inst, k).is_none()
}

/// Top chore t goes to agent t for t < n−1; agent n stays empty.
pub fn ido_seed(inst: &Instance) -> Allocation {
    let n = inst.n();
    let order = inst.oracle(0).top_chore_order();
    let mut x = Allocation::empty(inst.m(), n);
    for (t, &c) in order.iter().take(n - 1).enumerate() {
        x.assign(t, c).expect("distinct top chores");
    }
    x
}

#[derive(Clone, Debug)]
pub struct IdoOutcome {
    pub seed: Allocation,
    pub extension: Extension,
}

impl IdoOutcome {
    pub fn allocation(&self) -> &Allocation {
        &self.extension.allocation
    }
}

/// Seeds with the shared top n−1 chores and extends with α = β = 1.
pub fn partial_ido_2efx_traced(inst: &Instance) -> Result<IdoOutcome> {
    let n = inst.n();
    if n >= 2 {
        if let Some((t, a, b)) = first_ido_disagreement(inst, n - 1) {
            return Err(Error::Precondition(format!(
                "not {}-partial-IDO at position {}: agents {} and {} disagree",
                n - 1,
                t + 1,
                a + 1,
                b + 1
            )));
        }
    }
    let seed = ido_seed(inst);
    let one = Rational::one();
    let extension = extend_partial(&seed, inst, &one, &one, true, None)?;
    debug_assert!(crate::fairness::check_alpha_efx(&extension.allocation, inst, &int(2))?.verdict);
    Ok(IdoOutcome { seed, extension })
}

pub fn partial_ido_2efx(inst: &Instance) -> Result<Allocation> {
    Ok(partial_ido_2efx_traced(inst)?.extension.allocation)
}
