//! Seeded inputs shared by the benchmarks.

use chorefair::oracles::{generate_instance, Family};
use chorefair::Instance;

pub fn three_agent_inputs(m: usize, count: u64) -> Vec<Instance> {
    let fams = [Family::Additive, Family::CappedAdditive, Family::MaxOfAdditive];
    (0..count).map(|s| generate_instance(&fams[(s % 3) as usize], 3, m, s).expect("valid parameters")).collect()
}

pub fn instances(family: &Family, n: usize, m: usize, count: u64) -> Vec<Instance> {
    (0..count).map(|s| generate_instance(family, n, m, s).expect("valid parameters")).collect()
}
