//! Seeded instance families. Costs are built from a shared base vector plus
//! per-agent noise; the noise level is drawn per instance so that generated
//! agents range from identical to unrelated.

use num_bigint::BigInt;
use num_traits::One;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::ido::check_k_partial_ido;
use crate::instance::Instance;
use crate::rational::{int, Rational};

use super::CostOracle;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Family {
    Additive,
    AdditiveRatio(Rational),
    CappedAdditive,
    MaxOfAdditive,
    KPartialIdo(usize),
    /// Consecutive groups of agents sharing one oracle. Group 0 and 2 get
    /// general monotone oracles, group 1 an additive 2-ratio-bounded one.
    IdenticalGroups(Vec<usize>),
}

struct Gen {
    rng: ChaCha8Rng,
    den: i64,
    noise: i64,
}

const BASE_MAX: i64 = 40;

impl Gen {
    fn new(seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let den = [1, 2, 3, 4, 6][rng.gen_range(0..5)];
        let noise = [0, 2, 6, 15, BASE_MAX][rng.gen_range(0..5)];
        Gen { rng, den, noise }
    }

    fn q(&self, k: i64) -> Rational {
        Rational::new(BigInt::from(k), BigInt::from(self.den))
    }

    fn base(&mut self, m: usize) -> Vec<i64> {
        (0..m).map(|_| self.rng.gen_range(1..=BASE_MAX)).collect()
    }

    /// A few heavy chores among many light ones.
    fn spiky_base(&mut self, m: usize) -> Vec<i64> {
        (0..m).map(|_| if self.rng.gen_range(0..3) == 0 { self.rng.gen_range(25..=BASE_MAX) } else { self.rng.gen_range(1..=3) }).collect()
    }

    /// Integer costs in 1..=BASE_MAX near `base`.
    fn noisy(&mut self, base: &[i64]) -> Vec<i64> {
        let w = self.noise;
        base.iter().map(|&b| (b + self.rng.gen_range(-w..=w)).clamp(1, BASE_MAX)).collect()
    }

    fn row(&mut self, base: &[i64]) -> Vec<Rational> {
        let v = self.noisy(base);
        v.into_iter().map(|k| self.q(k)).collect()
    }

    fn capped(&mut self, costs: Vec<Rational>) -> Result<CostOracle> {
        let max = costs.iter().max().cloned().unwrap_or_default();
        let sum: Rational = costs.iter().sum();
        let u = Rational::new(BigInt::from(self.rng.gen_range(1..=7)), BigInt::from(8));
        let cap = &max + (sum - &max) * u;
        CostOracle::capped_additive(costs, cap)
    }

    fn max_of(&mut self, base: &[i64]) -> Result<CostOracle> {
        let r = self.rng.gen_range(2..=3);
        let rows = (0..r).map(|_| self.row(base)).collect();
        CostOracle::max_of_additive(rows)
    }

    /// (Σ w)² / BASE_MAX over a noisy weight vector: monotone, not subadditive.
    fn convex_table(&mut self, base: &[i64]) -> Result<CostOracle> {
        let m = base.len();
        let w = self.noisy(base);
        let mut sums = vec![0i64; 1 << m];
        for mask in 1usize..1 << m {
            sums[mask] = sums[mask & (mask - 1)] + w[mask.trailing_zeros() as usize];
        }
        let values = sums.iter().map(|&s| Rational::new(BigInt::from(s * s), BigInt::from(BASE_MAX * self.den))).collect();
        CostOracle::tabulated(m, values)
    }

    fn general(&mut self, base: &[i64]) -> Result<CostOracle> {
        let m = base.len();
        let kinds = if m <= 12 { 3 } else { 2 };
        match self.rng.gen_range(0..kinds) {
            0 => {
                let row = self.row(base);
                self.capped(row)
            }
            1 => self.max_of(base),
            _ => self.convex_table(base),
        }
    }

    /// Singleton costs in [1, α] on a grid of 24 steps.
    fn ratio_row(&mut self, base: &[i64], alpha: &Rational) -> Vec<Rational> {
        let v = self.noisy(base);
        let span = alpha - Rational::one();
        v.into_iter()
            .map(|k| Rational::one() + &span * Rational::new(BigInt::from((k - 1) * 24 / (BASE_MAX - 1)), BigInt::from(24)))
            .collect()
    }
}

fn invalid(msg: String) -> Error {
    Error::InvalidInput(msg)
}

/// Deterministic in (family, n, m, seed); the structural property of the
/// family is verified before returning.
pub fn generate_instance(family: &Family, n: usize, m: usize, seed: u64) -> Result<Instance> {
    if n == 0 || m == 0 || m > 64 {
        return Err(invalid(format!("need n >= 1 and 1 <= m <= 64, got n = {n}, m = {m}")));
    }
    let mut g = Gen::new(seed);
    let base = g.base(m);
    let oracles: Vec<CostOracle> = match family {
        Family::Additive => (0..n).map(|_| CostOracle::additive(g.row(&base))).collect::<Result<_>>()?,
        Family::AdditiveRatio(alpha) => {
            if alpha < &Rational::one() {
                return Err(invalid(format!("additive_ratio needs alpha >= 1, got {alpha}")));
            }
            (0..n).map(|_| CostOracle::additive(g.ratio_row(&base, alpha))).collect::<Result<_>>()?
        }
        Family::CappedAdditive => (0..n)
            .map(|_| {
                let r = g.row(&base);
                g.capped(r)
            })
            .collect::<Result<_>>()?,
        Family::MaxOfAdditive => (0..n).map(|_| g.max_of(&base)).collect::<Result<_>>()?,
        Family::KPartialIdo(k) => {
            if *k == 0 {
                return Err(invalid("k_partial_ido needs k >= 1".into()));
            }
            partial_ido(&mut g, n, m, *k)?
        }
        Family::IdenticalGroups(sizes) => {
            if sizes.len() > 3 || sizes.iter().sum::<usize>() != n {
                return Err(invalid(format!("identical_groups sizes {sizes:?} must be at most 3 groups summing to n = {n}")));
            }
            let mut out = Vec::with_capacity(n);
            for (gi, &s) in sizes.iter().enumerate() {
                let o = match gi {
                    1 => CostOracle::additive(g.ratio_row(&base, &int(2)))?,
                    // half the time group 0 disagrees sharply with group 1
                    0 if g.rng.gen_bool(0.5) => {
                        let spiky = g.spiky_base(m);
                        g.general(&spiky)?
                    }
                    _ => g.general(&base)?,
                };
                out.extend(std::iter::repeat(o).take(s));
            }
            out
        }
    };
    let inst = Instance::new(m, oracles)?;
    verify_family(family, &inst)?;
    Ok(inst)
}

fn partial_ido(g: &mut Gen, n: usize, m: usize, k: usize) -> Result<Vec<CostOracle>> {
    let kk = k.min(m);
    let mut chores: Vec<usize> = (0..m).collect();
    chores.shuffle(&mut g.rng);
    let tops = &chores[..kk];
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let mut row: Vec<i64> = (0..m).map(|_| g.rng.gen_range(1..=20)).collect();
        for (t, &c) in tops.iter().enumerate() {
            row[c] = 20 + 10 * (kk - t) as i64 + g.rng.gen_range(0..=9);
        }
        let costs: Vec<Rational> = row.iter().map(|&x| g.q(x)).collect();
        let o = match g.rng.gen_range(0..3) {
            0 => CostOracle::additive(costs)?,
            1 => g.capped(costs)?,
            _ => {
                let mut rows = vec![costs.clone()];
                for _ in 0..g.rng.gen_range(1..=2) {
                    let mut r = costs.clone();
                    for (c, x) in r.iter_mut().enumerate() {
                        if !tops.contains(&c) {
                            let v = g.rng.gen_range(1..=20);
                            *x = g.q(v);
                        }
                    }
                    rows.push(r);
                }
                CostOracle::max_of_additive(rows)?
            }
        };
        out.push(o);
    }
    Ok(out)
}

fn verify_family(family: &Family, inst: &Instance) -> Result<()> {
    let fail = |what: String| Err(Error::GuaranteeViolated { what, trace: String::new() });
    match family {
        Family::AdditiveRatio(alpha) => {
            for (i, o) in inst.oracles().iter().enumerate() {
                if &o.ratio_bound_of(i)? > alpha {
                    return fail(format!("generated agent {} exceeds ratio bound", i + 1));
                }
            }
        }
        Family::KPartialIdo(k) => {
            if !check_k_partial_ido(inst, *k) {
                return fail(format!("generated instance is not {k}-partial-IDO"));
            }
        }
        Family::IdenticalGroups(sizes) => {
            let mut start = 0;
            for &s in sizes {
                let grp = &inst.oracles()[start..start + s];
                if grp.windows(2).any(|w| w[0] != w[1]) {
                    return fail("generated group oracles differ".into());
                }
                start += s;
            }
        }
        _ => {}
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles::{validate_oracle, Check, CheckLimits};

    #[test]
    fn ratio_family_respects_alpha() {
        let inst = generate_instance(&Family::AdditiveRatio(int(2)), 4, 12, 7).unwrap();
        assert_eq!((inst.n(), inst.m()), (4, 12));
        for o in inst.oracles() {
            assert!(o.ratio_bound().unwrap() <= int(2));
        }
    }

    #[test]
    fn groups_share_oracles() {
        let inst = generate_instance(&Family::IdenticalGroups(vec![2, 2, 1]), 5, 8, 1).unwrap();
        assert_eq!(inst.oracle(0), inst.oracle(1));
        assert_eq!(inst.oracle(2), inst.oracle(3));
        assert!(inst.oracle(2).is_additive());
        assert!(inst.oracle(2).ratio_bound().unwrap() <= int(2));
        assert!(generate_instance(&Family::IdenticalGroups(vec![2, 2]), 5, 8, 1).is_err());
    }

    #[test]
    fn ido_family() {
        let inst = generate_instance(&Family::KPartialIdo(3), 4, 10, 3).unwrap();
        assert!(check_k_partial_ido(&inst, 3));
    }

    #[test]
    fn reproducible() {
        for fam in [Family::Additive, Family::CappedAdditive, Family::MaxOfAdditive, Family::KPartialIdo(2)] {
            for seed in 0..5 {
                assert_eq!(generate_instance(&fam, 3, 7, seed).unwrap(), generate_instance(&fam, 3, 7, seed).unwrap());
            }
        }
        assert_ne!(
            generate_instance(&Family::Additive, 3, 7, 1).unwrap(),
            generate_instance(&Family::Additive, 3, 7, 2).unwrap()
        );
    }

    #[test]
    fn subadditive_families_validate() {
        let lim = CheckLimits::default();
        for fam in [Family::CappedAdditive, Family::MaxOfAdditive, Family::KPartialIdo(2)] {
            for seed in 0..10 {
                let inst = generate_instance(&fam, 3, 7, seed).unwrap();
                for o in inst.oracles() {
                    let r = validate_oracle(o, &[Check::Monotone, Check::Subadditive], &lim).unwrap();
                    assert!(r.all_passed(), "{fam:?} seed {seed}");
                }
            }
        }
    }

    #[test]
    fn group_oracles_are_monotone() {
        for seed in 0..10 {
            let inst = generate_instance(&Family::IdenticalGroups(vec![1, 1, 1]), 3, 9, seed).unwrap();
            for o in inst.oracles() {
                let r = validate_oracle(o, &[Check::Monotone], &CheckLimits::default()).unwrap();
                assert!(r.all_passed());
            }
        }
    }

    #[test]
    fn bad_params() {
        assert!(generate_instance(&Family::AdditiveRatio(Rational::new(1.into(), 2.into())), 2, 4, 0).is_err());
        assert!(generate_instance(&Family::KPartialIdo(0), 2, 4, 0).is_err());
        assert!(generate_instance(&Family::Additive, 0, 4, 0).is_err());
    }
}
