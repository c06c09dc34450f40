#![allow(dead_code)]

use std::collections::BTreeMap;

use cryoqaoa::counter::EntryId;
use cryoqaoa::ising::{BitString, IsingInstance};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random integer instance; each term is present with probability `density`
/// and takes a nonzero value in `[-max_abs, max_abs]`.
pub fn random_instance(rng: &mut impl Rng, n: usize, density: f64, max_abs: i64) -> IsingInstance {
    let mut inst = IsingInstance::new(n).unwrap();
    let nonzero = |rng: &mut dyn rand::RngCore| loop {
        let v = rng.random_range(-max_abs..=max_abs);
        if v != 0 {
            return v;
        }
    };
    for i in 0..n {
        if rng.random::<f64>() < density {
            inst.set_linear(i, nonzero(rng)).unwrap();
        }
        for j in i + 1..n {
            if rng.random::<f64>() < density {
                inst.set_pair(i, j, nonzero(rng)).unwrap();
            }
        }
    }
    inst
}

pub fn random_trials(rng: &mut impl Rng, n: usize, t: usize) -> Vec<BitString> {
    (0..t).map(|_| BitString::new((0..n).map(|_| rng.random::<bool>()).collect())).collect()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Per-term tallies summed trial by trial, written without the library's
/// counter code.
pub fn direct_tallies(inst: &IsingInstance, trials: &[BitString]) -> BTreeMap<EntryId, u64> {
    let mut out = BTreeMap::new();
    for (i, c) in inst.linear_terms() {
        if !c.is_zero() {
            out.insert(EntryId::Single(i), trials.iter().filter(|z| z.bits()[i]).count() as u64);
        }
    }
    for (p, c) in inst.pair_terms() {
        if !c.is_zero() {
            let n = trials.iter().filter(|z| z.bits()[p.lo()] ^ z.bits()[p.hi()]).count();
            out.insert(EntryId::Pair(p.lo(), p.hi()), n as u64);
        }
    }
    out
}

/// Σ_t C(z_t) over integer coefficients, evaluated term by term.
pub fn direct_cost_sum(inst: &IsingInstance, trials: &[BitString]) -> i128 {
    let mut sum = 0i128;
    for z in trials {
        let bits = z.bits();
        for (i, c) in inst.linear_terms() {
            if bits[i] {
                sum += i128::from(c.as_integer().unwrap());
            }
        }
        for (p, c) in inst.pair_terms() {
            if bits[p.lo()] != bits[p.hi()] {
                sum += i128::from(c.as_integer().unwrap());
            }
        }
    }
    sum
}
