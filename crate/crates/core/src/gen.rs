//! Seeded random automata for property checks.
//!
//! Instance `k` of seed `s` is drawn from its own ChaCha8 stream, so a
//! suite can evaluate instances in any order and still see the same ones.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::pda::{Letter, OmegaPda, StackSym};
use crate::semiring::Boolean;

const GAMMA: [&str; 3] = ["p", "q", "r"];
const SIGMA: [char; 2] = ['a', 'b'];
const ONE: Boolean = Boolean(true);

/// Size bounds of generated instances.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Bounds {
    pub max_states: usize,
    pub max_gamma: usize,
    pub max_sigma: usize,
    pub max_blocks: usize,
    pub max_push: usize,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds { max_states: 3, max_gamma: 3, max_sigma: 2, max_blocks: 6, max_push: 2 }
    }
}

/// Which family of automata to draw from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    /// Arbitrary blocks, ε-transitions allowed.
    General,
    /// Only `(p, p)` blocks and no ε-transitions, so the stack never
    /// changes and the automaton is a finite Büchi automaton in disguise.
    GammaPreserving,
}

pub fn rng_for(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Instance `index` of the sequence determined by `seed`.
pub fn instance(seed: u64, index: u64, family: Family) -> OmegaPda<Boolean> {
    random_pda(&mut rng_for(seed, index), Bounds::default(), family)
}

/// The first `count` instances of `seed`.
pub fn instances(seed: u64, count: usize, family: Family) -> Vec<OmegaPda<Boolean>> {
    (0..count as u64).map(|k| instance(seed, k, family)).collect()
}

pub fn random_pda<R: Rng>(rng: &mut R, bounds: Bounds, family: Family) -> OmegaPda<Boolean> {
    let n = rng.gen_range(1..=bounds.max_states);
    let ng = rng.gen_range(1..=bounds.max_gamma.min(GAMMA.len()));
    let ns = rng.gen_range(1..=bounds.max_sigma.min(SIGMA.len()));
    let l = rng.gen_range(0..=n);
    let gamma = &GAMMA[..ng];
    let sigma = &SIGMA[..ns];
    let mut pda = OmegaPda::new(n, gamma, sigma, gamma[0], l);

    let letter = |rng: &mut R, eps_allowed: bool| {
        if eps_allowed && rng.gen_bool(0.3) {
            Letter::Eps
        } else {
            Letter::Sym(*sigma.choose(rng).unwrap())
        }
    };
    let general = family == Family::General;

    pda.set_initial(0, if general { letter(rng, true) } else { Letter::Eps }, ONE);
    if n > 1 && rng.gen_bool(0.3) {
        let i = rng.gen_range(1..n);
        pda.set_initial(i, if general { letter(rng, true) } else { Letter::Eps }, ONE);
    }
    for _ in 0..rng.gen_range(1..=2) {
        let j = rng.gen_range(0..n);
        pda.set_final(j, letter(rng, true), ONE);
    }

    let mut keys: BTreeSet<(StackSym, Vec<StackSym>)> = BTreeSet::new();
    let nblocks = rng.gen_range(1..=bounds.max_blocks);
    for _ in 0..nblocks {
        let p = rng.gen_range(0..ng);
        let push: Vec<StackSym> = match family {
            Family::GammaPreserving => vec![p],
            Family::General => {
                let len = rng.gen_range(0..=bounds.max_push);
                (0..len).map(|_| rng.gen_range(0..ng)).collect()
            }
        };
        keys.insert((p, push));
    }
    for (p, push) in keys {
        let names: Vec<&str> = push.iter().map(|&s| gamma[s]).collect();
        for _ in 0..rng.gen_range(1..=2) {
            let i = rng.gen_range(0..n);
            let j = rng.gen_range(0..n);
            let a = letter(rng, general);
            pda.add_transition(i, gamma[p], a, j, &names, ONE);
        }
    }
    debug_assert!(pda.validate().is_empty(), "{:?}", pda.validate());
    pda
}

/// Adds a silent loop `i → i` that keeps the top symbol, for some state and
/// symbol that already have a transition, so accepted words get infinitely
/// many computations.
pub fn with_epsilon_pump<R: Rng>(pda: &OmegaPda<Boolean>, rng: &mut R) -> OmegaPda<Boolean> {
    let mut out = pda.clone();
    let heads: Vec<(usize, StackSym)> = pda
        .transitions
        .blocks()
        .flat_map(|(p, _, block)| block.nonzero().map(move |(i, _, _)| (i, p)).collect::<Vec<_>>())
        .collect();
    let &(i, p) = heads.choose(rng).unwrap_or(&(0, pda.initial_stack));
    let name = pda.symbol_name(p);
    out.add_transition(i, &name, Letter::Eps, i, &[&name], ONE);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generated_instances_are_valid_and_bounded() {
        for family in [Family::General, Family::GammaPreserving] {
            for p in instances(7, 200, family) {
                assert!(p.validate().is_empty());
                assert!(p.states <= 3 && p.gamma.len() <= 3 && p.sigma.len() <= 2);
                assert!(p.transitions.num_blocks() <= 6);
                for (top, pi, block) in p.transitions.blocks() {
                    assert!(pi.len() <= 2);
                    if family == Family::GammaPreserving {
                        assert_eq!(pi, &[top][..]);
                        assert!(block.nonzero().all(|(_, _, poly)| poly.coeff(Letter::Eps) == Boolean(false)));
                    }
                }
            }
        }
    }

    #[test]
    fn same_seed_same_instances() {
        assert_eq!(instances(3, 20, Family::General), instances(3, 20, Family::General));
        assert_eq!(instance(3, 5, Family::General), instances(3, 6, Family::General)[5]);
        assert_ne!(instances(3, 20, Family::General), instances(4, 20, Family::General));
    }

    #[test]
    fn pump_adds_a_silent_loop() {
        let p = instance(1, 0, Family::General);
        let q = with_epsilon_pump(&p, &mut rng_for(1, 0));
        assert!(q.validate().is_empty());
        assert!(q.transitions.blocks().any(|(top, pi, block)| pi == [top]
            && block.nonzero().any(|(i, j, poly)| i == j && poly.coeff(Letter::Eps) == Boolean(true))));
    }
}
