//! Büchi acceptance of ultimately periodic words `u·v^ω`.

use std::fmt;

use crate::error::{Error, Result};
use crate::pda::{Letter, LetterPoly, OmegaPda, PdMatrix};
use crate::reachability::omega_pairs_reading;
use crate::semiring::StarOmega;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LassoWord {
    pub u: Vec<char>,
    pub v: Vec<char>,
}

impl LassoWord {
    pub fn new(u: &str, v: &str) -> Result<Self> {
        Self::from_parts(u.chars().collect(), v.chars().collect())
    }

    pub fn from_parts(u: Vec<char>, v: Vec<char>) -> Result<Self> {
        if v.is_empty() {
            return Err(Error::EmptyPeriod);
        }
        Ok(LassoWord { u, v })
    }

    /// Letter at position `k` of `u·v^ω`.
    pub fn letter_at(&self, k: usize) -> char {
        if k < self.u.len() {
            self.u[k]
        } else {
            self.v[(k - self.u.len()) % self.v.len()]
        }
    }

    /// Canonical representative: `v` becomes its primitive root, then
    /// trailing letters of `u` are folded into the period by rotation.
    pub fn normalize(&self) -> LassoWord {
        let mut v = primitive_root(&self.v).to_vec();
        let mut u = self.u.clone();
        while let (Some(&a), Some(&b)) = (u.last(), v.last()) {
            if a != b {
                break;
            }
            u.pop();
            v.rotate_right(1);
        }
        LassoWord { u, v }
    }

    /// Positions of the deterministic lasso consumer: `0..|u|+|v|`.
    pub fn positions(&self) -> usize {
        self.u.len() + self.v.len()
    }

    pub fn next_position(&self, k: usize) -> usize {
        if k + 1 < self.positions() {
            k + 1
        } else {
            self.u.len()
        }
    }
}

impl fmt::Display for LassoWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let u: String = self.u.iter().collect();
        let v: String = self.v.iter().collect();
        write!(f, "{u}({v})^w")
    }
}

fn primitive_root(v: &[char]) -> &[char] {
    let n = v.len();
    (1..=n).filter(|d| n.is_multiple_of(*d)).find(|&d| (d..n).all(|k| v[k] == v[k - d])).map_or(v, |d| &v[..d])
}

/// Product of `pda` with the lasso consumer of `w` (normalized first).
///
/// Product state `(i, k)` is numbered `i·N + k` with `N = |u| + |v|`, so the
/// repeated states `i < l` come first and the product's repeated bound is
/// `l·N`. Letter transitions advance the position when the letter matches
/// the stream; ε-transitions keep it. Initial letters are consumed from the
/// start of the stream; final weights are dropped.
pub fn product_pda<S: StarOmega>(pda: &OmegaPda<S>, w: &LassoWord) -> OmegaPda<S> {
    let w = w.normalize();
    let npos = w.positions();
    let n = pda.states * npos;
    let id = |i: usize, k: usize| i * npos + k;

    let mut transitions = PdMatrix::new(n);
    for (p, pi, block) in pda.transitions.blocks() {
        for (i, j, poly) in block.nonzero() {
            for (letter, weight) in poly.terms() {
                for k in 0..npos {
                    match letter {
                        Letter::Eps => transitions.add(p, pi.to_vec(), id(i, k), Letter::Eps, id(j, k), weight),
                        Letter::Sym(c) if w.letter_at(k) == c => {
                            transitions.add(p, pi.to_vec(), id(i, k), letter, id(j, w.next_position(k)), weight)
                        }
                        Letter::Sym(_) => {}
                    }
                }
            }
        }
    }

    let mut initial = vec![LetterPoly::zero(); n];
    for (i, poly) in pda.initial.iter().enumerate() {
        for (letter, weight) in poly.terms() {
            match letter {
                Letter::Eps => initial[id(i, 0)].add_term(Letter::Eps, weight),
                Letter::Sym(c) if w.letter_at(0) == c => {
                    initial[id(i, w.next_position(0))].add_term(Letter::Eps, weight)
                }
                Letter::Sym(_) => {}
            }
        }
    }

    OmegaPda {
        states: n,
        gamma: pda.gamma.clone(),
        sigma: pda.sigma.clone(),
        initial,
        transitions,
        final_weights: vec![LetterPoly::zero(); n],
        initial_stack: pda.initial_stack,
        repeated: pda.repeated * npos,
    }
}

/// Whether `u·v^ω` has an accepting infinite computation: some initial
/// product state with `p₀` on the stack starts an infinite computation that
/// reads the whole word and visits repeated states infinitely often.
pub fn lasso_accepts<S: StarOmega>(pda: &OmegaPda<S>, w: &LassoWord) -> Result<bool> {
    pda.ensure_valid()?;
    if w.v.is_empty() {
        return Err(Error::EmptyPeriod);
    }
    let product = product_pda(pda, w);
    let pairs = omega_pairs_reading(&product);
    Ok(product
        .initial
        .iter()
        .enumerate()
        .any(|(s, poly)| !poly.is_zero() && pairs.contains(&(s, product.initial_stack))))
}
