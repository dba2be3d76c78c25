//! The ω-pushdown automaton model.
//!
//! A pushdown transition matrix is stored as its finitely many nonzero
//! blocks `M[p, π]`: rewriting top symbol `p` into the string `π`, whose
//! leftmost symbol becomes the new top. Each block is an `n × n` grid of
//! [`LetterPoly`] coefficients. Blocks for longer stacks are never stored;
//! [`PdMatrix::lookup`] resolves them through the suffix rule
//! `M[pρ, πρ] = M[p, π]`.
//!
//! Besides the model itself this module holds the brute-force run oracles
//! (explicit configuration search) that the saturation and grammar code is
//! checked against.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;

use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};

use crate::error::{Error, Result};

use crate::semiring::{Boolean, NatInf, StarOmega};

/// Index into the pushdown alphabet Γ.
pub type StackSym = usize;

/// An element of Σ ∪ {ε}.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Letter {
    Eps,
    Sym(char),
}

impl Letter {
    pub fn as_char(self) -> Option<char> {
        match self {
            Letter::Eps => None,
            Letter::Sym(c) => Some(c),
        }
    }

    pub fn is_eps(self) -> bool {
        self == Letter::Eps
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Letter::Eps => f.write_str("eps"),
            Letter::Sym(c) => write!(f, "{c}"),
        }
    }
}

/// A polynomial in `S⟨Σ ∪ {ε}⟩`. Zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct LetterPoly<S> {
    terms: BTreeMap<Letter, S>,
}

impl<S: StarOmega> LetterPoly<S> {
    pub fn zero() -> Self {
        LetterPoly { terms: BTreeMap::new() }
    }

    pub fn single(letter: Letter, weight: S) -> Self {
        let mut p = Self::zero();
        p.add_term(letter, weight);
        p
    }

    pub fn eps() -> Self {
        Self::single(Letter::Eps, S::one())
    }

    /// Adds `weight · letter` to the polynomial.
    pub fn add_term(&mut self, letter: Letter, weight: S) {
        let merged = self.coeff(letter) + weight;
        if merged.is_zero() {
            self.terms.remove(&letter);
        } else {
            self.terms.insert(letter, merged);
        }
    }

    pub fn coeff(&self, letter: Letter) -> S {
        self.terms.get(&letter).copied().unwrap_or_else(S::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (Letter, S)> + '_ {
        self.terms.iter().map(|(&l, &w)| (l, w))
    }

    pub fn map_weights<T: StarOmega>(&self, f: impl Fn(S) -> T) -> LetterPoly<T> {
        let mut out = LetterPoly::zero();
        for (l, w) in self.terms() {
            out.add_term(l, f(w));
        }
        out
    }
}

impl<S: fmt::Debug> fmt::Debug for LetterPoly<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.terms.iter().map(|(l, w)| (l.to_string(), w))).finish()
    }
}

/// One `n × n` block of the pushdown transition matrix.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct TransitionBlock<S> {
    n: usize,
    cells: Vec<LetterPoly<S>>,
}

impl<S: StarOmega> TransitionBlock<S> {
    pub fn zeros(n: usize) -> Self {
        TransitionBlock { n, cells: vec![LetterPoly::zero(); n * n] }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn entry(&self, i: usize, j: usize) -> &LetterPoly<S> {
        &self.cells[i * self.n + j]
    }

    pub fn entry_mut(&mut self, i: usize, j: usize) -> &mut LetterPoly<S> {
        &mut self.cells[i * self.n + j]
    }

    pub fn is_zero(&self) -> bool {
        self.cells.iter().all(LetterPoly::is_zero)
    }

    /// Nonzero entries as `(i, j, poly)`.
    pub fn nonzero(&self) -> impl Iterator<Item = (usize, usize, &LetterPoly<S>)> + '_ {
        self.cells.iter().enumerate().filter(|(_, p)| !p.is_zero()).map(move |(k, p)| (k / self.n, k % self.n, p))
    }

    /// Nonzero entries of row `i` as `(j, poly)`.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, &LetterPoly<S>)> + '_ {
        self.cells[i * self.n..(i + 1) * self.n].iter().enumerate().filter(|(_, p)| !p.is_zero())
    }
}

/// The finitely many nonzero blocks `M[p, π]` of a pushdown transition matrix.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PdMatrix<S> {
    n: usize,
    blocks: BTreeMap<(StackSym, Vec<StackSym>), TransitionBlock<S>>,
}

impl<S: StarOmega> PdMatrix<S> {
    pub fn new(n: usize) -> Self {
        PdMatrix { n, blocks: BTreeMap::new() }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Adds `weight · letter` to entry `(i, j)` of block `M[top, push]`.
    pub fn add(&mut self, top: StackSym, push: Vec<StackSym>, i: usize, letter: Letter, j: usize, weight: S) {
        let n = self.n;
        let key = (top, push);
        let block = self.blocks.entry(key.clone()).or_insert_with(|| TransitionBlock::zeros(n));
        block.entry_mut(i, j).add_term(letter, weight);
        if block.is_zero() {
            self.blocks.remove(&key);
        }
    }

    /// Inserts a whole block, replacing any block stored under the same key.
    /// Kept unchecked so that malformed matrices can be built and then
    /// reported by [`OmegaPda::validate`].
    pub fn insert_block(&mut self, top: StackSym, push: Vec<StackSym>, block: TransitionBlock<S>) {
        self.blocks.insert((top, push), block);
    }

    pub fn block(&self, top: StackSym, push: &[StackSym]) -> Option<&TransitionBlock<S>> {
        self.blocks.get(&(top, push.to_vec()))
    }

    pub fn blocks(&self) -> impl Iterator<Item = (StackSym, &[StackSym], &TransitionBlock<S>)> + '_ {
        self.blocks.iter().map(|((p, pi), b)| (*p, pi.as_slice(), b))
    }

    /// Stored blocks with top symbol `p`.
    pub fn blocks_for(&self, p: StackSym) -> impl Iterator<Item = (&[StackSym], &TransitionBlock<S>)> + '_ {
        self.blocks
            .range((p, Vec::new())..)
            .take_while(move |((q, _), _)| *q == p)
            .map(|((_, pi), b)| (pi.as_slice(), b))
    }

    /// The block `M[from, to]` of the full Γ* × Γ* matrix, or `None` if it is
    /// zero.
    pub fn lookup(&self, from: &[StackSym], to: &[StackSym]) -> Option<&TransitionBlock<S>> {
        let (&p, rest) = from.split_first()?;
        if to.len() < rest.len() || &to[to.len() - rest.len()..] != rest {
            return None;
        }
        self.block(p, &to[..to.len() - rest.len()])
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }
}

/// A pushdown configuration; `stack[0]` is the top.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Configuration {
    pub state: usize,
    pub stack: Vec<StackSym>,
}

impl Configuration {
    pub fn new(state: usize, stack: Vec<StackSym>) -> Self {
        Configuration { state, stack }
    }
}

/// An `S′`-ω-pushdown automaton `(n, Γ, Σ, I, M, P, p₀, l)`.
///
/// States are `0..n`; the repeated (Büchi) states are `0..repeated`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct OmegaPda<S> {
    pub states: usize,
    pub gamma: Vec<String>,
    pub sigma: Vec<char>,
    pub initial: Vec<LetterPoly<S>>,
    pub transitions: PdMatrix<S>,
    pub final_weights: Vec<LetterPoly<S>>,
    pub initial_stack: StackSym,
    pub repeated: usize,
}

impl<S: StarOmega> OmegaPda<S> {
    /// An automaton with no transitions and zero initial/final vectors.
    pub fn new(states: usize, gamma: &[&str], sigma: &[char], initial_stack: &str, repeated: usize) -> Self {
        let gamma: Vec<String> = gamma.iter().map(|s| s.to_string()).collect();
        let initial_stack = gamma.iter().position(|g| g == initial_stack).unwrap_or(gamma.len());
        OmegaPda {
            states,
            gamma,
            sigma: sigma.to_vec(),
            initial: vec![LetterPoly::zero(); states],
            transitions: PdMatrix::new(states),
            final_weights: vec![LetterPoly::zero(); states],
            initial_stack,
            repeated,
        }
    }

    pub fn symbol(&self, name: &str) -> Option<StackSym> {
        self.gamma.iter().position(|g| g == name)
    }

    pub fn symbol_name(&self, p: StackSym) -> String {
        self.gamma.get(p).cloned().unwrap_or_else(|| format!("#{p}"))
    }

    pub fn is_repeated(&self, state: usize) -> bool {
        state < self.repeated
    }

    pub fn set_initial(&mut self, state: usize, letter: Letter, weight: S) -> &mut Self {
        self.initial[state].add_term(letter, weight);
        self
    }

    pub fn set_final(&mut self, state: usize, letter: Letter, weight: S) -> &mut Self {
        self.final_weights[state].add_term(letter, weight);
        self
    }

    /// Adds the transition `from --letter/top→push--> to`. Symbol names must
    /// belong to Γ.
    pub fn add_transition(
        &mut self,
        from: usize,
        top: &str,
        letter: Letter,
        to: usize,
        push: &[&str],
        weight: S,
    ) -> &mut Self {
        let top = self.symbol(top).unwrap_or_else(|| panic!("unknown stack symbol {top}"));
        let push = push.iter().map(|s| self.symbol(s).unwrap_or_else(|| panic!("unknown stack symbol {s}"))).collect();
        self.transitions.add(top, push, from, letter, to, weight);
        self
    }

    /// Checks every structural invariant; the result is empty iff the
    /// automaton is well formed.
    pub fn validate(&self) -> Vec<String> {
        let mut out = Vec::new();
        let n = self.states;
        if n == 0 {
            out.push("state count must be at least 1".to_string());
        }
        if self.repeated > n {
            out.push("repeated bound out of range".to_string());
        }
        if self.gamma.is_empty() {
            out.push("stack alphabet is empty".to_string());
        }
        let mut seen = BTreeSet::new();
        for g in &self.gamma {
            if !seen.insert(g) {
                out.push(format!("duplicate stack symbol {g}"));
            }
        }
        let mut seen = BTreeSet::new();
        for c in &self.sigma {
            if !seen.insert(c) {
                out.push(format!("duplicate input letter {c}"));
            }
        }
        if self.initial_stack >= self.gamma.len() {
            out.push("initial stack symbol not in stack alphabet".to_string());
        }
        if self.transitions.dim() != n {
            out.push(format!("transition matrix has dimension {} but there are {n} states", self.transitions.dim()));
        }
        for (name, vector) in [("I", &self.initial), ("P", &self.final_weights)] {
            if vector.len() != n {
                out.push(format!("{name} has length {} but there are {n} states", vector.len()));
            }
            for (i, poly) in vector.iter().enumerate() {
                self.check_letters(poly, &format!("{name}[{}]", i + 1), &mut out);
            }
        }
        for (p, pi, block) in self.transitions.blocks() {
            let label = format!("block ({}, {})", self.symbol_name(p), self.stack_string(pi));
            if p >= self.gamma.len() {
                out.push(format!("{label}: top symbol {} not in stack alphabet", self.symbol_name(p)));
            }
            if let Some(&bad) = pi.iter().find(|&&q| q >= self.gamma.len()) {
                out.push(format!("{label}: pushed symbol {} not in stack alphabet", self.symbol_name(bad)));
            }
            if block.dim() != n {
                out.push(format!("{label}: dimension {} differs from state count {n}", block.dim()));
            }
            if block.is_zero() {
                out.push(format!("{label}: stored block is zero"));
            }
            for (i, j, poly) in block.nonzero() {
                self.check_letters(poly, &format!("{label}[{},{}]", i + 1, j + 1), &mut out);
            }
        }
        out
    }

    fn check_letters(&self, poly: &LetterPoly<S>, at: &str, out: &mut Vec<String>) {
        for (l, _) in poly.terms() {
            if let Letter::Sym(c) = l {
                if !self.sigma.contains(&c) {
                    out.push(format!("{at}: letter {c} not in input alphabet"));
                }
            }
        }
    }

    pub fn ensure_valid(&self) -> Result<()> {
        let v = self.validate();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidAutomaton(v))
        }
    }

    pub fn stack_string(&self, stack: &[StackSym]) -> String {
        if stack.is_empty() {
            "eps".to_string()
        } else {
            stack.iter().map(|&s| self.symbol_name(s)).collect::<Vec<_>>().join(" ")
        }
    }

    pub fn check_word(&self, w: &[char]) -> Result<()> {
        match w.iter().find(|c| !self.sigma.contains(c)) {
            Some(&c) => Err(Error::UnknownLetter(c)),
            None => Ok(()),
        }
    }

    pub fn map_weights<T: StarOmega>(&self, f: impl Fn(S) -> T + Copy) -> OmegaPda<T> {
        let mut transitions = PdMatrix::new(self.transitions.n);
        for (p, pi, block) in self.transitions.blocks() {
            let mut nb = TransitionBlock::zeros(block.dim());
            for (i, j, poly) in block.nonzero() {
                *nb.entry_mut(i, j) = poly.map_weights(f);
            }
            if !nb.is_zero() {
                transitions.insert_block(p, pi.to_vec(), nb);
            }
        }
        OmegaPda {
            states: self.states,
            gamma: self.gamma.clone(),
            sigma: self.sigma.clone(),
            initial: self.initial.iter().map(|p| p.map_weights(f)).collect(),
            transitions,
            final_weights: self.final_weights.iter().map(|p| p.map_weights(f)).collect(),
            initial_stack: self.initial_stack,
            repeated: self.repeated,
        }
    }

    /// The Boolean support automaton.
    pub fn to_boolean(&self) -> OmegaPda<Boolean> {
        self.map_weights(|w| w.support())
    }

    /// Same automaton with a different repeated-state bound.
    pub fn with_repeated(&self, repeated: usize) -> Self {
        OmegaPda { repeated, ..self.clone() }
    }

    /// True when every coefficient of I, M and P is 0 or 1.
    pub fn has_unit_coefficients(&self) -> bool {
        let unit = |p: &LetterPoly<S>| p.terms().all(|(_, w)| w == S::one());
        self.initial.iter().all(unit)
            && self.final_weights.iter().all(unit)
            && self.transitions.blocks().all(|(_, _, b)| b.nonzero().all(|(_, _, p)| unit(p)))
    }

    /// All one-step successors of `c`; empty when the stack is empty.
    pub fn step(&self, c: &Configuration) -> Vec<(Letter, S, Configuration)> {
        let mut out = Vec::new();
        let Some((&top, rest)) = c.stack.split_first() else {
            return out;
        };
        for (pi, block) in self.transitions.blocks_for(top) {
            for (j, poly) in block.row(c.state) {
                let mut stack = pi.to_vec();
                stack.extend_from_slice(rest);
                for (letter, w) in poly.terms() {
                    out.push((letter, w, Configuration::new(j, stack.clone())));
                }
            }
        }
        out
    }
}

/// Receives `(end state, word position, steps)` for each completed run.
type RunSink<'a, S> = dyn FnMut(usize, usize, &[Step<S>]) + 'a;

/// One transition of a run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Step<S> {
    pub from: Configuration,
    pub letter: Letter,
    pub block: (StackSym, Vec<StackSym>),
    pub to: Configuration,
    pub weight: S,
}

/// A finite accepting computation: an initial letter read from `I`, a
/// sequence of transitions that empties the stack, and a final letter read
/// from `P`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Run<S> {
    pub start_state: usize,
    pub start_letter: Letter,
    pub start_weight: S,
    pub steps: Vec<Step<S>>,
    pub final_letter: Letter,
    pub final_weight: S,
}

impl<S: StarOmega> Run<S> {
    pub fn weight(&self) -> S {
        self.steps.iter().fold(self.start_weight, |acc, s| acc * s.weight) * self.final_weight
    }

    pub fn word(&self) -> Vec<char> {
        std::iter::once(self.start_letter)
            .chain(self.steps.iter().map(|s| s.letter))
            .chain(std::iter::once(self.final_letter))
            .filter_map(Letter::as_char)
            .collect()
    }
}

/// Number of runs and their summed weight.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Tally<S> {
    pub runs: NatInf,
    pub weight: S,
}

impl<S: StarOmega> Tally<S> {
    fn zero() -> Self {
        Tally { runs: NatInf::Fin(0), weight: S::zero() }
    }

    fn absorb(&mut self, runs: NatInf, weight: S) {
        self.runs = self.runs + runs;
        self.weight = self.weight + weight;
    }
}

/// Where a finite computation that empties the stack ends: final state, the
/// letters it consumed, and the number of transitions taken.
pub type EmptyingKey = (usize, Vec<char>, usize);

impl<S: StarOmega> OmegaPda<S> {
    /// All accepting runs for `w` of at most `max_steps` transitions.
    pub fn enumerate_accepting_runs(&self, w: &[char], max_steps: usize) -> Vec<Run<S>> {
        let mut out = Vec::new();
        for (i, poly) in self.initial.iter().enumerate() {
            for (a1, w1) in poly.terms() {
                let consumed = usize::from(!a1.is_eps());
                if consumed == 1 && w.first().copied() != a1.as_char() {
                    continue;
                }
                let mut steps = Vec::new();
                let start = Configuration::new(i, vec![self.initial_stack]);
                self.extend_runs(w, consumed, start, max_steps, &mut steps, &mut |j, pos, steps| {
                    for (a2, w2) in self.final_weights[j].terms() {
                        let rest = &w[pos..];
                        let matches = match a2.as_char() {
                            None => rest.is_empty(),
                            Some(c) => rest == [c],
                        };
                        if matches {
                            out.push(Run {
                                start_state: i,
                                start_letter: a1,
                                start_weight: w1,
                                steps: steps.to_vec(),
                                final_letter: a2,
                                final_weight: w2,
                            });
                        }
                    }
                });
            }
        }
        out
    }

    fn extend_runs(
        &self,
        w: &[char],
        pos: usize,
        c: Configuration,
        budget: usize,
        steps: &mut Vec<Step<S>>,
        emit: &mut RunSink<S>,
    ) {
        if c.stack.is_empty() {
            emit(c.state, pos, steps);
            return;
        }
        // Every stack symbol needs at least one more transition to pop.
        if c.stack.len() > budget {
            return;
        }
        let top = c.stack[0];
        let rest_len = c.stack.len() - 1;
        for (letter, weight, next) in self.step(&c) {
            let next_pos = match letter.as_char() {
                None => pos,
                Some(ch) if w.get(pos) == Some(&ch) => pos + 1,
                Some(_) => continue,
            };
            let pushed = next.stack[..next.stack.len() - rest_len].to_vec();
            steps.push(Step { from: c.clone(), letter, block: (top, pushed), to: next.clone(), weight });
            self.extend_runs(w, next_pos, next, budget - 1, steps, emit);
            steps.pop();
        }
    }

    /// Runs from `(state, stack)` that empty the stack within `max_steps`
    /// transitions, grouped by end state, consumed word (at most `max_len`
    /// letters) and exact step count.
    pub fn emptying_profile(
        &self,
        state: usize,
        stack: &[StackSym],
        max_len: usize,
        max_steps: usize,
    ) -> BTreeMap<EmptyingKey, Tally<S>> {
        let mut layer: HashMap<(usize, Vec<StackSym>, Vec<char>), Tally<S>> = HashMap::new();
        let mut out: BTreeMap<EmptyingKey, Tally<S>> = BTreeMap::new();
        if stack.is_empty() {
            out.insert((state, Vec::new(), 0), Tally { runs: NatInf::Fin(1), weight: S::one() });
            return out;
        }
        if stack.len() <= max_steps {
            layer.insert((state, stack.to_vec(), Vec::new()), Tally { runs: NatInf::Fin(1), weight: S::one() });
        }
        for s in 0..max_steps {
            let remaining = max_steps - s - 1;
            let mut next_layer: HashMap<_, Tally<S>> = HashMap::new();
            for ((q, st, word), tally) in layer {
                let c = Configuration::new(q, st);
                for (letter, w, next) in self.step(&c) {
                    let mut word = word.clone();
                    if let Some(ch) = letter.as_char() {
                        if word.len() == max_len {
                            continue;
                        }
                        word.push(ch);
                    }
                    let weight = tally.weight * w;
                    if next.stack.is_empty() {
                        out.entry((next.state, word, s + 1)).or_insert_with(Tally::zero).absorb(tally.runs, weight);
                    } else if next.stack.len() <= remaining {
                        next_layer
                            .entry((next.state, next.stack, word))
                            .or_insert_with(Tally::zero)
                            .absorb(tally.runs, weight);
                    }
                }
            }
            layer = next_layer;
            if layer.is_empty() {
                break;
            }
        }
        out
    }

    /// Every word of length at most `max_len` with an accepting run of at
    /// most `max_steps` transitions, with the number of such runs and their
    /// summed weight.
    pub fn accepted_words(&self, max_len: usize, max_steps: usize) -> BTreeMap<Vec<char>, Tally<S>> {
        let mut out: BTreeMap<Vec<char>, Tally<S>> = BTreeMap::new();
        for (i, poly) in self.initial.iter().enumerate() {
            for (a1, w1) in poly.terms() {
                let prefix: Vec<char> = a1.as_char().into_iter().collect();
                if prefix.len() > max_len {
                    continue;
                }
                let profile = self.emptying_profile(i, &[self.initial_stack], max_len - prefix.len(), max_steps);
                for ((j, mid, _), tally) in profile {
                    for (a2, w2) in self.final_weights[j].terms() {
                        let mut word = prefix.clone();
                        word.extend_from_slice(&mid);
                        word.extend(a2.as_char());
                        if word.len() > max_len {
                            continue;
                        }
                        out.entry(word).or_insert_with(Tally::zero).absorb(tally.runs, w1 * tally.weight * w2);
                    }
                }
            }
        }
        out
    }

    /// States `j` such that `(state, top)` can reach `(j, ε)` without the
    /// stack ever exceeding `height_cap` symbols. Letters are ignored.
    pub fn emptying_targets(&self, state: usize, top: StackSym, height_cap: usize) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        let start = Configuration::new(state, vec![top]);
        let mut seen = BTreeSet::from([start.clone()]);
        let mut queue = VecDeque::from([start]);
        while let Some(c) = queue.pop_front() {
            for (_, _, next) in self.step(&c) {
                if next.stack.is_empty() {
                    out.insert(next.state);
                } else if next.stack.len() <= height_cap && seen.insert(next.clone()) {
                    queue.push_back(next);
                }
            }
        }
        out
    }
}

/// Letter stream of `u·v^ω` as positions `0..|u|+|v|`.
struct Stream {
    letters: Vec<char>,
    loop_start: usize,
}

impl Stream {
    fn new(u: &[char], v: &[char]) -> Self {
        Stream { letters: u.iter().chain(v).copied().collect(), loop_start: u.len() }
    }

    /// Position after reading `letter` at `pos` and whether a letter was
    /// consumed; `None` when the letter does not match the stream.
    fn advance(&self, pos: usize, letter: Letter) -> Option<(usize, bool)> {
        match letter.as_char() {
            None => Some((pos, false)),
            Some(c) if self.letters[pos] == c => {
                let next = if pos + 1 < self.letters.len() { pos + 1 } else { self.loop_start };
                Some((next, true))
            }
            Some(_) => None,
        }
    }
}

/// `(state, top symbol, stream position)`.
type Head = (usize, StackSym, usize);
/// `(state, stream position, passed a repeated state, consumed a letter)`.
type Exit = (usize, usize, bool, bool);

/// Explicit-state search for infinite computations on `u·v^ω`.
///
/// Every infinite computation splits at the positions whose stack height
/// is never undercut later. Between two such positions it leaves a head
/// `(q, A)` by one transition pushing `C₁…C_m`, pops `C₁…C_{j-1}` one
/// after the other and stops at `C_j`. The oracle builds this head graph
/// by breadth-first search over configurations, computing each "pop one
/// symbol" summary with the stack height bounded by `height_cap`. The
/// bound makes it an under-approximation.
struct HeadOracle<'a, S: StarOmega> {
    pda: &'a OmegaPda<S>,
    stream: Stream,
    height_cap: usize,
    emptying: HashMap<Head, BTreeSet<Exit>>,
}

impl<'a, S: StarOmega> HeadOracle<'a, S> {
    fn new(pda: &'a OmegaPda<S>, u: &[char], v: &[char], height_cap: usize) -> Self {
        HeadOracle { pda, stream: Stream::new(u, v), height_cap, emptying: HashMap::new() }
    }

    fn positions(&self) -> usize {
        self.stream.letters.len()
    }

    fn repeated(&self, state: usize) -> bool {
        state < self.pda.repeated
    }

    /// Ways to pop `top` starting from `state` at `pos`.
    fn empty(&mut self, head: Head) -> BTreeSet<Exit> {
        if let Some(out) = self.emptying.get(&head) {
            return out.clone();
        }
        let (state, top, pos) = head;
        let mut out = BTreeSet::new();
        let start = (Configuration::new(state, vec![top]), pos, self.repeated(state), false);
        let mut seen = BTreeSet::from([start.clone()]);
        let mut queue = VecDeque::from([start]);
        while let Some((c, pos, rep, cons)) = queue.pop_front() {
            for (letter, _, next) in self.pda.step(&c) {
                let Some((npos, consumed)) = self.stream.advance(pos, letter) else { continue };
                let rep = rep || self.repeated(next.state);
                let cons = cons || consumed;
                if next.stack.is_empty() {
                    out.insert((next.state, npos, rep, cons));
                } else if next.stack.len() <= self.height_cap {
                    let node = (next, npos, rep, cons);
                    if seen.insert(node.clone()) {
                        queue.push_back(node);
                    }
                }
            }
        }
        self.emptying.insert(head, out.clone());
        out
    }

    /// Head-graph successors with the flags of the connecting segment.
    fn successors(&mut self, head: Head) -> BTreeSet<(Head, bool, bool)> {
        let (state, top, pos) = head;
        let mut out = BTreeSet::new();
        for (letter, _, next) in self.pda.step(&Configuration::new(state, vec![top])) {
            let Some((npos, consumed)) = self.stream.advance(pos, letter) else { continue };
            let mut frontier =
                BTreeSet::from([(next.state, npos, self.repeated(state) || self.repeated(next.state), consumed)]);
            for (k, &sym) in next.stack.iter().enumerate() {
                for &(s, p, rep, cons) in &frontier {
                    out.insert(((s, sym, p), rep, cons));
                }
                if k + 1 == next.stack.len() {
                    break;
                }
                let mut popped = BTreeSet::new();
                for (s, p, rep, cons) in frontier {
                    for (s2, p2, rep2, cons2) in self.empty((s, sym, p)) {
                        popped.insert((s2, p2, rep || rep2, cons || cons2));
                    }
                }
                frontier = popped;
            }
        }
        out
    }

    /// Heads from which an infinite computation reads the whole stream and
    /// (when `need_repeated`) passes repeated states infinitely often.
    fn live_heads(&mut self, need_repeated: bool) -> BTreeSet<Head> {
        let mut graph: DiGraph<Head, (bool, bool)> = DiGraph::new();
        let mut index = HashMap::new();
        for state in 0..self.pda.states {
            for top in 0..self.pda.gamma.len() {
                for pos in 0..self.positions() {
                    index.insert((state, top, pos), graph.add_node((state, top, pos)));
                }
            }
        }
        let heads: Vec<Head> = graph.node_weights().copied().collect();
        for h in heads {
            for (t, rep, cons) in self.successors(h) {
                graph.add_edge(index[&h], index[&t], (rep, cons));
            }
        }
        let mut good = vec![false; graph.node_count()];
        for scc in tarjan_scc(&graph) {
            let member: BTreeSet<NodeIndex> = scc.iter().copied().collect();
            let internal: Vec<(bool, bool)> = graph
                .raw_edges()
                .iter()
                .filter(|e| member.contains(&e.source()) && member.contains(&e.target()))
                .map(|e| e.weight)
                .collect();
            let cons = internal.iter().any(|w| w.1);
            let rep = !need_repeated || internal.iter().any(|w| w.0);
            if cons && rep {
                for x in scc {
                    good[x.index()] = true;
                }
            }
        }
        let mut changed = true;
        while changed {
            changed = false;
            for e in graph.raw_edges() {
                if good[e.target().index()] && !good[e.source().index()] {
                    good[e.source().index()] = true;
                    changed = true;
                }
            }
        }
        graph.node_indices().filter(|x| good[x.index()]).map(|x| graph[x]).collect()
    }

    /// Whether an accepting infinite computation starts in `config` at `pos`:
    /// pop some prefix of the stack, then continue from a live head.
    fn config_live(&mut self, live: &BTreeSet<Head>, config: &Configuration, pos: usize) -> bool {
        let mut frontier = BTreeSet::from([(config.state, pos)]);
        for &sym in &config.stack {
            if frontier.iter().any(|&(s, p)| live.contains(&(s, sym, p))) {
                return true;
            }
            let mut popped = BTreeSet::new();
            for (s, p) in frontier {
                popped.extend(self.empty((s, sym, p)).into_iter().map(|(s2, p2, _, _)| (s2, p2)));
            }
            if popped.is_empty() {
                return false;
            }
            frontier = popped;
        }
        false
    }

    /// Initial configurations with their positions, one entry per distinct
    /// way to start.
    fn initial_configs(&self) -> Vec<(Configuration, usize)> {
        let mut out = Vec::new();
        for (i, poly) in self.pda.initial.iter().enumerate() {
            for (letter, _) in poly.terms() {
                if let Some((pos, _)) = self.stream.advance(0, letter) {
                    out.push((Configuration::new(i, vec![self.pda.initial_stack]), pos));
                }
            }
        }
        out
    }
}

impl<S: StarOmega> OmegaPda<S> {
    /// Explicit-state Büchi check for `u·v^ω`.
    ///
    /// Searches the head graph of the configurations synchronized with the
    /// stream, computing pop summaries with stack height at most
    /// `stack_cap`. Returns `true` when an initial configuration reaches a
    /// cycle that consumes letters and passes a repeated state (the
    /// repeated-state requirement is dropped when `min_repeats == 0`).
    /// `true` implies acceptance; `false` is conclusive only when the cap
    /// is large enough for the automaton.
    pub fn enumerate_omega_run_prefixes(
        &self,
        u: &[char],
        v: &[char],
        stack_cap: usize,
        min_repeats: usize,
    ) -> Result<bool> {
        if v.is_empty() {
            return Err(Error::EmptyPeriod);
        }
        let mut oracle = HeadOracle::new(self, u, v, stack_cap);
        let live = oracle.live_heads(min_repeats > 0);
        let starts = oracle.initial_configs();
        Ok(starts.iter().any(|(c, pos)| oracle.config_live(&live, c, *pos)))
    }

    /// For `s = 0..=max_steps`, the number of distinct `s`-step computation
    /// prefixes on `u·v^ω` that extend to an accepting infinite computation
    /// (as far as the search with `stack_cap` can tell).
    pub fn live_prefix_counts(
        &self,
        u: &[char],
        v: &[char],
        stack_cap: usize,
        max_steps: usize,
    ) -> Result<Vec<NatInf>> {
        if v.is_empty() {
            return Err(Error::EmptyPeriod);
        }
        let mut oracle = HeadOracle::new(self, u, v, stack_cap);
        let live = oracle.live_heads(true);
        let mut layer: BTreeMap<(Configuration, usize), u64> = BTreeMap::new();
        for (c, pos) in oracle.initial_configs() {
            if oracle.config_live(&live, &c, pos) {
                *layer.entry((c, pos)).or_default() += 1;
            }
        }
        let mut out = Vec::with_capacity(max_steps + 1);
        for s in 0..=max_steps {
            out.push(layer.values().fold(NatInf::Fin(0), |acc, &k| acc + NatInf::Fin(k)));
            if s == max_steps {
                break;
            }
            let mut next: BTreeMap<(Configuration, usize), u64> = BTreeMap::new();
            for ((c, pos), k) in &layer {
                for (letter, _, succ) in self.step(c) {
                    let Some((npos, _)) = oracle.stream.advance(*pos, letter) else { continue };
                    if succ.stack.is_empty() || !oracle.config_live(&live, &succ, npos) {
                        continue;
                    }
                    let slot = next.entry((succ, npos)).or_default();
                    *slot = slot.saturating_add(*k);
                }
            }
            layer = next;
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{e1, e2, e3};

    fn word(s: &str) -> Vec<char> {
        s.chars().collect()
    }

    #[test]
    fn e1_is_valid() {
        assert!(e1().validate().is_empty());
    }

    #[test]
    fn foreign_top_symbol_is_reported() {
        let mut p = e1();
        let mut block = TransitionBlock::zeros(1);
        block.entry_mut(0, 0).add_term(Letter::Sym('a'), Boolean(true));
        p.transitions.insert_block(7, vec![], block);
        let v = p.validate();
        assert_eq!(v.len(), 1, "{v:?}");
        assert!(v[0].contains("#7"), "{v:?}");
    }

    #[test]
    fn repeated_bound_out_of_range() {
        let p = e1().with_repeated(2);
        assert_eq!(p.validate(), vec!["repeated bound out of range".to_string()]);
    }

    #[test]
    fn zero_block_and_bad_letter_are_reported() {
        let mut p = e1();
        p.transitions.insert_block(0, vec![0, 0, 0], TransitionBlock::zeros(1));
        let mut block = TransitionBlock::zeros(1);
        block.entry_mut(0, 0).add_term(Letter::Sym('z'), Boolean(true));
        p.transitions.insert_block(0, vec![0, 0, 0, 0], block);
        let v = p.validate();
        assert_eq!(v.len(), 2, "{v:?}");
    }

    #[test]
    fn step_reads_blocks() {
        let p = e1();
        let succ = p.step(&Configuration::new(0, vec![0]));
        assert_eq!(
            succ,
            vec![
                (Letter::Sym('b'), Boolean(true), Configuration::new(0, vec![])),
                (Letter::Sym('a'), Boolean(true), Configuration::new(0, vec![0, 0])),
            ]
        );
        assert!(p.step(&Configuration::new(0, vec![])).is_empty());

        let p = e3();
        let q = p.symbol("q").unwrap();
        let succ = p.step(&Configuration::new(0, vec![0]));
        assert_eq!(
            succ,
            vec![
                (Letter::Sym('a'), Boolean(true), Configuration::new(0, vec![])),
                (Letter::Sym('a'), Boolean(true), Configuration::new(0, vec![q])),
            ]
        );
    }

    #[test]
    fn suffix_rule_lookup() {
        let p = e1();
        let m = &p.transitions;
        assert!(m.lookup(&[0], &[0, 0]).is_some());
        assert!(m.lookup(&[0, 0], &[0, 0, 0]).is_some());
        assert!(m.lookup(&[0, 0], &[0]).is_some());
        assert!(m.lookup(&[0, 0], &[]).is_none());
        assert!(m.lookup(&[], &[]).is_none());
        // Exhaustive over suffixes of length ≤ 2 in a two-symbol alphabet.
        let p = e3();
        let m = &p.transitions;
        let suffixes: Vec<Vec<StackSym>> =
            vec![vec![], vec![0], vec![1], vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]];
        for (top, pi, block) in m.blocks() {
            for sfx in &suffixes {
                let mut from = vec![top];
                from.extend(sfx);
                let mut to = pi.to_vec();
                to.extend(sfx);
                assert_eq!(m.lookup(&from, &to), Some(block));
            }
        }
    }

    #[test]
    fn accepting_runs_of_e1() {
        let p = e1();
        assert_eq!(p.enumerate_accepting_runs(&word("b"), 4).len(), 1);
        assert_eq!(p.enumerate_accepting_runs(&word("ab"), 8).len(), 0);
        let runs = p.enumerate_accepting_runs(&word("abb"), 8);
        assert_eq!(runs.len(), 1);
        assert_eq!(runs[0].steps.len(), 3);
        assert_eq!(runs[0].word(), word("abb"));
        assert_eq!(runs[0].weight(), Boolean(true));
    }

    #[test]
    fn accepted_words_agrees_with_run_enumeration() {
        let p = e3();
        let words = p.accepted_words(3, 10);
        for (w, tally) in &words {
            assert_eq!(tally.runs, NatInf::Fin(p.enumerate_accepting_runs(w, 10).len() as u64));
        }
        assert_eq!(words.get(&word("a")).map(|t| t.runs), Some(NatInf::Fin(2)));
    }

    #[test]
    fn more_steps_never_remove_runs() {
        let p = e1();
        for w in ["b", "abb", "aabbb", "ababb"] {
            let mut last = 0;
            for steps in 0..12 {
                let k = p.enumerate_accepting_runs(&word(w), steps).len();
                assert!(k >= last);
                last = k;
            }
            assert_eq!(last, 1);
        }
    }

    #[test]
    fn omega_prefix_oracle() {
        let p = e2();
        assert!(p.enumerate_omega_run_prefixes(&[], &word("a"), 3, 1).unwrap());
        assert!(!p.enumerate_omega_run_prefixes(&[], &word("b"), 3, 1).unwrap());
        assert!(p.enumerate_omega_run_prefixes(&word("a"), &word("ab"), 4, 1).unwrap());
        assert!(!e1().enumerate_omega_run_prefixes(&[], &word("a"), 3, 1).unwrap());
        // Without the Büchi requirement E1 has the infinite push run.
        assert!(e1().enumerate_omega_run_prefixes(&[], &word("a"), 3, 0).unwrap());
        assert_eq!(p.enumerate_omega_run_prefixes(&[], &[], 3, 1), Err(Error::EmptyPeriod));
    }

    #[test]
    fn live_prefix_counts_examples() {
        let p = e2();
        let counts = p.live_prefix_counts(&[], &word("a"), 4, 6).unwrap();
        assert_eq!(counts, vec![NatInf::Fin(1); 7]);
        assert_eq!(p.live_prefix_counts(&[], &word("b"), 4, 3).unwrap(), vec![NatInf::Fin(0); 4]);
        // A silent self-loop doubles the choices at every step.
        let pumped = crate::instances::e4().with_repeated(1);
        let counts = pumped.live_prefix_counts(&[], &word("a"), 4, 3).unwrap();
        assert_eq!(counts, vec![NatInf::Fin(1), NatInf::Fin(2), NatInf::Fin(4), NatInf::Fin(8)]);
    }

    #[test]
    fn emptying_targets_of_e1() {
        assert_eq!(e1().emptying_targets(0, 0, 3), BTreeSet::from([0]));
    }
}
