//! The triple-pair construction.
//!
//! From an ω-pushdown automaton we build a mixed context-free grammar with
//! triple variables `[i,p,j]` for finite derivations (computations from
//! state `i` with `p` on top that end in `j` once `p` is gone) and pair
//! variables `[i,p]` for infinite derivations (computations from `i` with
//! `p` on top that never pop `p`).
//!
//! Finite-word weights are computed by a chart over substrings. Every
//! substring is one stratum of a monotone system over the X-variables; the
//! system is iterated from zero and unknowns that still grow after the
//! stabilization window are set to ∞.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::{self, Write as _};

use crate::error::{Error, Result};
use crate::pda::{Letter, OmegaPda, StackSym};
use crate::semiring::{NatInf, StarOmega};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Var {
    StartX,
    Triple(usize, StackSym, usize),
    StartZ,
    Pair(usize, StackSym),
}

impl Var {
    pub fn is_x(self) -> bool {
        matches!(self, Var::StartX | Var::Triple(..))
    }

    pub fn first_state(self) -> Option<usize> {
        match self {
            Var::Triple(i, _, _) | Var::Pair(i, _) => Some(i),
            Var::StartX | Var::StartZ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Symbol {
    Terminal(char),
    Var(Var),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProductionKind {
    Finite,
    Infinite,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Production<S> {
    pub lhs: Var,
    pub rhs: Vec<Symbol>,
    /// Coefficient of the automaton entry the production came from (product
    /// of the `I` and `P` coefficients for `x₀`-productions).
    pub weight: S,
}

impl<S> Production<S> {
    pub fn kind(&self) -> ProductionKind {
        if self.lhs.is_x() {
            ProductionKind::Finite
        } else {
            ProductionKind::Infinite
        }
    }

    fn sort_key(&self) -> (Var, Option<char>, &[Symbol]) {
        let first_terminal = self.rhs.iter().find_map(|s| match s {
            Symbol::Terminal(c) => Some(*c),
            Symbol::Var(_) => None,
        });
        (self.lhs, first_terminal, &self.rhs)
    }
}

/// `G_l = (X, Z, Σ, P_X, P_Z, x₀, z₀, l)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MixedGrammar<S> {
    pub states: usize,
    pub gamma: Vec<String>,
    pub sigma: Vec<char>,
    pub repeated: usize,
    pub x_vars: BTreeSet<Var>,
    pub z_vars: BTreeSet<Var>,
    pub finite: Vec<Production<S>>,
    pub infinite: Vec<Production<S>>,
}

/// All `n^len` state tuples, lexicographically.
fn state_tuples(n: usize, len: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|t| {
                (0..n).map(move |m| {
                    let mut t = t.clone();
                    t.push(m);
                    t
                })
            })
            .collect();
    }
    out
}

fn push_letter(rhs: &mut Vec<Symbol>, letter: Letter) {
    if let Letter::Sym(c) = letter {
        rhs.push(Symbol::Terminal(c));
    }
}

/// Builds `G_l` from a valid automaton.
pub fn triple_pair_construct<S: StarOmega>(pda: &OmegaPda<S>) -> Result<MixedGrammar<S>> {
    pda.ensure_valid()?;
    let n = pda.states;
    let p0 = pda.initial_stack;
    let mut finite = Vec::new();
    let mut infinite = Vec::new();

    for (m1, i_poly) in pda.initial.iter().enumerate() {
        for (a1, w1) in i_poly.terms() {
            for (m2, p_poly) in pda.final_weights.iter().enumerate() {
                for (a2, w2) in p_poly.terms() {
                    let mut rhs = Vec::new();
                    push_letter(&mut rhs, a1);
                    rhs.push(Symbol::Var(Var::Triple(m1, p0, m2)));
                    push_letter(&mut rhs, a2);
                    finite.push(Production { lhs: Var::StartX, rhs, weight: w1 * w2 });
                }
            }
            let mut rhs = Vec::new();
            push_letter(&mut rhs, a1);
            rhs.push(Symbol::Var(Var::Pair(m1, p0)));
            infinite.push(Production { lhs: Var::StartZ, rhs, weight: w1 });
        }
    }

    for (p, pi, block) in pda.transitions.blocks() {
        let k = pi.len();
        for (i, m1, poly) in block.nonzero() {
            for (a, w) in poly.terms() {
                // [i,p,j] → a [m1,p1,m2] … [mk,pk,j]
                if k == 0 {
                    let mut rhs = Vec::new();
                    push_letter(&mut rhs, a);
                    finite.push(Production { lhs: Var::Triple(i, p, m1), rhs, weight: w });
                } else {
                    for tail in state_tuples(n, k) {
                        // tail = (m2, …, mk, j)
                        let mut rhs = Vec::new();
                        push_letter(&mut rhs, a);
                        let mut from = m1;
                        for (t, &q) in pi.iter().enumerate() {
                            rhs.push(Symbol::Var(Var::Triple(from, q, tail[t])));
                            from = tail[t];
                        }
                        finite.push(Production { lhs: Var::Triple(i, p, tail[k - 1]), rhs, weight: w });
                    }
                }
                // [i,p] → a [m1,p1,m2] … [m_{j-1},p_{j-1},m_j] [m_j,p_j]
                for j in 1..=k {
                    for mids in state_tuples(n, j - 1) {
                        let mut rhs = Vec::new();
                        push_letter(&mut rhs, a);
                        let mut from = m1;
                        for (t, &q) in pi[..j - 1].iter().enumerate() {
                            rhs.push(Symbol::Var(Var::Triple(from, q, mids[t])));
                            from = mids[t];
                        }
                        rhs.push(Symbol::Var(Var::Pair(from, pi[j - 1])));
                        infinite.push(Production { lhs: Var::Pair(i, p), rhs, weight: w });
                    }
                }
            }
        }
    }

    let mut x_vars = BTreeSet::from([Var::StartX]);
    let mut z_vars = BTreeSet::from([Var::StartZ]);
    for i in 0..n {
        for p in 0..pda.gamma.len() {
            z_vars.insert(Var::Pair(i, p));
            for j in 0..n {
                x_vars.insert(Var::Triple(i, p, j));
            }
        }
    }

    let mut g = MixedGrammar {
        states: n,
        gamma: pda.gamma.clone(),
        sigma: pda.sigma.clone(),
        repeated: pda.repeated,
        x_vars,
        z_vars,
        finite,
        infinite,
    };
    g.sort();
    Ok(g)
}

impl<S: StarOmega> MixedGrammar<S> {
    fn sort(&mut self) {
        self.finite.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
        self.infinite.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
    }

    /// The repeated Z-variables `{[i,p] : i ≤ l}` still present in the grammar.
    pub fn repeated_z(&self) -> Vec<Var> {
        self.z_vars.iter().copied().filter(|v| matches!(v, Var::Pair(i, _) if *i < self.repeated)).collect()
    }

    pub fn productions(&self) -> impl Iterator<Item = &Production<S>> {
        self.finite.iter().chain(&self.infinite)
    }

    pub fn var_name(&self, v: Var) -> String {
        let sym = |p: StackSym| self.gamma.get(p).cloned().unwrap_or_else(|| format!("#{p}"));
        match v {
            Var::StartX => "x0".to_string(),
            Var::StartZ => "z0".to_string(),
            Var::Triple(i, p, j) => format!("[{},{},{}]", i + 1, sym(p), j + 1),
            Var::Pair(i, p) => format!("[{},{}]", i + 1, sym(p)),
        }
    }

    pub fn production_text(&self, prod: &Production<S>) -> String {
        let mut s = format!("{} ->", self.var_name(prod.lhs));
        if prod.rhs.is_empty() {
            s.push_str(" eps");
        }
        for sym in &prod.rhs {
            match sym {
                Symbol::Terminal(c) => write!(s, " {c}").unwrap(),
                Symbol::Var(v) => write!(s, " {}", self.var_name(*v)).unwrap(),
            }
        }
        if prod.weight != S::one() {
            write!(s, " @ {}", prod.weight).unwrap();
        }
        s
    }

    /// The textual grammar format: three header lines, then `P_X` and `P_Z`
    /// one production per line.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "#semiring {}", S::NAME).unwrap();
        writeln!(out, "#l {}", self.repeated).unwrap();
        let reps: Vec<String> = self.repeated_z().into_iter().map(|v| self.var_name(v)).collect();
        if reps.is_empty() {
            out.push_str("#repeated-z\n");
        } else {
            writeln!(out, "#repeated-z {}", reps.join(" ")).unwrap();
        }
        for prod in self.productions() {
            out.push_str(&self.production_text(prod));
            out.push('\n');
        }
        out
    }

    /// Removes X-variables that are non-productive or unreachable,
    /// Z-variables unreachable from `z₀` and Z-variables that reach no
    /// variable with a repeated first state, together with every production
    /// that mentions a removed variable.
    pub fn trim(&self) -> MixedGrammar<S> {
        let productive = self.productive_x();
        let keep_prod = |p: &Production<S>| {
            let ok = |v: Var| !v.is_x() || v == Var::StartX || productive.contains(&v);
            ok(p.lhs)
                && p.rhs.iter().all(|s| match s {
                    Symbol::Var(v) => ok(*v),
                    Symbol::Terminal(_) => true,
                })
        };
        let finite: Vec<_> = self.finite.iter().filter(|p| keep_prod(p)).cloned().collect();
        let infinite: Vec<_> = self.infinite.iter().filter(|p| keep_prod(p)).cloned().collect();

        // A Z-variable stays when z0 reaches it and it reaches a variable
        // whose first state is repeated; otherwise no infinite derivation
        // through it can be accepting.
        let z_reach = reachable(Var::StartZ, &infinite);
        let all: Vec<Production<S>> = finite.iter().chain(&infinite).cloned().collect();
        let z_vars: BTreeSet<Var> = self
            .z_vars
            .iter()
            .copied()
            .filter(|v| z_reach.contains(v))
            .filter(|&v| reachable(v, &all).iter().any(|w| w.first_state().is_some_and(|i| i < self.repeated)))
            .collect();
        let z_roots: Vec<Var> = infinite
            .iter()
            .filter(|p| z_vars.contains(&p.lhs))
            .flat_map(|p| p.rhs.iter())
            .filter_map(|s| match s {
                Symbol::Var(v) if v.is_x() => Some(*v),
                _ => None,
            })
            .chain(std::iter::once(Var::StartX))
            .collect();
        let mut x_reach = BTreeSet::new();
        for root in z_roots {
            if !x_reach.contains(&root) {
                x_reach.extend(reachable(root, &finite));
            }
        }

        let x_vars: BTreeSet<Var> = self
            .x_vars
            .iter()
            .copied()
            .filter(|&v| v == Var::StartX || (productive.contains(&v) && x_reach.contains(&v)))
            .collect();
        let keep = |p: &Production<S>| {
            std::iter::once(p.lhs)
                .chain(p.rhs.iter().filter_map(|s| match s {
                    Symbol::Var(v) => Some(*v),
                    Symbol::Terminal(_) => None,
                }))
                .all(|v| x_vars.contains(&v) || z_vars.contains(&v))
        };
        MixedGrammar {
            states: self.states,
            gamma: self.gamma.clone(),
            sigma: self.sigma.clone(),
            repeated: self.repeated,
            finite: finite.into_iter().filter(|p| keep(p)).collect(),
            infinite: infinite.into_iter().filter(|p| keep(p)).collect(),
            x_vars,
            z_vars,
        }
    }

    /// X-variables that derive some terminal word.
    pub fn productive_x(&self) -> BTreeSet<Var> {
        let mut productive = BTreeSet::new();
        let mut changed = true;
        while changed {
            changed = false;
            for p in &self.finite {
                if productive.contains(&p.lhs) {
                    continue;
                }
                let ok = p.rhs.iter().all(|s| match s {
                    Symbol::Var(v) => productive.contains(v),
                    Symbol::Terminal(_) => true,
                });
                if ok {
                    productive.insert(p.lhs);
                    changed = true;
                }
            }
        }
        productive
    }

    /// X-variables that derive the empty word.
    pub fn nullable_x(&self) -> BTreeSet<Var> {
        let mut nullable = BTreeSet::new();
        let mut changed = true;
        while changed {
            changed = false;
            for p in &self.finite {
                if nullable.contains(&p.lhs) {
                    continue;
                }
                if p.rhs.iter().all(|s| matches!(s, Symbol::Var(v) if nullable.contains(v))) {
                    nullable.insert(p.lhs);
                    changed = true;
                }
            }
        }
        nullable
    }

    /// Whether some useful X-variable derives itself in a context that
    /// derives ε (`A ⇒⁺ A`), which makes some word have infinitely many
    /// finite derivations.
    pub fn has_epsilon_pump(&self) -> bool {
        let trimmed = self.trim();
        let nullable = trimmed.nullable_x();
        let mut succ: BTreeMap<Var, BTreeSet<Var>> = BTreeMap::new();
        for p in &trimmed.finite {
            if p.rhs.iter().any(|s| matches!(s, Symbol::Terminal(_))) {
                continue;
            }
            for (t, s) in p.rhs.iter().enumerate() {
                let Symbol::Var(b) = s else { continue };
                let others_null = p
                    .rhs
                    .iter()
                    .enumerate()
                    .all(|(u, s)| u == t || matches!(s, Symbol::Var(v) if nullable.contains(v)));
                if others_null {
                    succ.entry(p.lhs).or_default().insert(*b);
                }
            }
        }
        // A cycle exists iff some variable reaches itself.
        succ.keys().any(|&a| {
            let mut seen = BTreeSet::new();
            let mut stack: Vec<Var> = succ[&a].iter().copied().collect();
            while let Some(v) = stack.pop() {
                if v == a {
                    return true;
                }
                if seen.insert(v) {
                    stack.extend(succ.get(&v).into_iter().flatten().copied());
                }
            }
            false
        })
    }

    /// The same grammar with every production weight set to one, so that
    /// weights count derivations.
    pub fn counting(&self) -> MixedGrammar<NatInf> {
        let conv = |ps: &[Production<S>]| {
            ps.iter().map(|p| Production { lhs: p.lhs, rhs: p.rhs.clone(), weight: NatInf::Fin(1) }).collect()
        };
        MixedGrammar {
            states: self.states,
            gamma: self.gamma.clone(),
            sigma: self.sigma.clone(),
            repeated: self.repeated,
            x_vars: self.x_vars.clone(),
            z_vars: self.z_vars.clone(),
            finite: conv(&self.finite),
            infinite: conv(&self.infinite),
        }
    }
}

fn reachable<S>(root: Var, prods: &[Production<S>]) -> BTreeSet<Var> {
    let mut by_lhs: BTreeMap<Var, Vec<&Production<S>>> = BTreeMap::new();
    for p in prods {
        by_lhs.entry(p.lhs).or_default().push(p);
    }
    let mut seen = BTreeSet::from([root]);
    let mut stack = vec![root];
    while let Some(v) = stack.pop() {
        for p in by_lhs.get(&v).into_iter().flatten() {
            for s in &p.rhs {
                if let Symbol::Var(w) = s {
                    if seen.insert(*w) {
                        stack.push(*w);
                    }
                }
            }
        }
    }
    seen
}

impl<S: StarOmega> fmt::Display for MixedGrammar<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

// ---------------------------------------------------------------------------
// Finite derivations
// ---------------------------------------------------------------------------

/// Words of length at most `max_len` derivable from `x₀` by a leftmost
/// derivation of at most `max_steps` steps, with the number of distinct
/// such derivations.
pub fn derive_finite<S: StarOmega>(g: &MixedGrammar<S>, max_len: usize, max_steps: usize) -> BTreeMap<Vec<char>, u64> {
    let mut by_lhs: HashMap<Var, Vec<&Production<S>>> = HashMap::new();
    for p in &g.finite {
        by_lhs.entry(p.lhs).or_default().push(p);
    }
    let mut out = BTreeMap::new();
    let mut prefix = Vec::new();
    derive_rec(&by_lhs, &mut prefix, vec![Symbol::Var(Var::StartX)], max_len, max_steps, &mut out);
    out
}

fn derive_rec<S>(
    by_lhs: &HashMap<Var, Vec<&Production<S>>>,
    prefix: &mut Vec<char>,
    mut rest: Vec<Symbol>,
    max_len: usize,
    budget: usize,
    out: &mut BTreeMap<Vec<char>, u64>,
) {
    let mark = prefix.len();
    // Move leading terminals into the prefix.
    let lead = rest.iter().take_while(|s| matches!(s, Symbol::Terminal(_))).count();
    for s in rest.drain(..lead) {
        if let Symbol::Terminal(c) = s {
            prefix.push(c);
        }
    }
    let pending_terminals = rest.iter().filter(|s| matches!(s, Symbol::Terminal(_))).count();
    if prefix.len() + pending_terminals <= max_len {
        match rest.first() {
            None => *out.entry(prefix.clone()).or_insert(0) += 1,
            Some(&Symbol::Var(v)) if budget > 0 => {
                for p in by_lhs.get(&v).into_iter().flatten() {
                    let mut next = p.rhs.clone();
                    next.extend_from_slice(&rest[1..]);
                    derive_rec(by_lhs, prefix, next, max_len, budget - 1, out);
                }
            }
            _ => {}
        }
    }
    prefix.truncate(mark);
}

/// Substring-indexed least-fixpoint chart over the X-variables.
///
/// The value of a variable on a word depends only on that word, so results
/// are cached by substring and shared across queries.
pub struct Chart<'g, S> {
    grammar: &'g MixedGrammar<S>,
    index: HashMap<Var, usize>,
    /// Per production: lhs index and rhs as terminals or variable indices.
    rules: Vec<(usize, Vec<Item>, S)>,
    /// Linear part shared by every nonempty substring: `(lhs, rhs var, coeff)`.
    linear: Vec<(usize, usize, S)>,
    memo: HashMap<Vec<char>, Vec<S>>,
}

#[derive(Clone, Copy, Debug)]
enum Item {
    T(char),
    V(usize),
}

impl<'g, S: StarOmega> Chart<'g, S> {
    pub fn new(grammar: &'g MixedGrammar<S>) -> Self {
        let mut index = HashMap::new();
        for v in &grammar.x_vars {
            let k = index.len();
            index.insert(*v, k);
        }
        for p in &grammar.finite {
            for v in std::iter::once(p.lhs).chain(p.rhs.iter().filter_map(|s| match s {
                Symbol::Var(v) => Some(*v),
                _ => None,
            })) {
                let k = index.len();
                index.entry(v).or_insert(k);
            }
        }
        let rules = grammar
            .finite
            .iter()
            .map(|p| {
                let rhs = p
                    .rhs
                    .iter()
                    .map(|s| match s {
                        Symbol::Terminal(c) => Item::T(*c),
                        Symbol::Var(v) => Item::V(index[v]),
                    })
                    .collect();
                (index[&p.lhs], rhs, p.weight)
            })
            .collect();
        let mut chart = Chart { grammar, index, rules, linear: Vec::new(), memo: HashMap::new() };
        let empty = chart.solve_empty();
        chart.linear = chart.linear_part(&empty);
        chart.memo.insert(Vec::new(), empty);
        chart
    }

    fn vars(&self) -> usize {
        self.index.len()
    }

    /// Weight of `w` from `x₀`.
    pub fn weight(&mut self, w: &[char]) -> Result<S> {
        self.value(Var::StartX, w)
    }

    /// Weight of `w` from any X-variable.
    pub fn value(&mut self, var: Var, w: &[char]) -> Result<S> {
        if let Some(&c) = w.iter().find(|c| !self.grammar.sigma.contains(c)) {
            return Err(Error::UnknownLetter(c));
        }
        let Some(&k) = self.index.get(&var) else {
            return Ok(S::zero());
        };
        Ok(self.solve(w)[k])
    }

    fn solve(&mut self, w: &[char]) -> &Vec<S> {
        if !self.memo.contains_key(w) {
            // Fill shorter substrings first.
            for len in 1..w.len() {
                for start in 0..=w.len() - len {
                    let sub = &w[start..start + len];
                    if !self.memo.contains_key(sub) {
                        let vals = self.solve_nonempty(sub);
                        self.memo.insert(sub.to_vec(), vals);
                    }
                }
            }
            let vals = self.solve_nonempty(w);
            self.memo.insert(w.to_vec(), vals);
        }
        &self.memo[w]
    }

    /// Stratum of the empty word: a polynomial system in which only
    /// all-variable right-hand sides contribute.
    fn solve_empty(&self) -> Vec<S> {
        let nullable_rules: Vec<_> =
            self.rules.iter().filter(|(_, rhs, _)| rhs.iter().all(|it| matches!(it, Item::V(_)))).collect();
        solve_stratum(self.vars(), |x| {
            let mut next = vec![S::zero(); x.len()];
            for (lhs, rhs, w) in &nullable_rules {
                let term = rhs.iter().fold(*w, |acc, it| match it {
                    Item::V(b) => acc * x[*b],
                    Item::T(_) => S::zero(),
                });
                next[*lhs] = next[*lhs] + term;
            }
            next
        })
    }

    /// For a nonempty word, the terms where one variable spans the whole
    /// word and the others derive ε: `coeff · x_B(w)`.
    fn linear_part(&self, empty: &[S]) -> Vec<(usize, usize, S)> {
        let mut acc: BTreeMap<(usize, usize), S> = BTreeMap::new();
        for (lhs, rhs, w) in &self.rules {
            if rhs.iter().any(|it| matches!(it, Item::T(_))) {
                continue;
            }
            for t in 0..rhs.len() {
                let Item::V(b) = rhs[t] else { unreachable!() };
                let coeff = rhs.iter().enumerate().filter(|&(u, _)| u != t).fold(*w, |acc, (_, it)| match it {
                    Item::V(c) => acc * empty[*c],
                    Item::T(_) => S::zero(),
                });
                if !coeff.is_zero() {
                    let slot = acc.entry((*lhs, b)).or_insert_with(S::zero);
                    *slot = *slot + coeff;
                }
            }
        }
        acc.into_iter().map(|((a, b), c)| (a, b, c)).collect()
    }

    /// Nonempty stratum: constants from proper splits plus the shared
    /// linear part.
    fn solve_nonempty(&self, w: &[char]) -> Vec<S> {
        let d = w.len();
        let mut constant = vec![S::zero(); self.vars()];
        for (lhs, rhs, weight) in &self.rules {
            // partial[pos] = weight of covering w[..pos] with the items so far.
            let mut partial = vec![S::zero(); d + 1];
            partial[0] = *weight;
            for it in rhs {
                let mut next = vec![S::zero(); d + 1];
                for pos in 0..=d {
                    let acc = partial[pos];
                    if acc.is_zero() {
                        continue;
                    }
                    match *it {
                        Item::T(c) => {
                            if pos < d && w[pos] == c {
                                next[pos + 1] = next[pos + 1] + acc;
                            }
                        }
                        Item::V(b) => {
                            for end in pos..=d {
                                if pos == 0 && end == d {
                                    continue;
                                }
                                let v = self.memo[&w[pos..end]][b];
                                if !v.is_zero() {
                                    next[end] = next[end] + acc * v;
                                }
                            }
                        }
                    }
                }
                partial = next;
            }
            constant[*lhs] = constant[*lhs] + partial[d];
        }
        solve_stratum(self.vars(), |x| {
            let mut next = constant.clone();
            for &(a, b, c) in &self.linear {
                next[a] = next[a] + c * x[b];
            }
            next
        })
    }
}

/// Least fixpoint of a monotone map by iteration from zero. After `v`
/// rounds every unknown with a finite least fixpoint has stabilized; those
/// still growing during rounds `v+1..=2v` are set to `1*` (∞ in ℕ^∞) and
/// the iteration continues until stable.
fn solve_stratum<S: StarOmega>(v: usize, f: impl Fn(&[S]) -> Vec<S>) -> Vec<S> {
    let mut x = vec![S::zero(); v];
    for _ in 0..v {
        x = f(&x);
    }
    let mut growing = vec![false; v];
    for _ in 0..v {
        let next = f(&x);
        for k in 0..v {
            if next[k] != x[k] {
                growing[k] = true;
            }
        }
        x = next;
    }
    if !growing.iter().any(|&g| g) {
        return x;
    }
    let top = S::one().star();
    let pin = |x: &mut Vec<S>| {
        for k in 0..v {
            if growing[k] {
                x[k] = top;
            }
        }
    };
    pin(&mut x);
    loop {
        let mut next = f(&x);
        pin(&mut next);
        if next == x {
            return x;
        }
        x = next;
    }
}

/// Weight of `w` from `x₀`; over ℕ^∞ with 0/1 coefficients this is the
/// number of distinct finite leftmost derivations.
pub fn word_weight<S: StarOmega>(g: &MixedGrammar<S>, w: &[char]) -> Result<S> {
    Chart::new(g).weight(w)
}

/// Number of distinct finite leftmost derivations of `w` (possibly ∞).
pub fn derivation_count<S: StarOmega>(g: &MixedGrammar<S>, w: &[char]) -> Result<NatInf> {
    word_weight(&g.counting(), w)
}

/// All words over Σ of length at most `max_len`, shortest first, then
/// lexicographically in the order letters appear in Σ.
pub fn words_up_to(sigma: &[char], max_len: usize) -> Vec<Vec<char>> {
    let mut sigma = sigma.to_vec();
    sigma.sort_unstable();
    let mut out = vec![Vec::new()];
    let mut layer = vec![Vec::new()];
    for _ in 0..max_len {
        layer = layer
            .iter()
            .flat_map(|w: &Vec<char>| {
                sigma.iter().map(move |&c| {
                    let mut w = w.clone();
                    w.push(c);
                    w
                })
            })
            .collect();
        out.extend(layer.iter().cloned());
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Witness {
    /// A finite word with this many derivations.
    Finite(Vec<char>, NatInf),
    /// A lasso word with two or more accepting computations that already
    /// differ after the given number of steps.
    Omega { u: Vec<char>, v: Vec<char>, steps: usize, prefixes: NatInf },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Ambiguous(Witness),
    UnambiguousUpTo { max_len: usize, lassos: usize },
}

/// Stack height and step bounds used for the ω part of
/// [`unambiguity_check`].
pub fn omega_ambiguity_bounds(u: &[char], v: &[char]) -> (usize, usize) {
    (u.len() + v.len() + 4, 2 * (u.len() + 2 * v.len()) + 8)
}

/// Searches for a word with two or more derivations: every finite word up
/// to `max_len` and every lasso word in `lasso_suite`.
pub fn unambiguity_check<S: StarOmega>(
    g: &MixedGrammar<S>,
    pda: &OmegaPda<S>,
    max_len: usize,
    lasso_suite: &[(Vec<char>, Vec<char>)],
) -> Result<Verdict> {
    let counting = g.counting();
    let mut chart = Chart::new(&counting);
    for w in words_up_to(&g.sigma, max_len) {
        let d = chart.weight(&w)?;
        if d > NatInf::Fin(1) {
            return Ok(Verdict::Ambiguous(Witness::Finite(w, d)));
        }
    }
    for (u, v) in lasso_suite {
        let (cap, steps) = omega_ambiguity_bounds(u, v);
        let counts = pda.live_prefix_counts(u, v, cap, steps)?;
        if let Some((s, &c)) = counts.iter().enumerate().find(|(_, &c)| c > NatInf::Fin(1)) {
            return Ok(Verdict::Ambiguous(Witness::Omega { u: u.clone(), v: v.clone(), steps: s, prefixes: c }));
        }
    }
    Ok(Verdict::UnambiguousUpTo { max_len, lassos: lasso_suite.len() })
}
