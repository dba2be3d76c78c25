//! Boolean saturation of the star blocks `(M*)_{p,ε}`, the `A_M` edge
//! relation, and the Büchi pair set realizing `(M^{ω,l})_p`.
//!
//! A triple `(i, p, j)` is present when some finite computation starts in
//! state `i` with `p` alone on the stack and ends in state `j` with the stack
//! empty. Each triple and edge carries two existential flags: some witness
//! visits a repeated state (endpoints included), and some witness consumes a
//! letter.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;

use crate::matrix::SqMatrix;
use crate::pda::{LetterPoly, OmegaPda, StackSym};
use crate::semiring::{Boolean, StarOmega};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Flags {
    pub via_repeated: bool,
    pub consumes: bool,
}

impl Flags {
    fn join(self, other: Flags) -> Flags {
        Flags { via_repeated: self.via_repeated || other.via_repeated, consumes: self.consumes || other.consumes }
    }

    fn covers(self, other: Flags) -> bool {
        self.join(other) == self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FlaggedTriple {
    pub from: usize,
    pub top: StackSym,
    pub to: usize,
    pub flags: Flags,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FlaggedEdge {
    pub from: (usize, StackSym),
    pub to: (usize, StackSym),
    pub flags: Flags,
}

/// The support of every star block, keyed by `(i, p, j)`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct StarTriples {
    map: BTreeMap<(usize, StackSym, usize), Flags>,
}

impl StarTriples {
    pub fn reach(&self, i: usize, p: StackSym, j: usize) -> bool {
        self.map.contains_key(&(i, p, j))
    }

    pub fn flags(&self, i: usize, p: StackSym, j: usize) -> Option<Flags> {
        self.map.get(&(i, p, j)).copied()
    }

    pub fn via_repeated(&self, i: usize, p: StackSym, j: usize) -> bool {
        self.flags(i, p, j).is_some_and(|f| f.via_repeated)
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = FlaggedTriple> + '_ {
        self.map.iter().map(|(&(from, top, to), &flags)| FlaggedTriple { from, top, to, flags })
    }

    /// Same set with one triple removed.
    pub fn without(&self, i: usize, p: StackSym, j: usize) -> StarTriples {
        let mut map = self.map.clone();
        map.remove(&(i, p, j));
        StarTriples { map }
    }

    /// Joins `flags` into `(i, p, j)`; returns whether anything changed.
    fn merge(&mut self, key: (usize, StackSym, usize), flags: Flags) -> bool {
        match self.map.get_mut(&key) {
            Some(old) if old.covers(flags) => false,
            Some(old) => {
                *old = old.join(flags);
                true
            }
            None => {
                self.map.insert(key, flags);
                true
            }
        }
    }

    /// End states and flags of computations that start in `start` with
    /// `symbols` on the stack and pop all of them, given that the first
    /// step carried `init`.
    fn compose(&self, start: usize, init: Flags, symbols: &[StackSym], repeated: usize) -> BTreeMap<usize, Flags> {
        let mut frontier = BTreeMap::from([(start, init)]);
        for &q in symbols {
            let mut next: BTreeMap<usize, Flags> = BTreeMap::new();
            for (&m, &f) in &frontier {
                for (&(_, _, j), &g) in self.map.range((m, q, 0)..=(m, q, usize::MAX)) {
                    let h = f.join(g).join(Flags { via_repeated: j < repeated, consumes: false });
                    let slot = next.entry(j).or_default();
                    *slot = slot.join(h);
                }
            }
            frontier = next;
            if frontier.is_empty() {
                break;
            }
        }
        frontier
    }
}

fn entry_flags<S: StarOmega>(poly: &LetterPoly<S>, i: usize, m: usize, repeated: usize) -> Flags {
    Flags { via_repeated: i < repeated || m < repeated, consumes: poly.terms().any(|(l, _)| !l.is_eps()) }
}

/// Least solution of `x_p = Σ_π M_{p,π} x_{p₁}⋯x_{p_k}` over 𝔹, with flags.
///
/// Worklist saturation: every block is evaluated once against the triples
/// known so far, and re-evaluated whenever a triple for one of the symbols
/// it pushes changes.
pub fn star_triples<S: StarOmega>(pda: &OmegaPda<S>) -> StarTriples {
    let l = pda.repeated;
    let blocks: Vec<_> = pda.transitions.blocks().collect();
    let mut users: BTreeMap<StackSym, Vec<usize>> = BTreeMap::new();
    for (b, (_, pi, _)) in blocks.iter().enumerate() {
        let mut syms: Vec<_> = pi.to_vec();
        syms.sort_unstable();
        syms.dedup();
        for q in syms {
            users.entry(q).or_default().push(b);
        }
    }

    let mut triples = StarTriples::default();
    // Pop blocks first so the first pass over push blocks already sees them.
    let mut order: Vec<usize> = (0..blocks.len()).collect();
    order.sort_by_key(|&b| !blocks[b].1.is_empty());
    let mut queued = vec![true; blocks.len()];
    let mut queue: VecDeque<usize> = order.into_iter().collect();

    while let Some(b) = queue.pop_front() {
        queued[b] = false;
        let (p, pi, block) = blocks[b];
        let mut changed_syms = false;
        for (i, m1, poly) in block.nonzero() {
            let init = entry_flags(poly, i, m1, l);
            for (j, f) in triples.compose(m1, init, pi, l) {
                changed_syms |= triples.merge((i, p, j), f);
            }
        }
        if changed_syms {
            for &user in users.get(&p).into_iter().flatten() {
                if !queued[user] {
                    queued[user] = true;
                    queue.push_back(user);
                }
            }
        }
    }
    triples
}

/// One Jacobi round of the saturation applied to `known`: every triple
/// derivable by one block from `known`, joined with `known` itself.
pub fn saturation_round<S: StarOmega>(pda: &OmegaPda<S>, known: &StarTriples) -> StarTriples {
    let mut next = known.clone();
    for (p, pi, block) in pda.transitions.blocks() {
        for (i, m1, poly) in block.nonzero() {
            let init = entry_flags(poly, i, m1, pda.repeated);
            for (j, f) in known.compose(m1, init, pi, pda.repeated) {
                next.merge((i, p, j), f);
            }
        }
    }
    next
}

/// The triples derivable in one round from `known`, without adding `known`.
pub fn derivable_in_one_round<S: StarOmega>(
    pda: &OmegaPda<S>,
    known: &StarTriples,
) -> BTreeSet<(usize, StackSym, usize)> {
    let mut out = BTreeSet::new();
    for (p, pi, block) in pda.transitions.blocks() {
        for (i, m1, poly) in block.nonzero() {
            let init = entry_flags(poly, i, m1, pda.repeated);
            for j in known.compose(m1, init, pi, pda.repeated).into_keys() {
                out.insert((i, p, j));
            }
        }
    }
    out
}

/// `(M*)_{p,ε}` over 𝔹 by Kleene iteration of the matrix system, one
/// Boolean `n × n` matrix per stack symbol.
pub fn kleene_star_blocks<S: StarOmega>(pda: &OmegaPda<S>) -> Vec<SqMatrix<Boolean>> {
    let n = pda.states;
    let supports: Vec<_> = pda
        .transitions
        .blocks()
        .map(|(p, pi, block)| {
            let mut m = SqMatrix::zeros(n);
            for (i, j, _) in block.nonzero() {
                m[(i, j)] = Boolean(true);
            }
            (p, pi.to_vec(), m)
        })
        .collect();
    let mut x = vec![SqMatrix::<Boolean>::zeros(n); pda.gamma.len()];
    loop {
        let mut next = vec![SqMatrix::<Boolean>::zeros(n); pda.gamma.len()];
        for (p, pi, m) in &supports {
            let mut term = m.clone();
            for &q in pi {
                term = term.mul(&x[q]).expect("square blocks");
            }
            next[*p] = next[*p].add(&term).expect("square blocks");
        }
        if next == x {
            return x;
        }
        x = next;
    }
}

/// `(state, stack symbol)`.
type Node = (usize, StackSym);

/// The `A_M` relation: one block step followed by star segments that pop
/// the symbols pushed above the `j`-th one.
pub fn a_m_edges<S: StarOmega>(pda: &OmegaPda<S>, triples: &StarTriples) -> Vec<FlaggedEdge> {
    let l = pda.repeated;
    let mut edges: BTreeMap<(Node, Node), Flags> = BTreeMap::new();
    for (p, pi, block) in pda.transitions.blocks() {
        for (i, m1, poly) in block.nonzero() {
            let init = entry_flags(poly, i, m1, l);
            for (jx, &pj) in pi.iter().enumerate() {
                for (m, f) in triples.compose(m1, init, &pi[..jx], l) {
                    let slot = edges.entry(((i, p), (m, pj))).or_default();
                    *slot = slot.join(f);
                }
            }
        }
    }
    edges.into_iter().map(|((from, to), flags)| FlaggedEdge { from, to, flags }).collect()
}

/// Nodes of the edge graph from which a cycle is reachable that contains an
/// edge with `via_repeated`, and, when `require_letter` is set, an edge that
/// consumes a letter.
pub fn buchi_nodes(edges: &[FlaggedEdge], require_letter: bool) -> BTreeSet<(usize, StackSym)> {
    let mut graph = DiGraph::<(usize, StackSym), Flags>::new();
    let mut index = BTreeMap::new();
    for e in edges {
        for v in [e.from, e.to] {
            index.entry(v).or_insert_with(|| graph.add_node(v));
        }
    }
    for e in edges {
        graph.add_edge(index[&e.from], index[&e.to], e.flags);
    }

    let mut good = vec![false; graph.node_count()];
    for scc in tarjan_scc(&graph) {
        let members: BTreeSet<_> = scc.iter().copied().collect();
        let internal: Vec<Flags> = graph
            .raw_edges()
            .iter()
            .filter(|e| members.contains(&e.source()) && members.contains(&e.target()))
            .map(|e| e.weight)
            .collect();
        let repeats = internal.iter().any(|f| f.via_repeated);
        let letters = !require_letter || internal.iter().any(|f| f.consumes);
        if repeats && letters {
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

/// `(i, p)` such that `((M^{ω,l})_p)_i ≠ 0` over 𝔹.
pub fn omega_pairs<S: StarOmega>(pda: &OmegaPda<S>) -> BTreeSet<(usize, StackSym)> {
    let triples = star_triples(pda);
    buchi_nodes(&a_m_edges(pda, &triples), false)
}

/// Like [`omega_pairs`], restricted to infinite computations that consume
/// infinitely many letters, i.e. that read an ω-word.
pub fn omega_pairs_reading<S: StarOmega>(pda: &OmegaPda<S>) -> BTreeSet<(usize, StackSym)> {
    let triples = star_triples(pda);
    buchi_nodes(&a_m_edges(pda, &triples), true)
}

/// `{x : ∃ edge x → y with y ∈ z}`, the Boolean reading of `z ↦ A_M z`.
pub fn a_m_step(edges: &[FlaggedEdge], z: &BTreeSet<(usize, StackSym)>) -> BTreeSet<(usize, StackSym)> {
    edges.iter().filter(|e| z.contains(&e.to)).map(|e| e.from).collect()
}

/// Number of steps used by [`check_factorization`] for a given word bound.
pub fn factorization_step_bound(max_len: usize, pushed: usize) -> usize {
    2 * (max_len + pushed + 2)
}

/// Checks `(M*)_{pπ,ε} = (M*)_{p,ε} (M*)_{π,ε}` on all words of length at
/// most `max_len`, using bounded run enumeration on both sides.
pub fn check_factorization<S: StarOmega>(pda: &OmegaPda<S>, p: StackSym, pi: &[StackSym], max_len: usize) -> bool {
    check_factorization_bounded(pda, p, pi, max_len, factorization_step_bound(max_len, pi.len()))
}

/// [`check_factorization`] with an explicit step bound. Coefficients are
/// compared per `(word, step count)`, which makes the truncated identity
/// exact.
pub fn check_factorization_bounded<S: StarOmega>(
    pda: &OmegaPda<S>,
    p: StackSym,
    pi: &[StackSym],
    max_len: usize,
    max_steps: usize,
) -> bool {
    let mut stack = vec![p];
    stack.extend_from_slice(pi);
    for i in 0..pda.states {
        let whole = pda.emptying_profile(i, &stack, max_len, max_steps);
        let head = pda.emptying_profile(i, &[p], max_len, max_steps);
        let mut convolved: BTreeMap<_, (crate::semiring::NatInf, S)> = BTreeMap::new();
        for ((m, w1, s1), t1) in &head {
            let tail = pda.emptying_profile(*m, pi, max_len - w1.len(), max_steps - s1);
            for ((j, w2, s2), t2) in tail {
                let mut w = w1.clone();
                w.extend(w2);
                let slot = convolved.entry((j, w, s1 + s2)).or_insert((crate::semiring::NatInf::Fin(0), S::zero()));
                slot.0 = slot.0 + t1.runs * t2.runs;
                slot.1 = slot.1 + t1.weight * t2.weight;
            }
        }
        let whole: BTreeMap<_, _> = whole.into_iter().map(|(k, t)| (k, (t.runs, t.weight))).collect();
        if whole != convolved {
            return false;
        }
    }
    true
}
