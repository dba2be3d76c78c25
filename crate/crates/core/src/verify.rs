//! Self-check suites: each check compares a library result with an
//! independent brute-force computation on one automaton.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::gen::{self, Family};
use crate::grammar::{triple_pair_construct, word_weight, words_up_to};
use crate::instances::{e1, e2, e3, e4};
use crate::lasso::{lasso_accepts, LassoWord};
use crate::matrix::{nfa_buchi_lasso_accept, SqMatrix};
use crate::pda::{Letter, OmegaPda, StackSym};
use crate::reachability::{
    a_m_edges, a_m_step, check_factorization, kleene_star_blocks, omega_pairs, saturation_round, star_triples,
};
use crate::semiring::{Boolean, NatInf, StarOmega};
use crate::spec_file::AnyPda;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Suite {
    SemiringLaws,
    Factorization,
    Fixpoints,
    TripleEquivalence,
    Lasso,
    Counting,
}

impl Suite {
    pub const ALL: [Suite; 6] = [
        Suite::SemiringLaws,
        Suite::Factorization,
        Suite::Fixpoints,
        Suite::TripleEquivalence,
        Suite::Lasso,
        Suite::Counting,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::SemiringLaws => "semiring-laws",
            Suite::Factorization => "factorization",
            Suite::Fixpoints => "fixpoints",
            Suite::TripleEquivalence => "triple-equivalence",
            Suite::Lasso => "lasso",
            Suite::Counting => "counting",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Suite::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown suite {s:?}; expected one of {}", Suite::ALL.map(Suite::name).join(", ")))
    }
}

/// Outcome of one check.
pub type Check = std::result::Result<(), String>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Failure {
    pub instance: String,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuiteReport {
    pub suite: Suite,
    pub passed: usize,
    pub failures: Vec<Failure>,
}

impl SuiteReport {
    fn new(suite: Suite) -> Self {
        SuiteReport { suite, passed: 0, failures: Vec::new() }
    }

    fn record(&mut self, instance: &str, check: Check) {
        match check {
            Ok(()) => self.passed += 1,
            Err(message) => self.failures.push(Failure { instance: instance.to_string(), message }),
        }
    }

    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}: {} passed, {} failed", self.suite, self.passed, self.failures.len())?;
        for fail in &self.failures {
            writeln!(f, "  FAIL {}: {}", fail.instance, fail.message)?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct Instance {
    pub name: String,
    pub pda: AnyPda,
}

impl Instance {
    pub fn boolean(&self) -> OmegaPda<Boolean> {
        match &self.pda {
            AnyPda::Boolean(p) => p.clone(),
            AnyPda::NatInf(p) => p.to_boolean(),
        }
    }

    pub fn counting(&self) -> OmegaPda<NatInf> {
        match &self.pda {
            AnyPda::Boolean(p) => p.to_nat_inf(),
            AnyPda::NatInf(p) => p.clone(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VerifyConfig {
    pub seed: u64,
    /// Random instances per suite.
    pub instances: usize,
    /// Word length bound for the finite-word checks.
    pub max_len: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig { seed: 0, instances: 25, max_len: 5 }
    }
}

pub fn builtin_instances() -> Vec<Instance> {
    [("E1", e1()), ("E2", e2()), ("E3", e3()), ("E4", e4())]
        .into_iter()
        .map(|(name, p)| Instance { name: name.to_string(), pda: AnyPda::Boolean(p) })
        .collect()
}

pub fn random_instances(seed: u64, count: usize, family: Family) -> Vec<Instance> {
    gen::instances(seed, count, family)
        .into_iter()
        .enumerate()
        .map(|(k, p)| Instance { name: format!("seed {seed} #{k}"), pda: AnyPda::Boolean(p) })
        .collect()
}

/// Runs one suite over the built-in automata, `extra` and the seeded
/// random instances.
pub fn run_suite(suite: Suite, config: &VerifyConfig, extra: &[Instance]) -> SuiteReport {
    let mut report = SuiteReport::new(suite);
    let mut pool = builtin_instances();
    pool.extend_from_slice(extra);
    pool.extend(random_instances(config.seed, config.instances, Family::General));
    match suite {
        Suite::SemiringLaws => {
            report.record("booleans", check_boolean_laws());
            report.record("nat-inf samples", check_nat_inf_laws(config.seed, 1000));
        }
        Suite::Factorization => {
            for inst in &pool {
                report.record(&inst.name, check_factorization_all(&inst.boolean(), config.max_len));
                report.record(&inst.name, check_factorization_all(&inst.counting(), config.max_len));
            }
        }
        Suite::Fixpoints => {
            for inst in &pool {
                report.record(&inst.name, check_star_fixpoint(&inst.boolean()));
                report.record(&inst.name, check_omega_equation(&inst.boolean()));
            }
        }
        Suite::TripleEquivalence => {
            for inst in &pool {
                report.record(&inst.name, check_finite_language(&inst.boolean(), config.max_len));
            }
        }
        Suite::Lasso => {
            let suite_words = lasso_suite();
            for inst in &pool {
                report.record(&inst.name, check_lasso_soundness(&inst.boolean(), &suite_words));
                report.record(&inst.name, check_lasso_invariance(&inst.boolean(), &suite_words));
            }
            for inst in random_instances(config.seed, config.instances, Family::GammaPreserving) {
                report.record(&inst.name, check_stack_free(&inst.boolean(), &suite_words));
            }
        }
        Suite::Counting => {
            for inst in &pool {
                let p = inst.counting();
                let g = match triple_pair_construct(&p) {
                    Ok(g) => g,
                    Err(e) => {
                        report.record(&inst.name, Err(e.to_string()));
                        continue;
                    }
                };
                if g.has_epsilon_pump() {
                    report.record(&inst.name, check_pump(&p, config.max_len));
                } else {
                    report.record(&inst.name, check_counts(&p, config.max_len));
                }
            }
        }
    }
    report
}

/// The ten lasso words used by the ω checks; their letter streams are
/// pairwise distinct.
pub fn lasso_suite() -> Vec<LassoWord> {
    [
        ("", "a"),
        ("", "b"),
        ("", "ab"),
        ("a", "b"),
        ("b", "a"),
        ("", "aab"),
        ("ab", "a"),
        ("ba", "b"),
        ("", "abb"),
        ("aa", "ba"),
    ]
    .into_iter()
    .map(|(u, v)| LassoWord::new(u, v).unwrap())
    .collect()
}

fn fail<T: fmt::Debug>(what: &str, got: T, want: T) -> Check {
    Err(format!("{what}: got {got:?}, expected {want:?}"))
}

pub fn check_boolean_laws() -> Check {
    let all = [Boolean(false), Boolean(true)];
    for a in all {
        if a.star() != Boolean(true) + a * a.star() {
            return fail("star law", a.star(), Boolean(true) + a * a.star());
        }
        if a.omega() != a * a.omega() {
            return fail("omega law", a.omega(), a * a.omega());
        }
        for b in all {
            for c in all {
                if a * (b + c) != a * b + a * c || (a + b) * c != a * c + b * c || (a * b) * c != a * (b * c) {
                    return Err(format!("distributivity or associativity fails at {a}, {b}, {c}"));
                }
            }
        }
    }
    Ok(())
}

fn sample_nat_inf<R: Rng>(rng: &mut R) -> NatInf {
    match rng.gen_range(0..10) {
        0 => NatInf::Inf,
        1..=5 => NatInf::Fin(rng.gen_range(0..4)),
        6..=8 => NatInf::Fin(rng.gen_range(0..1_000_000)),
        _ => NatInf::Fin(rng.gen()),
    }
}

pub fn check_nat_inf_laws(seed: u64, samples: usize) -> Check {
    let mut rng = gen::rng_for(seed, u64::MAX);
    let one = NatInf::Fin(1);
    for _ in 0..samples {
        let (a, b, c) = (sample_nat_inf(&mut rng), sample_nat_inf(&mut rng), sample_nat_inf(&mut rng));
        if a.star() != one + a * a.star() {
            return fail("star law", a.star(), one + a * a.star());
        }
        if a.omega() != a * a.omega() {
            return fail("omega law", a.omega(), a * a.omega());
        }
        if a * (b + c) != a * b + a * c || (a * b) * c != a * (b * c) || (a + b) + c != a + (b + c) {
            return Err(format!("semiring law fails at {a}, {b}, {c}"));
        }
    }
    Ok(())
}

/// Stack strings of length at most two over `0..gamma`.
pub fn short_stacks(gamma: usize) -> Vec<Vec<StackSym>> {
    let mut out = vec![vec![]];
    for a in 0..gamma {
        out.push(vec![a]);
    }
    for a in 0..gamma {
        for b in 0..gamma {
            out.push(vec![a, b]);
        }
    }
    out
}

/// Star-block factorization for every top symbol and every `π` with
/// `|π| ≤ 2`.
pub fn check_factorization_all<S: StarOmega>(pda: &OmegaPda<S>, max_len: usize) -> Check {
    for p in 0..pda.gamma.len() {
        for pi in short_stacks(pda.gamma.len()) {
            if !check_factorization(pda, p, &pi, max_len) {
                return Err(format!("factorization fails for {}{}", pda.symbol_name(p), pda.stack_string(&pi)));
            }
        }
    }
    Ok(())
}

/// Height bound for the emptying search of [`check_star_fixpoint`].
pub fn emptying_height_cap<S: StarOmega>(pda: &OmegaPda<S>) -> usize {
    2 * (pda.states * pda.states * pda.gamma.len() + 2)
}

/// The star triples are closed under one more saturation round, agree with
/// Kleene iteration on Boolean matrices, and agree with breadth-first
/// search over explicit configurations.
pub fn check_star_fixpoint(pda: &OmegaPda<Boolean>) -> Check {
    let t = star_triples(pda);
    if saturation_round(pda, &t) != t {
        return Err("an extra saturation round changes the triples".into());
    }
    let kleene = kleene_star_blocks(pda);
    let cap = emptying_height_cap(pda);
    for (p, star) in kleene.iter().enumerate() {
        for i in 0..pda.states {
            let targets = pda.emptying_targets(i, p, cap);
            for j in 0..pda.states {
                let r = t.reach(i, p, j);
                if r != targets.contains(&j) {
                    return fail(&format!("reach({},{},{})", i + 1, pda.symbol_name(p), j + 1), r, !r);
                }
                if r != star.get(i, j).0 {
                    return Err(format!("Kleene iteration disagrees at ({},{},{})", i + 1, pda.symbol_name(p), j + 1));
                }
            }
        }
    }
    Ok(())
}

/// Büchi pairs are a fixpoint of the A_M step, grow with the repeated
/// bound and vanish without repeated states.
pub fn check_omega_equation(pda: &OmegaPda<Boolean>) -> Check {
    let z = omega_pairs(pda);
    let edges = a_m_edges(pda, &star_triples(pda));
    let stepped = a_m_step(&edges, &z);
    if stepped != z {
        return fail("Z = A_M Z", stepped, z);
    }
    if pda.repeated == 0 && !z.is_empty() {
        return Err(format!("l = 0 but omega pairs are {z:?}"));
    }
    let mut prev = BTreeSet::new();
    for l in 0..=pda.states {
        let zl = omega_pairs(&pda.with_repeated(l));
        if !zl.is_superset(&prev) {
            return Err(format!("omega pairs shrink from l = {} to l = {l}", l.saturating_sub(1)));
        }
        prev = zl;
    }
    Ok(())
}

/// Step bound for brute-force acceptance of words up to `max_len`.
pub fn word_step_bound(max_len: usize) -> usize {
    4 * (max_len + 2)
}

/// `{w : |w| ≤ max_len, weight ≠ 0}` from the grammar equals the set of
/// words with a bounded accepting computation.
pub fn check_finite_language(pda: &OmegaPda<Boolean>, max_len: usize) -> Check {
    let g = triple_pair_construct(pda).map_err(|e| e.to_string())?;
    let oracle: BTreeSet<Vec<char>> = pda
        .accepted_words(max_len, word_step_bound(max_len))
        .into_iter()
        .filter(|(_, t)| t.weight.is_nonzero())
        .map(|(w, _)| w)
        .collect();
    let mut grammar = BTreeSet::new();
    for w in words_up_to(&pda.sigma, max_len) {
        if word_weight(&g, &w).map_err(|e| e.to_string())?.is_nonzero() {
            grammar.insert(w);
        }
    }
    if grammar != oracle {
        let show = |s: &BTreeSet<Vec<char>>| s.iter().map(|w| w.iter().collect::<String>()).collect::<Vec<_>>();
        let extra: BTreeSet<_> = grammar.difference(&oracle).cloned().collect();
        let missing: BTreeSet<_> = oracle.difference(&grammar).cloned().collect();
        return Err(format!("grammar-only words {:?}, oracle-only words {:?}", show(&extra), show(&missing)));
    }
    Ok(())
}

fn over_alphabet<S: StarOmega>(pda: &OmegaPda<S>, w: &LassoWord) -> bool {
    pda.check_word(&w.u).is_ok() && pda.check_word(&w.v).is_ok()
}

/// Stack cap for the explicit-state lasso search.
pub fn lasso_stack_cap(w: &LassoWord) -> usize {
    w.u.len() + w.v.len() + 4
}

/// Whenever the explicit-state search finds an accepting computation,
/// `lasso_accepts` agrees.
pub fn check_lasso_soundness(pda: &OmegaPda<Boolean>, suite: &[LassoWord]) -> Check {
    for w in suite.iter().filter(|w| over_alphabet(pda, w)) {
        let found = pda.enumerate_omega_run_prefixes(&w.u, &w.v, lasso_stack_cap(w), 1).map_err(|e| e.to_string())?;
        if found && !lasso_accepts(pda, w).map_err(|e| e.to_string())? {
            return Err(format!("{w}: an accepting computation exists but lasso_accepts says 0"));
        }
    }
    Ok(())
}

/// The verdict does not depend on the representation of the ω-word.
pub fn check_lasso_invariance(pda: &OmegaPda<Boolean>, suite: &[LassoWord]) -> Check {
    for w in suite.iter().filter(|w| over_alphabet(pda, w)) {
        let base = lasso_accepts(pda, w).map_err(|e| e.to_string())?;
        let uv = LassoWord::from_parts([w.u.clone(), w.v.clone()].concat(), w.v.clone()).unwrap();
        let vv = LassoWord::from_parts(w.u.clone(), [w.v.clone(), w.v.clone()].concat()).unwrap();
        for (label, other) in [("u·v, v", uv), ("u, v·v", vv), ("normal form", w.normalize())] {
            let got = lasso_accepts(pda, &other).map_err(|e| e.to_string())?;
            if got != base {
                return Err(format!("{w}: {label} representation gives {got}, expected {base}"));
            }
        }
    }
    Ok(())
}

/// The finite automaton underlying a Γ-preserving automaton: the blocks
/// `(p₀, p₀)` read as letter matrices.
pub fn underlying_nfa(pda: &OmegaPda<Boolean>) -> (BTreeMap<char, SqMatrix<Boolean>>, Vec<bool>, Vec<bool>) {
    let n = pda.states;
    let mut by_letter: BTreeMap<char, SqMatrix<Boolean>> = pda.sigma.iter().map(|&a| (a, SqMatrix::zeros(n))).collect();
    let p0 = pda.initial_stack;
    if let Some(block) = pda.transitions.block(p0, &[p0]) {
        for (i, j, poly) in block.nonzero() {
            for (letter, w) in poly.terms() {
                if let Letter::Sym(a) = letter {
                    let m = by_letter.get_mut(&a).unwrap();
                    m[(i, j)] = m[(i, j)] + w;
                }
            }
        }
    }
    let initial = pda.initial.iter().map(|poly| poly.coeff(Letter::Eps).0).collect();
    let repeated = (0..n).map(|i| pda.is_repeated(i)).collect();
    (by_letter, initial, repeated)
}

/// On a Γ-preserving automaton without ε-moves `lasso_accepts` equals the
/// finite-automaton Büchi check.
pub fn check_stack_free(pda: &OmegaPda<Boolean>, suite: &[LassoWord]) -> Check {
    let (by_letter, initial, repeated) = underlying_nfa(pda);
    for w in suite.iter().filter(|w| over_alphabet(pda, w)) {
        let want = nfa_buchi_lasso_accept(&by_letter, &initial, &repeated, &w.u, &w.v).map_err(|e| e.to_string())?;
        let got = lasso_accepts(pda, w).map_err(|e| e.to_string())?;
        if got != want {
            return fail(&w.to_string(), got, want);
        }
    }
    Ok(())
}

/// Weighted run counts over every word up to `max_len`, with the step bound
/// raised until two consecutive bounds agree. `None` when the counts keep
/// changing.
pub fn stable_run_weights(pda: &OmegaPda<NatInf>, max_len: usize) -> Option<BTreeMap<Vec<char>, NatInf>> {
    let collect = |steps: usize| -> BTreeMap<Vec<char>, NatInf> {
        pda.accepted_words(max_len, steps)
            .into_iter()
            .filter(|(_, t)| t.weight.is_nonzero())
            .map(|(w, t)| (w, t.weight))
            .collect()
    };
    let mut steps = word_step_bound(max_len);
    let mut last = collect(steps);
    for _ in 0..3 {
        steps += max_len + 4;
        let next = collect(steps);
        if next == last {
            return Some(next);
        }
        last = next;
    }
    None
}

/// Without ε-pumps, `word_weight` equals the summed weight of the
/// accepting computations for every word up to `max_len`.
pub fn check_counts(pda: &OmegaPda<NatInf>, max_len: usize) -> Check {
    let g = triple_pair_construct(pda).map_err(|e| e.to_string())?;
    let oracle = stable_run_weights(pda, max_len).ok_or("run counts do not stabilize")?;
    for w in words_up_to(&pda.sigma, max_len) {
        let got = word_weight(&g, &w).map_err(|e| e.to_string())?;
        let want = oracle.get(&w).copied().unwrap_or(NatInf::Fin(0));
        if got != want {
            return fail(&format!("weight of {:?}", w.iter().collect::<String>()), got, want);
        }
    }
    Ok(())
}

/// Run counts of `w` at three growing step bounds.
pub fn run_counts_at(pda: &OmegaPda<NatInf>, w: &[char], bounds: [usize; 3]) -> [NatInf; 3] {
    bounds.map(|b| pda.accepted_words(w.len(), b).get(w).map_or(NatInf::Fin(0), |t| t.runs))
}

/// With an ε-pump, every word of infinite weight has run counts that keep
/// growing with the step bound, and at least one such word exists among
/// the words the automaton accepts up to `max_len`.
pub fn check_pump(pda: &OmegaPda<NatInf>, max_len: usize) -> Check {
    let g = triple_pair_construct(pda).map_err(|e| e.to_string())?;
    let base = word_step_bound(max_len);
    let bounds = [base, 2 * base, 3 * base];
    for w in words_up_to(&pda.sigma, max_len) {
        let weight = word_weight(&g, &w).map_err(|e| e.to_string())?;
        if weight != NatInf::Inf {
            continue;
        }
        let counts = run_counts_at(pda, &w, bounds);
        if !(counts[0] < counts[1] && counts[1] < counts[2]) {
            return Err(format!(
                "weight of {:?} is inf but run counts at {bounds:?} steps are {counts:?}",
                w.iter().collect::<String>()
            ));
        }
    }
    Ok(())
}
