//! Acceptance suite: one line per criterion, nonzero exit on any failure.
//!
//! Run with `cargo test -p omega-pda --test acceptance`.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use omega_pda::gen::{self, Family};
use omega_pda::grammar::{triple_pair_construct, unambiguity_check, word_weight, words_up_to, Verdict, Witness};
use omega_pda::instances::{e1, e2, e3, e4};
use omega_pda::verify::{
    check_boolean_laws, check_counts, check_factorization_all, check_finite_language, check_lasso_invariance,
    check_lasso_soundness, check_nat_inf_laws, check_omega_equation, check_pump, check_stack_free, check_star_fixpoint,
    lasso_stack_cap, lasso_suite, run_counts_at, Check,
};
use omega_pda::{lasso_accepts, BoolPda, Letter, NatInf, OmegaPda};

const SEED: u64 = 2024;
const ONE: omega_pda::Boolean = omega_pda::Boolean(true);

struct Outcome {
    failures: Vec<String>,
    checks: usize,
}

impl Outcome {
    fn new() -> Self {
        Outcome { failures: Vec::new(), checks: 0 }
    }

    fn record(&mut self, what: &str, check: Check) {
        self.checks += 1;
        if let Err(e) = check {
            self.failures.push(format!("{what}: {e}"));
        }
    }

    fn require(&mut self, what: &str, ok: bool) {
        self.record(what, if ok { Ok(()) } else { Err("does not hold".into()) });
    }

    fn time_limit(&mut self, elapsed: Duration, limit: Duration) {
        self.require(&format!("runtime {elapsed:.2?} within {limit:?}"), elapsed <= limit);
    }
}

fn general(count: usize) -> Vec<BoolPda> {
    gen::instances(SEED, count, Family::General)
}

fn criterion_1() -> Outcome {
    let mut out = Outcome::new();
    let start = Instant::now();
    out.record("Boolean laws, exhaustive", check_boolean_laws());
    out.record("nat-inf laws, 1000 samples", check_nat_inf_laws(SEED, 1000));
    out.time_limit(start.elapsed(), Duration::from_secs(1));
    out
}

fn criterion_2() -> Outcome {
    let mut out = Outcome::new();
    let start = Instant::now();
    for (k, p) in general(100).iter().enumerate() {
        out.record(&format!("Boolean instance {k}"), check_factorization_all(p, 6));
    }
    out.time_limit(start.elapsed(), Duration::from_secs(60));
    for (k, p) in general(25).iter().enumerate() {
        out.record(&format!("counted instance {k}"), check_factorization_all(&p.to_nat_inf(), 6));
    }
    out
}

fn criterion_3() -> Outcome {
    let mut out = Outcome::new();
    for (k, p) in general(100).iter().enumerate() {
        out.record(&format!("instance {k}"), check_star_fixpoint(p));
    }
    out
}

fn criterion_4() -> Outcome {
    let mut out = Outcome::new();
    let builtin = [e1(), e2(), e3(), e4()];
    for (k, p) in builtin.iter().chain(&general(100)).enumerate() {
        out.record(&format!("instance {k}"), check_omega_equation(p));
        out.require(
            &format!("instance {k} without repeated states"),
            omega_pda::omega_pairs(&p.with_repeated(0)).is_empty(),
        );
    }
    out
}

fn criterion_5() -> Outcome {
    let mut out = Outcome::new();
    let start = Instant::now();
    for (k, p) in general(100).iter().enumerate() {
        out.record(&format!("instance {k}"), check_finite_language(p, 6));
    }
    out.time_limit(start.elapsed(), Duration::from_secs(120));
    out
}

/// One-state automaton over Γ = {p}, Σ = {a, b} with `p₀ = p` and the ε
/// initial letter.
fn one_state(repeated: usize) -> BoolPda {
    let mut p = OmegaPda::new(1, &["p"], &['a', 'b'], "p", repeated);
    p.set_initial(0, Letter::Eps, ONE);
    p
}

fn a() -> Letter {
    Letter::Sym('a')
}

fn b() -> Letter {
    Letter::Sym('b')
}

/// Curated automata with verdicts on the ten lasso words
/// a^ω, b^ω, (ab)^ω, ab^ω, ba^ω, (aab)^ω, ab·a^ω, ba·b^ω, (abb)^ω, aa·(ba)^ω.
///
/// For the push/pop automata, "height" below is one plus the number of
/// pushes minus the number of pops; a computation dies when it reaches 0.
fn curated() -> Vec<(&'static str, BoolPda, [u8; 10])> {
    let mut v = Vec::new();

    // a pushes, b pops: every prefix needs #a ≥ #b.
    v.push(("E2", e2(), [1, 0, 1, 0, 0, 1, 1, 0, 0, 1]));
    // No repeated state.
    v.push(("E1", e1(), [0; 10]));

    // b pushes, a pops: every prefix needs #b ≥ #a.
    let mut p = one_state(1);
    p.add_transition(0, "p", b(), 0, &["p", "p"], ONE).add_transition(0, "p", a(), 0, &[], ONE);
    v.push(("swapped E2", p, [0, 1, 0, 0, 0, 0, 0, 1, 0, 0]));

    // Both letters keep the stack: everything is accepted.
    let mut p = one_state(1);
    p.add_transition(0, "p", a(), 0, &["p"], ONE).add_transition(0, "p", b(), 0, &["p"], ONE);
    v.push(("universal", p, [1; 10]));

    // Only a is readable.
    let mut p = one_state(1);
    p.add_transition(0, "p", a(), 0, &["p"], ONE);
    v.push(("a only", p, [1, 0, 0, 0, 0, 0, 0, 0, 0, 0]));

    // State 1 after a, state 2 after b; with l = 1 this accepts words with
    // infinitely many a, i.e. a occurs in the period.
    let last_letter = |l: usize, good: Letter| {
        let bad = if good == a() { b() } else { a() };
        let mut p = OmegaPda::new(2, &["p"], &['a', 'b'], "p", l);
        p.set_initial(0, Letter::Eps, ONE);
        for i in 0..2 {
            p.add_transition(i, "p", good, 0, &["p"], ONE).add_transition(i, "p", bad, 1, &["p"], ONE);
        }
        p
    };
    v.push(("infinitely many a", last_letter(1, a()), [1, 0, 1, 0, 1, 1, 1, 0, 1, 1]));
    v.push(("infinitely many b", last_letter(1, b()), [0, 1, 1, 1, 0, 1, 0, 1, 1, 1]));
    v.push(("last letter, both repeated", last_letter(2, a()), [1; 10]));
    v.push(("last letter, none repeated", last_letter(0, a()), [0; 10]));

    // A silent loop changes nothing: acceptance needs the whole word read.
    v.push(("E2 with silent loop", e4().with_repeated(1), [1, 0, 1, 0, 0, 1, 1, 0, 0, 1]));

    // A silent push lets the stack grow before any pop: everything passes.
    let mut p = e2();
    p.add_transition(0, "p", Letter::Eps, 0, &["p", "p"], ONE);
    v.push(("E2 with silent push", p, [1; 10]));

    // Initial letter b, then the E2 condition on the rest.
    let mut p = e2();
    p.initial = vec![Default::default()];
    p.set_initial(0, b(), ONE);
    v.push(("E2 after b", p, [0, 0, 0, 0, 1, 0, 0, 0, 0, 0]));

    // Initial letter a, then the E2 condition on the rest.
    let mut p = e2();
    p.initial = vec![Default::default()];
    p.set_initial(0, a(), ONE);
    v.push(("E2 after a", p, [1, 0, 0, 0, 0, 1, 0, 0, 0, 1]));

    // Counter with bottom marker z: b at the bottom is a no-op, so every
    // word is readable.
    let counter = |marked: bool| {
        let l = usize::from(marked);
        let n = if marked { 2 } else { 1 };
        let mut p = OmegaPda::new(n, &["z", "p"], &['a', 'b'], "z", l);
        let rest = n - 1;
        p.set_initial(rest, Letter::Eps, ONE);
        for i in 0..n {
            p.add_transition(i, "z", a(), rest, &["p", "z"], ONE)
                .add_transition(i, "z", b(), 0, &["z"], ONE)
                .add_transition(i, "p", a(), rest, &["p", "p"], ONE)
                .add_transition(i, "p", b(), rest, &[], ONE);
        }
        if !marked {
            p.repeated = 1;
        }
        p
    };
    v.push(("counter", counter(false), [1; 10]));
    // Only b read at counter zero enters the repeated state.
    v.push(("b at counter zero infinitely often", counter(true), [0, 1, 0, 1, 0, 0, 0, 1, 1, 0]));

    // Guess the point after which only a follows.
    let mut p = OmegaPda::new(2, &["p"], &['a', 'b'], "p", 1);
    p.set_initial(1, Letter::Eps, ONE)
        .add_transition(1, "p", a(), 1, &["p"], ONE)
        .add_transition(1, "p", b(), 1, &["p"], ONE)
        .add_transition(1, "p", a(), 0, &["p"], ONE)
        .add_transition(0, "p", a(), 0, &["p"], ONE);
    v.push(("finitely many b", p, [1, 0, 0, 0, 1, 0, 1, 0, 0, 0]));

    // Two ways to read a (directly, or via q and a silent step back).
    let mut p = OmegaPda::new(1, &["p", "q"], &['a', 'b'], "p", 1);
    p.set_initial(0, Letter::Eps, ONE)
        .add_transition(0, "p", a(), 0, &["p"], ONE)
        .add_transition(0, "p", a(), 0, &["q"], ONE)
        .add_transition(0, "q", Letter::Eps, 0, &["p"], ONE);
    v.push(("ambiguous a only", p, [1, 0, 0, 0, 0, 0, 0, 0, 0, 0]));

    // E2 where only pops return to the repeated state: the E2 condition
    // plus infinitely many b.
    let pop_returns = |l: usize| {
        let mut p = OmegaPda::new(2, &["p"], &['a', 'b'], "p", l);
        p.set_initial(0, Letter::Eps, ONE);
        for i in 0..2 {
            p.add_transition(i, "p", a(), 1, &["p", "p"], ONE).add_transition(i, "p", b(), 0, &[], ONE);
        }
        p
    };
    v.push(("E2 and infinitely many b", pop_returns(1), [0, 0, 1, 0, 0, 1, 0, 0, 0, 1]));
    v.push(("E2 with two repeated states", pop_returns(2), [1, 0, 1, 0, 0, 1, 1, 0, 0, 1]));

    // b pops twice (second pop silent from state 2): every prefix needs
    // #a ≥ 2·#b.
    let mut p = OmegaPda::new(2, &["p"], &['a', 'b'], "p", 1);
    p.set_initial(0, Letter::Eps, ONE)
        .add_transition(0, "p", a(), 0, &["p", "p"], ONE)
        .add_transition(0, "p", b(), 1, &[], ONE)
        .add_transition(1, "p", Letter::Eps, 0, &[], ONE);
    v.push(("double pop", p, [1, 0, 0, 0, 0, 1, 0, 0, 0, 0]));

    // a pushes two: every prefix needs 2·#a ≥ #b.
    let mut p = one_state(1);
    p.add_transition(0, "p", a(), 0, &["p", "p", "p"], ONE).add_transition(0, "p", b(), 0, &[], ONE);
    v.push(("double push", p, [1, 0, 1, 0, 0, 1, 1, 0, 1, 1]));

    // A silent loop alone never reads the word.
    let mut p = one_state(1);
    p.add_transition(0, "p", Letter::Eps, 0, &["p"], ONE);
    v.push(("silent loop only", p, [0; 10]));

    // Silent pushes feed pops on a; b is unreadable.
    let mut p = one_state(1);
    p.add_transition(0, "p", Letter::Eps, 0, &["p", "p"], ONE).add_transition(0, "p", a(), 0, &[], ONE);
    v.push(("silent push, a pops", p, [1, 0, 0, 0, 0, 0, 0, 0, 0, 0]));

    v
}

fn criterion_6() -> Outcome {
    let mut out = Outcome::new();
    let words = lasso_suite();
    let variants = curated();
    out.require(&format!("{} curated automata besides E2", variants.len() - 1), variants.len() > 20);
    for (name, p, expected) in &variants {
        out.require(&format!("{name} is valid"), p.validate().is_empty());
        for (w, &want) in words.iter().zip(expected) {
            let got = lasso_accepts(p, w).map(u8::from);
            out.record(
                &format!("{name} on {w}"),
                if got == Ok(want) { Ok(()) } else { Err(format!("got {got:?}, expected {want}")) },
            );
            let found = p.enumerate_omega_run_prefixes(&w.u, &w.v, lasso_stack_cap(w), 1);
            out.record(
                &format!("{name} on {w}, explicit search"),
                if found == Ok(want == 1) { Ok(()) } else { Err(format!("search gives {found:?}, expected {want}")) },
            );
        }
    }
    for (k, p) in general(100).iter().enumerate() {
        out.record(&format!("instance {k} soundness"), check_lasso_soundness(p, &words));
        out.record(&format!("instance {k} invariance"), check_lasso_invariance(p, &words));
    }
    out
}

fn criterion_7() -> Outcome {
    let mut out = Outcome::new();
    let mut taken = 0;
    let mut index = 0;
    while taken < 50 {
        let p = gen::instance(SEED, index, Family::General).to_nat_inf();
        index += 1;
        let g = triple_pair_construct(&p).expect("generated instances are valid");
        if g.has_epsilon_pump() {
            continue;
        }
        taken += 1;
        out.record(&format!("instance {}", index - 1), check_counts(&p, 6));
    }

    let e4 = e4().to_nat_inf();
    let g = triple_pair_construct(&e4).unwrap();
    out.require("E4 has an epsilon pump", g.has_epsilon_pump());
    out.require("E4 weight of b is inf", word_weight(&g, &['b']) == Ok(NatInf::Inf));
    let counts = run_counts_at(&e4, &['b'], [8, 16, 24]);
    out.require(&format!("E4 run counts of b grow: {counts:?}"), counts[0] < counts[1] && counts[1] < counts[2]);
    out.record("E4 words up to 6", check_pump(&e4, 6));
    let mut infinite_words = 0;
    for k in 0..10 {
        let base = gen::instance(SEED, k, Family::General);
        let p = gen::with_epsilon_pump(&base, &mut gen::rng_for(SEED ^ 0xE4, k)).to_nat_inf();
        out.record(&format!("pumped instance {k}"), check_pump(&p, 5));
        let g = triple_pair_construct(&p).unwrap();
        infinite_words += words_up_to(&p.sigma, 5).iter().filter(|w| word_weight(&g, w) == Ok(NatInf::Inf)).count();
    }
    out.require(&format!("pumped instances have words of weight inf ({infinite_words})"), infinite_words > 0);
    out
}

fn criterion_8() -> Outcome {
    let mut out = Outcome::new();
    let lassos: Vec<(Vec<char>, Vec<char>)> = lasso_suite().into_iter().map(|w| (w.u, w.v)).collect();
    let check = |p: &BoolPda| {
        let g = triple_pair_construct(p).unwrap();
        unambiguity_check(&g, p, 8, &lassos)
    };
    let verdict = check(&e1());
    out.require(
        &format!("E1 unambiguous up to 8: {verdict:?}"),
        matches!(verdict, Ok(Verdict::UnambiguousUpTo { max_len: 8, .. })),
    );
    let witness = |v: &omega_pda::Result<Verdict>| match v {
        Ok(Verdict::Ambiguous(Witness::Finite(w, _))) => Some(w.iter().collect::<String>()),
        _ => None,
    };
    let v3 = check(&e3());
    out.require(&format!("E3 ambiguous on a: {v3:?}"), witness(&v3).as_deref() == Some("a"));
    let v4 = check(&e4());
    out.require(&format!("E4 ambiguous on b: {v4:?}"), witness(&v4).as_deref() == Some("b"));
    out
}

fn criterion_9() -> Outcome {
    let mut out = Outcome::new();
    let words = lasso_suite();
    for (k, p) in gen::instances(SEED, 50, Family::GammaPreserving).iter().enumerate() {
        out.record(&format!("instance {k}"), check_stack_free(p, &words));
    }
    out
}

fn main() -> ExitCode {
    type Criterion = (&'static str, fn() -> Outcome);
    let criteria: [Criterion; 9] = [
        ("semiring star and omega laws", criterion_1),
        ("star-block factorization", criterion_2),
        ("star triples are the least fixpoint", criterion_3),
        ("omega pairs solve the A_M equation", criterion_4),
        ("grammar and automaton accept the same finite words", criterion_5),
        ("lasso acceptance", criterion_6),
        ("derivation counts equal run counts", criterion_7),
        ("unambiguity check", criterion_8),
        ("stack-free lasso acceptance matches the finite automaton", criterion_9),
    ];
    let mut all_ok = true;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let ok = outcome.failures.is_empty();
        all_ok &= ok;
        println!(
            "criterion {}: {} - {name} ({} checks, {:.2?})",
            k + 1,
            if ok { "PASS" } else { "FAIL" },
            outcome.checks,
            start.elapsed()
        );
        for f in outcome.failures.iter().take(10) {
            println!("    {f}");
        }
    }
    if all_ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
