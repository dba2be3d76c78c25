//! Line-based automaton description files.
//!
//! ```text
//! # E1: x = a x x + b
//! semiring boolean
//! states 1
//! repeated 0
//! gamma p
//! sigma a b
//! initial-stack p
//! I 1 eps
//! P 1 eps
//! trans 1 p a 1 p p
//! trans 1 p b 1 eps
//! ```
//!
//! Lines may appear in any order. States are numbered from 1. The
//! replacement string of a `trans` line lists the new stack top first. A
//! trailing weight may follow `I`, `P` and `trans` lines and defaults to 1.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::pda::{Letter, OmegaPda, StackSym};
use crate::semiring::{Boolean, NatInf, SemiringKind, StarOmega};

/// An automaton over whichever semiring its file selected.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AnyPda {
    Boolean(OmegaPda<Boolean>),
    NatInf(OmegaPda<NatInf>),
}

impl AnyPda {
    pub fn kind(&self) -> SemiringKind {
        match self {
            AnyPda::Boolean(_) => SemiringKind::Boolean,
            AnyPda::NatInf(_) => SemiringKind::NatInf,
        }
    }
}

fn err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

struct Header {
    semiring: Option<(usize, SemiringKind)>,
    states: Option<(usize, usize)>,
    repeated: Option<(usize, usize)>,
    gamma: Option<(usize, Vec<String>)>,
    sigma: Option<(usize, Vec<char>)>,
    initial_stack: Option<(usize, String)>,
}

fn set_once<T: PartialEq>(slot: &mut Option<(usize, T)>, line: usize, value: T, what: &str) -> Result<()> {
    match slot {
        Some((_, old)) if *old != value => Err(err(line, format!("conflicting {what} declarations"))),
        Some(_) => Ok(()),
        None => {
            *slot = Some((line, value));
            Ok(())
        }
    }
}

fn parse_count(line: usize, tok: Option<&str>, what: &str) -> Result<usize> {
    let tok = tok.ok_or_else(|| err(line, format!("missing {what}")))?;
    tok.parse().map_err(|_| err(line, format!("bad {what}: {tok}")))
}

/// Parses a description file into an automaton over the semiring it names.
pub fn parse_spec(text: &str) -> Result<AnyPda> {
    let lines: Vec<(usize, Vec<&str>)> = text
        .lines()
        .enumerate()
        .map(|(k, l)| (k + 1, l.split('#').next().unwrap_or("").split_whitespace().collect::<Vec<_>>()))
        .filter(|(_, toks)| !toks.is_empty())
        .collect();

    let mut h = Header { semiring: None, states: None, repeated: None, gamma: None, sigma: None, initial_stack: None };
    for (line, toks) in &lines {
        let line = *line;
        match toks[0] {
            "semiring" => {
                let name = toks.get(1).ok_or_else(|| err(line, "missing semiring name"))?;
                let kind = name.parse::<SemiringKind>().map_err(|e| err(line, e))?;
                set_once(&mut h.semiring, line, kind, "semiring")?;
            }
            "states" => {
                let n = parse_count(line, toks.get(1).copied(), "state count")?;
                if n == 0 {
                    return Err(err(line, "state count must be at least 1"));
                }
                set_once(&mut h.states, line, n, "states")?;
            }
            "repeated" => {
                let l = parse_count(line, toks.get(1).copied(), "repeated bound")?;
                set_once(&mut h.repeated, line, l, "repeated")?;
            }
            "gamma" => {
                let syms: Vec<String> = toks[1..].iter().map(|s| s.to_string()).collect();
                for (k, s) in syms.iter().enumerate() {
                    if s == "eps" || NatInf::parse_weight(s).is_some() {
                        return Err(err(line, format!("reserved stack symbol name: {s}")));
                    }
                    if syms[..k].contains(s) {
                        return Err(err(line, format!("duplicate stack symbol: {s}")));
                    }
                }
                set_once(&mut h.gamma, line, syms, "gamma")?;
            }
            "sigma" => {
                let mut letters = Vec::new();
                for s in &toks[1..] {
                    let mut chars = s.chars();
                    match (chars.next(), chars.next()) {
                        (Some(c), None) if !letters.contains(&c) => letters.push(c),
                        (Some(c), None) => return Err(err(line, format!("duplicate letter: {c}"))),
                        _ => return Err(err(line, format!("letters must be single characters: {s}"))),
                    }
                }
                set_once(&mut h.sigma, line, letters, "sigma")?;
            }
            "initial-stack" => {
                let s = toks.get(1).ok_or_else(|| err(line, "missing initial stack symbol"))?;
                set_once(&mut h.initial_stack, line, s.to_string(), "initial-stack")?;
            }
            "I" | "P" | "trans" => {}
            other => return Err(err(line, format!("unknown directive: {other}"))),
        }
    }

    let (_, n) = h.states.ok_or(Error::Parse { line: 0, message: "missing section: states".into() })?;
    let (_, kind) = h.semiring.ok_or(Error::Parse { line: 0, message: "missing section: semiring".into() })?;
    let gamma = h.gamma.ok_or(Error::Parse { line: 0, message: "missing section: gamma".into() })?.1;
    let sigma = h.sigma.ok_or(Error::Parse { line: 0, message: "missing section: sigma".into() })?.1;
    let (stack_line, p0) =
        h.initial_stack.ok_or(Error::Parse { line: 0, message: "missing section: initial-stack".into() })?;
    let (rep_line, l) = h.repeated.unwrap_or((0, 0));
    if l > n {
        return Err(err(rep_line, "repeated bound out of range"));
    }
    if !gamma.contains(&p0) {
        return Err(err(stack_line, format!("unknown stack symbol: {p0}")));
    }

    let body = Body { n, gamma: &gamma, sigma: &sigma, p0: &p0, l, lines: &lines };
    Ok(match kind {
        SemiringKind::Boolean => AnyPda::Boolean(body.build()?),
        SemiringKind::NatInf => AnyPda::NatInf(body.build()?),
    })
}

struct Body<'a> {
    n: usize,
    gamma: &'a [String],
    sigma: &'a [char],
    p0: &'a str,
    l: usize,
    lines: &'a [(usize, Vec<&'a str>)],
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord)]
enum EntryKey {
    Initial(usize, Letter),
    Final(usize, Letter),
    Trans(usize, StackSym, Letter, usize, Vec<StackSym>),
}

impl Body<'_> {
    fn state(&self, line: usize, tok: Option<&&str>) -> Result<usize> {
        let tok = tok.ok_or_else(|| err(line, "missing state"))?;
        let k: usize = tok.parse().map_err(|_| err(line, format!("bad state: {tok}")))?;
        if k == 0 || k > self.n {
            return Err(err(line, format!("state index out of range: {k}")));
        }
        Ok(k - 1)
    }

    fn letter(&self, line: usize, tok: Option<&&str>) -> Result<Letter> {
        let tok = *tok.ok_or_else(|| err(line, "missing letter"))?;
        if tok == "eps" {
            return Ok(Letter::Eps);
        }
        let mut chars = tok.chars();
        match (chars.next(), chars.next()) {
            (Some(c), None) if self.sigma.contains(&c) => Ok(Letter::Sym(c)),
            _ => Err(err(line, format!("unknown letter: {tok}"))),
        }
    }

    fn symbol(&self, line: usize, tok: &str) -> Result<StackSym> {
        self.gamma.iter().position(|g| g == tok).ok_or_else(|| err(line, format!("unknown stack symbol: {tok}")))
    }

    fn weight<S: StarOmega>(&self, line: usize, tok: Option<&&str>) -> Result<S> {
        match tok {
            None => Ok(S::one()),
            Some(t) => S::parse_weight(t).ok_or_else(|| err(line, format!("bad weight literal: {t}"))),
        }
    }

    fn build<S: StarOmega>(&self) -> Result<OmegaPda<S>> {
        let gamma: Vec<&str> = self.gamma.iter().map(String::as_str).collect();
        let mut pda = OmegaPda::new(self.n, &gamma, self.sigma, self.p0, self.l);
        let mut entries: BTreeMap<EntryKey, (usize, S)> = BTreeMap::new();
        for (line, toks) in self.lines {
            let line = *line;
            let (key, weight) = match toks[0] {
                "I" | "P" => {
                    if toks.len() > 4 {
                        return Err(err(line, "too many fields"));
                    }
                    let i = self.state(line, toks.get(1))?;
                    let a = self.letter(line, toks.get(2))?;
                    let w = self.weight::<S>(line, toks.get(3))?;
                    let key = if toks[0] == "I" { EntryKey::Initial(i, a) } else { EntryKey::Final(i, a) };
                    (key, w)
                }
                "trans" => {
                    let i = self.state(line, toks.get(1))?;
                    let p = self.symbol(line, toks.get(2).ok_or_else(|| err(line, "missing stack symbol"))?)?;
                    let a = self.letter(line, toks.get(3))?;
                    let j = self.state(line, toks.get(4))?;
                    let mut repl = &toks[5.min(toks.len())..];
                    if repl.is_empty() {
                        return Err(err(line, "missing replacement string"));
                    }
                    let mut weight_tok = None;
                    if repl.len() >= 2
                        && !self.gamma.iter().any(|g| g == repl[repl.len() - 1])
                        && repl[repl.len() - 1] != "eps"
                    {
                        weight_tok = repl.last();
                        repl = &repl[..repl.len() - 1];
                    }
                    let push = if repl == ["eps"] {
                        Vec::new()
                    } else {
                        repl.iter().map(|t| self.symbol(line, t)).collect::<Result<Vec<_>>>()?
                    };
                    let w = self.weight::<S>(line, weight_tok)?;
                    (EntryKey::Trans(i, p, a, j, push), w)
                }
                _ => continue,
            };
            match entries.get(&key) {
                Some((first, old)) if *old != weight => {
                    return Err(err(line, format!("contradicts the entry on line {first}")));
                }
                Some(_) => {}
                None => {
                    entries.insert(key, (line, weight));
                }
            }
        }
        for (key, (_, w)) in entries {
            if w.is_zero() {
                continue;
            }
            match key {
                EntryKey::Initial(i, a) => {
                    pda.set_initial(i, a, w);
                }
                EntryKey::Final(i, a) => {
                    pda.set_final(i, a, w);
                }
                EntryKey::Trans(i, p, a, j, push) => pda.transitions.add(p, push, i, a, j, w),
            }
        }
        pda.ensure_valid()?;
        Ok(pda)
    }
}

/// Writes an automaton in the description format; [`parse_spec`] reads it
/// back to an equal automaton.
pub fn to_spec_text<S: StarOmega>(pda: &OmegaPda<S>) -> String {
    let mut out = String::new();
    let weight = |w: S| if w == S::one() { String::new() } else { format!(" {w}") };
    writeln!(out, "semiring {}", S::NAME).unwrap();
    writeln!(out, "states {}", pda.states).unwrap();
    writeln!(out, "repeated {}", pda.repeated).unwrap();
    writeln!(out, "gamma {}", pda.gamma.join(" ")).unwrap();
    let sigma: Vec<String> = pda.sigma.iter().map(|c| c.to_string()).collect();
    writeln!(out, "sigma {}", sigma.join(" ")).unwrap();
    writeln!(out, "initial-stack {}", pda.symbol_name(pda.initial_stack)).unwrap();
    for (tag, vector) in [("I", &pda.initial), ("P", &pda.final_weights)] {
        for (i, poly) in vector.iter().enumerate() {
            for (a, w) in poly.terms() {
                writeln!(out, "{tag} {} {a}{}", i + 1, weight(w)).unwrap();
            }
        }
    }
    for (p, pi, block) in pda.transitions.blocks() {
        for (i, j, poly) in block.nonzero() {
            for (a, w) in poly.terms() {
                writeln!(
                    out,
                    "trans {} {} {a} {} {}{}",
                    i + 1,
                    pda.symbol_name(p),
                    j + 1,
                    pda.stack_string(pi),
                    weight(w)
                )
                .unwrap();
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{e1, e3, e4};

    const E1_TEXT: &str = "\
# E1
semiring boolean
states 1
gamma p
sigma a b
initial-stack p
I 1 eps
P 1 eps
trans 1 p a 1 p p
trans 1 p b 1 eps
";

    #[test]
    fn parses_e1() {
        assert_eq!(parse_spec(E1_TEXT).unwrap(), AnyPda::Boolean(e1()));
    }

    #[test]
    fn order_does_not_matter() {
        let mut lines: Vec<&str> = E1_TEXT.lines().collect();
        lines.reverse();
        assert_eq!(parse_spec(&lines.join("\n")).unwrap(), AnyPda::Boolean(e1()));
    }

    #[test]
    fn round_trips() {
        for p in [e1(), e3(), e4(), e1().with_repeated(1)] {
            assert_eq!(parse_spec(&to_spec_text(&p)).unwrap(), AnyPda::Boolean(p.clone()));
            let q = p.to_nat_inf();
            assert_eq!(parse_spec(&to_spec_text(&q)).unwrap(), AnyPda::NatInf(q));
        }
    }

    proptest::proptest! {
        #[test]
        fn random_instances_round_trip(seed in 0u64..1_000_000, k in 0u64..4) {
            let p = crate::gen::instance(seed, k, crate::gen::Family::General);
            proptest::prop_assert_eq!(parse_spec(&to_spec_text(&p)).unwrap(), AnyPda::Boolean(p.clone()));
            let q = p.to_nat_inf();
            proptest::prop_assert_eq!(parse_spec(&to_spec_text(&q)).unwrap(), AnyPda::NatInf(q));
        }
    }

    #[test]
    fn weights_and_nat_inf() {
        let text = E1_TEXT.replace("boolean", "nat-inf").replace("trans 1 p b 1 eps", "trans 1 p b 1 eps 3");
        let AnyPda::NatInf(p) = parse_spec(&text).unwrap() else { panic!() };
        assert_eq!(p.transitions.block(0, &[]).unwrap().entry(0, 0).coeff(Letter::Sym('b')), NatInf::Fin(3));
        let back = to_spec_text(&p);
        assert!(back.contains("trans 1 p b 1 eps 3\n"), "{back}");
    }

    #[test]
    fn errors() {
        assert_eq!(parse_spec("").unwrap_err(), Error::Parse { line: 0, message: "missing section: states".into() });
        let text = format!("{E1_TEXT}repeated 3\n").replace("states 1", "states 2");
        assert_eq!(
            parse_spec(&text).unwrap_err(),
            Error::Parse { line: 11, message: "repeated bound out of range".into() }
        );
        let bad_symbol = E1_TEXT.replace("trans 1 p a 1 p p", "trans 1 p a 1 p r");
        assert!(matches!(parse_spec(&bad_symbol), Err(Error::Parse { line: 9, .. })));
        let bad_state = E1_TEXT.replace("I 1 eps", "I 2 eps");
        assert!(matches!(parse_spec(&bad_state), Err(Error::Parse { line: 7, .. })));
        let bad_weight = E1_TEXT.replace("I 1 eps", "I 1 eps 2");
        assert!(matches!(parse_spec(&bad_weight), Err(Error::Parse { line: 7, .. })));
        let contradiction = format!("{E1_TEXT}trans 1 p b 1 eps 0\n");
        assert!(matches!(parse_spec(&contradiction), Err(Error::Parse { line: 11, .. })));
        let duplicate = format!("{E1_TEXT}trans 1 p b 1 eps 1\n");
        assert!(parse_spec(&duplicate).is_ok());
        let bad_letter = E1_TEXT.replace("trans 1 p b", "trans 1 p c");
        assert!(matches!(parse_spec(&bad_letter), Err(Error::Parse { line: 10, .. })));
        assert!(parse_spec(&E1_TEXT.replace("boolean", "tropical")).is_err());
    }
}
