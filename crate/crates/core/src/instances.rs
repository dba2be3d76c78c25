//! Small reference automata used by the examples, tests and the `verify`
//! command.

use crate::pda::{Letter, OmegaPda};
use crate::semiring::{Boolean, NatInf};

const ONE: Boolean = Boolean(true);

/// One state, Γ = {p}, Σ = {a, b}: `a` pushes a `p`, `b` pops one.
/// The finite behavior is the language of `x = a x x + b`; no state is repeated.
pub fn e1() -> OmegaPda<Boolean> {
    let mut p = OmegaPda::new(1, &["p"], &['a', 'b'], "p", 0);
    p.set_initial(0, Letter::Eps, ONE)
        .set_final(0, Letter::Eps, ONE)
        .add_transition(0, "p", Letter::Sym('a'), 0, &["p", "p"], ONE)
        .add_transition(0, "p", Letter::Sym('b'), 0, &[], ONE);
    p
}

/// [`e1`] with its single state repeated.
pub fn e2() -> OmegaPda<Boolean> {
    e1().with_repeated(1)
}

/// Two ways to read `a` from `p`: pop directly, or replace `p` by `q` and
/// then pop `q` silently.
pub fn e3() -> OmegaPda<Boolean> {
    let mut p = OmegaPda::new(1, &["p", "q"], &['a', 'b'], "p", 0);
    p.set_initial(0, Letter::Eps, ONE)
        .set_final(0, Letter::Eps, ONE)
        .add_transition(0, "p", Letter::Sym('a'), 0, &[], ONE)
        .add_transition(0, "p", Letter::Sym('a'), 0, &["q"], ONE)
        .add_transition(0, "q", Letter::Eps, 0, &[], ONE);
    p
}

/// [`e1`] with a silent self-loop `p → p`, which pumps infinitely many
/// computations for every accepted word.
pub fn e4() -> OmegaPda<Boolean> {
    let mut p = e1();
    p.add_transition(0, "p", Letter::Eps, 0, &["p"], ONE);
    p
}

impl OmegaPda<Boolean> {
    /// The same automaton read over ℕ^∞ with 0/1 coefficients.
    pub fn to_nat_inf(&self) -> OmegaPda<NatInf> {
        self.map_weights(|b| NatInf::Fin(u64::from(b.0)))
    }
}
