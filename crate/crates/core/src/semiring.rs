//! Complete star-omega semirings.
//!
//! Two instances are provided: the Boolean semiring [`Boolean`] and the
//! extended naturals [`NatInf`] (ℕ ∪ {∞}). Both implement [`StarOmega`], which
//! layers `star` (s* = Σ sʲ) and `omega` (s^ω = s·s·s·…) on top of the
//! `num-traits` additive and multiplicative identities.

use std::fmt;
use std::hash::Hash;
use std::ops::{Add, Mul};
use std::str::FromStr;

use num_traits::{One, Zero};

/// A commutative complete star-omega semiring with decidable equality.
pub trait StarOmega: Copy + Eq + Ord + Hash + fmt::Debug + fmt::Display + Zero + One + Send + Sync + 'static {
    /// Name used in spec files and grammar headers.
    const NAME: &'static str;

    /// `Σ_{j≥0} aʲ`.
    fn star(self) -> Self;

    /// `∏_{j≥1} a`.
    fn omega(self) -> Self;

    /// Parses a weight literal as written in spec files.
    fn parse_weight(s: &str) -> Option<Self>;

    /// Embeds a natural number (the sum of `k` ones).
    fn from_count(k: u64) -> Self;

    fn is_nonzero(&self) -> bool {
        !self.is_zero()
    }

    /// Projection onto the Boolean semiring (support).
    fn support(self) -> Boolean {
        Boolean(self.is_nonzero())
    }
}

/// Iterated `+` over a finite family; the empty family sums to zero.
pub fn sum<S: StarOmega, I: IntoIterator<Item = S>>(family: I) -> S {
    family.into_iter().fold(S::zero(), |acc, x| acc + x)
}

/// Iterated `·` over a finite family; the empty family multiplies to one.
pub fn product<S: StarOmega, I: IntoIterator<Item = S>>(family: I) -> S {
    family.into_iter().fold(S::one(), |acc, x| acc * x)
}

/// Which semiring instance an automaton is interpreted over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SemiringKind {
    Boolean,
    NatInf,
}

impl SemiringKind {
    pub fn name(self) -> &'static str {
        match self {
            SemiringKind::Boolean => Boolean::NAME,
            SemiringKind::NatInf => NatInf::NAME,
        }
    }
}

impl fmt::Display for SemiringKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SemiringKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "boolean" => Ok(SemiringKind::Boolean),
            "nat-inf" => Ok(SemiringKind::NatInf),
            other => Err(format!("unknown semiring: {other}")),
        }
    }
}

// ---------------------------------------------------------------------------
// Boolean
// ---------------------------------------------------------------------------

/// `({0,1}, ∨, ∧)` with `0* = 1* = 1`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Boolean(pub bool);

impl Boolean {
    pub const FALSE: Boolean = Boolean(false);
    pub const TRUE: Boolean = Boolean(true);
}

impl From<bool> for Boolean {
    fn from(b: bool) -> Self {
        Boolean(b)
    }
}

impl Add for Boolean {
    type Output = Boolean;
    fn add(self, rhs: Boolean) -> Boolean {
        Boolean(self.0 || rhs.0)
    }
}

impl Mul for Boolean {
    type Output = Boolean;
    fn mul(self, rhs: Boolean) -> Boolean {
        Boolean(self.0 && rhs.0)
    }
}

impl Zero for Boolean {
    fn zero() -> Self {
        Boolean(false)
    }
    fn is_zero(&self) -> bool {
        !self.0
    }
}

impl One for Boolean {
    fn one() -> Self {
        Boolean(true)
    }
}

impl fmt::Display for Boolean {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(if self.0 { "1" } else { "0" })
    }
}

impl StarOmega for Boolean {
    const NAME: &'static str = "boolean";

    fn star(self) -> Self {
        Boolean(true)
    }

    fn omega(self) -> Self {
        self
    }

    fn parse_weight(s: &str) -> Option<Self> {
        match s {
            "0" => Some(Boolean(false)),
            "1" => Some(Boolean(true)),
            _ => None,
        }
    }

    fn from_count(k: u64) -> Self {
        Boolean(k > 0)
    }
}

// ---------------------------------------------------------------------------
// Extended naturals
// ---------------------------------------------------------------------------

/// `(ℕ ∪ {∞}, +, ·)` with `0* = 1`, `a* = ∞` for `a ≠ 0`.
///
/// Finite values are exact `u64`s. Sums and products that leave the `u64`
/// range saturate to [`NatInf::Inf`] instead of wrapping.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NatInf {
    Fin(u64),
    Inf,
}

impl NatInf {
    pub fn is_infinite(&self) -> bool {
        matches!(self, NatInf::Inf)
    }

    pub fn finite(&self) -> Option<u64> {
        match *self {
            NatInf::Fin(k) => Some(k),
            NatInf::Inf => None,
        }
    }
}

impl Default for NatInf {
    fn default() -> Self {
        NatInf::Fin(0)
    }
}

impl From<u64> for NatInf {
    fn from(k: u64) -> Self {
        NatInf::Fin(k)
    }
}

impl Add for NatInf {
    type Output = NatInf;
    fn add(self, rhs: NatInf) -> NatInf {
        match (self, rhs) {
            (NatInf::Fin(a), NatInf::Fin(b)) => a.checked_add(b).map_or(NatInf::Inf, NatInf::Fin),
            _ => NatInf::Inf,
        }
    }
}

impl Mul for NatInf {
    type Output = NatInf;
    fn mul(self, rhs: NatInf) -> NatInf {
        match (self, rhs) {
            (NatInf::Fin(0), _) | (_, NatInf::Fin(0)) => NatInf::Fin(0),
            (NatInf::Fin(a), NatInf::Fin(b)) => a.checked_mul(b).map_or(NatInf::Inf, NatInf::Fin),
            _ => NatInf::Inf,
        }
    }
}

impl Zero for NatInf {
    fn zero() -> Self {
        NatInf::Fin(0)
    }
    fn is_zero(&self) -> bool {
        *self == NatInf::Fin(0)
    }
}

impl One for NatInf {
    fn one() -> Self {
        NatInf::Fin(1)
    }
}

impl fmt::Display for NatInf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NatInf::Fin(k) => write!(f, "{k}"),
            NatInf::Inf => f.write_str("inf"),
        }
    }
}

impl StarOmega for NatInf {
    const NAME: &'static str = "nat-inf";

    fn star(self) -> Self {
        if self.is_zero() {
            NatInf::Fin(1)
        } else {
            NatInf::Inf
        }
    }

    fn omega(self) -> Self {
        match self {
            NatInf::Fin(0) => NatInf::Fin(0),
            NatInf::Fin(1) => NatInf::Fin(1),
            _ => NatInf::Inf,
        }
    }

    fn parse_weight(s: &str) -> Option<Self> {
        if s == "inf" {
            return Some(NatInf::Inf);
        }
        if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        s.parse::<u64>().ok().map(NatInf::Fin)
    }

    fn from_count(k: u64) -> Self {
        NatInf::Fin(k)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn nat_inf() -> impl Strategy<Value = NatInf> {
        prop_oneof![
            1 => Just(NatInf::Inf),
            1 => Just(NatInf::Fin(0)),
            1 => Just(NatInf::Fin(1)),
            4 => (0u64..1000).prop_map(NatInf::Fin),
            1 => (u64::MAX - 4..=u64::MAX).prop_map(NatInf::Fin),
        ]
    }

    #[test]
    fn star_examples() {
        assert_eq!(Boolean(false).star(), Boolean(true));
        assert_eq!(Boolean(true).star(), Boolean(true));
        assert_eq!(NatInf::Fin(0).star(), NatInf::Fin(1));
        assert_eq!(NatInf::Fin(2).star(), NatInf::Inf);
        assert_eq!(NatInf::Inf.star(), NatInf::Inf);
    }

    #[test]
    fn omega_examples() {
        assert_eq!(Boolean(true).omega(), Boolean(true));
        assert_eq!(Boolean(false).omega(), Boolean(false));
        assert_eq!(NatInf::Fin(0).omega(), NatInf::Fin(0));
        assert_eq!(NatInf::Fin(1).omega(), NatInf::Fin(1));
        assert_eq!(NatInf::Fin(2).omega(), NatInf::Inf);
    }

    #[test]
    fn omega_of_two_is_supremum_of_partial_products() {
        // 2^k exceeds every bound; the first partial product that leaves
        // u64 saturates, matching the supremum.
        let mut acc = NatInf::one();
        for _ in 0..64 {
            assert!(!acc.is_infinite());
            acc = acc * NatInf::Fin(2);
        }
        assert_eq!(acc, NatInf::Inf);
        assert_eq!(acc, NatInf::Fin(2).omega());
    }

    #[test]
    fn sums() {
        assert_eq!(sum([Boolean(true), Boolean(false), Boolean(true)]), Boolean(true));
        assert_eq!(sum([NatInf::Fin(2), NatInf::Fin(3), NatInf::Inf]), NatInf::Inf);
        assert_eq!(sum(Vec::<NatInf>::new()), NatInf::Fin(0));
        assert_eq!(sum([NatInf::Fin(2), NatInf::Fin(3)]), NatInf::Fin(5));
    }

    #[test]
    fn infinity_absorbs_except_against_zero() {
        assert_eq!(NatInf::Inf + NatInf::Fin(0), NatInf::Inf);
        assert_eq!(NatInf::Inf * NatInf::Fin(3), NatInf::Inf);
        assert_eq!(NatInf::Inf * NatInf::Fin(0), NatInf::Fin(0));
        assert_eq!(NatInf::Fin(0) * NatInf::Inf, NatInf::Fin(0));
    }

    #[test]
    fn overflow_saturates() {
        assert_eq!(NatInf::Fin(u64::MAX) + NatInf::Fin(1), NatInf::Inf);
        assert_eq!(NatInf::Fin(u64::MAX) * NatInf::Fin(2), NatInf::Inf);
        assert_eq!(NatInf::Fin(u64::MAX) * NatInf::Fin(1), NatInf::Fin(u64::MAX));
    }

    #[test]
    fn weight_literals() {
        assert_eq!(NatInf::parse_weight("inf"), Some(NatInf::Inf));
        assert_eq!(NatInf::parse_weight("17"), Some(NatInf::Fin(17)));
        assert_eq!(NatInf::parse_weight("-1"), None);
        assert_eq!(NatInf::parse_weight("+1"), None);
        assert_eq!(Boolean::parse_weight("2"), None);
        assert_eq!("nat-inf".parse::<SemiringKind>(), Ok(SemiringKind::NatInf));
        assert!("Boolean".parse::<SemiringKind>().is_err());
    }

    #[test]
    fn boolean_laws_exhaustive() {
        let all = [Boolean(false), Boolean(true)];
        for &a in &all {
            assert_eq!(a.star(), Boolean::one() + a * a.star());
            assert_eq!(a.star(), Boolean::one() + a.star() * a);
            assert_eq!(a.omega(), a * a.omega());
            for &b in &all {
                assert_eq!(a + b, b + a);
                assert_eq!(a * b, b * a);
                for &c in &all {
                    assert_eq!((a + b) + c, a + (b + c));
                    assert_eq!((a * b) * c, a * (b * c));
                    assert_eq!(a * (b + c), a * b + a * c);
                }
            }
        }
    }

    proptest! {
        #[test]
        fn nat_inf_semiring_laws(a in nat_inf(), b in nat_inf(), c in nat_inf()) {
            prop_assert_eq!(a + b, b + a);
            prop_assert_eq!(a * b, b * a);
            prop_assert_eq!((a + b) + c, a + (b + c));
            prop_assert_eq!(a + NatInf::zero(), a);
            prop_assert_eq!(a * NatInf::one(), a);
            prop_assert_eq!(a * NatInf::zero(), NatInf::zero());
        }

        // Exact below the saturation threshold.
        #[test]
        fn nat_inf_mul_laws_small(a in 0u64..1_000_000, b in 0u64..1_000_000, c in 0u64..1_000_000) {
            let (a, b, c) = (NatInf::Fin(a), NatInf::Fin(b), NatInf::Fin(c));
            prop_assert_eq!((a * b) * c, a * (b * c));
            prop_assert_eq!(a * (b + c), a * b + a * c);
        }

        #[test]
        fn nat_inf_star_and_omega_laws(a in nat_inf()) {
            prop_assert_eq!(a.star(), NatInf::one() + a * a.star());
            prop_assert_eq!(a.star(), NatInf::one() + a.star() * a);
            prop_assert_eq!(a.omega(), a * a.omega());
        }
    }
}
