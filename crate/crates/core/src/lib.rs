//! Weighted ω-pushdown automata over complete star-omega semirings.
//!
//! The crate covers the two semirings used in practice here, the Boolean
//! semiring and the extended naturals ℕ^∞, and provides:
//!
//! * pushdown transition matrices with suffix-closed lookup ([`pda`]),
//! * star-triple saturation and Büchi pair detection ([`reachability`]),
//! * the triple-pair construction of a mixed algebraic grammar and a chart
//!   evaluator for it ([`grammar`]),
//! * Büchi acceptance of ultimately periodic words ([`lasso`]),
//! * a plain-text automaton format ([`spec_file`]), seeded random instances
//!   ([`gen`]) and self-check suites ([`verify`]).

pub mod error;
pub mod gen;
pub mod grammar;
pub mod instances;
pub mod lasso;
pub mod matrix;
pub mod pda;
pub mod reachability;
pub mod semiring;
pub mod spec_file;
pub mod verify;

pub use error::{Error, Result};
pub use grammar::{triple_pair_construct, unambiguity_check, word_weight, MixedGrammar, Verdict};
pub use lasso::{lasso_accepts, LassoWord};
pub use matrix::SqMatrix;
pub use pda::{Letter, OmegaPda, PdMatrix};
pub use reachability::{omega_pairs, star_triples};
pub use semiring::{Boolean, NatInf, SemiringKind, StarOmega};
pub use spec_file::{parse_spec, to_spec_text, AnyPda};

pub type BoolPda = OmegaPda<Boolean>;
pub type CountPda = OmegaPda<NatInf>;
pub type BoolGrammar = MixedGrammar<Boolean>;
pub type CountGrammar = MixedGrammar<NatInf>;
pub type BoolMatrix = SqMatrix<Boolean>;
pub type CountMatrix = SqMatrix<NatInf>;
