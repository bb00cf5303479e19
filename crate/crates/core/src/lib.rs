//! Proof search, cut elimination, and Craig and uniform interpolation for
//! propositional Lax Logic.

pub mod calculus;
pub mod error;
pub mod gen;
pub mod interp;
pub mod prover;
pub mod sequent;
pub mod simplify;
pub mod suite;
pub mod syntax;
pub mod transform;
pub mod uniform;

pub use calculus::{instances, Calculus, Principal, RuleInstance, RuleTag};
pub use error::{Error, Result};
pub use interp::{craig, maehara, SplitSequent};
pub use prover::{check, prove_g3, prove_g4, Derivation, G3Prover, G4Prover, ProofNode};
pub use sequent::{parse_sequent, Multiset, Partition, Sequent};
pub use simplify::simplify;
pub use syntax::{parse, Formula, Notation};
pub use uniform::{
    check_interpolant_properties, exists_p, forall_p, normalize, quantify_multi, rank_less, rewrite_step,
    CalculusHandle, Quantifier, UExpr,
};
