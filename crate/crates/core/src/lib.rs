//! Proof-producing decision procedure for k-equivalence relations.
//!
//! A `(k+1)`-ary relation is a k-equivalence relation when it is
//! sub-reflexive, invariant under permutation and k-transitive. Equality is
//! the case `k = 1`, collinearity `k = 2` and cocyclicity `k = 3`.
//!
//! - [`engine`]: incremental saturation over k-sets, queries and proof
//!   extraction.
//! - [`proof`]: proof terms and the independent checker.
//! - [`syntax`]: reader for the textual proof format.
//! - [`oracle`]: brute-force reference semantics for differential testing.
//! - [`congruence`]: term equalities on top of one or more sessions.
//!
//! ```
//! use kequiv::Session;
//!
//! let mut s = Session::new(2).unwrap();
//! let [a, b, c, d] = ["a", "b", "c", "d"].map(|n| s.intern_term(n));
//! s.assert_hypothesis(&[a, b, c]).unwrap();
//! s.assert_hypothesis(&[b, c, d]).unwrap();
//! let v = s.resolve_query(&[a, b, d]).unwrap();
//! let proof = v.proof().unwrap();
//! assert_eq!(proof.render(&s), "(project (trans (assume 0) (assume 1)) a b d)");
//! assert!(kequiv::check(proof, &s.check_context(&[])).is_ok());
//! ```

pub mod congruence;
pub mod engine;
pub mod oracle;
pub mod proof;
pub mod syntax;
pub mod term;

pub use congruence::{Congruence, CongruenceError, RelationId};
pub use engine::{Counters, EngineError, HistoryNode, KSetId, KSetRecord, Session, Verdict};
pub use proof::{check, CheckContext, CheckError, Judgment, ProofTerm};
pub use term::{DistinctnessPartition, TermId, TermSet};
