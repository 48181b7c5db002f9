//! A sea-of-nodes compiler IR toolkit: graph model, Java integer semantics,
//! an interpreter, conditional elimination and canonicalization, structural
//! equivalence up to renumbering, and a differential-testing harness.

pub mod corpus;
pub mod equivalence;
pub mod format;
pub mod harness;
pub mod interp;
pub mod ir;
pub mod optimizer;
pub mod stamp;
pub mod value;
