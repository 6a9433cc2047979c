//! Skew polynomial models of matrix algebras over finite fields and the
//! sum-rank and Hamming metric codes built from them.

pub mod central;
pub mod codes;
pub mod error;
pub mod ftower;
pub mod gf;
pub mod invariants;
pub mod linalg;
pub mod poly;
pub mod quotient;
pub mod selftest;
pub mod skew;

pub use central::{AdmissibleTuple, CountKind, SubgroupSpec};
pub use codes::{Ambient, Code, CodeParams, Family, Verdict, VerdictKind};
pub use error::{Error, Result};
pub use ftower::{build_tower, AutSpec, FieldSpec, Level, TowerContext};
pub use gf::{Elem, Gf};
pub use invariants::{Novelty, NuclearProfile};
pub use linalg::Matrix;
pub use poly::Poly;
pub use quotient::{QuotCtx, RealizationMode};
pub use skew::{SkewPoly, SkewRing};
