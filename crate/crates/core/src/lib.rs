//! A workbench for finite combinatorics over decreasing sequences of
//! ordinals: the trees they form, the orders that compare them, rank
//! functions and the embeddings they license, similarity classes of finite
//! tuples, end-uniform colourings, desk-scale exhaustive verification of
//! partition statements, and explicit embeddings of scattered linear orders
//! into the alternating order <³.
//!
//! Everything is exact and deterministic: searches fix a canonical order,
//! budgets abort loudly instead of sampling, and all randomness used by the
//! generators sits behind explicit seeds.

pub mod gen;
pub mod ordinal;
pub mod orders;
pub mod rank;
pub mod scattered;
pub mod search;
pub mod similarity;
pub mod tree;

pub use ordinal::Ordinal;
pub use orders::OrderKind;
pub use rank::RankValue;
pub use scattered::HausdorffTerm;
pub use search::{Embedding, SearchLimits, VerifyReport, Witness};
pub use similarity::{ClassRegistry, Colouring, SimCode, Tuple};
pub use tree::{DecSeq, Tree};
