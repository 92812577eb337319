//! Exact computations with subgroups of the circle group `ℝ/ℤ` characterized,
//! or statistically characterized, by integer sequences.
//!
//! The modules follow the data flow: [`arith`] supplies exact rationals and the
//! seminorm, [`sequences`] builds divisibility chains and their derived
//! sequences, [`membership`] decides membership of rational points with
//! certificates, [`density`] handles natural densities and the block conditions,
//! and [`lemma_lab`] brute-forces the quantitative lemmas behind all of it.

pub mod acceptance;
pub mod arith;
pub mod cli;
pub mod density;
pub mod error;
mod factor;
pub mod lemma_lab;
pub mod membership;
pub mod sequences;

pub use arith::{seminorm, scaled_seminorm, DyadicInterval, Rational, SeminormValue};
pub use error::{Error, Result};
pub use membership::{CirclePoint, MembershipVerdict};
pub use sequences::{derive, ArithChain, DerivedSeq, IntSequence, SeqDescriptor, StrictSeq, Tail};
