//! Exact discrete probability: distributions and channels with rational
//! weights, multiset and partition combinatorics, and exhaustive
//! verification of sufficient statistics for the multinomial, swapped
//! multinomial, Ewens and Poisson families.

pub mod arith;
pub mod channel;
pub mod cli;
pub mod dist;
pub mod error;
pub mod ewens;
pub mod msets;
pub mod outcome;
pub mod partitions;
pub mod poisson;
pub mod report;
pub mod seqmult;
pub mod suffcheck;
pub mod text;

pub use arith::Prob;
pub use channel::{Channel, StateFamily};
pub use dist::{Dist, Predicate};
pub use error::{Error, Result};
pub use msets::{Carrier, Multiset};
pub use outcome::{Outcome, Value};
pub use partitions::Partition;
pub use report::Report;
