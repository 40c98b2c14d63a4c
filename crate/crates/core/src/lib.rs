//! Simulation lab for quantum preference queries.
//!
//! Tuples live in an idealized QRAM ([`qram`]); threshold and top-k
//! preference queries run on an amplitude-amplification engine ([`engine`])
//! with three cross-checking backends; every memory access is charged to an
//! [`IoLedger`](ledger::IoLedger) so quantum and classical algorithms
//! ([`baselines`]) can be compared by IO count ([`bench`]).

pub mod algorithms;
pub mod baselines;
pub mod bench;
pub mod bounds;
pub mod dataset;
pub mod engine;
pub mod error;
pub mod ledger;
pub mod qram;
pub mod rng;
pub mod validate;

pub use algorithms::{lemma1_probability, QueryOptions, QueryOutcome, QueryResult, Session};
pub use dataset::{Category, Dataset, Tuple, UtilityFunction};
pub use engine::{Backend, EngineState, SuperpositionHandle};
pub use error::{Error, Result};
pub use ledger::{IoLedger, IoPolicy};
pub use qram::Qram;
