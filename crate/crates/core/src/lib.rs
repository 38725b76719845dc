#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod algebraic;
pub mod asymptotics;
pub mod cli;
pub mod counting;
pub mod error;
pub mod heights;
pub mod matveev;
pub mod numeric;
pub mod quadratic;
pub mod recurrence;
pub mod spectral;

pub use error::{Error, Result};
pub use recurrence::{parse_sequence_config, LinearRecurrence, SequenceConfig};
