//! Continuous-time directed information.
//!
//! * [`paths`], [`pmf`], [`rng`], [`loss`], [`estimate`]: shared domain types,
//!   the Poisson loss and reproducible Monte Carlo plumbing.
//! * [`partition_di`]: exact discrete directed information over finite
//!   alphabets, including block groupings that model time partitions.
//! * [`gaussian`]: the AWGN channel with feedback, causal filters and the
//!   causal-MMSE estimate of directed information.
//! * [`poisson`]: the Poisson channel whose input is redrawn at every output
//!   event, its renewal filter, the analytic directed-information rate and a
//!   Monte Carlo estimate of it.
//! * [`capacity`]: optimization of that rate over binary input laws.
//! * [`cli`]: the `ctdi` command-line front end.
//!
//! All information quantities are in nats.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod capacity;
pub mod cli;
pub mod error;
pub mod estimate;
pub mod gaussian;
pub mod loss;
pub mod partition_di;
pub mod paths;
pub mod pmf;
pub mod poisson;
pub mod quad;
pub mod report;
pub mod rng;

pub use error::{Error, Result};
pub use estimate::{DiEstimate, McConfig};
pub use loss::poisson_loss;
pub use paths::{concat, is_refinement, EventTimes, SamplePath, TimePartition};
pub use pmf::FinitePmf;
pub use rng::RngSpec;
