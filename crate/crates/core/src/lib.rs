//! Maximal-inequality bounds for martingales driven by a log-MGF bound `φ`,
//! plus the Monte Carlo machinery used to check them.
//!
//! The crate is `no_std` (with `alloc`). File formats, the CLI and the
//! parallel harness live in the `maxbound` crate.

#![cfg_attr(not(test), no_std)]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod bounds;
pub mod error;
pub mod math;
pub mod mgf;
pub mod optimize;
pub mod sim;
pub mod stopping;
pub mod validate;

pub use error::{Error, Result};
