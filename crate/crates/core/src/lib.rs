//! Edge-isoperimetric sets on the integer lattice.
//!
//! The central objects are *daisies*, the canonical minimizers of the edge
//! perimeter for every cardinality, together with the tools used to compare
//! arbitrary minimizers with them: decreasing rearrangements, defect filling,
//! a normal form for minimizers, extremal slab families, an exhaustive
//! small-size oracle and a fluctuation-scaling harness.

pub mod arith;
pub mod bounds;
pub mod daisy;
pub mod defects;
pub mod error;
pub mod experiments;
pub mod io;
pub mod lattice;
pub mod oracle;
pub mod order;
pub mod rearrange;

pub use error::{Error, MatrixRule, Result};
