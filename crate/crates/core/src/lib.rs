//! Exact computation of power moments of Kloosterman sums with square
//! arguments over GF(3^r), through the ternary codes attached to the
//! groups SO-(2,q), O-(2,q) and SO-(4,q).
//!
//! The modules build on each other bottom-up:
//!
//! * [`gf3r`]: the field, its trace and its squares.
//! * [`charsums`]: Kloosterman sums, the moments `SK^h`, and the counts
//!   `delta(m, q; beta)`.
//! * [`ogroups`]: the three groups, their trace histograms by enumeration
//!   and in closed form.
//! * [`gauss`]: closed-form Gauss sums of the orthogonal groups.
//! * [`codes`]: the codes, their dual codewords and low-weight counts.
//! * [`moments`]: the Pless identity and the three moment recursions.
//! * [`cli`]: the `kmoments` command line.

pub mod charsums;
pub mod cli;
pub mod codes;
pub mod config;
pub mod error;
pub mod gauss;
pub mod gf3r;
pub mod limits;
pub mod moments;
pub mod ogroups;

pub use error::{Error, Result};
pub use gf3r::{FieldContext, FieldElement, Poly3};
pub use limits::WorkLimits;
pub use ogroups::{GroupId, TraceHistogram};
