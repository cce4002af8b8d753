//! Exact computations around PDO(n), the number of partitions of `n` into odd
//! parts with designated summands.
//!
//! The crate expands the relevant eta-quotients as truncated integer
//! `q`-series, builds the polynomial towers in the Hauptmodul `xi` on
//! `X_0(6)`, profiles their 2-adic valuations, and checks the resulting
//! internal congruences modulo powers of 2 over explicit windows.

pub mod congruence;
pub mod error;
pub mod etaq;
pub mod padic;
pub mod series;
pub mod xipoly;

pub mod cli;

pub use error::{Error, Result};
pub use etaq::{EtaQuotientSpec, PdoTable};
pub use series::Series;
pub use xipoly::XiPoly;
