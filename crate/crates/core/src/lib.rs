//! Enriched sieves, coverages and sheaves over finite quantales, Gabriel
//! topologies over finite rings, and monomial-ideal topologies over `k[x, y]`.

pub mod base_change;
pub mod category;
pub mod coverage;
pub mod error;
pub mod graded;
pub mod instances;
pub mod limits;
pub mod par;
pub mod quantale;
pub mod ring;
pub mod sheaf;
pub mod sieve;

pub use error::{Error, Result};
pub use limits::Limits;
