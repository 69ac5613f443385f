//! Engine for finitary construction schemes over initial segments of the
//! countable ordinals.
//!
//! A *type* fixes, level by level, how many pieces a set of the next rank is
//! glued from and how large the shared root is. The schemes built from a type
//! are cofinal families of finite sets with canonical decompositions; on top
//! of them the crate computes an ordinal metric (`rho`), the cardinality
//! fingerprint (`delta`), the piece-index trace (`xi`), capturing relations,
//! and a collection of derived combinatorial objects (trees, gaps, colorings,
//! semilattices, coherent families).
//!
//! Everything is exact integer arithmetic; no randomness, no floating point.
//! Results are deterministic across runs and platforms.

pub mod capture;
pub mod checks;
pub mod constructions;
pub mod enumerate;
pub mod error;
pub mod forcing;
pub mod metrics;
pub mod ord;
pub mod scheme;
pub mod types;

pub use error::{Error, Result};
pub use metrics::DeltaValue;
pub use ord::FinSet;
pub use scheme::Scheme;
pub use types::{PartitionSpec, Schedule, TypeSpec};
