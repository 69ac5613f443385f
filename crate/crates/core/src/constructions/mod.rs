//! Derived combinatorial objects evaluated pointwise at finite truncation.
//! Each object is a family indexed by ordinals whose members are determined
//! by closures, rho, delta, xi and canonical finite enumerations; eventual
//! ("mod finite") relations are decided exactly through their stabilization
//! levels.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scheme::Scheme;

pub mod aronszajn;
pub mod coherent;
pub mod countryman;
pub mod entangled;
pub mod gap;
pub mod indep;
pub mod lattice;
pub mod luzin_jones;
pub mod oscillation;
pub mod polychromatic;
pub mod suslin;

/// A finite truncation of a level-graded point set: points are level-tagged
/// tuples whose first entry is the level.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TruncatedSet {
    pub depth: u64,
    pub points: BTreeSet<Vec<u64>>,
}

impl TruncatedSet {
    pub fn new(depth: u64) -> Self {
        TruncatedSet {
            depth,
            points: BTreeSet::new(),
        }
    }

    pub fn inter(&self, other: &TruncatedSet) -> TruncatedSet {
        TruncatedSet {
            depth: self.depth.min(other.depth),
            points: self.points.intersection(&other.points).cloned().collect(),
        }
    }

    pub fn minus(&self, other: &TruncatedSet) -> TruncatedSet {
        TruncatedSet {
            depth: self.depth,
            points: self.points.difference(&other.points).cloned().collect(),
        }
    }

    pub fn is_subset_of(&self, other: &TruncatedSet) -> bool {
        self.points.is_subset(&other.points)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Largest level tag present, or None when empty.
    pub fn max_level(&self) -> Option<u64> {
        self.points.iter().filter_map(|p| p.first().copied()).max()
    }

    /// The points whose level tag is exactly k.
    pub fn at_level(&self, k: u64) -> BTreeSet<Vec<u64>> {
        self.points
            .iter()
            .filter(|p| p.first() == Some(&k))
            .cloned()
            .collect()
    }
}

pub(crate) fn require_binary(s: &Scheme) -> Result<()> {
    if s.spec().is_binary() {
        Ok(())
    } else {
        Err(Error::NonBinaryType {
            label: s.spec().label().to_string(),
        })
    }
}

/// m as u64 for coordinate arithmetic; construction depths stay far below
/// the overflow horizon.
pub(crate) fn m64(s: &Scheme, k: u64) -> Result<u64> {
    let m = s.m(k)?;
    u64::try_from(m).map_err(|_| Error::SizeOverflow { level: k })
}
