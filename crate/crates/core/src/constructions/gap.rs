//! Two interleaved pretowers of naturals indexed by piece traces: the left
//! set records the trace at even offsets, the right set its complement at
//! odd offsets, and every pair splits at an explicit witness point.

use crate::error::Result;
use crate::metrics;
use crate::ord::FinSet;
use crate::scheme::Scheme;

use super::require_binary;

/// (A, B) truncated to levels 1..=depth: 2k + trace and 2k + (1 - trace),
/// over levels where the trace is nonnegative.
pub fn sets(s: &Scheme, alpha: u64, depth: u64) -> Result<(FinSet, FinSet)> {
    require_binary(s)?;
    let mut a = Vec::new();
    let mut b = Vec::new();
    for k in 1..=depth {
        let xi = metrics::xi(s, alpha, k)?;
        if xi >= 0 {
            a.push(2 * k + xi as u64);
            b.push(2 * k + (1 - xi as u64));
        }
    }
    Ok((FinSet::new(a), FinSet::new(b)))
}
