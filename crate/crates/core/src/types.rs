//! Types: the level data (n_k, r_k) driving every scheme.
//!
//! A type assigns to each level k >= 1 a branching degree n_k >= 2 and a root
//! size r_k, subject to
//!
//!   (a) m_0 = 1,
//!   (b) n_k >= 2,
//!   (c) every natural occurs as r_k at infinitely many k,
//!   (d) r_k < m_{k-1},
//!   (e) m_k = r_k + (m_{k-1} - r_k) * n_k.
//!
//! Finitely many levels come from an explicit prefix; the infinite tail is
//! generated by a round-robin rule, so clause (c) is a structural property of
//! the rule rather than something sampled. The tail interleaves `cells`
//! independent copies of the ruler sequence a(2j)=j, a(2j+1)=a(j), whose value
//! r occurs exactly at indices 2^u(2r+1)-1; that closed form is what the
//! partition-compatibility decision procedure runs on.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// The ruler sequence a(2j) = j, a(2j+1) = a(j), with a(0) = 0.
/// Every value r occurs exactly at the indices 2^u(2r+1) - 1, u >= 0.
pub fn ruler(mut j: u64) -> u64 {
    loop {
        if j % 2 == 0 {
            return j / 2;
        }
        j /= 2;
    }
}

/// Tail rule generating (n_k, r_k) beyond the prefix.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Schedule {
    /// `cells` interleaved copies of the ruler sequence, branching `n`.
    /// Tail step t >= 1 lands in copy (t-1) mod cells at within-copy
    /// position (t-1)/cells + 1.
    RoundRobin {
        #[serde(default = "default_n")]
        n: u64,
        #[serde(default = "default_cells")]
        cells: u64,
    },
}

fn default_n() -> u64 {
    2
}

fn default_cells() -> u64 {
    1
}

impl Default for Schedule {
    fn default() -> Self {
        Schedule::RoundRobin { n: 2, cells: 1 }
    }
}

/// Level data: explicit prefix plus a generated tail. Immutable once built;
/// all queries are pure arithmetic, safe to share across threads.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TypeSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    /// (n_k, r_k) for k = 1 ..= prefix.len().
    #[serde(default)]
    pub prefix: Vec<(u64, u64)>,
    #[serde(default)]
    pub schedule: Schedule,
}

impl TypeSpec {
    /// Display name for diagnostics and CLI output.
    pub fn label(&self) -> &str {
        self.name.as_deref().unwrap_or("custom")
    }

    /// Whether branching is 2 at every level.
    pub fn is_binary(&self) -> bool {
        let Schedule::RoundRobin { n, .. } = self.schedule;
        n == 2 && self.prefix.iter().all(|&(nk, _)| nk == 2)
    }

    /// The binary workhorse: n = 2 everywhere, ruler r-schedule.
    /// m = 1, 2, 3, 6, 10, 19, 35, 70, 136, ...
    pub fn binary() -> Self {
        TypeSpec {
            name: Some("T2".into()),
            prefix: Vec::new(),
            schedule: Schedule::default(),
        }
    }

    /// Mixed-branching demonstration type.
    /// m = 1, 2, 4, 8, 14, 27, 51, then binary ruler tail.
    pub fn star() -> Self {
        TypeSpec {
            name: Some("Tstar".into()),
            prefix: vec![(2, 0), (3, 1), (2, 0), (2, 2), (2, 1), (2, 3)],
            schedule: Schedule::default(),
        }
    }

    /// Resolve a builtin name.
    pub fn builtin(name: &str) -> Option<Self> {
        match name {
            "T2" | "t2" | "T\u{2082}" | "binary" => Some(Self::binary()),
            "Tstar" | "tstar" | "T*" | "T\u{2605}" | "star" => Some(Self::star()),
            _ => None,
        }
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("TypeSpec serializes")
    }

    /// (n_k, r_k). `k >= 1`.
    pub fn n_r(&self, k: u64) -> (u64, u64) {
        assert!(k >= 1, "levels start at 1");
        let p = self.prefix.len() as u64;
        if k <= p {
            return self.prefix[(k - 1) as usize];
        }
        match self.schedule {
            Schedule::RoundRobin { n, cells } => {
                let t = k - p; // tail step, 1-based
                let w = (t - 1) / cells + 1; // within-copy position, 1-based
                (n, ruler(w))
            }
        }
    }

    pub fn n(&self, k: u64) -> u64 {
        self.n_r(k).0
    }

    pub fn r(&self, k: u64) -> u64 {
        self.n_r(k).1
    }

    /// m_0 ..= m_K, validating clauses (b), (d), (e) along the way.
    pub fn compute_m(&self, levels: u64) -> Result<Vec<u128>> {
        let mut m: Vec<u128> = vec![1];
        for k in 1..=levels {
            let (n, r) = self.n_r(k);
            if n < 2 {
                return Err(Error::InvalidType {
                    level: k,
                    clause: 'b',
                    detail: format!("n_{k} = {n} < 2"),
                });
            }
            let prev = m[(k - 1) as usize];
            if (r as u128) >= prev {
                return Err(Error::InvalidType {
                    level: k,
                    clause: 'd',
                    detail: format!("r_{k} = {r} >= m_{} = {prev}", k - 1),
                });
            }
            let next = (r as u128)
                .checked_add(
                    (prev - r as u128)
                        .checked_mul(n as u128)
                        .ok_or(Error::SizeOverflow { level: k })?,
                )
                .ok_or(Error::SizeOverflow { level: k })?;
            m.push(next);
        }
        Ok(m)
    }

    /// Full validation to depth `levels`. Clause (c) holds structurally for
    /// every round-robin tail: within each interleaved copy the value r
    /// recurs at the ruler indices 2^u(2r+1)-1, which are unbounded.
    pub fn validate(&self, levels: u64) -> Result<Vec<u128>> {
        self.compute_m(levels)
    }
}

/// A partition of the levels k >= 1 into finitely many cells.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PartitionSpec {
    /// One cell holding every level.
    Single,
    /// Level k goes to cell k mod cells.
    Mod { cells: u64 },
    /// Cell 0 = levels with r_k = value, cell 1 = the rest.
    ByR { value: u64 },
}

impl PartitionSpec {
    pub fn cell_count(&self) -> u64 {
        match self {
            PartitionSpec::Single => 1,
            PartitionSpec::Mod { cells } => *cells,
            PartitionSpec::ByR { .. } => 2,
        }
    }

    pub fn cell_of(&self, spec: &TypeSpec, k: u64) -> u64 {
        match self {
            PartitionSpec::Single => 0,
            PartitionSpec::Mod { cells } => k % cells,
            PartitionSpec::ByR { value } => {
                if spec.r(k) == *value {
                    0
                } else {
                    1
                }
            }
        }
    }
}

/// Outcome of the compatibility decision.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Compatibility {
    Compatible,
    /// `cell` fails to see `missing_r` infinitely often (no occurrence in the
    /// periodic regime of the occurrence-index analysis).
    Incompatible { cell: u64, missing_r: u64 },
}

/// Decide whether every cell of `part` sees every root size infinitely often.
///
/// Exact for the supported shapes: occurrences of value r in the ruler sit at
/// indices 2^u(2r+1)-1, so the level indices hitting a given partition cell
/// reduce to a question about 2^u modulo the cell count, which is eventually
/// periodic. The scan walks one full period safely past the pre-period; a
/// value whose occurrences miss a cell there misses it forever after.
pub fn validate_partition(spec: &TypeSpec, part: &PartitionSpec) -> Compatibility {
    match part {
        PartitionSpec::Single => Compatibility::Compatible,
        PartitionSpec::ByR { value } => Compatibility::Incompatible {
            cell: 0,
            missing_r: if *value == 0 { 1 } else { 0 },
        },
        PartitionSpec::Mod { cells: c } => {
            let c = (*c).max(1);
            let p = spec.prefix.len() as u64;
            let Schedule::RoundRobin { cells: s, .. } = spec.schedule;
            // k = p + (w-1)*s + j + 1 with w = 2^u(2r+1)-1 ranging over the
            // occurrence indices and j over the interleaved copies. Residues
            // mod c depend on r only through r mod c. Pre-period of 2^u mod c
            // is at most log2(c) <= c; period divides the Carmichael function
            // of the odd part, also <= c. Scan u in [c+8, 3c+16].
            let mut hit = vec![vec![false; c as usize]; c as usize];
            for r_class in 0..c {
                let mut pow = 1u64 % c; // 2^0 mod c
                for _ in 0..(c + 8) {
                    pow = pow * 2 % c;
                }
                for _ in 0..(2 * c + 8) {
                    // w - 1 = 2^u(2r+1) - 2 taken mod c
                    let w_minus_1 = (pow * ((2 * r_class + 1) % c) % c + c - 2 % c) % c;
                    for j in 0..s {
                        let k_res = (p + w_minus_1 % c * (s % c) % c + j + 1) % c;
                        hit[k_res as usize][r_class as usize] = true;
                    }
                    pow = pow * 2 % c;
                }
            }
            for cell in 0..c {
                for r_class in 0..c {
                    if !hit[cell as usize][r_class as usize] {
                        return Compatibility::Incompatible {
                            cell,
                            missing_r: r_class,
                        };
                    }
                }
            }
            Compatibility::Compatible
        }
    }
}
