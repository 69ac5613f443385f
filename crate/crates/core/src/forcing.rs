//! Finite conditions over a stacked-block universe.
//!
//! The universe is an initial ground copy of omega plus finitely many fresh
//! copies stacked on top (see [`crate::ord`] for the packed encoding). A
//! condition is a finite set that looks like a member once its fresh part is
//! slid down onto the ground: the reduction map makes that precise, and the
//! cut map goes the other way, lifting a tail of a ground member onto a
//! fresh block. A [`Fragment`] grows one descending chain of conditions per
//! fresh block, on demand and deterministically, and answers closure and
//! distance queries about ordinals in any covered block by transporting the
//! question through the strongest condition so far.
//!
//! The second half of the file is interval bookkeeping: block sequences,
//! their projections between levels, the checkmark relation they induce,
//! acceptance of a tuple by a member, and the transport table that moves a
//! checkmark query from one level pair to another.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::capture::{self, combinations};
use crate::error::{Error, Result};
use crate::ord::{block_of, FinSet, OMEGA};
use crate::scheme::Scheme;

/// Cap on how many fresh blocks one fragment may stack.
const MAX_BLOCKS: u64 = 8;

/// How many speculative rank extensions a witness scan may trigger on the
/// chain below before giving up.
const WITNESS_EXTENSIONS: usize = 2;

/// Cap on candidate-times-combination work in acceptance scans.
const SCAN_CAP: u128 = 5_000_000;

/// A condition: a finite set whose fresh part is an initial run of one
/// block, together with the level its size comes from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Condition {
    set: FinSet,
    rank: u64,
}

impl Condition {
    pub fn set(&self) -> &FinSet {
        &self.set
    }

    pub fn rank(&self) -> u64 {
        self.rank
    }

    /// Part below the block boundary `gamma`.
    pub fn ground(&self, gamma: u64) -> FinSet {
        self.set.below(gamma)
    }

    /// Part at or above the block boundary `gamma`.
    pub fn fresh(&self, gamma: u64) -> FinSet {
        self.set.from_value(gamma)
    }
}

/// Slide the part of `p` above `delta` down onto an interval starting at
/// the top element of the part below, producing a set of the same size
/// entirely below `delta` (assuming `p` itself was short enough).
pub fn red(p: &FinSet, delta: u64) -> Result<FinSet> {
    if p.is_empty() {
        return Err(Error::BadInput("reduction of an empty set".into()));
    }
    let ground = p.below(delta);
    let Some(alpha) = ground.last() else {
        return Ok(FinSet::interval(0, p.len() as u64));
    };
    // count of elements >= alpha, i.e. the slid-down tail including alpha
    let n = (p.len() - ground.len() + 1) as u64;
    Ok(ground.union(&FinSet::interval(alpha, n)))
}

/// Lift the tail of the member `f` from `alpha` upward onto the fresh block
/// starting at `gamma`, keeping `f` below `alpha` as the ground part.
pub fn cut(s: &Scheme, f: &FinSet, alpha: u64, gamma: u64) -> Result<Condition> {
    if !f.contains(alpha) {
        return Err(Error::NotAMember {
            detail: format!("cut point {alpha} is not an element of the set"),
        });
    }
    let rank = rank_of_size(s, f.len())?;
    if block_of(gamma) == 0 || gamma % OMEGA != 0 {
        return Err(Error::BadInput(format!(
            "cut target {gamma} is not a fresh block boundary"
        )));
    }
    let ground = f.below(alpha);
    if let Some(top) = ground.last() {
        if top >= gamma {
            return Err(Error::BadInput(
                "cut ground part reaches past the block boundary".into(),
            ));
        }
    }
    let fresh = FinSet::interval(gamma, (f.len() - ground.len()) as u64);
    Ok(Condition {
        set: ground.union(&fresh),
        rank,
    })
}

/// Level whose size is exactly `len`, if any.
fn rank_of_size(s: &Scheme, len: usize) -> Result<u64> {
    let mut k = 0;
    loop {
        let mk = s.m(k)?;
        if mk == len as u128 {
            return Ok(k);
        }
        if mk > len as u128 {
            return Err(Error::NotAMember {
                detail: format!("{len} is not a level size"),
            });
        }
        k += 1;
    }
}

/// `p <= q`: p extends q, i.e. q appears in the transported scheme over p.
pub fn leq(s: &Scheme, p: &Condition, q: &Condition) -> Result<bool> {
    s.over_set_is_member(&p.set, &q.set)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum Demand {
    /// Put the ground ordinal `alpha` into the chain.
    Contain { alpha: u64 },
    /// Put the fresh ordinal `beta` into the chain with a ground trace of
    /// the size prescribed at arity parameter `k`.
    Root { beta: u64, k: u64 },
    /// Push the chain's strongest condition to rank at least `k`.
    Rank { k: u64 },
    /// Run the acceptance window scan and log its rows.
    Window {
        delta: u64,
        beta: u64,
        k: u64,
        l_lo: u64,
        l_hi: u64,
        d: Vec<u64>,
        bound: u64,
    },
}

struct Chain {
    conds: Vec<Condition>,
    log: Vec<serde_json::Value>,
}

/// A finitely materialized fragment of the extension process: one scheme on
/// the ground and a demand-driven descending chain of conditions per fresh
/// block. All answers are read off the strongest condition of the relevant
/// chain, so reruns with the same demands are bit-identical.
pub struct Fragment {
    s: Scheme,
    chains: Vec<Chain>,
}

impl Fragment {
    pub fn new(s: Scheme) -> Self {
        Fragment { s, chains: Vec::new() }
    }

    pub fn scheme(&self) -> &Scheme {
        &self.s
    }

    /// Ground boundary of chain `c`: everything below is that chain's base.
    pub fn gamma(&self, chain: usize) -> u64 {
        (chain as u64 + 1) * OMEGA
    }

    /// Number of fresh blocks materialized so far.
    pub fn blocks(&self) -> usize {
        self.chains.len()
    }

    pub fn chain(&self, chain: usize) -> &[Condition] {
        &self.chains[chain].conds
    }

    pub fn strongest(&self, chain: usize) -> &Condition {
        self.chains[chain].conds.last().expect("chains are seeded")
    }

    /// Demand log of one chain, one JSON object per line.
    pub fn log_lines(&self, chain: usize) -> Vec<String> {
        self.chains[chain].log.iter().map(|v| v.to_string()).collect()
    }

    fn m_u64(&self, k: u64) -> Result<u64> {
        let m = self.s.m(k)?;
        u64::try_from(m).map_err(|_| Error::SizeOverflow { level: k })
    }

    fn ensure_chain(&mut self, chain: usize) -> Result<()> {
        if chain as u64 >= MAX_BLOCKS {
            return Err(Error::BadInput(format!(
                "fragment is capped at {MAX_BLOCKS} fresh blocks"
            )));
        }
        while self.chains.len() <= chain {
            let gamma = self.gamma(self.chains.len());
            let seed = Condition {
                set: FinSet::singleton(gamma),
                rank: 0,
            };
            let line = json!({
                "op": "seed",
                "chain": self.chains.len(),
                "result": seed.set.as_slice(),
                "rank": 0,
            });
            self.chains.push(Chain {
                conds: vec![seed],
                log: vec![line],
            });
        }
        Ok(())
    }

    fn push_cond(&mut self, chain: usize, q: Condition, mut line: serde_json::Value) {
        line["result"] = json!(q.set.as_slice());
        line["rank"] = json!(q.rank);
        self.chains[chain].log.push(line);
        self.chains[chain].conds.push(q);
    }

    /// First ground ordinal past the strongest condition's ground part: the
    /// least element of the reduction that is not in the condition itself.
    fn next_ground(&self, chain: usize) -> u64 {
        let gamma = self.gamma(chain);
        self.strongest(chain)
            .ground(gamma)
            .last()
            .map_or(0, |x| x + 1)
    }

    /// Decompose a member of the base universe below `gamma` into its root
    /// and pieces, transporting through the covering chain when the member
    /// is not a plain ground set.
    fn base_decompose(&mut self, gamma: u64, f: &FinSet) -> Result<(FinSet, Vec<FinSet>)> {
        let top = f.last().ok_or_else(|| Error::BadInput("empty member".into()))?;
        if block_of(top) == 0 {
            return self.s.decompose(f);
        }
        debug_assert!(top < gamma);
        let c = block_of(top) as usize - 1;
        let q = self.strongest(c).set.clone();
        let positions = f.positions_in(&q).ok_or_else(|| Error::NotAMember {
            detail: "member escapes the covering chain".into(),
        })?;
        let inner = FinSet::from_sorted(positions.into_iter().map(|i| i as u64).collect());
        let (root, pieces) = self.s.decompose(&inner)?;
        let select = |g: &FinSet| q.select(g.iter().map(|x| x as usize));
        Ok((select(&root), pieces.iter().map(select).collect()))
    }

    /// Closure of `beta` at level `k` inside the materialized universe,
    /// extending the covering chain as needed. Inclusive of `beta`.
    pub fn closure_ext(&mut self, beta: u64, k: u64) -> Result<FinSet> {
        if block_of(beta) == 0 {
            return self.s.closure(beta, k);
        }
        let chain = block_of(beta) as usize - 1;
        self.cover(chain, beta, k)?;
        let q = self.strongest(chain);
        let pos = q.set.index_of(beta).expect("cover puts beta in the chain") as u64;
        let inner = self.s.closure(pos, k)?;
        Ok(q.set.select(inner.iter().map(|x| x as usize)))
    }

    pub fn closure_size_ext(&mut self, beta: u64, k: u64) -> Result<u64> {
        Ok(self.closure_ext(beta, k)?.len() as u64)
    }

    /// Position of `beta` inside any level-`k` member containing it.
    fn low_count(&mut self, beta: u64, k: u64) -> Result<u64> {
        Ok(self.closure_size_ext(beta, k)? - 1)
    }

    /// The metric through the materialized universe: least level whose
    /// closure of the larger point swallows the smaller.
    pub fn rho_ext(&mut self, a: u64, b: u64) -> Result<u64> {
        if a == b {
            return Ok(0);
        }
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        if block_of(hi) == 0 {
            return self.s.rho(lo, hi);
        }
        let chain = block_of(hi) as usize - 1;
        self.cover(chain, hi, 0)?;
        if lo < self.gamma(chain) {
            self.extend_contain(chain, lo)?;
        }
        let q = self.strongest(chain);
        let pa = q.set.index_of(lo).ok_or_else(|| Error::NotAMember {
            detail: "point not covered by the chain".into(),
        })? as u64;
        let pb = q.set.index_of(hi).expect("cover") as u64;
        self.s.rho(pa, pb)
    }

    /// Membership of `x` in the materialized scheme: the size must be a
    /// level size and `x` must be the closure of its own top element.
    pub fn member_of(&mut self, x: &FinSet) -> Result<bool> {
        let Some(top) = x.last() else { return Ok(false) };
        let Ok(j) = rank_of_size(&self.s, x.len()) else {
            return Ok(false);
        };
        Ok(self.closure_ext(top, j)? == *x)
    }

    /// The three condition clauses over the boundary `gamma`: level size,
    /// fresh part an initial run of the block, reduction a member.
    pub fn is_condition(&mut self, p: &FinSet, gamma: u64) -> Result<bool> {
        if gamma % OMEGA != 0 || gamma == 0 {
            return Err(Error::BadInput(format!(
                "{gamma} is not a fresh block boundary"
            )));
        }
        if p.is_empty() || rank_of_size(&self.s, p.len()).is_err() {
            return Ok(false);
        }
        let fresh = p.from_value(gamma);
        if fresh != FinSet::interval(gamma, fresh.len() as u64) {
            return Ok(false);
        }
        let r = red(p, gamma)?;
        self.member_of(&r)
    }

    /// A base member whose first piece contains `a` and whose root is its
    /// intersection with `alpha`. Over the plain ground block this is a
    /// direct computation; over a deeper base it is a scan of the chain
    /// below, which may speculatively extend that chain a bounded number of
    /// times before failing honestly.
    pub fn ih1_witness(&mut self, gamma: u64, a: &FinSet, alpha: u64) -> Result<(u64, FinSet)> {
        if gamma % OMEGA != 0 || gamma == 0 {
            return Err(Error::BadInput(format!(
                "{gamma} is not a fresh block boundary"
            )));
        }
        if let Some(top) = a.last() {
            if top >= gamma {
                return Err(Error::BadInput("witness request escapes the base".into()));
            }
        }
        if gamma == OMEGA {
            return self.ih1_ground(a, alpha);
        }
        let base = block_of(gamma) as usize - 2;
        self.ensure_chain(base)?;
        for x in a.iter() {
            if block_of(x) > 0 {
                self.cover(block_of(x) as usize - 1, x, 1)?;
            }
        }
        let mut grown = 0;
        loop {
            let q = self.strongest(base).clone();
            let within = self.m_u64(q.rank)?;
            for j in 1..=q.rank {
                for inner in self.s.sets_of_rank_within(j, within)? {
                    let e = q.set.select(inner.iter().map(|x| x as usize));
                    let (root, pieces) = self.base_decompose(gamma, &e)?;
                    if a.is_subset_of(&pieces[0]) && e.below(alpha) == root {
                        return Ok((j, e));
                    }
                }
            }
            if grown >= WITNESS_EXTENSIONS {
                return Err(Error::NoWitnessInBudget {
                    detail: format!(
                        "no recorded member over {gamma} holds the requested set with root cut {alpha}"
                    ),
                });
            }
            let k = self.strongest(base).rank + 1;
            match self.extend_rank(base, k) {
                Ok(_) => {}
                Err(Error::LevelTooDeep { .. }) => {
                    return Err(Error::NoWitnessInBudget {
                        detail: format!(
                            "the chain below {gamma} cannot be pushed deep enough within the budget"
                        ),
                    });
                }
                Err(e) => return Err(e),
            }
            grown += 1;
        }
    }

    /// Constructive witness over the plain ground block: the least level
    /// carrying a member whose first piece holds `a` and whose part below
    /// `alpha` is exactly its root, scanned in canonical order within a
    /// window just wide enough to fit the request.
    fn ih1_ground(&mut self, a: &FinSet, alpha: u64) -> Result<(u64, FinSet)> {
        let mut k = 1;
        loop {
            let mk = match self.s.m(k) {
                Ok(v) => v,
                Err(Error::LevelTooDeep { .. }) => {
                    return Err(Error::NoWitnessInBudget {
                        detail: format!(
                            "no ground member below the budget holds the requested set with root cut {alpha}"
                        ),
                    });
                }
                Err(e) => return Err(e),
            };
            let floor = alpha.max(a.last().map_or(0, |top| top + 1));
            let window = floor.saturating_add(mk as u64);
            for f in self.s.sets_of_rank_within(k, window)? {
                let (root, pieces) = self.s.decompose(&f)?;
                if a.is_subset_of(&pieces[0]) && f.below(alpha) == root {
                    return Ok((k, f));
                }
            }
            k += 1;
        }
    }

    /// Make the strongest condition of `chain` contain the base ordinal
    /// `alpha` (which may sit in any block below the chain's boundary).
    pub fn extend_contain(&mut self, chain: usize, alpha: u64) -> Result<Condition> {
        self.ensure_chain(chain)?;
        let gamma = self.gamma(chain);
        if alpha >= gamma {
            return Err(Error::BadInput(format!(
                "contain demand {alpha} is not below the chain base {gamma}"
            )));
        }
        if self.strongest(chain).set.contains(alpha) {
            return Ok(self.strongest(chain).clone());
        }
        self.contain_step(chain, alpha)
    }

    /// One constructive extension step absorbing `alpha`: reduce, ask for a
    /// base member holding the reduction plus `alpha` with the ground part
    /// as its root trace, and cut that member at the start of its second
    /// piece.
    fn contain_step(&mut self, chain: usize, alpha: u64) -> Result<Condition> {
        let gamma = self.gamma(chain);
        let p = self.strongest(chain).clone();
        let r = red(&p.set, gamma)?;
        let xi = self.next_ground(chain);
        let a = r.union(&FinSet::singleton(alpha));
        let (level, f) = self.ih1_witness(gamma, &a, xi)?;
        let (root, pieces) = self.base_decompose(gamma, &f)?;
        let xi1 = pieces[1]
            .minus(&root)
            .first()
            .expect("pieces strictly extend the root");
        let q = cut(&self.s, &f, xi1, gamma)?;
        debug_assert!(leq(&self.s, &q, &p).unwrap_or(false));
        let line = json!({
            "op": "contain",
            "chain": chain,
            "alpha": alpha,
            "witness_level": level,
            "cut_at": xi1,
        });
        self.push_cond(chain, q.clone(), line);
        Ok(q)
    }

    /// Push the chain until its strongest condition has rank at least `k`.
    pub fn extend_rank(&mut self, chain: usize, k: u64) -> Result<Condition> {
        self.ensure_chain(chain)?;
        while self.strongest(chain).rank < k {
            let anchor = self.next_ground(chain).saturating_sub(1);
            self.contain_step(chain, anchor)?;
        }
        Ok(self.strongest(chain).clone())
    }

    /// Make the chain's strongest condition contain the fresh ordinal
    /// `beta`, with a ground trace of exactly the root size one past the
    /// resulting rank. Returns that rank along with the condition.
    pub fn extend_root(&mut self, chain: usize, beta: u64, k: u64) -> Result<(u64, Condition)> {
        self.ensure_chain(chain)?;
        let gamma = self.gamma(chain);
        if block_of(beta) != block_of(gamma) {
            return Err(Error::BadInput(format!(
                "root demand {beta} is not in the chain's fresh block"
            )));
        }
        let p = self.strongest(chain).clone();
        let r = red(&p.set, gamma)?;
        let alpha0 = self.next_ground(chain);
        let s_off = beta - gamma;
        let span = s_off + self.m_u64(k)? + 1;
        let a = r.union(&FinSet::interval(alpha0, span));
        let (level, f) = self.ih1_witness(gamma, &a, alpha0)?;
        let (_, pieces) = self.base_decompose(gamma, &f)?;
        let q = cut(&self.s, &pieces[0], alpha0, gamma)?;
        let kprime = level - 1;
        debug_assert!(q.set.contains(beta));
        debug_assert_eq!(q.ground(gamma).len() as u64, self.s.r(kprime + 1));
        debug_assert!(leq(&self.s, &q, &p).unwrap_or(false));
        let line = json!({
            "op": "root",
            "chain": chain,
            "beta": beta,
            "k": k,
            "witness_level": level,
            "cut_at": alpha0,
        });
        self.push_cond(chain, q.clone(), line);
        Ok((kprime, q))
    }

    /// Ensure the strongest condition of `chain` contains `beta` and has
    /// rank at least `k`.
    fn cover(&mut self, chain: usize, beta: u64, k: u64) -> Result<()> {
        self.ensure_chain(chain)?;
        if !self.strongest(chain).set.contains(beta) {
            if beta >= self.gamma(chain) {
                self.extend_root(chain, beta, 1)?;
            } else {
                self.extend_contain(chain, beta)?;
            }
        }
        if self.strongest(chain).rank < k {
            self.extend_rank(chain, k)?;
        }
        Ok(())
    }

    /// Run a demand list against one chain and return its strongest
    /// condition. Every step is appended to the chain's log.
    pub fn generic_build(&mut self, chain: usize, demands: &[Demand]) -> Result<Condition> {
        self.ensure_chain(chain)?;
        for d in demands {
            match *d {
                Demand::Contain { alpha } => {
                    self.extend_contain(chain, alpha)?;
                }
                Demand::Root { beta, k } => {
                    self.extend_root(chain, beta, k)?;
                }
                Demand::Rank { k } => {
                    self.extend_rank(chain, k)?;
                }
                Demand::Window {
                    delta,
                    beta,
                    k,
                    l_lo,
                    l_hi,
                    ref d,
                    bound,
                } => {
                    let guesses = FinSet::new(d.clone());
                    let t = GoodSequence::trivial(self.low_count(beta, k)?);
                    let rows =
                        self.check_ih2_window(delta, beta, k, &t, l_lo, l_hi, &guesses, bound)?;
                    let line = json!({
                        "op": "window",
                        "chain": chain,
                        "delta": delta,
                        "beta": beta,
                        "k": k,
                        "l_lo": l_lo,
                        "l_hi": l_hi,
                        "d": d,
                        "bound": bound,
                        "rows": serde_json::to_value(&rows)?,
                    });
                    self.chains[chain].log.push(line);
                }
            }
        }
        Ok(self.strongest(chain).clone())
    }

    /// Replay one demand-log line, checking that the replayed step lands on
    /// the recorded result.
    pub fn replay_line(&mut self, line: &str) -> Result<()> {
        let v: serde_json::Value = serde_json::from_str(line)?;
        let op = v["op"].as_str().unwrap_or_default().to_string();
        let chain = v["chain"].as_u64().unwrap_or_default() as usize;
        let u = |key: &str| v[key].as_u64().unwrap_or_default();
        match op.as_str() {
            "seed" => self.ensure_chain(chain)?,
            "contain" => {
                // every logged line is one contain_step; extend_contain
                // would skip steps whose alpha is already absorbed
                self.ensure_chain(chain)?;
                let alpha = u("alpha");
                if alpha >= self.gamma(chain) {
                    return Err(Error::BadInput(format!(
                        "contain demand {alpha} is not below the chain base"
                    )));
                }
                self.contain_step(chain, alpha)?;
            }
            "root" => {
                self.extend_root(chain, u("beta"), u("k"))?;
            }
            "window" => {
                let d: Vec<u64> = v["d"]
                    .as_array()
                    .map(|a| a.iter().filter_map(|x| x.as_u64()).collect())
                    .unwrap_or_default();
                let guesses = FinSet::new(d);
                let t = GoodSequence::trivial(self.low_count(u("beta"), u("k"))?);
                let rows = self.check_ih2_window(
                    u("delta"),
                    u("beta"),
                    u("k"),
                    &t,
                    u("l_lo"),
                    u("l_hi"),
                    &guesses,
                    u("bound"),
                )?;
                if serde_json::to_value(&rows)? != v["rows"] {
                    return Err(Error::BadInput("window replay diverged".into()));
                }
                self.chains[chain].log.push(v);
                return Ok(());
            }
            other => {
                return Err(Error::BadInput(format!("unknown log op {other:?}")));
            }
        }
        if let Some(expect) = v["result"].as_array() {
            let got = self.strongest(chain).set.as_slice();
            let want: Vec<u64> = expect.iter().filter_map(|x| x.as_u64()).collect();
            if got != want.as_slice() {
                return Err(Error::BadInput("replay diverged from the log".into()));
            }
        }
        Ok(())
    }
}

/// A sequence of position intervals, each strictly above the one before.
/// Intervals are inclusive pairs.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BlockSequence {
    parts: Vec<(u64, u64)>,
}

impl BlockSequence {
    pub fn new(parts: Vec<(u64, u64)>) -> Result<Self> {
        for (i, &(lo, hi)) in parts.iter().enumerate() {
            if lo > hi {
                return Err(Error::BadInput(format!("interval ({lo},{hi}) is empty")));
            }
            if i > 0 && parts[i - 1].1 >= lo {
                return Err(Error::BadInput(
                    "intervals must be strictly increasing blockwise".into(),
                ));
            }
        }
        Ok(BlockSequence { parts })
    }

    pub fn empty() -> Self {
        BlockSequence { parts: Vec::new() }
    }

    pub fn parts(&self) -> &[(u64, u64)] {
        &self.parts
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn min_pos(&self) -> Option<u64> {
        self.parts.first().map(|&(lo, _)| lo)
    }

    pub fn max_pos(&self) -> Option<u64> {
        self.parts.last().map(|&(_, hi)| hi)
    }
}

/// A family of block sequences, each tagged with an anchor position at or
/// above everything the sequence mentions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoodSequence {
    pub entries: Vec<(BlockSequence, u64)>,
}

impl GoodSequence {
    /// The one-entry family with no intervals, anchored at `t` itself.
    pub fn trivial(t: u64) -> Self {
        GoodSequence {
            entries: vec![(BlockSequence::empty(), t)],
        }
    }

    /// Validity over the window `[t, mk)`: every anchor lies in the window,
    /// every interval lies strictly between `t` and `mk`, and no interval
    /// reaches past its anchor.
    pub fn validate(&self, t: u64, mk: u64) -> Result<()> {
        for (bs, z) in &self.entries {
            if *z < t || *z >= mk {
                return Err(Error::BadInput(format!(
                    "anchor {z} escapes the window [{t},{mk})"
                )));
            }
            if let (Some(lo), Some(hi)) = (bs.min_pos(), bs.max_pos()) {
                if lo <= t || hi >= mk || hi > *z {
                    return Err(Error::BadInput(format!(
                        "intervals ({lo},{hi}) escape the window above {t} or the anchor {z}"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// All valid entries over the window `[t, mk)` with at most two intervals.
/// Used by small verification grids; intentionally exhaustive.
pub fn good_entries(t: u64, mk: u64) -> Vec<(BlockSequence, u64)> {
    let mut out = Vec::new();
    for z in t..mk {
        out.push((BlockSequence::empty(), z));
    }
    for lo in t + 1..mk {
        for hi in lo..mk {
            for z in hi..mk {
                let bs = BlockSequence::new(vec![(lo, hi)]).unwrap();
                out.push((bs, z));
                for lo2 in hi + 1..mk {
                    for hi2 in lo2..mk {
                        for z2 in hi2..mk {
                            let bs2 = BlockSequence::new(vec![(lo, hi), (lo2, hi2)]).unwrap();
                            out.push((bs2, z2));
                        }
                    }
                }
            }
        }
    }
    out
}

/// Images of one block sequence under the level map: each interval of
/// positions in the level-`k` closure of `xi` is sent to the positions its
/// elements occupy at level `l`.
#[derive(Clone, Debug, Serialize)]
pub struct Projection {
    pub parts: Vec<FinSet>,
    pub intervals: Vec<bool>,
}

impl Fragment {
    pub fn projection(
        &mut self,
        xi: u64,
        k: u64,
        l: u64,
        iseq: &BlockSequence,
    ) -> Result<Projection> {
        if k >= l {
            return Err(Error::BadInput(format!("projection needs k < l, got {k} >= {l}")));
        }
        let cl_k = self.closure_ext(xi, k)?;
        let cap = cl_k.len() as u64 - 1;
        if let Some(mx) = iseq.max_pos() {
            if mx > cap {
                return Err(Error::BoundViolation {
                    detail: format!("interval top {mx} exceeds the closure width {cap}"),
                });
            }
        }
        let mut parts = Vec::new();
        let mut intervals = Vec::new();
        for &(lo, hi) in iseq.parts() {
            let mut vals = Vec::new();
            for pos in lo..=hi {
                let el = cl_k.at(pos as usize);
                vals.push(self.low_count(el, l)?);
            }
            let fs = FinSet::new(vals);
            let iv = fs.last().unwrap() - fs.first().unwrap() + 1 == fs.len() as u64;
            parts.push(fs);
            intervals.push(iv);
        }
        Ok(Projection { parts, intervals })
    }

    /// Index of the first entry of `t` under which the pair passes all four
    /// clauses: the level profile comparison, the anchor equation, the
    /// projected intervals landing as intervals, and the pivot landing in
    /// the lower closure.
    pub fn checkmark(
        &mut self,
        beta: u64,
        xi: u64,
        k: u64,
        l: u64,
        t: &GoodSequence,
    ) -> Result<Option<usize>> {
        if k >= l {
            return Err(Error::BadInput(format!("checkmark needs k < l, got {k} >= {l}")));
        }
        let t_val = self.low_count(beta, k)?;
        t.validate(t_val, self.m_u64(k)?)?;
        let len_b = self.closure_size_ext(beta, l)?;
        let len_xi = self.closure_size_ext(xi, l)?;
        if len_b > len_xi {
            return Ok(None);
        }
        let cl_xi_l = self.closure_ext(xi, l)?;
        let pivot = cl_xi_l.at((len_b - 1) as usize);
        if !self.closure_ext(xi, k)?.contains(pivot) {
            return Ok(None);
        }
        let cap = self.low_count(xi, k)?;
        let ml = self.s.m(l)?;
        'entry: for (idx, (bs, z)) in t.entries.iter().enumerate() {
            if *z != cap {
                continue;
            }
            let proj = self.projection(xi, k, l, bs)?;
            for (part, iv) in proj.parts.iter().zip(&proj.intervals) {
                if !iv || part.last().map_or(false, |hi| hi as u128 >= ml) {
                    continue 'entry;
                }
            }
            return Ok(Some(idx));
        }
        Ok(None)
    }

    /// Positions of the elements of `x` inside the covering condition of
    /// its top block, for transporting capture questions to the ground.
    fn ground_positions(&mut self, x: &FinSet) -> Result<Option<FinSet>> {
        let top = x.last().ok_or_else(|| Error::BadInput("empty set".into()))?;
        if block_of(top) == 0 {
            return Ok(Some(x.clone()));
        }
        let chain = block_of(top) as usize - 1;
        self.cover(chain, top, 0)?;
        let q = &self.strongest(chain).set;
        Ok(x.positions_in(q)
            .map(|ps| FinSet::from_sorted(ps.into_iter().map(|i| i as u64).collect())))
    }

    /// Whether the member `g` spreads the tuple `c` across its pieces, with
    /// each point escaping the root and the piece maps matching them up.
    fn member_captures(&mut self, g: &FinSet, c: &FinSet) -> Result<bool> {
        let Some(gp) = self.ground_positions(g)? else {
            return Ok(false);
        };
        let q = if block_of(g.last().unwrap()) == 0 {
            None
        } else {
            Some(self.strongest(block_of(g.last().unwrap()) as usize - 1).set.clone())
        };
        let mut family = Vec::new();
        for x in c.iter() {
            let pos = match &q {
                None => {
                    if block_of(x) != 0 {
                        return Ok(false);
                    }
                    x
                }
                Some(qs) => match qs.index_of(x) {
                    Some(i) => i as u64,
                    None => return Ok(false),
                },
            };
            family.push(FinSet::singleton(pos));
        }
        capture::captures(&self.s, &gp, &family)
    }

    /// Root of a materialized member, in universe coordinates.
    fn member_root(&mut self, g: &FinSet) -> Result<FinSet> {
        let top = g.last().ok_or_else(|| Error::BadInput("empty member".into()))?;
        if block_of(top) == 0 {
            return Ok(self.s.decompose(g)?.0);
        }
        let chain = block_of(top) as usize - 1;
        self.cover(chain, top, 0)?;
        let q = self.strongest(chain).set.clone();
        let positions = g.positions_in(&q).ok_or_else(|| Error::NotAMember {
            detail: "member escapes the covering chain".into(),
        })?;
        let inner = FinSet::from_sorted(positions.into_iter().map(|i| i as u64).collect());
        let root = self.s.decompose(&inner)?.0;
        Ok(q.select(root.iter().map(|x| x as usize)))
    }

    /// Acceptance of the tuple `c` with the member `g`: `g` captures `c`,
    /// the checkmark holds one level down against the least point of `c`,
    /// and the trace of `beta` one level down meets `delta` exactly in the
    /// root of `g`.
    pub fn accepted(
        &mut self,
        c: &FinSet,
        g: &FinSet,
        k: u64,
        l: u64,
        beta: u64,
        delta: u64,
        t: &GoodSequence,
    ) -> Result<bool> {
        if l < k + 2 {
            return Err(Error::BadInput(format!(
                "acceptance needs l >= k + 2, got k = {k}, l = {l}"
            )));
        }
        let c0 = c.first().ok_or_else(|| Error::BadInput("empty tuple".into()))?;
        if !self.member_captures(g, c)? {
            return Ok(false);
        }
        if self.checkmark(beta, c0, k, l - 1, t)?.is_none() {
            return Ok(false);
        }
        let trace = self.closure_ext(beta, l - 1)?.below(delta);
        Ok(trace == self.member_root(g)?)
    }

    /// Rank-`l` members of the materialized scheme lying below `delta`,
    /// with ground members scanned up to `bound`.
    fn members_below(&mut self, l: u64, delta: u64, bound: u64) -> Result<Vec<FinSet>> {
        let mut out = self.s.sets_of_rank_within(l, bound.min(delta))?;
        for chain in 0..self.chains.len() {
            let block = chain as u64 + 1;
            if block * OMEGA >= delta {
                break;
            }
            let q = self.strongest(chain).clone();
            let within = self.m_u64(q.rank)?;
            for inner in self.s.sets_of_rank_within(l, within)? {
                let cand = q.set.select(inner.iter().map(|x| x as usize));
                let top = cand.last().unwrap();
                if block_of(top) == block && top < delta {
                    out.push(cand);
                }
            }
        }
        Ok(out)
    }

    /// The largest tuple size from the guess set `d` accepted with some
    /// member below `delta`, scanning members up to `bound`.
    pub fn j_value(
        &mut self,
        k: u64,
        l: u64,
        beta: u64,
        delta: u64,
        d: &FinSet,
        t: &GoodSequence,
        bound: u64,
    ) -> Result<u64> {
        let candidates = self.members_below(l, delta, bound)?;
        let top = self.s.n(l).min(d.len() as u64);
        for j in (1..=top).rev() {
            let combos = combinations(d.len(), j as usize);
            let work = candidates.len() as u128 * combos.len() as u128;
            if work > SCAN_CAP {
                return Err(Error::ScanBudgetExceeded {
                    detail: format!("acceptance scan at tuple size {j} needs {work} checks"),
                });
            }
            for combo in &combos {
                let c = d.select(combo.iter().copied());
                for g in &candidates {
                    if self.accepted(&c, g, k, l, beta, delta, t)? {
                        return Ok(j);
                    }
                }
            }
        }
        Ok(0)
    }

    /// Transport table: rewrite an interval family anchored at the level-`k`
    /// trace of `beta` into one anchored at the level-`kp` trace of `alpha`,
    /// routing each entry through every ground member of rank `k` inside the
    /// level-`kp` window that holds the trace position of `beta` and maps
    /// the entry's intervals onto intervals. First writer wins on collisions.
    pub fn trans(
        &mut self,
        k: u64,
        kp: u64,
        alpha: u64,
        beta: u64,
        t: &GoodSequence,
    ) -> Result<GoodSequence> {
        if k < 2 || kp <= k {
            return Err(Error::BadInput(format!(
                "transport needs 2 <= k < k', got k = {k}, k' = {kp}"
            )));
        }
        if alpha >= beta {
            return Err(Error::BadInput("transport needs alpha < beta".into()));
        }
        let cl = self.closure_ext(beta, kp)?;
        if !cl.contains(alpha) {
            return Err(Error::BadInput(
                "transport needs alpha inside the upper trace of beta".into(),
            ));
        }
        let t_val = self.low_count(beta, k)?;
        t.validate(t_val, self.m_u64(k)?)?;
        let a_pos = cl.count_below(alpha) as u64;
        let b_pos = cl.len() as u64 - 1;
        let mkp = self.m_u64(kp)?;
        let mut table: BTreeMap<Vec<(u64, u64)>, u64> = BTreeMap::new();
        for g in self.s.sets_of_rank_within(k, mkp)? {
            if !g.contains(b_pos) {
                continue;
            }
            'entry: for (bs, z) in &t.entries {
                let mut parts = vec![(a_pos + 1, b_pos)];
                for &(lo, hi) in bs.parts() {
                    let img = g.select((lo as usize)..=(hi as usize));
                    let (ilo, ihi) = (img.first().unwrap(), img.last().unwrap());
                    if ihi - ilo + 1 != img.len() as u64 {
                        continue 'entry;
                    }
                    parts.push((ilo, ihi));
                }
                let Ok(bsq) = BlockSequence::new(parts) else {
                    continue;
                };
                let zq = g.at(*z as usize);
                table.entry(bsq.parts().to_vec()).or_insert(zq);
            }
        }
        let out = GoodSequence {
            entries: table
                .into_iter()
                .map(|(parts, z)| (BlockSequence { parts }, z))
                .collect(),
        };
        debug_assert!(out.validate(a_pos, mkp).is_ok());
        Ok(out)
    }

    /// One equivalence probe: `None` when the side hypotheses fail, else
    /// whether the transported table answers at `(alpha, kp)` exactly as
    /// the original at `(beta, k)`, paired as (transported, original).
    pub fn trans_equiv_probe(
        &mut self,
        k: u64,
        kp: u64,
        alpha: u64,
        beta: u64,
        xi: u64,
        l: u64,
        t: &GoodSequence,
    ) -> Result<Option<(bool, bool)>> {
        if l <= kp {
            return Ok(None);
        }
        let len_b = self.closure_size_ext(beta, l)?;
        if len_b > self.closure_size_ext(xi, l)? {
            return Ok(None);
        }
        let pivot = self.closure_ext(xi, l)?.at((len_b - 1) as usize);
        if !self.closure_ext(xi, kp)?.contains(pivot) {
            return Ok(None);
        }
        let cl_kp = self.closure_ext(beta, kp)?;
        let a_pos = cl_kp.count_below(alpha);
        let b_pos = cl_kp.len() - 1;
        let cl_l = self.closure_ext(beta, l)?;
        let mut run = Vec::new();
        for pos in a_pos + 1..=b_pos {
            let el = cl_kp.at(pos);
            match cl_l.index_of(el) {
                Some(i) => run.push(i as u64),
                None => return Ok(None),
            }
        }
        if run.is_empty() || run[run.len() - 1] - run[0] + 1 != run.len() as u64 {
            return Ok(None);
        }
        let tp = self.trans(k, kp, alpha, beta, t)?;
        let lhs = self.checkmark(alpha, xi, kp, l, &tp)?.is_some();
        let rhs = self.checkmark(beta, xi, k, l, t)?.is_some();
        Ok(Some((lhs, rhs)))
    }
}

/// Outcome of an equivalence sweep over a grid of transport probes.
#[derive(Clone, Debug, Default, Serialize)]
pub struct TransReport {
    pub checked: u64,
    pub skipped: u64,
    pub positive: u64,
    pub mismatches: Vec<String>,
}

/// Sweep the transport equivalence over all points of the given windows:
/// for each `beta`, every `alpha` inside its upper trace, every `xi`, every
/// level in `ls`, and every at-most-two-interval family over the lower
/// trace width of `beta`.
pub fn verify_trans_equiv(
    frag: &mut Fragment,
    k: u64,
    kp: u64,
    ls: &[u64],
    betas: &[u64],
    xis: &[u64],
) -> Result<TransReport> {
    let mut report = TransReport::default();
    let mk = u64::try_from(frag.scheme().m(k)?).unwrap_or(u64::MAX);
    for &beta in betas {
        let cl = frag.closure_ext(beta, kp)?;
        let t_val = frag.low_count(beta, k)?;
        let entries = good_entries(t_val, mk);
        let mut ts: Vec<GoodSequence> = vec![GoodSequence::trivial(t_val)];
        ts.extend(entries.iter().map(|e| GoodSequence {
            entries: vec![e.clone()],
        }));
        if entries.len() > 1 {
            ts.push(GoodSequence { entries });
        }
        for alpha in cl.iter() {
            if alpha >= beta {
                continue;
            }
            for &xi in xis {
                for &l in ls {
                    for t in &ts {
                        match frag.trans_equiv_probe(k, kp, alpha, beta, xi, l, t)? {
                            None => report.skipped += 1,
                            Some((lhs, rhs)) => {
                                report.checked += 1;
                                if lhs {
                                    report.positive += 1;
                                }
                                if lhs != rhs {
                                    report.mismatches.push(format!(
                                        "k={k} k'={kp} l={l} alpha={alpha} beta={beta} xi={xi} \
                                         t={t:?}: transported={lhs} original={rhs}"
                                    ));
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(report)
}

/// One row of the acceptance window report.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Ih2Row {
    pub l: u64,
    pub root_trace_exact: bool,
    pub no_full_capture: bool,
    pub j: u64,
    pub witness_ok: bool,
}

impl Fragment {
    /// Whether some tuple of size equal to the branching at `l`, drawn from
    /// `d`, is captured by a member below `delta`.
    fn full_capture_exists(
        &mut self,
        l: u64,
        delta: u64,
        d: &FinSet,
        bound: u64,
    ) -> Result<bool> {
        let need = self.s.n(l) as usize;
        if d.len() < need {
            return Ok(false);
        }
        let candidates = self.members_below(l, delta, bound)?;
        let combos = combinations(d.len(), need);
        let work = candidates.len() as u128 * combos.len() as u128;
        if work > SCAN_CAP {
            return Err(Error::ScanBudgetExceeded {
                detail: format!("full-capture scan needs {work} checks"),
            });
        }
        for combo in &combos {
            let c = d.select(combo.iter().copied());
            for g in &candidates {
                if self.member_captures(g, &c)? {
                    return Ok(true);
                }
            }
        }
        Ok(false)
    }

    /// Whether the computed `j` is witnessed: a zero must come with a
    /// member placing `beta` in its first piece off the root, a positive
    /// value with an accepted tuple whose member holds `beta` in the piece
    /// with that index.
    fn j_witnessed(
        &mut self,
        k: u64,
        l: u64,
        beta: u64,
        delta: u64,
        d: &FinSet,
        t: &GoodSequence,
        j: u64,
    ) -> Result<bool> {
        let pos = self.low_count(beta, l)?;
        if j == 0 {
            let r = self.s.r(l);
            let prev = self.s.m(l - 1)?;
            return Ok(pos >= r && (pos as u128) < prev);
        }
        let chain = if block_of(beta) == 0 {
            None
        } else {
            Some(block_of(beta) as usize - 1)
        };
        let Some(chain) = chain else {
            return Ok(false);
        };
        self.cover(chain, beta, l)?;
        let q = self.strongest(chain).clone();
        let bpos = q.set.index_of(beta).unwrap() as u64;
        let within = self.m_u64(q.rank)?;
        let combos = combinations(d.len(), j as usize);
        for inner in self.s.sets_of_rank_within(l, within)? {
            if !inner.contains(bpos) {
                continue;
            }
            let (_, pieces) = self.s.decompose(&inner)?;
            if !pieces[j as usize].contains(bpos) {
                continue;
            }
            let g = q.set.select(inner.iter().map(|x| x as usize));
            for combo in &combos {
                let c = d.select(combo.iter().copied());
                if self.accepted(&c, &g, k, l, beta, delta, t)? {
                    return Ok(true);
                }
            }
        }
        Ok(false)
    }

    /// Acceptance window scan: for each level in the window, report the
    /// exactness of the root trace at the boundary, the absence of a fully
    /// spread tuple from the guess set, the acceptance count, and whether
    /// that count is witnessed inside the materialized universe.
    pub fn check_ih2_window(
        &mut self,
        delta: u64,
        beta: u64,
        k: u64,
        t: &GoodSequence,
        l_lo: u64,
        l_hi: u64,
        d: &FinSet,
        bound: u64,
    ) -> Result<Vec<Ih2Row>> {
        if self.chains.is_empty() {
            return Ok(Vec::new());
        }
        if delta % OMEGA != 0 || delta == 0 || beta < delta {
            return Err(Error::BadInput(
                "window scan needs a block boundary delta <= beta".into(),
            ));
        }
        let mut rows = Vec::new();
        for l in l_lo..=l_hi {
            if l < k + 2 {
                continue;
            }
            let trace = self.closure_ext(beta, l - 1)?.below(delta);
            let root_trace_exact = trace.len() as u64 == self.s.r(l);
            let no_full_capture = !self.full_capture_exists(l, delta, d, bound)?;
            let j = self.j_value(k, l, beta, delta, d, t, bound)?;
            let witness_ok = self.j_witnessed(k, l, beta, delta, d, t, j)?;
            rows.push(Ih2Row {
                l,
                root_trace_exact,
                no_full_capture,
                j,
                witness_ok,
            });
        }
        Ok(rows)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ord::ext;
    use crate::types::TypeSpec;

    fn binary() -> Scheme {
        Scheme::new(TypeSpec::binary())
    }

    fn frag() -> Fragment {
        Fragment::new(binary())
    }

    #[test]
    fn reduction_slides_the_fresh_tail_down() {
        let p = FinSet::new(vec![0, ext(1, 0), ext(1, 1)]);
        assert_eq!(red(&p, OMEGA).unwrap(), FinSet::new(vec![0, 1, 2]));

        let q = FinSet::new(vec![1, 4, 5]);
        assert_eq!(red(&q, OMEGA).unwrap(), q);

        let fresh = FinSet::new(vec![ext(1, 0), ext(1, 1)]);
        assert_eq!(red(&fresh, OMEGA).unwrap(), FinSet::new(vec![0, 1]));

        assert!(red(&FinSet::empty(), OMEGA).is_err());
    }

    #[test]
    fn cut_lifts_tails_onto_the_fresh_block() {
        let s = binary();
        let f = FinSet::new(vec![0, 1, 2]);
        let q = cut(&s, &f, 1, OMEGA).unwrap();
        assert_eq!(q.set(), &FinSet::new(vec![0, ext(1, 0), ext(1, 1)]));
        assert_eq!(q.rank(), 2);

        let whole = cut(&s, &f, 0, OMEGA).unwrap();
        assert_eq!(
            whole.set(),
            &FinSet::new(vec![ext(1, 0), ext(1, 1), ext(1, 2)])
        );

        assert!(cut(&s, &f, 5, OMEGA).is_err());
        assert!(cut(&s, &FinSet::new(vec![0, 1, 2, 3]), 1, OMEGA).is_err());
    }

    #[test]
    fn cut_round_trips_through_the_condition_clauses() {
        let s = binary();
        let mut fr = frag();
        let m3 = 6;
        for k in 0..=3u64 {
            for f in s.sets_of_rank_within(k, m3).unwrap() {
                for alpha in f.iter() {
                    let q = cut(&s, &f, alpha, OMEGA).unwrap();
                    assert!(
                        fr.is_condition(q.set(), OMEGA).unwrap(),
                        "cut of {f:?} at {alpha} fails the clauses"
                    );
                }
            }
        }
        // fresh part not an initial run
        let bad = FinSet::new(vec![0, ext(1, 1)]);
        assert!(!fr.is_condition(&bad, OMEGA).unwrap());
        // size is not a level size
        let bad = FinSet::new(vec![0, 1, 2, ext(1, 0)]);
        assert!(!fr.is_condition(&bad, OMEGA).unwrap());
        // reduction is not a member
        let bad = FinSet::new(vec![1, ext(1, 0)]);
        assert!(!fr.is_condition(&bad, OMEGA).unwrap());
    }

    #[test]
    fn cuts_of_wider_members_refine_cuts_of_narrower_ones() {
        let s = binary();
        let m4 = 10;
        for k in 1..=2u64 {
            for f in s.sets_of_rank_within(k, 6).unwrap() {
                for alpha in f.iter() {
                    let p = cut(&s, &f, alpha, OMEGA).unwrap();
                    for kk in k..=3u64 {
                        for g in s.sets_of_rank_within(kk, m4).unwrap() {
                            if !g.contains(alpha) {
                                continue;
                            }
                            let q = cut(&s, &g, alpha, OMEGA).unwrap();
                            assert!(
                                leq(&s, &q, &p).unwrap(),
                                "cut of {g:?} at {alpha} does not refine cut of {f:?}"
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn ground_witnesses_are_least_full_intervals() {
        let mut fr = frag();
        let (k, f) = fr.ih1_witness(OMEGA, &FinSet::new(vec![0, 1]), 1).unwrap();
        assert_eq!(k, 2);
        assert_eq!(f, FinSet::interval(0, 3));

        let (k, f) = fr.ih1_witness(OMEGA, &FinSet::empty(), 0).unwrap();
        assert_eq!(k, 1);
        assert_eq!(f, FinSet::interval(0, 2));

        // root trace and coverage postconditions on a small grid
        for alpha in 0..3u64 {
            for top in 0..5u64 {
                let a = FinSet::new((0..=top).collect());
                let (k, f) = fr.ih1_witness(OMEGA, &a, alpha).unwrap();
                let (root, pieces) = fr.scheme().decompose(&f).unwrap();
                assert!(a.is_subset_of(&pieces[0]));
                assert_eq!(f.below(alpha), root);
                assert_eq!(root.len() as u64, fr.scheme().r(k));
            }
        }
    }

    #[test]
    fn contain_demands_extend_the_chain_downward() {
        let mut fr = frag();
        let mut prev: Option<Condition> = None;
        for alpha in [5u64, 0, 17] {
            let q = fr.extend_contain(0, alpha).unwrap();
            assert!(q.set().contains(alpha));
            assert!(fr.is_condition(q.set(), OMEGA).unwrap());
            if let Some(p) = prev {
                assert!(leq(fr.scheme(), &q, &p).unwrap());
            }
            prev = Some(q);
        }
        // determinism: the same demands rebuild the same chain
        let mut fr2 = frag();
        for alpha in [5u64, 0, 17] {
            fr2.extend_contain(0, alpha).unwrap();
        }
        assert_eq!(fr.log_lines(0), fr2.log_lines(0));
    }

    #[test]
    fn root_demands_meet_the_prescribed_trace_size() {
        let mut fr = frag();
        let beta = ext(1, 3);
        let (kp, q) = fr.extend_root(0, beta, 2).unwrap();
        assert!(q.set().contains(beta));
        assert_eq!(
            q.ground(OMEGA).len() as u64,
            fr.scheme().r(kp + 1),
            "ground trace must have the root size one past the rank"
        );
        assert_eq!(q.rank(), kp);
        let p = fr.chain(0)[fr.chain(0).len() - 2].clone();
        assert!(leq(fr.scheme(), &q, &p).unwrap());
    }

    #[test]
    fn fragment_closures_agree_with_the_ground_and_cohere() {
        let mut fr = frag();
        fr.generic_build(
            0,
            &[
                Demand::Root { beta: ext(1, 2), k: 1 },
                Demand::Contain { alpha: 4 },
                Demand::Rank { k: 4 },
            ],
        )
        .unwrap();
        let s = binary();
        for beta in 0..15u64 {
            for k in 0..=4u64 {
                assert_eq!(fr.closure_ext(beta, k).unwrap(), s.closure(beta, k).unwrap());
            }
        }
        // initial-segment coherence inside the fresh block
        let pts: Vec<u64> = (0..3).map(|i| ext(1, i)).collect();
        for &b in &pts {
            for k in 0..=4u64 {
                let cb = fr.closure_ext(b, k).unwrap();
                for a in cb.iter() {
                    let ca = fr.closure_ext(a, k).unwrap();
                    assert_eq!(ca, cb.below(a + 1), "trace of {a} inside trace of {b}");
                }
            }
        }
        // the metric agrees with the least-level oracle
        for &a in &pts {
            for b in 0..6u64 {
                let r = fr.rho_ext(b, a).unwrap();
                let mut k = 0;
                while !fr.closure_ext(a, k).unwrap().contains(b) {
                    k += 1;
                }
                assert_eq!(r, k);
                assert_eq!(r, fr.rho_ext(a, b).unwrap());
            }
        }
    }

    #[test]
    fn membership_matches_the_ground_scheme_on_ground_sets() {
        let s = binary();
        let mut fr = frag();
        for mask in 1u32..128 {
            let x = FinSet::new((0u64..7).filter(|i| mask >> i & 1 == 1).collect());
            assert_eq!(fr.member_of(&x).unwrap(), s.is_member(&x), "{x:?}");
        }
    }

    #[test]
    fn projections_map_position_runs_between_levels() {
        let mut fr = frag();
        // trace of 5 at level 3 in the binary scheme
        let cl = fr.closure_ext(5, 3).unwrap();
        assert!(cl.len() >= 2);
        let bs = BlockSequence::new(vec![(1, cl.len() as u64 - 1)]).unwrap();
        let proj = fr.projection(5, 3, 4, &bs).unwrap();
        assert_eq!(proj.parts.len(), 1);
        // projected positions are the level-4 positions of the same points
        let cl4 = fr.closure_ext(5, 4).unwrap();
        let expect: Vec<u64> = cl
            .iter()
            .skip(1)
            .map(|el| cl4.index_of(el).unwrap() as u64)
            .collect();
        assert_eq!(proj.parts[0], FinSet::new(expect));

        let wide = BlockSequence::new(vec![(1, 40)]).unwrap();
        assert!(matches!(
            fr.projection(5, 3, 4, &wide),
            Err(Error::BoundViolation { .. })
        ));
        assert!(fr.projection(5, 4, 3, &bs).is_err());
    }

    #[test]
    fn every_point_checks_against_itself_under_the_trivial_family() {
        let mut fr = frag();
        fr.extend_rank(0, 5).unwrap();
        let mut pts: Vec<u64> = (1..12).collect();
        pts.extend((0..3).map(|i| ext(1, i)));
        for &b in &pts {
            for k in 1..=2u64 {
                for l in (k + 1)..=4 {
                    let t = GoodSequence::trivial(fr.low_count(b, k).unwrap());
                    assert_eq!(
                        fr.checkmark(b, b, k, l, &t).unwrap(),
                        Some(0),
                        "self pair at beta={b} k={k} l={l}"
                    );
                }
            }
        }
    }

    #[test]
    fn checkmark_depends_only_on_the_level_profiles() {
        let mut fr = frag();
        let k = 2u64;
        let l = 4u64;
        let mut seen: BTreeMap<(u64, u64, bool), bool> = BTreeMap::new();
        for beta in 4..20u64 {
            for xi in 4..20u64 {
                let t = GoodSequence::trivial(fr.low_count(beta, k).unwrap());
                let got = fr.checkmark(beta, xi, k, l, &t).unwrap().is_some();
                // the profile: both level-l widths plus the pivot clause,
                // which the remark allows as part of the trace data
                let pb = fr.closure_size_ext(beta, l).unwrap();
                let px = fr.closure_size_ext(xi, l).unwrap();
                let pivot = if pb <= px {
                    let el = fr.closure_ext(xi, l).unwrap().at((pb - 1) as usize);
                    fr.closure_ext(xi, k).unwrap().contains(el)
                        && fr.low_count(xi, k).unwrap() == fr.low_count(beta, k).unwrap()
                } else {
                    false
                };
                if let Some(prev) = seen.insert((pb, px, pivot), got) {
                    assert_eq!(prev, got, "profile ({pb},{px},{pivot}) answered twice");
                }
            }
        }
    }

    #[test]
    fn transport_tables_are_good_and_deterministic() {
        let mut fr = frag();
        let beta = 9u64;
        let cl = fr.closure_ext(beta, 3).unwrap();
        let alpha = cl.at(cl.len() - 2);
        let t_val = fr.low_count(beta, 2).unwrap();
        let mk = 3u64;
        for entry in good_entries(t_val, mk) {
            let t = GoodSequence { entries: vec![entry] };
            let tp = fr.trans(2, 3, alpha, beta, &t).unwrap();
            let a_pos = cl.count_below(alpha) as u64;
            tp.validate(a_pos, 6).unwrap();
            let again = fr.trans(2, 3, alpha, beta, &t).unwrap();
            assert_eq!(tp, again);
        }
        assert!(fr.trans(1, 3, alpha, beta, &GoodSequence::trivial(t_val)).is_err());
        assert!(fr.trans(2, 3, beta, beta, &GoodSequence::trivial(t_val)).is_err());
    }

    #[test]
    fn transport_preserves_the_checkmark_on_a_small_grid() {
        let mut fr = frag();
        fr.generic_build(
            0,
            &[Demand::Root { beta: ext(1, 1), k: 2 }, Demand::Rank { k: 6 }],
        )
        .unwrap();
        let mut betas: Vec<u64> = (6..14).collect();
        betas.extend([ext(1, 0), ext(1, 1)]);
        let mut xis: Vec<u64> = (4..16).collect();
        xis.push(ext(1, 0));
        let report = verify_trans_equiv(&mut fr, 2, 3, &[4, 5], &betas, &xis).unwrap();
        assert!(
            report.mismatches.is_empty(),
            "transport mismatches: {:?}",
            report.mismatches
        );
        assert!(report.checked >= 50, "only {} probes ran", report.checked);
        assert!(report.positive >= 1, "grid never produced a positive pair");
    }

    #[test]
    fn acceptance_has_a_constructive_instance_after_a_root_demand() {
        let mut fr = frag();
        let beta = ext(1, 0);
        let (kp, _) = fr.extend_root(0, beta, 1).unwrap();
        assert_eq!(kp, 2);
        let l = kp + 1;
        let rl = fr.scheme().r(l);
        let g = FinSet::interval(0, 6);
        let t = GoodSequence::trivial(fr.low_count(beta, 1).unwrap());
        let c = FinSet::singleton(rl);
        assert!(fr.accepted(&c, &g, 1, l, beta, OMEGA, &t).unwrap());
        let d = FinSet::new(vec![rl, rl + 1]);
        let j = fr.j_value(1, l, beta, OMEGA, &d, &t, 6).unwrap();
        assert!(j >= 1, "constructive instance was not found by the scan");
        assert_eq!(fr.j_value(1, l, beta, OMEGA, &FinSet::empty(), &t, 6).unwrap(), 0);
    }

    #[test]
    fn window_reports_are_vacuous_on_the_ground_and_sound_above() {
        let mut fr = frag();
        assert!(fr
            .check_ih2_window(OMEGA, ext(1, 0), 1, &GoodSequence::trivial(0), 3, 4, &FinSet::empty(), 6)
            .unwrap()
            .is_empty());

        let beta = ext(1, 0);
        fr.extend_root(0, beta, 1).unwrap();
        let t = GoodSequence::trivial(fr.low_count(beta, 1).unwrap());
        let d = FinSet::new(vec![0, 1, 2]);
        let rows = fr
            .check_ih2_window(OMEGA, beta, 1, &t, 3, 4, &d, 10)
            .unwrap();
        assert_eq!(rows.len(), 2);
        for row in &rows {
            let trace = fr.closure_ext(beta, row.l - 1).unwrap().below(OMEGA);
            assert_eq!(
                row.root_trace_exact,
                trace.len() as u64 == fr.scheme().r(row.l)
            );
            assert!(row.witness_ok, "row at l={} lost its witness", row.l);
        }
        assert!(rows.iter().any(|r| r.j >= 1));
    }

    #[test]
    fn demand_logs_replay_bit_exactly() {
        let mut fr = frag();
        fr.generic_build(
            0,
            &[
                Demand::Root { beta: ext(1, 2), k: 1 },
                Demand::Contain { alpha: 3 },
                Demand::Window {
                    delta: OMEGA,
                    beta: ext(1, 2),
                    k: 1,
                    l_lo: 3,
                    l_hi: 4,
                    d: vec![0, 1, 2],
                    bound: 10,
                },
            ],
        )
        .unwrap();
        let lines = fr.log_lines(0);
        let mut fr2 = frag();
        for line in &lines {
            fr2.replay_line(line).unwrap();
        }
        assert_eq!(fr.strongest(0), fr2.strongest(0));
        assert_eq!(lines, fr2.log_lines(0));
    }

    #[test]
    fn good_sequences_validate_their_windows() {
        let bs = BlockSequence::new(vec![(1, 2), (4, 4)]).unwrap();
        assert_eq!(bs.min_pos(), Some(1));
        assert_eq!(bs.max_pos(), Some(4));
        assert!(BlockSequence::new(vec![(3, 2)]).is_err());
        assert!(BlockSequence::new(vec![(1, 3), (3, 4)]).is_err());

        let good = GoodSequence {
            entries: vec![(BlockSequence::new(vec![(1, 2)]).unwrap(), 2)],
        };
        good.validate(0, 3).unwrap();
        assert!(good.validate(1, 3).is_err());
        assert!(good.validate(0, 2).is_err());
        let anchored_low = GoodSequence {
            entries: vec![(BlockSequence::new(vec![(1, 2)]).unwrap(), 1)],
        };
        assert!(anchored_low.validate(0, 3).is_err());
    }
}
