//! Named verification suites.  Each suite re-derives a slice of the
//! engine's structural claims over a finite window, using independent
//! oracles where one exists, and reports the outcome check by check with
//! the first counterexample in the detail field on failure.  The command
//! line verify entry point and the acceptance tests are thin wrappers
//! around [`run`].

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::capture::{self, CaptureQuery};
use crate::constructions::lattice::{self, LatticePoint};
use crate::constructions::suslin::{self, FiniteTree};
use crate::constructions::{
    aronszajn, coherent, countryman, gap, luzin_jones, m64, polychromatic, TruncatedSet,
};
use crate::error::{Error, Result};
use crate::forcing::{self, cut, leq, red, Demand, Fragment};
use crate::metrics;
use crate::ord::{ext, FinSet, OMEGA};
use crate::scheme::Scheme;
use crate::types::{Schedule, TypeSpec};

/// One verified claim: its name, whether it held, and either a coverage
/// summary or the first counterexample found.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

/// The outcome of a suite run.  `pass` holds exactly when every check
/// passed.  Reports are plain data with no clocks or counters of the
/// environment, so equal runs serialize byte for byte.
#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub pass: bool,
    pub checks: Vec<Check>,
}

/// Ok(coverage summary) or Err(first counterexample).
type Verdict = std::result::Result<String, String>;

struct Suite {
    name: String,
    checks: Vec<Check>,
}

impl Suite {
    fn new(name: &str) -> Self {
        Suite {
            name: name.to_string(),
            checks: Vec::new(),
        }
    }

    // engine errors inside a body become failing rows instead of aborting
    // the rest of the suite
    fn add<F>(&mut self, name: &str, body: F)
    where
        F: FnOnce() -> Result<Verdict>,
    {
        let (pass, detail) = match body() {
            Ok(Ok(d)) => (true, d),
            Ok(Err(d)) => (false, d),
            Err(e) => (false, format!("engine error: {e}")),
        };
        self.checks.push(Check {
            name: name.to_string(),
            pass,
            detail,
        });
    }

    fn finish(self) -> SuiteReport {
        let pass = self.checks.iter().all(|c| c.pass);
        SuiteReport {
            suite: self.name,
            pass,
            checks: self.checks,
        }
    }
}

fn good(detail: String) -> Result<Verdict> {
    Ok(Ok(detail))
}

fn fail(detail: String) -> Result<Verdict> {
    Ok(Err(detail))
}

fn to_vec(f: &FinSet) -> Vec<u64> {
    f.iter().collect()
}

// ---------------------------------------------------------------------
// axioms

const EXHAUSTIVE_WINDOW: u64 = 16;
const SAMPLED_SUBSETS: u64 = 10_000;
// multiplicative stride spreading sample indices across the mask space
const MASK_STRIDE: u64 = 0x9E37_79B9_7F4A_7C15;

/// Ground facts about the family generated by `spec`, materialized up to
/// rank `depth`: level sizes, pairwise initial-segment intersections, the
/// unique ordered amalgamation at every rank, and cofinality witnesses for
/// subsets of each window.
pub fn axioms(spec: &TypeSpec, depth: u64) -> SuiteReport {
    let s = Scheme::new(spec.clone());
    let mut suite = Suite::new("axioms");
    let levels = match s.finite_scheme(depth) {
        Ok(v) => v,
        Err(e) => {
            suite.add("materialize", || Err(e));
            return suite.finish();
        }
    };
    let level_sets: Vec<BTreeSet<Vec<u64>>> = levels
        .iter()
        .map(|lv| lv.iter().map(to_vec).collect())
        .collect();

    suite.add("level-sizes", || {
        let mut seen = 0u64;
        for (j, level) in levels.iter().enumerate() {
            let want = m64(&s, j as u64)?;
            if level.is_empty() {
                return fail(format!("rank {j} holds no members"));
            }
            for f in level {
                if f.len() as u64 != want {
                    return fail(format!("rank {j}: {f} has {} elements, not {want}", f.len()));
                }
                seen += 1;
            }
        }
        good(format!("{seen} members over {} ranks", levels.len()))
    });

    suite.add("pairwise-intersections", || {
        let mut pairs = 0u64;
        for (j, level) in levels.iter().enumerate() {
            for (i, e) in level.iter().enumerate() {
                for f in &level[i + 1..] {
                    let m = e.inter(f);
                    if !m.is_initial_segment_of(e) || !m.is_initial_segment_of(f) {
                        return fail(format!("rank {j}: {e} meets {f} off the front"));
                    }
                    pairs += 1;
                }
            }
        }
        good(format!("{pairs} same-rank pairs"))
    });

    suite.add("unique-decomposition", || {
        let mut checked = 0u64;
        for j in 1..levels.len() {
            let n = s.n(j as u64) as usize;
            let r = s.r(j as u64);
            for f in &levels[j] {
                let subs: Vec<&FinSet> = levels[j - 1]
                    .iter()
                    .filter(|g| g.is_subset_of(f))
                    .collect();
                if subs.len() != n {
                    return fail(format!(
                        "rank {j}: {f} holds {} lower members, wants {n}",
                        subs.len()
                    ));
                }
                let (root, pieces) = s.decompose(f)?;
                let subset: BTreeSet<Vec<u64>> = subs.iter().map(|g| to_vec(g)).collect();
                let pieceset: BTreeSet<Vec<u64>> = pieces.iter().map(to_vec).collect();
                if subset != pieceset {
                    return fail(format!(
                        "rank {j}: the pieces of {f} differ from its lower members"
                    ));
                }
                if root.len() as u64 != r {
                    return fail(format!("rank {j}: root of {f} has size {}", root.len()));
                }
                let mut union = root.clone();
                for (i, p) in pieces.iter().enumerate() {
                    if !root.is_initial_segment_of(p) {
                        return fail(format!("rank {j}: root does not start piece {i} of {f}"));
                    }
                    for q in &pieces[i + 1..] {
                        if p.inter(q) != root {
                            return fail(format!("rank {j}: pieces of {f} overlap past the root"));
                        }
                    }
                    union = union.union(p);
                }
                if &union != f {
                    return fail(format!("rank {j}: pieces of {f} do not cover it"));
                }
                for w in pieces.windows(2) {
                    if !w[0].minus(&root).all_below(&w[1].minus(&root)) {
                        return fail(format!("rank {j}: piece bodies of {f} are out of order"));
                    }
                }
                checked += 1;
            }
        }
        good(format!("{checked} members decompose uniquely"))
    });

    suite.add("cofinal-witnesses", || {
        // the canonical descent from the full window member, memoized
        let mut split: BTreeMap<Vec<u64>, Vec<FinSet>> = BTreeMap::new();
        let mut verified = 0u64;
        for k in 1..=depth {
            let w = m64(&s, k)?;
            if w > 63 {
                return fail(format!("window m_{k} = {w} exceeds the 63-bit mask limit"));
            }
            let exhaustive = w <= EXHAUSTIVE_WINDOW;
            let count = if exhaustive { (1u64 << w) - 1 } else { SAMPLED_SUBSETS };
            for i in 1..=count {
                let mask = if exhaustive {
                    i
                } else {
                    let m = i.wrapping_mul(MASK_STRIDE) >> (64 - w as u32);
                    if m == 0 {
                        continue;
                    }
                    m
                };
                let a = FinSet::new((0..w).filter(|b| mask >> b & 1 == 1).collect());
                let top = a.last().expect("mask is nonzero");
                let mut k0 = 0;
                while !a.is_subset_of(&s.closure(top, k0)?) {
                    k0 += 1;
                    if k0 > k {
                        return fail(format!("window m_{k}: no trace swallows {a}"));
                    }
                }
                if w <= 8 {
                    // small windows: the least trace level is the spread
                    let xs = to_vec(&a);
                    let diam = metrics::rho_diameter(&s, &xs)?;
                    if diam != k0 {
                        return fail(format!(
                            "window m_{k}: {a} spreads at {diam} but closes at {k0}"
                        ));
                    }
                }
                let mut f = FinSet::interval(0, w);
                let mut j = k;
                while j > k0 {
                    let key = to_vec(&f);
                    if !split.contains_key(&key) {
                        let (_, pieces) = s.decompose(&f)?;
                        split.insert(key.clone(), pieces);
                    }
                    f = match split[&key].iter().find(|p| p.contains(top)) {
                        Some(p) => p.clone(),
                        None => return fail(format!("window m_{k}: descent loses {top}")),
                    };
                    j -= 1;
                }
                if !a.is_subset_of(&f) {
                    return fail(format!("window m_{k}: witness {f} misses part of {a}"));
                }
                if !level_sets[k0 as usize].contains(&to_vec(&f)) {
                    return fail(format!("window m_{k}: witness {f} is not a rank-{k0} member"));
                }
                verified += 1;
            }
        }
        good(format!("{verified} subsets found members, windows up to m_{depth}"))
    });

    suite.finish()
}

// ---------------------------------------------------------------------
// restriction

/// The window-restriction laws: every smaller materialization is exactly
/// the filtered larger one, and both agree with an independent top-down
/// rebuild of the family from root and slice arithmetic alone.
pub fn restriction(spec: &TypeSpec, depth: u64) -> SuiteReport {
    let s = Scheme::new(spec.clone());
    let mut suite = Suite::new("restriction");
    let top = match s.finite_scheme(depth) {
        Ok(v) => v,
        Err(e) => {
            suite.add("materialize", || Err(e));
            return suite.finish();
        }
    };

    suite.add("windows-nest", || {
        let mut compared = 0u64;
        for k in 0..=depth {
            let wk = m64(&s, k)?;
            let fin = s.finite_scheme(k)?;
            for j in 0..=k as usize {
                let have: BTreeSet<Vec<u64>> = fin[j].iter().map(to_vec).collect();
                let want: BTreeSet<Vec<u64>> = top[j]
                    .iter()
                    .filter(|g| g.last().map_or(true, |t| t < wk))
                    .map(to_vec)
                    .collect();
                if have != want {
                    return fail(format!(
                        "window m_{k}, rank {j}: {} members against {} filtered",
                        have.len(),
                        want.len()
                    ));
                }
                compared += 1;
            }
        }
        good(format!("{compared} window ranks match"))
    });

    suite.add("oracle-agreement", || {
        let mut out: Vec<BTreeSet<Vec<u64>>> = vec![BTreeSet::new(); depth as usize + 1];
        amalgams(&s, &FinSet::interval(0, m64(&s, depth)?), depth, &mut out)?;
        let mut total = 0usize;
        for (j, level) in top.iter().enumerate() {
            let have: BTreeSet<Vec<u64>> = level.iter().map(to_vec).collect();
            if out[j] != have {
                return fail(format!(
                    "rank {j}: oracle lists {} members, engine {}",
                    out[j].len(),
                    have.len()
                ));
            }
            total += have.len();
        }
        good(format!("{total} members rebuilt independently"))
    });

    suite.finish()
}

// rebuild the family under `x` from the top down: the root is the first
// r_k elements and piece i appends the i-th slice of width m_{k-1} - r_k
fn amalgams(s: &Scheme, x: &FinSet, k: u64, out: &mut [BTreeSet<Vec<u64>>]) -> Result<()> {
    if !out[k as usize].insert(to_vec(x)) {
        return Ok(());
    }
    if k == 0 {
        return Ok(());
    }
    let r = s.r(k) as usize;
    let d = m64(s, k - 1)? as usize - r;
    let xs = x.as_slice();
    for i in 0..s.n(k) as usize {
        let mut piece = xs[..r].to_vec();
        piece.extend_from_slice(&xs[r + d * i..r + d * (i + 1)]);
        amalgams(s, &FinSet::from_sorted(piece), k - 1, out)?;
    }
    Ok(())
}

// ---------------------------------------------------------------------
// metric

fn rho_table(s: &Scheme, w: u64) -> Result<Vec<Vec<u64>>> {
    let mut t = vec![vec![0u64; w as usize]; w as usize];
    for b in 0..w as usize {
        for a in 0..b {
            let v = s.rho(a as u64, b as u64)?;
            t[a][b] = v;
            t[b][a] = v;
        }
    }
    Ok(t)
}

/// The metric laws on [0, window): separation, symmetry, the isosceles
/// bound, trace finiteness and nesting, trace identity with the metric
/// balls, and the exact round-trip between rank families and full balls up
/// to `roundtrip_depth`.
pub fn metric(spec: &TypeSpec, window: u64, roundtrip_depth: u64) -> SuiteReport {
    let s = Scheme::new(spec.clone());
    let mut suite = Suite::new("metric");
    let rho = match rho_table(&s, window) {
        Ok(t) => t,
        Err(e) => {
            suite.add("tables", || Err(e));
            return suite.finish();
        }
    };
    let kcap = rho.iter().flatten().copied().max().unwrap_or(0) + 1;

    suite.add("zero-iff-equal", || {
        for a in 0..window {
            if s.rho(a, a)? != 0 {
                return fail(format!("{a} is at positive distance from itself"));
            }
        }
        for b in 0..window as usize {
            for a in 0..b {
                if rho[a][b] == 0 {
                    return fail(format!("distinct {a}, {b} are at distance zero"));
                }
            }
        }
        good(format!("{window} points separate"))
    });

    suite.add("symmetry", || {
        for b in 0..window {
            for a in 0..b {
                if s.rho(a, b)? != s.rho(b, a)? {
                    return fail(format!("distance of ({a},{b}) depends on order"));
                }
            }
        }
        good(format!("{} unordered pairs", window * (window - 1) / 2))
    });

    suite.add("isosceles-bound", || {
        let mut triples = 0u64;
        for a in 0..window as usize {
            for b in a + 1..window as usize {
                for g in a + 1..window as usize {
                    if rho[a][b] > rho[a][g].max(rho[b][g]) {
                        return fail(format!("triple ({a},{b},{g}) breaks the two-sided bound"));
                    }
                    triples += 1;
                }
            }
        }
        good(format!("{triples} triples"))
    });

    suite.add("balls-bounded", || {
        let mut traces = 0u64;
        for beta in 0..window {
            let mut prev = FinSet::empty();
            for k in 0..=kcap {
                let c = s.closure(beta, k)?;
                if c.len() as u64 > m64(&s, k)? {
                    return fail(format!("trace of {beta} at {k} exceeds the level size"));
                }
                if !prev.is_subset_of(&c) {
                    return fail(format!("trace of {beta} shrinks from {} to {k}", k - 1));
                }
                prev = c;
                traces += 1;
            }
        }
        good(format!("{traces} traces bounded and nested"))
    });

    suite.add("balls-are-traces", || {
        for beta in 0..window {
            for k in 0..=kcap {
                let c = s.closure(beta, k)?;
                let ball: Vec<u64> = (0..=beta)
                    .filter(|&a| rho[a as usize][beta as usize] <= k)
                    .collect();
                if c.as_slice() != ball.as_slice() {
                    return fail(format!("trace and ball of {beta} at {k} differ"));
                }
            }
        }
        good(format!("{} balls", window * (kcap + 1)))
    });

    suite.add("round-trip", || {
        let mut total = 0u64;
        for k in 0..=roundtrip_depth {
            let mk = m64(&s, k)?;
            let engine: BTreeSet<Vec<u64>> = s
                .sets_of_rank_within(k, window)?
                .iter()
                .map(to_vec)
                .collect();
            let mut oracle: BTreeSet<Vec<u64>> = BTreeSet::new();
            for g in 0..window {
                let c = s.closure(g, k)?;
                if c.len() as u64 == mk {
                    oracle.insert(to_vec(&c));
                }
            }
            if engine != oracle {
                return fail(format!(
                    "rank {k}: {} members against {} full balls",
                    engine.len(),
                    oracle.len()
                ));
            }
            if engine.is_empty() {
                return fail(format!("rank {k}: no member fits the window"));
            }
            total += engine.len() as u64;
        }
        good(format!("{total} members round-trip through full balls"))
    });

    suite.finish()
}

// ---------------------------------------------------------------------
// xi

struct XiTables {
    rho: Vec<Vec<u64>>,
    delta: Vec<Vec<u64>>,
    xi: Vec<Vec<i64>>,
    kcap: u64,
}

impl XiTables {
    fn build(s: &Scheme, w: u64, depth: u64) -> Result<XiTables> {
        let rho = rho_table(s, w)?;
        let mut delta = vec![vec![0u64; w as usize]; w as usize];
        let mut kcap = depth;
        for b in 0..w as usize {
            for a in 0..b {
                let d = metrics::delta(s, a as u64, b as u64)?
                    .finite()
                    .ok_or_else(|| {
                        Error::BadInput(format!("distinct pair ({a},{b}) never diverges"))
                    })?;
                delta[a][b] = d;
                delta[b][a] = d;
                kcap = kcap.max(d).max(rho[a][b] + 1);
            }
        }
        let mut xi = Vec::with_capacity(w as usize);
        for a in 0..w {
            let row: Result<Vec<i64>> = (0..=kcap).map(|k| metrics::xi(s, a, k)).collect();
            xi.push(row?);
        }
        Ok(XiTables {
            rho,
            delta,
            xi,
            kcap,
        })
    }
}

/// The divergence and piece-trace laws on [0, window): ordering of the
/// divergence level against the metric, agreement of traces below it,
/// the strict split at the metric level, the tail dichotomy, positivity
/// at the divergence level, the mismatch ladder of the increasing
/// bijection, the divergence ultrametric law, mismatch trace transfer,
/// and metric descent.
pub fn xi_suite(spec: &TypeSpec, window: u64, depth: u64) -> SuiteReport {
    let s = Scheme::new(spec.clone());
    let mut suite = Suite::new("xi");
    let t = match XiTables::build(&s, window, depth) {
        Ok(t) => t,
        Err(e) => {
            suite.add("tables", || Err(e));
            return suite.finish();
        }
    };
    let w = window as usize;
    let pairs = window * (window - 1) / 2;

    suite.add("delta-at-most-rho", || {
        for b in 0..w {
            for a in 0..b {
                if t.delta[a][b] > t.rho[a][b] {
                    return fail(format!("pair ({a},{b}): divergence past the distance"));
                }
            }
        }
        good(format!("{pairs} pairs"))
    });

    suite.add("agree-below-delta", || {
        for b in 0..w {
            for a in 0..b {
                for k in 1..t.delta[a][b] {
                    if t.xi[a][k as usize] != t.xi[b][k as usize] {
                        return fail(format!("pair ({a},{b}): traces split early at {k}"));
                    }
                }
            }
        }
        good(format!("{pairs} pairs below divergence"))
    });

    suite.add("split-at-rho", || {
        for b in 0..w {
            for a in 0..b {
                let r = t.rho[a][b] as usize;
                if !(0 <= t.xi[a][r] && t.xi[a][r] < t.xi[b][r]) {
                    return fail(format!(
                        "pair ({a},{b}): piece indices {} and {} at the distance level",
                        t.xi[a][r], t.xi[b][r]
                    ));
                }
            }
        }
        good(format!("{pairs} pairs split"))
    });

    suite.add("tail-fixed-or-shared", || {
        for b in 0..w {
            for a in 0..b {
                for k in t.rho[a][b] + 1..=t.kcap {
                    let (xa, xb) = (t.xi[a][k as usize], t.xi[b][k as usize]);
                    if xa != -1 && xa != xb {
                        return fail(format!("pair ({a},{b}): tail value {xa} at {k}"));
                    }
                }
            }
        }
        good(format!("{pairs} pairs, levels to {}", t.kcap))
    });

    suite.add("positive-at-delta", || {
        for b in 0..w {
            for a in 0..b {
                let d = t.delta[a][b] as usize;
                if t.xi[a][d] < 0 || t.xi[b][d] < 0 || t.xi[a][d] == t.xi[b][d] {
                    return fail(format!("pair ({a},{b}): degenerate split at divergence"));
                }
            }
        }
        good(format!("{pairs} pairs"))
    });

    suite.add("mismatch-ladder", || {
        let mut moved = 0u64;
        for b in 0..window {
            for a in 0..b {
                let dl = t.delta[a as usize][b as usize];
                let k = dl - 1;
                let ca = s.closure(a, k)?;
                let cb = s.closure(b, k)?;
                if ca.len() != cb.len() {
                    return fail(format!("pair ({a},{b}): traces below divergence differ"));
                }
                let rows: Vec<(u64, u64)> = ca.iter().zip(cb.iter()).collect();
                let mism: Vec<usize> = (0..rows.len())
                    .filter(|&i| rows[i].0 != rows[i].1)
                    .collect();
                if let Some(&first) = mism.first() {
                    if mism.len() != rows.len() - first {
                        return fail(format!(
                            "pair ({a},{b}): a fixed point follows a moved one"
                        ));
                    }
                }
                for (ix, &p) in mism.iter().enumerate() {
                    let (x, y) = rows[p];
                    let dxy = t.delta[x as usize][y as usize];
                    for &q in &mism[ix + 1..] {
                        let (x2, y2) = rows[q];
                        let dq = t.delta[x2 as usize][y2 as usize];
                        if t.rho[a as usize][b as usize] < dxy {
                            return fail(format!(
                                "pair ({a},{b}): moved point {x} diverges past the distance"
                            ));
                        }
                        if dxy < dq {
                            return fail(format!(
                                "pair ({a},{b}): ladder rises from {x} to {x2}"
                            ));
                        }
                        if dq < dl {
                            return fail(format!(
                                "pair ({a},{b}): moved point {x2} diverges below the pair"
                            ));
                        }
                    }
                    moved += 1;
                }
            }
        }
        good(format!("{moved} moved points across {pairs} pairs"))
    });

    suite.add("delta-ultrametric", || {
        let mut triples = 0u64;
        for a in 0..w {
            for b in 0..w {
                for d in 0..w {
                    if a == b || b == d || a == d {
                        continue;
                    }
                    if t.delta[a][b] < t.delta[b][d] && t.delta[a][d] != t.delta[a][b] {
                        return fail(format!("triple ({a},{b},{d}) breaks divergence transfer"));
                    }
                    triples += 1;
                }
            }
        }
        good(format!("{triples} ordered triples"))
    });

    suite.add("mismatch-trace", || {
        let mut moved = 0u64;
        for b in 0..window {
            for a in 0..b {
                let dl = t.delta[a as usize][b as usize];
                let ca = s.closure(a, dl - 1)?;
                let cb = s.closure(b, dl - 1)?;
                let d = dl as usize;
                for (x, y) in ca.iter().zip(cb.iter()) {
                    if x == y {
                        continue;
                    }
                    let above = t.delta[x as usize][y as usize] > dl;
                    let hidden = t.xi[x as usize][d] == -1;
                    if above != hidden {
                        return fail(format!(
                            "pair ({a},{b}): moved point {x} mixes divergence and trace"
                        ));
                    }
                    if !hidden
                        && (t.xi[x as usize][d] != t.xi[a as usize][d]
                            || t.xi[y as usize][d] != t.xi[b as usize][d])
                    {
                        return fail(format!(
                            "pair ({a},{b}): moved point {x} carries foreign trace values"
                        ));
                    }
                    moved += 1;
                }
            }
        }
        good(format!("{moved} moved points"))
    });

    suite.add("rho-descent", || {
        let mut triples = 0u64;
        for b in 0..w {
            for a in 0..b {
                for x in 0..a {
                    if t.rho[x][b] < t.rho[a][b] && t.rho[x][a] >= t.rho[a][b] {
                        return fail(format!("triple ({x},{a},{b}) breaks descent"));
                    }
                    triples += 1;
                }
            }
        }
        good(format!("{triples} increasing triples"))
    });

    suite.finish()
}

// ---------------------------------------------------------------------
// countryman

/// The recursive total order on [0, window): rejection of the diagonal,
/// totality, transitivity, chain structure of the label classes over
/// [0, chain_window), and transport of comparisons along the increasing
/// bijections below the divergence level.
pub fn countryman_suite(spec: &TypeSpec, window: u64, chain_window: u64) -> SuiteReport {
    let s = Scheme::new(spec.clone());
    let mut suite = Suite::new("countryman");
    let mut table = vec![vec![false; window as usize]; window as usize];
    for a in 0..window as usize {
        for b in 0..window as usize {
            if a == b {
                continue;
            }
            match countryman::less(&s, a as u64, b as u64) {
                Ok(v) => table[a][b] = v,
                Err(e) => {
                    suite.add("tables", || Err(e));
                    return suite.finish();
                }
            }
        }
    }

    suite.add("diagonal-rejected", || {
        for a in 0..window.min(8) {
            match countryman::less(&s, a, a) {
                Err(Error::BadInput(_)) => {}
                Ok(_) => return fail(format!("{a} compares against itself")),
                Err(e) => return Err(e),
            }
        }
        good("reflexive queries rejected".into())
    });

    suite.add("total", || {
        for a in 0..window as usize {
            for b in 0..a {
                if table[a][b] == table[b][a] {
                    return fail(format!("pair ({b},{a}) is not decided exactly once"));
                }
            }
        }
        good(format!("{} pairs decided", window * (window - 1) / 2))
    });

    suite.add("transitive", || {
        let mut triples = 0u64;
        for a in 0..window as usize {
            for b in 0..window as usize {
                for c in 0..window as usize {
                    if a == b || b == c || a == c {
                        continue;
                    }
                    if table[a][b] && table[b][c] && !table[a][c] {
                        return fail(format!("({a},{b},{c}) breaks transitivity"));
                    }
                    triples += 1;
                }
            }
        }
        good(format!("{triples} ordered triples"))
    });

    suite.add("label-chains", || {
        let mut classes: BTreeMap<(u64, u64, u64), Vec<(u64, u64)>> = BTreeMap::new();
        for b in 0..chain_window {
            for a in 0..b {
                classes
                    .entry(countryman::chain_index(&s, a, b)?)
                    .or_default()
                    .push((a, b));
            }
        }
        let le = |x: u64, y: u64| x == y || table[x as usize][y as usize];
        let mut compared = 0u64;
        for (label, members) in &classes {
            for (i, &(a1, b1)) in members.iter().enumerate() {
                for &(a2, b2) in &members[i + 1..] {
                    if !((le(a1, a2) && le(b1, b2)) || (le(a2, a1) && le(b2, b1))) {
                        return fail(format!(
                            "label {label:?}: ({a1},{b1}) and ({a2},{b2}) incomparable"
                        ));
                    }
                    compared += 1;
                }
            }
        }
        good(format!("{compared} pair comparisons in {} classes", classes.len()))
    });

    suite.add("order-transport", || {
        let mut carried = 0u64;
        for a in 0..chain_window {
            for b in 0..chain_window {
                if a == b {
                    continue;
                }
                let dl = metrics::delta(&s, a, b)?
                    .finite()
                    .ok_or_else(|| Error::BadInput(format!("pair ({a},{b}) never diverges")))?;
                let want = table[a as usize][b as usize];
                for z in 0..dl {
                    let ca = s.closure(a, z)?;
                    let cb = s.closure(b, z)?;
                    for (x, y) in ca.iter().zip(cb.iter()) {
                        if x == y {
                            continue;
                        }
                        if table[x as usize][y as usize] != want {
                            return fail(format!(
                                "pair ({a},{b}) at {z}: moved pair ({x},{y}) disagrees"
                            ));
                        }
                        carried += 1;
                    }
                }
            }
        }
        good(format!("{carried} transported comparisons"))
    });

    suite.finish()
}

// ---------------------------------------------------------------------
// certificates

/// Finite certificates of the pointwise constructions over the binary
/// type: forced intersection sizes of the almost disjoint family, the
/// separator split, the interleaved tower witness, coherence of the
/// partial functions past the distance level, and the shared fiber blocks.
pub fn certificates(window: u64) -> SuiteReport {
    let s = Scheme::new(TypeSpec::binary());
    let mut suite = Suite::new("certificates");
    let rho = match rho_table(&s, window) {
        Ok(t) => t,
        Err(e) => {
            suite.add("tables", || Err(e));
            return suite.finish();
        }
    };
    let maxrho = rho.iter().flatten().copied().max().unwrap_or(0);
    let pairs = window * (window - 1) / 2;

    suite.add("almost-disjoint-meets", || {
        let depth = maxrho + 3;
        let mut sets: Vec<TruncatedSet> = Vec::new();
        for alpha in 0..window {
            sets.push(luzin_jones::point_set(&s, alpha, depth)?);
        }
        for b in 0..window as usize {
            for a in 0..b {
                let r = rho[a][b];
                let meet = sets[a].inter(&sets[b]);
                if meet.max_level().map_or(false, |l| l > r) {
                    return fail(format!("pair ({a},{b}): meet above the distance"));
                }
                if (meet.len() as u64) < r {
                    return fail(format!("pair ({a},{b}): meet of {} points", meet.len()));
                }
                if meet.at_level(r).len() as u64 != r {
                    return fail(format!("pair ({a},{b}): inexact slice at the distance"));
                }
            }
        }
        good(format!("{pairs} pairs meet exactly"))
    });

    suite.add("separator-splits", || {
        let depth = maxrho + 2;
        let mut sets: Vec<TruncatedSet> = Vec::new();
        for alpha in 0..window {
            sets.push(luzin_jones::point_set(&s, alpha, depth)?);
        }
        for beta in 0..window {
            let c = luzin_jones::separator(&s, beta, depth)?;
            for alpha in 0..=beta {
                let r = rho[alpha as usize][beta as usize];
                let missed = sets[alpha as usize].minus(&c);
                if missed.max_level().map_or(false, |l| l >= r.max(1)) {
                    return fail(format!("({alpha},{beta}): separator misses high levels"));
                }
            }
            for gamma in beta + 1..window {
                let caught = sets[gamma as usize].inter(&c);
                let mut bound = 0;
                for k in 1..=depth {
                    for d in s.closure(beta, k)?.iter() {
                        bound = bound.max(rho[gamma as usize][d as usize]);
                    }
                }
                if caught.max_level().map_or(false, |l| l > bound) {
                    return fail(format!("({gamma},{beta}): separator catches high levels"));
                }
            }
        }
        good(format!("{window} separators split the family"))
    });

    suite.add("gap-witness", || {
        let depth = maxrho + 4;
        let mut sides: Vec<(FinSet, FinSet)> = Vec::new();
        for alpha in 0..window {
            let (a, b) = gap::sets(&s, alpha, depth)?;
            if !a.inter(&b).is_empty() {
                return fail(format!("{alpha}: the two sides overlap"));
            }
            sides.push((a, b));
        }
        for b in 0..window as usize {
            for a in 0..b {
                let r = rho[a][b];
                let stray = sides[a].0.minus(&sides[b].0);
                if let Some(x) = stray.iter().find(|&x| x > 2 * r + 1) {
                    return fail(format!("pair ({a},{b}): stray point {x}"));
                }
                if !(sides[b].0.contains(2 * r + 1) && sides[a].1.contains(2 * r + 1)) {
                    return fail(format!("pair ({a},{b}): witness {} missing", 2 * r + 1));
                }
            }
        }
        good(format!("{pairs} pairs split at their witness"))
    });

    suite.add("coherence-beyond-rho", || {
        let depth = maxrho + 2;
        let mut fam = Vec::new();
        for alpha in 0..window {
            fam.push(coherent::family_point(&s, alpha, depth)?);
        }
        for b in 0..window as usize {
            for a in 0..b {
                let r = rho[a][b];
                let (da, fa) = &fam[a];
                let (db, fb) = &fam[b];
                for k in r + 1..=depth {
                    if !da.at_level(k).is_subset(&db.at_level(k)) {
                        return fail(format!("pair ({a},{b}): domain escapes at {k}"));
                    }
                }
                for p in da.inter(db).points.iter() {
                    if p[0] > r && fa[p] != fb[p] {
                        return fail(format!("pair ({a},{b}): disagreement at {p:?}"));
                    }
                }
            }
        }
        good(format!("{pairs} pairs cohere past their distance"))
    });

    suite.add("fiber-blocks", || {
        let mut memo: BTreeMap<(u64, u64), (TruncatedSet, BTreeMap<Vec<u64>, u64>)> =
            BTreeMap::new();
        let mut found = 0u64;
        for beta in 2..window {
            for mu in 1..beta {
                for xi in 0..mu {
                    for k in 0..3u64 {
                        let l = k.max(metrics::rho_diameter(&s, &[xi, mu, beta])?);
                        let cl = s.closure(beta, l)?;
                        for alpha in mu + 1..beta {
                            if cl.contains(alpha) {
                                continue;
                            }
                            let t = rho[alpha as usize][beta as usize];
                            if t <= l {
                                return fail(format!(
                                    "alpha={alpha} beta={beta}: distance {t} within {l}"
                                ));
                            }
                            if metrics::xi(&s, alpha, t)? != 0
                                || metrics::xi(&s, beta, t)? != 1
                                || metrics::xi(&s, xi, t)? != -1
                                || metrics::xi(&s, mu, t)? != -1
                            {
                                return fail(format!(
                                    "alpha={alpha} beta={beta}: trace pattern broken at {t}"
                                ));
                            }
                            let i = (metrics::f(&s, xi, t)? - 1) as u64;
                            let j = (metrics::f(&s, mu, t)? - 1) as u64;
                            if i >= s.r(t) || j >= s.r(t) {
                                return fail(format!(
                                    "alpha={alpha} beta={beta}: row index escapes the block"
                                ));
                            }
                            for key in [(alpha, t), (beta, t)] {
                                if !memo.contains_key(&key) {
                                    memo.insert(key, coherent::family_point(&s, key.0, t)?);
                                }
                            }
                            let (da, fa) = &memo[&(alpha, t)];
                            let (db, fb) = &memo[&(beta, t)];
                            let common = coherent::preimage(da, fa, xi)
                                .inter(&coherent::preimage(db, fb, mu));
                            for tt in 0..t {
                                if !common.points.contains(&vec![t, i, j, tt]) {
                                    return fail(format!(
                                        "alpha={alpha} beta={beta}: block point {tt} missing"
                                    ));
                                }
                            }
                            if common.len() as u64 <= k {
                                return fail(format!(
                                    "alpha={alpha} beta={beta}: fiber meet too small for {k}"
                                ));
                            }
                            found += 1;
                        }
                    }
                }
            }
        }
        if found == 0 {
            return fail("window holds no qualifying configuration".into());
        }
        good(format!("{found} fiber configurations"))
    });

    suite.finish()
}

// ---------------------------------------------------------------------
// aronszajn

/// The divergence-table tree on [0, window): restrictions agree with the
/// restricted point's own table outside its distance trace, and the index
/// classes of all restricted tables are antichains.
pub fn aronszajn_suite(window: u64) -> SuiteReport {
    let mut suite = Suite::new("aronszajn");
    for spec in [TypeSpec::star(), TypeSpec::binary()] {
        let s = Scheme::new(spec);
        let label = s.spec().label().to_string();
        suite.add(&format!("{label}/restriction-coherence"), || {
            let mut tables: Vec<Vec<u64>> = Vec::new();
            for beta in 0..window {
                tables.push(aronszajn::node(&s, beta)?);
            }
            for beta in 0..window as usize {
                for alpha in 0..=beta {
                    let r = tables[beta][alpha];
                    let cl = s.closure(alpha as u64, r)?;
                    for x in 0..=alpha {
                        if !cl.contains(x as u64) && tables[beta][x] != tables[alpha][x] {
                            return fail(format!(
                                "beta={beta} alpha={alpha}: tables differ at {x} off the trace"
                            ));
                        }
                    }
                }
            }
            good(format!("{} restrictions cohere", window * (window + 1) / 2))
        });
    }

    let s = Scheme::new(TypeSpec::binary());
    suite.add("antichain-classes", || {
        let mut nodes: BTreeSet<Vec<u64>> = BTreeSet::new();
        for beta in 0..window {
            for alpha in 0..=beta {
                nodes.insert(aronszajn::node_restricted(&s, beta, alpha)?);
            }
        }
        let mut by_index: BTreeMap<(u64, u64), Vec<Vec<u64>>> = BTreeMap::new();
        for t in &nodes {
            by_index.entry(aronszajn::antichain_index(&s, t)?).or_default().push(t.clone());
        }
        for ((k, _), class) in &by_index {
            for (i, f) in class.iter().enumerate() {
                for g in &class[i + 1..] {
                    let (f, g) = if f.len() <= g.len() { (f, g) } else { (g, f) };
                    if f.len() == g.len() {
                        if f == g {
                            return fail(format!("index {k}: duplicate table"));
                        }
                        continue;
                    }
                    let bf = f.len() - 1;
                    if !(f[bf] <= *k && g[bf] > *k) {
                        return fail(format!("index {k}: comparable tables at top {bf}"));
                    }
                    if g[..f.len()] == f[..] {
                        return fail(format!("index {k}: one table extends another"));
                    }
                }
            }
        }
        if !by_index.values().any(|c| c.len() > 1) {
            return fail("every index class is a singleton, nothing split".into());
        }
        good(format!("{} tables in {} classes", nodes.len(), by_index.len()))
    });

    suite.finish()
}

// ---------------------------------------------------------------------
// capturing

fn rich_spec() -> TypeSpec {
    // wide early branching with a room-2 root so short tuples get captured
    TypeSpec {
        name: None,
        prefix: vec![(3, 0), (9, 2)],
        schedule: Schedule::default(),
    }
}

/// Capture laws: the arithmetic tuple criterion against the exhaustive
/// member scan within the rank-4 window, the two-use bound of the pair
/// coloring on [0, color_window), and color coincidence on captured
/// triples.
pub fn capturing_suite(color_window: u64) -> SuiteReport {
    let mut suite = Suite::new("capturing");

    for spec in [TypeSpec::star(), TypeSpec::binary()] {
        let s = Scheme::new(spec);
        let label = s.spec().label().to_string();
        suite.add(&format!("{label}/criterion-matches-scan"), || {
            let window = m64(&s, 4)?;
            let xs: Vec<u64> = (0..window).collect();
            let mut tuples: Vec<Vec<u64>> = Vec::new();
            for i in 0..xs.len() {
                tuples.push(vec![xs[i]]);
                for j in i + 1..xs.len() {
                    tuples.push(vec![xs[i], xs[j]]);
                    for k in j + 1..xs.len() {
                        tuples.push(vec![xs[i], xs[j], xs[k]]);
                    }
                }
            }
            let total = tuples.len();
            for t in tuples {
                let c = FinSet::from_sorted(t.clone());
                let by = capture::ordinal_tuple_captured(&s, &c)?;
                let q = CaptureQuery {
                    family: t.iter().map(|&x| FinSet::singleton(x)).collect(),
                    n: t.len(),
                    cell: None,
                    k_min: None,
                    window,
                };
                let mut levels: Vec<u64> =
                    capture::scan_captured(&s, &q)?.iter().map(|h| h.level).collect();
                levels.dedup();
                if t.len() == 1 {
                    if by != Some(0) || !levels.contains(&0) {
                        return fail(format!("singleton {c}: criterion {by:?}, scan {levels:?}"));
                    }
                } else {
                    let want: Vec<u64> = by.into_iter().collect();
                    if levels != want {
                        return fail(format!("tuple {c}: criterion {by:?}, scan {levels:?}"));
                    }
                }
            }
            good(format!("{total} tuples agree"))
        });
    }

    suite.add("colors-bounded", || {
        for (label, spec) in [
            ("T2", TypeSpec::binary()),
            ("Tstar", TypeSpec::star()),
            ("rich", rich_spec()),
        ] {
            let s = Scheme::new(spec);
            let mut counts: BTreeMap<u64, u32> = BTreeMap::new();
            for b in 1..color_window {
                for a in 0..b {
                    *counts.entry(polychromatic::polychromatic_color(&s, a, b)?).or_insert(0) += 1;
                }
            }
            if let Some((color, n)) = counts.iter().find(|(_, &n)| n > 2) {
                return fail(format!("{label}: color {color} used {n} times"));
            }
            if label == "rich" && !counts.values().any(|&n| n == 2) {
                return fail("rich type: the two-use bound is never tight".into());
            }
        }
        good(format!("3 types, pairs below {color_window}"))
    });

    suite.add("triples-coincide", || {
        let s = Scheme::new(rich_spec());
        let mut found = 0u64;
        for x2 in 2..20u64 {
            for x1 in 1..x2 {
                for x0 in 0..x1 {
                    let c = FinSet::from_sorted(vec![x0, x1, x2]);
                    if capture::ordinal_tuple_captured(&s, &c)?.is_some() {
                        let top0 = polychromatic::polychromatic_color(&s, x0, x2)?;
                        let top1 = polychromatic::polychromatic_color(&s, x1, x2)?;
                        if top0 != top1 {
                            return fail(format!("captured {c}: colors {top0} and {top1}"));
                        }
                        found += 1;
                    }
                }
            }
        }
        if found == 0 {
            return fail("no captured triple in the scan window".into());
        }
        good(format!("{found} captured triples share their top color"))
    });

    suite.finish()
}

// ---------------------------------------------------------------------
// structures

fn tree_spec() -> TypeSpec {
    // branching 2 then 16: wide enough to seed every two-splitting shape
    // over the first two level sizes
    TypeSpec {
        name: None,
        prefix: vec![(2, 0), (16, 1)],
        schedule: Schedule::default(),
    }
}

fn lattice_phi(s: &Scheme, j: u64, x: (u64, u64)) -> Result<(u64, u64)> {
    let m0 = m64(s, j)?;
    let r = s.r(j + 1);
    Ok(if x.0 < r { x } else { (x.0 + (m0 - r), x.1) })
}

fn layer_cut(set: &BTreeSet<LatticePoint>, k: u64) -> BTreeSet<LatticePoint> {
    set.iter().copied().filter(|p| p.0 <= k).collect()
}

// well-founded height inside the family, with the empty set at zero
fn family_ranks(fam: &lattice::LevelFamily) -> BTreeMap<BTreeSet<LatticePoint>, u64> {
    let uniq: BTreeSet<BTreeSet<LatticePoint>> = fam.values().cloned().collect();
    let mut sets: Vec<BTreeSet<LatticePoint>> = uniq.into_iter().collect();
    sets.sort_by_key(|s| s.len());
    let mut out: BTreeMap<BTreeSet<LatticePoint>, u64> = BTreeMap::new();
    out.insert(BTreeSet::new(), 0);
    for s in sets {
        let r = out
            .iter()
            .filter(|(t, _)| t.is_subset(&s) && **t != s)
            .map(|(_, r)| r + 1)
            .max()
            .unwrap_or(0);
        out.insert(s, r);
    }
    out
}

/// Structural suites for the point-set semilattice (meets, ranks, nesting
/// and restriction, level embeddings up to `lattice_depth`) and the
/// two-splitting tree scaffold (shapes, labeled copies, order
/// inheritance, good-set lifting, amalgamation up to `tree_depth`).
pub fn structures(lattice_depth: u64, tree_depth: u64) -> SuiteReport {
    let mut suite = Suite::new("structures");
    let s = Scheme::new(TypeSpec::binary());

    suite.add("lattice-meets", || {
        let mut meets = 0u64;
        for k in 0..=lattice_depth {
            let fam = lattice::lattice_level(&s, k)?;
            let known: BTreeSet<&BTreeSet<LatticePoint>> = fam.values().collect();
            for x in fam.values() {
                for y in fam.values() {
                    let i: BTreeSet<LatticePoint> = x.intersection(y).copied().collect();
                    if !i.is_empty() && !known.contains(&i) {
                        return fail(format!("rank {k}: a meet escapes the family"));
                    }
                    meets += 1;
                }
            }
        }
        good(format!("{meets} meets stay inside"))
    });

    suite.add("lattice-ranks", || {
        for k in 0..=lattice_depth {
            let fam = lattice::lattice_level(&s, k)?;
            let ranks = family_ranks(&fam);
            for (x, set) in &fam {
                if ranks[set] != x.0 + 1 {
                    return fail(format!("rank {k}, pair {x:?}: height {}", ranks[set]));
                }
            }
        }
        good(format!("heights follow first coordinates to {lattice_depth}"))
    });

    suite.add("lattice-nesting", || {
        for j in 0..lattice_depth {
            let cur = lattice::lattice_level(&s, j)?;
            let nxt = lattice::lattice_level(&s, j + 1)?;
            for (x, set) in &cur {
                if nxt.get(x) != Some(set) {
                    return fail(format!("rank {j}, pair {x:?} changed upstairs"));
                }
                let up = nxt.get(&lattice_phi(&s, j, *x)?).ok_or_else(|| {
                    Error::BadInput(format!("rank {j}: image of {x:?} missing"))
                })?;
                if layer_cut(up, j) != *set || !set.is_subset(up) {
                    return fail(format!("rank {j}, pair {x:?}: image does not restrict back"));
                }
            }
        }
        good(format!("{lattice_depth} consecutive ranks nest"))
    });

    suite.add("lattice-embedding", || {
        for j in 0..lattice_depth {
            let cur = lattice::lattice_level(&s, j)?;
            let nxt = lattice::lattice_level(&s, j + 1)?;
            let mut map: BTreeMap<&BTreeSet<LatticePoint>, &BTreeSet<LatticePoint>> =
                BTreeMap::new();
            for (x, set) in &cur {
                let img = nxt.get(&lattice_phi(&s, j, *x)?).ok_or_else(|| {
                    Error::BadInput(format!("rank {j}: image of {x:?} missing"))
                })?;
                if let Some(old) = map.insert(set, img) {
                    if old != img {
                        return fail(format!("rank {j}: image depends on the index"));
                    }
                }
            }
            for (a, ia) in &map {
                for (b, ib) in &map {
                    if a.is_subset(b) != ia.is_subset(ib) {
                        return fail(format!("rank {j}: containment not preserved"));
                    }
                    let down: BTreeSet<LatticePoint> = a.intersection(b).copied().collect();
                    let up: BTreeSet<LatticePoint> = ia.intersection(ib).copied().collect();
                    match map.get(&down) {
                        Some(id) => {
                            if **id != up {
                                return fail(format!("rank {j}: meets drift under the embedding"));
                            }
                        }
                        None => {
                            if !down.is_empty() || !up.is_empty() {
                                return fail(format!("rank {j}: empty meet grows"));
                            }
                        }
                    }
                }
            }
        }
        good(format!("{lattice_depth} level embeddings"))
    });

    let ts = Scheme::new(tree_spec());

    suite.add("tree-shapes", || {
        for k in 0..=tree_depth {
            let t = suslin::suslin_tree_rank(&ts, k)?;
            t.validate()?;
            if !t.two_splitting() {
                return fail(format!("rank {k} does not split in two"));
            }
            let h = m64(&ts, k)?;
            if t.height() != h {
                return fail(format!("rank {k}: height {}", t.height()));
            }
            for l in 0..h {
                if t.widths[l as usize] != (k + 1) << l {
                    return fail(format!("rank {k} level {l}: width {}", t.widths[l as usize]));
                }
            }
            if t.labels != (0..h).collect::<Vec<u64>>() {
                return fail(format!("rank {k}: positional labels broken"));
            }
        }
        good(format!("shapes validate to rank {tree_depth}"))
    });

    suite.add("tree-copies", || {
        let lo = tree_depth.saturating_sub(1);
        let window = m64(&ts, lo + 1)?;
        let levels = suslin::full_suslin_levels(&ts, lo, window)?;
        let pieces = ts.sets_of_rank_within(lo, window)?;
        if levels.len() != pieces.len() || levels.is_empty() {
            return fail(format!("{} copies for {} members", levels.len(), pieces.len()));
        }
        let shape = suslin::suslin_tree_rank(&ts, lo)?;
        for (f, t) in &levels {
            if t.widths != shape.widths || t.parent != shape.parent {
                return fail(format!("copy over {f:?} has a different shape"));
            }
            if &t.labels != f {
                return fail(format!("copy over {f:?} carries foreign labels"));
            }
        }
        good(format!("{} labeled copies of the rank-{lo} shape", levels.len()))
    });

    suite.add("copies-inherit-order", || {
        let lo = tree_depth.saturating_sub(1);
        let little = suslin::suslin_tree_rank(&ts, lo)?;
        let big = suslin::suslin_tree_rank(&ts, tree_depth.max(1))?;
        let window = m64(&ts, lo + 1)?;
        let pieces = ts.sets_of_rank_within(lo, window)?;
        let mut compared = 0u64;
        for p in &pieces {
            let f = to_vec(p);
            for j1 in 0..little.height() {
                for s1 in 0..little.widths[j1 as usize] {
                    for j2 in 0..little.height() {
                        for s2 in 0..little.widths[j2 as usize] {
                            let inner =
                                little.is_ancestor(little.id(j1, s1), little.id(j2, s2));
                            let outer = big.is_ancestor(
                                big.id(f[j1 as usize], s1),
                                big.id(f[j2 as usize], s2),
                            );
                            if inner != outer {
                                return fail(format!(
                                    "piece {f:?}: ({j1},{s1}) against ({j2},{s2})"
                                ));
                            }
                            compared += 1;
                        }
                    }
                }
            }
        }
        good(format!("{compared} node pairs transfer"))
    });

    suite.add("good-sets-lift", || {
        let mut lifted = 0u64;
        for step in 1..=tree_depth.max(1) {
            let little = suslin::suslin_tree_rank(&ts, step - 1)?;
            let big = suslin::suslin_tree_rank(&ts, step)?;
            let window = m64(&ts, step)?;
            let pieces: Vec<Vec<u64>> = ts
                .sets_of_rank_within(step - 1, window)?
                .iter()
                .map(to_vec)
                .collect();
            let goods = suslin::good_subsets(&little, ts.r(step))?;
            if goods.len() < 2 {
                return fail(format!("step {step}: no nontrivial good sets"));
            }
            for c in &goods {
                let ok = pieces.iter().any(|f| {
                    c.iter().all(|&x| {
                        let (j, sp) = little.level_pos(x);
                        let here = big.id(pieces[0][j as usize], sp);
                        let there = big.id(f[j as usize], sp);
                        big.is_ancestor(here, there)
                    })
                });
                if !ok {
                    return fail(format!("step {step}: no copy lifts {c:?}"));
                }
                lifted += 1;
            }
        }
        good(format!("{lifted} good sets lift"))
    });

    suite.add("amalgamation-order", || {
        let base = suslin::suslin_tree_rank(&ts, 1)?;
        let graft = base.relabel(vec![0, 2]);
        let branches: Vec<Vec<u32>> = (0..4u64)
            .map(|sp| vec![base.id(0, sp / 2), base.id(1, sp)])
            .collect();
        let am = suslin::amalgamate(&graft, &base, 1, &branches)?;
        am.validate()?;
        if am.widths != vec![2, 4, 4] || am.labels != vec![0, 1, 2] {
            return fail("amalgam has the wrong shape".into());
        }
        // the joint order materialized clause by clause over abstract
        // (level label, position) nodes
        let enc = |t: &FiniteTree, v: u32| {
            let (l, p) = t.level_pos(v);
            (t.labels[l as usize], p)
        };
        let mut rel: BTreeSet<((u64, u64), (u64, u64))> = BTreeSet::new();
        for t in [&graft, &base] {
            for a in 0..t.len() as u32 {
                for b in 0..t.len() as u32 {
                    if t.is_ancestor(a, b) {
                        rel.insert((enc(t, a), enc(t, b)));
                    }
                }
            }
        }
        for sp in 0..4u64 {
            let seam = graft.id(1, sp);
            for &x in &branches[sp as usize] {
                for b in 0..graft.len() as u32 {
                    if b == seam || graft.is_ancestor(seam, b) {
                        rel.insert((enc(&base, x), enc(&graft, b)));
                    }
                }
            }
        }
        for &(a, b) in &rel {
            if a == b || rel.contains(&(b, a)) {
                return fail(format!("joint order loops at {a:?}"));
            }
        }
        for &(a, b) in &rel {
            for &(c, d) in &rel {
                if b == c && !rel.contains(&(a, d)) {
                    return fail(format!("{a:?} below {b:?} below {d:?} breaks"));
                }
                if b == d && a != c && !(rel.contains(&(a, c)) || rel.contains(&(c, a))) {
                    return fail(format!("predecessors {a:?}, {c:?} of {b:?} incomparable"));
                }
            }
        }
        let mut got = BTreeSet::new();
        for a in 0..am.len() as u32 {
            for b in 0..am.len() as u32 {
                if am.is_ancestor(a, b) {
                    got.insert((enc(&am, a), enc(&am, b)));
                }
            }
        }
        if got != rel {
            return fail(format!("amalgam realizes {} pairs, clauses give {}", got.len(), rel.len()));
        }
        // predecessor sets are chains node by node
        for w in 0..am.len() as u32 {
            let preds: Vec<u32> = (0..am.len() as u32)
                .filter(|&u| u != w && am.is_ancestor(u, w))
                .collect();
            for (i, &u) in preds.iter().enumerate() {
                for &v in &preds[i + 1..] {
                    if !(am.is_ancestor(u, v) || am.is_ancestor(v, u)) {
                        return fail(format!("predecessors {u} and {v} of {w} incomparable"));
                    }
                }
            }
        }
        good(format!("{} ordered pairs over {} nodes", rel.len(), am.len()))
    });

    suite.finish()
}

// ---------------------------------------------------------------------
// forcing

/// The extension kernel: every cut of a member is a condition and reduces
/// back to a member, cuts of wider members refine cuts of narrower ones,
/// a two-block fragment answers trace and distance queries consistently
/// with the ground family, and the transport equivalence sweep holds over
/// a grid of at least `min_tuples` probes.
pub fn forcing_suite(cut_depth: u64, grid_betas: u64, min_tuples: u64) -> SuiteReport {
    let mut suite = Suite::new("forcing");
    let s = Scheme::new(TypeSpec::binary());

    suite.add("cut-round-trip", || {
        let mut fr = Fragment::new(Scheme::new(TypeSpec::binary()));
        let w = m64(&s, cut_depth)?;
        let mut count = 0u64;
        for k in 0..=cut_depth {
            for f in s.sets_of_rank_within(k, w)? {
                for alpha in f.iter() {
                    let q = cut(&s, &f, alpha, OMEGA)?;
                    if !fr.is_condition(q.set(), OMEGA)? {
                        return fail(format!("cut of {f} at {alpha} fails the clauses"));
                    }
                    if !s.is_member(&red(q.set(), OMEGA)?) {
                        return fail(format!("cut of {f} at {alpha} reduces off the family"));
                    }
                    count += 1;
                }
            }
        }
        let bad = [
            FinSet::new(vec![0, ext(1, 1)]),
            FinSet::new(vec![0, 1, 2, ext(1, 0)]),
            FinSet::new(vec![1, ext(1, 0)]),
        ];
        for b in &bad {
            if fr.is_condition(b, OMEGA)? {
                return fail(format!("malformed {b} accepted"));
            }
        }
        good(format!("{count} cuts validate and reduce back"))
    });

    suite.add("cut-refinement", || {
        let wlo = m64(&s, cut_depth)?;
        let whi = m64(&s, cut_depth + 1)?;
        let mut count = 0u64;
        for k in 1..cut_depth {
            for f in s.sets_of_rank_within(k, wlo)? {
                for alpha in f.iter() {
                    let p = cut(&s, &f, alpha, OMEGA)?;
                    for kk in k..=cut_depth {
                        for g in s.sets_of_rank_within(kk, whi)? {
                            if !g.contains(alpha) {
                                continue;
                            }
                            let q = cut(&s, &g, alpha, OMEGA)?;
                            if !leq(&s, &q, &p)? {
                                return fail(format!(
                                    "cut of {g} at {alpha} does not refine cut of {f}"
                                ));
                            }
                            count += 1;
                        }
                    }
                }
            }
        }
        good(format!("{count} refinements"))
    });

    suite.add("two-block-consistency", || {
        let mut fr = Fragment::new(Scheme::new(TypeSpec::binary()));
        fr.generic_build(0, &[Demand::Rank { k: 7 }])?;
        fr.generic_build(
            1,
            &[Demand::Root { beta: ext(2, 2), k: 1 }, Demand::Contain { alpha: 3 }],
        )?;
        for beta in 0..15u64 {
            for k in 0..=4u64 {
                if fr.closure_ext(beta, k)? != s.closure(beta, k)? {
                    return fail(format!("ground trace of {beta} at {k} drifts"));
                }
            }
        }
        for mask in 1u32..64 {
            let x = FinSet::new((0u64..6).filter(|i| mask >> i & 1 == 1).collect());
            if fr.member_of(&x)? != s.is_member(&x) {
                return fail(format!("ground membership of {x} drifts"));
            }
        }
        for (pts, label) in [
            ([ext(1, 0), ext(1, 1), ext(1, 2)], "first"),
            ([ext(2, 0), ext(2, 1), ext(2, 2)], "second"),
        ] {
            for &b in &pts {
                for k in 0..=3u64 {
                    let cb = fr.closure_ext(b, k)?;
                    for a in cb.iter() {
                        if fr.closure_ext(a, k)? != cb.below(a + 1) {
                            return fail(format!("{label} block: traces at {k} incoherent"));
                        }
                    }
                }
                for lo in 0..6u64 {
                    let r = fr.rho_ext(lo, b)?;
                    if r != fr.rho_ext(b, lo)? {
                        return fail(format!("{label} block: distance of ({lo},.) asymmetric"));
                    }
                    let mut k = 0;
                    while !fr.closure_ext(b, k)?.contains(lo) {
                        k += 1;
                    }
                    if r != k {
                        return fail(format!("{label} block: distance differs from least trace"));
                    }
                }
            }
        }
        let mut fr2 = Fragment::new(Scheme::new(TypeSpec::binary()));
        for chain in 0..fr.blocks() {
            for line in fr.log_lines(chain) {
                fr2.replay_line(&line)?;
            }
        }
        for chain in 0..fr.blocks() {
            if fr.log_lines(chain) != fr2.log_lines(chain) {
                return fail(format!("chain {chain} replays differently"));
            }
        }
        good("two fresh blocks answer consistently and replay".into())
    });

    suite.add("transport-grid", || {
        let mut fr = Fragment::new(Scheme::new(TypeSpec::binary()));
        fr.generic_build(
            0,
            &[Demand::Root { beta: ext(1, 1), k: 2 }, Demand::Rank { k: 6 }],
        )?;
        let mut betas: Vec<u64> = (6..6 + grid_betas).collect();
        betas.extend([ext(1, 0), ext(1, 1)]);
        let mut xis: Vec<u64> = (4..20).collect();
        xis.push(ext(1, 0));
        let report = forcing::verify_trans_equiv(&mut fr, 2, 3, &[4, 5], &betas, &xis)?;
        let tuples = report.checked + report.skipped;
        if let Some(m) = report.mismatches.first() {
            return fail(m.clone());
        }
        if tuples < min_tuples {
            return fail(format!("grid produced {tuples} tuples, wants {min_tuples}"));
        }
        if report.positive == 0 {
            return fail("the grid never produced a positive instance".into());
        }
        good(format!(
            "{tuples} tuples, {} checked, {} positive",
            report.checked, report.positive
        ))
    });

    suite.finish()
}

// ---------------------------------------------------------------------
// registry

/// Suites the verify entry point accepts, in display order.
pub const SUITES: &[&str] = &[
    "axioms",
    "restriction",
    "metric",
    "xi",
    "countryman",
    "certificates",
    "aronszajn",
    "capturing",
    "structures",
    "forcing",
];

fn merged(name: &str, parts: Vec<(String, SuiteReport)>) -> SuiteReport {
    let mut checks = Vec::new();
    for (label, rep) in parts {
        for c in rep.checks {
            checks.push(Check {
                name: format!("{label}/{}", c.name),
                pass: c.pass,
                detail: c.detail,
            });
        }
    }
    let pass = checks.iter().all(|c| c.pass);
    SuiteReport {
        suite: name.to_string(),
        pass,
        checks,
    }
}

/// Run one suite by name at its default coverage.  `window` rescales the
/// suite's principal window where it has one; the defaults are the widest
/// coverage the built-in budgets are tuned for.
pub fn run(name: &str, window: Option<u64>) -> Result<SuiteReport> {
    let both = [TypeSpec::star(), TypeSpec::binary()];
    let over = |parts: Vec<(String, SuiteReport)>| merged(name, parts);
    let rep = match name {
        "axioms" => over(
            both.iter()
                .map(|t| (t.label().to_string(), axioms(t, window.unwrap_or(6))))
                .collect(),
        ),
        "restriction" => over(
            both.iter()
                .map(|t| (t.label().to_string(), restriction(t, window.unwrap_or(6))))
                .collect(),
        ),
        "metric" => over(
            both.iter()
                .map(|t| (t.label().to_string(), metric(t, window.unwrap_or(50), 4)))
                .collect(),
        ),
        "xi" => over(
            both.iter()
                .map(|t| (t.label().to_string(), xi_suite(t, window.unwrap_or(50), 6)))
                .collect(),
        ),
        "countryman" => {
            let w = window.unwrap_or(40);
            over(
                both.iter()
                    .map(|t| (t.label().to_string(), countryman_suite(t, w, w.min(30))))
                    .collect(),
            )
        }
        "certificates" => certificates(window.unwrap_or(25)),
        "aronszajn" => aronszajn_suite(window.unwrap_or(30)),
        "capturing" => capturing_suite(window.unwrap_or(40)),
        "structures" => {
            let k = window.unwrap_or(3);
            structures(k, k.min(2))
        }
        "forcing" => {
            let floor = if window.is_none() { 1000 } else { 0 };
            forcing_suite(3, window.unwrap_or(20), floor)
        }
        other => {
            return Err(Error::BadInput(format!(
                "unknown suite {other}; expected one of {}",
                SUITES.join(", ")
            )))
        }
    };
    Ok(rep)
}
