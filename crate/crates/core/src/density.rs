//! Natural densities, block lifting and exact per-block counting.
//!
//! Upper natural density is a limsup, so every estimate here is a finite
//! proxy: the largest exact partial density `|A ∩ [1, n]| / n` over a tail
//! window `[tail_start, horizon]`. Claims about block growth (`c1`) and
//! sparse lifts (`c2`) drawn from a prefix are labeled as prefix evidence.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::Rational;
use crate::error::{Error, Result};
use crate::membership::{saturate, Certificate, CirclePoint, MembershipVerdict, SaturationAnswer};
use crate::sequences::{ArithChain, DerivedSeq, IntSequence};

/// A set of positive integers, given by a rule or explicitly.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum IndexSet {
    ExplicitSorted { elements: Vec<u64> },
    /// `{ ⌊c^j⌋ : j >= 1 }` without repetitions.
    GeometricRule { ratio: Rational },
    /// `{ step·j : j >= 1 }`.
    EveryNth { step: u64 },
    /// Disjoint, increasing closed intervals.
    Ranges { ranges: Vec<(u64, u64)> },
}

impl IndexSet {
    pub fn explicit(mut elements: Vec<u64>) -> Result<Self> {
        let n = elements.len();
        elements.sort_unstable();
        elements.dedup();
        if elements.len() != n || elements.first() == Some(&0) {
            return Err(Error::Hypothesis("explicit index sets must be distinct positive integers".into()));
        }
        Ok(IndexSet::ExplicitSorted { elements })
    }

    pub fn geometric(ratio: Rational) -> Result<Self> {
        if ratio <= Rational::one() {
            return Err(Error::Hypothesis(format!("geometric rule ratio {ratio} must exceed 1")));
        }
        Ok(IndexSet::GeometricRule { ratio })
    }

    pub fn every_nth(step: u64) -> Result<Self> {
        if step == 0 {
            return Err(Error::Hypothesis("step must be positive".into()));
        }
        Ok(IndexSet::EveryNth { step })
    }

    /// All naturals up to any horizon.
    pub fn naturals() -> Self {
        IndexSet::EveryNth { step: 1 }
    }

    pub fn is_rule(&self) -> bool {
        matches!(self, IndexSet::GeometricRule { .. } | IndexSet::EveryNth { .. })
    }

    /// Elements `<= horizon`, increasing.
    pub fn elements_up_to(&self, horizon: u64) -> Vec<u64> {
        match self {
            IndexSet::ExplicitSorted { elements } => elements.iter().copied().take_while(|&e| e <= horizon).collect(),
            IndexSet::EveryNth { step } => (1..=horizon / step).map(|j| j * step).collect(),
            IndexSet::GeometricRule { ratio } => {
                let mut out: Vec<u64> = Vec::new();
                let mut power = ratio.clone();
                loop {
                    let v = power.floor();
                    match v.to_u64() {
                        Some(v) if v <= horizon => {
                            if out.last() != Some(&v) {
                                out.push(v);
                            }
                        }
                        _ => break,
                    }
                    power = &power * ratio;
                }
                out
            }
            IndexSet::Ranges { ranges } => ranges
                .iter()
                .take_while(|r| r.0 <= horizon)
                .flat_map(|&(s, e)| s..=e.min(horizon))
                .collect(),
        }
    }

    /// The same elements `<= horizon` as maximal intervals.
    pub fn ranges_up_to(&self, horizon: u64) -> Vec<(u64, u64)> {
        match self {
            IndexSet::Ranges { ranges } => {
                ranges.iter().take_while(|r| r.0 <= horizon).map(|&(s, e)| (s, e.min(horizon))).collect()
            }
            IndexSet::EveryNth { step: 1 } if horizon >= 1 => vec![(1, horizon)],
            _ => merge_points(self.elements_up_to(horizon)),
        }
    }
}

fn parse_list<T: std::str::FromStr>(body: &str, what: &str) -> Result<Vec<T>> {
    body.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| t.trim().parse().map_err(|_| Error::InvalidDescriptor(format!("bad {what} {t:?}"))))
        .collect()
}

/// Compact forms: `naturals`, `every:N`, `geometric:C`, `explicit:1,4,9`,
/// `ranges:1-5,9-12`, or the JSON object.
impl std::str::FromStr for IndexSet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.starts_with('{') {
            return serde_json::from_str(s).map_err(|e| Error::InvalidDescriptor(e.to_string()));
        }
        let (head, body) = s.split_once(':').unwrap_or((s, ""));
        match head {
            "naturals" if body.is_empty() => Ok(IndexSet::naturals()),
            "every" => IndexSet::every_nth(body.parse().map_err(|_| Error::InvalidDescriptor(format!("bad step {body:?}")))?),
            "geometric" => IndexSet::geometric(body.parse()?),
            "explicit" => IndexSet::explicit(parse_list(body, "element")?),
            "ranges" => {
                let mut ranges: Vec<(u64, u64)> = Vec::new();
                for part in body.split(',').filter(|t| !t.trim().is_empty()) {
                    let (a, b) = part.split_once('-').unwrap_or((part, part));
                    let bad = || Error::InvalidDescriptor(format!("bad range {part:?}"));
                    let (a, b): (u64, u64) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
                    if a == 0 || b < a || ranges.last().is_some_and(|r| r.1 + 1 >= a) {
                        return Err(bad());
                    }
                    ranges.push((a, b));
                }
                Ok(IndexSet::Ranges { ranges })
            }
            _ => Err(Error::InvalidDescriptor(format!("unknown index set {s:?}"))),
        }
    }
}

fn merge_points(points: Vec<u64>) -> Vec<(u64, u64)> {
    let mut out: Vec<(u64, u64)> = Vec::new();
    for p in points {
        match out.last_mut() {
            Some((_, e)) if *e + 1 == p => *e = p,
            _ => out.push((p, p)),
        }
    }
    out
}

/// Counts `|A ∩ [1, n]|` for a fixed interval decomposition of `A`.
struct Counter {
    ranges: Vec<(u64, u64)>,
    /// `before[i]` = number of elements in `ranges[..i]`.
    before: Vec<u64>,
}

impl Counter {
    fn new(ranges: Vec<(u64, u64)>) -> Self {
        let mut before = Vec::with_capacity(ranges.len());
        let mut acc = 0;
        for &(s, e) in &ranges {
            before.push(acc);
            acc += e - s + 1;
        }
        Counter { ranges, before }
    }

    fn count(&self, n: u64) -> u64 {
        let i = self.ranges.partition_point(|r| r.0 <= n);
        if i == 0 {
            return 0;
        }
        let (s, e) = self.ranges[i - 1];
        self.before[i - 1] + e.min(n) - s + 1
    }
}

/// Finite-horizon proxy for the upper natural density.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DensityEstimate {
    pub horizon: u64,
    pub tail_start: u64,
    pub sup_tail_partial: Rational,
    pub argmax: u64,
    pub trace: Vec<(u64, Rational)>,
}

fn partial(count: u64, n: u64) -> Rational {
    Rational::new(count, n).expect("n >= 1")
}

/// Powers of two up to `horizon`, plus `tail_start` and `horizon`.
fn log_checkpoints(horizon: u64, tail_start: u64) -> Vec<u64> {
    let mut cps: Vec<u64> = std::iter::successors(Some(1u64), |&n| n.checked_mul(2)).take_while(|&n| n <= horizon).collect();
    cps.push(tail_start);
    cps.push(horizon);
    cps.sort_unstable();
    cps.dedup();
    cps
}

fn check_window(horizon: u64, tail_start: u64) -> Result<()> {
    if tail_start == 0 || tail_start > horizon {
        return Err(Error::Hypothesis(format!("need 1 <= tail_start ({tail_start}) <= horizon ({horizon})")));
    }
    Ok(())
}

fn estimate_over(counter: &Counter, candidates: impl Iterator<Item = u64>, horizon: u64, tail_start: u64) -> DensityEstimate {
    let mut best: Option<(Rational, u64)> = None;
    for n in candidates.filter(|&n| tail_start <= n && n <= horizon) {
        let d = partial(counter.count(n), n);
        if best.as_ref().is_none_or(|(b, _)| d > *b) {
            best = Some((d, n));
        }
    }
    let (sup_tail_partial, argmax) = best.unwrap_or_else(|| (partial(counter.count(tail_start), tail_start), tail_start));
    let trace = log_checkpoints(horizon, tail_start).into_iter().map(|n| (n, partial(counter.count(n), n))).collect();
    DensityEstimate { horizon, tail_start, sup_tail_partial, argmax, trace }
}

/// Exact `max_{tail_start <= n <= horizon} |A ∩ [1, n]| / n`.
///
/// Inside a run of consecutive elements the partial density increases and in
/// a gap it decreases, so only `tail_start` and run ends need evaluating.
pub fn upper_density(a: &IndexSet, horizon: u64, tail_start: u64) -> Result<DensityEstimate> {
    check_window(horizon, tail_start)?;
    let counter = Counter::new(a.ranges_up_to(horizon));
    let ends: Vec<u64> = counter.ranges.iter().map(|r| r.1).collect();
    Ok(estimate_over(&counter, std::iter::once(tail_start).chain(ends), horizon, tail_start))
}

/// Like [`upper_density`], but the sup runs over the given checkpoints only.
pub fn upper_density_at(a: &IndexSet, checkpoints: &[u64], horizon: u64, tail_start: u64) -> Result<DensityEstimate> {
    check_window(horizon, tail_start)?;
    let counter = Counter::new(a.ranges_up_to(horizon));
    Ok(estimate_over(&counter, checkpoints.iter().copied(), horizon, tail_start))
}

/// `L(A) = ⋃_{k ∈ A} N_k` as a union of index intervals. Rule-backed sets are
/// truncated to the materialized blocks; explicit elements beyond them are an error.
pub fn lift(d: &DerivedSeq, a: &IndexSet) -> Result<IndexSet> {
    let blocks = d.block_count() as u64;
    if let IndexSet::ExplicitSorted { elements } = a {
        if let Some(&k) = elements.last().filter(|&&k| k > blocks) {
            return Err(Error::OutOfHorizon { index: k, horizon: blocks });
        }
    }
    let mut ranges: Vec<(u64, u64)> = Vec::new();
    for k in a.elements_up_to(blocks) {
        let b = d.block(k as usize);
        match ranges.last_mut() {
            Some((_, e)) if *e + 1 == b.start => *e = b.end,
            _ => ranges.push((b.start, b.end)),
        }
    }
    Ok(IndexSet::Ranges { ranges })
}

/// Prefix evidence that block sizes grow geometrically (`c1`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct C1Report {
    pub block_horizon: usize,
    /// `min_{k <= block_horizon} n_{k+1} / n_k`.
    pub tau_inf: Rational,
    pub argmin: usize,
    /// The same minimum over the last half of the prefix, exposing a trend to 1.
    pub trailing_tau_inf: Rational,
    pub holds_on_prefix: bool,
    pub evidence: &'static str,
}

pub const PREFIX_EVIDENCE: &str = "prefix evidence";

fn with_blocks(d: &DerivedSeq, blocks: usize) -> Result<std::borrow::Cow<'_, DerivedSeq>> {
    if d.block_count() >= blocks {
        return Ok(std::borrow::Cow::Borrowed(d));
    }
    let mut d = d.clone();
    d.extend_blocks(blocks)?;
    Ok(std::borrow::Cow::Owned(d))
}

pub fn check_c1(d: &DerivedSeq, block_horizon: usize) -> Result<C1Report> {
    if block_horizon < 2 {
        return Err(Error::Hypothesis("block_horizon must be at least 2".into()));
    }
    let d = with_blocks(d, block_horizon)?;
    let ratio = |k: usize| Rational::new(d.anchor(k + 1), d.anchor(k)).expect("anchors are positive");
    let min_over = |ks: std::ops::RangeInclusive<usize>| {
        ks.map(|k| (ratio(k), k)).fold(None::<(Rational, usize)>, |acc, cur| match acc {
            Some(best) if best.0 <= cur.0 => Some(best),
            _ => Some(cur),
        })
    };
    let (tau_inf, argmin) = min_over(1..=block_horizon).expect("nonempty");
    let (trailing_tau_inf, _) = min_over(block_horizon.div_ceil(2).max(1)..=block_horizon).expect("nonempty");
    Ok(C1Report {
        block_horizon,
        holds_on_prefix: tau_inf > Rational::one(),
        tau_inf,
        argmin,
        trailing_tau_inf,
        evidence: PREFIX_EVIDENCE,
    })
}

/// One row of `|N_k| / (n_{k+1} - 1) >= 1 - n_k / n_{k+1} >= 1 - 1/τ`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BlockBound {
    pub k: usize,
    pub lhs: Rational,
    pub middle: Rational,
    pub rhs: Rational,
    /// `n_{k+1} >= τ n_k`.
    pub holds: bool,
}

pub fn per_block_c1c2_bound(d: &DerivedSeq, tau: &Rational, block_horizon: usize) -> Result<Vec<BlockBound>> {
    if *tau <= Rational::one() {
        return Err(Error::Hypothesis(format!("tau {tau} must exceed 1")));
    }
    let d = with_blocks(d, block_horizon)?;
    let rhs = &Rational::one() - &tau.recip();
    Ok((1..=block_horizon)
        .map(|k| {
            let (nk, nk1) = (d.anchor(k), d.anchor(k + 1));
            let lhs = Rational::new(d.block_size(k), nk1 - 1).expect("n_{k+1} >= 2");
            let middle = Rational::new(nk1 - nk, nk1).expect("positive");
            let holds = Rational::from_integer(nk1) >= tau * &Rational::from_integer(nk);
            BlockBound { k, lhs, middle, rhs: rhs.clone(), holds }
        })
        .collect())
}

/// How a candidate infinite `A` is produced for the sparse-lift (`c2`) witness search.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "strategy", rename_all = "snake_case")]
pub enum Strategy {
    Set { set: IndexSet },
    /// Each next block is the `k ∈ (last, gap·last]` minimizing the lifted
    /// partial density at the end of `N_k`.
    Greedy { max_gap: u64 },
}

impl Strategy {
    /// Geometric rules with `c ∈ {3/2, 2, 4}`, every 8th block and greedy with gap 4.
    pub fn defaults() -> Vec<Strategy> {
        let mut out: Vec<Strategy> = ["3/2", "2", "4"]
            .iter()
            .map(|c| Strategy::Set { set: IndexSet::geometric(c.parse().expect("literal")).expect("c > 1") })
            .collect();
        out.push(Strategy::Set { set: IndexSet::EveryNth { step: 8 } });
        out.push(Strategy::Greedy { max_gap: 4 });
        out
    }

    pub fn label(&self) -> String {
        match self {
            Strategy::Set { set: IndexSet::GeometricRule { ratio } } => format!("geometric:{ratio}"),
            Strategy::Set { set: IndexSet::EveryNth { step } } => format!("every:{step}"),
            Strategy::Set { set: IndexSet::ExplicitSorted { .. } } => "explicit".into(),
            Strategy::Set { set: IndexSet::Ranges { .. } } => "ranges".into(),
            Strategy::Greedy { max_gap } => format!("greedy:{max_gap}"),
        }
    }

    fn blocks(&self, d: &DerivedSeq) -> Vec<u64> {
        let blocks = d.block_count() as u64;
        match self {
            Strategy::Set { set } => set.elements_up_to(blocks),
            Strategy::Greedy { max_gap } => {
                let gap = (*max_gap).max(2);
                let mut picks = Vec::new();
                let (mut last, mut lifted) = (0u64, 0u64);
                while last < blocks {
                    let hi = if last == 0 { gap } else { last.saturating_mul(gap) }.min(blocks);
                    let best = (last + 1..=hi)
                        .map(|k| {
                            let end = d.anchor(k as usize + 1) - 1;
                            (Rational::new(lifted + d.block_size(k as usize), end).expect("end >= 1"), k)
                        })
                        .min_by(|a, b| a.0.cmp(&b.0).then(a.1.cmp(&b.1)))
                        .expect("nonempty candidate range");
                    lifted += d.block_size(best.1 as usize);
                    picks.push(best.1);
                    last = best.1;
                }
                picks
            }
        }
    }
}

/// `greedy:G`, or any index-set form.
impl std::str::FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().strip_prefix("greedy:") {
            Some(g) => match g.parse::<u64>() {
                Ok(max_gap) if max_gap >= 2 => Ok(Strategy::Greedy { max_gap }),
                _ => Err(Error::InvalidDescriptor(format!("bad greedy gap {g:?}"))),
            },
            None => Ok(Strategy::Set { set: s.parse()? }),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StrategyOutcome {
    pub strategy: String,
    pub blocks: Vec<u64>,
    pub estimate: DensityEstimate,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct C2Search {
    pub best: StrategyOutcome,
    pub evaluated: Vec<StrategyOutcome>,
    pub evidence: &'static str,
}

/// Searches for an infinite `A` whose lift has small upper density, which is
/// heuristic evidence against a sparse lift (`c2`). Partial densities are taken at the ends of
/// lifted blocks: between two of them the partial density only decreases.
pub fn c2_witness_search(d: &DerivedSeq, strategies: &[Strategy], block_horizon: usize, tail_start: u64) -> Result<C2Search> {
    if strategies.is_empty() {
        return Err(Error::Hypothesis("at least one strategy is required".into()));
    }
    let d = with_blocks(d, block_horizon)?;
    let d = if d.block_count() > block_horizon {
        let mut trimmed = DerivedSeq::new(d.chain().clone(), block_horizon)?;
        trimmed.extend_blocks(block_horizon)?;
        std::borrow::Cow::Owned(trimmed)
    } else {
        d
    };
    let horizon = d.horizon();
    let mut evaluated = Vec::with_capacity(strategies.len());
    for s in strategies {
        let blocks = s.blocks(&d);
        let lifted = lift(&d, &IndexSet::ExplicitSorted { elements: blocks.clone() })?;
        let mut checkpoints: Vec<u64> = blocks.iter().map(|&k| d.block(k as usize).end).collect();
        checkpoints.push(horizon);
        let estimate = upper_density_at(&lifted, &checkpoints, horizon, tail_start)?;
        evaluated.push(StrategyOutcome { strategy: s.label(), blocks, estimate });
    }
    let best = evaluated
        .iter()
        .min_by(|a, b| a.estimate.sup_tail_partial.cmp(&b.estimate.sup_tail_partial))
        .cloned()
        .expect("nonempty");
    Ok(C2Search { best, evaluated, evidence: PREFIX_EVIDENCE })
}

/// Per-block exceptional counts for the derived sequence of a chain.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockCount {
    pub k: usize,
    pub size: u64,
    /// `|{n ∈ N_k : ‖d_n x‖ >= eps}|`.
    pub count_at_least_eps: u64,
    /// `|{n ∈ N_k : ‖d_n x‖ != 0}|`.
    pub count_nonzero: u64,
}

/// `‖s/q‖ >= eps` for a residue `s`, by exact integer cross-multiplication.
fn residue_at_least(s: u64, q: u64, eps_num: u128, eps_den: u128) -> bool {
    let folded = s.min(q - s) as u128;
    folded * eps_den >= eps_num * q as u128
}

/// Prefix tables `#{1 <= r <= R : ‖r ρ / q‖ >= eps}` for `R < period`, keyed by `ρ`.
struct ResidueCache {
    q: u64,
    eps_num: u128,
    eps_den: u128,
    tables: RwLock<HashMap<u64, Arc<Vec<u64>>>>,
}

impl ResidueCache {
    fn new(q: u64, eps: &Rational) -> Result<Self> {
        let eps_num = eps.numer().to_u128().ok_or_else(|| Error::InvalidEpsilon(eps.to_string()))?;
        let eps_den = eps.denom().to_u128().ok_or_else(|| Error::InvalidEpsilon(eps.to_string()))?;
        Ok(ResidueCache { q, eps_num, eps_den, tables: RwLock::new(HashMap::new()) })
    }

    fn table(&self, rho: u64) -> Arc<Vec<u64>> {
        if let Some(t) = self.tables.read().expect("cache lock").get(&rho) {
            return Arc::clone(t);
        }
        let period = self.q / rho.gcd(&self.q);
        let mut prefix = Vec::with_capacity(period as usize + 1);
        prefix.push(0u64);
        let mut s = 0u64;
        let mut acc = 0u64;
        for _ in 0..period {
            s = ((s as u128 + rho as u128) % self.q as u128) as u64;
            acc += residue_at_least(s, self.q, self.eps_num, self.eps_den) as u64;
            prefix.push(acc);
        }
        let table = Arc::new(prefix);
        self.tables.write().expect("cache lock").entry(rho).or_insert(table).clone()
    }
}

/// Exact per-block counts via `‖r a_k x‖ = ‖r ρ_k / q‖` with `ρ_k = a_k p mod q`,
/// which is periodic in `r` with period `m_k = q / gcd(q, ρ_k)`.
pub fn block_counts(a: &ArithChain, x: &CirclePoint, eps: &Rational, block_horizon: usize) -> Result<Vec<BlockCount>> {
    if !eps.is_positive() {
        return Err(Error::InvalidEpsilon(eps.to_string()));
    }
    let q = x.denom_u64()?;
    let p = x.numer();
    let mut a = std::borrow::Cow::Borrowed(a);
    if a.len() < block_horizon + 1 {
        a.to_mut().extend_to(block_horizon + 1)?;
    }
    let cache = ResidueCache::new(q, eps)?;
    let q_big = BigUint::from(q);
    (1..=block_horizon)
        .into_par_iter()
        .map(|k| {
            let size = (a.q(k + 1) - 1u32).to_u64().ok_or(Error::IndexOverflow { block: k })?;
            let rho = ((a.a(k) % &q_big) * &p % &q_big).to_u64().expect("below q");
            let period = q / rho.gcd(&q);
            let table = cache.table(rho);
            let count_at_least_eps = (size / period) * table[period as usize] + table[(size % period) as usize];
            let count_nonzero = size - size / period;
            Ok(BlockCount { k, size, count_at_least_eps, count_nonzero })
        })
        .collect()
}

/// `‖u x‖ >= eps`, from the residue `u p mod q` without building a fraction.
pub fn seminorm_at_least(x: &CirclePoint, u: &BigUint, eps: &Rational) -> bool {
    let q = x.denom();
    let rho = (u * x.numer()) % &q;
    let other = &q - &rho;
    let folded = if rho <= other { rho } else { other };
    let eps_num = eps.numer().to_biguint().unwrap_or_default();
    let eps_den = eps.denom().to_biguint().expect("positive");
    folded * eps_den >= eps_num * q
}

/// `E = {n <= horizon : ‖u_n x‖ >= eps}` by enumeration, as intervals.
pub fn exceptional_set<S: IntSequence + ?Sized>(u: &S, x: &CirclePoint, eps: &Rational, horizon: u64) -> Result<IndexSet> {
    if !eps.is_positive() {
        return Err(Error::InvalidEpsilon(eps.to_string()));
    }
    if horizon > u.horizon() {
        return Err(Error::OutOfHorizon { index: horizon, horizon: u.horizon() });
    }
    let mut ranges: Vec<(u64, u64)> = Vec::new();
    for n in 1..=horizon {
        if seminorm_at_least(x, &u.term(n).expect("within horizon"), eps) {
            match ranges.last_mut() {
                Some((_, e)) if *e + 1 == n => *e = n,
                _ => ranges.push((n, n)),
            }
        }
    }
    Ok(IndexSet::Ranges { ranges })
}

/// Density trace of the exceptional set, by direct enumeration of the sequence.
pub fn statistical_trace<S: IntSequence + ?Sized>(
    u: &S,
    x: &CirclePoint,
    eps: &Rational,
    horizon: u64,
    tail_start: u64,
) -> Result<DensityEstimate> {
    let e = exceptional_set(u, x, eps, horizon)?;
    upper_density(&e, horizon, tail_start)
}

/// Blocks inspected after the gcd stabilizes.
pub const DEFAULT_EXTRA_BLOCKS: usize = 50;

/// Decides `x ∈ t^s_d(𝕋)` for the derived sequence `d` of `a`. A `NonMember`
/// carries an exact lower bound on the partial density of `{n : ‖d_n x‖ != 0}`
/// at the end of block `s + extra_blocks`, where `s` is the stabilization index.
pub fn decide_statistical_t_d(a: &ArithChain, x: &CirclePoint, extra_blocks: usize) -> Result<MembershipVerdict> {
    let q = x.denom_u64()?;
    let sat = saturate(a, q);
    let cert = match sat.answer {
        SaturationAnswer::Yes { witness } => Certificate::DividesTerm { n: witness },
        SaturationAnswer::Never { .. } => {
            let blocks = sat.stabilization_index + extra_blocks;
            let eps = Rational::new(1u64, q)?;
            let counts = block_counts(a, x, &eps, blocks)?;
            for c in &counts[sat.stabilization_index - 1..] {
                if 2 * c.count_nonzero < c.size {
                    return Err(Error::Hypothesis(format!("block {} has {} of {} nonzero", c.k, c.count_nonzero, c.size)));
                }
            }
            let nonzero: u64 = counts.iter().map(|c| c.count_nonzero).sum();
            let horizon: u64 = counts.iter().map(|c| c.size).sum();
            Certificate::DensityLowerBound { bound: partial(nonzero, horizon), horizon }
        }
        SaturationAnswer::Unknown { horizon } => {
            let d = DerivedSeq::new(a.clone(), horizon.min(a.len()).saturating_sub(1))?;
            let last = (1..=d.horizon())
                .rev()
                .find(|&n| !x.scaled_seminorm(&d.term(n).expect("within horizon")).is_zero())
                .unwrap_or(0);
            Certificate::HorizonEvidence { horizon: d.horizon(), last_nonzero_index: last }
        }
    };
    Ok(MembershipVerdict::from_certificate(cert))
}

/// Block-end partial densities of the exceptional set from block counts:
/// `(n_{k+1} - 1, Σ_{l<=k} |N_l(eps)| / (n_{k+1} - 1))`.
pub fn block_end_densities(counts: &[BlockCount]) -> Vec<(u64, Rational)> {
    let mut end = 0u64;
    let mut acc = 0u64;
    counts
        .iter()
        .map(|c| {
            end += c.size;
            acc += c.count_at_least_eps;
            (end, partial(acc, end))
        })
        .collect()
}
