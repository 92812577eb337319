//! Exhaustive and randomized checks of the quantitative lemmas behind the
//! density results, with exact arithmetic throughout.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{seminorm, Rational};
use crate::density::{block_counts, block_end_densities, check_c1, statistical_trace, BlockCount};
use crate::error::{Error, Result};
use crate::membership::{decide_t_u, member_generated, orbit, Certificate, ChainLike, CirclePoint, DecideConfig, Status};
use crate::sequences::{derive, ArithChain, DerivedSeq, IntSequence, SeqDescriptor};

/// Result of a sweep: how many cases ran, which failed, and the tightest margin.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepReport<F> {
    pub cases_checked: u64,
    pub failures: Vec<F>,
    /// `None` only when no case was checked.
    pub min_slack: Option<Rational>,
}

impl<F> Default for SweepReport<F> {
    fn default() -> Self {
        SweepReport { cases_checked: 0, failures: Vec::new(), min_slack: None }
    }
}

impl<F> SweepReport<F> {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    /// Associative merge: sums cases, concatenates failures, keeps the smaller slack.
    pub fn merge(mut self, other: SweepReport<F>) -> Self {
        self.cases_checked += other.cases_checked;
        self.failures.extend(other.failures);
        self.min_slack = match (self.min_slack, other.min_slack) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        self
    }

    fn record(&mut self, slack: Rational) {
        self.cases_checked += 1;
        if self.min_slack.as_ref().is_none_or(|m| slack < *m) {
            self.min_slack = Some(slack);
        }
    }
}

/// Count of `αℤ` in a closed interval of length `l`, against `l/α ± 1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct L1Check {
    pub k: u64,
    pub length: Rational,
    pub lower: Rational,
    pub upper: Rational,
    /// `⌈l/α⌉ - 1 <= k`, a sharper integral form of the lower bound.
    pub ceil_lower: Rational,
    pub holds: bool,
}

pub fn verify_l1(low: &Rational, high: &Rational, alpha: &Rational) -> Result<L1Check> {
    if !alpha.is_positive() {
        return Err(Error::Hypothesis(format!("alpha {alpha} must be positive")));
    }
    if high < low {
        return Err(Error::Hypothesis(format!("empty interval [{low}, {high}]")));
    }
    let k = ((high / alpha).floor() - (low / alpha).ceil() + 1u32).to_u64().expect("nonnegative count");
    let length = high - low;
    let scaled = &length / alpha;
    let lower = &scaled - &Rational::one();
    let upper = &scaled + &Rational::one();
    let ceil_lower = Rational::from_integer(scaled.ceil() - 1u32);
    let kr = Rational::from_integer(k);
    let holds = lower <= kr && ceil_lower <= kr && kr <= upper;
    Ok(L1Check { k, length, lower, upper, ceil_lower, holds })
}

/// A violated case of the `p/9` counting bound.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct L2Failure {
    pub alpha: Rational,
    pub eps: Rational,
    pub p: u64,
    pub count: u64,
}

/// Largest admissible `eps` (exclusive).
pub fn ninth() -> Rational {
    Rational::ratio(1, 9)
}

fn check_eps(eps: &Rational) -> Result<()> {
    if !eps.is_positive() || *eps >= ninth() {
        return Err(Error::InvalidEpsilon(eps.to_string()));
    }
    Ok(())
}

fn small_eps(eps: &Rational) -> Result<(u64, u64)> {
    let num = eps.numer().to_u64().ok_or_else(|| Error::InvalidEpsilon(eps.to_string()))?;
    let den = eps.denom().to_u64().ok_or_else(|| Error::InvalidEpsilon(eps.to_string()))?;
    Ok((num, den))
}

/// For every reduced `α = s/t <= 1/2` with `t <= den_max`, every `eps` and
/// every `p <= p_max` with `pα >= 1/4`, checks
/// `|{r <= p : ‖rα‖ >= eps}| >= p/9`.
pub fn sweep_l2(p_max: u64, den_max: u64, eps_list: &[Rational]) -> Result<SweepReport<L2Failure>> {
    if den_max < 2 {
        return Err(Error::Hypothesis("den_max must be at least 2".into()));
    }
    let eps_small: Vec<(u64, u64)> = eps_list
        .iter()
        .map(|e| check_eps(e).and_then(|_| small_eps(e)))
        .collect::<Result<_>>()?;
    let per_den: Vec<SweepReport<L2Failure>> = (2..=den_max)
        .into_par_iter()
        .map(|t| {
            let mut report = SweepReport::default();
            for s in (1..=t / 2).filter(|s| s.gcd(&t) == 1) {
                for (eps, &(en, ed)) in eps_list.iter().zip(&eps_small) {
                    let mut count = 0u64;
                    for p in 1..=p_max {
                        let res = (p as u128 * s as u128 % t as u128) as u64;
                        let folded = res.min(t - res) as u128;
                        count += (folded * ed as u128 >= en as u128 * t as u128) as u64;
                        if 4 * p * s < t {
                            continue;
                        }
                        let margin = 9 * count as i64 - p as i64;
                        if margin < 0 {
                            report.failures.push(L2Failure {
                                alpha: Rational::new(s, t).expect("t > 0"),
                                eps: eps.clone(),
                                p,
                                count,
                            });
                        }
                        report.record(Rational::ratio(margin, 9));
                    }
                }
            }
            report
        })
        .collect();
    Ok(per_den.into_iter().fold(SweepReport::default(), SweepReport::merge))
}

/// Counts `r <= p` with `‖rα‖ >= eps` by direct seminorm evaluation.
pub fn l2_count(alpha: &Rational, p: u64, eps: &Rational) -> u64 {
    (1..=p).filter(|&r| seminorm(&(alpha * &Rational::from_integer(r))).value() >= eps).count() as u64
}

/// Witness for the escape lemma: the least `m` with `v_m ‖z‖ > γ`, `v_0 = 1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Basic1Witness {
    pub m: u64,
    pub gamma: Rational,
    /// `v_{m-1} ‖z‖`.
    pub before: Rational,
    /// `v_m ‖z‖`.
    pub at: Rational,
    /// `‖v_m z‖`.
    pub seminorm_at: Rational,
    /// `before <= γ < at <= 1/2` and `‖v_m z‖ = at`.
    pub sandwich_holds: bool,
}

pub fn verify_basic1<S: IntSequence + ?Sized>(v: &S, q: &Rational, z: &Rational) -> Result<Basic1Witness> {
    if *q < Rational::one() {
        return Err(Error::Hypothesis(format!("ratio bound {q} must be at least 1")));
    }
    let gamma = (q * &Rational::from(2)).recip();
    let nz = seminorm(z).into_value();
    if nz.is_zero() || nz > gamma {
        return Err(Error::Hypothesis(format!("need 0 < ‖z‖ = {nz} <= {gamma}")));
    }
    let mut prev = BigUint::from(1u32);
    for m in 1..=v.horizon() {
        let cur = v.term(m).expect("within horizon").into_owned();
        let at = nz.scale(&cur);
        if at > gamma {
            let sup = v.ratio_bound(m)?;
            if sup > *q {
                return Err(Error::UnboundedRatiosAtHorizon { sup: sup.to_string(), cap: q.to_string(), horizon: m });
            }
            let before = nz.scale(&prev);
            let seminorm_at = seminorm(&z.scale(&cur)).into_value();
            let sandwich_holds = before <= gamma && at <= Rational::half() && seminorm_at == at;
            return Ok(Basic1Witness { m, gamma, before, at, seminorm_at, sandwich_holds });
        }
        prev = cur;
    }
    Err(Error::HorizonExhausted { horizon: v.horizon() })
}

/// Witness block for the per-block `1/9` lemma.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct L3Witness {
    pub k: usize,
    pub count: u64,
    pub size: u64,
    /// Blocks in `l..=k` whose counts were recomputed by enumeration.
    pub enumerated_blocks: usize,
}

/// Blocks at most this long are re-counted term by term.
pub const ENUMERATION_LIMIT: u64 = 1 << 16;

fn require_non_member(a: &ArithChain, x: &CirclePoint) -> Result<()> {
    let verdict = member_generated(a, x)?;
    if verdict.status != Status::NonMember {
        return Err(Error::Hypothesis(format!("{x} must lie outside the generated subgroup, got {:?}", verdict.status)));
    }
    Ok(())
}

fn enumerate_block(d: &DerivedSeq, x: &CirclePoint, eps: &Rational, k: usize) -> Result<u64> {
    let b = d.block(k);
    Ok(orbit(d, x, b.start..=b.end)?.iter().filter(|v| v.value() >= eps).count() as u64)
}

fn cross_check(d: &DerivedSeq, x: &CirclePoint, eps: &Rational, c: &BlockCount) -> Result<bool> {
    if c.size > ENUMERATION_LIMIT {
        return Ok(false);
    }
    let slow = enumerate_block(d, x, eps, c.k)?;
    if slow != c.count_at_least_eps {
        return Err(Error::Hypothesis(format!("block {}: residue count {} but enumeration {}", c.k, c.count_at_least_eps, slow)));
    }
    Ok(true)
}

pub fn verify_l3(a: &ArithChain, x: &CirclePoint, eps: &Rational, l: usize, block_horizon: usize) -> Result<L3Witness> {
    check_eps(eps)?;
    if l == 0 || l > block_horizon {
        return Err(Error::Hypothesis(format!("need 1 <= l ({l}) <= block_horizon ({block_horizon})")));
    }
    require_non_member(a, x)?;
    let counts = block_counts(a, x, eps, block_horizon)?;
    let witness = counts[l - 1..].iter().find(|c| 9 * c.count_at_least_eps >= c.size);
    let Some(w) = witness else {
        return Err(Error::HorizonExhausted { horizon: block_horizon as u64 });
    };
    let small = counts[l - 1..w.k].iter().filter(|c| c.size <= ENUMERATION_LIMIT).map(|c| c.k).max().unwrap_or(0);
    let mut enumerated_blocks = 0;
    if small > 0 {
        let d = derive(a, small)?;
        for c in &counts[l - 1..w.k] {
            enumerated_blocks += cross_check(&d, x, eps, c)? as usize;
        }
    }
    Ok(L3Witness { k: w.k, count: w.count_at_least_eps, size: w.size, enumerated_blocks })
}

/// Measured quantities from the density-threshold argument for chains with
/// geometric block growth.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct T1Report {
    pub block_horizon: usize,
    pub tau: Rational,
    /// `(1/10)(1 - 1/τ)`.
    pub delta: Rational,
    /// `(1/9)(1 - 1/τ)`.
    pub ninth_bound: Rational,
    /// `(n_{k+1} - 1, |E ∩ [1, n_{k+1} - 1]| / (n_{k+1} - 1))` for every block.
    pub block_end_densities: Vec<(u64, Rational)>,
    pub final_density: Rational,
    /// The final density recomputed term by term, when the horizon allows it.
    pub enumerated_final_density: Option<Rational>,
    /// Blocks `k >= 2` violating `|N_k(eps)| >= |N_k| / 9`.
    pub per_block_failures: Vec<usize>,
    /// Block ends in the last half of the prefix exceeding `ninth_bound`.
    pub trailing_above_ninth: usize,
    pub holds: bool,
}

/// Horizons up to this size are re-enumerated in [`t1_threshold_experiment`].
pub const T1_ENUMERATION_LIMIT: u64 = 1 << 22;

pub fn t1_threshold_experiment(a: &ArithChain, x: &CirclePoint, eps: &Rational, block_horizon: usize) -> Result<T1Report> {
    check_eps(eps)?;
    require_non_member(a, x)?;
    let d = derive(a, block_horizon)?;
    let c1 = check_c1(&d, block_horizon)?;
    if !c1.holds_on_prefix {
        return Err(Error::Hypothesis(format!("prefix growth ratio {} does not exceed 1", c1.tau_inf)));
    }
    let tau = c1.tau_inf;
    let gap = &Rational::one() - &tau.recip();
    let delta = &gap * &Rational::ratio(1, 10);
    let ninth_bound = &gap * &ninth();
    let counts = block_counts(a, x, eps, block_horizon)?;
    let dens = block_end_densities(&counts);
    let (horizon, final_density) = dens.last().cloned().expect("block_horizon >= 2");
    let enumerated_final_density = if horizon <= T1_ENUMERATION_LIMIT {
        let est = statistical_trace(&d, x, eps, horizon, horizon)?;
        if est.sup_tail_partial != final_density {
            return Err(Error::Hypothesis(format!("final density {final_density} but enumeration {}", est.sup_tail_partial)));
        }
        Some(est.sup_tail_partial)
    } else {
        None
    };
    let per_block_failures = counts.iter().filter(|c| c.k >= 2 && 9 * c.count_at_least_eps < c.size).map(|c| c.k).collect();
    let trailing_above_ninth = dens[block_horizon / 2..].iter().filter(|(_, v)| *v > ninth_bound).count();
    let holds = dens[block_horizon / 2..].iter().all(|(_, v)| *v > delta) && trailing_above_ninth > 0;
    Ok(T1Report {
        block_horizon,
        tau,
        delta,
        ninth_bound,
        block_end_densities: dens,
        final_density,
        enumerated_final_density,
        per_block_failures,
        trailing_above_ninth,
        holds,
    })
}

/// Outcome of checking that every rational with small denominator is a
/// member for the factorial-derived sequence.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RationalsReport {
    pub q_max: u64,
    pub points_checked: u64,
    /// Largest certified `from_index` seen.
    pub max_from_index: u64,
    pub failures: Vec<String>,
}

impl RationalsReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Indices past the certificate on which the orbit must vanish.
pub const ZERO_WINDOW: u64 = 50;

fn rational_point(d: &DerivedSeq, x: &CirclePoint, cfg: &DecideConfig) -> std::result::Result<u64, String> {
    let verdict = decide_t_u(ChainLike::Derived(d), x, cfg).map_err(|e| format!("{x}: {e}"))?;
    let Certificate::EventuallyZero { from_index } = verdict.certificate else {
        return Err(format!("{x}: {:?}", verdict.status));
    };
    let covering = crate::membership::derived_covering(d, from_index + ZERO_WINDOW).map_err(|e| format!("{x}: {e}"))?;
    let zeros = orbit(covering.as_ref(), x, from_index..=from_index + ZERO_WINDOW).map_err(|e| format!("{x}: {e}"))?;
    if zeros.iter().any(|v| !v.is_zero()) {
        return Err(format!("{x}: orbit not zero after {from_index}"));
    }
    Ok(from_index)
}

pub fn rationals_experiment(q_max: u64) -> Result<RationalsReport> {
    if q_max == 0 {
        return Err(Error::Hypothesis("q_max must be positive".into()));
    }
    let chain = ArithChain::build(SeqDescriptor::Factorial, 2)?;
    let d = derive(&chain, 1)?;
    let cfg = DecideConfig::default();
    let points: Vec<CirclePoint> = (1..=q_max)
        .flat_map(|q| (0..q).filter(move |p| p.gcd(&q) == 1).map(move |p| CirclePoint::new(&Rational::new(p, q).expect("q > 0"))))
        .collect();
    let results: Vec<_> = points.par_iter().map(|x| rational_point(&d, x, &cfg)).collect();
    let mut report = RationalsReport { q_max, points_checked: points.len() as u64, max_from_index: 0, failures: Vec::new() };
    for r in results {
        match r {
            Ok(from) => report.max_from_index = report.max_from_index.max(from),
            Err(e) => report.failures.push(e),
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sequences::StrictSeq;

    fn r(s: &str) -> Rational {
        s.parse().unwrap()
    }

    #[test]
    fn l1_examples() {
        let c = verify_l1(&r("0"), &r("1"), &r("1/3")).unwrap();
        assert_eq!((c.k, c.lower.clone(), c.upper.clone()), (4, r("2"), r("4")));
        let c = verify_l1(&r("0"), &r("0"), &r("1")).unwrap();
        assert_eq!((c.k, c.lower.clone(), c.upper.clone()), (1, r("-1"), r("1")));
        let c = verify_l1(&r("1/7"), &r("6/7"), &r("1/2")).unwrap();
        assert_eq!((c.k, c.lower.clone(), c.upper.clone()), (1, r("3/7"), r("17/7")));
        assert!(c.holds);
        assert!(verify_l1(&r("1"), &r("0"), &r("1")).is_err());
        assert!(verify_l1(&r("0"), &r("1"), &r("0")).is_err());
    }

    #[test]
    fn l1_count_matches_scan() {
        for (lo, hi, alpha) in [("-3/2", "5/3", "1/4"), ("1/3", "1/3", "1/3"), ("2/5", "3/5", "1/7"), ("-1", "-1/2", "2/9")] {
            let (lo, hi, alpha) = (r(lo), r(hi), r(alpha));
            let c = verify_l1(&lo, &hi, &alpha).unwrap();
            let scan = (-200i64..=200).filter(|&j| {
                let v = &alpha * &Rational::from(j);
                lo <= v && v <= hi
            });
            assert_eq!(c.k, scan.count() as u64);
            assert!(c.holds);
        }
    }

    #[test]
    fn l2_examples() {
        assert_eq!(l2_count(&r("1/10"), 10, &r("1/10")), 9);
        assert_eq!(l2_count(&r("1/2"), 1, &r("1/100")), 1);
        let rep = sweep_l2(1, 2, &[r("1/100")]).unwrap();
        assert_eq!(rep.cases_checked, 1);
        assert_eq!(rep.min_slack, Some(r("8/9")));
        assert!(matches!(sweep_l2(10, 10, &[r("1/9")]), Err(Error::InvalidEpsilon(_))));
        assert!(matches!(sweep_l2(10, 10, &[r("1/5")]), Err(Error::InvalidEpsilon(_))));
    }

    #[test]
    fn l2_sweep_matches_direct_counts() {
        let eps = [r("1/10"), r("1/20")];
        let rep = sweep_l2(40, 12, &eps).unwrap();
        let mut cases = 0;
        let mut slack: Option<Rational> = None;
        for t in 2..=12u64 {
            for s in (1..=t / 2).filter(|s| s.gcd(&t) == 1) {
                let alpha = Rational::new(s, t).unwrap();
                for e in &eps {
                    for p in (1..=40u64).filter(|p| 4 * p * s >= t) {
                        cases += 1;
                        let m = Rational::from_integer(l2_count(&alpha, p, e)) - Rational::new(p, 9).unwrap();
                        slack = Some(slack.map_or(m.clone(), |x| x.min(m)));
                    }
                }
            }
        }
        assert_eq!(rep.cases_checked, cases);
        assert_eq!(rep.min_slack, slack);
        assert!(rep.passed());
    }

    #[test]
    fn sweep_merge_is_associative() {
        let a = sweep_l2(30, 5, &[r("1/10")]).unwrap();
        let b = sweep_l2(30, 7, &[r("1/20")]).unwrap();
        let c = sweep_l2(20, 9, &[r("1/100")]).unwrap();
        assert_eq!(a.clone().merge(b.clone()).merge(c.clone()), a.merge(b.merge(c)));
    }

    #[test]
    fn basic1_examples() {
        let g2 = ArithChain::build(SeqDescriptor::geometric(2), 30).unwrap();
        let g3 = ArithChain::build(SeqDescriptor::geometric(3), 30).unwrap();
        for (v, q, z) in [(&g2, "2", "1/5"), (&g2, "2", "1/4"), (&g3, "3", "1/10")] {
            let w = verify_basic1(v, &r(q), &r(z)).unwrap();
            assert_eq!(w.m, 1);
            assert!(w.sandwich_holds);
        }
        let w = verify_basic1(&g2, &r("2"), &r("1/1000")).unwrap();
        assert_eq!(w.m, 8);
        assert!(w.sandwich_holds);
        assert!(verify_basic1(&g2, &r("2"), &r("1/3")).is_err());
        let short = StrictSeq::from_u64([2, 4]).unwrap();
        assert!(matches!(verify_basic1(&short, &r("2"), &r("1/1000")), Err(Error::HorizonExhausted { .. })));
        let jumpy = StrictSeq::from_u64([2, 40]).unwrap();
        assert!(matches!(verify_basic1(&jumpy, &r("2"), &r("1/100")), Err(Error::UnboundedRatiosAtHorizon { .. })));
    }

    #[test]
    fn l3_examples() {
        let g2 = ArithChain::build(SeqDescriptor::geometric(2), 2).unwrap();
        assert_eq!(verify_l3(&g2, &"1/3".parse().unwrap(), &r("1/10"), 7, 60).unwrap().k, 7);
        let p = ArithChain::build(SeqDescriptor::pow2(), 2).unwrap();
        let w = verify_l3(&p, &"1/3".parse().unwrap(), &r("1/10"), 5, 60).unwrap();
        assert_eq!(w.k, 5);
        assert!(3 * w.count + 3 >= 2 * w.size);
        assert_eq!(w.enumerated_blocks, 1);
        let g10 = ArithChain::build(SeqDescriptor::geometric(10), 2).unwrap();
        assert!(verify_l3(&g10, &"1/7".parse().unwrap(), &r("1/14"), 3, 60).unwrap().k <= 6);
        let f = ArithChain::build(SeqDescriptor::Factorial, 2).unwrap();
        assert!(verify_l3(&f, &"1/3".parse().unwrap(), &r("1/10"), 1, 10).is_err());
        assert!(verify_l3(&g2, &"1/3".parse().unwrap(), &r("1/9"), 1, 10).is_err());
    }

    #[test]
    fn t1_example() {
        let p = ArithChain::build(SeqDescriptor::pow2(), 2).unwrap();
        let rep = t1_threshold_experiment(&p, &"1/3".parse().unwrap(), &r("1/10"), 12).unwrap();
        assert_eq!(rep.tau, r("2"));
        assert_eq!(rep.delta, r("1/20"));
        assert!(rep.per_block_failures.is_empty());
        assert!(rep.holds);
        assert_eq!(rep.enumerated_final_density.as_ref(), Some(&rep.final_density));
    }

    #[test]
    fn rationals_small() {
        let rep = rationals_experiment(12).unwrap();
        assert!(rep.passed(), "{:?}", rep.failures);
        assert_eq!(rep.points_checked, (1..=12u64).map(|q| (0..q).filter(|p| p.gcd(&q) == 1).count() as u64).sum::<u64>());
    }
}
