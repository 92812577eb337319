//! Certificate-backed membership of rational circle points.
//!
//! For a reduced `x = p/q` and a divisibility chain `a`, `g_n = gcd(q, a_n p)`
//! divides `g_{n+1}` and is bounded by `q`, so it stabilizes. Which primes the
//! chain's ratios can keep contributing is read off the descriptor, which
//! turns "`q | a_n` for some n" into a finite computation.

use std::ops::RangeInclusive;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{seminorm_enclosure, DyadicInterval, Rational, SeminormValue};
use crate::error::{Error, Result};
use crate::factor::factorize;
use crate::sequences::{ArithChain, DerivedSeq, IntSequence, SeqDescriptor, Tail};

/// A rational point of the circle, stored as its representative in `[0, 1)`.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CirclePoint(Rational);

impl CirclePoint {
    pub fn new(x: &Rational) -> Self {
        CirclePoint(x.frac())
    }

    pub fn zero() -> Self {
        CirclePoint(Rational::zero())
    }

    pub fn value(&self) -> &Rational {
        &self.0
    }

    pub fn numer(&self) -> BigUint {
        self.0.numer().to_biguint().expect("representative is nonnegative")
    }

    pub fn denom(&self) -> BigUint {
        self.0.denom().to_biguint().expect("denominator is positive")
    }

    pub fn denom_u64(&self) -> Result<u64> {
        self.0.denom().to_u64().ok_or_else(|| Error::DenominatorTooLarge(self.0.denom().to_string()))
    }

    /// `‖u x‖` computed as `min(ρ, q - ρ)/q` with `ρ = u p mod q`.
    pub fn scaled_seminorm(&self, u: &BigUint) -> SeminormValue {
        let q = self.denom();
        let rho = (u * self.numer()) % &q;
        let other = &q - &rho;
        let num = if rho <= other { rho } else { other };
        let value = Rational::new(BigInt::from_biguint(Sign::Plus, num), BigInt::from_biguint(Sign::Plus, q))
            .expect("positive denominator");
        SeminormValue::new_unchecked(value)
    }
}

impl std::str::FromStr for CirclePoint {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(CirclePoint::new(&s.parse()?))
    }
}

impl std::fmt::Display for CirclePoint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.0.fmt(f)
    }
}

/// `‖u_n x‖` for every `n` in `range`.
pub fn orbit<S: IntSequence + ?Sized>(
    u: &S,
    x: &CirclePoint,
    range: RangeInclusive<u64>,
) -> Result<Vec<SeminormValue>> {
    if *range.start() == 0 || *range.end() > u.horizon() {
        return Err(Error::OutOfHorizon { index: *range.end().max(range.start()), horizon: u.horizon() });
    }
    Ok(range.map(|n| x.scaled_seminorm(&u.term(n).expect("checked horizon"))).collect())
}

/// Enclosures of `‖u_n y‖` for every `y` in `x`, for points known only to a
/// precision. No verdict is ever derived from these.
pub fn orbit_enclosure<S: IntSequence + ?Sized>(
    u: &S,
    x: &DyadicInterval,
    range: RangeInclusive<u64>,
) -> Result<Vec<DyadicInterval>> {
    if *range.start() == 0 || *range.end() > u.horizon() {
        return Err(Error::OutOfHorizon { index: *range.end(), horizon: u.horizon() });
    }
    range.map(|n| seminorm_enclosure(&x.scale(&u.term(n).expect("checked horizon")))).collect()
}

/// Whether some term of a chain is divisible by `m`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "answer", rename_all = "snake_case")]
pub enum SaturationAnswer {
    /// Minimal `n` with `m | a_n`.
    Yes { witness: usize },
    /// `prime` divides `m` to a power no term will ever reach.
    Never { prime: u64 },
    /// The descriptor gives no tail guarantee and no term up to `horizon` works.
    Unknown { horizon: usize },
}

/// Saturation data of `gcd(m, a_n)` along a chain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Saturation {
    pub answer: SaturationAnswer,
    /// The limit of `gcd(m, a_n)` (or its value at the horizon for finite chains).
    pub stable_gcd: u64,
    /// First index at which `gcd(m, a_n)` equals `stable_gcd`.
    pub stabilization_index: usize,
}

fn ratio_residue(desc: &SeqDescriptor, n: usize, m: u64) -> Option<u64> {
    if let SeqDescriptor::RatioChain { ratios, tail: Tail::PowersOfTwoExponents } = desc {
        if n > ratios.len() {
            return Some(pow2_mod(n as u64 - 1, m));
        }
    }
    desc.ratio(n).map(|q| (q % m).to_u64().expect("residue below m"))
}

fn pow2_mod(exp: u64, m: u64) -> u64 {
    let (mut acc, mut base, mut e) = (1 % m as u128, 2 % m as u128, exp);
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % m as u128;
        }
        base = base * base % m as u128;
        e >>= 1;
    }
    acc as u64
}

fn valuation(mut n: u64, p: u64) -> u32 {
    let mut e = 0;
    while n > 0 && n.is_multiple_of(p) {
        n /= p;
        e += 1;
    }
    e
}

/// Primes with unbounded exponent in the chain, and a finite multiset of
/// extra ratios. `None` for finite chains, `Some(None)` when every prime is
/// unbounded (factorial).
#[allow(clippy::option_option)]
fn tail_structure(desc: &SeqDescriptor) -> Option<Option<(Vec<u64>, Vec<u64>)>> {
    let primes_of = |xs: &[u64]| {
        let mut ps: Vec<u64> = xs.iter().flat_map(|&x| factorize(x).into_iter().map(|(p, _)| p)).collect();
        ps.sort_unstable();
        ps.dedup();
        ps
    };
    match desc {
        SeqDescriptor::Factorial => Some(None),
        SeqDescriptor::Geometric { base } => Some(Some((primes_of(&[*base]), Vec::new()))),
        SeqDescriptor::RatioChain { ratios, tail: Tail::Repeat } => Some(Some((primes_of(ratios), Vec::new()))),
        SeqDescriptor::RatioChain { ratios, tail: Tail::PowersOfTwoExponents } => {
            Some(Some((vec![2], ratios.clone())))
        }
        SeqDescriptor::RatioChain { tail: Tail::None, .. } | SeqDescriptor::ExplicitTerms { .. } => None,
    }
}

/// Saturation of `gcd(m, a_n)`; runs on the descriptor's ratios without
/// materializing terms.
pub fn saturate(a: &ArithChain, m: u64) -> Saturation {
    assert!(m >= 1, "m must be positive");
    let desc = a.descriptor();
    let limit = match tail_structure(desc) {
        None => None,
        Some(None) => Some((m, None)),
        Some(Some((unbounded, extra))) => {
            let mut target = 1u64;
            let mut obstruction = None;
            for (p, e) in factorize(m) {
                let avail = if unbounded.contains(&p) {
                    u32::MAX
                } else {
                    extra.iter().map(|&r| valuation(r, p)).sum()
                };
                if avail < e && obstruction.is_none() {
                    obstruction = Some(p);
                }
                target *= p.pow(e.min(avail));
            }
            Some((target, obstruction))
        }
    };

    let mut g = 1u64;
    let mut changed_at = 1usize;
    let mut n = 0usize;
    loop {
        if let Some((target, obstruction)) = limit {
            if g == target && n >= 1 {
                let answer = match obstruction {
                    None => SaturationAnswer::Yes { witness: n },
                    Some(prime) => SaturationAnswer::Never { prime },
                };
                return Saturation { answer, stable_gcd: g, stabilization_index: n };
            }
        }
        let Some(r) = ratio_residue(desc, n + 1, m) else {
            // Finite chain exhausted.
            let answer = if g == m {
                SaturationAnswer::Yes { witness: changed_at }
            } else {
                SaturationAnswer::Unknown { horizon: n }
            };
            return Saturation { answer, stable_gcd: g, stabilization_index: changed_at };
        };
        n += 1;
        let next = (g as u128 * r as u128).gcd(&(m as u128)) as u64;
        if next != g || n == 1 {
            changed_at = n;
        }
        g = next;
        if limit.is_none() && g == m {
            return Saturation { answer: SaturationAnswer::Yes { witness: n }, stable_gcd: g, stabilization_index: n };
        }
    }
}

pub fn divides_some_term(a: &ArithChain, m: u64) -> SaturationAnswer {
    saturate(a, m).answer
}

/// Machine-checkable evidence attached to a verdict.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Certificate {
    /// `‖u_n x‖ = 0` for all `n >= from_index`.
    EventuallyZero { from_index: u64 },
    /// `q | a_n`.
    DividesTerm { n: usize },
    /// `gcd(q, a_n p)` is constant with `q / gcd = modulus >= 2` from the
    /// chain index `stabilization_index` on.
    PersistentResidue { modulus: u64, stabilization_index: usize },
    /// The nonzero set has partial density at least `bound` at index `horizon`.
    DensityLowerBound { bound: Rational, horizon: u64 },
    /// Nothing decided up to `horizon`; the orbit was last nonzero at `last_nonzero_index`.
    HorizonEvidence { horizon: u64, last_nonzero_index: u64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Member,
    NonMember,
    Undecided,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MembershipVerdict {
    pub status: Status,
    pub certificate: Certificate,
}

impl MembershipVerdict {
    /// Pairs a certificate with the status it justifies.
    pub fn from_certificate(certificate: Certificate) -> Self {
        let status = match certificate {
            Certificate::EventuallyZero { .. } | Certificate::DividesTerm { .. } => Status::Member,
            Certificate::PersistentResidue { .. } | Certificate::DensityLowerBound { .. } => Status::NonMember,
            Certificate::HorizonEvidence { .. } => Status::Undecided,
        };
        MembershipVerdict { status, certificate }
    }

    pub fn is_member(&self) -> bool {
        self.status == Status::Member
    }
}

/// Membership in the subgroup generated by `{1/a_n}`.
pub fn member_generated(a: &ArithChain, x: &CirclePoint) -> Result<MembershipVerdict> {
    let sat = saturate(a, x.denom_u64()?);
    Ok(MembershipVerdict::from_certificate(match sat.answer {
        SaturationAnswer::Yes { witness } => Certificate::DividesTerm { n: witness },
        SaturationAnswer::Never { .. } => Certificate::PersistentResidue {
            modulus: x.denom_u64()? / sat.stable_gcd,
            stabilization_index: sat.stabilization_index,
        },
        SaturationAnswer::Unknown { horizon } => Certificate::HorizonEvidence {
            horizon: horizon as u64,
            last_nonzero_index: horizon as u64,
        },
    }))
}

/// Sequences for which `t_u` membership is decided.
#[derive(Clone, Copy, Debug)]
pub enum ChainLike<'a> {
    Chain(&'a ArithChain),
    Derived(&'a DerivedSeq),
}

impl ChainLike<'_> {
    pub fn source(&self) -> &ArithChain {
        match self {
            ChainLike::Chain(a) => a,
            ChainLike::Derived(d) => d.chain(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecideConfig {
    /// Refuse when the prefix ratio sup exceeds this.
    pub ratio_cap: Rational,
    /// Indices past a certificate that are inspected.
    pub window: u64,
}

pub const DEFAULT_RATIO_CAP: i64 = 64;
pub const DEFAULT_WINDOW: u64 = 50;

impl Default for DecideConfig {
    fn default() -> Self {
        DecideConfig { ratio_cap: Rational::from(DEFAULT_RATIO_CAP), window: DEFAULT_WINDOW }
    }
}

fn check_cap<S: IntSequence>(u: &S, horizon: u64, cfg: &DecideConfig) -> Result<()> {
    let sup = u.ratio_bound(horizon)?;
    if sup > cfg.ratio_cap {
        return Err(Error::UnboundedRatiosAtHorizon { sup: sup.to_string(), cap: cfg.ratio_cap.to_string(), horizon });
    }
    Ok(())
}

/// Extends a derived sequence until it covers index `n`.
pub(crate) fn derived_covering(d: &DerivedSeq, n: u64) -> Result<std::borrow::Cow<'_, DerivedSeq>> {
    if d.horizon() >= n {
        return Ok(std::borrow::Cow::Borrowed(d));
    }
    let mut d = d.clone();
    let mut blocks = d.block_count().max(1);
    while d.horizon() < n {
        blocks += 1;
        d.extend_blocks(blocks)?;
    }
    Ok(std::borrow::Cow::Owned(d))
}

fn chain_covering(a: &ArithChain, n: usize) -> Result<std::borrow::Cow<'_, ArithChain>> {
    if a.len() >= n {
        return Ok(std::borrow::Cow::Borrowed(a));
    }
    let mut a = a.clone();
    a.extend_to(n)?;
    Ok(std::borrow::Cow::Owned(a))
}

/// Decides `x ∈ t_u(𝕋)` for a chain or its derived sequence, refusing when the
/// bounded-ratio hypothesis is not evidenced on the inspected prefix.
pub fn decide_t_u(u: ChainLike<'_>, x: &CirclePoint, cfg: &DecideConfig) -> Result<MembershipVerdict> {
    let q = x.denom_u64()?;
    let sat = saturate(u.source(), q);
    let cert = match (&sat.answer, u) {
        (SaturationAnswer::Yes { witness }, ChainLike::Chain(a)) => {
            let a = chain_covering(a, witness + cfg.window as usize)?;
            check_cap(a.as_ref(), (*witness as u64) + cfg.window, cfg)?;
            Certificate::EventuallyZero { from_index: *witness as u64 }
        }
        (SaturationAnswer::Yes { witness }, ChainLike::Derived(d)) => {
            let mut d = d.clone();
            if d.block_count() < *witness {
                d.extend_blocks(*witness)?;
            }
            let mut from = d.anchor(*witness);
            while from > 1 {
                let prev = d.term(from - 1).expect("within horizon");
                if !x.scaled_seminorm(&prev).is_zero() {
                    break;
                }
                from -= 1;
            }
            let d = derived_covering(&d, from + cfg.window)?;
            check_cap(d.as_ref(), from + cfg.window, cfg)?;
            Certificate::EventuallyZero { from_index: from }
        }
        (SaturationAnswer::Never { .. }, _) => {
            let horizon = sat.stabilization_index + cfg.window as usize;
            match u {
                ChainLike::Chain(a) => {
                    let a = chain_covering(a, horizon)?;
                    check_cap(a.as_ref(), horizon as u64, cfg)?;
                }
                ChainLike::Derived(d) => {
                    let mut d = d.clone();
                    if d.block_count() < sat.stabilization_index {
                        d.extend_blocks(sat.stabilization_index)?;
                    }
                    let end = d.anchor(sat.stabilization_index) + cfg.window;
                    let d = derived_covering(&d, end)?;
                    check_cap(d.as_ref(), end, cfg)?;
                }
            }
            Certificate::PersistentResidue { modulus: q / sat.stable_gcd, stabilization_index: sat.stabilization_index }
        }
        (SaturationAnswer::Unknown { horizon }, ChainLike::Chain(_)) => {
            Certificate::HorizonEvidence { horizon: *horizon as u64, last_nonzero_index: *horizon as u64 }
        }
        (SaturationAnswer::Unknown { .. }, ChainLike::Derived(d)) => {
            let horizon = d.horizon();
            let last = (1..=horizon)
                .rev()
                .find(|&n| !x.scaled_seminorm(&d.term(n).expect("within horizon")).is_zero())
                .unwrap_or(0);
            Certificate::HorizonEvidence { horizon, last_nonzero_index: last }
        }
    };
    Ok(MembershipVerdict::from_certificate(cert))
}

/// First anchor/index pair violating `u_{n_k} | u_i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DivisibilityFailure {
    pub k: usize,
    pub anchor: u64,
    pub index: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct T0Report {
    pub horizon: u64,
    pub ratio_sup: Rational,
    pub divisibility_holds: bool,
    pub pairs_checked: u64,
    pub first_failure: Option<DivisibilityFailure>,
}

/// Checks the two hypotheses of the bounded-ratio characterization on a
/// prefix: the ratio sup, and `u_{n_k} | u_i` for all `i >= n_k`.
pub fn verify_t0_hypotheses<S: IntSequence + ?Sized>(u: &S, anchors: &[u64], horizon: u64) -> Result<T0Report> {
    if horizon > u.horizon() {
        return Err(Error::OutOfHorizon { index: horizon, horizon: u.horizon() });
    }
    let ratio_sup = u.ratio_bound(horizon)?;
    let mut pairs_checked = 0;
    let mut first_failure = None;
    'outer: for (k, &anchor) in anchors.iter().enumerate() {
        if anchor == 0 || anchor > horizon {
            continue;
        }
        let base = u.term(anchor).expect("within horizon").into_owned();
        for i in anchor..=horizon {
            pairs_checked += 1;
            if !(u.term(i).expect("within horizon").as_ref() % &base).is_zero() {
                first_failure = Some(DivisibilityFailure { k: k + 1, anchor, index: i });
                break 'outer;
            }
        }
    }
    Ok(T0Report { horizon, ratio_sup, divisibility_holds: first_failure.is_none(), pairs_checked, first_failure })
}

/// `gcd(q, a_n)` for `n = 1..=count`, computed from the materialized terms.
pub fn gcd_profile(a: &ArithChain, q: u64, count: usize) -> Vec<u64> {
    let q_big = BigUint::from(q);
    a.terms()[..count].iter().map(|t| t.gcd(&q_big).to_u64().expect("divides q")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sequences::{derive, StrictSeq};

    fn pt(s: &str) -> CirclePoint {
        s.parse().unwrap()
    }

    fn chain(d: SeqDescriptor, n: usize) -> ArithChain {
        ArithChain::build(d, n).unwrap()
    }

    fn sv(s: &str) -> Rational {
        s.parse().unwrap()
    }

    #[test]
    fn circle_point_normalizes() {
        assert_eq!(pt("-1/3").value(), &sv("2/3"));
        assert_eq!(pt("7/3").value(), &sv("1/3"));
        assert_eq!(pt("5").value(), &Rational::zero());
    }

    #[test]
    fn orbit_examples() {
        let f = chain(SeqDescriptor::Factorial, 4);
        let got: Vec<Rational> = orbit(&f, &pt("1/3"), 1..=4).unwrap().into_iter().map(|v| v.into_value()).collect();
        assert_eq!(got, vec![sv("1/3"), sv("1/3"), Rational::zero(), Rational::zero()]);

        let g = chain(SeqDescriptor::geometric(2), 4);
        let got = orbit(&g, &pt("1/3"), 1..=4).unwrap();
        assert!(got.iter().all(|v| v.value() == &sv("1/3")));

        let got = orbit(&g, &CirclePoint::zero(), 1..=4).unwrap();
        assert!(got.iter().all(SeminormValue::is_zero));

        assert!(matches!(orbit(&g, &pt("1/3"), 1..=5), Err(Error::OutOfHorizon { .. })));
    }

    #[test]
    fn orbit_agrees_with_rational_seminorm() {
        let f = chain(SeqDescriptor::Factorial, 12);
        let d = derive(&f, 11).unwrap();
        for x in ["3/7", "5/12", "11/13", "1/2"] {
            let x = pt(x);
            for (i, v) in orbit(&d, &x, 1..=d.horizon()).unwrap().into_iter().enumerate() {
                let t = d.term(i as u64 + 1).unwrap();
                let direct = crate::arith::seminorm(&x.value().scale(&t));
                assert_eq!(v, direct);
            }
        }
    }

    #[test]
    fn divides_some_term_examples() {
        let f = chain(SeqDescriptor::Factorial, 1);
        assert_eq!(divides_some_term(&f, 100), SaturationAnswer::Yes { witness: 10 });
        let g = chain(SeqDescriptor::geometric(2), 1);
        assert_eq!(divides_some_term(&g, 3), SaturationAnswer::Never { prime: 3 });
        for d in [SeqDescriptor::Factorial, SeqDescriptor::geometric(7), SeqDescriptor::pow2(), SeqDescriptor::explicit([3, 9])] {
            assert_eq!(divides_some_term(&chain(d, 1), 1), SaturationAnswer::Yes { witness: 1 });
        }
    }

    #[test]
    fn saturation_respects_finite_prefixes() {
        // 3 · 2^... : only one factor of 3 is ever available.
        let c = chain(SeqDescriptor::ratios(vec![3], Tail::PowersOfTwoExponents), 1);
        assert_eq!(divides_some_term(&c, 9), SaturationAnswer::Never { prime: 3 });
        assert_eq!(divides_some_term(&c, 24), SaturationAnswer::Yes { witness: 3 });
        let r = chain(SeqDescriptor::ratios(vec![2, 3], Tail::Repeat), 1);
        assert_eq!(divides_some_term(&r, 5), SaturationAnswer::Never { prime: 5 });
        assert_eq!(divides_some_term(&r, 27), SaturationAnswer::Yes { witness: 6 });
        let e = chain(SeqDescriptor::explicit([2, 6, 30]), 3);
        assert_eq!(divides_some_term(&e, 5), SaturationAnswer::Yes { witness: 3 });
        assert_eq!(divides_some_term(&e, 7), SaturationAnswer::Unknown { horizon: 3 });
    }

    #[test]
    fn saturation_witness_is_minimal() {
        for desc in [SeqDescriptor::Factorial, SeqDescriptor::ratios(vec![2, 6, 5], Tail::Repeat), SeqDescriptor::pow2()] {
            let mut a = chain(desc, 1);
            for m in 1..=400u64 {
                if let SaturationAnswer::Yes { witness } = divides_some_term(&a, m) {
                    a.extend_to(witness).unwrap();
                    let m_big = BigUint::from(m);
                    assert!((a.a(witness) % &m_big).is_zero());
                    assert!(witness == 1 || !(a.a(witness - 1) % &m_big).is_zero());
                }
            }
        }
    }

    #[test]
    fn member_generated_examples() {
        let g = chain(SeqDescriptor::geometric(2), 1);
        let v = member_generated(&g, &pt("5/8")).unwrap();
        assert_eq!(v.certificate, Certificate::DividesTerm { n: 3 });
        let v = member_generated(&g, &pt("1/3")).unwrap();
        assert_eq!(v.status, Status::NonMember);
        assert_eq!(v.certificate, Certificate::PersistentResidue { modulus: 3, stabilization_index: 1 });
        assert!(member_generated(&g, &CirclePoint::zero()).unwrap().is_member());
    }

    #[test]
    fn persistent_residue_modulus() {
        // q = 12 against powers of 2: gcd stabilizes at 4 from n = 2.
        let g = chain(SeqDescriptor::geometric(2), 1);
        let v = member_generated(&g, &pt("1/12")).unwrap();
        assert_eq!(v.certificate, Certificate::PersistentResidue { modulus: 3, stabilization_index: 2 });
    }

    #[test]
    fn decide_t_u_examples() {
        let cfg = DecideConfig::default();
        let f = chain(SeqDescriptor::Factorial, 2);
        let zeta = derive(&f, 1).unwrap();
        for q in 1..=30i64 {
            for p in 0..q {
                if p.gcd(&q) != 1 && !(p == 0 && q == 1) {
                    continue;
                }
                let v = decide_t_u(ChainLike::Derived(&zeta), &CirclePoint::new(&Rational::ratio(p, q)), &cfg).unwrap();
                assert!(v.is_member(), "{p}/{q}");
            }
        }
        let g = chain(SeqDescriptor::geometric(2), 2);
        let dg = derive(&g, 1).unwrap();
        let v = decide_t_u(ChainLike::Derived(&dg), &pt("1/3"), &cfg).unwrap();
        assert_eq!(v.status, Status::NonMember);
        let v = decide_t_u(ChainLike::Chain(&g), &CirclePoint::zero(), &cfg).unwrap();
        assert_eq!(v.certificate, Certificate::EventuallyZero { from_index: 1 });
    }

    #[test]
    fn eventually_zero_index_is_exact() {
        let cfg = DecideConfig::default();
        let f = chain(SeqDescriptor::Factorial, 2);
        let zeta = derive(&f, 12).unwrap();
        for x in ["1/4", "1/8", "3/10", "1/9", "5/7"] {
            let x = pt(x);
            let v = decide_t_u(ChainLike::Derived(&zeta), &x, &cfg).unwrap();
            let Certificate::EventuallyZero { from_index } = v.certificate else { panic!() };
            let orb = orbit(&zeta, &x, 1..=from_index + 50).unwrap();
            assert!(orb[from_index as usize - 1..].iter().all(SeminormValue::is_zero));
            if from_index > 1 {
                assert!(!orb[from_index as usize - 2].is_zero());
            }
        }
    }

    #[test]
    fn decide_t_u_refuses_unbounded_prefix() {
        let f = chain(SeqDescriptor::Factorial, 2);
        // Witness 67 plus the 50-term window pushes the ratio sup past 64.
        let err = decide_t_u(ChainLike::Chain(&f), &pt("1/67"), &DecideConfig::default()).unwrap_err();
        assert!(matches!(err, Error::UnboundedRatiosAtHorizon { .. }));
        let loose = DecideConfig { ratio_cap: Rational::from(1000), window: 50 };
        assert!(decide_t_u(ChainLike::Chain(&f), &pt("1/67"), &loose).unwrap().is_member());
    }

    #[test]
    fn explicit_chains_stay_undecided() {
        let e = chain(SeqDescriptor::explicit([2, 4, 8]), 3);
        let v = decide_t_u(ChainLike::Chain(&e), &pt("1/3"), &DecideConfig::default()).unwrap();
        assert_eq!(v.certificate, Certificate::HorizonEvidence { horizon: 3, last_nonzero_index: 3 });
        let d = derive(&e, 2).unwrap();
        let v = decide_t_u(ChainLike::Derived(&d), &pt("1/3"), &DecideConfig::default()).unwrap();
        assert_eq!(v.status, Status::Undecided);
    }

    #[test]
    fn t0_hypotheses_examples() {
        let f = chain(SeqDescriptor::Factorial, 2);
        let zeta = derive(&f, 12).unwrap();
        let anchors: Vec<u64> = (1..=12u64).map(|k| 1 + k * (k - 1) / 2).collect();
        let r = verify_t0_hypotheses(&zeta, &anchors, zeta.horizon()).unwrap();
        assert!(r.divisibility_holds);
        assert!(r.ratio_sup <= Rational::from(2));

        let g = chain(SeqDescriptor::geometric(2), 20);
        let all: Vec<u64> = (1..=20).collect();
        let r = verify_t0_hypotheses(&g, &all, 20).unwrap();
        assert!(r.divisibility_holds);
        assert_eq!(r.ratio_sup, Rational::from(2));

        let s = StrictSeq::from_u64([2, 3, 5]).unwrap();
        let r = verify_t0_hypotheses(&s, &[1], 3).unwrap();
        assert_eq!(r.first_failure, Some(DivisibilityFailure { k: 1, anchor: 1, index: 2 }));
    }

    #[test]
    fn verdict_json_shape() {
        let v = MembershipVerdict::from_certificate(Certificate::DividesTerm { n: 3 });
        assert_eq!(serde_json::to_string(&v).unwrap(), r#"{"status":"member","certificate":{"kind":"divides_term","n":3}}"#);
    }
}
