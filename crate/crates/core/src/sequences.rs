//! Strictly increasing sequences, divisibility chains and the derived sequence.
//!
//! A divisibility chain `a_1 | a_2 | ...` is presented by a finite
//! [`SeqDescriptor`] and materialized lazily. Its derived sequence `d` is the
//! increasing enumeration of `{ r·a_k : 1 <= r < q_{k+1} }`; it is split into
//! blocks `N_k = [n_k, n_{k+1})` of length `q_{k+1} - 1`, and `d_{n_k} = a_k`.
//! Terms of `d` are computed on demand from the block structure, so very long
//! derived sequences (the pow2 chain reaches `n_61 ≈ 2^61`) cost only their
//! anchors.

use std::borrow::Cow;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::Rational;
use crate::error::{Error, Result};

/// How a [`SeqDescriptor::RatioChain`] continues past its explicit ratios.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Tail {
    /// Cycle the ratio list forever.
    Repeat,
    /// `q_n = 2^(n-1)`, i.e. `q_{k+1} = 2^k`.
    #[serde(rename = "pow2_exponents")]
    PowersOfTwoExponents,
    /// The chain ends after the listed ratios.
    None,
}

/// Finite symbolic presentation of an infinite (or explicitly finite) sequence.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SeqDescriptor {
    /// `a_n = n!`.
    Factorial,
    /// `a_n = base^n`.
    Geometric { base: u64 },
    /// `a_n = q_1 ... q_n` with `q_n = ratios[n-1]` and the tail rule beyond.
    RatioChain { ratios: Vec<u64>, tail: Tail },
    #[serde(rename = "explicit")]
    ExplicitTerms {
        #[serde(with = "decimal_terms")]
        terms: Vec<BigUint>,
    },
}

mod decimal_terms {
    use num_bigint::BigUint;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(terms: &[BigUint], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(terms.iter().map(|t| t.to_string()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigUint>, D::Error> {
        Vec::<String>::deserialize(d)?
            .iter()
            .map(|s| s.parse().map_err(serde::de::Error::custom))
            .collect()
    }
}

impl SeqDescriptor {
    pub fn geometric(base: u64) -> Self {
        SeqDescriptor::Geometric { base }
    }

    pub fn ratios(ratios: Vec<u64>, tail: Tail) -> Self {
        SeqDescriptor::RatioChain { ratios, tail }
    }

    /// The block-growth chain `q_{k+1} = 2^k`: `1, 2, 8, 64, 1024, ...`.
    pub fn pow2() -> Self {
        SeqDescriptor::RatioChain { ratios: Vec::new(), tail: Tail::PowersOfTwoExponents }
    }

    pub fn explicit<I: IntoIterator<Item = u64>>(terms: I) -> Self {
        SeqDescriptor::ExplicitTerms { terms: terms.into_iter().map(BigUint::from).collect() }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidDescriptor(msg.to_string()));
        match self {
            SeqDescriptor::Factorial => Ok(()),
            SeqDescriptor::Geometric { base } if *base < 2 => bad("geometric base must be >= 2"),
            SeqDescriptor::Geometric { .. } => Ok(()),
            SeqDescriptor::RatioChain { ratios, tail } => {
                if ratios.iter().any(|&q| q < 2) {
                    return bad("ratio chain ratios must be >= 2");
                }
                if ratios.is_empty() && *tail != Tail::PowersOfTwoExponents {
                    return bad("ratio chain needs at least one ratio unless the tail is pow2");
                }
                Ok(())
            }
            SeqDescriptor::ExplicitTerms { terms } => {
                if terms.is_empty() {
                    return bad("explicit terms must be nonempty");
                }
                if terms[0].is_zero() {
                    return bad("explicit terms must be positive");
                }
                if terms.windows(2).any(|w| w[0] >= w[1]) {
                    return bad("explicit terms must be strictly increasing");
                }
                Ok(())
            }
        }
    }

    /// Number of terms the descriptor defines, `None` when infinite.
    pub fn finite_len(&self) -> Option<usize> {
        match self {
            SeqDescriptor::RatioChain { ratios, tail: Tail::None } => Some(ratios.len()),
            SeqDescriptor::ExplicitTerms { terms } => Some(terms.len()),
            _ => None,
        }
    }

    /// `q_n` for `n >= 1` (with `a_0 = 1`), or `None` past a finite end.
    pub(crate) fn ratio(&self, n: usize) -> Option<BigUint> {
        debug_assert!(n >= 1);
        match self {
            SeqDescriptor::Factorial => Some(BigUint::from(n)),
            SeqDescriptor::Geometric { base } => Some(BigUint::from(*base)),
            SeqDescriptor::RatioChain { ratios, tail } => {
                if n <= ratios.len() {
                    return Some(ratios[n - 1].into());
                }
                match tail {
                    Tail::Repeat => Some(ratios[(n - 1) % ratios.len()].into()),
                    Tail::PowersOfTwoExponents => Some(BigUint::one() << (n - 1)),
                    Tail::None => None,
                }
            }
            SeqDescriptor::ExplicitTerms { terms } => match n {
                1 => Some(terms[0].clone()),
                _ if n <= terms.len() => Some(&terms[n - 1] / &terms[n - 2]),
                _ => None,
            },
        }
    }
}

impl fmt::Display for SeqDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |xs: &mut dyn Iterator<Item = String>| xs.collect::<Vec<_>>().join(",");
        match self {
            SeqDescriptor::Factorial => write!(f, "factorial"),
            SeqDescriptor::Geometric { base } => write!(f, "geometric:{base}"),
            SeqDescriptor::RatioChain { ratios, tail } => {
                let tail = match tail {
                    Tail::Repeat => "repeat",
                    Tail::PowersOfTwoExponents => "pow2",
                    Tail::None => "none",
                };
                write!(f, "ratios:{}:{tail}", join(&mut ratios.iter().map(u64::to_string)))
            }
            SeqDescriptor::ExplicitTerms { terms } => {
                write!(f, "explicit:{}", join(&mut terms.iter().map(BigUint::to_string)))
            }
        }
    }
}

impl FromStr for SeqDescriptor {
    type Err = Error;

    /// Compact grammar: `factorial`, `geometric:B`, `ratios:2,3:repeat`,
    /// `ratios::pow2` (alias `pow2`), `ratios:2,3:none`, `explicit:1,2,6`, or a
    /// JSON object.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = |why: &str| Error::InvalidDescriptor(format!("{s:?}: {why}"));
        let desc = if s.starts_with('{') {
            serde_json::from_str(s).map_err(|e| bad(&e.to_string()))?
        } else {
            let mut parts = s.split(':');
            match parts.next() {
                Some("factorial") => SeqDescriptor::Factorial,
                Some("pow2") if s == "pow2" => SeqDescriptor::pow2(),
                Some("geometric") => {
                    let base = parts.next().ok_or_else(|| bad("missing base"))?;
                    SeqDescriptor::Geometric { base: base.parse().map_err(|_| bad("bad base"))? }
                }
                Some("ratios") => {
                    let list = parts.next().ok_or_else(|| bad("missing ratio list"))?;
                    let ratios = list
                        .split(',')
                        .filter(|t| !t.is_empty())
                        .map(|t| t.parse().map_err(|_| bad("bad ratio")))
                        .collect::<Result<Vec<u64>>>()?;
                    let tail = match parts.next().unwrap_or("repeat") {
                        "repeat" => Tail::Repeat,
                        "pow2" | "pow2_exponents" => Tail::PowersOfTwoExponents,
                        "none" => Tail::None,
                        _ => return Err(bad("tail must be repeat, pow2 or none")),
                    };
                    SeqDescriptor::RatioChain { ratios, tail }
                }
                Some("explicit") => {
                    let list = parts.next().ok_or_else(|| bad("missing terms"))?;
                    let terms = list
                        .split(',')
                        .map(|t| t.parse().map_err(|_| bad("bad term")))
                        .collect::<Result<Vec<BigUint>>>()?;
                    SeqDescriptor::ExplicitTerms { terms }
                }
                _ => return Err(bad("unknown kind")),
            }
        };
        desc.validate()?;
        Ok(desc)
    }
}

/// Common read access to integer sequences indexed from 1.
pub trait IntSequence {
    /// Number of materialized terms.
    fn horizon(&self) -> u64;

    /// `u_n` for `1 <= n <= horizon`.
    fn term(&self, n: u64) -> Option<Cow<'_, BigUint>>;

    /// `sup_{n <= horizon} u_n / u_{n-1}` with `u_0 = 1`.
    fn ratio_bound(&self, horizon: u64) -> Result<Rational> {
        if horizon > self.horizon() {
            return Err(Error::OutOfHorizon { index: horizon, horizon: self.horizon() });
        }
        let mut prev = BigUint::one();
        let mut best = Rational::zero();
        for n in 1..=horizon {
            let cur = self.term(n).expect("within horizon").into_owned();
            let q = Rational::new(cur.clone(), prev)?;
            if q > best {
                best = q;
            }
            prev = cur;
        }
        Ok(best)
    }
}

/// A strictly increasing sequence of positive integers (family 𝒮), given by a
/// finite prefix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StrictSeq {
    terms: Vec<BigUint>,
}

impl StrictSeq {
    pub fn new(terms: Vec<BigUint>) -> Result<Self> {
        if terms.first().is_some_and(Zero::is_zero) || terms.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidDescriptor("terms must be strictly increasing positive integers".into()));
        }
        Ok(StrictSeq { terms })
    }

    pub fn from_u64<I: IntoIterator<Item = u64>>(terms: I) -> Result<Self> {
        Self::new(terms.into_iter().map(BigUint::from).collect())
    }

    pub fn terms(&self) -> &[BigUint] {
        &self.terms
    }
}

impl IntSequence for StrictSeq {
    fn horizon(&self) -> u64 {
        self.terms.len() as u64
    }

    fn term(&self, n: u64) -> Option<Cow<'_, BigUint>> {
        let i = usize::try_from(n).ok()?.checked_sub(1)?;
        self.terms.get(i).map(Cow::Borrowed)
    }
}

/// A divisibility chain (family 𝒜) with its ratios `q_n = a_n / a_{n-1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ArithChain {
    descriptor: SeqDescriptor,
    terms: Vec<BigUint>,
    ratios: Vec<BigUint>,
}

impl ArithChain {
    /// Materializes the first `count` terms.
    pub fn build(descriptor: SeqDescriptor, count: usize) -> Result<Self> {
        descriptor.validate()?;
        let mut chain = ArithChain { descriptor, terms: Vec::new(), ratios: Vec::new() };
        chain.extend_to(count.max(1))?;
        Ok(chain)
    }

    /// Grows the prefix to `count` terms; the existing prefix is never touched.
    pub fn extend_to(&mut self, count: usize) -> Result<()> {
        if let Some(len) = self.descriptor.finite_len() {
            if count > len {
                return Err(Error::ChainExhausted { available: len, requested: count });
            }
        }
        while self.terms.len() < count {
            let n = self.terms.len() + 1;
            let q = self.descriptor.ratio(n).expect("finite length checked");
            let next = match self.terms.last() {
                None => q.clone(),
                Some(prev) => prev * &q,
            };
            if let SeqDescriptor::ExplicitTerms { terms } = &self.descriptor {
                let prev = self.terms.last().cloned().unwrap_or_else(BigUint::one);
                if !terms[n - 1].is_multiple_of(&prev) {
                    return Err(Error::NotDivisibilityChain {
                        index: n - 1,
                        prev: prev.to_string(),
                        next: terms[n - 1].to_string(),
                    });
                }
            }
            self.ratios.push(q);
            self.terms.push(next);
        }
        Ok(())
    }

    pub fn descriptor(&self) -> &SeqDescriptor {
        &self.descriptor
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &[BigUint] {
        &self.terms
    }

    /// `a_n`, 1-based.
    pub fn a(&self, n: usize) -> &BigUint {
        &self.terms[n - 1]
    }

    /// `q_n = a_n / a_{n-1}`, 1-based, `q_1 = a_1`.
    pub fn q(&self, n: usize) -> &BigUint {
        &self.ratios[n - 1]
    }

    pub fn ratios(&self) -> &[BigUint] {
        &self.ratios
    }

    pub fn is_finite(&self) -> bool {
        self.descriptor.finite_len().is_some()
    }
}

impl IntSequence for ArithChain {
    fn horizon(&self) -> u64 {
        self.terms.len() as u64
    }

    fn term(&self, n: u64) -> Option<Cow<'_, BigUint>> {
        let i = usize::try_from(n).ok()?.checked_sub(1)?;
        self.terms.get(i).map(Cow::Borrowed)
    }

    fn ratio_bound(&self, horizon: u64) -> Result<Rational> {
        if horizon > self.horizon() {
            return Err(Error::OutOfHorizon { index: horizon, horizon: self.horizon() });
        }
        let sup = self.ratios[..horizon as usize].iter().max().cloned().unwrap_or_default();
        Ok(Rational::from_integer(sup))
    }
}

/// One block `N_k = [start, end]` of a derived sequence.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Block {
    pub k: usize,
    pub start: u64,
    pub end: u64,
}

impl Block {
    pub fn len(&self) -> u64 {
        self.end - self.start + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// The derived sequence of a chain, materialized block by block.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DerivedSeq {
    chain: ArithChain,
    /// `anchors[k-1] = n_k` for `k = 1..=K+1`.
    anchors: Vec<u64>,
}

/// Builds the derived sequence over the first `block_count` blocks of `a`.
pub fn derive(a: &ArithChain, block_count: usize) -> Result<DerivedSeq> {
    DerivedSeq::new(a.clone(), block_count)
}

impl DerivedSeq {
    pub fn new(chain: ArithChain, block_count: usize) -> Result<Self> {
        let mut d = DerivedSeq { chain, anchors: vec![1] };
        d.extend_blocks(block_count)?;
        Ok(d)
    }

    /// Grows to `block_count` complete blocks, extending the chain as needed.
    pub fn extend_blocks(&mut self, block_count: usize) -> Result<()> {
        if self.chain.len() < block_count + 1 {
            self.chain.extend_to(block_count + 1)?;
        }
        while self.anchors.len() < block_count + 1 {
            let k = self.anchors.len();
            let size = (self.chain.q(k + 1) - 1u32).to_u64().ok_or(Error::IndexOverflow { block: k })?;
            let next = self.anchors[k - 1].checked_add(size).ok_or(Error::IndexOverflow { block: k })?;
            self.anchors.push(next);
        }
        Ok(())
    }

    pub fn chain(&self) -> &ArithChain {
        &self.chain
    }

    /// Number of complete blocks `K`.
    pub fn block_count(&self) -> usize {
        self.anchors.len() - 1
    }

    /// `n_k` for `1 <= k <= K + 1`.
    pub fn anchor(&self, k: usize) -> u64 {
        self.anchors[k - 1]
    }

    pub fn anchors(&self) -> &[u64] {
        &self.anchors
    }

    pub fn block(&self, k: usize) -> Block {
        Block { k, start: self.anchor(k), end: self.anchor(k + 1) - 1 }
    }

    pub fn blocks(&self) -> impl Iterator<Item = Block> + '_ {
        (1..=self.block_count()).map(|k| self.block(k))
    }

    /// `|N_k| = q_{k+1} - 1`.
    pub fn block_size(&self, k: usize) -> u64 {
        self.anchor(k + 1) - self.anchor(k)
    }

    /// The unique `(k, r)` with `n ∈ N_k` and `d_n = r·a_k`.
    pub fn block_of(&self, n: u64) -> Result<(usize, u64)> {
        if n == 0 || n > self.horizon() {
            return Err(Error::OutOfHorizon { index: n, horizon: self.horizon() });
        }
        let k = self.anchors.partition_point(|&a| a <= n);
        Ok((k, n - self.anchor(k) + 1))
    }

    /// All terms in index order. Only sensible for modest horizons.
    pub fn terms(&self) -> impl Iterator<Item = BigUint> + '_ {
        self.blocks().flat_map(move |b| {
            let a = self.chain.a(b.k);
            (1..=b.len()).map(move |r| a * r)
        })
    }
}

impl IntSequence for DerivedSeq {
    fn horizon(&self) -> u64 {
        self.anchors[self.anchors.len() - 1] - 1
    }

    fn term(&self, n: u64) -> Option<Cow<'_, BigUint>> {
        let (k, r) = self.block_of(n).ok()?;
        Some(if r == 1 { Cow::Borrowed(self.chain.a(k)) } else { Cow::Owned(self.chain.a(k) * r) })
    }

    /// Evaluated per block: inside a block the largest step is `2a_k / a_k`,
    /// across a block boundary it is `q_{k+1} / (q_{k+1} - 1)`.
    fn ratio_bound(&self, horizon: u64) -> Result<Rational> {
        if horizon > self.horizon() {
            return Err(Error::OutOfHorizon { index: horizon, horizon: self.horizon() });
        }
        if horizon == 0 {
            return Ok(Rational::zero());
        }
        let mut best = Rational::from_integer(self.chain.a(1).clone());
        let (last, _) = self.block_of(horizon)?;
        for k in 1..=last {
            let block = self.block(k);
            if block.start < horizon && block.len() >= 2 {
                best = best.max(Rational::from(2));
            }
            if block.end < horizon {
                let q = self.chain.q(k + 1);
                best = best.max(Rational::new(q.clone(), q - 1u32)?);
            }
        }
        Ok(best)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(xs: &[u64]) -> Vec<BigUint> {
        xs.iter().map(|&x| BigUint::from(x)).collect()
    }

    #[test]
    fn build_chain_examples() {
        let f = ArithChain::build(SeqDescriptor::Factorial, 5).unwrap();
        assert_eq!(f.terms(), big(&[1, 2, 6, 24, 120]).as_slice());
        let g = ArithChain::build(SeqDescriptor::geometric(2), 4).unwrap();
        assert_eq!(g.terms(), big(&[2, 4, 8, 16]).as_slice());
        let p = ArithChain::build(SeqDescriptor::pow2(), 5).unwrap();
        assert_eq!(p.terms(), big(&[1, 2, 8, 64, 1024]).as_slice());
    }

    #[test]
    fn ratio_chain_with_explicit_prefix_then_tail() {
        let c = ArithChain::build(SeqDescriptor::ratios(vec![2, 3], Tail::Repeat), 5).unwrap();
        assert_eq!(c.terms(), big(&[2, 6, 12, 36, 72]).as_slice());
        let c = ArithChain::build(SeqDescriptor::ratios(vec![3], Tail::PowersOfTwoExponents), 4).unwrap();
        assert_eq!(c.terms(), big(&[3, 6, 24, 192]).as_slice());
        let err = ArithChain::build(SeqDescriptor::ratios(vec![3, 5], Tail::None), 3).unwrap_err();
        assert_eq!(err, Error::ChainExhausted { available: 2, requested: 3 });
    }

    #[test]
    fn explicit_terms_must_divide() {
        let err = ArithChain::build(SeqDescriptor::explicit([2, 6, 15]), 3).unwrap_err();
        assert!(matches!(err, Error::NotDivisibilityChain { index: 2, .. }));
        let ok = ArithChain::build(SeqDescriptor::explicit([2, 6, 30]), 3).unwrap();
        assert_eq!(ok.ratios(), big(&[2, 3, 5]).as_slice());
    }

    #[test]
    fn invalid_descriptors() {
        assert!(SeqDescriptor::geometric(1).validate().is_err());
        assert!(SeqDescriptor::ratios(vec![2, 1], Tail::Repeat).validate().is_err());
        assert!(SeqDescriptor::ratios(vec![], Tail::Repeat).validate().is_err());
        assert!(SeqDescriptor::explicit([3, 2]).validate().is_err());
        assert!(SeqDescriptor::explicit([]).validate().is_err());
    }

    #[test]
    fn extension_preserves_prefix() {
        let short = ArithChain::build(SeqDescriptor::Factorial, 7).unwrap();
        let mut long = ArithChain::build(SeqDescriptor::Factorial, 3).unwrap();
        long.extend_to(20).unwrap();
        assert_eq!(&long.terms()[..7], short.terms());
    }

    #[test]
    fn compact_grammar_round_trips() {
        for s in ["factorial", "geometric:3", "ratios:2,3:repeat", "ratios::pow2", "ratios:4:none", "explicit:1,2,6"] {
            let d: SeqDescriptor = s.parse().unwrap();
            let again: SeqDescriptor = d.to_string().parse().unwrap();
            assert_eq!(d, again, "{s}");
        }
        assert_eq!("pow2".parse::<SeqDescriptor>().unwrap(), SeqDescriptor::pow2());
        assert!("pow2:3".parse::<SeqDescriptor>().is_err());
        assert!("geometric".parse::<SeqDescriptor>().is_err());
        assert!("ratios:2:forever".parse::<SeqDescriptor>().is_err());
    }

    #[test]
    fn descriptor_json_forms() {
        let cases = [
            (r#"{"kind":"factorial"}"#, SeqDescriptor::Factorial),
            (r#"{"kind":"geometric","base":2}"#, SeqDescriptor::geometric(2)),
            (r#"{"kind":"ratio_chain","ratios":[2,3],"tail":"repeat"}"#, SeqDescriptor::ratios(vec![2, 3], Tail::Repeat)),
            (r#"{"kind":"ratio_chain","ratios":[],"tail":"pow2_exponents"}"#, SeqDescriptor::pow2()),
            (r#"{"kind":"explicit","terms":["1","2","6"]}"#, SeqDescriptor::explicit([1, 2, 6])),
        ];
        for (json, want) in cases {
            let got: SeqDescriptor = serde_json::from_str(json).unwrap();
            assert_eq!(got, want);
            assert_eq!(serde_json::to_string(&got).unwrap(), json);
        }
    }

    #[test]
    fn derive_factorial() {
        let f = ArithChain::build(SeqDescriptor::Factorial, 6).unwrap();
        let d = derive(&f, 5).unwrap();
        // Block 5 continues with 240, 360, ...
        let terms: Vec<BigUint> = d.terms().take(11).collect();
        assert_eq!(terms, big(&[1, 2, 4, 6, 12, 18, 24, 48, 72, 96, 120]));
        assert_eq!(&d.anchors()[..5], &[1, 2, 4, 7, 11]);
    }

    #[test]
    fn derive_geometric_is_identity() {
        let g = ArithChain::build(SeqDescriptor::geometric(2), 12).unwrap();
        let d = derive(&g, 11).unwrap();
        let terms: Vec<BigUint> = d.terms().collect();
        assert_eq!(terms.as_slice(), &g.terms()[..11]);
    }

    #[test]
    fn pow2_anchors_closed_form() {
        let p = ArithChain::build(SeqDescriptor::pow2(), 2).unwrap();
        let d = derive(&p, 60).unwrap();
        for k in 1..=61usize {
            assert_eq!(d.anchor(k), (1u64 << k) - k as u64, "n_{k}");
        }
    }

    #[test]
    fn block_of_examples() {
        let f = ArithChain::build(SeqDescriptor::Factorial, 2).unwrap();
        let d = derive(&f, 5).unwrap();
        assert_eq!(d.block_of(7).unwrap(), (4, 1));
        assert_eq!(d.block_of(5).unwrap(), (3, 2));
        assert_eq!(d.block_of(1).unwrap(), (1, 1));
        assert!(matches!(d.block_of(d.horizon() + 1), Err(Error::OutOfHorizon { .. })));
        assert!(d.block_of(0).is_err());
    }

    #[test]
    fn ratio_bound_examples() {
        let g = ArithChain::build(SeqDescriptor::geometric(3), 10).unwrap();
        for h in 1..=10 {
            assert_eq!(g.ratio_bound(h).unwrap(), Rational::from(3));
        }
        let f = ArithChain::build(SeqDescriptor::Factorial, 5).unwrap();
        assert_eq!(f.ratio_bound(5).unwrap(), Rational::from(5));
        let d = derive(&f, 4).unwrap();
        assert!(d.ratio_bound(d.horizon()).unwrap() <= Rational::from(2));
        // Blockwise evaluation agrees with the generic term-by-term scan.
        for desc in [SeqDescriptor::Factorial, SeqDescriptor::geometric(3), SeqDescriptor::pow2(), SeqDescriptor::ratios(vec![5, 2, 7], Tail::Repeat)] {
            let d = derive(&ArithChain::build(desc, 2).unwrap(), 7).unwrap();
            let terms: Vec<BigUint> = d.terms().collect();
            let s = StrictSeq::new(terms).unwrap();
            for h in 1..=d.horizon() {
                assert_eq!(d.ratio_bound(h).unwrap(), s.ratio_bound(h).unwrap(), "horizon {h}");
            }
        }
        let s = StrictSeq::from_u64([2, 3, 5]).unwrap();
        assert_eq!(s.ratio_bound(3).unwrap(), Rational::from(2));
        assert_eq!(s.ratio_bound(2).unwrap(), Rational::from(2));
        assert!(s.ratio_bound(4).is_err());
    }

    #[test]
    fn strict_seq_validation() {
        assert!(StrictSeq::from_u64([1, 1]).is_err());
        assert!(StrictSeq::from_u64([0, 1]).is_err());
        assert!(StrictSeq::from_u64([1, 2, 9]).is_ok());
    }
}
