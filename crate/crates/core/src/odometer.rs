//! Exact arithmetic and metric geometry on the dyadic odometer.
//!
//! Points are one-sided binary digit streams indexed from 1, stored as a
//! finite prefix plus a tail rule so that the special points `0^∞` and `1^∞`
//! and all eventually-periodic streams are exact. Digit i carries weight
//! 2^(i-1); add-one carries from left to right.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tail rule for the digits beyond the stored prefix.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Tail {
    AllZeros,
    AllOnes,
    /// Repeats the word forever, starting right after the prefix.
    Periodic(Vec<bool>),
}

/// A point of the dyadic odometer: finite prefix + tail rule, kept canonical.
///
/// Canonical form: the periodic word is primitive (not a repetition of a
/// shorter word), all-zero/all-one words are folded into the constant tails,
/// and trailing prefix bits that agree with the tail rule are absorbed.
/// Structural equality on canonical points coincides with digitwise equality.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OdometerPoint {
    prefix: Vec<bool>,
    tail: Tail,
}

impl OdometerPoint {
    pub fn new(prefix: Vec<bool>, tail: Tail) -> Self {
        let mut p = OdometerPoint { prefix, tail };
        p.canonicalize();
        p
    }

    /// The point `0^∞` (underline 0).
    pub fn zero() -> Self {
        OdometerPoint {
            prefix: Vec::new(),
            tail: Tail::AllZeros,
        }
    }

    /// The point `1^∞`.
    pub fn all_ones() -> Self {
        OdometerPoint {
            prefix: Vec::new(),
            tail: Tail::AllOnes,
        }
    }

    /// Embeds a nonnegative integer as its LSB-first digit stream, zeros beyond.
    pub fn from_integer(n: &BigUint) -> Self {
        let bits = (0..n.bits()).map(|i| n.bit(i)).collect();
        OdometerPoint::new(bits, Tail::AllZeros)
    }

    pub fn prefix_len(&self) -> usize {
        self.prefix.len()
    }

    pub fn tail(&self) -> &Tail {
        &self.tail
    }

    /// Digit at 1-indexed position `i`.
    pub fn digit(&self, i: usize) -> bool {
        assert!(i >= 1, "digit positions are 1-indexed");
        let l = self.prefix.len();
        if i <= l {
            self.prefix[i - 1]
        } else {
            match &self.tail {
                Tail::AllZeros => false,
                Tail::AllOnes => true,
                Tail::Periodic(w) => w[(i - l - 1) % w.len()],
            }
        }
    }

    pub fn is_all_ones(&self) -> bool {
        self.prefix.is_empty() && self.tail == Tail::AllOnes
    }

    pub fn is_zero(&self) -> bool {
        self.prefix.is_empty() && self.tail == Tail::AllZeros
    }

    /// Period length of the tail rule (1 for the constant tails).
    fn period(&self) -> usize {
        match &self.tail {
            Tail::Periodic(w) => w.len(),
            _ => 1,
        }
    }

    fn canonicalize(&mut self) {
        // Fold degenerate periodic words into the constant tails, and reduce
        // the word to its primitive root so the period is minimal.
        if let Tail::Periodic(w) = &self.tail {
            assert!(!w.is_empty(), "periodic tail word must be nonempty");
            if w.iter().all(|&b| !b) {
                self.tail = Tail::AllZeros;
            } else if w.iter().all(|&b| b) {
                self.tail = Tail::AllOnes;
            } else {
                let root = primitive_root(w);
                if root.len() < w.len() {
                    self.tail = Tail::Periodic(root);
                }
            }
        }
        // Absorb trailing prefix bits that the tail rule already produces.
        // For a periodic tail the word phase shifts right by one per absorbed bit.
        while let Some(&last) = self.prefix.last() {
            match &mut self.tail {
                Tail::AllZeros if !last => {
                    self.prefix.pop();
                }
                Tail::AllOnes if last => {
                    self.prefix.pop();
                }
                Tail::Periodic(w) if last == *w.last().expect("nonempty word") => {
                    self.prefix.pop();
                    w.rotate_right(1);
                }
                _ => break,
            }
        }
    }

    /// First 1-indexed position holding a zero digit, `None` for `1^∞`.
    fn first_zero_digit(&self) -> Option<usize> {
        if let Some(i) = self.prefix.iter().position(|&b| !b) {
            return Some(i + 1);
        }
        let l = self.prefix.len();
        match &self.tail {
            Tail::AllZeros => Some(l + 1),
            Tail::AllOnes => None,
            Tail::Periodic(w) => w.iter().position(|&b| !b).map(|j| l + 1 + j),
        }
    }

    /// Materializes digits 1..=n.
    pub fn digits(&self, n: usize) -> Vec<bool> {
        (1..=n).map(|i| self.digit(i)).collect()
    }

    /// Value of the first `n` digits as an integer (digit i weighs 2^(i-1)).
    pub fn prefix_value(&self, n: usize) -> BigUint {
        let mut v = BigUint::zero();
        for i in (1..=n).rev() {
            v <<= 1;
            if self.digit(i) {
                v |= BigUint::one();
            }
        }
        v
    }
}

/// Longest proper divisor-period word, or the word itself if primitive.
fn primitive_root(w: &[bool]) -> Vec<bool> {
    let n = w.len();
    for d in 1..n {
        if n.is_multiple_of(d) && (0..n).all(|i| w[i] == w[i % d]) {
            return w[..d].to_vec();
        }
    }
    w.to_vec()
}

/// The adding machine: `p + 1` with carry propagating left to right.
pub fn tau(p: &OdometerPoint) -> OdometerPoint {
    let Some(i0) = p.first_zero_digit() else {
        // 1^∞ + 1 = 0^∞: the carry never stops.
        return OdometerPoint::zero();
    };
    // Digits 1..i0-1 flip 1 -> 0, digit i0 flips 0 -> 1, the rest are kept.
    let mut prefix: Vec<bool> = vec![false; i0 - 1];
    prefix.push(true);
    let l = p.prefix_len();
    let tail = if i0 <= l {
        prefix.extend_from_slice(&p.prefix[i0..]);
        p.tail.clone()
    } else {
        // The flip landed inside the tail; re-anchor the tail rule after it.
        match &p.tail {
            Tail::AllZeros => Tail::AllZeros,
            Tail::AllOnes => unreachable!("all-ones tail has no zero digit"),
            Tail::Periodic(w) => {
                let mut w = w.clone();
                let shift = (i0 - l) % w.len();
                w.rotate_left(shift);
                Tail::Periodic(w)
            }
        }
    };
    OdometerPoint::new(prefix, tail)
}

/// Inverse adding machine: `p - 1` with borrow propagating left to right.
///
/// `0^∞` wraps to `1^∞`, matching `tau(1^∞) = 0^∞`.
pub fn tau_inv(p: &OdometerPoint) -> OdometerPoint {
    // First 1 digit absorbs the borrow; leading zeros flip to ones.
    let i0 = {
        if let Some(i) = p.prefix.iter().position(|&b| b) {
            Some(i + 1)
        } else {
            let l = p.prefix_len();
            match &p.tail {
                Tail::AllOnes => Some(l + 1),
                Tail::AllZeros => None,
                Tail::Periodic(w) => w.iter().position(|&b| b).map(|j| l + 1 + j),
            }
        }
    };
    let Some(i0) = i0 else {
        return OdometerPoint::all_ones();
    };
    let mut prefix: Vec<bool> = vec![true; i0 - 1];
    prefix.push(false);
    let l = p.prefix_len();
    let tail = if i0 <= l {
        prefix.extend_from_slice(&p.prefix[i0..]);
        p.tail.clone()
    } else {
        match &p.tail {
            Tail::AllOnes => Tail::AllOnes,
            Tail::AllZeros => unreachable!("all-zeros tail has no one digit"),
            Tail::Periodic(w) => {
                let mut w = w.clone();
                let shift = (i0 - l) % w.len();
                w.rotate_left(shift);
                Tail::Periodic(w)
            }
        }
    };
    OdometerPoint::new(prefix, tail)
}

/// Batch form of `tau`: `p + m` by binary addition of `m`'s bit expansion.
///
/// Iteration counts in the flow reach `m_k = 2^(n_1+..+n_k)`, so `m` is an
/// exact big integer, never a machine word.
pub fn add(p: &OdometerPoint, m: &BigUint) -> OdometerPoint {
    if m.is_zero() {
        return p.clone();
    }
    let l = p.prefix_len();
    let width = l.max(m.bits() as usize);
    let mut bits = p.digits(width);
    let mut carry = false;
    for (i, bit) in bits.iter_mut().enumerate() {
        let sum = (*bit as u8) + (m.bit(i as u64) as u8) + (carry as u8);
        *bit = sum & 1 == 1;
        carry = sum >= 2;
    }
    let mut tail = p.tail.clone();
    let mut total = width;
    if carry {
        match &p.tail {
            Tail::AllZeros => bits.push(true),
            // Carry through an all-ones tail flips every remaining digit.
            Tail::AllOnes => tail = Tail::AllZeros,
            Tail::Periodic(w) => {
                // A canonical periodic word contains a zero, so the carry
                // stops within one period.
                let mut j = 0usize;
                loop {
                    let b = w[(width - l + j) % w.len()];
                    bits.push(!b);
                    j += 1;
                    if !b {
                        break;
                    }
                }
                total = width + j;
            }
        }
    }
    if let Tail::Periodic(w) = &p.tail {
        if tail == p.tail {
            let mut w = w.clone();
            let shift = (total - l) % w.len();
            w.rotate_left(shift);
            tail = Tail::Periodic(w);
        }
    }
    OdometerPoint::new(bits, tail)
}

/// 1-indexed position of the first disagreeing digit, `None` if equal.
///
/// Two eventually-periodic streams that agree up to the sum of both prefix
/// lengths plus one joint period are equal, so the scan is finite.
pub fn first_disagreement(p: &OdometerPoint, q: &OdometerPoint) -> Option<usize> {
    let bound =
        p.prefix_len() + q.prefix_len() + num_integer::lcm(p.period(), q.period()) + 1;
    (1..=bound).find(|&i| p.digit(i) != q.digit(i))
}

/// The odometer metric `d(p, q) = 1 / min{i : p_i != q_i}`, 0 when equal.
pub fn metric_d(p: &OdometerPoint, q: &OdometerPoint) -> f64 {
    match first_disagreement(p, q) {
        Some(i) => 1.0 / i as f64,
        None => 0.0,
    }
}

impl fmt::Display for OdometerPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.prefix {
            f.write_str(if b { "1" } else { "0" })?;
        }
        match &self.tail {
            Tail::AllZeros => f.write_str("*0"),
            Tail::AllOnes => f.write_str("*1"),
            Tail::Periodic(w) => {
                f.write_str("(")?;
                for &b in w {
                    f.write_str(if b { "1" } else { "0" })?;
                }
                f.write_str(")")
            }
        }
    }
}

fn parse_bits(s: &str, literal: &str) -> Result<Vec<bool>> {
    s.chars()
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            other => Err(Error::InvalidPointLiteral {
                literal: literal.to_string(),
                reason: format!("unexpected character {other:?}"),
            }),
        })
        .collect()
}

impl FromStr for OdometerPoint {
    type Err = Error;

    /// Parses point literals: `110*0` (prefix then all-zeros tail), `*1`
    /// (`1^∞`), `01(10)` (prefix then periodic tail word).
    fn from_str(s: &str) -> Result<Self> {
        let bad = |reason: &str| Error::InvalidPointLiteral {
            literal: s.to_string(),
            reason: reason.to_string(),
        };
        if let Some(star) = s.find('*') {
            let prefix = parse_bits(&s[..star], s)?;
            let tail = match &s[star + 1..] {
                "0" => Tail::AllZeros,
                "1" => Tail::AllOnes,
                _ => return Err(bad("expected `*0` or `*1` tail")),
            };
            Ok(OdometerPoint::new(prefix, tail))
        } else if let Some(open) = s.find('(') {
            if !s.ends_with(')') {
                return Err(bad("unterminated periodic tail"));
            }
            let prefix = parse_bits(&s[..open], s)?;
            let word = parse_bits(&s[open + 1..s.len() - 1], s)?;
            if word.is_empty() {
                return Err(bad("periodic tail word must be nonempty"));
            }
            Ok(OdometerPoint::new(prefix, Tail::Periodic(word)))
        } else {
            Err(bad("missing tail rule (`*0`, `*1`, or `(word)`)"))
        }
    }
}

impl Serialize for OdometerPoint {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for OdometerPoint {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Extension rule for block lengths beyond the stored list.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScheduleExtension {
    RepeatLast,
    Arithmetic { step: u32 },
}

/// The fixed nondecreasing sequence `{n_i}` partitioning digit streams into
/// blocks; block k has `n_k` digits.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockSchedule {
    blocks: Vec<u32>,
    extension: ScheduleExtension,
}

impl BlockSchedule {
    pub fn new(blocks: Vec<u32>, extension: ScheduleExtension) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::InvalidSchedule("at least one block length".into()));
        }
        if let Some(&n) = blocks.iter().find(|&&n| n < 2) {
            return Err(Error::InvalidSchedule(format!(
                "block length {n} < 2 makes the level-1 rotation angle undefined"
            )));
        }
        if blocks.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::InvalidSchedule(
                "block lengths must be nondecreasing".into(),
            ));
        }
        Ok(BlockSchedule { blocks, extension })
    }

    pub fn repeat_last(blocks: Vec<u32>) -> Result<Self> {
        Self::new(blocks, ScheduleExtension::RepeatLast)
    }

    /// Block length `n_k`, 1-indexed, following the extension rule beyond the
    /// stored list.
    pub fn block_len(&self, k: u32) -> u32 {
        assert!(k >= 1, "block indices are 1-indexed");
        let stored = self.blocks.len() as u32;
        if k <= stored {
            self.blocks[(k - 1) as usize]
        } else {
            let last = *self.blocks.last().expect("nonempty");
            match self.extension {
                ScheduleExtension::RepeatLast => last,
                ScheduleExtension::Arithmetic { step } => last + step * (k - stored),
            }
        }
    }

    /// Cumulative offset `off(k) = n_1 + ... + n_k`; `off(0) = 0`.
    pub fn offset(&self, k: u32) -> u64 {
        (1..=k).map(|i| self.block_len(i) as u64).sum()
    }

    /// The block recurrence time `m_k = 2^off(k)` as an exact big integer.
    pub fn return_time(&self, k: u32) -> BigUint {
        BigUint::one() << self.offset(k)
    }

    pub fn stored_blocks(&self) -> &[u32] {
        &self.blocks
    }

    pub fn extension(&self) -> &ScheduleExtension {
        &self.extension
    }

    /// Degenerate-parameter warnings; `n = 2` on an odd level yields a full-turn
    /// rotation, i.e. an identity cocycle map.
    pub fn warnings(&self) -> Vec<String> {
        self.blocks
            .iter()
            .enumerate()
            .filter(|(_, &n)| n == 2)
            .map(|(i, _)| {
                format!(
                    "block length n_{} = 2: the level rotation angle degenerates to a full turn",
                    i + 1
                )
            })
            .collect()
    }
}

/// A finite bit word; used for schedule blocks and `e`-values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitWord {
    bits: Vec<bool>,
}

impl BitWord {
    pub fn new(bits: Vec<bool>) -> Self {
        assert!(!bits.is_empty(), "bit words have width >= 1");
        BitWord { bits }
    }

    pub fn width(&self) -> u32 {
        self.bits.len() as u32
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn contains_zero(&self) -> bool {
        self.bits.iter().any(|&b| !b)
    }
}

impl fmt::Display for BitWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// The k-th schedule block of `p`'s digit stream (width `n_k`).
pub fn block_at(p: &OdometerPoint, schedule: &BlockSchedule, k: u32) -> BitWord {
    let start = schedule.offset(k - 1) as usize;
    let width = schedule.block_len(k) as usize;
    BitWord::new((start + 1..=start + width).map(|i| p.digit(i)).collect())
}

/// Smallest `k <= search_limit` whose block contains a zero digit.
///
/// `1^∞` is settled from the tail rule without scanning. Any other canonical
/// point has a zero at a finite position, so the scan terminates; the limit
/// only guards callers that pass one too small.
pub fn first_zero_block(
    p: &OdometerPoint,
    schedule: &BlockSchedule,
    search_limit: usize,
) -> Result<Option<u32>> {
    if p.is_all_ones() {
        return Ok(None);
    }
    for k in 1..=search_limit as u32 {
        if block_at(p, schedule, k).contains_zero() {
            return Ok(Some(k));
        }
    }
    Err(Error::SearchLimitExceeded {
        limit: search_limit,
    })
}

/// The evaluation function `e(x) = x_1 + 2 x_2 + ... + 2^(n-1) x_n`.
pub fn eval_e(w: &BitWord) -> BigUint {
    let mut v = BigUint::zero();
    for (i, &b) in w.bits.iter().enumerate() {
        if b {
            v.set_bit(i as u64, true);
        }
    }
    v
}

/// Inverse of `eval_e` at fixed width: `underline n`.
pub fn unval(n: &BigUint, width: u32) -> Result<BitWord> {
    if n.bits() > width as u64 {
        return Err(Error::OutOfRange {
            value: n.to_string(),
            width,
        });
    }
    Ok(BitWord::new(
        (0..width as u64).map(|i| n.bit(i)).collect(),
    ))
}
