//! Signature index words and the Itô product rules on them.
//!
//! A word `(i_1, ..., i_n)` indexes the iterated integral whose innermost
//! integrator is `i_1` and whose outermost integrator is `i_n`. Letter `0` is
//! time, letters `1..=d` are independent Brownian motions and letters
//! `-1..=-(e*m)` are compound Poisson power processes `N^{j,k}`, enumerated
//! driver-major: `-1 = N^{1,1}, ..., -m = N^{1,m}, -(m+1) = N^{2,1}, ...`.
//!
//! The star product turns the pointwise product of two signature components
//! into a linear combination of components:
//!
//! ```
//! use sigexpand::word_algebra::{star, Word};
//!
//! let k = star(&Word::from([1]), &Word::from([1])).unwrap();
//! assert_eq!(k.to_string(), "(0) + 2(1,1)");
//! ```

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::Deref;
use std::sync::{Arc, LazyLock, RwLock};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::error::{Error, Result};

pub type Letter = i16;

/// The alphabet `{-e*m, ..., -1, 0, 1, ..., d}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AlphabetConfig {
    /// Number of Brownian letters.
    pub d: u16,
    /// Number of compound Poisson drivers.
    pub e: u16,
    /// Jump-power depth.
    pub m: u16,
}

impl AlphabetConfig {
    pub fn new(d: u16, e: u16, m: u16) -> Result<Self> {
        if m == 0 {
            return Err(Error::Configuration("jump-power depth m must be at least 1".into()));
        }
        if (e as u32) * (m as u32) > i16::MAX as u32 || d as u32 > i16::MAX as u32 {
            return Err(Error::Configuration("alphabet too large".into()));
        }
        Ok(AlphabetConfig { d, e, m })
    }

    /// Brownian-only alphabet with `d` drivers.
    pub fn continuous(d: u16) -> Self {
        AlphabetConfig { d, e: 0, m: 1 }
    }

    pub fn min_letter(&self) -> Letter {
        -((self.e as i32 * self.m as i32) as Letter)
    }

    pub fn contains(&self, letter: Letter) -> bool {
        letter >= self.min_letter() && letter <= self.d as Letter
    }

    pub fn check_letter(&self, letter: Letter) -> Result<()> {
        if self.contains(letter) {
            Ok(())
        } else {
            Err(Error::InvalidLetter { letter, d: self.d, e: self.e, m: self.m })
        }
    }

    pub fn check_word(&self, word: &Word) -> Result<()> {
        word.iter().try_for_each(|&l| self.check_letter(l))
    }

    /// The bijection from jump letters to `(driver, power)`.
    pub fn decode_jump(&self, letter: Letter) -> Result<(u16, u16)> {
        if letter >= 0 || !self.contains(letter) {
            return Err(Error::InvalidLetter { letter, d: self.d, e: self.e, m: self.m });
        }
        let idx = (-(letter as i32) - 1) as u16;
        Ok((idx / self.m + 1, idx % self.m + 1))
    }

    /// Inverse of [`decode_jump`](Self::decode_jump).
    pub fn encode_jump(&self, driver: u16, power: u16) -> Result<Letter> {
        if driver == 0 || driver > self.e {
            return Err(Error::Configuration(format!(
                "jump driver {driver} outside 1..={}",
                self.e
            )));
        }
        if power == 0 || power > self.m {
            return Err(Error::DepthOverflow { driver, power, m: self.m });
        }
        Ok(-(((driver - 1) as i32 * self.m as i32 + power as i32) as Letter))
    }

    /// Jump letter of the same driver carrying the summed power.
    pub fn circ(&self, i: Letter, j: Letter) -> Result<Letter> {
        let (di, pi) = self.decode_jump(i)?;
        let (dj, pj) = self.decode_jump(j)?;
        if di != dj {
            return Err(Error::Precondition(format!(
                "circ requires letters of the same driver, got {i} and {j}"
            )));
        }
        self.encode_jump(di, pi + pj)
    }

    /// Maps a base-alphabet letter (`-j` meaning `N^j`) into this alphabet.
    pub fn lift_base_letter(&self, letter: Letter) -> Result<Letter> {
        if letter >= 0 {
            self.check_letter(letter)?;
            Ok(letter)
        } else {
            self.encode_jump((-letter) as u16, 1)
        }
    }

    pub fn lift_base_word(&self, word: &Word) -> Result<Word> {
        word.iter().map(|&l| self.lift_base_letter(l)).collect()
    }

    /// Concatenation with both operands checked against this alphabet.
    pub fn concat(&self, left: &Word, right: &Word) -> Result<Word> {
        self.check_word(left)?;
        self.check_word(right)?;
        Ok(left.concat(right))
    }
}

impl fmt::Display for AlphabetConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "d={}, e={}, m={}", self.d, self.e, self.m)
    }
}

/// A finite sequence of letters. Words order by length first, then
/// lexicographically.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Word(SmallVec<[Letter; 8]>);

impl Word {
    pub fn empty() -> Self {
        Word(SmallVec::new())
    }

    pub fn from_slice(letters: &[Letter]) -> Self {
        Word(SmallVec::from_slice(letters))
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn last(&self) -> Option<Letter> {
        self.0.last().copied()
    }

    /// `I'`: the word without its last letter. `None` for the empty word.
    pub fn prefix(&self) -> Option<Word> {
        if self.0.is_empty() {
            None
        } else {
            Some(Word::from_slice(&self.0[..self.0.len() - 1]))
        }
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut out = self.0.clone();
        out.extend_from_slice(&other.0);
        Word(out)
    }

    pub fn pushed(&self, letter: Letter) -> Word {
        let mut out = self.0.clone();
        out.push(letter);
        Word(out)
    }

    pub fn count(&self, letter: Letter) -> usize {
        self.0.iter().filter(|&&l| l == letter).count()
    }

    pub fn stats(&self) -> LetterStats {
        letter_stats(self)
    }

    pub fn has_jump_letters(&self) -> bool {
        self.0.iter().any(|&l| l < 0)
    }

    /// `|I| + I(0)`: time letters count twice.
    pub fn weight(&self) -> usize {
        self.len() + self.count(0)
    }
}

impl Deref for Word {
    type Target = [Letter];
    fn deref(&self) -> &[Letter] {
        &self.0
    }
}

impl<const N: usize> From<[Letter; N]> for Word {
    fn from(letters: [Letter; N]) -> Self {
        Word::from_slice(&letters)
    }
}

impl From<Vec<Letter>> for Word {
    fn from(letters: Vec<Letter>) -> Self {
        Word(SmallVec::from_vec(letters))
    }
}

impl FromIterator<Letter> for Word {
    fn from_iter<T: IntoIterator<Item = Letter>>(iter: T) -> Self {
        Word(iter.into_iter().collect())
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.as_slice().cmp(other.0.as_slice()))
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("∅");
        }
        f.write_str("(")?;
        for (k, l) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{l}")?;
        }
        f.write_str(")")
    }
}

impl Serialize for Word {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.0.as_slice().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        Ok(Word::from(Vec::<Letter>::deserialize(d)?))
    }
}

/// Letter counts of a word.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LetterStats {
    pub counts: BTreeMap<Letter, usize>,
    pub zero: usize,
    pub negative: usize,
    pub positive: usize,
    pub len: usize,
}

impl LetterStats {
    /// `I(k)`.
    pub fn count(&self, letter: Letter) -> usize {
        self.counts.get(&letter).copied().unwrap_or(0)
    }
}

pub fn letter_stats(word: &Word) -> LetterStats {
    let mut stats = LetterStats { len: word.len(), ..Default::default() };
    for &l in word.iter() {
        *stats.counts.entry(l).or_default() += 1;
        match l.cmp(&0) {
            std::cmp::Ordering::Less => stats.negative += 1,
            std::cmp::Ordering::Equal => stats.zero += 1,
            std::cmp::Ordering::Greater => stats.positive += 1,
        }
    }
    stats
}

/// Coefficient rings usable in a [`WordCombination`].
pub trait Coefficient: Clone + PartialEq + fmt::Debug + Zero + One + Send + Sync {
    fn from_integer(n: &BigInt) -> Self;
}

impl Coefficient for BigInt {
    fn from_integer(n: &BigInt) -> Self {
        n.clone()
    }
}

impl Coefficient for num_rational::BigRational {
    fn from_integer(n: &BigInt) -> Self {
        num_rational::BigRational::from_integer(n.clone())
    }
}

/// A finite formal linear combination of words, kept in normal form (no
/// stored zero coefficients).
#[derive(Clone, PartialEq, Eq)]
pub struct WordCombination<C> {
    terms: BTreeMap<Word, C>,
}

impl<C: Coefficient> Default for WordCombination<C> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<C: Coefficient> WordCombination<C> {
    pub fn zero() -> Self {
        WordCombination { terms: BTreeMap::new() }
    }

    pub fn word(word: Word) -> Self {
        Self::term(word, C::one())
    }

    pub fn term(word: Word, coeff: C) -> Self {
        let mut out = Self::zero();
        out.add_term(word, coeff);
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// `⟨I, ·⟩`.
    pub fn coeff(&self, word: &Word) -> Option<&C> {
        self.terms.get(word)
    }

    pub fn coeff_or_zero(&self, word: &Word) -> C {
        self.terms.get(word).cloned().unwrap_or_else(C::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Word, &C)> {
        self.terms.iter()
    }

    pub fn words(&self) -> impl Iterator<Item = &Word> {
        self.terms.keys()
    }

    pub fn add_term(&mut self, word: Word, coeff: C) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(word) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = o.get().clone() + coeff;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn add_assign(&mut self, other: &Self) {
        for (w, c) in &other.terms {
            self.add_term(w.clone(), c.clone());
        }
    }

    pub fn add_scaled(&mut self, other: &Self, factor: &C) {
        if factor.is_zero() {
            return;
        }
        for (w, c) in &other.terms {
            self.add_term(w.clone(), c.clone() * factor.clone());
        }
    }

    pub fn scaled(&self, factor: &C) -> Self {
        let mut out = Self::zero();
        out.add_scaled(self, factor);
        out
    }

    /// Appends `letter` to every word.
    pub fn append_letter(&self, letter: Letter) -> Self {
        WordCombination {
            terms: self.terms.iter().map(|(w, c)| (w.pushed(letter), c.clone())).collect(),
        }
    }

    pub fn map_coeffs<D: Coefficient>(&self, f: impl Fn(&C) -> D) -> WordCombination<D> {
        let mut out = WordCombination::zero();
        for (w, c) in &self.terms {
            out.add_term(w.clone(), f(c));
        }
        out
    }

    pub fn lift<D: Coefficient>(&self) -> WordCombination<D>
    where
        C: Into<BigInt>,
    {
        self.map_coeffs(|c| D::from_integer(&c.clone().into()))
    }
}

impl WordCombination<BigInt> {
    pub fn convert<D: Coefficient>(&self) -> WordCombination<D> {
        self.map_coeffs(D::from_integer)
    }
}

impl<C: Coefficient> FromIterator<(Word, C)> for WordCombination<C> {
    fn from_iter<T: IntoIterator<Item = (Word, C)>>(iter: T) -> Self {
        let mut out = Self::zero();
        for (w, c) in iter {
            out.add_term(w, c);
        }
        out
    }
}

impl<C: Coefficient + fmt::Display> fmt::Display for WordCombination<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (k, (w, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                f.write_str(" + ")?;
            }
            if c.is_one() {
                write!(f, "{w}")?;
            } else {
                write!(f, "{c}{w}")?;
            }
        }
        Ok(())
    }
}

impl<C: Coefficient + fmt::Display> fmt::Debug for WordCombination<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Which product rule to use.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProductMode {
    /// `⋆`: Brownian and time letters only.
    Continuous,
    /// `⋆̄`: adds the jump co-variation term.
    Jump,
}

type Product = Arc<WordCombination<BigInt>>;

#[derive(Clone, PartialEq, Eq, Hash)]
struct CacheKey {
    left: Word,
    right: Word,
    // (e, m) for the bar-star product; (0, 0) for the continuous one.
    fingerprint: (u16, u16),
}

static PRODUCT_CACHE: LazyLock<RwLock<HashMap<CacheKey, Product>>> =
    LazyLock::new(|| RwLock::new(HashMap::new()));

/// Number of memoized products currently cached.
pub fn product_cache_len() -> usize {
    PRODUCT_CACHE.read().map(|c| c.len()).unwrap_or(0)
}

pub fn clear_product_cache() {
    if let Ok(mut c) = PRODUCT_CACHE.write() {
        c.clear();
    }
}

fn rho(i: Letter, j: Letter) -> bool {
    i == j && i > 0
}

/// The continuous star product `I ⋆ J`.
pub fn star(left: &Word, right: &Word) -> Result<WordCombination<BigInt>> {
    for w in [left, right] {
        if w.has_jump_letters() {
            return Err(Error::JumpLetterInStar { word: w.to_string() });
        }
    }
    Ok(product_cached(left, right, None)?.as_ref().clone())
}

/// The jump-aware product `I ⋆̄ J` over the extended alphabet of `cfg`.
pub fn bar_star(left: &Word, right: &Word, cfg: &AlphabetConfig) -> Result<WordCombination<BigInt>> {
    cfg.check_word(left)?;
    cfg.check_word(right)?;
    Ok(product_cached(left, right, Some(cfg))?.as_ref().clone())
}

/// Product of two words under `mode`.
pub fn product(
    left: &Word,
    right: &Word,
    cfg: &AlphabetConfig,
    mode: ProductMode,
) -> Result<WordCombination<BigInt>> {
    match mode {
        ProductMode::Continuous => star(left, right),
        ProductMode::Jump => bar_star(left, right, cfg),
    }
}

fn product_cached(left: &Word, right: &Word, cfg: Option<&AlphabetConfig>) -> Result<Product> {
    if left.is_empty() {
        return Ok(Arc::new(WordCombination::word(right.clone())));
    }
    if right.is_empty() {
        return Ok(Arc::new(WordCombination::word(left.clone())));
    }
    let (a, b) = if left <= right { (left, right) } else { (right, left) };
    // Without jump letters the bar-star product is the star product, so those
    // pairs share one cache entry.
    let cfg = cfg.filter(|_| a.has_jump_letters() || b.has_jump_letters());
    let key = CacheKey {
        left: a.clone(),
        right: b.clone(),
        fingerprint: cfg.map(|c| (c.e, c.m)).unwrap_or((0, 0)),
    };
    if let Some(hit) = PRODUCT_CACHE.read().ok().and_then(|c| c.get(&key).cloned()) {
        return Ok(hit);
    }
    let value = Arc::new(product_uncached(a, b, cfg)?);
    if let Ok(mut cache) = PRODUCT_CACHE.write() {
        cache.entry(key).or_insert_with(|| value.clone());
    }
    Ok(value)
}

fn product_uncached(
    left: &Word,
    right: &Word,
    cfg: Option<&AlphabetConfig>,
) -> Result<WordCombination<BigInt>> {
    let i = left.last().expect("non-empty");
    let j = right.last().expect("non-empty");
    let lp = left.prefix().expect("non-empty");
    let rp = right.prefix().expect("non-empty");

    let mut out = product_cached(&lp, right, cfg)?.append_letter(i);
    out.add_assign(&product_cached(left, &rp, cfg)?.append_letter(j));
    if rho(i, j) {
        out.add_assign(&product_cached(&lp, &rp, cfg)?.append_letter(0));
    }
    if i < 0 && j < 0 {
        let cfg = cfg.expect("jump letters imply a jump configuration");
        let (di, _) = cfg.decode_jump(i)?;
        let (dj, _) = cfg.decode_jump(j)?;
        if di == dj {
            let merged = cfg.circ(i, j)?;
            out.add_assign(&product_cached(&lp, &rp, Some(cfg))?.append_letter(merged));
        }
    }
    Ok(out)
}

/// Bilinear extension of the word product to combinations.
pub fn product_combinations<C: Coefficient>(
    left: &WordCombination<C>,
    right: &WordCombination<C>,
    cfg: &AlphabetConfig,
    mode: ProductMode,
) -> Result<WordCombination<C>> {
    let mut out = WordCombination::zero();
    for (a, ca) in left.iter() {
        for (b, cb) in right.iter() {
            let k = match mode {
                ProductMode::Continuous => {
                    for w in [a, b] {
                        if w.has_jump_letters() {
                            return Err(Error::JumpLetterInStar { word: w.to_string() });
                        }
                    }
                    product_cached(a, b, None)?
                }
                ProductMode::Jump => product_cached(a, b, Some(cfg))?,
            };
            let scale = ca.clone() * cb.clone();
            for (w, n) in k.iter() {
                out.add_term(w.clone(), C::from_integer(n) * scale.clone());
            }
        }
    }
    Ok(out)
}

/// Left fold of the product over `words`: `((I_1 ⋆ I_2) ⋆ ...) ⋆ I_l`.
pub fn star_multi(
    words: &[Word],
    cfg: &AlphabetConfig,
    mode: ProductMode,
) -> Result<WordCombination<BigInt>> {
    let (first, rest) = words
        .split_first()
        .ok_or_else(|| Error::Precondition("star_multi needs at least one word".into()))?;
    if mode == ProductMode::Continuous && first.has_jump_letters() {
        return Err(Error::JumpLetterInStar { word: first.to_string() });
    }
    cfg.check_word(first)?;
    let mut acc = WordCombination::word(first.clone());
    for w in rest {
        cfg.check_word(w)?;
        acc = product_combinations(&acc, &WordCombination::word(w.clone()), cfg, mode)?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn comb(terms: &[(i64, &[Letter])]) -> WordCombination<BigInt> {
        terms.iter().map(|(c, w)| (Word::from_slice(w), BigInt::from(*c))).collect()
    }

    #[test]
    fn concat_examples() {
        let cfg = AlphabetConfig::new(1, 1, 2).unwrap();
        assert_eq!(Word::from([1]).concat(&Word::from([1, 0])), Word::from([1, 1, 0]));
        assert_eq!(Word::empty().concat(&Word::from([0, 1])), Word::from([0, 1]));
        assert_eq!(cfg.concat(&Word::from([-1]), &Word::from([0])).unwrap(), Word::from([-1, 0]));
        assert!(matches!(
            cfg.concat(&Word::from([2]), &Word::from([0])),
            Err(Error::InvalidLetter { letter: 2, .. })
        ));
    }

    #[test]
    fn letter_stats_examples() {
        let s = letter_stats(&Word::from([1, 1, 0]));
        assert_eq!((s.count(1), s.count(0), s.positive, s.negative), (2, 1, 2, 0));
        let s = letter_stats(&Word::empty());
        assert_eq!((s.len, s.zero, s.positive, s.negative), (0, 0, 0, 0));
        let s = letter_stats(&Word::from([-1, -2, 1]));
        assert_eq!((s.count(-1), s.count(-2), s.count(1), s.negative, s.positive), (1, 1, 1, 2, 1));
        assert_eq!(s.counts.values().sum::<usize>(), s.len);
    }

    #[test]
    fn star_examples() {
        let w = |l: &[Letter]| Word::from_slice(l);
        assert_eq!(star(&w(&[0]), &w(&[0])).unwrap(), comb(&[(2, &[0, 0])]));
        assert_eq!(star(&w(&[1]), &w(&[1])).unwrap(), comb(&[(2, &[1, 1]), (1, &[0])]));
        assert_eq!(
            star(&w(&[1, 1]), &w(&[1])).unwrap(),
            comb(&[(3, &[1, 1, 1]), (1, &[0, 1]), (1, &[1, 0])])
        );
        assert_eq!(
            star(&w(&[1, 1]), &w(&[1, 1])).unwrap(),
            comb(&[(6, &[1, 1, 1, 1]), (2, &[0, 1, 1]), (2, &[1, 0, 1]), (2, &[1, 1, 0]), (1, &[0, 0])])
        );
    }

    #[test]
    fn star_rejects_jump_letters() {
        assert!(matches!(
            star(&Word::from([-1]), &Word::from([1])),
            Err(Error::JumpLetterInStar { .. })
        ));
    }

    #[test]
    fn bijection_examples() {
        let cfg = AlphabetConfig::new(0, 3, 2).unwrap();
        assert_eq!(cfg.decode_jump(-5).unwrap(), (3, 1));
        assert_eq!(cfg.decode_jump(-1).unwrap(), (1, 1));
        assert_eq!(cfg.decode_jump(-2).unwrap(), (1, 2));
        assert_eq!(cfg.circ(-1, -1).unwrap(), -2);
        let cfg3 = AlphabetConfig::new(0, 1, 3).unwrap();
        assert_eq!(cfg3.circ(-1, -2).unwrap(), -3);
        assert!(matches!(cfg3.circ(-2, -2), Err(Error::DepthOverflow { power: 4, .. })));
        assert!(cfg.decode_jump(-7).is_err());
        assert!(cfg.decode_jump(0).is_err());
    }

    #[test]
    fn circ_matches_enumerated_bijection() {
        // Enumerate L for m = 3, e = 1 by listing (driver, power) pairs in order.
        let cfg = AlphabetConfig::new(0, 1, 3).unwrap();
        let table: Vec<(Letter, (u16, u16))> = (1..=3u16).map(|k| (-(k as Letter), (1, k))).collect();
        for (letter, pair) in &table {
            assert_eq!(cfg.decode_jump(*letter).unwrap(), *pair);
            assert_eq!(cfg.encode_jump(pair.0, pair.1).unwrap(), *letter);
        }
        let find = |p: u16| table.iter().find(|(_, (_, k))| *k == p).map(|(l, _)| *l).unwrap();
        assert_eq!(cfg.circ(-1, -2).unwrap(), find(3));
    }

    #[test]
    fn bar_star_examples() {
        let cfg = AlphabetConfig::new(1, 1, 2).unwrap();
        let w = |l: &[Letter]| Word::from_slice(l);
        assert_eq!(bar_star(&w(&[-1]), &w(&[-1]), &cfg).unwrap(), comb(&[(2, &[-1, -1]), (1, &[-2])]));
        assert_eq!(bar_star(&w(&[1]), &w(&[1]), &cfg).unwrap(), comb(&[(2, &[1, 1]), (1, &[0])]));
        assert_eq!(bar_star(&w(&[-1]), &w(&[1]), &cfg).unwrap(), comb(&[(1, &[-1, 1]), (1, &[1, -1])]));
    }

    #[test]
    fn bar_star_depth_overflow_is_loud() {
        let cfg = AlphabetConfig::new(0, 1, 1).unwrap();
        assert!(matches!(
            bar_star(&Word::from([-1]), &Word::from([-1]), &cfg),
            Err(Error::DepthOverflow { .. })
        ));
    }

    #[test]
    fn bar_star_different_drivers_do_not_merge() {
        let cfg = AlphabetConfig::new(0, 2, 2).unwrap();
        // -1 = N^{1,1}, -3 = N^{2,1}
        let k = bar_star(&Word::from([-1]), &Word::from([-3]), &cfg).unwrap();
        assert_eq!(k, comb(&[(1, &[-1, -3]), (1, &[-3, -1])]));
    }

    #[test]
    fn star_multi_examples() {
        let cfg = AlphabetConfig::continuous(1);
        let k = star_multi(&[Word::from([1])], &cfg, ProductMode::Continuous).unwrap();
        assert_eq!(k, comb(&[(1, &[1])]));
        let k = star_multi(&[Word::from([1]), Word::from([1]), Word::from([1])], &cfg, ProductMode::Continuous)
            .unwrap();
        assert_eq!(k, comb(&[(6, &[1, 1, 1]), (3, &[0, 1]), (3, &[1, 0])]));
        // (2(11) + (0)) ⋆ (0), expanded by hand:
        // 2·(11 ⋆ 0) + 0 ⋆ 0 = 2·[(110) + (101) + (011)] + 2(00)
        let k = star_multi(&[Word::from([1]), Word::from([1]), Word::from([0])], &cfg, ProductMode::Continuous)
            .unwrap();
        assert_eq!(k, comb(&[(2, &[1, 1, 0]), (2, &[1, 0, 1]), (2, &[0, 1, 1]), (2, &[0, 0])]));
        assert!(star_multi(&[], &cfg, ProductMode::Continuous).is_err());
    }

    #[test]
    fn word_order_is_graded() {
        let mut v = [Word::from([1, 0]), Word::from([2]), Word::empty(), Word::from([0, 1]), Word::from([-1])];
        v.sort();
        let s: Vec<String> = v.iter().map(|w| w.to_string()).collect();
        assert_eq!(s, ["∅", "(-1)", "(2)", "(0,1)", "(1,0)"]);
    }

    #[test]
    fn word_json_is_integer_array() {
        let w = Word::from([1, 1, 0]);
        assert_eq!(serde_json::to_string(&w).unwrap(), "[1,1,0]");
        let back: Word = serde_json::from_str("[-1,0]").unwrap();
        assert_eq!(back, Word::from([-1, 0]));
    }
}
