//! The G-operator calculus behind regular-moment expansions.
//!
//! For a process `X_t = ⟨c, 𝕎_t⟩ + ε_n(t)`, the drift of `f(⟨c,·⟩)⟨d,·⟩`
//! is `Σ_k f^{(k)}(⟨c,·⟩)⟨𝒢_{c,k}(d),·⟩`. Iterating the maps `𝒢_{c,k}` and
//! reading off the empty-word coefficient gives the Taylor coefficients of
//! `E_0[f(X_t)]` in `t`:
//!
//! ```
//! use sigexpand::coeff_ring::{Poly, Symbol};
//! use sigexpand::generator_ops::{kth_moment_expansion, ProcessSpec};
//! use sigexpand::word_algebra::{AlphabetConfig, Word};
//!
//! let mut spec = ProcessSpec::new(AlphabetConfig::continuous(1), 2);
//! spec.set(Word::from([1]), Poly::symbol(Symbol::c(&[1])));
//! let e = kth_moment_expansion(&spec, 2, 1).unwrap();
//! assert_eq!(e.term(2), Poly::char(&[1]).pow(2));
//! ```

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use num_traits::One;
use rayon::prelude::*;
use serde::Deserialize;

use crate::charfun_expansion::Expansion;
use crate::coeff_ring::{parse_rational, rational_from_f64, rational_to_f64, Assignment, Poly, Symbol};
use crate::error::{Error, Result};
use crate::signature_moments::{driver_numerics, inv_factorial, LevyAtomMeasure, Prefactor};
use crate::word_algebra::{
    product_combinations, AlphabetConfig, Letter, ProductMode, Word, WordCombination,
};

/// Default cap on the number of slot evaluations in a jump expansion.
pub const DEFAULT_BUDGET: u128 = 20_000_000;

/// A truncated process expansion: the alphabet, the characteristics `c_I`,
/// the depth `n`, the declared integrability order and the jump measures.
#[derive(Clone, Debug, PartialEq)]
pub struct ProcessSpec {
    pub cfg: AlphabetConfig,
    pub coeffs: BTreeMap<Word, Poly>,
    pub n: u32,
    /// Integrability order `N`; `None` when not declared.
    pub integrability: Option<Rational64>,
    pub levy: Vec<LevyAtomMeasure>,
    pub flags: BTreeMap<String, bool>,
}

impl ProcessSpec {
    pub fn new(cfg: AlphabetConfig, n: u32) -> Self {
        ProcessSpec {
            cfg,
            coeffs: BTreeMap::new(),
            n,
            integrability: None,
            levy: Vec::new(),
            flags: BTreeMap::new(),
        }
    }

    /// Sets `c_I`; a zero value removes the entry.
    pub fn set(&mut self, word: Word, value: Poly) {
        if value.is_zero() {
            self.coeffs.remove(&word);
        } else {
            self.coeffs.insert(word, value);
        }
    }

    pub fn set_numeric(&mut self, letters: &[Letter], value: f64) {
        let v = rational_from_f64(value).expect("finite coefficient");
        self.set(Word::from_slice(letters), Poly::constant(v));
    }

    /// Sets `c_I` to its own symbol for each word.
    pub fn set_symbolic(&mut self, words: &[&[Letter]]) {
        for w in words {
            let word = Word::from_slice(w);
            self.set(word.clone(), Poly::symbol(Symbol::Char(word)));
        }
    }

    pub fn coeff(&self, word: &Word) -> Poly {
        self.coeffs.get(word).cloned().unwrap_or_default()
    }

    pub fn c_vector(&self) -> WordCombination<Poly> {
        self.coeffs.iter().map(|(w, c)| (w.clone(), c.clone())).collect()
    }

    pub fn measure(&self, j: u16) -> Result<&LevyAtomMeasure> {
        self.levy
            .iter()
            .find(|m| m.j == j)
            .ok_or_else(|| Error::Configuration(format!("no Lévy measure supplied for jump driver {j}")))
    }

    pub fn is_numeric(&self) -> bool {
        self.coeffs.values().all(|p| p.as_constant().is_some())
    }

    pub fn numeric_coeff(&self, letters: &[Letter]) -> Result<f64> {
        let w = Word::from_slice(letters);
        match self.coeffs.get(&w) {
            None => Ok(0.0),
            Some(p) => p
                .as_constant()
                .map(|c| rational_to_f64(&c))
                .ok_or_else(|| Error::Precondition(format!("coefficient of {w} is not numeric"))),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::Configuration("expansion depth n must be at least 1".into()));
        }
        for w in self.coeffs.keys() {
            self.cfg.check_word(w)?;
            if w.len() > self.n as usize {
                return Err(Error::Configuration(format!("word {w} is longer than the depth n = {}", self.n)));
            }
        }
        for m in &self.levy {
            m.validate()?;
            if m.j > self.cfg.e {
                return Err(Error::Configuration(format!("measure for driver {} but e = {}", m.j, self.cfg.e)));
            }
        }
        Ok(())
    }

    /// Assignment of every numeric characteristic, for evaluating symbolic
    /// results against this spec. Jump drivers loaded by single-letter words
    /// `(-j)` get the standardized loading `c_{-j}/c_1`.
    pub fn assignment(&self, u: f64, t: f64) -> Assignment {
        let mut a = Assignment::new(u, t);
        for (w, p) in &self.coeffs {
            if let Some(c) = p.as_constant() {
                a.set(Symbol::Char(w.clone()), rational_to_f64(&c));
            }
        }
        let c1 = self.numeric_coeff(&[1]).unwrap_or(0.0);
        let mut loadings = BTreeMap::new();
        for m in &self.levy {
            if let Ok(letter) = self.cfg.encode_jump(m.j, 1) {
                if let Ok(v) = self.numeric_coeff(&[letter]) {
                    if c1 != 0.0 {
                        loadings.insert(m.j, v / c1);
                    }
                }
            }
        }
        a.drivers = driver_numerics(&self.levy, &loadings);
        a.standardized = true;
        a
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: JsonSpec = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        raw.into_spec()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let coeffs = self
            .coeffs
            .iter()
            .map(|(w, p)| {
                let word: Vec<Letter> = w
                    .iter()
                    .map(|&l| match self.cfg.decode_jump(l) {
                        Ok((j, 1)) => -(j as Letter),
                        _ => l,
                    })
                    .collect();
                let value = match p.as_constant() {
                    Some(c) => serde_json::Value::String(format!("{}/{}", c.numer(), c.denom())),
                    None if *p == Poly::symbol(Symbol::Char(w.clone())) => {
                        serde_json::Value::String(Symbol::Char(w.clone()).name())
                    }
                    None => serde_json::to_value(p).expect("poly serializes"),
                };
                serde_json::json!({ "word": word, "value": value })
            })
            .collect::<Vec<_>>();
        serde_json::json!({
            "d": self.cfg.d,
            "e": self.cfg.e,
            "m": self.cfg.m,
            "n": self.n,
            "N": self.integrability.map(|r| format!("{}/{}", r.numer(), r.denom())),
            "coeffs": coeffs,
            "levy": self.levy,
            "flags": self.flags,
        })
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonCoeff {
    word: Vec<Letter>,
    value: serde_json::Value,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonSpec {
    d: u16,
    #[serde(default)]
    e: u16,
    #[serde(default = "one")]
    m: u16,
    n: u32,
    #[serde(rename = "N", default)]
    big_n: Option<serde_json::Value>,
    #[serde(default)]
    coeffs: Vec<JsonCoeff>,
    #[serde(default)]
    levy: Vec<LevyAtomMeasure>,
    #[serde(default)]
    flags: BTreeMap<String, bool>,
}

fn one() -> u16 {
    1
}

fn json_value_poly(v: &serde_json::Value) -> Result<Poly> {
    match v {
        serde_json::Value::Number(n) => Ok(Poly::constant(parse_rational(&n.to_string())?)),
        serde_json::Value::String(s) => match parse_rational(s) {
            Ok(r) => Ok(Poly::constant(r)),
            Err(_) => Ok(Poly::symbol(Symbol::parse(s)?)),
        },
        serde_json::Value::Array(_) => serde_json::from_value(v.clone()).map_err(|e| Error::Parse(e.to_string())),
        other => Err(Error::Parse(format!("unsupported coefficient value {other}"))),
    }
}

impl JsonSpec {
    fn into_spec(self) -> Result<ProcessSpec> {
        let cfg = AlphabetConfig::new(self.d, self.e, self.m)?;
        let mut spec = ProcessSpec::new(cfg, self.n);
        spec.integrability = match self.big_n {
            None | Some(serde_json::Value::Null) => None,
            Some(v) => {
                let s = match &v {
                    serde_json::Value::String(s) => s.clone(),
                    other => other.to_string(),
                };
                let r = parse_rational(&s)?;
                let (p, q) = (r.numer().try_into(), r.denom().try_into());
                match (p, q) {
                    (Ok(p), Ok(q)) => Some(Rational64::new(p, q)),
                    _ => return Err(Error::Parse(format!("integrability order {s} out of range"))),
                }
            }
        };
        for c in self.coeffs {
            let base = Word::from(c.word);
            let word = cfg.lift_base_word(&base)?;
            let value = json_value_poly(&c.value)?;
            if spec.coeffs.contains_key(&word) {
                return Err(Error::Parse(format!("duplicate coefficient for word {base}")));
            }
            spec.set(word, value);
        }
        spec.levy = self.levy;
        spec.flags = self.flags;
        spec.validate()?;
        Ok(spec)
    }
}

/// The function `f` whose expectation is expanded.
#[derive(Clone)]
pub enum FDerivatives {
    /// `f(x) = Σ_k a_k x^k`.
    Polynomial(Vec<Poly>),
    /// `f^{(k)}(X_0)` for `k = 0, 1, ...`; usable only where `f` is needed at
    /// the initial value.
    AtPoint(Vec<Poly>),
    /// `f^{(k)}(x)` evaluated numerically by `f(k, x)`, for `k ≤ max_order`.
    Callback { f: Arc<dyn Fn(u32, f64) -> f64 + Send + Sync>, max_order: u32 },
}

impl fmt::Debug for FDerivatives {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FDerivatives::Polynomial(a) => f.debug_tuple("Polynomial").field(a).finish(),
            FDerivatives::AtPoint(a) => f.debug_tuple("AtPoint").field(a).finish(),
            FDerivatives::Callback { max_order, .. } => {
                f.debug_struct("Callback").field("max_order", max_order).finish_non_exhaustive()
            }
        }
    }
}

impl FDerivatives {
    /// `x^k`.
    pub fn power(k: u32) -> Self {
        let mut a = vec![Poly::zero(); k as usize + 1];
        a[k as usize] = Poly::one();
        FDerivatives::Polynomial(a)
    }

    /// `e^{iu(x - X_0)^2}`, whose derivatives at `X_0` are
    /// `f^{(2n)}(X_0) = (2n)!/n! (iu)^n` and zero in odd order.
    pub fn exp_iu_square(max_order: u32) -> Self {
        let derivs = (0..=max_order)
            .map(|k| {
                if k % 2 == 1 {
                    return Poly::zero();
                }
                let n = k / 2;
                let num: BigInt = (n + 1..=k).map(BigInt::from).product();
                Poly::iu_pow(n).scale(&BigRational::from_integer(num))
            })
            .collect();
        FDerivatives::AtPoint(derivs)
    }

    /// `e^{iux}` as a polynomial-free derivative table at `x = 0`.
    pub fn exp_iu(max_order: u32) -> Self {
        FDerivatives::AtPoint((0..=max_order).map(Poly::iu_pow).collect())
    }

    pub fn callback(max_order: u32, f: impl Fn(u32, f64) -> f64 + Send + Sync + 'static) -> Self {
        FDerivatives::Callback { f: Arc::new(f), max_order }
    }

    pub fn max_order(&self) -> Option<u32> {
        match self {
            FDerivatives::Polynomial(_) => None,
            FDerivatives::AtPoint(a) => Some(a.len().saturating_sub(1) as u32),
            FDerivatives::Callback { max_order, .. } => Some(*max_order),
        }
    }

    fn check_order(&self, needed: u32) -> Result<()> {
        match self.max_order() {
            Some(avail) if avail < needed => {
                Err(Error::DerivativeOrder { needed: needed as usize, available: avail as usize })
            }
            _ => Ok(()),
        }
    }

    /// `f^{(k)}(x)`, where `base` is the initial value `X_0`.
    pub fn derivative(&self, k: u32, x: &Poly, base: &Poly) -> Result<Poly> {
        match self {
            FDerivatives::Polynomial(a) => {
                let mut out = Poly::zero();
                for (j, aj) in a.iter().enumerate().skip(k as usize) {
                    if aj.is_zero() {
                        continue;
                    }
                    let falling: BigInt = ((j - k as usize + 1)..=j).map(BigInt::from).product();
                    let term = aj.scale(&BigRational::from_integer(falling));
                    out += &(&term * &x.pow((j - k as usize) as u32));
                }
                Ok(out)
            }
            FDerivatives::AtPoint(a) => {
                if x != base {
                    return Err(Error::Precondition(
                        "f is only known at the initial value; shifted evaluation needs a polynomial or callback f"
                            .into(),
                    ));
                }
                a.get(k as usize)
                    .cloned()
                    .ok_or(Error::DerivativeOrder { needed: k as usize, available: a.len().saturating_sub(1) })
            }
            FDerivatives::Callback { f, max_order } => {
                if k > *max_order {
                    return Err(Error::DerivativeOrder { needed: k as usize, available: *max_order as usize });
                }
                let xv = x.as_constant().ok_or_else(|| {
                    Error::Precondition("callback f needs numeric characteristics".into())
                })?;
                Ok(Poly::constant(rational_from_f64(f(k, rational_to_f64(&xv)))?))
            }
        }
    }
}

fn rho(i: Option<Letter>, j: Option<Letter>) -> bool {
    matches!((i, j), (Some(a), Some(b)) if a == b && a > 0)
}

/// `G_0(H) = H' 1{h_{|H|} = 0}`.
pub fn g0(h: &Word) -> WordCombination<BigInt> {
    match (h.last(), h.prefix()) {
        (Some(0), Some(p)) => WordCombination::word(p),
        _ => WordCombination::zero(),
    }
}

/// `G_1(I, H) = I' ⋆ (H 1{i_{|I|} = 0} + ρ_{i_{|I|} h_{|H|}} H')`.
pub fn g1(i: &Word, h: &Word) -> Result<WordCombination<BigInt>> {
    g1_mode(i, h, &AlphabetConfig::continuous(max_letter(&[i, h])), ProductMode::Continuous)
}

/// `G_2(I, J, H) = (ρ_{i_{|I|} j_{|J|}} / 2) I' ⋆ J' ⋆ H`.
pub fn g2(i: &Word, j: &Word, h: &Word) -> Result<WordCombination<BigRational>> {
    g2_mode(i, j, h, &AlphabetConfig::continuous(max_letter(&[i, j, h])), ProductMode::Continuous)
}

fn max_letter(words: &[&Word]) -> u16 {
    words.iter().flat_map(|w| w.iter()).copied().max().unwrap_or(0).max(0) as u16
}

pub fn g1_mode(i: &Word, h: &Word, cfg: &AlphabetConfig, mode: ProductMode) -> Result<WordCombination<BigInt>> {
    let Some(ip) = i.prefix() else {
        return Ok(WordCombination::zero());
    };
    let mut inner = WordCombination::zero();
    if i.last() == Some(0) {
        inner.add_term(h.clone(), BigInt::one());
    }
    if rho(i.last(), h.last()) {
        inner.add_term(h.prefix().expect("non-empty"), BigInt::one());
    }
    product_combinations(&WordCombination::word(ip), &inner, cfg, mode)
}

pub fn g2_mode(
    i: &Word,
    j: &Word,
    h: &Word,
    cfg: &AlphabetConfig,
    mode: ProductMode,
) -> Result<WordCombination<BigRational>> {
    if !rho(i.last(), j.last()) {
        return Ok(WordCombination::zero());
    }
    let ij = product_combinations(
        &WordCombination::<BigInt>::word(i.prefix().expect("non-empty")),
        &WordCombination::word(j.prefix().expect("non-empty")),
        cfg,
        mode,
    )?;
    let k = product_combinations(&ij, &WordCombination::word(h.clone()), cfg, mode)?;
    Ok(k.convert::<BigRational>().scaled(&BigRational::new(1.into(), 2.into())))
}

/// Precomputed pieces of the maps `𝒢_{c,k}` for one coefficient vector `c`.
#[derive(Clone, Debug)]
pub struct Generator {
    cfg: AlphabetConfig,
    mode: ProductMode,
    /// `Σ_{i_{|I|} = 0} c_I I'`.
    drift: WordCombination<Poly>,
    /// `Σ_{i_{|I|} = a} c_I I'` for each Brownian letter `a`.
    vol: BTreeMap<Letter, WordCombination<Poly>>,
    /// `Σ_a (vol_a ⋆ vol_a) / 2`.
    half_qv: WordCombination<Poly>,
}

impl Generator {
    pub fn new(c: &WordCombination<Poly>, cfg: &AlphabetConfig, mode: ProductMode) -> Result<Self> {
        let mut drift = WordCombination::zero();
        let mut vol: BTreeMap<Letter, WordCombination<Poly>> = BTreeMap::new();
        for (w, coeff) in c.iter() {
            let (Some(last), Some(prefix)) = (w.last(), w.prefix()) else { continue };
            if last == 0 {
                drift.add_term(prefix, coeff.clone());
            } else if last > 0 {
                vol.entry(last).or_default().add_term(prefix, coeff.clone());
            }
        }
        vol.retain(|_, v| !v.is_zero());
        let mut half_qv = WordCombination::zero();
        for v in vol.values() {
            half_qv.add_assign(&product_combinations(v, v, cfg, mode)?);
        }
        let half_qv = half_qv.scaled(&Poly::ratio(1, 2));
        Ok(Generator { cfg: *cfg, mode, drift, vol, half_qv })
    }

    /// `𝒢_{c,k}(d)` for `k ∈ {0, 1, 2}`.
    pub fn apply(&self, k: u8, d: &WordCombination<Poly>) -> Result<WordCombination<Poly>> {
        self.apply_bounded(k, d, usize::MAX)
    }

    /// `𝒢_{c,k}(d)` restricted to words of length at most `max_len`.
    ///
    /// Every word of `A ⋆ B` is at least as long as the longer factor, so
    /// inputs beyond the bound are skipped before multiplying.
    pub fn apply_bounded(&self, k: u8, d: &WordCombination<Poly>, max_len: usize) -> Result<WordCombination<Poly>> {
        let short = |x: &WordCombination<Poly>| -> WordCombination<Poly> {
            x.iter().filter(|(w, _)| w.len() <= max_len).map(|(w, c)| (w.clone(), c.clone())).collect()
        };
        let out = match k {
            0 => {
                let mut out = WordCombination::zero();
                for (h, dh) in d.iter() {
                    if h.last() == Some(0) {
                        out.add_term(h.prefix().expect("non-empty"), dh.clone());
                    }
                }
                out
            }
            1 => {
                let mut out = product_combinations(&short(&self.drift), &short(d), &self.cfg, self.mode)?;
                for (a, v) in &self.vol {
                    let mut tail = WordCombination::zero();
                    for (h, dh) in d.iter() {
                        if h.last() == Some(*a) && h.len() <= max_len.saturating_add(1) {
                            tail.add_term(h.prefix().expect("non-empty"), dh.clone());
                        }
                    }
                    if !tail.is_zero() {
                        out.add_assign(&product_combinations(&short(v), &tail, &self.cfg, self.mode)?);
                    }
                }
                out
            }
            2 => product_combinations(&short(&self.half_qv), &short(d), &self.cfg, self.mode)?,
            _ => return Err(Error::Precondition(format!("generator slot {k} is not one of 0, 1, 2"))),
        };
        Ok(if max_len == usize::MAX { out } else { short(&out) })
    }
}

/// `𝒢_{c,k}(d)` over the continuous alphabet.
pub fn cal_g(
    c: &WordCombination<Poly>,
    k: u8,
    d: &WordCombination<Poly>,
    cfg: &AlphabetConfig,
) -> Result<WordCombination<Poly>> {
    Generator::new(c, cfg, ProductMode::Continuous)?.apply(k, d)
}

/// `𝒢_{c,k_n} ∘ ⋯ ∘ 𝒢_{c,k_1}(d)`.
pub fn cal_g_compose(
    c: &WordCombination<Poly>,
    ks: &[u8],
    d: &WordCombination<Poly>,
    cfg: &AlphabetConfig,
) -> Result<WordCombination<Poly>> {
    let g = Generator::new(c, cfg, ProductMode::Continuous)?;
    let mut acc = d.clone();
    for &k in ks {
        acc = g.apply(k, &acc)?;
    }
    Ok(acc)
}

/// `𝒥_{j,ξ}(c) = Σ_I c_I (I + ξ^{𝓛_2(i_{|I|})} 1{j = 𝓛_1(i_{|I|})} I')`.
pub fn jump_shift(
    c: &WordCombination<Poly>,
    driver: u16,
    xi: &BigRational,
    cfg: &AlphabetConfig,
) -> Result<WordCombination<Poly>> {
    let mut out = c.clone();
    for (w, cw) in c.iter() {
        let Some(last) = w.last() else { continue };
        if last >= 0 {
            continue;
        }
        let (j, k) = cfg.decode_jump(last)?;
        if j == driver {
            let f = num_traits::pow(xi.clone(), k as usize);
            out.add_term(w.prefix().expect("non-empty"), cw.scale(&f));
        }
    }
    Ok(out)
}

/// One slot of the jump generator: `k ∈ {0, 1, 2}` or a jump of driver
/// `driver` by `xi`.
#[derive(Clone, Debug, PartialEq)]
pub enum JumpSlot {
    Continuous(u8),
    Jump { driver: u16, xi: BigRational },
}

/// `(𝒢^c_{k,ξ}(c), 𝒢^d_{k,ξ}(c, d))`.
pub fn jump_cal_g(
    c: &WordCombination<Poly>,
    slot: &JumpSlot,
    d: &WordCombination<Poly>,
    spec: &ProcessSpec,
) -> Result<(WordCombination<Poly>, WordCombination<Poly>)> {
    let g = Generator::new(c, &spec.cfg, ProductMode::Jump)?;
    let d = jump_slot_d(&g, slot, d, spec, usize::MAX)?;
    let c = match slot {
        JumpSlot::Jump { driver, xi } => jump_shift(c, *driver, xi, &spec.cfg)?,
        JumpSlot::Continuous(_) => c.clone(),
    };
    Ok((c, d))
}

fn jump_slot_d(
    g: &Generator,
    slot: &JumpSlot,
    d: &WordCombination<Poly>,
    spec: &ProcessSpec,
    max_len: usize,
) -> Result<WordCombination<Poly>> {
    match slot {
        JumpSlot::Jump { driver, xi } => {
            let out = jump_shift(d, *driver, xi, &spec.cfg)?;
            Ok(out.iter().filter(|(w, _)| w.len() <= max_len).map(|(w, c)| (w.clone(), c.clone())).collect())
        }
        JumpSlot::Continuous(k) => {
            let mut out = g.apply_bounded(*k, d, max_len)?;
            if *k == 0 {
                let total: BigRational = spec.levy.iter().map(|m| m.lambda.clone()).sum();
                let kept: WordCombination<Poly> =
                    d.iter().filter(|(w, _)| w.len() <= max_len).map(|(w, c)| (w.clone(), c.clone())).collect();
                out.add_scaled(&kept, &Poly::constant(-total));
            }
            Ok(out)
        }
    }
}

fn check_order(spec: &ProcessSpec, order: u32) -> Result<()> {
    spec.validate()?;
    if order == 0 {
        return Err(Error::Precondition("expansion order must be at least 1".into()));
    }
    let max = spec.n.div_ceil(2);
    if order > max {
        return Err(Error::Precondition(format!(
            "order {order} exceeds ⌈n/2⌉ = {max} for depth n = {}",
            spec.n
        )));
    }
    Ok(())
}

fn remainder_for(spec: &ProcessSpec, order: u32) -> Rational64 {
    Rational64::new(spec.n as i64, 2).min(Rational64::from_integer(order as i64))
}

/// `E_0[f(X_t)]` to order `t^order` for a Brownian-only process.
pub fn regular_moment_expansion(spec: &ProcessSpec, f: &FDerivatives, order: u32) -> Result<Expansion> {
    if spec.cfg.e > 0 && spec.coeffs.keys().any(|w| w.has_jump_letters()) {
        return Err(Error::Precondition("jump letters present; use the jump expansion".into()));
    }
    check_order(spec, order)?;
    f.check_order(2 * order)?;
    let c = spec.c_vector();
    let g = Generator::new(&c, &spec.cfg, ProductMode::Continuous)?;
    let base = spec.coeff(&Word::empty());
    let mut terms: BTreeMap<u32, Poly> = BTreeMap::new();
    terms.insert(0, f.derivative(0, &base, &base)?);

    // Depth-first over (k_1, ..., k_ℓ), pruning once 𝒢(∅) vanishes.
    let mut stack: Vec<(u32, u32, WordCombination<Poly>)> = vec![(0, 0, WordCombination::word(Word::empty()))];
    while let Some((depth, kplus, d)) = stack.pop() {
        if depth == order {
            continue;
        }
        for k in 0..=2u8 {
            let ell = depth + 1;
            // Each further step shortens words by at most one letter.
            let next = g.apply_bounded(k, &d, (order - ell) as usize)?;
            if next.is_zero() {
                continue;
            }
            let kp = kplus + k as u32;
            let e0 = next.coeff_or_zero(&Word::empty());
            if !e0.is_zero() {
                let fk = f.derivative(kp, &base, &base)?;
                let contrib = (&fk * &e0).scale(&inv_factorial(ell as usize));
                *terms.entry(2 * ell).or_default() += &contrib;
            }
            stack.push((ell, kp, next));
        }
    }
    terms.retain(|_, p| !p.is_zero());
    Ok(Expansion::new(Prefactor::None, terms, remainder_for(spec, order)))
}

/// `E_0[X_t^k]` to order `t^order`.
pub fn kth_moment_expansion(spec: &ProcessSpec, k: u32, order: u32) -> Result<Expansion> {
    if let Some(big_n) = spec.integrability {
        if Rational64::from_integer(k as i64) >= big_n * 2 {
            return Err(Error::Integrability { k, n_integrability: big_n.to_string() });
        }
    }
    let f = FDerivatives::power(k);
    if spec.cfg.e > 0 && !spec.levy.is_empty() {
        jump_regular_moment_expansion(spec, &f, order)
    } else {
        regular_moment_expansion(spec, &f, order)
    }
}

/// `E_0[f(X_t)]` to order `t^order` for a process with compound Poisson
/// drivers, with the jump integrals realized as exact sums over atoms.
pub fn jump_regular_moment_expansion(spec: &ProcessSpec, f: &FDerivatives, order: u32) -> Result<Expansion> {
    jump_regular_moment_expansion_with_budget(spec, f, order, DEFAULT_BUDGET)
}

pub fn jump_regular_moment_expansion_with_budget(
    spec: &ProcessSpec,
    f: &FDerivatives,
    order: u32,
    budget: u128,
) -> Result<Expansion> {
    check_order(spec, order)?;
    f.check_order(2 * order)?;
    for j in 1..=spec.cfg.e {
        if spec.coeffs.keys().any(|w| w.iter().any(|&l| l < 0 && spec.cfg.decode_jump(l).map(|p| p.0) == Ok(j))) {
            spec.measure(j)?;
        }
    }
    let mut slots: Vec<(BigRational, JumpSlot)> =
        (0..=2).map(|k| (BigRational::one(), JumpSlot::Continuous(k))).collect();
    for m in &spec.levy {
        for a in &m.atoms {
            slots.push((&m.lambda * &a.w, JumpSlot::Jump { driver: m.j, xi: rational_from_f64(a.xi)? }));
        }
    }
    let b = slots.len() as u128;
    let estimate: u128 = (1..=order).map(|l| b.saturating_pow(l)).fold(0u128, |a, x| a.saturating_add(x));
    if estimate > budget {
        return Err(Error::Resource { estimate, budget });
    }

    let c = spec.c_vector();
    let base = spec.coeff(&Word::empty());
    let gen = Arc::new(Generator::new(&c, &spec.cfg, ProductMode::Jump)?);
    let root = JumpState { weight: BigRational::one(), kplus: 0, c, gen, d: WordCombination::word(Word::empty()) };
    let ctx = JumpCtx { spec, f, slots: &slots, order, base: &base };
    let partials: Vec<Result<BTreeMap<u32, Poly>>> =
        slots.par_iter().map(|slot| ctx.branch(&root, slot, 0)).collect();
    let mut terms: BTreeMap<u32, Poly> = BTreeMap::new();
    terms.insert(0, f.derivative(0, &base, &base)?);
    for p in partials {
        for (e, poly) in p? {
            *terms.entry(e).or_default() += &poly;
        }
    }
    terms.retain(|_, p| !p.is_zero());
    Ok(Expansion::new(Prefactor::None, terms, remainder_for(spec, order)))
}

#[derive(Clone)]
struct JumpState {
    weight: BigRational,
    kplus: u32,
    c: WordCombination<Poly>,
    gen: Arc<Generator>,
    d: WordCombination<Poly>,
}

struct JumpCtx<'a> {
    spec: &'a ProcessSpec,
    f: &'a FDerivatives,
    slots: &'a [(BigRational, JumpSlot)],
    order: u32,
    base: &'a Poly,
}

impl JumpCtx<'_> {
    fn branch(&self, state: &JumpState, slot: &(BigRational, JumpSlot), depth: u32) -> Result<BTreeMap<u32, Poly>> {
        let mut out = BTreeMap::new();
        let (w, s) = slot;
        let ell = depth + 1;
        let d = jump_slot_d(&state.gen, s, &state.d, self.spec, (self.order - ell) as usize)?;
        if d.is_zero() {
            return Ok(out);
        }
        let (c, gen) = match s {
            JumpSlot::Jump { driver, xi } => {
                let c = jump_shift(&state.c, *driver, xi, &self.spec.cfg)?;
                let gen = Arc::new(Generator::new(&c, &self.spec.cfg, ProductMode::Jump)?);
                (c, gen)
            }
            JumpSlot::Continuous(_) => (state.c.clone(), state.gen.clone()),
        };
        let kplus = state.kplus + if let JumpSlot::Continuous(k) = s { *k as u32 } else { 0 };
        let next = JumpState { weight: &state.weight * w, kplus, c, gen, d };
        let e0 = next.d.coeff_or_zero(&Word::empty());
        if !e0.is_zero() {
            let x = next.c.coeff_or_zero(&Word::empty());
            let fk = self.f.derivative(kplus, &x, self.base)?;
            let contrib = (&fk * &e0).scale(&(&next.weight * inv_factorial(ell as usize)));
            *out.entry(2 * ell).or_insert_with(Poly::zero) += &contrib;
        }
        if ell < self.order {
            for s in self.slots {
                for (e, p) in self.branch(&next, s, ell)? {
                    *out.entry(e).or_insert_with(Poly::zero) += &p;
                }
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff_ring::rat;
    use crate::word_algebra::star;

    fn w(l: &[Letter]) -> Word {
        Word::from_slice(l)
    }

    fn sym_spec(words: &[&[Letter]], n: u32) -> ProcessSpec {
        let d = words.iter().flat_map(|w| w.iter()).copied().max().unwrap_or(1).max(1) as u16;
        let mut s = ProcessSpec::new(AlphabetConfig::continuous(d), n);
        s.set_symbolic(words);
        s
    }

    #[test]
    fn g0_examples() {
        assert_eq!(g0(&w(&[1, 0])), WordCombination::word(w(&[1])));
        assert!(g0(&w(&[0, 1])).is_zero());
        assert!(g0(&Word::empty()).is_zero());
    }

    #[test]
    fn g1_examples() {
        assert_eq!(g1(&w(&[0]), &Word::empty()).unwrap(), WordCombination::word(Word::empty()));
        assert_eq!(g1(&w(&[1]), &w(&[1])).unwrap(), WordCombination::word(Word::empty()));
        assert!(g1(&w(&[1]), &w(&[0])).unwrap().is_zero());
    }

    #[test]
    fn g2_examples() {
        let half = rat(1, 2);
        assert_eq!(g2(&w(&[1]), &w(&[1]), &Word::empty()).unwrap(), WordCombination::term(Word::empty(), half.clone()));
        assert!(g2(&w(&[1]), &w(&[2]), &Word::empty()).unwrap().is_zero());
        let expect = star(&w(&[1]), &w(&[1])).unwrap().convert::<BigRational>().scaled(&half);
        assert_eq!(g2(&w(&[1, 1]), &w(&[1, 1]), &Word::empty()).unwrap(), expect);
    }

    #[test]
    fn cal_g_examples() {
        let spec = sym_spec(&[&[1]], 2);
        let c = spec.c_vector();
        let empty = WordCombination::word(Word::empty());
        let r = cal_g(&c, 2, &empty, &spec.cfg).unwrap();
        assert_eq!(r.coeff_or_zero(&Word::empty()), Poly::char(&[1]).pow(2).scale(&rat(1, 2)));
        assert!(cal_g(&c, 0, &empty, &spec.cfg).unwrap().is_zero());
        assert!(cal_g(&c, 1, &empty, &spec.cfg).unwrap().is_zero());
    }

    #[test]
    fn cal_g_compose_examples() {
        let spec = sym_spec(&[&[0], &[1], &[0, 0], &[1, 0], &[0, 1], &[1, 1]], 2);
        let c = spec.c_vector();
        let empty = WordCombination::word(Word::empty());
        assert_eq!(cal_g_compose(&c, &[], &empty, &spec.cfg).unwrap(), empty);
        assert_eq!(cal_g_compose(&c, &[2], &empty, &spec.cfg).unwrap(), cal_g(&c, 2, &empty, &spec.cfg).unwrap());
        // 𝒢_{c,1,0}(d) = Σ c_I d_H Σ_J ⟨J, G_1(I,H)⟩ G_0(J)
        let d: WordCombination<Poly> =
            [(w(&[0]), Poly::int(2)), (w(&[1, 0]), Poly::int(-1)), (Word::empty(), Poly::int(3))].into_iter().collect();
        let lhs = cal_g_compose(&c, &[1, 0], &d, &spec.cfg).unwrap();
        let mut rhs = WordCombination::<Poly>::zero();
        for (i, ci) in c.iter() {
            for (h, dh) in d.iter() {
                for (j, n) in g1(i, h).unwrap().iter() {
                    let coeff = &(ci * dh) * &Poly::constant(BigRational::from_integer(n.clone()));
                    for (k, m) in g0(j).iter() {
                        rhs.add_term(k.clone(), &coeff * &Poly::constant(BigRational::from_integer(m.clone())));
                    }
                }
            }
        }
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn generator_matches_word_level_sums() {
        let spec = sym_spec(&[&[0], &[1], &[2], &[1, 1], &[2, 1], &[0, 1], &[1, 0]], 3);
        let c = spec.c_vector();
        let d: WordCombination<Poly> =
            [(w(&[1]), Poly::int(1)), (w(&[2, 1]), Poly::char(&[0])), (w(&[1, 0]), Poly::int(5))].into_iter().collect();
        let one = |n: &BigInt| Poly::constant(BigRational::from_integer(n.clone()));
        let mut g1_sum = WordCombination::<Poly>::zero();
        let mut g2_sum = WordCombination::<Poly>::zero();
        for (i, ci) in c.iter() {
            for (h, dh) in d.iter() {
                for (k, n) in g1(i, h).unwrap().iter() {
                    g1_sum.add_term(k.clone(), &(ci * dh) * &one(n));
                }
                for (j, cj) in c.iter() {
                    for (k, r) in g2(i, j, h).unwrap().iter() {
                        g2_sum.add_term(k.clone(), &(&(ci * cj) * dh) * &Poly::constant(r.clone()));
                    }
                }
            }
        }
        assert_eq!(cal_g(&c, 1, &d, &spec.cfg).unwrap(), g1_sum);
        assert_eq!(cal_g(&c, 2, &d, &spec.cfg).unwrap(), g2_sum);
    }

    #[test]
    fn example_exp_iu_square() {
        let mut spec = sym_spec(&[&[0], &[1]], 2);
        spec.set(Word::empty(), Poly::symbol(Symbol::c(&[])));
        let e = regular_moment_expansion(&spec, &FDerivatives::exp_iu_square(2), 1).unwrap();
        let expect = &Poly::one() + &(&Poly::iu_pow(1) * &Poly::char(&[1]).pow(2)).mul_monomial(&crate::coeff_ring::Monomial::power(Symbol::SqrtT, 2));
        assert_eq!(e.total_poly(), expect);
    }

    #[test]
    fn linear_and_quadratic_f() {
        let mut spec = sym_spec(&[&[0], &[1], &[0, 0], &[1, 1]], 2);
        spec.set(Word::empty(), Poly::symbol(Symbol::c(&[])));
        let e = regular_moment_expansion(&spec, &FDerivatives::power(1), 1).unwrap();
        assert_eq!(e.term(0), Poly::symbol(Symbol::c(&[])));
        assert_eq!(e.term(2), Poly::char(&[0]));
        let mut s2 = ProcessSpec::new(AlphabetConfig::continuous(1), 2);
        s2.set(w(&[1]), Poly::symbol(Symbol::c(&[1])));
        let e = regular_moment_expansion(&s2, &FDerivatives::power(2), 1).unwrap();
        assert_eq!(e.total_poly(), Poly::char(&[1]).pow(2).mul_monomial(&crate::coeff_ring::Monomial::power(Symbol::SqrtT, 2)));
    }

    #[test]
    fn kth_moment_examples() {
        let mut spec = sym_spec(&[&[0], &[1], &[0, 0], &[1, 0], &[0, 1], &[1, 1]], 4);
        spec.set(Word::empty(), Poly::symbol(Symbol::c(&[])));
        let e = kth_moment_expansion(&spec, 1, 2).unwrap();
        assert_eq!(e.term(0), Poly::symbol(Symbol::c(&[])));
        assert_eq!(e.term(2), Poly::char(&[0]));
        assert_eq!(e.term(4), Poly::char(&[0, 0]).scale(&rat(1, 2)));
        let e = kth_moment_expansion(&spec, 0, 2).unwrap();
        assert_eq!(e.total_poly(), Poly::one());
        spec.integrability = Some(Rational64::from_integer(1));
        assert!(matches!(kth_moment_expansion(&spec, 2, 1), Err(Error::Integrability { k: 2, .. })));
        assert!(matches!(kth_moment_expansion(&spec, 1, 3), Err(Error::Precondition(_))));
    }

    #[test]
    fn derivative_order_is_checked() {
        let spec = sym_spec(&[&[1]], 4);
        let err = regular_moment_expansion(&spec, &FDerivatives::exp_iu_square(2), 2).unwrap_err();
        assert!(matches!(err, Error::DerivativeOrder { needed: 4, available: 2 }));
    }

    fn jump_spec(xi: f64) -> ProcessSpec {
        let cfg = AlphabetConfig::new(1, 1, 2).unwrap();
        let mut s = ProcessSpec::new(cfg, 2);
        s.set(w(&[-1]), Poly::symbol(Symbol::c(&[-1])));
        s.levy.push(LevyAtomMeasure::dirac(1, rat(3, 2), xi).unwrap());
        s
    }

    #[test]
    fn jump_cal_g_examples() {
        let spec = jump_spec(0.5);
        let empty = WordCombination::word(Word::empty());
        let (_, d) = jump_cal_g(&spec.c_vector(), &JumpSlot::Continuous(0), &empty, &spec).unwrap();
        assert_eq!(d, WordCombination::term(Word::empty(), Poly::ratio(-3, 2)));
        let (c, _) = jump_cal_g(&spec.c_vector(), &JumpSlot::Jump { driver: 1, xi: rat(1, 2) }, &empty, &spec).unwrap();
        assert_eq!(c.coeff_or_zero(&Word::empty()), Poly::char(&[-1]).scale(&rat(1, 2)));
        assert_eq!(c.coeff_or_zero(&w(&[-1])), Poly::char(&[-1]));
    }

    #[test]
    fn jump_moment_examples() {
        let spec = jump_spec(0.5);
        let e = jump_regular_moment_expansion(&spec, &FDerivatives::power(1), 1).unwrap();
        assert_eq!(e.term(2), Poly::char(&[-1]).scale(&rat(3, 4)));
        let e = jump_regular_moment_expansion(&spec, &FDerivatives::power(2), 1).unwrap();
        assert_eq!(e.term(2), Poly::char(&[-1]).pow(2).scale(&rat(3, 8)));
    }

    #[test]
    fn jump_expansion_degenerates_without_jumps() {
        let mut spec = sym_spec(&[&[0], &[1], &[0, 0], &[1, 0], &[0, 1], &[1, 1]], 4);
        spec.set(Word::empty(), Poly::symbol(Symbol::c(&[])));
        for f in [FDerivatives::power(3), FDerivatives::power(2)] {
            let a = regular_moment_expansion(&spec, &f, 2).unwrap();
            let b = jump_regular_moment_expansion(&spec, &f, 2).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn jump_budget_is_enforced() {
        let spec = jump_spec(0.5);
        let err = jump_regular_moment_expansion_with_budget(&spec, &FDerivatives::power(1), 1, 2).unwrap_err();
        assert!(matches!(err, Error::Resource { estimate: 4, budget: 2 }));
    }

    #[test]
    fn spec_json_roundtrip() {
        let text = r#"{"d":1,"e":1,"m":2,"n":2,"N":"1/2",
            "coeffs":[{"word":[1],"value":"c_1"},{"word":[-1],"value":0.1},{"word":[1,0],"value":"1/3"}],
            "levy":[{"j":1,"lambda":"1","atoms":[{"xi":0.5,"w":"1"}]}]}"#;
        let spec = ProcessSpec::from_json(text).unwrap();
        assert_eq!(spec.coeff(&w(&[-1])), Poly::ratio(1, 10));
        assert_eq!(spec.coeff(&w(&[1])), Poly::char(&[1]));
        assert_eq!(spec.integrability, Some(Rational64::new(1, 2)));
        let back = ProcessSpec::from_json(&spec.to_json().to_string()).unwrap();
        assert_eq!(back, spec);
        assert!(ProcessSpec::from_json(r#"{"d":1,"n":1,"coeffs":[{"word":[2],"value":1}]}"#).is_err());
        assert!(ProcessSpec::from_json(r#"{"d":1,"n":1,"bogus":3}"#).is_err());
    }
}
