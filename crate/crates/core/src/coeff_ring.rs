//! Exact multivariate polynomials over the symbols that appear in expansions.
//!
//! Powers of `t` are stored as integer exponents of `√t`, and `iu` is a formal
//! symbol, so every coefficient table can be compared term by term. Division
//! is only ever by `c_1`, represented by the symbol `inv_c1` which cancels
//! against `c_1` whenever both appear in the same monomial.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::word_algebra::{Coefficient, Letter, Word};

/// A polynomial indeterminate.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Symbol {
    /// `√t`.
    SqrtT,
    /// `iu`.
    Iu,
    /// The characteristic `c_I`; `c_∅` is the initial value `X_0`.
    Char(Word),
    /// `1 / c_1`.
    InvC1,
    /// `λ_j`.
    Intensity(u16),
    /// `m_{j,k} = λ_j ∫ ξ^k ν_j(dξ)`.
    JumpMoment(u16, u16),
    /// `λ_j ∫ e^{iθ_j ξ} ξ^k ν_j(dξ)`, with `θ_j` the loading of driver `j`.
    JumpAtom(u16, u16),
    /// `λ_j ∫ (e^{iθ_j ξ} - 1) ν_j(dξ)`.
    JumpExponent(u16),
}

impl Symbol {
    pub fn c(letters: &[Letter]) -> Symbol {
        Symbol::Char(Word::from_slice(letters))
    }

    pub fn name(&self) -> String {
        match self {
            Symbol::SqrtT => "sqrt_t".into(),
            Symbol::Iu => "iu".into(),
            Symbol::Char(w) if w.is_empty() => "x0".into(),
            Symbol::Char(w) => format!("c_{}", word_subscript(w, true)),
            Symbol::InvC1 => "inv_c1".into(),
            Symbol::Intensity(j) => format!("lambda_{j}"),
            Symbol::JumpMoment(j, k) => format!("m_{j}_{k}"),
            Symbol::JumpAtom(j, k) => format!("psi_{j}_{k}"),
            Symbol::JumpExponent(j) => format!("A_{j}"),
        }
    }

    pub fn parse(name: &str) -> Result<Symbol> {
        let bad = || Error::Parse(format!("unknown symbol `{name}`"));
        let num = |s: &str| s.parse::<u16>().map_err(|_| bad());
        match name {
            "sqrt_t" => return Ok(Symbol::SqrtT),
            "iu" => return Ok(Symbol::Iu),
            "inv_c1" => return Ok(Symbol::InvC1),
            "x0" => return Ok(Symbol::Char(Word::empty())),
            _ => {}
        }
        if let Some(rest) = name.strip_prefix("c_") {
            let letters: Vec<Letter> = if rest.contains(',') || rest.starts_with('-') {
                rest.split(',')
                    .filter(|s| !s.is_empty())
                    .map(|s| s.parse::<Letter>().map_err(|_| bad()))
                    .collect::<Result<_>>()?
            } else {
                rest.chars()
                    .map(|ch| ch.to_digit(10).map(|d| d as Letter).ok_or_else(bad))
                    .collect::<Result<_>>()?
            };
            if letters.is_empty() {
                return Err(bad());
            }
            return Ok(Symbol::Char(Word::from(letters)));
        }
        if let Some(rest) = name.strip_prefix("lambda_") {
            return Ok(Symbol::Intensity(num(rest)?));
        }
        if let Some(rest) = name.strip_prefix("A_") {
            return Ok(Symbol::JumpExponent(num(rest)?));
        }
        for (prefix, atom) in [("m_", false), ("psi_", true)] {
            if let Some(rest) = name.strip_prefix(prefix) {
                let (j, k) = rest.split_once('_').ok_or_else(bad)?;
                let (j, k) = (num(j)?, num(k)?);
                return Ok(if atom { Symbol::JumpAtom(j, k) } else { Symbol::JumpMoment(j, k) });
            }
        }
        Err(bad())
    }

    fn latex(&self) -> String {
        match self {
            Symbol::SqrtT => "\\sqrt{t}".into(),
            Symbol::Iu => "i u".into(),
            Symbol::Char(w) if w.is_empty() => "X_0".into(),
            Symbol::Char(w) => format!("c_{{{}}}", word_subscript(w, false)),
            Symbol::InvC1 => "c_1^{-1}".into(),
            Symbol::Intensity(j) => format!("\\lambda_{{{j}}}"),
            Symbol::JumpMoment(j, k) => format!("m_{{{j},{k}}}"),
            Symbol::JumpAtom(j, k) => format!("\\psi_{{{j},{k}}}"),
            Symbol::JumpExponent(j) => format!("A_{{{j}}}"),
        }
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

// Single-digit letters are written run together (`c_110`); anything else is
// comma separated, with a trailing comma when that alone would be ambiguous.
fn word_subscript(word: &Word, json: bool) -> String {
    if word.iter().all(|l| (0..=9).contains(l)) {
        return word.iter().map(|l| l.to_string()).collect();
    }
    let joined = word.iter().map(|l| l.to_string()).collect::<Vec<_>>().join(",");
    if json && word.len() == 1 && word[0] > 0 {
        format!("{joined},")
    } else {
        joined
    }
}

/// A product of symbol powers.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Monomial(BTreeMap<Symbol, u32>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(BTreeMap::new())
    }

    pub fn symbol(s: Symbol) -> Self {
        Self::power(s, 1)
    }

    pub fn power(s: Symbol, e: u32) -> Self {
        let mut m = BTreeMap::new();
        if e > 0 {
            m.insert(s, e);
        }
        Monomial(m)
    }

    pub fn exponent(&self, s: &Symbol) -> u32 {
        self.0.get(s).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Symbol, &u32)> {
        self.0.iter()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.values().sum()
    }

    fn normalize(mut self) -> Self {
        let c1 = Symbol::c(&[1]);
        let a = self.exponent(&c1);
        let b = self.exponent(&Symbol::InvC1);
        let k = a.min(b);
        if k > 0 {
            self.set(c1, a - k);
            self.set(Symbol::InvC1, b - k);
        }
        self
    }

    fn set(&mut self, s: Symbol, e: u32) {
        if e == 0 {
            self.0.remove(&s);
        } else {
            self.0.insert(s, e);
        }
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = self.clone();
        for (s, e) in &other.0 {
            *out.0.entry(s.clone()).or_insert(0) += e;
        }
        out.normalize()
    }

    /// The monomial with `s` removed, and the exponent it had.
    pub fn split_off(&self, s: &Symbol) -> (Monomial, u32) {
        let mut rest = self.clone();
        let e = rest.0.remove(s).unwrap_or(0);
        (rest, e)
    }

    fn rest_key(&self) -> impl Iterator<Item = (&Symbol, &u32)> {
        self.0.iter().filter(|(s, _)| !matches!(s, Symbol::SqrtT | Symbol::Iu))
    }
}

impl Ord for Monomial {
    // Ascending in the power of t, then of iu, then graded lexicographic in
    // the remaining symbols.
    fn cmp(&self, other: &Self) -> Ordering {
        let key = |m: &Monomial| (m.exponent(&Symbol::SqrtT), m.exponent(&Symbol::Iu));
        key(self)
            .cmp(&key(other))
            .then_with(|| {
                let d = |m: &Monomial| m.rest_key().map(|(_, e)| *e).sum::<u32>();
                d(self).cmp(&d(other))
            })
            .then_with(|| self.rest_key().cmp(other.rest_key()))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|(s, e)| if *e == 1 { s.name() } else { format!("{}^{e}", s.name()) })
            .collect();
        f.write_str(&parts.join("*"))
    }
}

/// Exact polynomial with rational coefficients.
#[derive(Clone, PartialEq, Eq, Default, Hash)]
pub struct Poly {
    terms: BTreeMap<Monomial, BigRational>,
}

pub fn rat(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

impl Poly {
    pub fn zero() -> Self {
        Poly { terms: BTreeMap::new() }
    }

    pub fn one() -> Self {
        Self::constant(BigRational::one())
    }

    pub fn constant(c: BigRational) -> Self {
        Self::term(Monomial::one(), c)
    }

    pub fn int(n: i64) -> Self {
        Self::constant(BigRational::from_integer(n.into()))
    }

    pub fn ratio(p: i64, q: i64) -> Self {
        Self::constant(rat(p, q))
    }

    pub fn term(m: Monomial, c: BigRational) -> Self {
        let mut p = Poly::zero();
        p.add_term(m, c);
        p
    }

    pub fn symbol(s: Symbol) -> Self {
        Self::term(Monomial::symbol(s), BigRational::one())
    }

    pub fn symbol_pow(s: Symbol, e: u32) -> Self {
        Self::term(Monomial::power(s, e), BigRational::one())
    }

    pub fn iu_pow(e: u32) -> Self {
        Self::symbol_pow(Symbol::Iu, e)
    }

    pub fn sqrt_t_pow(e: u32) -> Self {
        Self::symbol_pow(Symbol::SqrtT, e)
    }

    /// `t^k`.
    pub fn t_pow(k: u32) -> Self {
        Self::sqrt_t_pow(2 * k)
    }

    pub fn char(letters: &[Letter]) -> Self {
        Self::symbol(Symbol::c(letters))
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

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> BigRational {
        self.terms.get(m).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn add_term(&mut self, m: Monomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        let m = m.normalize();
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn scale(&self, c: &BigRational) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly { terms: self.terms.iter().map(|(m, k)| (m.clone(), k * c)).collect() }
    }

    pub fn mul_monomial(&self, mono: &Monomial) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            out.add_term(m.mul(mono), c.clone());
        }
        out
    }

    pub fn pow(&self, n: u32) -> Poly {
        let mut out = Poly::one();
        for _ in 0..n {
            out = &out * self;
        }
        out
    }

    /// The constant value, if this polynomial has no symbols.
    pub fn as_constant(&self) -> Option<BigRational> {
        match self.terms.len() {
            0 => Some(BigRational::zero()),
            1 => self.terms.get(&Monomial::one()).cloned(),
            _ => None,
        }
    }

    pub fn symbols(&self) -> std::collections::BTreeSet<Symbol> {
        self.terms.keys().flat_map(|m| m.0.keys().cloned()).collect()
    }

    pub fn contains_symbol(&self, s: &Symbol) -> bool {
        self.terms.keys().any(|m| m.0.contains_key(s))
    }

    pub fn max_exponent(&self, s: &Symbol) -> u32 {
        self.terms.keys().map(|m| m.exponent(s)).max().unwrap_or(0)
    }

    /// Groups terms by the exponent of `s`, removing `s` from each monomial.
    pub fn collect_by(&self, s: &Symbol) -> BTreeMap<u32, Poly> {
        let mut out: BTreeMap<u32, Poly> = BTreeMap::new();
        for (m, c) in &self.terms {
            let (rest, e) = m.split_off(s);
            out.entry(e).or_default().add_term(rest, c.clone());
        }
        out.retain(|_, p| !p.is_zero());
        out
    }

    /// Replaces every occurrence of `s` by `value`.
    pub fn substitute(&self, s: &Symbol, value: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let (rest, e) = m.split_off(s);
            let base = Poly::term(rest, c.clone());
            out += &(&base * &value.pow(e));
        }
        out
    }

    /// Keeps the terms for which `keep` returns true.
    pub fn filter(&self, keep: impl Fn(&Monomial) -> bool) -> Poly {
        Poly { terms: self.terms.iter().filter(|(m, _)| keep(m)).map(|(m, c)| (m.clone(), c.clone())).collect() }
    }

    pub fn eval(&self, a: &Assignment) -> Result<Complex64> {
        let mut cache: BTreeMap<&Symbol, Complex64> = BTreeMap::new();
        let mut total = Complex64::new(0.0, 0.0);
        for (m, c) in &self.terms {
            let mut v = Complex64::new(rational_to_f64(c), 0.0);
            for (s, e) in &m.0 {
                if *s == Symbol::SqrtT && a.t.is_some() && !a.values.contains_key(s) {
                    let t = a.t.unwrap_or_default();
                    let mut f = t.powi((*e / 2) as i32);
                    if e % 2 == 1 {
                        f *= a.value(s)?.re;
                    }
                    v *= f;
                    continue;
                }
                let base = match cache.get(s) {
                    Some(b) => *b,
                    None => {
                        let b = a.value(s)?;
                        cache.insert(s, b);
                        b
                    }
                };
                v *= base.powu(*e);
            }
            total += v;
        }
        Ok(total)
    }

    pub fn render_latex(&self) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut out = String::new();
        for (k, (m, c)) in self.terms.iter().enumerate() {
            let (negative, body) = latex_term(m, c);
            match (k, negative) {
                (0, true) => out.push('-'),
                (0, false) => {}
                (_, true) => out.push_str(" - "),
                (_, false) => out.push_str(" + "),
            }
            out.push_str(&body);
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("polynomials serialize")
    }
}

fn latex_term(m: &Monomial, c: &BigRational) -> (bool, String) {
    let iu = m.exponent(&Symbol::Iu);
    let sqrt_t = m.exponent(&Symbol::SqrtT);
    // (iu)^k = i^k u^k
    let flip = matches!(iu % 4, 2 | 3);
    let negative = c.is_negative() != flip;
    let c = c.abs();

    let mut num_items = Vec::new();
    let mut inv = 0;
    for (s, e) in m.rest_key() {
        if *s == Symbol::InvC1 {
            inv = *e;
            continue;
        }
        num_items.push(latex_power(&s.latex(), *e));
    }
    let mut parts: Vec<String> = Vec::new();
    if inv > 0 {
        let num = if num_items.is_empty() { "1".to_string() } else { num_items.join(" ") };
        parts.push(format!("\\frac{{{num}}}{{{}}}", latex_power("c_1", inv)));
    } else if !num_items.is_empty() {
        parts.push(num_items.join(" "));
    }

    let mut u_items = Vec::new();
    if !c.numer().is_one() {
        u_items.push(c.numer().to_string());
    }
    if iu % 2 == 1 {
        u_items.push("i".into());
    }
    if iu > 0 {
        u_items.push(latex_power("u", iu));
    }
    if !c.denom().is_one() {
        let num = if u_items.is_empty() { "1".to_string() } else { u_items.join(" ") };
        parts.push(format!("\\frac{{{num}}}{{{}}}", c.denom()));
    } else if !u_items.is_empty() {
        parts.push(u_items.join(" "));
    }

    match sqrt_t {
        0 => {}
        1 => parts.push("\\sqrt{t}".into()),
        e if e % 2 == 0 => parts.push(latex_power("t", e / 2)),
        e => parts.push(format!("t^{{{e}/2}}")),
    }
    if parts.is_empty() {
        parts.push("1".into());
    }
    let mut body = String::new();
    for p in parts {
        if !body.is_empty() && !(body.ends_with('}') && p.starts_with('\\')) {
            body.push(' ');
        }
        body.push_str(&p);
    }
    (negative, body)
}

fn latex_power(base: &str, e: u32) -> String {
    match e {
        1 => base.to_string(),
        e if e < 10 => format!("{base}^{e}"),
        e => format!("{base}^{{{e}}}"),
    }
}

pub fn rational_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

fn rational_to_string(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parses `"p/q"`, an integer, or a finite decimal (optionally with an
/// exponent) into an exact rational.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational number: `{s}`"));
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(p, q));
    }
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(k) => (&s[..k], s[k + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (neg, mantissa) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits: BigInt = format!("{int_part}{frac_part}0").parse::<BigInt>().map_err(|_| bad())? / 10;
    let scale = exp - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let mut r = BigRational::from_integer(digits);
    if scale >= 0 {
        r *= BigRational::from_integer(num_traits::pow(ten, scale as usize));
    } else {
        r /= BigRational::from_integer(num_traits::pow(ten, (-scale) as usize));
    }
    Ok(if neg { -r } else { r })
}

/// Converts a finite double to the exact rational it denotes in decimal
/// shortest-roundtrip form, so `0.2` becomes `1/5`.
pub fn rational_from_f64(x: f64) -> Result<BigRational> {
    if !x.is_finite() {
        return Err(Error::Parse(format!("non-finite number {x}")));
    }
    parse_rational(&format!("{x:e}"))
}

#[derive(Serialize, Deserialize)]
struct JsonTerm {
    coeff: String,
    monomial: BTreeMap<String, u32>,
}

impl Serialize for Poly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let terms: Vec<JsonTerm> = self
            .terms
            .iter()
            .map(|(m, c)| JsonTerm {
                coeff: rational_to_string(c),
                monomial: m.0.iter().map(|(s, e)| (s.name(), *e)).collect(),
            })
            .collect();
        terms.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Poly {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let terms = Vec::<JsonTerm>::deserialize(d)?;
        let mut p = Poly::zero();
        for t in terms {
            let c = parse_rational(&t.coeff).map_err(D::Error::custom)?;
            let mut m = Monomial::one();
            for (name, e) in t.monomial {
                let s = Symbol::parse(&name).map_err(D::Error::custom)?;
                m = m.mul(&Monomial::power(s, e));
            }
            p.add_term(m, c);
        }
        Ok(p)
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> =
            self.terms.iter().map(|(m, c)| format!("({})*{:?}", rational_to_string(c), m)).collect();
        f.write_str(&parts.join(" + "))
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render_latex())
    }
}

impl<'a> Add<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Add for Poly {
    type Output = Poly;
    fn add(mut self, rhs: Poly) -> Poly {
        self += &rhs;
        self
    }
}

impl AddAssign<&Poly> for Poly {
    fn add_assign(&mut self, rhs: &Poly) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), c.clone());
        }
    }
}

impl AddAssign for Poly {
    fn add_assign(&mut self, rhs: Poly) {
        *self += &rhs;
    }
}

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly { terms: self.terms.into_iter().map(|(m, c)| (m, -c)).collect() }
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -self.clone()
    }
}

impl<'a> Sub<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Sub for Poly {
    type Output = Poly;
    fn sub(mut self, rhs: Poly) -> Poly {
        self -= &rhs;
        self
    }
}

impl SubAssign<&Poly> for Poly {
    fn sub_assign(&mut self, rhs: &Poly) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), -c.clone());
        }
    }
}

impl<'a> Mul<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }
}

impl Mul for Poly {
    type Output = Poly;
    fn mul(self, rhs: Poly) -> Poly {
        &self * &rhs
    }
}

impl MulAssign<&Poly> for Poly {
    fn mul_assign(&mut self, rhs: &Poly) {
        *self = &*self * rhs;
    }
}

impl Zero for Poly {
    fn zero() -> Self {
        Poly::zero()
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl One for Poly {
    fn one() -> Self {
        Poly::one()
    }
}

impl Coefficient for Poly {
    fn from_integer(n: &BigInt) -> Self {
        Poly::constant(BigRational::from_integer(n.clone()))
    }
}

/// Coefficients that embed into [`Poly`].
pub trait ToPoly {
    fn to_poly(&self) -> Poly;
}

impl ToPoly for Poly {
    fn to_poly(&self) -> Poly {
        self.clone()
    }
}

impl ToPoly for BigInt {
    fn to_poly(&self) -> Poly {
        Poly::constant(BigRational::from_integer(self.clone()))
    }
}

impl ToPoly for BigRational {
    fn to_poly(&self) -> Poly {
        Poly::constant(self.clone())
    }
}

impl From<BigRational> for Poly {
    fn from(c: BigRational) -> Self {
        Poly::constant(c)
    }
}

impl From<Symbol> for Poly {
    fn from(s: Symbol) -> Self {
        Poly::symbol(s)
    }
}

/// Numeric data for one jump driver, used to evaluate the transform atoms.
#[derive(Clone, Debug, PartialEq)]
pub struct DriverNumerics {
    pub lambda: f64,
    /// `(ξ, w)` pairs.
    pub atoms: Vec<(f64, f64)>,
    /// `θ_j = u · loading` in raw mode and `u · loading / √t` when standardized.
    pub loading: f64,
}

/// Values for the symbols of a polynomial.
#[derive(Clone, Debug, Default)]
pub struct Assignment {
    pub u: Option<f64>,
    pub t: Option<f64>,
    pub values: BTreeMap<Symbol, Complex64>,
    pub drivers: BTreeMap<u16, DriverNumerics>,
    /// Whether jump loadings scale with `1/√t`.
    pub standardized: bool,
}

impl Assignment {
    pub fn new(u: f64, t: f64) -> Self {
        Assignment { u: Some(u), t: Some(t), ..Default::default() }
    }

    pub fn with(mut self, s: Symbol, v: f64) -> Self {
        self.values.insert(s, Complex64::new(v, 0.0));
        self
    }

    pub fn set(&mut self, s: Symbol, v: f64) {
        self.values.insert(s, Complex64::new(v, 0.0));
    }

    fn theta(&self, driver: &DriverNumerics) -> Result<f64> {
        let u = self.u.ok_or_else(|| Error::MissingSymbol("u".into()))?;
        let mut theta = u * driver.loading;
        if self.standardized {
            let t = self.t.ok_or_else(|| Error::MissingSymbol("t".into()))?;
            theta /= t.sqrt();
        }
        Ok(theta)
    }

    fn driver(&self, j: u16, s: &Symbol) -> Result<&DriverNumerics> {
        self.drivers.get(&j).ok_or_else(|| Error::MissingSymbol(s.name()))
    }

    pub fn value(&self, s: &Symbol) -> Result<Complex64> {
        if let Some(v) = self.values.get(s) {
            return Ok(*v);
        }
        let missing = || Error::MissingSymbol(s.name());
        match s {
            Symbol::Iu => Ok(Complex64::new(0.0, self.u.ok_or_else(missing)?)),
            Symbol::SqrtT => {
                let t = self.t.ok_or_else(missing)?;
                if t < 0.0 {
                    return Err(Error::Precondition(format!("t must be nonnegative, got {t}")));
                }
                Ok(Complex64::new(t.sqrt(), 0.0))
            }
            Symbol::InvC1 => {
                let c1 = self.values.get(&Symbol::c(&[1])).ok_or_else(missing)?;
                if c1.norm() == 0.0 {
                    return Err(Error::Precondition("c_1 must be nonzero".into()));
                }
                Ok(c1.inv())
            }
            Symbol::Intensity(j) => Ok(Complex64::new(self.driver(*j, s)?.lambda, 0.0)),
            Symbol::JumpMoment(j, k) => {
                let d = self.driver(*j, s)?;
                let m: f64 = d.atoms.iter().map(|(xi, w)| w * xi.powi(*k as i32)).sum();
                Ok(Complex64::new(d.lambda * m, 0.0))
            }
            Symbol::JumpAtom(j, k) => {
                let d = self.driver(*j, s)?;
                let theta = self.theta(d)?;
                let sum: Complex64 = d
                    .atoms
                    .iter()
                    .map(|(xi, w)| Complex64::new(0.0, theta * xi).exp() * (w * xi.powi(*k as i32)))
                    .sum();
                Ok(sum * d.lambda)
            }
            Symbol::JumpExponent(j) => {
                let d = self.driver(*j, s)?;
                let theta = self.theta(d)?;
                let sum: Complex64 =
                    d.atoms.iter().map(|(xi, w)| (Complex64::new(0.0, theta * xi).exp() - 1.0) * *w).sum();
                Ok(sum * d.lambda)
            }
            Symbol::Char(_) => Err(missing()),
        }
    }
}
