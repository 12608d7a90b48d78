//! Characteristic-function expansions of the standardized process
//! `X_t / (c_1 √t)`, to any order in `√t`.
//!
//! ```
//! use sigexpand::charfun_expansion::standardized_cf_expansion;
//! use sigexpand::generator_ops::ProcessSpec;
//! use sigexpand::word_algebra::AlphabetConfig;
//!
//! let mut spec = ProcessSpec::new(AlphabetConfig::continuous(1), 3);
//! spec.set_numeric(&[1], 1.0);
//! spec.set_numeric(&[1, 1], 0.5);
//! let e = standardized_cf_expansion(&spec, 1).unwrap();
//! // √t coefficient: (c_11 / 2c_1) (iu)^3, which is -2i at u = 2.
//! let z = e.term(1).eval(&spec.assignment(2.0, 0.01)).unwrap();
//! assert!((z.re).abs() < 1e-12 && (z.im + 2.0).abs() < 1e-12);
//! ```

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::{BigRational, Rational64};
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::coeff_ring::{Assignment, Monomial, Poly, Symbol};
use crate::error::{Error, Result};
use crate::generator_ops::{FDerivatives, ProcessSpec};
use crate::signature_moments::{
    expected_sig, inv_factorial, jump_fourier_transform, w_transform, JumpLoading, Prefactor,
};
use crate::word_algebra::{star_multi, AlphabetConfig, Letter, ProductMode, Word};

/// `prefactor · (Σ_k terms[k] t^{k/2} + Σ_k jump_extra[k] t^{k/2}) + o(t^r)`.
///
/// Keys are exponents of `√t`; the stored polynomials are free of `√t`.
#[derive(Clone, Debug, PartialEq)]
pub struct Expansion {
    pub prefactor: Prefactor,
    pub terms: BTreeMap<u32, Poly>,
    pub remainder: Rational64,
    /// Pieces involving the jump exponents `A_j`, kept in closed form.
    pub jump_extra: BTreeMap<u32, Poly>,
    /// Terms computed but beyond the remainder order, keyed by `√t` exponent.
    pub discarded: BTreeMap<u32, Poly>,
    pub notes: Vec<String>,
}

fn split_sqrt_t(p: &Poly) -> BTreeMap<u32, Poly> {
    p.collect_by(&Symbol::SqrtT)
}

impl Expansion {
    /// Builds an expansion from polynomials that may still carry `√t`
    /// factors; every entry is normalized so its key is the full exponent.
    pub fn new(prefactor: Prefactor, terms: BTreeMap<u32, Poly>, remainder: Rational64) -> Self {
        let mut e = Expansion {
            prefactor,
            terms: BTreeMap::new(),
            remainder,
            jump_extra: BTreeMap::new(),
            discarded: BTreeMap::new(),
            notes: Vec::new(),
        };
        for (k, p) in terms {
            for (j, q) in split_sqrt_t(&p) {
                e.push_term(k + j, q);
            }
        }
        e
    }

    fn limit(&self) -> Rational64 {
        self.remainder * 2
    }

    fn push_term(&mut self, k: u32, p: Poly) {
        if p.is_zero() {
            return;
        }
        let target = if Rational64::from_integer(k as i64) > self.limit() { &mut self.discarded } else { &mut self.terms };
        let slot = target.entry(k).or_default();
        *slot += &p;
        if slot.is_zero() {
            target.remove(&k);
        }
    }

    fn push_jump(&mut self, k: u32, p: Poly) {
        if p.is_zero() {
            return;
        }
        if Rational64::from_integer(k as i64) > self.limit() {
            *self.discarded.entry(k).or_default() += &p;
            return;
        }
        let slot = self.jump_extra.entry(k).or_default();
        *slot += &p;
        if slot.is_zero() {
            self.jump_extra.remove(&k);
        }
    }

    /// Coefficient of `t^{k/2}` in the polynomial part.
    pub fn term(&self, k: u32) -> Poly {
        self.terms.get(&k).cloned().unwrap_or_default()
    }

    /// `Σ_k terms[k] (√t)^k`.
    pub fn total_poly(&self) -> Poly {
        let mut out = Poly::zero();
        for (k, p) in &self.terms {
            out += &p.mul_monomial(&Monomial::power(Symbol::SqrtT, *k));
        }
        out
    }

    pub fn jump_poly(&self) -> Poly {
        let mut out = Poly::zero();
        for (k, p) in &self.jump_extra {
            out += &p.mul_monomial(&Monomial::power(Symbol::SqrtT, *k));
        }
        out
    }

    pub fn eval(&self, a: &Assignment) -> Result<Complex64> {
        let pre = self.prefactor.eval(a)?;
        Ok(pre * (self.total_poly().eval(a)? + self.jump_poly().eval(a)?))
    }

    /// Only the closed-form jump pieces, with the prefactor.
    pub fn eval_jump_extra(&self, a: &Assignment) -> Result<Complex64> {
        Ok(self.prefactor.eval(a)? * self.jump_poly().eval(a)?)
    }

    /// Drops every term above `t^{order}`, moving nothing into the audit.
    pub fn truncated(&self, order: Rational64) -> Expansion {
        let lim = order * 2;
        let keep = |m: &BTreeMap<u32, Poly>| {
            m.iter().filter(|(k, _)| Rational64::from_integer(**k as i64) <= lim).map(|(k, p)| (*k, p.clone())).collect()
        };
        Expansion {
            prefactor: self.prefactor.clone(),
            terms: keep(&self.terms),
            remainder: order.min(self.remainder),
            jump_extra: keep(&self.jump_extra),
            discarded: BTreeMap::new(),
            notes: self.notes.clone(),
        }
    }

    pub fn to_json(&self) -> Value {
        let list = |m: &BTreeMap<u32, Poly>| {
            m.iter().map(|(k, p)| json!({"t_pow": half_string(*k), "poly": p})).collect::<Vec<_>>()
        };
        json!({
            "prefactor": self.prefactor.render(),
            "terms": list(&self.terms),
            "remainder": format!("o({})", t_power_string(self.remainder)),
            "jump_extra": list(&self.jump_extra),
            "discarded_audit": list(&self.discarded),
            "notes": self.notes,
        })
    }

    pub fn from_json(v: &Value) -> Result<Expansion> {
        let raw: RawExpansion = serde_json::from_value(v.clone()).map_err(|e| Error::Parse(e.to_string()))?;
        let list = |items: Vec<RawTerm>| -> Result<BTreeMap<u32, Poly>> {
            let mut out = BTreeMap::new();
            for item in items {
                let k = parse_half(&item.t_pow)?;
                if out.insert(k, item.poly).is_some() {
                    return Err(Error::Parse(format!("duplicate t_pow {}", item.t_pow)));
                }
            }
            Ok(out)
        };
        Ok(Expansion {
            prefactor: parse_prefactor(&raw.prefactor)?,
            terms: list(raw.terms)?,
            remainder: parse_remainder(&raw.remainder)?,
            jump_extra: list(raw.jump_extra)?,
            discarded: list(raw.discarded_audit)?,
            notes: raw.notes,
        })
    }

    /// LaTeX with terms ordered by power of `t`, then by power of `u`.
    pub fn render_latex(&self) -> String {
        let mut body = self.total_poly();
        body += &self.jump_poly();
        let inner = body.render_latex();
        let rem = format!("o({})", t_power_latex(self.remainder));
        let pre = self.prefactor.render_latex();
        if pre.is_empty() {
            format!("{inner} + {rem}")
        } else {
            format!("{pre}\\left({inner}\\right) + {rem}")
        }
    }
}

impl fmt::Display for Expansion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (k, p) in self.terms.iter().chain(self.jump_extra.iter()) {
            let body = if p.len() == 1 { p.to_string() } else { format!("({p})") };
            parts.push(match k {
                0 => p.to_string(),
                k => format!("{body} {}", t_power_string(Rational64::new(*k as i64, 2))),
            });
        }
        let inner = if parts.is_empty() { "0".to_string() } else { parts.join(" + ") };
        match self.prefactor {
            Prefactor::None => write!(f, "{inner}"),
            _ => write!(f, "{} * ({inner})", self.prefactor.render()),
        }?;
        write!(f, " + o({})", t_power_string(self.remainder))
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTerm {
    t_pow: String,
    poly: Poly,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawExpansion {
    prefactor: String,
    terms: Vec<RawTerm>,
    remainder: String,
    #[serde(default)]
    jump_extra: Vec<RawTerm>,
    #[serde(default)]
    discarded_audit: Vec<RawTerm>,
    #[serde(default)]
    notes: Vec<String>,
}

fn half_string(k: u32) -> String {
    let r = Rational64::new(k as i64, 2);
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn parse_half(s: &str) -> Result<u32> {
    let r: Rational64 = s.trim().parse().map_err(|_| Error::Parse(format!("bad t power `{s}`")))?;
    let k = r * 2;
    if !k.is_integer() || k.is_negative() {
        return Err(Error::Parse(format!("t power `{s}` is not a nonnegative half-integer")));
    }
    Ok(*k.numer() as u32)
}

fn t_power_string(r: Rational64) -> String {
    if r.is_zero() {
        "1".into()
    } else if r.is_one() {
        "t".into()
    } else if r.is_integer() {
        format!("t^{}", r.numer())
    } else {
        format!("t^{{{}/{}}}", r.numer(), r.denom())
    }
}

fn t_power_latex(r: Rational64) -> String {
    t_power_string(r)
}

fn parse_remainder(s: &str) -> Result<Rational64> {
    let bad = || Error::Parse(format!("bad remainder `{s}`"));
    let inner = s.trim().strip_prefix("o(").and_then(|x| x.strip_suffix(')')).ok_or_else(bad)?;
    match inner {
        "1" => Ok(Rational64::zero()),
        "t" => Ok(Rational64::one()),
        _ => {
            let e = inner.strip_prefix("t^").ok_or_else(bad)?;
            let e = e.trim_start_matches('{').trim_end_matches('}');
            e.parse().map_err(|_| bad())
        }
    }
}

fn parse_prefactor(s: &str) -> Result<Prefactor> {
    let s = s.trim();
    match s {
        "1" => return Ok(Prefactor::None),
        "exp(-u^2/2)" => return Ok(Prefactor::Gauss { standardized: true }),
        "exp(-u^2*t/2)" => return Ok(Prefactor::Gauss { standardized: false }),
        _ => {}
    }
    let bad = || Error::Parse(format!("unknown prefactor `{s}`"));
    let inner = s.strip_prefix("exp(").and_then(|x| x.strip_suffix(')')).ok_or_else(bad)?;
    let mut parts = inner.split(" + ");
    let standardized = match parts.next() {
        Some("-u^2/2") => true,
        Some("-c_1^2*u^2*t/2") => false,
        _ => return Err(bad()),
    };
    let drivers = parts
        .map(|p| p.strip_prefix("t*A_").and_then(|j| j.parse::<u16>().ok()).ok_or_else(bad))
        .collect::<Result<Vec<_>>>()?;
    if drivers.is_empty() {
        return Err(bad());
    }
    Ok(Prefactor::GaussJump { standardized, drivers })
}

/// Which structural condition to check.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Condition {
    /// Brownian-only cascade with `X_0 = c_0 = 0`.
    Continuous,
    /// The jump-diffusion layout with two loaded compound Poisson drivers.
    JumpLoaded,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConditionReport {
    pub passed: bool,
    pub violators: Vec<String>,
    pub reasons: Vec<String>,
}

impl ConditionReport {
    pub fn into_result(self) -> Result<()> {
        if self.passed {
            Ok(())
        } else {
            Err(Error::Structure { violators: self.violators, reason: self.reasons.join("; ") })
        }
    }
}

fn c1_nonzero(spec: &ProcessSpec) -> bool {
    match spec.coeffs.get(&Word::from([1])) {
        None => false,
        Some(p) => p.as_constant().is_none_or(|c| !c.is_zero()),
    }
}

fn continuous_violation(w: &Word) -> Option<&'static str> {
    let n = w.len();
    let last = w.last()?;
    if n <= 1 && last == 0 {
        return Some("c_0 must vanish");
    }
    if last > 1 {
        return Some("c_{Ii} must vanish for i > 1");
    }
    if n >= 2 {
        let prev = w[n - 2];
        if last == 1 && prev > 2 {
            return Some("c_{Ii1} must vanish for i > 2");
        }
        if last == 0 && prev > 3 {
            return Some("c_{Ii0} must vanish for i > 3");
        }
    }
    None
}

/// Checks the structural assumptions behind the standardized expansions.
/// Standardization also requires `c_1 ≠ 0`.
pub fn validate_condition(spec: &ProcessSpec, which: Condition) -> ConditionReport {
    let mut violators = Vec::new();
    let mut reasons = Vec::new();
    let mut flag = |w: &Word, why: &str| {
        violators.push(w.to_string());
        if !reasons.iter().any(|r: &String| r == why) {
            reasons.push(why.to_string());
        }
    };
    let cfg = &spec.cfg;
    for (w, p) in &spec.coeffs {
        if p.is_zero() {
            continue;
        }
        if w.is_empty() {
            flag(w, "X_0 must vanish");
            continue;
        }
        if !w.has_jump_letters() {
            if let Some(why) = continuous_violation(w) {
                flag(w, why);
            }
            continue;
        }
        match which {
            Condition::Continuous => flag(w, "jump letters are not allowed here"),
            Condition::JumpLoaded => {
                let jumps: Vec<(usize, Letter)> = w.iter().copied().enumerate().filter(|(_, l)| *l < 0).collect();
                let base_driver = |l: Letter| cfg.decode_jump(l).ok().filter(|(_, k)| *k == 1).map(|(j, _)| j);
                if jumps.len() > 1 {
                    flag(w, "at most one jump letter per word");
                    continue;
                }
                let (pos, l) = jumps[0];
                let n = w.len();
                if n == 1 {
                    if !matches!(base_driver(l), Some(1 | 2)) {
                        flag(w, "only c_{-1} and c_{-2} load jumps directly");
                    }
                } else if pos + 2 == n && w[n - 1] == 1 && matches!(base_driver(l), Some(2 | 3)) {
                    if n == 2 {
                        flag(w, "c_{-2,1} and c_{-3,1} must vanish at time 0");
                    }
                } else {
                    flag(w, "jump letters may only appear as (-1), (-2), (-2,1) or (-3,1)");
                }
            }
        }
    }
    if !c1_nonzero(spec) {
        violators.push("(1)".into());
        reasons.push("standardization requires c_1 ≠ 0".into());
    }
    ConditionReport { passed: violators.is_empty(), violators, reasons }
}

fn bar(spec: &ProcessSpec, p: &Poly) -> Poly {
    match spec.coeff(&Word::from([1])).as_constant() {
        Some(c1) => p.scale(&(BigRational::one() / c1)),
        None => p.mul_monomial(&Monomial::symbol(Symbol::InvC1)),
    }
}

struct Candidate {
    word: Word,
    coeff: Poly,
    /// `2 I(0) + I(>0) - 1`: the `√t` exponent the word adds once
    /// standardized, ignoring jump letters.
    base: i64,
    jumps: i64,
}

fn candidates(spec: &ProcessSpec, skip: &[Word], max_len: usize, standardize: bool) -> Vec<Candidate> {
    let mut out = Vec::new();
    for (w, p) in &spec.coeffs {
        if w.is_empty() || w.len() > max_len || skip.contains(w) || p.is_zero() {
            continue;
        }
        let s = w.stats();
        out.push(Candidate {
            word: w.clone(),
            coeff: if standardize { bar(spec, p) } else { p.clone() },
            base: 2 * s.zero as i64 + s.positive as i64 - 1,
            jumps: s.negative as i64,
        });
    }
    out
}

/// Multisets of candidate indices of size `1..=max_l` whose lower bound on
/// the standardized `√t` exponent is at most `limit`.
fn tuples(cands: &[Candidate], max_l: usize, limit: i64) -> Vec<Vec<usize>> {
    #[allow(clippy::too_many_arguments)]
    fn rec(
        cands: &[Candidate],
        start: usize,
        cur: &mut Vec<usize>,
        base: i64,
        maxj: i64,
        max_l: usize,
        limit: i64,
        out: &mut Vec<Vec<usize>>,
    ) {
        for i in start..cands.len() {
            let c = &cands[i];
            let b = base + c.base;
            let mj = maxj.max(c.jumps);
            let bound = b + 2 * mj;
            cur.push(i);
            if bound <= limit {
                out.push(cur.clone());
            }
            let remaining = (max_l - cur.len()) as i64;
            if remaining > 0 && bound - remaining <= limit {
                rec(cands, i, cur, b, mj, max_l, limit, out);
            }
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(cands, 0, &mut Vec::new(), 0, 0, max_l, limit, &mut out);
    out
}

fn multiplicity(idx: &[usize]) -> BigRational {
    let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
    for &i in idx {
        *counts.entry(i).or_default() += 1;
    }
    let num: BigInt = (1..=idx.len()).map(BigInt::from).product();
    let den: BigInt = counts.values().flat_map(|&c| (1..=c).map(BigInt::from)).product();
    BigRational::new(num, den)
}

/// `Σ_ℓ (iu)^ℓ/ℓ! t^{-ℓ/2} Σ c̄_{I_1}⋯c̄_{I_ℓ} T(I_1 ⋆ ⋯ ⋆ I_ℓ)` where `T` maps a
/// word to its standardized transform polynomial (prefactor stripped).
fn assemble(
    cands: &[Candidate],
    max_l: usize,
    limit: u32,
    cfg: &AlphabetConfig,
    mode: ProductMode,
    transform: &(dyn Fn(&Word) -> Result<Poly> + Sync),
) -> Result<Poly> {
    let list = tuples(cands, max_l, limit as i64);
    let parts: Vec<Result<Poly>> = list
        .par_iter()
        .map(|idx| {
            let words: Vec<Word> = idx.iter().map(|&i| cands[i].word.clone()).collect();
            let prod = star_multi(&words, cfg, mode)?;
            let mut tr = Poly::zero();
            for (k, n) in prod.iter() {
                let p = transform(k)?;
                if !p.is_zero() {
                    tr += &p.scale(&BigRational::from_integer(n.clone()));
                }
            }
            if tr.is_zero() {
                return Ok(tr);
            }
            let l = idx.len();
            let mut coeff = Poly::constant(multiplicity(idx) * inv_factorial(l));
            for &i in idx {
                coeff = &coeff * &cands[i].coeff;
            }
            let mut out = Poly::zero();
            for (e, p) in split_sqrt_t(&tr) {
                let shifted = e as i64 - l as i64;
                if shifted < 0 {
                    return Err(Error::Precondition(format!(
                        "tuple {words:?} yields a term that grows as t → 0; its jump words must be loaded"
                    )));
                }
                let mono = Monomial::power(Symbol::SqrtT, shifted as u32).mul(&Monomial::power(Symbol::Iu, l as u32));
                out += &(&p * &coeff).mul_monomial(&mono);
            }
            Ok(out)
        })
        .collect();
    let mut total = Poly::zero();
    for p in parts {
        total += &p?;
    }
    Ok(total)
}

fn check_depth(spec: &ProcessSpec, order: u32) -> Result<()> {
    spec.validate()?;
    if spec.n < order + 1 {
        return Err(Error::Precondition(format!(
            "order {order} needs an expansion of depth at least {}, got n = {}",
            order + 1,
            spec.n
        )));
    }
    Ok(())
}

/// Expansion of `E_0[exp(iu X_t/(c_1 √t))]` up to `o(t^{order/2})`.
pub fn standardized_cf_expansion(spec: &ProcessSpec, order: u32) -> Result<Expansion> {
    validate_condition(spec, Condition::Continuous).into_result()?;
    check_depth(spec, order)?;
    let cands = candidates(spec, &[Word::from([1])], order as usize + 1, true);
    let poly = assemble(&cands, order as usize, order, &spec.cfg, ProductMode::Continuous, &|k| {
        Ok(w_transform(k, true).poly)
    })?;
    let mut terms = BTreeMap::new();
    terms.insert(0, &Poly::one() + &poly);
    Ok(Expansion::new(Prefactor::Gauss { standardized: true }, terms, Rational64::new(order as i64, 2)))
}

/// `E_0[f(X_t)]` to `o(t^{order/2})` through signature moments of star
/// products; requires `X_0 = 0`.
pub fn regular_moment_via_startransform(spec: &ProcessSpec, f: &FDerivatives, order: u32) -> Result<Expansion> {
    spec.validate()?;
    let x0 = spec.coeff(&Word::empty());
    if !x0.is_zero() {
        return Err(Error::Precondition("the star-transform route needs X_0 = 0".into()));
    }
    if spec.coeffs.keys().any(|w| w.has_jump_letters()) {
        return Err(Error::Precondition("jump letters present; use the jump expansion".into()));
    }
    if let Some(avail) = f.max_order() {
        if avail < order {
            return Err(Error::DerivativeOrder { needed: order as usize, available: avail as usize });
        }
    }
    let zero = Poly::zero();
    let cands = candidates(spec, &[], order as usize, false);
    let mut terms = BTreeMap::new();
    terms.insert(0, f.derivative(0, &zero, &zero)?);
    let mut out = Expansion::new(Prefactor::None, terms, Rational64::new(order as i64, 2));
    for l in 1..=order as usize {
        let fl = f.derivative(l as u32, &zero, &zero)?;
        if fl.is_zero() {
            continue;
        }
        let exact: Vec<Vec<usize>> = tuples(&cands, l, i64::MAX / 2)
            .into_iter()
            .filter(|t| t.len() == l)
            .collect();
        for idx in exact {
            let words: Vec<Word> = idx.iter().map(|&i| cands[i].word.clone()).collect();
            let prod = star_multi(&words, &spec.cfg, ProductMode::Continuous)?;
            let mut e = Poly::zero();
            for (k, n) in prod.iter() {
                e += &expected_sig(k, &spec.cfg)?.scale(&BigRational::from_integer(n.clone()));
            }
            if e.is_zero() {
                continue;
            }
            let mut coeff = fl.scale(&(multiplicity(&idx) * inv_factorial(l)));
            for &i in &idx {
                coeff = &coeff * &cands[i].coeff;
            }
            for (k, p) in split_sqrt_t(&(&e * &coeff)) {
                out.push_term(k, p);
            }
        }
    }
    Ok(out)
}

/// Expansion of the standardized characteristic function for a jump
/// diffusion whose single-letter jump words load compound Poisson drivers.
///
/// The polynomial part is the continuous expansion; terms involving the jump
/// exponents `A_j` go to `jump_extra` without expanding them in `u/√t`.
pub fn jump_cf_expansion(spec: &ProcessSpec) -> Result<Expansion> {
    jump_cf_expansion_order(spec, 2)
}

pub fn jump_cf_expansion_order(spec: &ProcessSpec, order: u32) -> Result<Expansion> {
    validate_condition(spec, Condition::JumpLoaded).into_result()?;
    check_depth(spec, order)?;
    let cfg = spec.cfg;
    let mut loaded = Vec::new();
    let mut skip = vec![Word::from([1])];
    for j in 1..=cfg.e {
        let letter = cfg.encode_jump(j, 1)?;
        let w = Word::from([letter]);
        if !spec.coeff(&w).is_zero() {
            spec.measure(j)?;
            loaded.push(j);
            skip.push(w);
        }
    }
    let loading = JumpLoading::drivers(loaded.iter().copied());
    let cands = candidates(spec, &skip, order as usize + 1, true);
    let poly = assemble(&cands, order as usize, order, &cfg, ProductMode::Jump, &|k| {
        Ok(jump_fourier_transform(k, &cfg, &spec.levy, &loading, true)?.poly)
    })?;
    let mut base = BTreeMap::new();
    base.insert(0, &Poly::one() + &poly);
    let mut out = Expansion::new(Prefactor::Gauss { standardized: true }, base, Rational64::new(order as i64, 2));
    if poly_has_atoms(&out) {
        out.notes.push(
            "terms with psi_j_k come from jump words beyond the loaded drivers and are not part of the printed table"
                .into(),
        );
    }

    // exp(t Σ A_j) = Σ_r (t Σ A_j)^r / r!, with the r ≥ 1 part kept apart.
    if !loaded.is_empty() {
        let a: Poly = loaded.iter().fold(Poly::zero(), |acc, j| &acc + &Poly::symbol(Symbol::JumpExponent(*j)));
        let body = out.total_poly();
        let mut power = Poly::one();
        let mut r = 1u32;
        while 2 * r <= 2 * order {
            power = &power * &a;
            let factor = power.scale(&inv_factorial(r as usize)).mul_monomial(&Monomial::power(Symbol::SqrtT, 2 * r));
            for (k, p) in split_sqrt_t(&(&factor * &body)) {
                out.push_jump(k, p);
            }
            r += 1;
        }
    }
    Ok(out)
}

fn poly_has_atoms(e: &Expansion) -> bool {
    e.terms.values().any(|p| p.symbols().iter().any(|s| matches!(s, Symbol::JumpAtom(..) | Symbol::JumpMoment(..))))
}
