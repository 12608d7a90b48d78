//! Expectations and Fourier-type transforms of signature components, and the
//! exponent bookkeeping used to truncate expansions.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::{BigRational, Rational64};
use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};

use crate::coeff_ring::{parse_rational, rational_from_f64, rational_to_f64, Assignment, DriverNumerics, Monomial, Poly, Symbol, ToPoly};
use crate::error::{Error, Result};
use crate::word_algebra::{AlphabetConfig, Coefficient, Word, WordCombination};

/// One jump atom `ξ` carrying probability weight `w`.
#[derive(Clone, Debug, PartialEq)]
pub struct Atom {
    pub xi: f64,
    pub w: BigRational,
}

/// The Lévy measure `λ_j ν_j` of one compound Poisson driver, with `ν_j` a
/// finite atomic probability measure.
#[derive(Clone, Debug, PartialEq)]
pub struct LevyAtomMeasure {
    pub j: u16,
    pub lambda: BigRational,
    pub atoms: Vec<Atom>,
}

impl LevyAtomMeasure {
    pub fn new(j: u16, lambda: BigRational, atoms: Vec<Atom>) -> Result<Self> {
        let m = LevyAtomMeasure { j, lambda, atoms };
        m.validate()?;
        Ok(m)
    }

    /// `λ δ_ξ`.
    pub fn dirac(j: u16, lambda: BigRational, xi: f64) -> Result<Self> {
        Self::new(j, lambda, vec![Atom { xi, w: BigRational::one() }])
    }

    pub fn validate(&self) -> Result<()> {
        if self.j == 0 {
            return Err(Error::Configuration("jump driver indices start at 1".into()));
        }
        if !self.lambda.is_positive() {
            return Err(Error::Configuration(format!("intensity of driver {} must be positive", self.j)));
        }
        if self.atoms.is_empty() {
            return Err(Error::Configuration(format!("driver {} has no atoms", self.j)));
        }
        for a in &self.atoms {
            if !a.w.is_positive() || !a.xi.is_finite() {
                return Err(Error::Configuration(format!(
                    "driver {} has an atom with non-positive weight or non-finite size",
                    self.j
                )));
            }
        }
        let total: BigRational = self.atoms.iter().map(|a| a.w.clone()).sum();
        if !total.is_one() {
            return Err(Error::Configuration(format!(
                "atom weights of driver {} sum to {total}, not 1",
                self.j
            )));
        }
        Ok(())
    }

    /// `λ_j ∫ ξ^k ν_j(dξ)`, exact in the decimal values of the atoms.
    pub fn moment(&self, k: u16) -> BigRational {
        let s: BigRational = self
            .atoms
            .iter()
            .map(|a| {
                let xi = rational_from_f64(a.xi).expect("validated atom");
                num_traits::pow(xi, k as usize) * &a.w
            })
            .sum();
        s * &self.lambda
    }

    pub fn numerics(&self, loading: f64) -> DriverNumerics {
        DriverNumerics {
            lambda: rational_to_f64(&self.lambda),
            atoms: self.atoms.iter().map(|a| (a.xi, rational_to_f64(&a.w))).collect(),
            loading,
        }
    }
}

#[derive(Serialize, Deserialize)]
struct JsonAtom {
    xi: f64,
    w: String,
}

#[derive(Serialize, Deserialize)]
struct JsonMeasure {
    j: u16,
    lambda: serde_json::Value,
    atoms: Vec<JsonAtom>,
}

fn json_rational(v: &serde_json::Value) -> Result<BigRational> {
    match v {
        serde_json::Value::String(s) => parse_rational(s),
        serde_json::Value::Number(n) => parse_rational(&n.to_string()),
        other => Err(Error::Parse(format!("expected a number, found {other}"))),
    }
}

impl Serialize for LevyAtomMeasure {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        JsonMeasure {
            j: self.j,
            lambda: serde_json::Value::String(format!("{}/{}", self.lambda.numer(), self.lambda.denom())),
            atoms: self
                .atoms
                .iter()
                .map(|a| JsonAtom { xi: a.xi, w: format!("{}/{}", a.w.numer(), a.w.denom()) })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for LevyAtomMeasure {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = JsonMeasure::deserialize(d)?;
        let lambda = json_rational(&raw.lambda).map_err(D::Error::custom)?;
        let atoms = raw
            .atoms
            .into_iter()
            .map(|a| Ok(Atom { xi: a.xi, w: parse_rational(&a.w)? }))
            .collect::<Result<Vec<_>>>()
            .map_err(D::Error::custom)?;
        LevyAtomMeasure::new(raw.j, lambda, atoms).map_err(D::Error::custom)
    }
}

/// The exponential factor that multiplies a transform.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Prefactor {
    None,
    /// `exp(-u²t/2)`, or `exp(-u²/2)` when standardized.
    Gauss { standardized: bool },
    /// `exp(-(c_1 u)² t/2 + t Σ_j A_j)`, or `exp(-u²/2 + t Σ_j A_j)` when
    /// standardized, where `A_j` is the jump exponent of driver `j`.
    GaussJump { standardized: bool, drivers: Vec<u16> },
}

impl Prefactor {
    pub fn eval(&self, a: &Assignment) -> Result<Complex64> {
        let u = a.u.ok_or_else(|| Error::MissingSymbol("u".into()))?;
        let t = a.t.ok_or_else(|| Error::MissingSymbol("t".into()))?;
        match self {
            Prefactor::None => Ok(Complex64::new(1.0, 0.0)),
            Prefactor::Gauss { standardized } => {
                let s = if *standardized { 1.0 } else { t };
                Ok(Complex64::new((-u * u * s / 2.0).exp(), 0.0))
            }
            Prefactor::GaussJump { standardized, drivers } => {
                let mut exponent = if *standardized {
                    Complex64::new(-u * u / 2.0, 0.0)
                } else {
                    let c1 = a.value(&Symbol::c(&[1]))?;
                    -(c1 * u).powu(2) * t / 2.0
                };
                for j in drivers {
                    exponent += a.value(&Symbol::JumpExponent(*j))? * t;
                }
                Ok(exponent.exp())
            }
        }
    }

    pub fn render(&self) -> String {
        match self {
            Prefactor::None => "1".into(),
            Prefactor::Gauss { standardized: true } => "exp(-u^2/2)".into(),
            Prefactor::Gauss { standardized: false } => "exp(-u^2*t/2)".into(),
            Prefactor::GaussJump { standardized, drivers } => {
                let gauss = if *standardized { "-u^2/2" } else { "-c_1^2*u^2*t/2" };
                let jumps: String = drivers.iter().map(|j| format!(" + t*A_{j}")).collect();
                format!("exp({gauss}{jumps})")
            }
        }
    }

    pub fn render_latex(&self) -> String {
        match self {
            Prefactor::None => String::new(),
            Prefactor::Gauss { standardized: true } => "e^{-\\frac{u^2}{2}}".into(),
            Prefactor::Gauss { standardized: false } => "e^{-\\frac{u^2 t}{2}}".into(),
            Prefactor::GaussJump { standardized, drivers } => {
                let gauss = if *standardized { "-\\frac{u^2}{2}" } else { "-\\frac{c_1^2 u^2 t}{2}" };
                let jumps: String = drivers.iter().map(|j| format!(" + t A_{{{j}}}")).collect();
                format!("e^{{{gauss}{jumps}}}")
            }
        }
    }
}

/// `prefactor · poly`.
#[derive(Clone, Debug, PartialEq)]
pub struct TransformResult {
    pub prefactor: Prefactor,
    pub poly: Poly,
}

impl TransformResult {
    pub fn eval(&self, a: &Assignment) -> Result<Complex64> {
        Ok(self.prefactor.eval(a)? * self.poly.eval(a)?)
    }
}

/// `E_0[⟨I, ·⟩]` as a polynomial in `√t` and the jump moments `m_{j,k}`.
pub fn expected_sig(word: &Word, cfg: &AlphabetConfig) -> Result<Poly> {
    cfg.check_word(word)?;
    let mut mono = Monomial::power(Symbol::SqrtT, 2 * word.len() as u32);
    for &l in word.iter() {
        match l {
            0 => {}
            l if l > 0 => return Ok(Poly::zero()),
            l => {
                let (j, k) = cfg.decode_jump(l)?;
                mono = mono.mul(&Monomial::symbol(Symbol::JumpMoment(j, k)));
            }
        }
    }
    Ok(Poly::term(mono, inv_factorial(word.len())))
}

/// Linear extension of [`expected_sig`].
pub fn expected_sig_lincomb<C: Coefficient + ToPoly>(k: &WordCombination<C>, cfg: &AlphabetConfig) -> Result<Poly> {
    let mut out = Poly::zero();
    for (w, c) in k.iter() {
        let e = expected_sig(w, cfg)?;
        if !e.is_zero() {
            out += &(&c.to_poly() * &e);
        }
    }
    Ok(out)
}

pub fn inv_factorial(n: usize) -> BigRational {
    let f: BigInt = (1..=n).map(BigInt::from).product();
    BigRational::new(BigInt::one(), f)
}

/// `E_0[⟨I, W⟩ exp(iu W^1_t)]`, or with `u` replaced by `u/√t` when
/// `standardized` is set.
pub fn w_transform(word: &Word, standardized: bool) -> TransformResult {
    let prefactor = Prefactor::Gauss { standardized };
    if word.iter().any(|&l| l != 0 && l != 1) {
        return TransformResult { prefactor, poly: Poly::zero() };
    }
    let k = word.len() as u32;
    let ones = word.count(1) as u32;
    let sqrt_t = if standardized { 2 * k - ones } else { 2 * k };
    let mono = Monomial::power(Symbol::Iu, ones).mul(&Monomial::power(Symbol::SqrtT, sqrt_t));
    TransformResult { prefactor, poly: Poly::term(mono, inv_factorial(k as usize)) }
}

/// Linear extension of [`w_transform`]; the prefactor is shared.
pub fn w_transform_lincomb<C: Coefficient + ToPoly>(k: &WordCombination<C>, standardized: bool) -> TransformResult {
    let mut poly = Poly::zero();
    for (w, c) in k.iter() {
        let r = w_transform(w, standardized);
        if !r.poly.is_zero() {
            poly += &(&c.to_poly() * &r.poly);
        }
    }
    TransformResult { prefactor: Prefactor::Gauss { standardized }, poly }
}

/// Which jump drivers enter the exponent of a jump Fourier transform,
/// alongside `c_1 W^1`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct JumpLoading {
    pub drivers: BTreeSet<u16>,
}

impl JumpLoading {
    pub fn none() -> Self {
        Self::default()
    }

    pub fn drivers(drivers: impl IntoIterator<Item = u16>) -> Self {
        JumpLoading { drivers: drivers.into_iter().collect() }
    }
}

/// `E_0[⟨I, Z⟩ exp(iu(c_1 W^1 + Σ_j c_{-j} N^j))]` over the loaded drivers,
/// or its standardized form with `u` replaced by `u/(c_1 √t)`.
///
/// Jump letters of a loaded driver contribute `ψ_{j,k} = λ_j ∫ e^{iθ_j ξ} ξ^k
/// ν_j(dξ)`; letters of other drivers contribute the plain moment `m_{j,k}`.
pub fn jump_fourier_transform(
    word: &Word,
    cfg: &AlphabetConfig,
    measures: &[LevyAtomMeasure],
    loading: &JumpLoading,
    standardized: bool,
) -> Result<TransformResult> {
    cfg.check_word(word)?;
    let have: BTreeSet<u16> = measures.iter().map(|m| m.j).collect();
    for &j in &loading.drivers {
        if !have.contains(&j) {
            return Err(Error::Configuration(format!("no Lévy measure supplied for jump driver {j}")));
        }
    }
    let prefactor = if loading.drivers.is_empty() {
        Prefactor::Gauss { standardized }
    } else {
        Prefactor::GaussJump { standardized, drivers: loading.drivers.iter().copied().collect() }
    };
    let mut mono = Monomial::one();
    let mut ones = 0u32;
    for &l in word.iter() {
        match l {
            0 => {}
            1 => ones += 1,
            l if l > 1 => return Ok(TransformResult { prefactor, poly: Poly::zero() }),
            l => {
                let (j, k) = cfg.decode_jump(l)?;
                if !have.contains(&j) {
                    return Err(Error::Configuration(format!("no Lévy measure supplied for jump driver {j}")));
                }
                let s = if loading.drivers.contains(&j) { Symbol::JumpAtom(j, k) } else { Symbol::JumpMoment(j, k) };
                mono = mono.mul(&Monomial::symbol(s));
            }
        }
    }
    let n = word.len() as u32;
    mono = mono.mul(&Monomial::power(Symbol::Iu, ones));
    if standardized {
        mono = mono.mul(&Monomial::power(Symbol::SqrtT, 2 * n - ones));
    } else {
        mono = mono.mul(&Monomial::power(Symbol::SqrtT, 2 * n)).mul(&Monomial::power(Symbol::c(&[1]), ones));
    }
    Ok(TransformResult { prefactor, poly: Poly::term(mono, inv_factorial(n as usize)) })
}

/// Numeric driver data for evaluating jump symbols. `loadings[j]` is the
/// coefficient multiplying `u` inside the exponentials of driver `j`.
pub fn driver_numerics(measures: &[LevyAtomMeasure], loadings: &BTreeMap<u16, f64>) -> BTreeMap<u16, DriverNumerics> {
    measures.iter().map(|m| (m.j, m.numerics(loadings.get(&m.j).copied().unwrap_or(0.0)))).collect()
}

/// Whether bounds are for the Brownian-only or the jump signature.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OrderMode {
    Continuous,
    Jump,
}

/// Exponent of `t` in the size of a standardized jump Fourier transform:
/// `|I| - I(1)/2`.
pub fn transform_order(word: &Word) -> Rational64 {
    Rational64::new(2 * word.len() as i64 - word.count(1) as i64, 2)
}

/// Exponent of `t` bounding `E_0[⟨I, ·⟩^m]`.
pub fn word_moment_order(word: &Word, moment: u32, mode: OrderMode) -> Rational64 {
    let s = word.stats();
    let m = moment as i64;
    match mode {
        OrderMode::Continuous => Rational64::new(m * (s.len + s.zero) as i64, 2),
        OrderMode::Jump => Rational64::new(m * s.positive as i64, 2) + Rational64::from_integer(m * s.zero as i64 + s.negative as i64),
    }
}

/// Exponent of `t` bounding `E_0[|ε_n(t)|^m]` for a depth-`n` expansion under
/// integrability order `big_n`.
pub fn error_order(n: u32, mode: OrderMode, moment: u32, big_n: Rational64) -> Result<Rational64> {
    if !big_n.is_positive() {
        return Err(Error::Precondition(format!("integrability order must be positive, got {big_n}")));
    }
    if Rational64::from_integer(moment as i64) > big_n * 2 {
        return Err(Error::Precondition(format!("moment {moment} exceeds twice the integrability order {big_n}")));
    }
    let base = Rational64::from_integer(moment as i64 * (n as i64 + 1));
    Ok(match mode {
        OrderMode::Continuous => base / 2,
        OrderMode::Jump => base / (big_n * 2),
    })
}
