//! Property suites shared by `properties.rs` and `acceptance.rs`. Each suite
//! runs 200 random cases and reports the first failure as a string.

#![allow(dead_code)]

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};

use sigexpand::charfun_expansion::standardized_cf_expansion;
use sigexpand::coeff_ring::{Monomial, Poly, Symbol};
use sigexpand::generator_ops::ProcessSpec;
use sigexpand::signature_moments::expected_sig_lincomb;
use sigexpand::word_algebra::{
    bar_star, product_combinations, star, AlphabetConfig, Letter, ProductMode, Word, WordCombination,
};

pub const CASES: u32 = 200;

pub type Suite = (&'static str, fn() -> Result<(), String>);

pub fn suites() -> Vec<Suite> {
    vec![
        ("star symmetry", star_symmetry),
        ("star associativity", star_associativity),
        ("star identity", star_identity),
        ("bar-star symmetry", bar_star_symmetry),
        ("bar-star associativity", bar_star_associativity),
        ("bar-star degenerates to star", degeneration),
        ("polynomial ring laws", ring_laws),
        ("expected signature vs Gaussian oracle", expected_sig_oracle),
        ("conjugate symmetry of expansions", conjugate_symmetry),
    ]
}

fn runner() -> TestRunner {
    TestRunner::new(Config { cases: CASES, failure_persistence: None, ..Config::default() })
}

fn run<S: Strategy>(strategy: S, test: impl Fn(S::Value) -> Result<(), TestCaseError>) -> Result<(), String>
where
    S::Value: std::fmt::Debug,
{
    runner().run(&strategy, test).map_err(|e| e.to_string())
}

fn word(letters: Vec<Letter>) -> Word {
    Word::from(letters)
}

pub fn brownian_word(max_len: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec(0i16..=2, 0..=max_len).prop_map(word)
}

/// Jump alphabet with two Brownian and two jump drivers and enough power
/// depth that no product in the suites overflows it.
pub fn jump_cfg() -> AlphabetConfig {
    AlphabetConfig::new(2, 2, 8).unwrap()
}

fn jump_word(max_len: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec(prop::sample::select(vec![0i16, 1, 2, -1, -9]), 0..=max_len).prop_map(word)
}

fn single(w: &Word) -> WordCombination<BigInt> {
    WordCombination::word(w.clone())
}

fn star_symmetry() -> Result<(), String> {
    run((brownian_word(4), brownian_word(4)), |(a, b)| {
        prop_assert_eq!(star(&a, &b).unwrap(), star(&b, &a).unwrap());
        Ok(())
    })
}

fn star_associativity() -> Result<(), String> {
    let cfg = AlphabetConfig::continuous(2);
    run((brownian_word(3), brownian_word(3), brownian_word(3)), move |(a, b, c)| {
        let m = ProductMode::Continuous;
        let left = product_combinations(&star(&a, &b).unwrap(), &single(&c), &cfg, m).unwrap();
        let right = product_combinations(&single(&a), &star(&b, &c).unwrap(), &cfg, m).unwrap();
        prop_assert_eq!(left, right);
        Ok(())
    })
}

fn star_identity() -> Result<(), String> {
    run(brownian_word(6), |a| {
        prop_assert_eq!(star(&Word::empty(), &a).unwrap(), single(&a));
        prop_assert_eq!(star(&a, &Word::empty()).unwrap(), single(&a));
        Ok(())
    })
}

fn bar_star_symmetry() -> Result<(), String> {
    let cfg = jump_cfg();
    run((jump_word(4), jump_word(4)), move |(a, b)| {
        prop_assert_eq!(bar_star(&a, &b, &cfg).unwrap(), bar_star(&b, &a, &cfg).unwrap());
        Ok(())
    })
}

fn bar_star_associativity() -> Result<(), String> {
    let cfg = jump_cfg();
    run((jump_word(3), jump_word(3), jump_word(2)), move |(a, b, c)| {
        let m = ProductMode::Jump;
        let left = product_combinations(&bar_star(&a, &b, &cfg).unwrap(), &single(&c), &cfg, m).unwrap();
        let right = product_combinations(&single(&a), &bar_star(&b, &c, &cfg).unwrap(), &cfg, m).unwrap();
        prop_assert_eq!(left, right);
        Ok(())
    })
}

fn degeneration() -> Result<(), String> {
    let cfg = jump_cfg();
    run((brownian_word(4), brownian_word(4)), move |(a, b)| {
        prop_assert_eq!(bar_star(&a, &b, &cfg).unwrap(), star(&a, &b).unwrap());
        Ok(())
    })
}

fn small_poly() -> impl Strategy<Value = Poly> {
    let sym = prop::sample::select(vec![
        Symbol::Iu,
        Symbol::SqrtT,
        Symbol::c(&[1]),
        Symbol::c(&[1, 1]),
        Symbol::c(&[2, 1]),
    ]);
    let term = (prop::collection::vec((sym, 1u32..=3), 0..=3), -6i64..=6, 1i64..=4);
    prop::collection::vec(term, 0..=4).prop_map(|terms| {
        let mut p = Poly::zero();
        for (factors, n, d) in terms {
            let m = factors.into_iter().fold(Monomial::one(), |m, (s, e)| m.mul(&Monomial::power(s, e)));
            p.add_term(m, BigRational::new(n.into(), d.into()));
        }
        p
    })
}

fn ring_laws() -> Result<(), String> {
    run((small_poly(), small_poly(), small_poly()), |(a, b, c)| {
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a * &Poly::one(), a.clone());
        prop_assert!((&(&a + &b) - &b) == a);
        Ok(())
    })
}

/// `E[⟨I,W⟩_t ⟨J,W⟩_t]` as `{power of t: coefficient}`, from the Itô
/// product rule applied to the last letters:
/// `d(J_I J_J) = J_I dJ_J + J_J dJ_I + d[J_I, J_J]`.
pub fn gaussian_pair_moment(i: &[Letter], j: &[Letter]) -> BTreeMap<u32, BigRational> {
    fn integrate(p: BTreeMap<u32, BigRational>) -> BTreeMap<u32, BigRational> {
        p.into_iter().map(|(k, c)| (k + 1, c / BigRational::from_integer((k + 1).into()))).collect()
    }
    fn add(acc: &mut BTreeMap<u32, BigRational>, p: BTreeMap<u32, BigRational>) {
        for (k, c) in p {
            *acc.entry(k).or_insert_with(BigRational::zero) += c;
        }
        acc.retain(|_, c| !c.is_zero());
    }
    if i.is_empty() || j.is_empty() {
        let w = if i.is_empty() { j } else { i };
        // E[J_w] is t^n/n! for a pure time word and zero otherwise.
        let mut out = BTreeMap::new();
        if w.iter().all(|&l| l == 0) {
            let mut f = BigRational::one();
            for k in 1..=w.len() {
                f /= BigRational::from_integer(k.into());
            }
            out.insert(w.len() as u32, f);
        }
        return out;
    }
    let (ip, a) = (&i[..i.len() - 1], i[i.len() - 1]);
    let (jp, b) = (&j[..j.len() - 1], j[j.len() - 1]);
    let mut drift = BTreeMap::new();
    if b == 0 {
        add(&mut drift, gaussian_pair_moment(i, jp));
    }
    if a == 0 {
        add(&mut drift, gaussian_pair_moment(ip, j));
    }
    if a == b && a > 0 {
        add(&mut drift, gaussian_pair_moment(ip, jp));
    }
    integrate(drift)
}

fn expected_sig_oracle() -> Result<(), String> {
    let cfg = AlphabetConfig::continuous(2);
    let pair = (0usize..=4).prop_flat_map(|n| (0..=n).prop_map(move |k| (k, n - k))).prop_flat_map(|(k, l)| {
        (prop::collection::vec(0i16..=2, k), prop::collection::vec(0i16..=2, l))
    });
    run(pair, move |(i, j)| {
        let engine = expected_sig_lincomb(&star(&word(i.clone()), &word(j.clone())).unwrap(), &cfg).unwrap();
        let mut oracle = Poly::zero();
        for (k, c) in gaussian_pair_moment(&i, &j) {
            oracle.add_term(Monomial::power(Symbol::SqrtT, 2 * k), c);
        }
        prop_assert_eq!(engine, oracle);
        Ok(())
    })
}

fn conjugate_symmetry() -> Result<(), String> {
    let coeffs = (0.05f64..1.0, -1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0);
    run((coeffs, 0.0f64..3.0, 0.001f64..0.5), |((c1, c11, c21, c01, c10, c111), u, t)| {
        let mut spec = ProcessSpec::new(AlphabetConfig::continuous(2), 3);
        spec.set_numeric(&[1], c1);
        spec.set_numeric(&[1, 1], c11);
        spec.set_numeric(&[2, 1], c21);
        spec.set_numeric(&[0, 1], c01);
        spec.set_numeric(&[1, 0], c10);
        spec.set_numeric(&[1, 1, 1], c111);
        let e = standardized_cf_expansion(&spec, 2).unwrap();
        let plus = e.eval(&spec.assignment(u, t)).unwrap();
        let minus = e.eval(&spec.assignment(-u, t)).unwrap();
        prop_assert!((plus - minus.conj()).norm() <= 1e-12 * (1.0 + plus.norm()));
        prop_assert!((e.eval(&spec.assignment(0.0, t)).unwrap() - 1.0).norm() < 1e-12);
        Ok(())
    })
}

/// Every word of length ≤ 4 over `{0,1,2,3}` that is allowed under the
/// standardized-expansion structure, minus `c_20`, as a symbolic spec. 147
/// characteristics in total.
pub fn third_order_spec(n: u32) -> ProcessSpec {
    let mut spec = ProcessSpec::new(AlphabetConfig::continuous(3), n);
    let mut frontier: Vec<Vec<Letter>> = vec![vec![]];
    for _ in 0..4 {
        let mut next = Vec::new();
        for w in &frontier {
            for l in 0..=3 {
                let mut v = w.clone();
                v.push(l);
                next.push(v);
            }
        }
        for w in &next {
            if allowed(w) {
                spec.set(word(w.clone()), Poly::symbol(Symbol::c(w)));
            }
        }
        frontier = next;
    }
    spec
}

fn allowed(w: &[Letter]) -> bool {
    let n = w.len();
    let last = w[n - 1];
    if last > 1 || (n == 1 && last == 0) || w == [2, 0] {
        return false;
    }
    if n >= 2 {
        let prev = w[n - 2];
        if (last == 1 && prev > 2) || (last == 0 && prev > 3) {
            return false;
        }
    }
    true
}
