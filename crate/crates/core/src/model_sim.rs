//! Monte Carlo simulation of truncated signature models.
//!
//! Every signature component of the model is advanced jointly on a uniform
//! grid with the left-point rule `⟨Ij,·⟩ += ⟨I,·⟩ ΔZ^j`. Compound Poisson
//! jumps arrive at exponential times and are applied after the diffusive
//! update of their step.
//!
//! ```
//! use sigexpand::generator_ops::ProcessSpec;
//! use sigexpand::model_sim::{simulate_signature_samples, SimConfig};
//! use sigexpand::word_algebra::AlphabetConfig;
//!
//! let mut spec = ProcessSpec::new(AlphabetConfig::continuous(1), 1);
//! spec.set_numeric(&[1], 1.0);
//! let sc = SimConfig { n_paths: 10_000, n_steps: 500, t: 1.0, seed: 1 };
//! let s = simulate_signature_samples(&spec, &sc, &[]).unwrap();
//! let mean = s.x.iter().sum::<f64>() / s.x.len() as f64;
//! assert!(mean.abs() < 0.04);
//! ```

use std::collections::{BTreeMap, BTreeSet};

use num_complex::Complex64;
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::charfun_expansion::Expansion;
use crate::coeff_ring::rational_to_f64;
use crate::error::{Error, Result};
use crate::generator_ops::ProcessSpec;
use crate::word_algebra::{Letter, Word};

/// Largest number of word updates a single simulation may perform.
pub const MAX_WORK: u128 = 2_000_000_000_000;

/// Simulation settings. `n_steps` is the number of grid steps over `[0, t]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub n_paths: usize,
    pub n_steps: usize,
    pub t: f64,
    pub seed: u64,
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_paths < 10_000 {
            return Err(Error::Configuration(format!("at least 10000 paths are required, got {}", self.n_paths)));
        }
        if !(self.t.is_finite() && self.t > 0.0) {
            return Err(Error::Configuration(format!("horizon must be positive, got {}", self.t)));
        }
        if (self.n_steps as f64) < 500.0 * self.t.max(1.0) - 1e-9 {
            return Err(Error::Configuration(format!(
                "at least 500 steps per unit time are required, got {} steps over t = {}",
                self.n_steps, self.t
            )));
        }
        Ok(())
    }
}

/// A Monte Carlo estimate with its standard error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct McEstimate {
    pub value: Complex64,
    pub std_error: f64,
    pub n_effective: usize,
}

/// Simulated terminal values.
#[derive(Clone, Debug, PartialEq)]
pub struct Samples {
    pub t: f64,
    /// `X_t` per path.
    pub x: Vec<f64>,
    /// Requested signature components per path.
    pub components: BTreeMap<Word, Vec<f64>>,
    /// Number of jumps of each driver per path.
    pub jump_counts: BTreeMap<u16, Vec<u32>>,
}

struct Update {
    target: usize,
    parent: usize,
    letter: Letter,
}

struct Plan {
    words: Vec<Word>,
    /// Diffusive updates, longest target first.
    diffusive: Vec<Update>,
    /// Jump updates per driver: `(target, parent, power)`, longest first.
    jumps: BTreeMap<u16, Vec<(usize, usize, u16)>>,
    coeffs: Vec<(usize, f64)>,
    requested: Vec<usize>,
    d: usize,
    drivers: Vec<DriverSampler>,
}

struct DriverSampler {
    j: u16,
    exp: Exp<f64>,
    sizes: Vec<f64>,
    pick: WeightedIndex<f64>,
}

fn plan(spec: &ProcessSpec, extra: &[Word]) -> Result<Plan> {
    spec.validate()?;
    let mut set: BTreeSet<Word> = BTreeSet::new();
    set.insert(Word::empty());
    for w in spec.coeffs.keys().chain(extra.iter()) {
        spec.cfg.check_word(w)?;
        let mut p = w.clone();
        loop {
            set.insert(p.clone());
            match p.prefix() {
                Some(q) => p = q,
                None => break,
            }
        }
    }
    // Word order is length first, so later entries never feed earlier ones.
    let words: Vec<Word> = set.into_iter().collect();
    let index: BTreeMap<&Word, usize> = words.iter().enumerate().map(|(i, w)| (w, i)).collect();
    let mut diffusive = Vec::new();
    let mut jumps: BTreeMap<u16, Vec<(usize, usize, u16)>> = BTreeMap::new();
    for (i, w) in words.iter().enumerate().rev() {
        let (Some(letter), Some(prefix)) = (w.last(), w.prefix()) else { continue };
        let parent = index[&prefix];
        if letter >= 0 {
            diffusive.push(Update { target: i, parent, letter });
        } else {
            let (j, k) = spec.cfg.decode_jump(letter)?;
            jumps.entry(j).or_default().push((i, parent, k));
        }
    }
    let mut coeffs = Vec::new();
    for (w, p) in &spec.coeffs {
        let c = p
            .as_constant()
            .ok_or_else(|| Error::Precondition(format!("simulation needs numeric coefficients; {w} is symbolic")))?;
        coeffs.push((index[w], rational_to_f64(&c)));
    }
    let requested = extra.iter().map(|w| index[w]).collect();
    let mut drivers = Vec::new();
    for m in &spec.levy {
        let lambda = rational_to_f64(&m.lambda);
        let weights: Vec<f64> = m.atoms.iter().map(|a| rational_to_f64(&a.w)).collect();
        drivers.push(DriverSampler {
            j: m.j,
            exp: Exp::new(lambda).map_err(|e| Error::Configuration(e.to_string()))?,
            sizes: m.atoms.iter().map(|a| a.xi).collect(),
            pick: WeightedIndex::new(&weights).map_err(|e| Error::Configuration(e.to_string()))?,
        });
    }
    for j in jumps.keys() {
        if !drivers.iter().any(|d| d.j == *j) {
            return Err(Error::Configuration(format!("no Lévy measure supplied for jump driver {j}")));
        }
    }
    Ok(Plan { words, diffusive, jumps, coeffs, requested, d: spec.cfg.d as usize, drivers })
}

/// The outcome of one simulated path.
#[derive(Clone, Debug, PartialEq)]
pub struct PathResult {
    /// All simulated components, by word.
    pub signature: BTreeMap<Word, f64>,
    pub x: f64,
    /// Jump sizes of each driver, in time order.
    pub jumps: BTreeMap<u16, Vec<f64>>,
}

struct Raw {
    state: Vec<f64>,
    jumps: Vec<Vec<f64>>,
}

fn run_path(p: &Plan, sc: &SimConfig, path: u64) -> Raw {
    let mut rng = ChaCha8Rng::seed_from_u64(sc.seed);
    rng.set_stream(path);
    let dt = sc.t / sc.n_steps as f64;
    let sq = dt.sqrt();

    // Jump times first, so the Brownian draws are independent of them.
    let mut arrivals: Vec<(f64, usize, f64)> = Vec::new();
    let mut counts = vec![Vec::new(); p.drivers.len()];
    for (k, drv) in p.drivers.iter().enumerate() {
        let mut s = 0.0;
        loop {
            s += drv.exp.sample(&mut rng);
            if s > sc.t {
                break;
            }
            let xi = drv.sizes[drv.pick.sample(&mut rng)];
            arrivals.push((s, k, xi));
            counts[k].push(xi);
        }
    }
    arrivals.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut state = vec![0.0; p.words.len()];
    state[0] = 1.0;
    let mut dz = vec![0.0; p.d + 1];
    dz[0] = dt;
    let mut next = 0;
    for step in 0..sc.n_steps {
        for v in dz.iter_mut().skip(1) {
            let z: f64 = StandardNormal.sample(&mut rng);
            *v = z * sq;
        }
        for u in &p.diffusive {
            state[u.target] += state[u.parent] * dz[u.letter as usize];
        }
        let end = if step + 1 == sc.n_steps { f64::INFINITY } else { (step + 1) as f64 * dt };
        while next < arrivals.len() && arrivals[next].0 <= end {
            let (_, k, xi) = arrivals[next];
            if let Some(ups) = p.jumps.get(&p.drivers[k].j) {
                for &(target, parent, power) in ups {
                    state[target] += state[parent] * xi.powi(power as i32);
                }
            }
            next += 1;
        }
    }
    Raw { state, jumps: counts }
}

fn x_of(p: &Plan, state: &[f64]) -> f64 {
    p.coeffs.iter().map(|(i, c)| c * state[*i]).sum()
}

/// Simulates one path and returns every component it tracks.
pub fn simulate_path(spec: &ProcessSpec, sc: &SimConfig, path: u64, extra: &[Word]) -> Result<PathResult> {
    let p = plan(spec, extra)?;
    let raw = run_path(&p, sc, path);
    Ok(PathResult {
        signature: p.words.iter().cloned().zip(raw.state.iter().copied()).collect(),
        x: x_of(&p, &raw.state),
        jumps: p.drivers.iter().map(|d| d.j).zip(raw.jumps).collect(),
    })
}

fn threads() -> Option<usize> {
    std::env::var("SIGEXPAND_THREADS").ok().and_then(|v| v.parse().ok()).filter(|n| *n > 0)
}

/// Simulates `X_t` and the requested components on every path.
pub fn simulate_signature_samples(spec: &ProcessSpec, sc: &SimConfig, extra: &[Word]) -> Result<Samples> {
    sc.validate()?;
    let p = plan(spec, extra)?;
    let work = sc.n_paths as u128 * sc.n_steps as u128 * (p.diffusive.len() as u128 + p.d as u128);
    if work > MAX_WORK {
        return Err(Error::Resource { estimate: work, budget: MAX_WORK });
    }
    let body = || -> Vec<(f64, Vec<f64>, Vec<u32>)> {
        (0..sc.n_paths)
            .into_par_iter()
            .with_min_len(1024)
            .map(|i| {
                let raw = run_path(&p, sc, i as u64);
                let x = x_of(&p, &raw.state);
                let comps = p.requested.iter().map(|&k| raw.state[k]).collect();
                let counts = raw.jumps.iter().map(|v| v.len() as u32).collect();
                (x, comps, counts)
            })
            .collect()
    };
    let rows = match threads() {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Configuration(e.to_string()))?
            .install(body),
        None => body(),
    };
    let mut x = Vec::with_capacity(rows.len());
    let mut components: BTreeMap<Word, Vec<f64>> = extra.iter().map(|w| (w.clone(), Vec::new())).collect();
    let mut jump_counts: BTreeMap<u16, Vec<u32>> = p.drivers.iter().map(|d| (d.j, Vec::new())).collect();
    for (xi, comps, counts) in rows {
        x.push(xi);
        for (w, v) in extra.iter().zip(comps) {
            components.get_mut(w).expect("requested").push(v);
        }
        for (d, c) in p.drivers.iter().zip(counts) {
            jump_counts.get_mut(&d.j).expect("driver").push(c);
        }
    }
    Ok(Samples { t: sc.t, x, components, jump_counts })
}

/// Sample mean with its standard error.
pub fn mean_estimate(xs: &[f64]) -> Result<McEstimate> {
    if xs.is_empty() {
        return Err(Error::Precondition("no samples".into()));
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = if xs.len() > 1 { xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0) } else { 0.0 };
    Ok(McEstimate { value: Complex64::new(mean, 0.0), std_error: (var / n).sqrt(), n_effective: xs.len() })
}

/// How samples are rescaled before the characteristic function is taken.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Standardization {
    None,
    /// `(x - x0 - c0 t) / (c1 √t)`.
    ByC1SqrtT { x0: f64, c0: f64, c1: f64, t: f64 },
}

impl Standardization {
    pub fn from_spec(spec: &ProcessSpec, t: f64) -> Result<Self> {
        let c1 = spec.numeric_coeff(&[1])?;
        if c1 == 0.0 {
            return Err(Error::Precondition("standardization requires c_1 ≠ 0".into()));
        }
        Ok(Standardization::ByC1SqrtT { x0: spec.numeric_coeff(&[])?, c0: spec.numeric_coeff(&[0])?, c1, t })
    }

    fn apply(&self, x: f64) -> f64 {
        match *self {
            Standardization::None => x,
            Standardization::ByC1SqrtT { x0, c0, c1, t } => (x - x0 - c0 * t) / (c1 * t.sqrt()),
        }
    }
}

/// Mean of `exp(iu y)` over the (rescaled) samples. The standard error
/// combines the real and imaginary parts as `√(se_re² + se_im²)`.
pub fn empirical_cf(samples: &[f64], u: f64, std: Standardization) -> Result<McEstimate> {
    if samples.is_empty() {
        return Err(Error::Precondition("no samples".into()));
    }
    let n = samples.len() as f64;
    let (mut sr, mut si, mut srr, mut sii) = (0.0, 0.0, 0.0, 0.0);
    for &x in samples {
        let (s, c) = (u * std.apply(x)).sin_cos();
        sr += c;
        si += s;
        srr += c * c;
        sii += s * s;
    }
    let (mr, mi) = (sr / n, si / n);
    let var = |sq: f64, m: f64| if samples.len() > 1 { ((sq - n * m * m) / (n - 1.0)).max(0.0) } else { 0.0 };
    let se = ((var(srr, mr) + var(sii, mi)) / n).sqrt();
    Ok(McEstimate { value: Complex64::new(mr, mi), std_error: se, n_effective: samples.len() })
}

/// Reference values for [`verify_expansion`].
pub enum Truth<'a> {
    MonteCarlo(SimConfig),
    Analytic(&'a (dyn Fn(f64, f64) -> Complex64 + Sync)),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GridPoint {
    pub u: f64,
    pub t: f64,
    pub truth_re: f64,
    pub truth_im: f64,
    pub std_error: f64,
    pub expansion_re: f64,
    pub expansion_im: f64,
    pub abs_diff: f64,
    /// `|diff| / SE`, absent for analytic truth.
    pub z: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RateDiagnostic {
    pub u: f64,
    /// Least-squares slope of `log |diff|` against `log t`.
    pub slope: Option<f64>,
    /// Exponent implied by the remainder, `o(t^r)`.
    pub remainder_order: f64,
    /// Set when the differences are within Monte Carlo noise.
    pub noise_dominated: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationReport {
    pub truth: &'static str,
    pub points: Vec<GridPoint>,
    pub rates: Vec<RateDiagnostic>,
    /// Share of grid points with `|diff| ≤ 4 SE` (Monte Carlo only).
    pub within_4se: Option<f64>,
    pub notes: Vec<String>,
}

impl VerificationReport {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("report serializes")
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("u,t,truth_re,truth_im,std_error,expansion_re,expansion_im,abs_diff,z\n");
        for p in &self.points {
            let z = p.z.map(|z| z.to_string()).unwrap_or_default();
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{}\n",
                p.u, p.t, p.truth_re, p.truth_im, p.std_error, p.expansion_re, p.expansion_im, p.abs_diff, z
            ));
        }
        out
    }
}

/// Least-squares slope of `y` against `x`.
pub fn loglog_slope(points: &[(f64, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> =
        points.iter().filter(|(t, d)| *t > 0.0 && *d > 0.0).map(|(t, d)| (t.ln(), d.ln())).collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    Some(pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>() / sxx)
}

/// Compares an expansion of the standardized characteristic function with
/// simulated or exact values on a `(u, t)` grid. Simulations use
/// `n_steps` grid steps at every horizon.
pub fn verify_expansion(
    spec: &ProcessSpec,
    expansion: &Expansion,
    u_grid: &[f64],
    t_grid: &[f64],
    truth: Truth<'_>,
) -> Result<VerificationReport> {
    if !spec.is_numeric() {
        return Err(Error::Precondition("verification needs numeric coefficients".into()));
    }
    let mut points = Vec::new();
    for &t in t_grid {
        let samples = match &truth {
            Truth::MonteCarlo(sc) => {
                let cfg = SimConfig { t, ..*sc };
                Some(simulate_signature_samples(spec, &cfg, &[])?)
            }
            Truth::Analytic(_) => None,
        };
        for &u in u_grid {
            let value = expansion.eval(&spec.assignment(u, t))?;
            let (truth_v, se) = match (&truth, &samples) {
                (Truth::MonteCarlo(_), Some(s)) => {
                    let est = empirical_cf(&s.x, u, Standardization::from_spec(spec, t)?)?;
                    (est.value, Some(est.std_error))
                }
                (Truth::Analytic(f), _) => (f(u, t), None),
                _ => unreachable!("samples exist for Monte Carlo truth"),
            };
            let diff = (value - truth_v).norm();
            points.push(GridPoint {
                u,
                t,
                truth_re: truth_v.re,
                truth_im: truth_v.im,
                std_error: se.unwrap_or(0.0),
                expansion_re: value.re,
                expansion_im: value.im,
                abs_diff: diff,
                z: se.map(|s| if s > 0.0 { diff / s } else { f64::INFINITY }),
            });
        }
    }
    let remainder_order = *expansion.remainder.numer() as f64 / *expansion.remainder.denom() as f64;
    let rates = u_grid
        .iter()
        .map(|&u| {
            let row: Vec<&GridPoint> = points.iter().filter(|p| p.u == u).collect();
            let noise = row.iter().all(|p| p.z.is_some_and(|z| z <= 4.0));
            RateDiagnostic {
                u,
                slope: loglog_slope(&row.iter().map(|p| (p.t, p.abs_diff)).collect::<Vec<_>>()),
                remainder_order,
                noise_dominated: noise,
            }
        })
        .collect();
    let within_4se = match truth {
        Truth::MonteCarlo(_) => {
            Some(points.iter().filter(|p| p.z.is_some_and(|z| z <= 4.0)).count() as f64 / points.len().max(1) as f64)
        }
        Truth::Analytic(_) => None,
    };
    let notes = vec![
        "the simulator realizes the truncated model exactly (zero truncation error); remainder behaviour is \
         assessed only through the rate diagnostic"
            .to_string(),
    ];
    Ok(VerificationReport {
        truth: match truth {
            Truth::MonteCarlo(_) => "monte_carlo",
            Truth::Analytic(_) => "analytic",
        },
        points,
        rates,
        within_4se,
        notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff_ring::rat;
    use crate::signature_moments::{expected_sig_lincomb, LevyAtomMeasure};
    use crate::word_algebra::{star, AlphabetConfig};

    fn sc(t: f64, steps: usize, seed: u64) -> SimConfig {
        SimConfig { n_paths: 20_000, n_steps: steps, t, seed }
    }

    #[test]
    fn config_limits() {
        assert!(SimConfig { n_paths: 100, n_steps: 500, t: 1.0, seed: 0 }.validate().is_err());
        assert!(SimConfig { n_paths: 10_000, n_steps: 100, t: 1.0, seed: 0 }.validate().is_err());
        assert!(SimConfig { n_paths: 10_000, n_steps: 500, t: 0.01, seed: 0 }.validate().is_ok());
    }

    #[test]
    fn brownian_mean_and_variance() {
        let mut spec = ProcessSpec::new(AlphabetConfig::continuous(1), 1);
        spec.set_numeric(&[1], 1.0);
        let s = simulate_signature_samples(&spec, &sc(1.0, 500, 3), &[]).unwrap();
        let m = mean_estimate(&s.x).unwrap();
        assert!(m.value.re.abs() <= 4.0 * m.std_error);
        let sq: Vec<f64> = s.x.iter().map(|x| x * x).collect();
        let v = mean_estimate(&sq).unwrap();
        assert!((v.value.re - 1.0).abs() <= 4.0 * v.std_error);
    }

    #[test]
    fn iterated_integral_second_moment() {
        let mut spec = ProcessSpec::new(AlphabetConfig::continuous(1), 2);
        spec.set_numeric(&[1, 1], 1.0);
        let s = simulate_signature_samples(&spec, &sc(1.0, 500, 4), &[]).unwrap();
        let m = mean_estimate(&s.x).unwrap();
        assert!(m.value.re.abs() <= 4.0 * m.std_error);
        let w = Word::from([1, 1]);
        let oracle = expected_sig_lincomb(&star(&w, &w).unwrap(), &AlphabetConfig::continuous(1)).unwrap();
        let expect = oracle.eval(&crate::coeff_ring::Assignment::new(0.0, 1.0)).unwrap().re;
        assert!((expect - 0.5).abs() < 1e-12);
        let sq: Vec<f64> = s.x.iter().map(|x| x * x).collect();
        let v = mean_estimate(&sq).unwrap();
        assert!((v.value.re - expect).abs() <= 4.0 * v.std_error, "{} vs {expect} ± {}", v.value.re, v.std_error);
    }

    fn poisson_spec() -> ProcessSpec {
        let cfg = AlphabetConfig::new(1, 1, 2).unwrap();
        let mut spec = ProcessSpec::new(cfg, 1);
        spec.set_numeric(&[-1], 1.0);
        spec.levy.push(LevyAtomMeasure::dirac(1, rat(1, 1), 1.0).unwrap());
        spec
    }

    #[test]
    fn poisson_mean_and_counts() {
        let spec = poisson_spec();
        let s = simulate_signature_samples(&spec, &sc(1.0, 500, 5), &[]).unwrap();
        let m = mean_estimate(&s.x).unwrap();
        assert!((m.value.re - 1.0).abs() <= 4.0 * m.std_error);
        let counts: Vec<f64> = s.jump_counts[&1].iter().map(|&c| c as f64).collect();
        let cm = mean_estimate(&counts).unwrap();
        assert!((cm.value.re - 1.0).abs() <= 4.0 * cm.std_error);
        let var: Vec<f64> = counts.iter().map(|c| (c - 1.0).powi(2)).collect();
        let vm = mean_estimate(&var).unwrap();
        assert!((vm.value.re - 1.0).abs() <= 4.0 * vm.std_error);
    }

    #[test]
    fn power_process_is_sum_of_squares() {
        let cfg = AlphabetConfig::new(1, 1, 2).unwrap();
        let mut spec = ProcessSpec::new(cfg, 1);
        spec.set_numeric(&[-1], 1.0);
        spec.levy.push(
            LevyAtomMeasure::new(
                1,
                rat(3, 1),
                vec![
                    crate::signature_moments::Atom { xi: 0.5, w: rat(1, 2) },
                    crate::signature_moments::Atom { xi: -1.5, w: rat(1, 2) },
                ],
            )
            .unwrap(),
        );
        let n12 = Word::from([cfg.encode_jump(1, 2).unwrap()]);
        for path in 0..50 {
            let r = simulate_path(&spec, &sc(1.0, 500, 9), path, std::slice::from_ref(&n12)).unwrap();
            let sum: f64 = r.jumps[&1].iter().map(|x| x * x).sum();
            assert!((r.signature[&n12] - sum).abs() < 1e-12);
        }
    }

    #[test]
    fn reproducible() {
        let spec = poisson_spec();
        let a = simulate_signature_samples(&spec, &sc(0.5, 500, 11), &[]).unwrap();
        let b = simulate_signature_samples(&spec, &sc(0.5, 500, 11), &[]).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn empirical_cf_examples() {
        let zero = vec![0.0; 10];
        let e = empirical_cf(&zero, 1.0, Standardization::None).unwrap();
        assert_eq!(e.value, Complex64::new(1.0, 0.0));
        assert_eq!(e.std_error, 0.0);
        let mut spec = ProcessSpec::new(AlphabetConfig::continuous(1), 1);
        spec.set_numeric(&[1], 0.3);
        let s = simulate_signature_samples(&spec, &sc(0.2, 500, 12), &[]).unwrap();
        let e = empirical_cf(&s.x, 1.0, Standardization::from_spec(&spec, 0.2).unwrap()).unwrap();
        assert!((e.value - Complex64::new((-0.5f64).exp(), 0.0)).norm() <= 4.0 * e.std_error);
    }

    #[test]
    fn symbolic_specs_are_rejected() {
        let mut spec = ProcessSpec::new(AlphabetConfig::continuous(1), 1);
        spec.set_symbolic(&[&[1]]);
        assert!(matches!(simulate_signature_samples(&spec, &sc(1.0, 500, 0), &[]), Err(Error::Precondition(_))));
    }

    #[test]
    fn slope_of_power_law() {
        let pts: Vec<(f64, f64)> = [0.1, 0.05, 0.025].iter().map(|t| (*t, 3.0 * t * t)).collect();
        assert!((loglog_slope(&pts).unwrap() - 2.0).abs() < 1e-12);
    }
}
