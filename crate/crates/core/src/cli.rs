//! Command line front end. [`run`] parses the arguments, executes one
//! subcommand and writes JSON (or LaTeX) to the given sinks.
//!
//! ```
//! let mut out = Vec::new();
//! let mut err = Vec::new();
//! let args = ["sigexpand", "star", "--left", "[1,1]", "--right", "[1]"];
//! let code = sigexpand::cli::run(args.iter().map(|s| s.to_string()), &mut out, &mut err);
//! assert_eq!(code, 0);
//! let v: serde_json::Value = serde_json::from_slice(&out).unwrap();
//! assert_eq!(v["text"], "(0,1) + (1,0) + 3(1,1,1)");
//! ```

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use serde_json::{json, Value};

use crate::charfun_expansion::{jump_cf_expansion_order, regular_moment_via_startransform, standardized_cf_expansion, Expansion};
use crate::coeff_ring::{parse_rational, Poly, Symbol};
use crate::error::{Error, Result};
use crate::generator_ops::{jump_regular_moment_expansion, kth_moment_expansion, regular_moment_expansion, FDerivatives, ProcessSpec};
use crate::model_sim::{verify_expansion, SimConfig, Truth};
use crate::word_algebra::{bar_star, star, AlphabetConfig, Letter, Word, WordCombination};

#[derive(Parser, Debug)]
#[command(name = "sigexpand", version, about = "Signature-based expansions of Itô semimartingales")]
struct Cli {
    /// Write the result here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Json,
    Latex,
    Text,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Route {
    Generator,
    Star,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Star product of two words over the Brownian alphabet.
    Star {
        #[arg(long)]
        left: String,
        #[arg(long)]
        right: String,
    },
    /// Bar-star product of two words over the extended alphabet.
    Barstar {
        #[arg(long)]
        left: String,
        #[arg(long)]
        right: String,
        #[arg(long)]
        d: Option<u16>,
        #[arg(long)]
        e: Option<u16>,
        #[arg(long, default_value_t = 2)]
        m: u16,
    },
    /// Expansion of E[f(X_t)].
    Moment {
        #[arg(long)]
        spec: PathBuf,
        /// `x^K`, `poly:a0,a1,...` or `exp_iu_square`.
        #[arg(long)]
        f: String,
        #[arg(long)]
        order: u32,
        #[arg(long, value_enum, default_value_t = Route::Generator)]
        route: Route,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Expansion of E[X_t^k].
    Kmoment {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        k: u32,
        #[arg(long)]
        order: u32,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Characteristic function of the standardized process.
    Charfun {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        order: u32,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Characteristic function with compound Poisson drivers.
    Jumpcharfun {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, default_value_t = 2)]
        order: u32,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Compares a characteristic-function expansion with simulation.
    Verify {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        order: u32,
        #[arg(long, value_delimiter = ',', required = true)]
        t: Vec<f64>,
        #[arg(long, value_delimiter = ',', required = true)]
        u: Vec<f64>,
        #[arg(long, default_value_t = 100_000)]
        paths: usize,
        /// Grid steps per simulated path.
        #[arg(long, default_value_t = 2000)]
        steps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also write the grid as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Re-emits an expansion JSON document.
    Render {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Latex)]
        format: Format,
    },
}

fn parse_word(s: &str) -> Result<Word> {
    let letters: Vec<Letter> =
        serde_json::from_str(s).map_err(|e| Error::Parse(format!("word `{s}` is not a JSON integer array: {e}")))?;
    Ok(Word::from(letters))
}

fn read(path: &PathBuf) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Configuration(format!("cannot read {}: {e}", path.display())))
}

fn load_spec(path: &PathBuf) -> Result<ProcessSpec> {
    ProcessSpec::from_json(&read(path)?)
}

fn parse_f(s: &str, order: u32) -> Result<FDerivatives> {
    if s == "exp_iu_square" {
        return Ok(FDerivatives::exp_iu_square(2 * order));
    }
    if let Some(k) = s.strip_prefix("x^") {
        let k = k.parse().map_err(|_| Error::Parse(format!("bad power in `{s}`")))?;
        return Ok(FDerivatives::power(k));
    }
    if let Some(list) = s.strip_prefix("poly:") {
        let coeffs = list
            .split(',')
            .map(|a| {
                let a = a.trim();
                match parse_rational(a) {
                    Ok(r) => Ok(Poly::constant(r)),
                    Err(_) => Symbol::parse(a).map(Poly::symbol),
                }
            })
            .collect::<Result<Vec<_>>>()?;
        return Ok(FDerivatives::Polynomial(coeffs));
    }
    Err(Error::Parse(format!("unknown function `{s}`; use x^K, poly:a0,a1,... or exp_iu_square")))
}

fn combination_json(c: &WordCombination<BigInt>) -> Value {
    let terms: Vec<Value> = c.iter().map(|(w, n)| json!({"word": w, "coeff": n.to_string()})).collect();
    json!({"terms": terms, "text": c.to_string()})
}

fn emit_expansion(e: &Expansion, format: Format) -> String {
    match format {
        Format::Json => pretty(&e.to_json()),
        Format::Latex => e.render_latex() + "\n",
        Format::Text => e.to_string() + "\n",
    }
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("json") + "\n"
}

fn has_jumps(spec: &ProcessSpec) -> bool {
    spec.coeffs.keys().any(|w| w.has_jump_letters())
}

fn execute(cmd: Command) -> Result<String> {
    match cmd {
        Command::Star { left, right } => Ok(pretty(&combination_json(&star(&parse_word(&left)?, &parse_word(&right)?)?))),
        Command::Barstar { left, right, d, e, m } => {
            let (l, r) = (parse_word(&left)?, parse_word(&right)?);
            let letters = l.iter().chain(r.iter());
            let d = d.unwrap_or_else(|| letters.clone().copied().max().unwrap_or(0).max(1) as u16);
            let lowest = letters.copied().min().unwrap_or(0).min(0).unsigned_abs();
            let e = e.unwrap_or_else(|| lowest.div_ceil(m).max(1));
            let cfg = AlphabetConfig::new(d, e, m)?;
            Ok(pretty(&combination_json(&bar_star(&l, &r, &cfg)?)))
        }
        Command::Moment { spec, f, order, route, format } => {
            let spec = load_spec(&spec)?;
            let f = parse_f(&f, order)?;
            let e = match route {
                Route::Generator if has_jumps(&spec) => jump_regular_moment_expansion(&spec, &f, order)?,
                Route::Generator => regular_moment_expansion(&spec, &f, order)?,
                Route::Star => regular_moment_via_startransform(&spec, &f, order)?,
            };
            Ok(emit_expansion(&e, format))
        }
        Command::Kmoment { spec, k, order, format } => {
            Ok(emit_expansion(&kth_moment_expansion(&load_spec(&spec)?, k, order)?, format))
        }
        Command::Charfun { spec, order, format } => {
            Ok(emit_expansion(&standardized_cf_expansion(&load_spec(&spec)?, order)?, format))
        }
        Command::Jumpcharfun { spec, order, format } => {
            Ok(emit_expansion(&jump_cf_expansion_order(&load_spec(&spec)?, order)?, format))
        }
        Command::Verify { spec, order, t, u, paths, steps, seed, csv } => {
            let spec = load_spec(&spec)?;
            let e = if has_jumps(&spec) {
                jump_cf_expansion_order(&spec, order)?
            } else {
                standardized_cf_expansion(&spec, order)?
            };
            let tmax = t.iter().copied().fold(0.0, f64::max);
            let sc = SimConfig { n_paths: paths, n_steps: steps, t: tmax, seed };
            sc.validate()?;
            let report = verify_expansion(&spec, &e, &u, &t, Truth::MonteCarlo(sc))?;
            if let Some(path) = csv {
                std::fs::write(&path, report.to_csv())
                    .map_err(|e| Error::Configuration(format!("cannot write {}: {e}", path.display())))?;
            }
            Ok(pretty(&report.to_json()))
        }
        Command::Render { input, format } => {
            let v: Value = serde_json::from_str(&read(&input)?).map_err(|e| Error::Parse(e.to_string()))?;
            Ok(emit_expansion(&Expansion::from_json(&v)?, format))
        }
    }
}

fn error_json(kind: &str, message: &str) -> String {
    serde_json::to_string(&json!({"error": {"kind": kind, "message": message}})).expect("json") + "\n"
}

fn configure_threads() {
    if let Some(n) = std::env::var("SIGEXPAND_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        // A global pool may already exist when called repeatedly in-process.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
}

/// Runs one command and returns the process exit code: 0 on success, 2 on
/// usage or validation errors, 3 when a resource budget is exceeded.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(stdout, "{e}");
                return 0;
            }
            let _ = stderr.write_all(error_json("usage", e.to_string().trim()).as_bytes());
            return 2;
        }
    };
    configure_threads();
    let out = cli.out.clone();
    match execute(cli.command) {
        Ok(text) => {
            let written = match out {
                Some(path) => std::fs::write(&path, &text).map_err(|e| e.to_string()),
                None => stdout.write_all(text.as_bytes()).map_err(|e| e.to_string()),
            };
            match written {
                Ok(()) => 0,
                Err(msg) => {
                    let _ = stderr.write_all(error_json("io", &msg).as_bytes());
                    2
                }
            }
        }
        Err(e) => {
            let _ = stderr.write_all(error_json(e.kind(), &e.to_string()).as_bytes());
            e.exit_code()
        }
    }
}
