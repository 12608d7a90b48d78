use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

use sigexpand::coeff_ring::rat;
use sigexpand::generator_ops::ProcessSpec;
use sigexpand::signature_moments::{Atom, LevyAtomMeasure};
use sigexpand::word_algebra::AlphabetConfig;

fn sigexpand(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sigexpand")).args(args).output().expect("binary runs")
}

fn json(bytes: &[u8]) -> Value {
    serde_json::from_slice(bytes).unwrap_or_else(|e| panic!("not JSON ({e}): {}", String::from_utf8_lossy(bytes)))
}

fn write_spec(dir: &Path, name: &str, spec: &ProcessSpec) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, serde_json::to_string_pretty(&spec.to_json()).unwrap()).unwrap();
    path
}

fn second_order_spec() -> ProcessSpec {
    let mut s = ProcessSpec::new(AlphabetConfig::continuous(3), 3);
    s.set_symbolic(&[&[1], &[0, 1], &[1, 1], &[2, 1], &[0, 0], &[1, 0], &[2, 0], &[3, 0], &[1, 1, 1]]);
    s
}

fn jump_spec(atoms: usize) -> ProcessSpec {
    let cfg = AlphabetConfig::new(1, 1, 2).unwrap();
    let mut s = ProcessSpec::new(cfg, 10);
    s.set_numeric(&[1], 0.2);
    s.set_numeric(&[1, 1], -0.1);
    s.set(sigexpand::word_algebra::Word::from([-1]), sigexpand::coeff_ring::Poly::ratio(1, 10));
    let w = rat(1, atoms as i64);
    let atoms = (0..atoms).map(|k| Atom { xi: 0.5 + k as f64 / 8.0, w: w.clone() }).collect();
    s.levy.push(LevyAtomMeasure::new(1, rat(2, 1), atoms).unwrap());
    s
}

#[test]
fn star_and_barstar() {
    let out = sigexpand(&["star", "--left", "[1,1]", "--right", "[1,1]"]);
    assert!(out.status.success());
    assert_eq!(json(&out.stdout)["text"], "(0,0) + 2(0,1,1) + 2(1,0,1) + 2(1,1,0) + 6(1,1,1,1)");
    let out = sigexpand(&["barstar", "--left", "[-1]", "--right", "[-1]"]);
    assert_eq!(json(&out.stdout)["text"], "(-2) + 2(-1,-1)");
}

#[test]
fn charfun_json_latex_and_render_roundtrip() {
    let dir = TempDir::new().unwrap();
    let spec = write_spec(dir.path(), "spec.json", &second_order_spec());
    let spec = spec.to_str().unwrap();

    let out = sigexpand(&["charfun", "--spec", spec, "--order", "2"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let doc = json(&out.stdout);
    assert_eq!(doc["remainder"], "o(t)");
    assert_eq!(doc["terms"].as_array().unwrap().len(), 3);

    let latex = sigexpand(&["charfun", "--spec", spec, "--order", "2", "--format", "latex"]);
    let latex = String::from_utf8(latex.stdout).unwrap();
    assert!(latex.starts_with("e^{-\\frac{u^2}{2}}"), "{latex}");
    assert!(latex.contains("c_{111}"));

    let saved = dir.path().join("cf.json");
    std::fs::write(&saved, &out.stdout).unwrap();
    let again = sigexpand(&["render", "--input", saved.to_str().unwrap(), "--format", "json"]);
    assert!(again.status.success());
    assert_eq!(json(&again.stdout), doc);
}

#[test]
fn output_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let spec = write_spec(dir.path(), "spec.json", &second_order_spec());
    let args = ["charfun", "--spec", spec.to_str().unwrap(), "--order", "2"];
    assert_eq!(sigexpand(&args).stdout, sigexpand(&args).stdout);
}

#[test]
fn moment_routes_agree() {
    let dir = TempDir::new().unwrap();
    let mut s = ProcessSpec::new(AlphabetConfig::continuous(1), 2);
    s.set_symbolic(&[&[1]]);
    let spec = write_spec(dir.path(), "bm.json", &s);
    let spec = spec.to_str().unwrap();
    let g = json(&sigexpand(&["moment", "--spec", spec, "--f", "exp_iu_square", "--order", "1"]).stdout);
    let st = json(&sigexpand(&["moment", "--spec", spec, "--f", "exp_iu_square", "--order", "2", "--route", "star"]).stdout);
    assert_eq!(g["terms"], st["terms"]);
    assert_eq!(g["terms"].as_array().unwrap().len(), 2);

    let k = json(&sigexpand(&["kmoment", "--spec", spec, "--k", "2", "--order", "1"]).stdout);
    assert_eq!(k["terms"][0]["t_pow"], "1");
}

#[test]
fn jump_charfun_and_out_flag() {
    let dir = TempDir::new().unwrap();
    let spec = write_spec(dir.path(), "jump.json", &jump_spec(2));
    let target = dir.path().join("out.json");
    let out = sigexpand(&["jumpcharfun", "--spec", spec.to_str().unwrap(), "--out", target.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(out.stdout.is_empty());
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(target).unwrap()).unwrap();
    assert!(doc["prefactor"].as_str().unwrap().starts_with("exp(-u^2/2"));
    assert!(!doc["jump_extra"].as_array().unwrap().is_empty());
}

#[test]
fn verify_writes_report_and_csv() {
    let dir = TempDir::new().unwrap();
    let mut s = ProcessSpec::new(AlphabetConfig::continuous(2), 3);
    s.set_numeric(&[1], 0.2);
    s.set_numeric(&[1, 1], -0.1);
    let spec = write_spec(dir.path(), "spec.json", &s);
    let csv = dir.path().join("grid.csv");
    let out = sigexpand(&[
        "verify", "--spec", spec.to_str().unwrap(), "--order", "2", "--t", "0.01,0.005", "--u", "1",
        "--paths", "10000", "--steps", "500", "--seed", "3", "--csv", csv.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report = json(&out.stdout);
    assert_eq!(report["points"].as_array().unwrap().len(), 2);
    assert_eq!(std::fs::read_to_string(csv).unwrap().lines().count(), 3);
}

#[test]
fn errors_are_json_with_exit_codes() {
    let out = sigexpand(&["charfun", "--spec", "/nonexistent.json", "--order", "2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(json(&out.stderr)["error"]["message"].as_str().unwrap().contains("nonexistent"));

    let out = sigexpand(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out.stderr)["error"]["kind"], "usage");

    let dir = TempDir::new().unwrap();
    let spec = write_spec(dir.path(), "big.json", &jump_spec(60));
    let out = sigexpand(&["moment", "--spec", spec.to_str().unwrap(), "--f", "x^2", "--order", "5"]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(json(&out.stderr)["error"]["kind"], "resource");

    let out = sigexpand(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
}
