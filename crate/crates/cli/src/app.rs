//! Command surface: argument model, dispatch, exit codes.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use num_traits::Zero;
use serde_json::{json, Value};
use trop_refine::driver::{g1_detailed, grafted_curves};
use trop_refine::lattice::{DegreeSpec, Parity};
use trop_refine::menelaus::{lambda_and_menelaus, InitialOptions};
use trop_refine::oracle::{g0, g1_oracle_detailed};
use trop_refine::orientkit::{
    analyze, enumerate_kits, quantum_index, rational_multiplicity, refined_multiplicity_closed, refined_multiplicity_sum,
    welschinger_sign,
};
use trop_refine::tropcurve::{curve_parity, genus_and_simplicity, CurveParity};
use trop_refine::{Error, LaurentPoly, ParamTropicalCurve};

use crate::dto::{parse_curves, parse_degree, poly_to_json, CurveDto, DegreeDto};
use crate::svg::{render_curve, render_subdivision};

#[derive(Parser, Debug)]
#[command(name = "trop-refine", version, about = "Refined tropical invariants G0 and G1 as Laurent polynomials in q^(1/2)")]
pub struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Cycle,
    Oracle,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Rational invariant of an even degree.
    G0 {
        /// JSON file, or inline JSON `{"vectors": [[x,y],...]}`.
        #[arg(long)]
        degree: String,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Not accepted: G0 has no parity.
        #[arg(long, hide = true)]
        parity: Option<String>,
    },
    /// Elliptic invariant of an even degree and a parity.
    G1 {
        #[arg(long)]
        degree: String,
        /// `a,b` with a, b in {0,1}.
        #[arg(long)]
        parity: Option<String>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Method::Cycle)]
        method: Method,
        /// Sector of the x0 region (cycle method); seeded when absent.
        #[arg(long)]
        k_component: Option<usize>,
        #[arg(long)]
        allow_non_admissible: bool,
        /// Write the summed curves as a JSON array.
        #[arg(long)]
        curves_out: Option<PathBuf>,
    },
    /// Refined multiplicity of each curve in a curve file.
    Mult {
        #[arg(long)]
        curve: PathBuf,
        /// Needed only when it cannot be read off the odd edges.
        #[arg(long)]
        parity: Option<String>,
    },
    /// Cross-validation suite on one instance.
    Check {
        #[arg(long)]
        degree: String,
        #[arg(long)]
        parity: Option<String>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Oracle comparison is skipped above this many ends.
        #[arg(long, default_value_t = 7)]
        oracle_max_ends: usize,
        #[arg(long)]
        allow_non_admissible: bool,
    },
    /// SVG of a curve or of its dual subdivision.
    Render {
        #[arg(long)]
        curve: PathBuf,
        /// Which curve of an array file.
        #[arg(long, default_value_t = 0)]
        index: usize,
        #[arg(long)]
        subdivision: bool,
        #[arg(long)]
        parity: Option<String>,
        #[arg(long)]
        out: PathBuf,
    },
}

/// A failed job. The diagnostic goes to stderr as one JSON line.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Failure {
    pub code: u8,
    pub kind: String,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Failure { code: 2, kind: "Usage".into(), message: message.into() }
    }

    fn io(path: &Path, e: std::io::Error) -> Self {
        Failure { code: 1, kind: "Io".into(), message: format!("{}: {e}", path.display()) }
    }

    pub fn diagnostic(&self) -> String {
        json!({"error": {"kind": self.kind, "message": self.message, "exit": self.code}}).to_string()
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let kind = format!("{e:?}").split('(').next().unwrap_or("Error").to_string();
        let code = if e.is_internal() {
            3
        } else {
            match e {
                Error::InvalidVector
                | Error::NotBalanced
                | Error::Degenerate
                | Error::NotEven
                | Error::InvalidPolygon(_)
                | Error::Parse(_)
                | Error::InvalidCurve(_)
                | Error::NotSimple
                | Error::NotElliptic
                | Error::NoParity
                | Error::NotAdmissible
                | Error::EmptyVSet => 2,
                _ => 1,
            }
        };
        Failure { code, kind, message: e.to_string() }
    }
}

/// Successful or check-failing run: what to print and the exit code.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Output {
    pub stdout: String,
    pub code: u8,
}

impl Output {
    fn ok(stdout: String) -> Self {
        Output { stdout, code: 0 }
    }
}

pub fn parse_parity(s: &str) -> Result<Parity, Failure> {
    let bad = || Failure::from(Error::Parse(format!("parity must be `a,b` with a, b in {{0,1}}, got {s:?}")));
    let (a, b) = s.split_once(',').ok_or_else(bad)?;
    let bit = |t: &str| match t.trim() {
        "0" => Ok(0u8),
        "1" => Ok(1u8),
        _ => Err(bad()),
    };
    Ok((bit(a)?, bit(b)?))
}

fn need_parity(p: &Option<String>) -> Result<Parity, Failure> {
    match p {
        Some(s) => parse_parity(s),
        None => Err(Failure::usage("--parity is required")),
    }
}

/// A file path, or inline JSON when the argument starts with `{`.
fn load_degree(src: &str, require_even: bool) -> Result<DegreeSpec, Failure> {
    let text = if src.trim_start().starts_with('{') {
        src.to_string()
    } else {
        let p = Path::new(src);
        fs::read_to_string(p).map_err(|e| Failure::io(p, e))?
    };
    Ok(parse_degree(&text)?.to_spec(require_even)?)
}

fn load_curves(path: &Path) -> Result<Vec<ParamTropicalCurve>, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::io(path, e))?;
    let dtos = parse_curves(&text)?;
    Ok(dtos.iter().map(CurveDto::to_curve).collect::<Result<_, _>>()?)
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::io(path, e))
}

fn curves_json(curves: &[ParamTropicalCurve]) -> String {
    let v: Vec<CurveDto> = curves.iter().map(CurveDto::from_curve).collect();
    serde_json::to_string_pretty(&v).expect("curve serialization") + "\n"
}

fn parity_json(p: Parity) -> Value {
    json!([p.0, p.1])
}

pub fn run(cli: &Cli) -> Result<Output, Failure> {
    match &cli.command {
        Command::G0 { degree, seed, parity } => {
            if parity.is_some() {
                return Err(Failure::usage("g0 takes no parity"));
            }
            let d = load_degree(degree, true)?;
            let value = g0(&d, *seed)?;
            Ok(Output::ok(match cli.format {
                Format::Text => format!("{value}\n"),
                Format::Json => {
                    json!({"command": "g0", "degree": DegreeDto::from_spec(&d), "seed": seed, "value": poly_to_json(&value)})
                        .to_string()
                        + "\n"
                }
            }))
        }
        Command::G1 { degree, parity, seed, method, k_component, allow_non_admissible, curves_out } => {
            let parity = need_parity(parity)?;
            let d = load_degree(degree, true)?;
            let (value, curves, extra) = match method {
                Method::Cycle => {
                    let opts = InitialOptions { k_component: *k_component, allow_non_admissible: *allow_non_admissible };
                    let r = g1_detailed(&d, parity, *seed, &opts)?;
                    let curves = match curves_out {
                        Some(_) => grafted_curves(&r)?.into_iter().map(|g| g.curve).collect(),
                        None => Vec::new(),
                    };
                    let extra = json!({"contributions": r.contributions.len(), "effective_seed": r.effective_seed});
                    (r.value, curves, extra)
                }
                Method::Oracle => {
                    let r = g1_oracle_detailed(&d, parity, *seed, *allow_non_admissible)?;
                    let extra = json!({"curves": r.curves.len()});
                    (r.value, r.curves, extra)
                }
            };
            if let Some(p) = curves_out {
                write_file(p, &curves_json(&curves))?;
            }
            Ok(Output::ok(match cli.format {
                Format::Text => format!("{value}\n"),
                Format::Json => {
                    let method = match method {
                        Method::Cycle => "cycle",
                        Method::Oracle => "oracle",
                    };
                    json!({
                        "command": "g1",
                        "degree": DegreeDto::from_spec(&d),
                        "parity": parity_json(parity),
                        "seed": seed,
                        "method": method,
                        "value": poly_to_json(&value),
                        "details": extra,
                    })
                    .to_string()
                        + "\n"
                }
            }))
        }
        Command::Mult { curve, parity } => {
            let given = parity.as_deref().map(parse_parity).transpose()?;
            let curves = load_curves(curve)?;
            let mut rows = Vec::new();
            for t in &curves {
                rows.push(multiplicity(t, given)?);
            }
            Ok(Output::ok(match cli.format {
                Format::Text => rows.iter().map(|(_, _, m)| format!("{m}\n")).collect(),
                Format::Json => {
                    let v: Vec<Value> = rows
                        .iter()
                        .enumerate()
                        .map(|(i, (g, p, m))| {
                            json!({"index": i, "genus": g, "parity": p.map(parity_json), "multiplicity": poly_to_json(m)})
                        })
                        .collect();
                    Value::Array(v).to_string() + "\n"
                }
            }))
        }
        Command::Check { degree, parity, seed, oracle_max_ends, allow_non_admissible } => {
            let parity = need_parity(parity)?;
            let d = load_degree(degree, true)?;
            let lines = check_suite(&d, parity, *seed, *oracle_max_ends, *allow_non_admissible)?;
            let passed = lines.iter().all(|l| l.ok != Some(false));
            let stdout = match cli.format {
                Format::Text => {
                    let mut s: String = lines
                        .iter()
                        .map(|l| {
                            let tag = match l.ok {
                                Some(true) => "ok  ",
                                Some(false) => "FAIL",
                                None => "skip",
                            };
                            format!("{tag} {}: {}\n", l.name, l.detail)
                        })
                        .collect();
                    s.push_str(if passed { "check: passed\n" } else { "check: failed\n" });
                    s
                }
                Format::Json => {
                    let v: Vec<Value> = lines
                        .iter()
                        .map(|l| json!({"name": l.name, "status": match l.ok { Some(true) => "ok", Some(false) => "fail", None => "skip" }, "detail": l.detail}))
                        .collect();
                    json!({"command": "check", "passed": passed, "checks": v}).to_string() + "\n"
                }
            };
            Ok(Output { stdout, code: if passed { 0 } else { 3 } })
        }
        Command::Render { curve, index, subdivision, parity, out } => {
            let given = parity.as_deref().map(parse_parity).transpose()?;
            let curves = load_curves(curve)?;
            let t = curves
                .get(*index)
                .ok_or_else(|| Failure::usage(format!("index {index} out of range ({} curves)", curves.len())))?;
            let svg = if *subdivision {
                let p = given.or(match curve_parity(t) {
                    CurveParity::Parity(p) => Some(p),
                    _ => None,
                });
                render_subdivision(t, p)?
            } else {
                render_curve(t)
            };
            write_file(out, &svg)?;
            Ok(Output::ok(match cli.format {
                Format::Text => format!("{}\n", out.display()),
                Format::Json => json!({"command": "render", "out": out.display().to_string()}).to_string() + "\n",
            }))
        }
    }
}

type MultRow = (i64, Option<Parity>, LaurentPoly);

/// Genus 0: product of triangle factors. Genus 1: closed form, checked
/// against the sum over orientation kits.
fn multiplicity(t: &ParamTropicalCurve, given: Option<Parity>) -> Result<MultRow, Failure> {
    let (genus, simple) = genus_and_simplicity(t);
    if !simple {
        return Err(Error::NotSimple.into());
    }
    match genus {
        0 => Ok((0, None, rational_multiplicity(t)?)),
        1 => {
            let p = match (given, curve_parity(t)) {
                (Some(p), _) => p,
                (None, CurveParity::Parity(p)) => p,
                _ => return Err(Failure::usage("curve has no odd edges; pass --parity")),
            };
            let a = analyze(t, p, None)?;
            let closed = refined_multiplicity_closed(&a);
            if refined_multiplicity_sum(t, &a)? != closed {
                return Err(Error::InternalInconsistency("kit sum differs from closed form".into()).into());
            }
            Ok((1, Some(p), closed))
        }
        _ => Err(Error::NotElliptic.into()),
    }
}

pub struct CheckLine {
    pub name: &'static str,
    pub ok: Option<bool>,
    pub detail: String,
}

fn line(name: &'static str, ok: bool, detail: String) -> CheckLine {
    CheckLine { name, ok: Some(ok), detail }
}

#[derive(Default)]
struct KitTally {
    curves: usize,
    kits: usize,
    sign_bad: usize,
    cong_bad: usize,
    mult_bad: usize,
}

fn tally_kits(curves: &[ParamTropicalCurve], parity: Parity, doubled_area: i64, t: &mut KitTally) -> Result<(), Failure> {
    for c in curves {
        t.curves += 1;
        let a = analyze(c, parity, None)?;
        for k in enumerate_kits(&a) {
            t.kits += 1;
            let (formula, count) = welschinger_sign(c, &a, &k)?;
            if formula != count {
                t.sign_bad += 1;
            }
            if (doubled_area - quantum_index(&a, &k)).rem_euclid(8) != 0 {
                t.cong_bad += 1;
            }
        }
        if refined_multiplicity_sum(c, &a)? != refined_multiplicity_closed(&a) {
            t.mult_bad += 1;
        }
    }
    Ok(())
}

fn check_suite(
    d: &DegreeSpec,
    parity: Parity,
    seed: u64,
    oracle_max_ends: usize,
    allow_non_admissible: bool,
) -> Result<Vec<CheckLine>, Failure> {
    let mut out = Vec::new();
    let opts = InitialOptions { k_component: None, allow_non_admissible };
    let report = g1_detailed(d, parity, seed, &opts)?;
    let value = report.value.clone();
    out.push(line("cycle", true, format!("{value} from {} contributions", report.contributions.len())));

    let (_, sigma) = lambda_and_menelaus(&report.data.lines);
    out.push(line("menelaus", sigma.is_zero(), format!("sum of line values {sigma}")));

    out.push(line(
        "congruence",
        value.exponents_congruent(d.doubled_area()),
        format!("exponents against doubled area {}", d.doubled_area()),
    ));

    let grafted = grafted_curves(&report)?;
    let mut total = LaurentPoly::zero();
    let mut product_bad = 0;
    for g in &grafted {
        total = total.clone() + g.product.clone();
        let a = analyze(&g.curve, parity, None)?;
        if refined_multiplicity_closed(&a) != g.product {
            product_bad += 1;
        }
    }
    out.push(line(
        "grafting",
        total == value && product_bad == 0,
        format!("{} grafted curves, {product_bad} product mismatches, sum {}", grafted.len(), if total == value { "matches" } else { "differs" }),
    ));

    let mut tally = KitTally::default();
    let curves: Vec<ParamTropicalCurve> = grafted.into_iter().map(|g| g.curve).collect();
    tally_kits(&curves, parity, d.doubled_area(), &mut tally)?;

    let other = g1_detailed(d, parity, seed.wrapping_add(1), &opts)?.value;
    out.push(line("seed", other == value, format!("seed {} gives {other}", seed.wrapping_add(1))));

    if d.len() <= oracle_max_ends {
        let o = g1_oracle_detailed(d, parity, seed, allow_non_admissible)?;
        tally_kits(&o.curves, parity, d.doubled_area(), &mut tally)?;
        out.push(line("oracle", o.value == value, format!("{} from {} curves", o.value, o.curves.len())));
    } else {
        out.push(CheckLine { name: "oracle", ok: None, detail: format!("{} ends > {oracle_max_ends}", d.len()) });
    }

    out.push(line(
        "signs",
        tally.sign_bad == 0,
        format!("{} kits on {} curves, {} disagreements", tally.kits, tally.curves, tally.sign_bad),
    ));
    out.push(line("kit congruence", tally.cong_bad == 0, format!("{} violations", tally.cong_bad)));
    out.push(line("sum vs closed", tally.mult_bad == 0, format!("{} mismatches", tally.mult_bad)));
    Ok(out)
}

/// Caps the worker pool from TROP_REFINE_THREADS.
pub fn configure_threads() -> Result<(), Failure> {
    let Ok(v) = std::env::var("TROP_REFINE_THREADS") else {
        return Ok(());
    };
    let n: usize = match v.trim().parse() {
        Ok(n) if n > 0 => n,
        _ => return Err(Failure::usage(format!("TROP_REFINE_THREADS must be a positive integer, got {v:?}"))),
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure { code: 1, kind: "ThreadPool".into(), message: e.to_string() })
}
