//! The `gsf` command line: `check`, `compute`, `oracle` and `corpus`.
//!
//! Exit codes are 0 when everything passes, 1 when a check fails and 2 for
//! usage, parse and validation errors.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::corpus::{self, Magnitude};
use crate::error::{Error, Result};
use crate::expr::SymbolKind;
use crate::model::{parse_model, sample_points, validate_model, ModelSpec, SamplePoint, ValidationReport};
use crate::system::GaugeSystem;
use crate::tensor::{IndexedExpr, NumTensor};
use crate::verify::{fd_oracle, run_suite, CheckResult, SuiteReport};

pub const EXIT_PASS: u8 = 0;
pub const EXIT_FAIL: u8 = 1;
pub const EXIT_USAGE: u8 = 2;

#[derive(Debug, Parser)]
#[command(name = "gsf", version, about = "Lagrangian gauge structure tensors and their identity checks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate a model, run every identity check and the finite-difference oracle.
    Check(ModelArgs),
    /// Print one tensor, symbolically or at `--point`.
    Compute(ComputeArgs),
    /// Run only the finite-difference oracle.
    Oracle(ModelArgs),
    /// List the bundled models, or check all of them.
    Corpus(CorpusArgs),
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Number of sample points.
    #[arg(long, default_value_t = 100)]
    pub samples: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Residual tolerance for the identity checks.
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Also write the JSON report to this path.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ModelArgs {
    /// Model file, or the name of a bundled model.
    pub model: PathBuf,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args)]
pub struct ComputeArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, value_enum, ignore_case = true)]
    pub tensor: TensorName,
    /// Comma-separated `q`, then `q̇`, then optionally `q̈`.
    #[arg(long, allow_hyphen_values = true)]
    pub point: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct CorpusArgs {
    /// Check every bundled model and confirm every mutant is caught.
    #[arg(long)]
    pub verify_all: bool,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "verbatim")]
pub enum TensorName {
    W,
    R,
    T,
    E,
    D,
    M,
    A,
    /// The third-order `B` tensor.
    B,
    /// Structure functions of the constraint algebra.
    C,
}

impl TensorName {
    fn label(self) -> &'static str {
        match self {
            TensorName::W => "W",
            TensorName::R => "R",
            TensorName::T => "T",
            TensorName::E => "E",
            TensorName::D => "D",
            TensorName::M => "M",
            TensorName::A => "A",
            TensorName::B => "B",
            TensorName::C => "C",
        }
    }
}

/// Captured output of one command.
#[derive(Debug, Default)]
pub struct Output {
    pub stdout: String,
    pub stderr: String,
    pub code: u8,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, S>(args: I) -> Output
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => dispatch(&cli),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
            let text = e.render().to_string();
            if code == EXIT_PASS {
                Output { stdout: text, ..Output::default() }
            } else {
                Output { stderr: text, code, ..Output::default() }
            }
        }
    }
}

pub fn dispatch(cli: &Cli) -> Output {
    let mut out = Output::default();
    let result = match &cli.command {
        Command::Check(a) => cmd_check(a, &mut out),
        Command::Compute(a) => cmd_compute(a, &mut out),
        Command::Oracle(a) => cmd_oracle(a, &mut out),
        Command::Corpus(a) => cmd_corpus(a, &mut out),
    };
    match result {
        Ok(code) => out.code = code,
        Err(e) => {
            let _ = writeln!(out.stderr, "error: {e}");
            out.code = EXIT_USAGE;
        }
    }
    out
}

fn validate_common(c: &Common) -> Result<()> {
    if c.samples == 0 {
        return Err(Error::Invalid("--samples must be positive".into()));
    }
    if !(c.tol.is_finite() && c.tol > 0.0) {
        return Err(Error::Invalid(format!("--tol must be a positive number, got {}", c.tol)));
    }
    Ok(())
}

/// Reads a model file; a path that does not exist but names a bundled
/// model loads the bundled copy.
pub fn load_model(path: &Path) -> Result<ModelSpec> {
    match std::fs::read_to_string(path) {
        Ok(text) => Ok(parse_model(&text)?),
        Err(e) => match path.to_str().and_then(corpus::find) {
            Some(entry) => entry.spec(),
            None => Err(Error::Invalid(format!("cannot read {}: {e}", path.display()))),
        },
    }
}

fn write_report(path: &Option<PathBuf>, json: &str) -> Result<()> {
    if let Some(p) = path {
        std::fs::write(p, json).map_err(|e| Error::Invalid(format!("cannot write {}: {e}", p.display())))?;
    }
    Ok(())
}

/// Everything `check` computes for one model.
#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub validation: ValidationReport,
    /// Identity checks followed by the `fd:` oracle checks.
    pub report: SuiteReport,
}

impl CheckOutcome {
    /// Every validation check and every identity and oracle check pass.
    pub fn passed(&self) -> bool {
        self.validation.passed && self.report.checks.iter().all(|c| c.passed)
    }
}

/// Runs validation, the identity suite and the oracle. Structurally
/// unsound models are an error.
pub fn check_model(spec: &ModelSpec, common: &Common) -> Result<CheckOutcome> {
    let points = sample_points(spec, common.samples, common.seed)?;
    let validation = validate_model(spec, &points)?;
    if !validation.structurally_sound() {
        let bad: Vec<String> =
            validation.checks.iter().filter(|c| !c.passed).map(|c| format!("{} ({:.3e})", c.name, c.worst)).collect();
        return Err(Error::Invalid(format!("model `{}` fails validation: {}", spec.name, bad.join(", "))));
    }
    let mut report = run_suite(spec, common.seed, common.samples, common.tol)?;
    report.checks.extend(fd_oracle(spec, common.seed, common.samples)?);
    let mut o = CheckOutcome { validation, report };
    o.report.passed = o.passed();
    Ok(o)
}

fn status(c: &CheckResult) -> &'static str {
    match (c.passed, c.vacuous) {
        (true, true) => "vacuous",
        (true, false) => "pass",
        (false, _) => "FAIL",
    }
}

fn render_checks(text: &mut String, checks: &[CheckResult]) {
    for c in checks {
        let _ = writeln!(text, "  {:<14} {:>10.3e}  {}", c.id, c.max_residual, status(c));
    }
}

fn render_outcome(o: &CheckOutcome) -> String {
    let r = &o.report;
    let mut s = String::new();
    let _ = writeln!(s, "model {}  seed {}  points {}  tol {:e}", r.model, r.seed, r.points, r.tolerance);
    let _ = writeln!(s, "validation");
    for c in &o.validation.checks {
        let _ = writeln!(s, "  {:<14} {:>10.3e}  {}", c.name, c.worst, if c.passed { "pass" } else { "FAIL" });
    }
    let (fd, ids): (Vec<CheckResult>, Vec<CheckResult>) = r.checks.iter().cloned().partition(|c| c.id.starts_with("fd:"));
    let _ = writeln!(s, "identities");
    render_checks(&mut s, &ids);
    let _ = writeln!(s, "oracle");
    render_checks(&mut s, &fd);
    let m = r.tensor_magnitudes;
    let _ = writeln!(s, "max |T| {:.3e}  |E| {:.3e}  |D| {:.3e}  |M| {:.3e}", m.t, m.e, m.d, m.m);
    let _ = writeln!(s, "{}", if o.passed() { "PASS" } else { "FAIL" });
    s
}

fn cmd_check(a: &ModelArgs, out: &mut Output) -> Result<u8> {
    validate_common(&a.common)?;
    let spec = load_model(&a.model)?;
    let o = check_model(&spec, &a.common)?;
    let json = o.report.to_json();
    write_report(&a.common.report, &json)?;
    out.stdout = match a.common.format {
        Format::Text => render_outcome(&o),
        Format::Json => json + "\n",
    };
    Ok(if o.passed() { EXIT_PASS } else { EXIT_FAIL })
}

fn cmd_oracle(a: &ModelArgs, out: &mut Output) -> Result<u8> {
    validate_common(&a.common)?;
    let spec = load_model(&a.model)?;
    let checks = fd_oracle(&spec, a.common.seed, a.common.samples)?;
    let passed = checks.iter().all(|c| c.passed);
    let json = serde_json::to_string_pretty(&json!({
        "model": spec.name,
        "seed": a.common.seed,
        "points": a.common.samples,
        "checks": checks,
        "passed": passed,
    }))
    .expect("oracle report serializes");
    write_report(&a.common.report, &json)?;
    out.stdout = match a.common.format {
        Format::Text => {
            let mut s = format!("model {}  seed {}  points {}\n", spec.name, a.common.seed, a.common.samples);
            render_checks(&mut s, &checks);
            s + if passed { "PASS\n" } else { "FAIL\n" }
        }
        Format::Json => json + "\n",
    };
    Ok(if passed { EXIT_PASS } else { EXIT_FAIL })
}

/// Splits `--point` into a jet point. A missing `q̈` block becomes zeros.
pub fn parse_point(text: &str, n: usize) -> Result<(SamplePoint, bool)> {
    let values: Vec<f64> = text
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|e| Error::Invalid(format!("--point entry `{}`: {e}", t.trim()))))
        .collect::<Result<_>>()?;
    let has_acc = match values.len() {
        k if k == 3 * n => true,
        k if k == 2 * n => false,
        k => return Err(Error::Invalid(format!("--point has {k} values, expected {} (q, q̇) or {} (q, q̇, q̈)", 2 * n, 3 * n))),
    };
    let a = if has_acc { values[2 * n..].to_vec() } else { vec![0.0; n] };
    Ok((SamplePoint { q: values[..n].to_vec(), v: values[n..2 * n].to_vec(), a }, has_acc))
}

fn symbolic_tensor(sys: &GaugeSystem, which: TensorName) -> Result<IndexedExpr> {
    let st = || sys.structure_tensors();
    Ok(match which {
        TensorName::W => sys.lag.hessian.clone(),
        TensorName::R => sys.pulled.r.clone(),
        TensorName::C => sys.phase.c.clone(),
        TensorName::T => st()?.t,
        TensorName::E => st()?.e,
        TensorName::D => st()?.d,
        TensorName::M => st()?.m,
        TensorName::A => st()?.a,
        TensorName::B => st()?.bten,
    })
}

fn numeric_tensor(sys: &GaugeSystem, which: TensorName, p: &SamplePoint) -> Result<NumTensor> {
    let ver = sys.verifier()?;
    let vals = ver.at(p)?;
    Ok(match which {
        TensorName::W => vals.w,
        TensorName::R => vals.r,
        TensorName::T => vals.t,
        TensorName::E => vals.e,
        TensorName::D => vals.d,
        TensorName::M => vals.m,
        TensorName::A => vals.a,
        TensorName::B => vals.bten,
        TensorName::C => ver.at_phase(&p.q, &vals.momenta.data)?.c,
    })
}

fn nested(t: &NumTensor) -> Value {
    fn go(shape: &[usize], data: &[f64]) -> Value {
        match shape.split_first() {
            None => json!(data[0]),
            Some((&k, rest)) => {
                let stride = rest.iter().product::<usize>();
                Value::Array((0..k).map(|i| go(rest, &data[i * stride..(i + 1) * stride])).collect())
            }
        }
    }
    go(&t.shape, &t.data)
}

fn cmd_compute(a: &ComputeArgs, out: &mut Output) -> Result<u8> {
    validate_common(&a.model.common)?;
    let spec = load_model(&a.model.model)?;
    let n = spec.n();
    let point = a.point.as_deref().map(|t| parse_point(t, n)).transpose()?;
    let sys = GaugeSystem::new(&spec)?;
    let sym = symbolic_tensor(&sys, a.tensor)?;
    let label = a.tensor.label();
    let json = match point {
        None => {
            let mut entries = Vec::new();
            sym.for_each(|ix, e| {
                if !e.is_zero() {
                    entries.push(json!({ "index": ix.iter().map(|i| i + 1).collect::<Vec<_>>(), "expr": e.to_string() }));
                }
            });
            out.stdout = match a.model.common.format {
                Format::Text => format!("{label} of {}\n{sym}", spec.name),
                Format::Json => String::new(),
            };
            json!({ "model": spec.name, "tensor": label, "shape": sym.shape(), "entries": entries })
        }
        Some((p, has_acc)) => {
            if !spec.contains(&p.q, &p.v) {
                return Err(Error::Invalid(format!("--point lies outside the domain of `{}`", spec.name)));
            }
            if !has_acc && sym.entries().iter().any(|e| e.mentions(SymbolKind::Acceleration)) {
                let _ = writeln!(out.stderr, "warning: {label} depends on accelerations; using q̈ = 0");
            }
            let t = numeric_tensor(&sys, a.tensor, &p)?;
            if a.model.common.format == Format::Text {
                let mut s = format!("{label} of {} at q = {:?}, v = {:?}, a = {:?}\n", spec.name, p.q, p.v, p.a);
                sym.for_each(|ix, _| {
                    let label: String = ix.iter().map(|i| format!("[{}]", i + 1)).collect();
                    let _ = writeln!(s, "{}{label} = {}", a.tensor.label(), t.at(ix));
                });
                out.stdout = s;
            }
            json!({ "model": spec.name, "tensor": label, "point": { "q": p.q, "v": p.v, "a": p.a }, "shape": t.shape, "values": nested(&t) })
        }
    };
    let json = serde_json::to_string_pretty(&json).expect("tensor serializes");
    write_report(&a.model.common.report, &json)?;
    if a.model.common.format == Format::Json {
        out.stdout = json + "\n";
    }
    Ok(EXIT_PASS)
}

/// Outcome of checking one bundled entry under `corpus --verify-all`.
#[derive(Debug, Clone)]
pub struct CorpusVerdict {
    pub name: &'static str,
    pub mutant: bool,
    pub passed: bool,
    /// Measured magnitude classes match the table, for models.
    pub magnitudes_match: bool,
    pub failing: Vec<String>,
}

impl CorpusVerdict {
    /// Models pass with the expected magnitudes; mutants are caught.
    pub fn ok(&self) -> bool {
        if self.mutant {
            !self.passed
        } else {
            self.passed && self.magnitudes_match
        }
    }
}

pub fn verify_corpus(common: &Common) -> Result<Vec<CorpusVerdict>> {
    corpus::CORPUS
        .iter()
        .map(|entry| {
            let spec = entry.spec()?;
            let o = check_model(&spec, common)?;
            let m = o.report.tensor_magnitudes;
            let magnitudes_match = entry.expected.is_none_or(|x| {
                [(x.t, m.t), (x.e, m.e), (x.d, m.d), (x.m, m.m)].iter().all(|&(want, got)| Magnitude::classify(got) == want)
            });
            let mut failing: Vec<String> = o.validation.checks.iter().filter(|c| !c.passed).map(|c| c.name.to_string()).collect();
            failing.extend(o.report.checks.iter().filter(|c| !c.passed).map(|c| c.id.clone()));
            Ok(CorpusVerdict { name: entry.name, mutant: entry.mutant, passed: o.passed(), magnitudes_match, failing })
        })
        .collect()
}

fn cmd_corpus(a: &CorpusArgs, out: &mut Output) -> Result<u8> {
    validate_common(&a.common)?;
    if !a.verify_all {
        let mut s = format!("{:<28} {:>2} {:>2}  T E D M\n", "model", "n", "m");
        let mut rows = Vec::new();
        for entry in corpus::CORPUS {
            let spec = entry.spec()?;
            let classes = entry.expected.map_or_else(
                || "mutant".to_string(),
                |x| [x.t, x.e, x.d, x.m].iter().map(|c| c.symbol()).collect::<Vec<_>>().join(" "),
            );
            let _ = writeln!(s, "{:<28} {:>2} {:>2}  {classes}", entry.name, spec.n(), spec.m());
            rows.push(json!({ "name": entry.name, "path": entry.path, "n": spec.n(), "m": spec.m(), "mutant": entry.mutant, "expected": entry.expected }));
        }
        let json = serde_json::to_string_pretty(&rows).expect("corpus serializes");
        write_report(&a.common.report, &json)?;
        out.stdout = if a.common.format == Format::Json { json + "\n" } else { s };
        return Ok(EXIT_PASS);
    }
    let verdicts = verify_corpus(&a.common)?;
    let all_ok = verdicts.iter().all(CorpusVerdict::ok);
    let rows: Vec<Value> = verdicts
        .iter()
        .map(|v| json!({ "name": v.name, "mutant": v.mutant, "passed": v.passed, "magnitudes_match": v.magnitudes_match, "failing": v.failing, "ok": v.ok() }))
        .collect();
    let json = serde_json::to_string_pretty(&rows).expect("corpus serializes");
    write_report(&a.common.report, &json)?;
    out.stdout = match a.common.format {
        Format::Json => json + "\n",
        Format::Text => {
            let mut s = String::new();
            for v in &verdicts {
                let what = match (v.mutant, v.passed) {
                    (true, false) => format!("caught: {}", v.failing.join(", ")),
                    (true, true) => "NOT CAUGHT".to_string(),
                    (false, true) if v.magnitudes_match => "pass".to_string(),
                    (false, true) => "pass, magnitudes differ from table".to_string(),
                    (false, false) => format!("FAIL: {}", v.failing.join(", ")),
                };
                let _ = writeln!(s, "{:<28} {what}", v.name);
            }
            s + if all_ok { "ALL OK\n" } else { "FAIL\n" }
        }
    };
    Ok(if all_ok { EXIT_PASS } else { EXIT_FAIL })
}
