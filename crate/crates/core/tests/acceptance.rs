//! Acceptance criteria 1 to 10, one verdict line each.
//!
//! Runs without the libtest harness so the verdict lines are always
//! printed. The process fails when a gating assertion fails.

mod common;

use std::time::Instant;

use common::at_velocity;
use gsf::corpus;
use gsf::expr::Expr;
use gsf::legendre::{kernel_alignment, PullbackMap};
use gsf::model::{parse_model, sample_points, ModelSpec, SamplePoint};
use gsf::structure::ambiguity_shift;
use gsf::system::GaugeSystem;
use gsf::tensor::{IndexedExpr, Role::Gauge as G};
use gsf::verify::{
    check_ids, fd_oracle, fd_oracle_corrupted, oracle_families, run_suite, run_suite_with, Corruption, FD_TOLERANCE,
};

const SEEDS: [u64; 3] = [1, 42, 2024];
const POINTS: usize = 100;
const TOL: f64 = 1e-8;
const RW_TOL: f64 = 1e-10;
const ANGLE_TOL: f64 = 1e-6;
const ZERO_TOL: f64 = 1e-12;
const SHIFT_TOL: f64 = 1e-9;
const MUTANT_FLOOR: f64 = 1e-3;
const CORRUPTION: f64 = 1e-3;
const CORRUPTION_POINTS: usize = 20;
const WITNESS_FLOOR: f64 = 1e-3;
const SEARCH_POINTS: usize = 20;
const BUDGET_SECS: f64 = 60.0;

const TOWER: [&str; 26] = [
    "1.23", "1.24", "1.25", "1.27", "1.30", "1.35", "1.37", "1.381", "1.382", "1.45", "2.8", "2.11", "2.15", "2.20", "2.21", "2.22", "2.23",
    "2.24", "2.26", "2.29", "2.30", "2.31", "2.44", "2.45", "2.47", "2.54=2.55",
];

/// `E_{12}^{ij}` of double-root-rebased-p at `q = 0, v = (1, 1, 4, 1)`.
const E12_REFERENCE: [f64; 16] = [
    0.0, 0.0, -0.09375, -0.0078125, //
    0.0, 0.0, 0.03125, 0.0234375, //
    0.09375, -0.03125, 0.0, 0.0, //
    0.0078125, -0.0234375, 0.0, 0.0,
];

/// What a criterion prints and whether its gating part held.
struct Verdict {
    passed: bool,
    detail: String,
    /// Part asserted even when the criterion as a whole is reported FAIL.
    gate: Result<(), String>,
}

impl Verdict {
    fn strict(passed: bool, detail: String) -> Self {
        let gate = if passed { Ok(()) } else { Err(detail.clone()) };
        Verdict { passed, detail, gate }
    }
}

type Criterion = (&'static str, fn() -> Verdict);

fn models() -> Vec<(&'static str, ModelSpec)> {
    corpus::models().map(|e| (e.name, e.spec().unwrap())).collect()
}

fn worst<I: IntoIterator<Item = f64>>(xs: I) -> f64 {
    xs.into_iter().fold(0.0, f64::max)
}

fn identity_tower() -> Verdict {
    let known: Vec<&str> = check_ids().collect();
    if let Some(id) = TOWER.iter().find(|id| !known.contains(id)) {
        return Verdict::strict(false, format!("check {id} is not implemented"));
    }
    let mut failures = Vec::new();
    let (mut max_id, mut max_fd, mut non_vacuous) = (0.0_f64, 0.0_f64, 0usize);
    for (name, spec) in models() {
        for seed in SEEDS {
            let r = run_suite(&spec, seed, POINTS, TOL).unwrap();
            for c in r.checks.iter().filter(|c| TOWER.contains(&c.id.as_str()) && !c.vacuous) {
                non_vacuous += 1;
                max_id = max_id.max(c.max_residual);
                if !c.passed || c.max_residual > TOL {
                    failures.push(format!("{name}/{seed}/{}={:.1e}", c.id, c.max_residual));
                }
            }
            for c in fd_oracle(&spec, seed, POINTS).unwrap() {
                max_fd = max_fd.max(c.max_residual);
                if !c.passed || c.max_residual > FD_TOLERANCE {
                    failures.push(format!("{name}/{seed}/{}={:.1e}", c.id, c.max_residual));
                }
            }
        }
    }
    Verdict::strict(
        failures.is_empty(),
        format!("{non_vacuous} non-vacuous results, max {max_id:.1e}, max fd {max_fd:.1e}; failures {failures:?}"),
    )
}

fn generator_correctness() -> Verdict {
    let (mut rw, mut angle) = (0.0_f64, 0.0_f64);
    for (_, spec) in models() {
        let pts = sample_points(&spec, POINTS, 42).unwrap();
        let ver = GaugeSystem::new(&spec).unwrap().verifier().unwrap();
        rw = rw.max(worst(pts.iter().map(|p| ver.at(p).unwrap().residual("1.6").unwrap().value)));
        angle = angle.max(kernel_alignment(&spec, &PullbackMap::from_spec(&spec), &pts).unwrap());
    }
    Verdict::strict(rw <= RW_TOL && angle <= ANGLE_TOL, format!("max R·W residual {rw:.1e}, max principal angle {angle:.1e}"))
}

fn magnitudes(name: &str) -> gsf::verify::Magnitudes {
    run_suite(&corpus::load(name), 42, POINTS, TOL).unwrap().tensor_magnitudes
}

fn closed_model_zeros() -> Verdict {
    let mut detail = Vec::new();
    let mut ok = true;
    for name in ["free-sqrt", "relativistic-particle", "double-root"] {
        let m = magnitudes(name);
        let top = m.t.max(m.e).max(m.d).max(m.m);
        ok &= top <= ZERO_TOL;
        detail.push(format!("{name} {top:.1e}"));
    }
    Verdict::strict(ok, format!("max |T|,|E|,|D|,|M|: {}", detail.join(", ")))
}

fn rebasing_witnesses() -> Verdict {
    let mut problems = Vec::new();

    let q = corpus::load("double-root-rebased-q");
    let sys = GaugeSystem::new(&q).unwrap();
    let ver = sys.verifier().unwrap();
    let t_unit = ver.at(&at_velocity(&[1.0; 4])).unwrap().t;
    let t_ok = (t_unit.at(&[0, 1, 1]) - 0.5).abs() <= 1e-15 && (t_unit.max_abs() - 0.5).abs() <= 1e-15;
    let pts = sample_points(&q, POINTS, 42).unwrap();
    let pulled = worst(pts.iter().map(|p| {
        let t = ver.at(p).unwrap().t.at(&[0, 1, 1]);
        (t - 0.5 * (p.v[2] / p.v[3]).sqrt()).abs()
    }));
    let rq = run_suite(&q, 42, POINTS, TOL).unwrap();
    let mq = rq.tensor_magnitudes;
    if !t_ok || pulled > 1e-13 {
        problems.push(format!("rebased-q T: unit point {t_unit:?}, pullback deviation {pulled:.1e}"));
    }
    if mq.e.max(mq.d).max(mq.m) > ZERO_TOL || !rq.passed {
        problems.push(format!("rebased-q E/D/M {mq:?}, passed {}", rq.passed));
    }

    let p = corpus::load("double-root-rebased-p");
    let sys = GaugeSystem::new(&p).unwrap();
    let st = sys.structure_tensors().unwrap();
    let e = sys.verifier().unwrap().at(&at_velocity(&[1.0, 1.0, 4.0, 1.0])).unwrap().e;
    let e12_dev = worst((0..16).map(|k| (e.at(&[0, 1, k / 4, k % 4]) - E12_REFERENCE[k]).abs()));
    let rp = run_suite(&p, 42, POINTS, TOL).unwrap();
    if !sys.phase.c.is_zero() || !st.t.is_zero() {
        problems.push("rebased-p C′ or T not identically zero".into());
    }
    if e.max_abs() <= 1e-3 || e12_dev > 1e-15 || !rp.passed {
        problems.push(format!("rebased-p max|E| {:.3e}, E12 deviation {e12_dev:.1e}, passed {}", e.max_abs(), rp.passed));
    }
    Verdict::strict(
        problems.is_empty(),
        format!(
            "rebased-q max|T| at unit v = {}, E/D/M ≤ {:.1e}; rebased-p C′ ≡ T ≡ 0, max|E| = {} at the reference point; {problems:?}",
            t_unit.max_abs(),
            mq.e.max(mq.d).max(mq.m),
            e.max_abs()
        ),
    )
}

fn vanishing_theorems() -> Verdict {
    let mut lines = Vec::new();
    let mut ok = true;
    for (name, spec) in models() {
        let sys = GaugeSystem::new(&spec).unwrap();
        let p_free = sys.phase.c.entries().iter().all(|c| !c.mentions(gsf::expr::SymbolKind::Momentum));
        if spec.m() > 2 && !p_free {
            continue;
        }
        let m = run_suite(&spec, 42, POINTS, TOL).unwrap().tensor_magnitudes;
        let top = if spec.m() <= 2 { m.d.max(m.m) } else { m.d };
        ok &= top <= ZERO_TOL;
        lines.push(format!("{name} {top:.1e}"));
    }
    Verdict::strict(ok, format!("max |D| (and |M| when m ≤ 2): {}", lines.join(", ")))
}

fn sign3(a: usize, b: usize, c: usize) -> i64 {
    if a == b || b == c || a == c {
        return 0;
    }
    let inversions = i64::from(a > b) + i64::from(a > c) + i64::from(b > c);
    if inversions % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Checks whose invariance under a shift is not implied by the shifted
/// tensors still solving the defining identities.
const UNGUARANTEED: [&str; 2] = ["2.54=2.55", "1.45"];

fn ambiguity_invariance() -> Verdict {
    let mut diffs = Vec::new();
    let mut broken = Vec::new();
    let mut moved = 0.0_f64;
    for (name, spec) in models().into_iter().filter(|(_, s)| s.m() >= 2) {
        let m = spec.m();
        let sys = GaugeSystem::new(&spec).unwrap();
        let st = sys.structure_tensors().unwrap();
        let e = IndexedExpr::from_fn(&[G, G, G, G], 0, m, |ix| {
            let s = match ix[0].cmp(&ix[1]) {
                std::cmp::Ordering::Less => 1,
                std::cmp::Ordering::Greater => -1,
                std::cmp::Ordering::Equal => 0,
            };
            Expr::int(s * (1 + ix[2] as i64 + 2 * ix[3] as i64))
        });
        let d = IndexedExpr::from_fn(&[G, G, G, G, G], 0, m, |ix| Expr::int(sign3(ix[0], ix[1], ix[2]) * (1 + ix[3] as i64 + 3 * ix[4] as i64)));
        let shifted = ambiguity_shift(&sys, &st, &e, &d).unwrap();
        let pts = sample_points(&spec, POINTS, 42).unwrap();
        let before = run_suite_with(&sys, &st, 42, &pts, TOL).unwrap();
        let after = run_suite_with(&sys, &shifted, 42, &pts, TOL).unwrap();
        let (vb, va) = (sys.verifier().unwrap(), gsf::verify::Verifier::new(&sys, &shifted).unwrap());
        for p in &pts {
            let (b, a) = (vb.at(p).unwrap(), va.at(p).unwrap());
            moved = moved.max(a.e.plus(&b.e.scale(-1.0)).max_abs()).max(a.d.plus(&b.d.scale(-1.0)).max_abs());
        }
        for (x, y) in before.checks.iter().zip(&after.checks) {
            let delta = (x.max_residual - y.max_residual).abs();
            if x.passed != y.passed || delta > SHIFT_TOL {
                let line = format!("{name} {}: {:.1e}→{:.1e}", x.id, x.max_residual, y.max_residual);
                if !UNGUARANTEED.contains(&x.id.as_str()) {
                    broken.push(line.clone());
                }
                diffs.push(line);
            }
        }
    }
    let gate = if broken.is_empty() && moved > 1e-3 {
        Ok(())
    } else {
        Err(format!("guaranteed identities moved: {broken:?}, max tensor shift {moved:.1e}"))
    };
    Verdict {
        passed: diffs.is_empty() && moved > 1e-3,
        detail: format!(
            "max E/D shift {moved:.2e}; verdict or residual changes {diffs:?}; every check outside {UNGUARANTEED:?} unchanged within {SHIFT_TOL:.0e}"
        ),
        gate,
    }
}

fn negative_controls() -> Verdict {
    let expect = [
        ("free-sqrt-badG", vec!["2.8"]),
        ("free-sqrt-symbreak", vec!["1.9", "1.10", "2.20", "2.23"]),
        ("double-root-rebased-q-badC", vec!["1.23", "2.24"]),
    ];
    let mut ok = true;
    let mut lines = Vec::new();
    for (name, ids) in expect {
        let r = run_suite(&corpus::load(name), 42, POINTS, TOL).unwrap();
        let failed: Vec<(&str, f64)> = r.failures().map(|c| (c.id.as_str(), c.max_residual)).collect();
        let named = ids.iter().all(|id| failed.iter().any(|(f, x)| f == id && *x > MUTANT_FLOOR));
        ok &= !r.passed && named;
        lines.push(format!("{name} fails {failed:?}"));
    }
    let bad_g = run_suite(&corpus::load("free-sqrt-badG"), 42, POINTS, TOL).unwrap().check("2.8").unwrap().max_residual;
    ok &= (bad_g - 0.05).abs() <= 1e-15;
    Verdict::strict(ok, format!("{}; badG 2.8 residual {bad_g}", lines.join("; ")))
}

fn oracle_agreement() -> Verdict {
    let mut problems = Vec::new();
    let (mut corrupted, mut detected) = (0usize, 0usize);
    for (name, spec) in models() {
        for c in fd_oracle(&spec, 42, POINTS).unwrap().iter().filter(|c| !c.passed) {
            problems.push(format!("{name} {} {:.1e}", c.id, c.max_residual));
        }
        let sys = GaugeSystem::new(&spec).unwrap();
        for (k, fam) in oracle_families(&sys).unwrap().iter().enumerate().filter(|(_, f)| !f.is_empty()) {
            let cor = Corruption::seeded(fam.name, fam.len(), CORRUPTION, k as u64);
            let checks = fd_oracle_corrupted(&spec, 42, CORRUPTION_POINTS, Some(&cor)).unwrap();
            corrupted += 1;
            let id = format!("fd:{}", fam.name);
            if checks.iter().any(|c| c.id == id && !c.passed) {
                detected += 1;
            } else {
                problems.push(format!("{name} {id}[{}] undetected", cor.entry));
            }
        }
    }
    Verdict::strict(problems.is_empty(), format!("oracle clean on the corpus; {detected}/{corrupted} single-entry corruptions detected; {problems:?}"))
}

fn determinism() -> Verdict {
    let suite = |spec: &ModelSpec| run_suite(spec, 42, POINTS, TOL).unwrap().to_json();
    let pool = |threads: usize| rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
    let (one, four) = (pool(1), pool(4));
    let mut differing = Vec::new();
    let start = Instant::now();
    let mut serial: Vec<String> = Vec::new();
    for (_, spec) in models() {
        serial.push(one.install(|| suite(&spec)));
    }
    let secs = start.elapsed().as_secs_f64();
    for ((name, spec), s1) in models().iter().zip(&serial) {
        if *s1 != suite(spec) || *s1 != four.install(|| suite(spec)) {
            differing.push(*name);
        }
    }
    Verdict::strict(
        differing.is_empty() && secs < BUDGET_SECS,
        format!("JSON byte-identical across runs and 1/4 threads (differing: {differing:?}); single-threaded corpus suite {secs:.1}s (budget {BUDGET_SECS}s)"),
    )
}

/// Unit upper-triangular `Λ` with `(1,2)` and `(2,3)` entries drawn from
/// a small monomial family.
fn witness_search() -> Verdict {
    let base = corpus::find("triple-root").unwrap().source;
    let upper = ["0", "q3", "p5", "q3*p5", "q3*p6"];
    let lower = ["0", "q5", "p1", "q5*p1", "q5*p2"];
    let mut best: (f64, String) = (0.0, String::new());
    let mut nonzero = 0usize;
    let mut tried = 0usize;
    for a in upper {
        for b in lower {
            let mut src = base.replace("model triple-root", "model triple-root-ansatz");
            for (row, col, entry) in [(1, 2, a), (2, 3, b)] {
                if entry != "0" {
                    src.push_str(&format!("rebase {row} {col} {entry}\n"));
                }
            }
            let spec = parse_model(&src).unwrap();
            let sys = GaugeSystem::new(&spec).unwrap();
            let st = sys.structure_tensors().unwrap();
            tried += 1;
            if st.d.is_zero() {
                continue;
            }
            let ver = sys.verifier().unwrap();
            let pts: Vec<SamplePoint> = sample_points(&spec, SEARCH_POINTS, 42).unwrap();
            let d = worst(pts.iter().map(|p| ver.at(p).unwrap().d.max_abs()));
            if d > WITNESS_FLOOR {
                nonzero += 1;
            }
            if d > best.0 {
                best = (d, format!("Λ12 = {a}, Λ23 = {b}"));
            }
        }
    }
    let witness = corpus::load("triple-root-rebased");
    let r = run_suite(&witness, 42, POINTS, TOL).unwrap();
    let gate = if r.passed { Ok(()) } else { Err(format!("witness suite fails: {:?}", r.failures().collect::<Vec<_>>())) };
    Verdict {
        passed: r.passed && r.tensor_magnitudes.d > WITNESS_FLOOR,
        detail: format!(
            "{nonzero}/{tried} ansätze give max|D| > {WITNESS_FLOOR:.0e} over {SEARCH_POINTS} points, largest {:.2} at {}; corpus witness max|D| {:.2}, M {:.1e}, suite passed {}",
            best.0, best.1, r.tensor_magnitudes.d, r.tensor_magnitudes.m, r.passed
        ),
        gate,
    }
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("identity tower", identity_tower),
        ("generator correctness", generator_correctness),
        ("closed-model zeros", closed_model_zeros),
        ("rebasing witnesses", rebasing_witnesses),
        ("vanishing theorems", vanishing_theorems),
        ("ambiguity invariance", ambiguity_invariance),
        ("negative controls", negative_controls),
        ("oracle agreement", oracle_agreement),
        ("determinism", determinism),
        ("witness search (non-gating)", witness_search),
    ];
    let mut gate_failures = Vec::new();
    for (k, (label, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let v = run();
        let status = if v.passed { "PASS" } else { "FAIL" };
        println!("criterion {:>2} {status} {label} ({:.1}s): {}", k + 1, start.elapsed().as_secs_f64(), v.detail);
        if let Err(e) = v.gate {
            gate_failures.push(format!("criterion {}: {e}", k + 1));
        }
    }
    if !gate_failures.is_empty() {
        eprintln!("gating failures:\n{}", gate_failures.join("\n"));
        std::process::exit(1);
    }
}
