//! Load a model file, validate it and draw seeded sample points.

use gsf::model::{parse_model, sample_points, validate_model};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args().nth(1).unwrap_or_else(|| "corpus/double-root.gsf".into());
    let spec = parse_model(&std::fs::read_to_string(&path)?)?;
    println!("{}: n = {}, m = {}", spec.name, spec.n(), spec.m());

    let points = sample_points(&spec, 100, 42)?;
    let report = validate_model(&spec, &points)?;
    for c in &report.checks {
        println!("  {:<16} {:>10.3e} {}", c.name, c.worst, if c.passed { "ok" } else { "FAIL" });
    }
    println!("first point: q = {:?}, v = {:?}", points[0].q, points[0].v);
    Ok(())
}
