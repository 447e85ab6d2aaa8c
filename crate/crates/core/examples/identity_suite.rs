//! Run the identity suite on a bundled model and print the JSON report.

use gsf::corpus;
use gsf::verify::run_suite;

fn main() -> gsf::Result<()> {
    let name = std::env::args().nth(1).unwrap_or_else(|| "triple-root-rebased".into());
    let report = run_suite(&corpus::load(&name), 42, 100, 1e-8)?;
    for c in &report.checks {
        let tag = match (c.passed, c.vacuous) {
            (false, _) => "FAIL",
            (true, true) => "vacuous",
            (true, false) => "pass",
        };
        eprintln!("{:<10} {:>10.2e} {tag}", c.id, c.max_residual);
    }
    println!("{}", report.to_json());
    Ok(())
}
