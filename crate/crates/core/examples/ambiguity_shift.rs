//! Shift E by an antisymmetric e and watch the second-order identity hold.

use gsf::corpus;
use gsf::expr::Expr;
use gsf::model::sample_points;
use gsf::structure::ambiguity_shift;
use gsf::system::GaugeSystem;
use gsf::tensor::{IndexedExpr, Role::Gauge as G};
use gsf::verify::Verifier;

fn main() -> gsf::Result<()> {
    let sys = GaugeSystem::new(&corpus::load("double-root-rebased-p"))?;
    let st = sys.structure_tensors()?;
    let e = IndexedExpr::from_fn(&[G, G, G, G], 0, 2, |ix| match (ix[0], ix[1]) {
        (0, 1) => Expr::int(1 + ix[2] as i64),
        (1, 0) => Expr::int(-1 - ix[2] as i64),
        _ => Expr::zero(),
    });
    let d = IndexedExpr::zeros(&[G, G, G, G, G], 0, 2);
    let shifted = ambiguity_shift(&sys, &st, &e, &d)?;
    let (before, after) = (sys.verifier()?, Verifier::new(&sys, &shifted)?);
    for p in sample_points(&sys.spec, 3, 42)? {
        let (b, a) = (before.at(&p)?, after.at(&p)?);
        println!(
            "max|E| {:.4} -> {:.4}, 1.24 residual {:.1e} -> {:.1e}",
            b.e.max_abs(),
            a.e.max_abs(),
            b.residual("1.24")?.value,
            a.residual("1.24")?.value
        );
    }
    Ok(())
}
