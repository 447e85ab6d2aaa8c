//! Pull constraints back to velocity space and solve for the multipliers.

use gsf::corpus;
use gsf::expr::Expr;
use gsf::legendre::{gauge_generators, multipliers, pullback, PullbackMap};
use gsf::model::sample_points;

fn main() -> gsf::Result<()> {
    let spec = corpus::load("relativistic-particle");
    let pm = PullbackMap::from_spec(&spec);
    for i in 0..spec.n() {
        println!("FL*p{} = {}", i + 1, pullback(&Expr::symbol(spec.coords.p(i)), &pm));
    }
    println!("FL*G  = {}", pullback(&spec.constraints[0].expr, &pm));
    println!("R =\n{}", gauge_generators(&spec, &pm));

    for fit in multipliers(&spec, &pm, &sample_points(&spec, 3, 42)?)? {
        println!("λ = {:?}, fit residual {:.1e}", fit.lambda, fit.fit_residual);
    }
    Ok(())
}
