//! Hessian, α, B field and the Noether identities of a bundled model.

use gsf::corpus;
use gsf::lagrange::{alpha, b_field, hessian, noether_check};
use gsf::legendre::{gauge_generators, PullbackMap};
use gsf::model::sample_points;

fn main() -> gsf::Result<()> {
    let spec = corpus::load("charged-sqrt");
    println!("W =\n{}", hessian(&spec));
    println!("α =\n{}", alpha(&spec));
    println!("B =\n{}", b_field(&spec));

    let r = gauge_generators(&spec, &PullbackMap::from_spec(&spec));
    let res = noether_check(&spec, &r, &sample_points(&spec, 100, 42)?)?;
    println!("Noether residuals: {res:?}");
    Ok(())
}
