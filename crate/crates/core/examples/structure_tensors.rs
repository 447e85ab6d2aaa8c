//! Lagrangian structure tensors of a rebased model, symbolic and numeric.

use gsf::corpus;
use gsf::model::sample_points;
use gsf::system::GaugeSystem;

fn main() -> gsf::Result<()> {
    let name = std::env::args().nth(1).unwrap_or_else(|| "double-root-rebased-q".into());
    let sys = GaugeSystem::new(&corpus::load(&name))?;
    let st = sys.structure_tensors()?;
    println!("T =\n{}", st.t);

    let ver = sys.verifier()?;
    for p in sample_points(&sys.spec, 3, 42)? {
        let v = ver.at(&p)?;
        println!("v = {:?}: max|T| {:.4}, max|E| {:.4}, max|D| {:.4}, max|M| {:.1e}", p.v, v.t.max_abs(), v.e.max_abs(), v.d.max_abs(), v.m.max_abs());
    }
    Ok(())
}
