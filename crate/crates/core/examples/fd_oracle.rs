//! Finite-difference cross-checks, clean and with one corrupted entry.

use gsf::corpus;
use gsf::system::GaugeSystem;
use gsf::verify::{fd_oracle, fd_oracle_corrupted, oracle_families, Corruption};

fn main() -> gsf::Result<()> {
    let spec = corpus::load("triple-root-rebased");
    for c in fd_oracle(&spec, 42, 20)? {
        println!("{:<12} {:.2e}", c.id, c.max_residual);
    }

    let sys = GaugeSystem::new(&spec)?;
    let fam = oracle_families(&sys)?.into_iter().find(|f| f.name == "dC/dp").expect("family exists");
    let cor = Corruption::seeded(fam.name, fam.len(), 1e-3, 7);
    let flagged: Vec<String> = fd_oracle_corrupted(&spec, 42, 20, Some(&cor))?.into_iter().filter(|c| !c.passed).map(|c| c.id).collect();
    println!("corrupting {}[{}] flags {flagged:?}", cor.family, cor.entry);
    Ok(())
}
