//! Constraint brackets and a change of constraint basis.

use gsf::corpus;
use gsf::expr::{parse_expr, Expr};
use gsf::hamilton::{poisson_bracket, rebase_symbolic, BracketTable};

fn main() -> gsf::Result<()> {
    let spec = corpus::load("double-root");
    let parse = |s: &str| parse_expr(s, &|n| spec.coords.lookup(n)).expect("valid expression");
    println!("{{q1, p1 p2}} = {}", poisson_bracket(&parse("q1"), &parse("p1*p2")));

    let lambda: Vec<Vec<Expr>> = vec![vec![parse("1"), parse("q3")], vec![parse("0"), parse("1")]];
    let rebased = rebase_symbolic(&spec, &lambda)?;
    for c in &rebased.constraints {
        println!("{} = {}", c.name, c.expr);
    }
    let table = BracketTable::new(&rebased.constraint_exprs());
    println!("{{G1, G2}} = {}", table.get(0, 1));
    for (a, b, c) in [(0, 1, 0), (0, 1, 1)] {
        println!("C′_{}{}^{} = {}", a + 1, b + 1, c + 1, rebased.structure.get(a, b, c));
    }
    Ok(())
}
