//! Parse, differentiate, simplify and evaluate a jet-space expression.

use gsf::expr::{differentiate, evaluate, parse_expr, simplify, total_time_derivative, Bindings, Coordinates};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let c = Coordinates::new(&["q1", "q2"]);
    let lag = parse_expr("sqrt(v1*v2) + q1^2*v2", &|n| c.lookup(n))?;
    let p1 = differentiate(&lag, &c.v(0));
    println!("L      = {lag}");
    println!("∂L/∂v1 = {p1}");
    println!("d/dt   = {}", total_time_derivative(&p1)?);
    println!("simplified (q1+q1)*q1 - 2*q1^2 = {}", simplify(&parse_expr("(q1+q1)*q1 - 2*q1^2", &|n| c.lookup(n))?));

    let at = Bindings::new().with(c.q(0), 0.5).with(c.v(0), 4.0).with(c.v(1), 1.0);
    println!("∂L/∂v1 at q1 = 0.5, v = (4, 1): {}", evaluate(&p1, &at)?);
    Ok(())
}
