use std::fmt::Write;

use super::ModelSpec;

pub(super) fn render(spec: &ModelSpec) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "model {}", spec.name);
    let _ = writeln!(s, "dim {}", spec.n());
    let _ = writeln!(s, "gauge {}", spec.m());
    let _ = writeln!(s, "coords {}", spec.coords.names().collect::<Vec<_>>().join(" "));
    for d in &spec.domain {
        let _ = writeln!(s, "domain {d} > 0");
    }
    let _ = writeln!(s, "lagrangian {}", spec.lagrangian);
    for c in &spec.constraints {
        let _ = writeln!(s, "constraint {} {}", c.name, c.expr);
    }
    for (a, b, c, e) in spec.structure.entries() {
        let _ = writeln!(s, "structure {} {} {} {e}", a + 1, b + 1, c + 1);
    }
    let _ = writeln!(s, "hamiltonian {}", spec.hamiltonian);
    if let Some(lam) = &spec.rebase {
        let before = s.len();
        for (i, row) in lam.iter().enumerate() {
            for (j, e) in row.iter().enumerate() {
                let identity = if i == j { e.is_one() } else { e.is_zero() };
                if !identity {
                    let _ = writeln!(s, "rebase {} {} {e}", i + 1, j + 1);
                }
            }
        }
        if s.len() == before {
            let _ = writeln!(s, "rebase 1 1 {}", lam[0][0]);
        }
    }
    s
}
