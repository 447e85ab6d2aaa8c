use std::collections::HashSet;

use super::{Constraint, ModelError, ModelSpec, StructureFunctions};
use crate::expr::{parse_expr, Coordinates, Expr, SymbolKind};

struct Line<'a> {
    number: usize,
    keyword: &'a str,
    rest: &'a str,
    rest_col: usize,
}

fn split_lines(text: &str) -> Vec<Line<'_>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let body = raw.split('#').next().unwrap_or("");
        let trimmed = body.trim_start();
        if trimmed.trim().is_empty() {
            continue;
        }
        let lead = body.len() - trimmed.len();
        let kw_len = trimmed.find(char::is_whitespace).unwrap_or(trimmed.len());
        let after = &trimmed[kw_len..];
        let rest = after.trim_start();
        let rest_col = lead + kw_len + (after.len() - rest.len()) + 1;
        out.push(Line { number: i + 1, keyword: &trimmed[..kw_len], rest: rest.trim_end(), rest_col });
    }
    out
}

fn syntax(line: &Line, column: usize, message: impl Into<String>) -> ModelError {
    ModelError::Syntax { line: line.number, column, message: message.into() }
}

/// Splits off `k` leading whitespace-separated words; returns them and the
/// remainder with its column.
fn words<'a>(line: &Line<'a>, k: usize) -> Result<(Vec<&'a str>, &'a str, usize), ModelError> {
    let mut rest = line.rest;
    let mut col = line.rest_col;
    let mut out = Vec::new();
    for _ in 0..k {
        let len = rest.find(char::is_whitespace).unwrap_or(rest.len());
        if len == 0 {
            return Err(syntax(line, col, format!("`{}` expects {k} leading field(s)", line.keyword)));
        }
        out.push(&rest[..len]);
        let after = &rest[len..];
        let trimmed = after.trim_start();
        col += len + (after.len() - trimmed.len());
        rest = trimmed;
    }
    Ok((out, rest, col))
}

fn integer(line: &Line, field: &str, col: usize) -> Result<usize, ModelError> {
    field.parse().map_err(|_| syntax(line, col, format!("expected a positive integer, found `{field}`")))
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    chars.next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_') && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

struct Ctx<'a> {
    coords: &'a Coordinates,
}

impl Ctx<'_> {
    fn expr(&self, line: &Line, src: &str, col: usize, section: &'static str, allowed: &[SymbolKind]) -> Result<Expr, ModelError> {
        if src.is_empty() {
            return Err(syntax(line, col, format!("`{}` expects an expression", line.keyword)));
        }
        let e = parse_expr(src, &|name| self.coords.lookup(name))
            .map_err(|e| syntax(line, col + e.column - 1, e.message))?;
        if let Some(bad) = e.free_symbols().into_iter().find(|s| !allowed.contains(&s.kind())) {
            return Err(ModelError::WrongSpace { line: line.number, section, symbol: bad.name() });
        }
        Ok(e)
    }
}

const QV: &[SymbolKind] = &[SymbolKind::Coordinate, SymbolKind::Velocity];
const QP: &[SymbolKind] = &[SymbolKind::Coordinate, SymbolKind::Momentum];

/// Parses a model description.
pub fn parse_model(text: &str) -> Result<ModelSpec, ModelError> {
    let lines = split_lines(text);
    let known = ["model", "dim", "gauge", "coords", "domain", "lagrangian", "constraint", "structure", "hamiltonian", "rebase"];
    let mut seen_once: HashSet<&str> = HashSet::new();
    for l in &lines {
        if !known.contains(&l.keyword) {
            return Err(syntax(l, l.rest_col.saturating_sub(l.keyword.len() + 1).max(1), format!("unknown keyword `{}`", l.keyword)));
        }
        if matches!(l.keyword, "model" | "dim" | "gauge" | "coords" | "lagrangian" | "hamiltonian") && !seen_once.insert(l.keyword) {
            return Err(syntax(l, 1, format!("duplicate `{}` line", l.keyword)));
        }
    }
    let find = |kw: &'static str| lines.iter().find(|l| l.keyword == kw).ok_or(ModelError::MissingSection(kw));
    let all = |kw: &'static str| lines.iter().filter(move |l| l.keyword == kw);

    let name_line = find("model")?;
    if name_line.rest.is_empty() {
        return Err(syntax(name_line, name_line.rest_col, "model name expected"));
    }
    let dim_line = find("dim")?;
    let n = integer(dim_line, dim_line.rest, dim_line.rest_col)?;
    let gauge_line = find("gauge")?;
    let m = integer(gauge_line, gauge_line.rest, gauge_line.rest_col)?;
    if m < 1 || m >= n {
        return Err(ModelError::Arity { line: gauge_line.number, message: format!("need 1 <= gauge < dim, got gauge {m}, dim {n}") });
    }
    let coords_line = find("coords")?;
    let names: Vec<&str> = coords_line.rest.split_whitespace().collect();
    if names.len() != n {
        return Err(ModelError::Arity { line: coords_line.number, message: format!("expected {n} coordinates, found {}", names.len()) });
    }
    if let Some(bad) = names.iter().find(|s| !is_identifier(s)) {
        return Err(syntax(coords_line, coords_line.rest_col, format!("invalid coordinate name `{bad}`")));
    }
    let coords = Coordinates::new(&names);
    let mut taken = HashSet::new();
    for kind in [SymbolKind::Coordinate, SymbolKind::Velocity, SymbolKind::Acceleration, SymbolKind::Momentum] {
        for s in coords.family(kind) {
            if !taken.insert(s.name()) || ["sqrt", "sin", "cos", "exp", "ln"].contains(&s.name().as_str()) {
                return Err(syntax(coords_line, coords_line.rest_col, format!("coordinate names produce a clashing symbol `{}`", s.name())));
            }
        }
    }
    let ctx = Ctx { coords: &coords };

    let mut domain = Vec::new();
    for l in all("domain") {
        let Some(gt) = l.rest.find('>') else {
            return Err(syntax(l, l.rest_col, "domain predicate must have the form `<expr> > <expr>`"));
        };
        let lhs = ctx.expr(l, l.rest[..gt].trim_end(), l.rest_col, "domain", QV)?;
        let rhs_src = &l.rest[gt + 1..];
        let rhs_col = l.rest_col + gt + 1 + (rhs_src.len() - rhs_src.trim_start().len());
        let rhs = ctx.expr(l, rhs_src.trim(), rhs_col, "domain", QV)?;
        domain.push(lhs - rhs);
    }

    let lag_line = find("lagrangian")?;
    let lagrangian = ctx.expr(lag_line, lag_line.rest, lag_line.rest_col, "lagrangian", QV)?;

    let mut constraints: Vec<Constraint> = Vec::new();
    for l in all("constraint") {
        let (w, src, col) = words(l, 1)?;
        if !is_identifier(w[0]) {
            return Err(syntax(l, l.rest_col, format!("invalid constraint name `{}`", w[0])));
        }
        if constraints.iter().any(|c| c.name == w[0]) {
            return Err(ModelError::DuplicateConstraint { line: l.number, name: w[0].to_string() });
        }
        let expr = ctx.expr(l, src, col, "constraint", QP)?;
        if !expr.mentions(SymbolKind::Momentum) {
            return Err(ModelError::Arity { line: l.number, message: format!("constraint `{}` must depend on a momentum", w[0]) });
        }
        constraints.push(Constraint { name: w[0].to_string(), expr });
    }
    if constraints.is_empty() {
        return Err(ModelError::MissingSection("constraint"));
    }
    if constraints.len() != m {
        let line = all("constraint").next_back().map_or(gauge_line.number, |l| l.number);
        return Err(ModelError::Arity { line, message: format!("gauge {m} requires {m} constraint lines, found {}", constraints.len()) });
    }

    let mut structure = StructureFunctions::zero(m);
    let mut given = HashSet::new();
    for l in all("structure") {
        let (w, src, col) = words(l, 3)?;
        let mut idx = [0usize; 3];
        for (k, f) in w.iter().enumerate() {
            idx[k] = integer(l, f, l.rest_col)?;
            if idx[k] < 1 || idx[k] > m {
                return Err(ModelError::Arity { line: l.number, message: format!("structure index {} outside 1..{m}", idx[k]) });
            }
        }
        let expr = ctx.expr(l, src, col, "structure", QP)?;
        let [a, b, c] = idx.map(|i| i - 1);
        if a == b {
            if expr.is_zero() {
                continue;
            }
            return Err(ModelError::Antisymmetry { line: l.number, message: "diagonal must vanish".into() });
        }
        if !given.insert((a.min(b), a.max(b), c)) {
            return Err(ModelError::Antisymmetry { line: l.number, message: format!("entry ({}, {}, {}) given twice", a.min(b) + 1, a.max(b) + 1, c + 1) });
        }
        structure.set(a, b, c, expr);
    }

    let ham_line = find("hamiltonian")?;
    let hamiltonian = ctx.expr(ham_line, ham_line.rest, ham_line.rest_col, "hamiltonian", QP)?;

    let mut rebase: Option<Vec<Vec<Expr>>> = None;
    for l in all("rebase") {
        let (w, src, col) = words(l, 2)?;
        let a = integer(l, w[0], l.rest_col)?;
        let b = integer(l, w[1], l.rest_col)?;
        if a < 1 || a > m || b < 1 || b > m {
            return Err(ModelError::Arity { line: l.number, message: format!("rebase index outside 1..{m}") });
        }
        let expr = ctx.expr(l, src, col, "rebase", QP)?;
        let lam = rebase.get_or_insert_with(|| {
            (0..m).map(|i| (0..m).map(|j| if i == j { Expr::one() } else { Expr::zero() }).collect()).collect()
        });
        lam[a - 1][b - 1] = expr;
    }

    Ok(ModelSpec {
        name: name_line.rest.to_string(),
        coords,
        lagrangian,
        constraints,
        structure,
        hamiltonian,
        domain,
        rebase,
    })
}
