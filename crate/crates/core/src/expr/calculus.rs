use std::collections::HashMap;

use super::{Expr, ExprError, Func, Kind, Rational, Symbol, SymbolKind};

/// Differentiation and substitution with memoization over the shared DAG.
///
/// Caches are keyed by node identity; the key node is kept alive alongside
/// the result so identities are never reused while cached.
#[derive(Default)]
pub struct Calculus {
    derivatives: HashMap<(usize, Symbol), (Expr, Expr)>,
}

impl Calculus {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn diff(&mut self, e: &Expr, s: &Symbol) -> Expr {
        if !e.may_contain(s) {
            return Expr::zero();
        }
        let key = (e.node_id(), s.clone());
        if let Some((_, d)) = self.derivatives.get(&key) {
            return d.clone();
        }
        let d = match e.kind() {
            Kind::Const(_) => Expr::zero(),
            Kind::Symbol(t) => {
                if t == s {
                    Expr::one()
                } else {
                    Expr::zero()
                }
            }
            Kind::Add(ts) => Expr::add(ts.iter().map(|t| self.diff(t, s)).collect()),
            Kind::Mul(fs) => {
                let mut terms = Vec::new();
                for i in 0..fs.len() {
                    let di = self.diff(&fs[i], s);
                    if di.is_zero() {
                        continue;
                    }
                    let mut factors: Vec<Expr> = fs.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, f)| f.clone()).collect();
                    factors.push(di);
                    terms.push(Expr::mul(factors));
                }
                Expr::add(terms)
            }
            Kind::Pow(b, r) => {
                let db = self.diff(b, s);
                Expr::mul(vec![Expr::constant(*r), Expr::pow(b.clone(), *r - Rational::ONE), db])
            }
            Kind::Func(f, a) => {
                let da = self.diff(a, s);
                let outer = match f {
                    Func::Sin => a.cos(),
                    Func::Cos => -a.sin(),
                    Func::Exp => e.clone(),
                    Func::Ln => a.recip(),
                };
                outer * da
            }
        };
        self.derivatives.insert(key, (e.clone(), d.clone()));
        d
    }

    /// `d/dt` along a trajectory: chain rule through coordinates and
    /// velocities, producing accelerations.
    pub fn time_derivative(&mut self, e: &Expr) -> Result<Expr, ExprError> {
        let symbols = e.free_symbols();
        let mut terms = Vec::new();
        for s in symbols {
            let next = match s.kind() {
                SymbolKind::Coordinate => s.with_kind(SymbolKind::Velocity),
                SymbolKind::Velocity => s.with_kind(SymbolKind::Acceleration),
                SymbolKind::Acceleration => return Err(ExprError::OrderOverflow(s.name())),
                SymbolKind::Momentum => return Err(ExprError::NotVelocitySpace(s.name())),
                SymbolKind::Parameter => continue,
            };
            terms.push(self.diff(e, &s) * Expr::symbol(next));
        }
        Ok(Expr::add(terms))
    }
}

/// `∂e/∂s`.
pub fn differentiate(e: &Expr, s: &Symbol) -> Expr {
    Calculus::new().diff(e, s)
}

/// Total time derivative of an expression on velocity phase space.
pub fn total_time_derivative(e: &Expr) -> Result<Expr, ExprError> {
    Calculus::new().time_derivative(e)
}

/// Simultaneous substitution of symbols by expressions, memoized per instance.
pub struct Substitution {
    map: HashMap<Symbol, Expr>,
    mask: u128,
    cache: HashMap<usize, (Expr, Expr)>,
}

impl Substitution {
    pub fn new(map: HashMap<Symbol, Expr>) -> Self {
        let mask = map.keys().fold(0, |m, s| m | s.mask_bit());
        Substitution { map, mask, cache: HashMap::new() }
    }

    pub fn map(&self) -> &HashMap<Symbol, Expr> {
        &self.map
    }

    pub fn apply(&mut self, e: &Expr) -> Expr {
        if e.mask() & self.mask == 0 {
            return e.clone();
        }
        if let Some((_, r)) = self.cache.get(&e.node_id()) {
            return r.clone();
        }
        let r = match e.kind() {
            Kind::Const(_) => e.clone(),
            Kind::Symbol(s) => self.map.get(s).cloned().unwrap_or_else(|| e.clone()),
            Kind::Add(ts) => Expr::add(ts.iter().map(|t| self.apply(t)).collect()),
            Kind::Mul(fs) => Expr::mul(fs.iter().map(|f| self.apply(f)).collect()),
            Kind::Pow(b, r) => Expr::pow(self.apply(b), *r),
            Kind::Func(f, a) => Expr::apply(*f, self.apply(a)),
        };
        self.cache.insert(e.node_id(), (e.clone(), r.clone()));
        r
    }
}

/// Replaces every occurrence of the mapped symbols simultaneously.
pub fn substitute(e: &Expr, map: &HashMap<Symbol, Expr>) -> Expr {
    Substitution::new(map.clone()).apply(e)
}

/// Rebuilds an expression through the canonicalizing constructors.
pub fn simplify(e: &Expr) -> Expr {
    Substitution { map: HashMap::new(), mask: u128::MAX, cache: HashMap::new() }.apply(e)
}
