use std::cmp::Ordering;
use std::collections::HashMap;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use super::{Rational, Symbol, SymbolKind};

/// Elementary functions carried as explicit nodes. Square roots are
/// represented as powers with exponent 1/2.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Ln,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Ln => "ln",
        }
    }
}

/// The shape of one expression node.
#[derive(Clone)]
pub enum Kind {
    Const(Rational),
    Symbol(Symbol),
    Add(Box<[Expr]>),
    Mul(Box<[Expr]>),
    Pow(Expr, Rational),
    Func(Func, Expr),
}

pub(crate) struct Node {
    kind: Kind,
    hash: u64,
    mask: u128,
}

/// Immutable, shared symbolic expression.
///
/// Every constructor returns a simplified canonical form: sums and products
/// are flattened, constants folded, like terms and like bases merged and
/// operands ordered deterministically. Cloning is a reference-count bump.
#[derive(Clone)]
pub struct Expr(Arc<Node>);

fn mix(a: u64, b: u64) -> u64 {
    let mut z = a ^ b.wrapping_add(0x9e37_79b9_7f4a_7c15).wrapping_add(a << 6).wrapping_add(a >> 2);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn hash_rational(r: &Rational) -> u64 {
    mix(r.numer() as u64, (r.numer() >> 64) as u64 ^ (r.denom() as u64).rotate_left(32))
}

fn hash_symbol(s: &Symbol) -> u64 {
    let stem = s.stem().bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x100_0000_01b3));
    mix(mix(s.kind() as u64 + 11, s.index() as u64), stem)
}

impl Expr {
    fn raw(kind: Kind) -> Expr {
        let (hash, mask) = match &kind {
            Kind::Const(c) => (mix(1, hash_rational(c)), 0),
            Kind::Symbol(s) => (mix(2, hash_symbol(s)), s.mask_bit()),
            Kind::Add(ts) => ts.iter().fold((3u64, 0u128), |(h, m), t| (mix(h, t.0.hash), m | t.0.mask)),
            Kind::Mul(fs) => fs.iter().fold((4u64, 0u128), |(h, m), f| (mix(h, f.0.hash), m | f.0.mask)),
            Kind::Pow(b, r) => (mix(mix(5, b.0.hash), hash_rational(r)), b.0.mask),
            Kind::Func(f, a) => (mix(mix(6, *f as u64), a.0.hash), a.0.mask),
        };
        Expr(Arc::new(Node { kind, hash, mask }))
    }

    pub fn kind(&self) -> &Kind {
        &self.0.kind
    }

    pub fn structural_hash(&self) -> u64 {
        self.0.hash
    }

    pub(crate) fn node_id(&self) -> usize {
        Arc::as_ptr(&self.0) as usize
    }

    pub fn ptr_eq(&self, other: &Expr) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }

    pub(crate) fn mask(&self) -> u128 {
        self.0.mask
    }

    /// Distinct symbols occurring in the expression, in canonical order.
    pub fn free_symbols(&self) -> std::collections::BTreeSet<Symbol> {
        let mut out = std::collections::BTreeSet::new();
        let mut seen = std::collections::HashSet::new();
        let mut stack = vec![self.clone()];
        while let Some(e) = stack.pop() {
            if !seen.insert(e.node_id()) {
                continue;
            }
            match e.kind() {
                Kind::Const(_) => {}
                Kind::Symbol(s) => {
                    out.insert(s.clone());
                }
                Kind::Add(xs) | Kind::Mul(xs) => stack.extend(xs.iter().cloned()),
                Kind::Pow(b, _) | Kind::Func(_, b) => stack.push(b.clone()),
            }
        }
        out
    }

    /// Conservative test: `false` means the symbol certainly does not occur.
    pub fn may_contain(&self, s: &Symbol) -> bool {
        self.0.mask & s.mask_bit() != 0
    }

    /// Whether any symbol of the given family occurs.
    pub fn mentions(&self, kind: SymbolKind) -> bool {
        self.0.mask & Symbol::kind_mask(kind) != 0
    }

    pub fn constant(c: Rational) -> Expr {
        Expr::raw(Kind::Const(c))
    }

    pub fn int(n: i64) -> Expr {
        Expr::constant(Rational::from(n))
    }

    pub fn rational(numer: i64, denom: i64) -> Expr {
        Expr::constant(Rational::new(numer as i128, denom as i128))
    }

    pub fn zero() -> Expr {
        Expr::int(0)
    }

    pub fn one() -> Expr {
        Expr::int(1)
    }

    pub fn symbol(s: Symbol) -> Expr {
        Expr::raw(Kind::Symbol(s))
    }

    pub fn as_const(&self) -> Option<Rational> {
        match self.kind() {
            Kind::Const(c) => Some(*c),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.as_const().is_some_and(|c| c.is_zero())
    }

    pub fn is_one(&self) -> bool {
        self.as_const().is_some_and(|c| c.is_one())
    }

    /// Canonical sum.
    pub fn add(terms: Vec<Expr>) -> Expr {
        let mut constant = Rational::ZERO;
        let mut coeffs: HashMap<Expr, Rational> = HashMap::new();
        let mut stack = terms;
        while let Some(t) = stack.pop() {
            match t.kind() {
                Kind::Const(c) => constant = constant + *c,
                Kind::Add(children) => stack.extend(children.iter().cloned()),
                Kind::Mul(fs) if fs[0].as_const().is_some() => {
                    let c = fs[0].as_const().unwrap();
                    if fs.len() == 2 {
                        if let Kind::Add(children) = fs[1].kind() {
                            for child in children.iter() {
                                stack.push(Expr::mul(vec![Expr::constant(c), child.clone()]));
                            }
                            continue;
                        }
                    }
                    let rest = if fs.len() == 2 { fs[1].clone() } else { Expr::raw(Kind::Mul(fs[1..].into())) };
                    let e = coeffs.entry(rest).or_insert(Rational::ZERO);
                    *e = *e + c;
                }
                _ => {
                    let e = coeffs.entry(t).or_insert(Rational::ZERO);
                    *e = *e + Rational::ONE;
                }
            }
        }
        let mut entries: Vec<(Expr, Rational)> = coeffs.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        entries.sort_by(|a, b| a.0.cmp(&b.0));
        let mut out: Vec<Expr> = Vec::with_capacity(entries.len() + 1);
        if !constant.is_zero() {
            out.push(Expr::constant(constant));
        }
        out.extend(entries.into_iter().map(|(rest, c)| rest.scaled_raw(c)));
        match out.len() {
            0 => Expr::zero(),
            1 => out.pop().unwrap(),
            _ => Expr::raw(Kind::Add(out.into())),
        }
    }

    fn scaled_raw_any(self, c: Rational) -> Expr {
        match self.kind() {
            Kind::Const(k) => Expr::constant(*k * c),
            Kind::Mul(fs) if fs[0].as_const().is_some() => {
                let k = fs[0].as_const().unwrap() * c;
                if k.is_one() && fs.len() == 2 {
                    return fs[1].clone();
                }
                let mut v: Vec<Expr> = fs.to_vec();
                if k.is_one() {
                    v.remove(0);
                } else {
                    v[0] = Expr::constant(k);
                }
                Expr::raw(Kind::Mul(v.into()))
            }
            _ => self.scaled_raw(c),
        }
    }

    fn scaled_raw(self, c: Rational) -> Expr {
        if c.is_one() {
            return self;
        }
        let mut fs = vec![Expr::constant(c)];
        match self.kind() {
            Kind::Mul(inner) => fs.extend(inner.iter().cloned()),
            _ => fs.push(self),
        }
        Expr::raw(Kind::Mul(fs.into()))
    }

    /// Canonical product.
    pub fn mul(factors: Vec<Expr>) -> Expr {
        let mut pending = factors;
        loop {
            let mut constant = Rational::ONE;
            let mut exps: HashMap<Expr, Rational> = HashMap::new();
            let mut stack = std::mem::take(&mut pending);
            while let Some(f) = stack.pop() {
                match f.kind() {
                    Kind::Const(c) => constant = constant * *c,
                    Kind::Mul(fs) => stack.extend(fs.iter().cloned()),
                    Kind::Pow(b, r) => {
                        let e = exps.entry(b.clone()).or_insert(Rational::ZERO);
                        *e = *e + *r;
                    }
                    _ => {
                        let e = exps.entry(f).or_insert(Rational::ZERO);
                        *e = *e + Rational::ONE;
                    }
                }
            }
            if constant.is_zero() {
                return Expr::zero();
            }
            let mut bases: Vec<(Expr, Rational)> = exps.into_iter().filter(|(_, r)| !r.is_zero()).collect();
            bases.sort_by(|a, b| a.0.cmp(&b.0));
            let mut out = Vec::with_capacity(bases.len() + 1);
            let mut again = false;
            for (b, r) in bases {
                let p = Expr::pow(b, r);
                match p.kind() {
                    Kind::Const(c) => constant = constant * *c,
                    Kind::Mul(_) => {
                        again = true;
                        out.push(p);
                    }
                    _ => out.push(p),
                }
            }
            if again {
                out.push(Expr::constant(constant));
                pending = out;
                continue;
            }
            if constant.is_zero() {
                return Expr::zero();
            }
            out.sort();
            if out.len() == 1 && !constant.is_one() {
                if let Kind::Add(ts) = out[0].kind() {
                    return Expr::add(ts.iter().map(|t| t.clone().scaled_raw_any(constant)).collect());
                }
            }
            if !constant.is_one() {
                out.insert(0, Expr::constant(constant));
            }
            return match out.len() {
                0 => Expr::constant(constant),
                1 => out.pop().unwrap(),
                _ => Expr::raw(Kind::Mul(out.into())),
            };
        }
    }

    /// Canonical power with a rational exponent.
    pub fn pow(base: Expr, r: Rational) -> Expr {
        if r.is_zero() {
            return Expr::one();
        }
        if r.is_one() {
            return base;
        }
        match base.kind() {
            Kind::Const(c) => {
                if c.is_one() {
                    return Expr::one();
                }
                if r.is_integer() {
                    if let Some(v) = c.checked_powi(r.numer() as i64) {
                        return Expr::constant(v);
                    }
                } else if r.denom() == 2 {
                    if let Some(v) = c.exact_sqrt().and_then(|s| s.checked_powi(r.numer() as i64)) {
                        return Expr::constant(v);
                    }
                }
                Expr::raw(Kind::Pow(base.clone(), r))
            }
            Kind::Pow(inner, s) if r.is_integer() => Expr::pow(inner.clone(), *s * r),
            Kind::Mul(fs) if r.is_integer() => Expr::mul(fs.iter().map(|f| Expr::pow(f.clone(), r)).collect()),
            _ => Expr::raw(Kind::Pow(base, r)),
        }
    }

    pub fn powi(&self, k: i64) -> Expr {
        Expr::pow(self.clone(), Rational::from(k))
    }

    pub fn sqrt(&self) -> Expr {
        Expr::pow(self.clone(), Rational::HALF)
    }

    pub fn recip(&self) -> Expr {
        self.powi(-1)
    }

    pub fn apply(f: Func, arg: Expr) -> Expr {
        if let Some(c) = arg.as_const() {
            match f {
                Func::Sin if c.is_zero() => return Expr::zero(),
                Func::Cos | Func::Exp if c.is_zero() => return Expr::one(),
                Func::Ln if c.is_one() => return Expr::zero(),
                _ => {}
            }
        }
        Expr::raw(Kind::Func(f, arg))
    }

    pub fn sin(&self) -> Expr {
        Expr::apply(Func::Sin, self.clone())
    }

    pub fn cos(&self) -> Expr {
        Expr::apply(Func::Cos, self.clone())
    }

    pub fn exp(&self) -> Expr {
        Expr::apply(Func::Exp, self.clone())
    }

    pub fn ln(&self) -> Expr {
        Expr::apply(Func::Ln, self.clone())
    }

    pub fn scale(&self, c: Rational) -> Expr {
        Expr::mul(vec![Expr::constant(c), self.clone()])
    }

    fn rank(&self) -> u8 {
        match self.kind() {
            Kind::Const(_) => 0,
            Kind::Symbol(_) => 1,
            Kind::Func(..) => 2,
            Kind::Pow(..) => 3,
            Kind::Mul(_) => 4,
            Kind::Add(_) => 5,
        }
    }

    fn sort_key(&self) -> (&Expr, Rational, bool) {
        match self.kind() {
            Kind::Pow(b, r) => (b, *r, true),
            _ => (self, Rational::ONE, false),
        }
    }

    fn cmp_plain(&self, other: &Expr) -> Ordering {
        if self.ptr_eq(other) {
            return Ordering::Equal;
        }
        self.rank().cmp(&other.rank()).then_with(|| match (self.kind(), other.kind()) {
            (Kind::Const(a), Kind::Const(b)) => a.cmp(b),
            (Kind::Symbol(a), Kind::Symbol(b)) => a.cmp(b),
            (Kind::Pow(a, r), Kind::Pow(b, s)) => a.cmp(b).then(r.cmp(s)),
            _ => self.0.hash.cmp(&other.0.hash).then_with(|| match (self.kind(), other.kind()) {
                (Kind::Func(f, a), Kind::Func(g, b)) => f.cmp(g).then_with(|| a.cmp(b)),
                (Kind::Add(a), Kind::Add(b)) | (Kind::Mul(a), Kind::Mul(b)) => a.iter().cmp(b.iter()),
                _ => Ordering::Equal,
            }),
        })
    }
}

impl Ord for Expr {
    /// Deterministic total order used for canonical operand ordering. Powers
    /// sort next to their base.
    fn cmp(&self, other: &Expr) -> Ordering {
        if self.ptr_eq(other) {
            return Ordering::Equal;
        }
        let (a, r, pa) = self.sort_key();
        let (b, s, pb) = other.sort_key();
        a.cmp_plain(b).then(r.cmp(&s)).then(pa.cmp(&pb))
    }
}

impl PartialOrd for Expr {
    fn partial_cmp(&self, other: &Expr) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl PartialEq for Expr {
    fn eq(&self, other: &Expr) -> bool {
        if self.ptr_eq(other) {
            return true;
        }
        if self.0.hash != other.0.hash {
            return false;
        }
        match (self.kind(), other.kind()) {
            (Kind::Const(a), Kind::Const(b)) => a == b,
            (Kind::Symbol(a), Kind::Symbol(b)) => a == b,
            (Kind::Add(a), Kind::Add(b)) | (Kind::Mul(a), Kind::Mul(b)) => a == b,
            (Kind::Pow(a, r), Kind::Pow(b, s)) => r == s && a == b,
            (Kind::Func(f, a), Kind::Func(g, b)) => f == g && a == b,
            _ => false,
        }
    }
}

impl Eq for Expr {}

impl Hash for Expr {
    fn hash<H: Hasher>(&self, state: &mut H) {
        state.write_u64(self.0.hash);
    }
}

impl From<Symbol> for Expr {
    fn from(s: Symbol) -> Expr {
        Expr::symbol(s)
    }
}

impl From<&Symbol> for Expr {
    fn from(s: &Symbol) -> Expr {
        Expr::symbol(s.clone())
    }
}

impl From<i64> for Expr {
    fn from(n: i64) -> Expr {
        Expr::int(n)
    }
}

impl From<Rational> for Expr {
    fn from(c: Rational) -> Expr {
        Expr::constant(c)
    }
}

macro_rules! binop {
    ($tr:ident, $method:ident, $body:expr) => {
        impl std::ops::$tr<&Expr> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr {
                let f: fn(&Expr, &Expr) -> Expr = $body;
                f(self, rhs)
            }
        }
        impl std::ops::$tr<Expr> for Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                std::ops::$tr::$method(&self, &rhs)
            }
        }
        impl std::ops::$tr<&Expr> for Expr {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr {
                std::ops::$tr::$method(&self, rhs)
            }
        }
        impl std::ops::$tr<Expr> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                std::ops::$tr::$method(self, &rhs)
            }
        }
    };
}

binop!(Add, add, |a, b| Expr::add(vec![a.clone(), b.clone()]));
binop!(Sub, sub, |a, b| Expr::add(vec![a.clone(), -b]));
binop!(Mul, mul, |a, b| Expr::mul(vec![a.clone(), b.clone()]));
binop!(Div, div, |a, b| Expr::mul(vec![a.clone(), b.recip()]));

impl std::ops::Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        self.scale(Rational::MINUS_ONE)
    }
}

impl std::ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        -&self
    }
}

impl std::iter::Sum for Expr {
    fn sum<I: Iterator<Item = Expr>>(iter: I) -> Expr {
        Expr::add(iter.collect())
    }
}

impl std::iter::Product for Expr {
    fn product<I: Iterator<Item = Expr>>(iter: I) -> Expr {
        Expr::mul(iter.collect())
    }
}
