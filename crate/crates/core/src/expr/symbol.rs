use std::fmt;
use std::sync::Arc;

/// Which family a symbol belongs to.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum SymbolKind {
    Coordinate,
    Velocity,
    Acceleration,
    Momentum,
    Parameter,
}

impl SymbolKind {
    fn prefix(self) -> &'static str {
        match self {
            SymbolKind::Coordinate | SymbolKind::Parameter => "",
            SymbolKind::Velocity => "v",
            SymbolKind::Acceleration => "a",
            SymbolKind::Momentum => "p",
        }
    }
}

/// A named scalar variable.
///
/// Phase-space symbols share a *stem*, the coordinate name, and an index.
/// The velocity of coordinate `q1` is rendered `v1`; the velocity of `x`
/// is rendered `vx`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Symbol {
    kind: SymbolKind,
    index: u32,
    stem: Arc<str>,
}

impl Symbol {
    pub fn new(kind: SymbolKind, index: usize, stem: &str) -> Self {
        Symbol { kind, index: index as u32, stem: Arc::from(stem) }
    }

    pub fn parameter(name: &str) -> Self {
        Symbol::new(SymbolKind::Parameter, 0, name)
    }

    pub fn kind(&self) -> SymbolKind {
        self.kind
    }

    /// Zero-based coordinate index (0 for parameters).
    pub fn index(&self) -> usize {
        self.index as usize
    }

    pub fn stem(&self) -> &str {
        &self.stem
    }

    /// Same coordinate, different family.
    pub fn with_kind(&self, kind: SymbolKind) -> Symbol {
        Symbol { kind, index: self.index, stem: self.stem.clone() }
    }

    pub fn name(&self) -> String {
        let prefix = self.kind.prefix();
        if prefix.is_empty() {
            return self.stem.to_string();
        }
        match self.stem.strip_prefix('q') {
            Some(rest) if !rest.is_empty() => format!("{prefix}{rest}"),
            _ => format!("{prefix}{}", self.stem),
        }
    }

    pub(crate) fn mask_bit(&self) -> u128 {
        let slot = match self.kind {
            SymbolKind::Parameter => {
                self.stem.bytes().fold(0u32, |h, b| h.wrapping_mul(31).wrapping_add(b as u32)) % 24
            }
            _ => self.index.min(23),
        };
        let family = match self.kind {
            SymbolKind::Coordinate => 0,
            SymbolKind::Velocity => 1,
            SymbolKind::Acceleration => 2,
            SymbolKind::Momentum => 3,
            SymbolKind::Parameter => 4,
        };
        1u128 << (family * 24 + slot)
    }

    pub(crate) fn kind_mask(kind: SymbolKind) -> u128 {
        let family = match kind {
            SymbolKind::Coordinate => 0,
            SymbolKind::Velocity => 1,
            SymbolKind::Acceleration => 2,
            SymbolKind::Momentum => 3,
            SymbolKind::Parameter => 4,
        };
        ((1u128 << 24) - 1) << (family * 24)
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

/// The generalized coordinates of a model and the symbol families derived
/// from them.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Coordinates {
    stems: Vec<Arc<str>>,
}

impl Coordinates {
    pub fn new<S: AsRef<str>>(names: &[S]) -> Self {
        Coordinates { stems: names.iter().map(|s| Arc::from(s.as_ref())).collect() }
    }

    /// `q1 .. qn`.
    pub fn numbered(n: usize) -> Self {
        let names: Vec<String> = (1..=n).map(|i| format!("q{i}")).collect();
        Coordinates::new(&names)
    }

    pub fn len(&self) -> usize {
        self.stems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stems.is_empty()
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.stems.iter().map(|s| s.as_ref())
    }

    pub fn symbol(&self, kind: SymbolKind, i: usize) -> Symbol {
        Symbol { kind, index: i as u32, stem: self.stems[i].clone() }
    }

    pub fn q(&self, i: usize) -> Symbol {
        self.symbol(SymbolKind::Coordinate, i)
    }

    pub fn v(&self, i: usize) -> Symbol {
        self.symbol(SymbolKind::Velocity, i)
    }

    pub fn a(&self, i: usize) -> Symbol {
        self.symbol(SymbolKind::Acceleration, i)
    }

    pub fn p(&self, i: usize) -> Symbol {
        self.symbol(SymbolKind::Momentum, i)
    }

    pub fn family(&self, kind: SymbolKind) -> Vec<Symbol> {
        (0..self.len()).map(|i| self.symbol(kind, i)).collect()
    }

    /// Resolves a rendered name such as `q2`, `v2` or `p2`.
    pub fn lookup(&self, name: &str) -> Option<Symbol> {
        [SymbolKind::Coordinate, SymbolKind::Velocity, SymbolKind::Acceleration, SymbolKind::Momentum]
            .into_iter()
            .flat_map(|k| (0..self.len()).map(move |i| (k, i)))
            .map(|(k, i)| self.symbol(k, i))
            .find(|s| s.name() == name)
    }
}
