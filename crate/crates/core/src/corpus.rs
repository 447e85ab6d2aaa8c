//! Bundled example models and negative controls.

use serde::Serialize;

use crate::error::Result;
use crate::model::{parse_model, ModelSpec};

/// Whether a tensor is identically zero on a model.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Magnitude {
    Zero,
    Nonzero,
}

impl Magnitude {
    pub fn symbol(self) -> &'static str {
        match self {
            Magnitude::Zero => "0",
            Magnitude::Nonzero => ">0",
        }
    }

    /// Classifies a measured maximum magnitude.
    pub fn classify(x: f64) -> Self {
        if x <= 1e-12 {
            Magnitude::Zero
        } else {
            Magnitude::Nonzero
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Expected {
    #[serde(rename = "T")]
    pub t: Magnitude,
    #[serde(rename = "E")]
    pub e: Magnitude,
    #[serde(rename = "D")]
    pub d: Magnitude,
    #[serde(rename = "M")]
    pub m: Magnitude,
}

#[derive(Clone, Copy, Debug)]
pub struct CorpusEntry {
    pub name: &'static str,
    /// Path relative to the crate root.
    pub path: &'static str,
    pub source: &'static str,
    pub mutant: bool,
    /// `None` for mutants.
    pub expected: Option<Expected>,
}

impl CorpusEntry {
    pub fn spec(&self) -> Result<ModelSpec> {
        Ok(parse_model(self.source)?)
    }
}

use Magnitude::{Nonzero as X, Zero as O};

const fn ex(t: Magnitude, e: Magnitude, d: Magnitude, m: Magnitude) -> Option<Expected> {
    Some(Expected { t, e, d, m })
}

macro_rules! entry {
    ($name:literal, $exp:expr) => {
        CorpusEntry { name: $name, path: concat!("corpus/", $name, ".gsf"), source: include_str!(concat!("../corpus/", $name, ".gsf")), mutant: false, expected: $exp }
    };
    (mutant $name:literal) => {
        CorpusEntry { name: $name, path: concat!("corpus/mutants/", $name, ".gsf"), source: include_str!(concat!("../corpus/mutants/", $name, ".gsf")), mutant: true, expected: None }
    };
}

pub const CORPUS: &[CorpusEntry] = &[
    entry!("free-sqrt", ex(O, O, O, O)),
    entry!("relativistic-particle", ex(O, O, O, O)),
    entry!("charged-sqrt", ex(O, O, O, O)),
    entry!("gauged-oscillator", ex(O, O, O, O)),
    entry!("double-root", ex(O, O, O, O)),
    entry!("double-root-rebased-q", ex(X, O, O, O)),
    entry!("double-root-rebased-p", ex(O, X, O, O)),
    entry!("triple-root", ex(O, O, O, O)),
    entry!("triple-root-rebased", ex(X, X, X, O)),
    entry!(mutant "free-sqrt-badG"),
    entry!(mutant "free-sqrt-symbreak"),
    entry!(mutant "double-root-rebased-q-badC"),
];

pub fn models() -> impl Iterator<Item = &'static CorpusEntry> {
    CORPUS.iter().filter(|e| !e.mutant)
}

pub fn mutants() -> impl Iterator<Item = &'static CorpusEntry> {
    CORPUS.iter().filter(|e| e.mutant)
}

pub fn find(name: &str) -> Option<&'static CorpusEntry> {
    CORPUS.iter().find(|e| e.name == name)
}

/// Parses a bundled model by name.
///
/// # Panics
/// If `name` is not bundled or fails to parse.
pub fn load(name: &str) -> ModelSpec {
    find(name).unwrap_or_else(|| panic!("no bundled model `{name}`")).spec().expect("bundled models parse")
}
