use std::collections::BTreeMap;
use std::fmt;

use crate::lang::{decode, ProgramCode};

/// A candidate model of a halt test: program code to claimed verdict.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct HaltMap(BTreeMap<ProgramCode, bool>);

impl HaltMap {
    pub fn new() -> Self {
        HaltMap::default()
    }

    pub fn insert(&mut self, code: ProgramCode, halts: bool) -> Option<bool> {
        self.0.insert(code, halts)
    }

    pub fn get(&self, code: &ProgramCode) -> Option<bool> {
        self.0.get(code).copied()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&ProgramCode, bool)> {
        self.0.iter().map(|(k, v)| (k, *v))
    }
}

impl FromIterator<(ProgramCode, bool)> for HaltMap {
    fn from_iter<I: IntoIterator<Item = (ProgramCode, bool)>>(iter: I) -> Self {
        HaltMap(iter.into_iter().collect())
    }
}

/// Renders `{⌈Skip⌉ ↦ true, ⌈Loop⌉ ↦ false}`, naming each key by decoding it.
/// Order follows the code bytes.
impl fmt::Display for HaltMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (code, halts)) in self.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            match decode(code) {
                Ok(d) => write!(f, "⌈{}⌉ ↦ {halts}", d.name)?,
                Err(_) => write!(f, "{} ↦ {halts}", code.to_hex())?,
            }
        }
        f.write_str("}")
    }
}
