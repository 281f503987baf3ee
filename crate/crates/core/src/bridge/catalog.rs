use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use super::{BridgeError, PatternRef};
use crate::bench::paper4;
use crate::patterns::{generate, load_pattern, Pattern, PatternError, PatternSpec};

/// Named patterns a session can reset to: generator specs (reseeded per
/// reset) and fixed pattern files.
#[derive(Debug, Clone, Default)]
pub struct PatternCatalog {
    specs: BTreeMap<String, PatternSpec>,
    patterns: BTreeMap<String, Pattern>,
}

impl PatternCatalog {
    pub fn new() -> Self {
        Self::default()
    }

    /// The four benchmark distributions under the names `grid-0.15`,
    /// `grid-0.3`, `poisson-0.2` and `poisson-0.3`.
    pub fn with_presets(belt_width: f64) -> Self {
        let mut c = Self::new();
        for preset in paper4(belt_width) {
            c.insert_spec(preset.slug, preset.spec);
        }
        c
    }

    pub fn insert_spec(&mut self, name: impl Into<String>, spec: PatternSpec) {
        self.specs.insert(name.into(), spec);
    }

    pub fn insert_pattern(&mut self, name: impl Into<String>, pattern: Pattern) {
        self.patterns.insert(name.into(), pattern);
    }

    /// Adds every `*.json` pattern file in `dir` under its file stem.
    pub fn load_dir(&mut self, dir: impl AsRef<Path>) -> Result<usize, PatternError> {
        let mut n = 0;
        let mut paths: Vec<_> = fs::read_dir(dir)?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "json"))
            .collect();
        paths.sort();
        for path in paths {
            let Some(stem) = path.file_stem().and_then(|s| s.to_str()) else { continue };
            let pattern = load_pattern(&path)?;
            self.insert_pattern(stem.to_string(), pattern);
            n += 1;
        }
        Ok(n)
    }

    pub fn names(&self) -> Vec<&str> {
        self.specs.keys().chain(self.patterns.keys()).map(String::as_str).collect()
    }

    /// Materializes a pattern reference. `seed` reseeds generator specs and
    /// is ignored for fixed patterns.
    pub fn resolve(&self, reference: &PatternRef, seed: Option<u64>) -> Result<Pattern, BridgeError> {
        let from_spec = |spec: &PatternSpec| -> Result<Pattern, BridgeError> {
            let spec = seed.map_or_else(|| spec.clone(), |s| spec.with_seed(s));
            Ok(generate(&spec)?)
        };
        match reference {
            PatternRef::Name(name) => {
                if let Some(spec) = self.specs.get(name) {
                    from_spec(spec)
                } else if let Some(p) = self.patterns.get(name) {
                    Ok(p.clone())
                } else {
                    Err(BridgeError::UnknownPattern(name.clone()))
                }
            }
            PatternRef::Inline(p) => {
                p.validate()?;
                Ok(p.clone())
            }
            PatternRef::Spec(spec) => from_spec(spec),
        }
    }
}
