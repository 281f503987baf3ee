use std::fs;
use std::path::Path;

use super::{Pattern, PatternError};

pub fn load_pattern(path: impl AsRef<Path>) -> Result<Pattern, PatternError> {
    let text = fs::read_to_string(path)?;
    let pattern: Pattern = serde_json::from_str(&text)?;
    pattern.validate()?;
    Ok(pattern)
}

pub fn save_pattern(pattern: &Pattern, path: impl AsRef<Path>) -> Result<(), PatternError> {
    pattern.validate()?;
    fs::write(path, serde_json::to_string_pretty(pattern)?)?;
    Ok(())
}
