//! Line-oriented `key = value` files. `#` starts a comment; blank lines are
//! ignored. Later assignments to the same key replace earlier ones.

use std::fs;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Default)]
pub struct KeyValues {
    source: String,
    /// (key, value, line), in file order.
    entries: Vec<(String, String, u64)>,
}

impl KeyValues {
    pub fn parse(text: &str, source: &str) -> Result<Self> {
        let mut entries: Vec<(String, String, u64)> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i as u64 + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let (k, v) = body
                .split_once('=')
                .ok_or_else(|| Error::parse(source, line, format!("expected `key = value`, found `{body}`")))?;
            let (k, v) = (k.trim(), v.trim());
            if k.is_empty() || k.contains(char::is_whitespace) {
                return Err(Error::parse(source, line, format!("invalid key `{k}`")));
            }
            entries.retain(|e| e.0 != k);
            entries.push((k.to_string(), v.to_string(), line));
        }
        Ok(KeyValues {
            source: source.to_string(),
            entries,
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&fs::read_to_string(path)?, &path.display().to_string())
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str, u64)> {
        self.entries.iter().map(|(k, v, l)| (k.as_str(), v.as_str(), *l))
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.iter().find(|e| e.0 == key).map(|e| e.1.as_str())
    }

    pub fn line_of(&self, key: &str) -> u64 {
        self.entries.iter().find(|e| e.0 == key).map_or(0, |e| e.2)
    }

    /// Parses the value of `key`, if present, reporting its line on failure.
    pub fn parsed<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        match self.entries.iter().find(|e| e.0 == key) {
            None => Ok(None),
            Some((_, v, line)) => v
                .parse()
                .map(Some)
                .map_err(|_| Error::parse(&self.source, *line, format!("invalid value `{v}` for `{key}`"))),
        }
    }

    /// Whitespace- or comma-separated numbers.
    pub fn floats(&self, key: &str) -> Result<Option<Vec<f64>>> {
        match self.entries.iter().find(|e| e.0 == key) {
            None => Ok(None),
            Some((_, v, line)) => v
                .split(|c: char| c.is_whitespace() || c == ',')
                .filter(|s| !s.is_empty())
                .map(|s| {
                    s.parse::<f64>()
                        .ok()
                        .filter(|x| x.is_finite())
                        .ok_or_else(|| Error::parse(&self.source, *line, format!("`{s}` is not a finite number in `{key}`")))
                })
                .collect::<Result<Vec<_>>>()
                .map(Some),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_overrides() {
        let kv = KeyValues::parse("# header\nradius = 10\n\nq = 100, 90 80 # trailing\nradius=12\n", "c").unwrap();
        assert_eq!(kv.parsed::<u32>("radius").unwrap(), Some(12));
        assert_eq!(kv.line_of("radius"), 5);
        assert_eq!(kv.floats("q").unwrap(), Some(vec![100.0, 90.0, 80.0]));
        assert_eq!(kv.get("missing"), None);
        assert_eq!(kv.iter().count(), 2);
    }

    #[test]
    fn errors_name_the_line() {
        assert!(matches!(KeyValues::parse("a = 1\nbogus\n", "c"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(KeyValues::parse("two words = 1\n", "c"), Err(Error::Parse { line: 1, .. })));
        let kv = KeyValues::parse("\nk = x\n", "c").unwrap();
        assert!(matches!(kv.parsed::<u32>("k"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(kv.floats("k"), Err(Error::Parse { line: 2, .. })));
    }
}
