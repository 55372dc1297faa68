//! Flat `key = value` text blocks, shared by model files and config files.

use crate::error::{Error, Result};

/// One `key = value` line with its 1-based line number.
#[derive(Clone, Debug, PartialEq)]
pub struct Entry {
    pub key: String,
    pub value: String,
    pub line: usize,
}

/// Parses `key = value` lines. Blank lines and `#` comments are skipped.
pub fn parse_key_values(text: &str) -> Result<Vec<Entry>> {
    let mut entries = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
            line: idx + 1,
            message: format!("expected `key = value`, got `{line}`"),
        })?;
        let key = key.trim();
        if key.is_empty() {
            return Err(Error::Parse {
                line: idx + 1,
                message: "empty key".into(),
            });
        }
        entries.push(Entry {
            key: key.to_string(),
            value: value.trim().to_string(),
            line: idx + 1,
        });
    }
    Ok(entries)
}

pub(crate) fn parse_value<T: std::str::FromStr>(entry: &Entry) -> Result<T> {
    entry.value.parse().map_err(|_| Error::Parse {
        line: entry.line,
        message: format!("invalid value `{}` for `{}`", entry.value, entry.key),
    })
}

pub(crate) fn parse_flag(entry: &Entry) -> Result<bool> {
    match entry.value.as_str() {
        "true" | "on" | "yes" | "1" => Ok(true),
        "false" | "off" | "no" | "0" => Ok(false),
        _ => Err(Error::Parse {
            line: entry.line,
            message: format!("invalid boolean `{}` for `{}`", entry.value, entry.key),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_entries_and_skips_comments() {
        let entries = parse_key_values("# header\n\ncell_size = 8\n  tau=1.05  \n").unwrap();
        assert_eq!(entries.len(), 2);
        assert_eq!(entries[0].key, "cell_size");
        assert_eq!(entries[0].value, "8");
        assert_eq!(entries[0].line, 3);
        assert_eq!(entries[1].value, "1.05");
    }

    #[test]
    fn rejects_lines_without_separator() {
        let err = parse_key_values("a = 1\nbogus\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
    }
}
