//! Flat `key = value` text files with `#` comments.

use std::fmt::Write as _;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
#[error("line {line}: {message}")]
pub struct KeyValueError {
    pub line: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Entry {
    pub line: usize,
    pub key: String,
    pub value: String,
}

/// Parses `key = value` lines. Later duplicates are an error.
pub fn parse(text: &str) -> Result<Vec<Entry>, KeyValueError> {
    let mut out: Vec<Entry> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            return Err(KeyValueError { line, message: format!("expected `key = value`, found `{content}`") });
        };
        let (key, value) = (key.trim(), value.trim());
        if key.is_empty() {
            return Err(KeyValueError { line, message: "empty key".into() });
        }
        if let Some(prev) = out.iter().find(|e| e.key == key) {
            return Err(KeyValueError { line, message: format!("duplicate key `{key}` (first on line {})", prev.line) });
        }
        out.push(Entry { line, key: key.to_string(), value: value.to_string() });
    }
    Ok(out)
}

pub fn get<'a>(entries: &'a [Entry], key: &str) -> Option<&'a Entry> {
    entries.iter().find(|e| e.key == key)
}

pub fn parse_f64(entry: &Entry) -> Result<f64, KeyValueError> {
    entry
        .value
        .parse()
        .map_err(|_| KeyValueError { line: entry.line, message: format!("`{}` is not a number: `{}`", entry.key, entry.value) })
}

/// Appends `key = value`; floats should be pre-formatted with `{:?}` so they
/// round-trip exactly.
pub fn push(out: &mut String, key: &str, value: impl std::fmt::Display) {
    let _ = writeln!(out, "{key} = {value}");
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_with_comments_and_blank_lines() {
        let e = parse("# header\n\na = 1.5  # trailing\n b=x \n").unwrap();
        assert_eq!(e.len(), 2);
        assert_eq!(e[0], Entry { line: 3, key: "a".into(), value: "1.5".into() });
        assert_eq!(parse_f64(&e[0]).unwrap(), 1.5);
        assert_eq!(parse_f64(&e[1]).unwrap_err().line, 4);
    }

    #[test]
    fn rejects_garbage_and_duplicates() {
        assert_eq!(parse("a = 1\nnonsense\n").unwrap_err().line, 2);
        assert_eq!(parse("a = 1\na = 2\n").unwrap_err().line, 2);
    }
}
