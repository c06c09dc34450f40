//! Line-oriented `key = value` text with optional `[section]` headers.
//!
//! This is the dialect shared by instance files and scenario configs:
//!
//! ```text
//! # comment
//! n = 3
//! [pairs]
//! 0 1 = -1
//! ```
//!
//! Keys may contain spaces (`0 1` above). Everything after `#` is ignored.

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Entry {
    /// Section the entry appeared under, `None` before the first header.
    pub section: Option<String>,
    pub key: String,
    pub value: String,
    /// 1-based source line.
    pub line: usize,
}

pub fn parse(text: &str) -> Result<Vec<Entry>> {
    let mut section = None;
    let mut entries = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(rest) = content.strip_prefix('[') {
            let name = rest
                .strip_suffix(']')
                .ok_or_else(|| Error::parse(line, "unterminated section header"))?
                .trim();
            if name.is_empty() {
                return Err(Error::parse(line, "empty section name"));
            }
            section = Some(name.to_string());
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| Error::parse(line, format!("expected `key = value`, got `{content}`")))?;
        let key = key.split_whitespace().collect::<Vec<_>>().join(" ");
        if key.is_empty() {
            return Err(Error::parse(line, "missing key"));
        }
        entries.push(Entry { section: section.clone(), key, value: value.trim().to_string(), line });
    }
    Ok(entries)
}
