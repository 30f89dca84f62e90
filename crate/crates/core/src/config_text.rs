//! Line-oriented sectioned text used by grammar and rule-set files.
//!
//! ```text
//! # comment
//! key = value
//!
//! [section]
//! free-form line
//! ```
//!
//! `key = value` pairs may only appear before the first section. Blank
//! lines and `#` comments (whole-line or trailing) are ignored.

use crate::error::{Error, Result};

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ConfigDoc {
    pub origin: String,
    pub preamble: Vec<Entry>,
    pub sections: Vec<Section>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Entry {
    pub line: usize,
    pub key: String,
    pub value: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Section {
    pub name: String,
    pub line: usize,
    pub lines: Vec<(usize, String)>,
}

impl ConfigDoc {
    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        let mut doc = ConfigDoc {
            origin: origin.to_string(),
            ..Default::default()
        };
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = strip_comment(raw).trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .ok_or_else(|| doc.error(line_no, "unterminated section header"))?
                    .trim();
                if doc.sections.iter().any(|s| s.name == name) {
                    return Err(doc.error(line_no, format!("duplicate section [{name}]")));
                }
                doc.sections.push(Section {
                    name: name.to_string(),
                    line: line_no,
                    lines: Vec::new(),
                });
                continue;
            }
            match doc.sections.last_mut() {
                Some(section) => section.lines.push((line_no, line.to_string())),
                None => {
                    let (key, value) = line
                        .split_once('=')
                        .ok_or_else(|| doc.error(line_no, "expected `key = value` before the first section"))?;
                    doc.preamble.push(Entry {
                        line: line_no,
                        key: key.trim().to_string(),
                        value: value.trim().to_string(),
                    });
                }
            }
        }
        Ok(doc)
    }

    pub fn error(&self, line: usize, message: impl Into<String>) -> Error {
        Error::Config {
            origin: self.origin.clone(),
            line,
            message: message.into(),
        }
    }

    pub fn get(&self, key: &str) -> Option<&Entry> {
        self.preamble.iter().find(|e| e.key == key)
    }

    pub fn section(&self, name: &str) -> Option<&Section> {
        self.sections.iter().find(|s| s.name == name)
    }
}

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sections_and_preamble() {
        let doc = ConfigDoc::parse("# top\ntask = Suturing\n\n[a]\nx y # trailing\n[b]\n", "t").unwrap();
        assert_eq!(doc.get("task").unwrap().value, "Suturing");
        assert_eq!(doc.section("a").unwrap().lines, vec![(5, "x y".to_string())]);
        assert!(doc.section("b").unwrap().lines.is_empty());
    }

    #[test]
    fn errors_carry_line_numbers() {
        let err = ConfigDoc::parse("\n\nnonsense\n", "f").unwrap_err();
        assert_eq!(err.to_string(), "f:3: expected `key = value` before the first section");
        assert!(ConfigDoc::parse("[a]\n[a]\n", "f").is_err());
        assert!(ConfigDoc::parse("[a\n", "f").is_err());
    }
}
