//! Release-note parsing.
//!
//! The reference grammar is deliberately small: a firmware release opens
//! with a header line
//!
//! ```text
//! Firmware <version> released <YYYY-MM-DD>
//! ```
//!
//! and any following `Fixed: <CVE-..., CVE-...>` lines attach fixed CVEs to
//! that release. Everything else (blank lines, prose) is ignored. Vendors
//! with other formats plug into [`NoteParserRegistry`] under their own
//! parser id.

use crate::ingest::IngestError;
use crate::model::is_valid_cve_id;
use chrono::NaiveDate;
use std::collections::BTreeMap;

/// One firmware release and the CVE ids its notes claim to fix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReleaseNote {
    pub firmware_version: String,
    pub release_date: NaiveDate,
    /// In order of first mention, without duplicates.
    pub fixed_cves: Vec<String>,
}

type ParserFn = Box<dyn Fn(&str) -> Result<Vec<ReleaseNote>, IngestError> + Send + Sync>;

/// Maps parser ids to parsing functions. The registry always contains the
/// `"reference"` grammar above; vendor-specific parsers can be registered
/// beside it.
pub struct NoteParserRegistry {
    parsers: BTreeMap<String, ParserFn>,
}

impl Default for NoteParserRegistry {
    fn default() -> Self {
        let mut registry = NoteParserRegistry {
            parsers: BTreeMap::new(),
        };
        registry.register("reference", |text| parse_reference_notes(text));
        registry
    }
}

impl NoteParserRegistry {
    pub fn register(
        &mut self,
        id: &str,
        parser: impl Fn(&str) -> Result<Vec<ReleaseNote>, IngestError> + Send + Sync + 'static,
    ) {
        self.parsers.insert(id.to_string(), Box::new(parser));
    }

    pub fn parser_ids(&self) -> impl Iterator<Item = &str> {
        self.parsers.keys().map(String::as_str)
    }

    pub fn parse(&self, text: &str, parser_id: &str) -> Result<Vec<ReleaseNote>, IngestError> {
        let parser = self
            .parsers
            .get(parser_id)
            .ok_or_else(|| IngestError::UnknownParser(parser_id.to_string()))?;
        parser(text)
    }
}

/// Parses `text` with the named parser from a default registry.
pub fn parse_release_notes(text: &str, parser_id: &str) -> Result<Vec<ReleaseNote>, IngestError> {
    NoteParserRegistry::default().parse(text, parser_id)
}

/// The reference grammar. A `Firmware` line that does not match
/// `Firmware <version> released <date>` fails the whole parse with its line
/// number; unparseable tokens on `Fixed:` lines are merely skipped.
fn parse_reference_notes(text: &str) -> Result<Vec<ReleaseNote>, IngestError> {
    let mut notes: Vec<ReleaseNote> = Vec::new();
    let mut current: Option<ReleaseNote> = None;

    for (idx, raw_line) in text.lines().enumerate() {
        let line = raw_line.trim();
        if let Some(rest) = line.strip_prefix("Firmware ") {
            let header = parse_header(rest).ok_or(IngestError::MalformedBlock { line: idx + 1 })?;
            if let Some(done) = current.take() {
                notes.push(done);
            }
            current = Some(header);
        } else if let Some(rest) = line.strip_prefix("Fixed:") {
            let Some(note) = current.as_mut() else {
                continue; // stray Fixed line before any release header
            };
            for token in rest.split(',') {
                let id = token.trim();
                if is_valid_cve_id(id) && !note.fixed_cves.iter().any(|c| c == id) {
                    note.fixed_cves.push(id.to_string());
                }
            }
        }
    }
    if let Some(done) = current.take() {
        notes.push(done);
    }
    Ok(notes)
}

fn parse_header(rest: &str) -> Option<ReleaseNote> {
    let (version, date_text) = rest.rsplit_once(" released ")?;
    let version = version.trim();
    if version.is_empty() {
        return None;
    }
    let release_date = NaiveDate::parse_from_str(date_text.trim(), "%Y-%m-%d").ok()?;
    Some(ReleaseNote {
        firmware_version: version.to_string(),
        release_date,
        fixed_cves: Vec::new(),
    })
}
