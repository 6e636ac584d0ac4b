//! CVE feed loading. The feed is a JSON array of entries:
//!
//! ```json
//! [{"id": "CVE-2018-0001", "published": "2018-01-01",
//!   "cvss_v2": 7.5, "products": ["vendonet:cam-200"]}]
//! ```
//!
//! Every entry is validated (id shape, date, score range, uniqueness)
//! before anything downstream sees it.

use crate::ingest::IngestError;
use crate::model::is_valid_cve_id;
use chrono::NaiveDate;
use serde::Deserialize;
use std::collections::BTreeSet;
use std::path::Path;

/// One validated feed entry. `products` holds `vendor:name` keys the CVE
/// applies to.
#[derive(Debug, Clone, PartialEq)]
pub struct CveFeedEntry {
    pub cve_id: String,
    pub published: NaiveDate,
    pub cvss_v2: f64,
    pub products: Vec<String>,
}

#[derive(Deserialize)]
struct RawEntry {
    id: String,
    published: String,
    cvss_v2: f64,
    products: Vec<String>,
}

fn schema_error(field: &str, reason: String) -> IngestError {
    IngestError::SchemaError {
        field: field.to_string(),
        reason,
    }
}

/// Parses and validates a feed from its JSON text.
pub fn parse_cve_feed(json: &str) -> Result<Vec<CveFeedEntry>, IngestError> {
    let raw: Vec<RawEntry> =
        serde_json::from_str(json).map_err(|e| schema_error("feed", e.to_string()))?;

    let mut seen = BTreeSet::new();
    let mut entries = Vec::with_capacity(raw.len());
    for (idx, entry) in raw.into_iter().enumerate() {
        if !is_valid_cve_id(&entry.id) {
            return Err(schema_error(
                "id",
                format!("entry {idx}: {:?} is not a CVE id", entry.id),
            ));
        }
        if !seen.insert(entry.id.clone()) {
            return Err(IngestError::DuplicateCve(entry.id));
        }
        let published = NaiveDate::parse_from_str(&entry.published, "%Y-%m-%d").map_err(|e| {
            schema_error(
                "published",
                format!("entry {idx} ({}): {e}", entry.id),
            )
        })?;
        if !(0.0..=10.0).contains(&entry.cvss_v2) {
            return Err(schema_error(
                "cvss_v2",
                format!("entry {idx} ({}): {} outside [0, 10]", entry.id, entry.cvss_v2),
            ));
        }
        entries.push(CveFeedEntry {
            cve_id: entry.id,
            published,
            cvss_v2: entry.cvss_v2,
            products: entry.products,
        });
    }
    Ok(entries)
}

/// Reads and validates the feed file at `path`.
pub fn load_cve_feed(path: &Path) -> Result<Vec<CveFeedEntry>, IngestError> {
    let json = std::fs::read_to_string(path)?;
    parse_cve_feed(&json)
}
