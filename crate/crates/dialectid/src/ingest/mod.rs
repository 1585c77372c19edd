//! Turns raw web-page and geo-tagged post dumps into clean, geo-referenced,
//! deduplicated documents.
//!
//! Web pages are located by country-code TLD, posts by nearest gazetteer
//! city within a fixed radius. Short documents are dropped (40 words for
//! web, 50 characters for social). Deduplication removes repeated text
//! per site, per calendar month, and per (country, language) pair.

pub mod geo;
pub mod html;

use std::collections::HashSet;
use std::fmt;
use std::io::{BufRead, Write};
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use regex::{Regex, RegexBuilder};
use serde::{Deserialize, Serialize};

use crate::text::{dedup_key, normalize_ws, word_count};
pub use geo::{City, CityIndex, TldTable, DEFAULT_CITY_RADIUS_KM};
pub use html::{extract_paragraph_text, extract_paragraphs};

/// Minimum words of paragraph text for a web document.
pub const MIN_WEB_WORDS: u64 = 40;
/// Minimum characters for a social document.
pub const MIN_SOCIAL_CHARS: usize = 50;

#[derive(Debug, thiserror::Error)]
pub enum IngestError {
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("{path}:{line}: {source}")]
    Json {
        path: String,
        line: usize,
        source: serde_json::Error,
    },
    #[error("cities file must start with header `{expected}`, got `{got}`")]
    BadHeader { expected: String, got: String },
    #[error("city `{name}` has out-of-range coordinates ({lat}, {lon})")]
    BadCoordinates { name: String, lat: f64, lon: f64 },
    #[error("tld table line {line}: expected `suffix,country`")]
    BadTldRow { line: usize },
    #[error("bad month `{0}`: expected YYYY-MM")]
    BadMonth(String),
    #[error("boilerplate pattern on line {line}: {source}")]
    BadPattern { line: usize, source: regex::Error },
}

/// Text register. Web pages and social posts are kept apart through the
/// whole pipeline and only meet again in cross-register experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Register {
    Web,
    Social,
}

impl Register {
    pub fn as_str(self) -> &'static str {
        match self {
            Register::Web => "web",
            Register::Social => "social",
        }
    }

    pub const ALL: [Register; 2] = [Register::Web, Register::Social];
}

impl fmt::Display for Register {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Register {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "web" => Ok(Register::Web),
            "social" => Ok(Register::Social),
            other => Err(format!("unknown register `{other}` (expected web|social)")),
        }
    }
}

/// Calendar month, `YYYY-MM`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Month(String);

impl Month {
    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl FromStr for Month {
    type Err = IngestError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let b = s.as_bytes();
        let ok = b.len() == 7
            && b[..4].iter().all(u8::is_ascii_digit)
            && b[4] == b'-'
            && b[5..].iter().all(u8::is_ascii_digit)
            && (1..=12).contains(&s[5..].parse::<u8>().unwrap_or(0));
        if ok {
            Ok(Month(s.to_string()))
        } else {
            Err(IngestError::BadMonth(s.to_string()))
        }
    }
}

impl TryFrom<String> for Month {
    type Error = IngestError;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<Month> for String {
    fn from(m: Month) -> String {
        m.0
    }
}

impl fmt::Display for Month {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatLon {
    pub lat: f64,
    pub lon: f64,
}

/// A cleaned document before geo-referencing. Web documents carry a domain
/// suffix and no coordinates; social documents the reverse.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawDocument {
    /// Site hostname or post id.
    pub source_id: String,
    pub register: Register,
    pub text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain_suffix: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coordinates: Option<LatLon>,
    pub month: Month,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub language: Option<String>,
}

/// A geo-referenced document; the unit all later stages consume.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeoDocument {
    pub source_id: String,
    pub register: Register,
    pub text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain_suffix: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coordinates: Option<LatLon>,
    pub month: Month,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub language: Option<String>,
    /// ISO 3166 alpha-2.
    pub country: String,
    pub word_count: u64,
}

impl GeoDocument {
    pub fn from_raw(raw: RawDocument, country: String) -> Self {
        let word_count = word_count(&raw.text) as u64;
        GeoDocument {
            source_id: raw.source_id,
            register: raw.register,
            text: raw.text,
            domain_suffix: raw.domain_suffix,
            coordinates: raw.coordinates,
            month: raw.month,
            language: raw.language,
            country,
            word_count,
        }
    }
}

/// One line of a web dump.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WebRecord {
    pub source_id: String,
    /// Lowercase, no leading dot, e.g. "ca".
    pub domain_suffix: String,
    pub month: Month,
    pub html: String,
}

/// One line of a social dump. `language` is the upstream LID output.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SocialRecord {
    pub post_id: String,
    pub lat: f64,
    pub lon: f64,
    pub month: Month,
    pub text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub language: Option<String>,
}

/// Paragraph-level noise filter. A paragraph is dropped when any pattern
/// matches anywhere in it (case-insensitive).
#[derive(Debug, Clone, Default)]
pub struct BoilerplateFilter {
    patterns: Vec<Regex>,
}

impl BoilerplateFilter {
    pub fn empty() -> Self {
        Self::default()
    }

    /// One regex per line; `#` comments and blank lines ignored.
    pub fn from_lines(text: &str) -> Result<Self, IngestError> {
        let mut patterns = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let re = RegexBuilder::new(line)
                .case_insensitive(true)
                .build()
                .map_err(|source| IngestError::BadPattern { line: i + 1, source })?;
            patterns.push(re);
        }
        Ok(Self { patterns })
    }

    pub fn from_path(path: &Path) -> Result<Self, IngestError> {
        Self::from_lines(&std::fs::read_to_string(path)?)
    }

    /// Stock patterns for navigation chrome and error pages. These are a
    /// best-effort stand-in, not a fixed standard; override with a file
    /// for serious runs.
    pub fn builtin() -> Self {
        Self::from_lines(include_str!("../../data/boilerplate.txt"))
            .expect("builtin boilerplate patterns compile")
    }

    pub fn is_noise(&self, paragraph: &str) -> bool {
        self.patterns.iter().any(|re| re.is_match(paragraph))
    }
}

/// Configured ingestion front end for both registers.
pub struct Ingestor {
    pub tlds: TldTable,
    pub cities: CityIndex,
    pub boilerplate: BoilerplateFilter,
    pub radius_km: f64,
    pub min_web_words: u64,
    pub min_social_chars: usize,
    /// Keep only social posts whose LID field equals this; `None` keeps all.
    pub language: Option<String>,
}

impl Ingestor {
    pub fn new(tlds: TldTable, cities: CityIndex) -> Self {
        Ingestor {
            tlds,
            cities,
            boilerplate: BoilerplateFilter::builtin(),
            radius_km: DEFAULT_CITY_RADIUS_KM,
            min_web_words: MIN_WEB_WORDS,
            min_social_chars: MIN_SOCIAL_CHARS,
            language: Some("en".to_string()),
        }
    }

    /// Paragraph text of a page with noise paragraphs removed.
    pub fn clean_page_text(&self, html: &str) -> String {
        let kept: Vec<String> = extract_paragraphs(html)
            .into_iter()
            .filter(|p| !self.boilerplate.is_noise(p))
            .collect();
        normalize_ws(&kept.join(" "))
    }

    /// `None` when the page is too short or its domain is not geographic.
    pub fn web_document(&self, rec: &WebRecord) -> Option<GeoDocument> {
        let text = self.clean_page_text(&rec.html);
        if (word_count(&text) as u64) < self.min_web_words {
            return None;
        }
        let country = self.tlds.georeference(&rec.domain_suffix)?.to_string();
        let raw = RawDocument {
            source_id: rec.source_id.clone(),
            register: Register::Web,
            text,
            domain_suffix: Some(rec.domain_suffix.clone()),
            coordinates: None,
            month: rec.month.clone(),
            language: None,
        };
        Some(GeoDocument::from_raw(raw, country))
    }

    /// `None` when the post is too short, in the wrong language, or not
    /// near any gazetteer city. Length is checked before language.
    pub fn social_document(&self, rec: &SocialRecord) -> Option<GeoDocument> {
        let text = normalize_ws(&rec.text);
        if text.chars().count() < self.min_social_chars {
            return None;
        }
        if let Some(want) = &self.language {
            if rec.language.as_deref() != Some(want.as_str()) {
                return None;
            }
        }
        let country = self.cities.georeference(rec.lat, rec.lon, self.radius_km)?.to_string();
        let raw = RawDocument {
            source_id: rec.post_id.clone(),
            register: Register::Social,
            text,
            domain_suffix: None,
            coordinates: Some(LatLon { lat: rec.lat, lon: rec.lon }),
            month: rec.month.clone(),
            language: rec.language.clone(),
        };
        Some(GeoDocument::from_raw(raw, country))
    }

    /// Order-preserving; records are independent, so this parallelizes.
    pub fn ingest_web(&self, records: &[WebRecord]) -> Vec<GeoDocument> {
        records.par_iter().filter_map(|r| self.web_document(r)).collect()
    }

    pub fn ingest_social(&self, records: &[SocialRecord]) -> Vec<GeoDocument> {
        records.par_iter().filter_map(|r| self.social_document(r)).collect()
    }
}

/// Remove repeated text, keeping the first occurrence in each scope:
/// same source, same calendar month, then same (country, language) in a
/// final pass. "Repeated" means equal after case-folding and whitespace
/// collapse. Kept documents pass through untouched.
pub fn deduplicate(docs: Vec<GeoDocument>) -> Vec<GeoDocument> {
    let mut site_seen: HashSet<(String, u128)> = HashSet::new();
    let mut month_seen: HashSet<(String, u128)> = HashSet::new();
    let mut first = Vec::with_capacity(docs.len());
    for doc in docs {
        let key = dedup_key(&doc.text);
        // A doc filtered by the month scope still claims its site slot,
        // exactly as if the scopes ran as separate sequential passes.
        if !site_seen.insert((doc.source_id.clone(), key)) {
            continue;
        }
        if !month_seen.insert((doc.month.as_str().to_string(), key)) {
            continue;
        }
        first.push(doc);
    }

    let mut pair_seen: HashSet<(String, Option<String>, u128)> = HashSet::new();
    let mut out = Vec::with_capacity(first.len());
    for doc in first {
        let key = dedup_key(&doc.text);
        if pair_seen.insert((doc.country.clone(), doc.language.clone(), key)) {
            out.push(doc);
        }
    }
    out
}

pub fn read_web_records(path: &Path) -> Result<Vec<WebRecord>, IngestError> {
    read_ndjson(path)
}

pub fn read_social_records(path: &Path) -> Result<Vec<SocialRecord>, IngestError> {
    read_ndjson(path)
}

pub fn read_documents(path: &Path) -> Result<Vec<GeoDocument>, IngestError> {
    read_ndjson(path)
}

pub fn write_documents(path: &Path, docs: &[GeoDocument]) -> Result<(), IngestError> {
    write_ndjson(path, docs)
}

pub(crate) fn read_ndjson<T: serde::de::DeserializeOwned>(path: &Path) -> Result<Vec<T>, IngestError> {
    let file = std::fs::File::open(path)?;
    let mut out = Vec::new();
    for (i, line) in std::io::BufReader::new(file).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let rec = serde_json::from_str(&line).map_err(|source| IngestError::Json {
            path: path.display().to_string(),
            line: i + 1,
            source,
        })?;
        out.push(rec);
    }
    Ok(out)
}

pub(crate) fn write_ndjson<T: Serialize>(path: &Path, items: &[T]) -> Result<(), IngestError> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
    for item in items {
        serde_json::to_writer(&mut w, item).map_err(|e| IngestError::Io(e.into()))?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}
