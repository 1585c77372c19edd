//! Per-(country, register) word totals and the data-driven selection of
//! which national varieties carry enough text to model.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ingest::{GeoDocument, Register};

/// Word floor a country must clear in both registers to be modeled.
pub const DEFAULT_INVENTORY_THRESHOLD: u64 = 15_000_000;

#[derive(Debug, thiserror::Error)]
pub enum MappingError {
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("{path}:{line}: {msg}")]
    BadRow { path: String, line: usize, msg: String },
}

/// Word totals keyed by (country, register). Ordered map so every report
/// and CSV comes out in a stable order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CorpusStats {
    pub counts: BTreeMap<(String, Register), u64>,
}

impl CorpusStats {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, country: &str, register: Register, words: u64) {
        *self.counts.entry((country.to_string(), register)).or_insert(0) += words;
    }

    pub fn words(&self, country: &str, register: Register) -> u64 {
        self.counts.get(&(country.to_string(), register)).copied().unwrap_or(0)
    }

    /// Associative and commutative, so partial sums can merge in any order.
    pub fn merge(mut self, other: CorpusStats) -> CorpusStats {
        for ((country, register), words) in other.counts {
            *self.counts.entry((country, register)).or_insert(0) += words;
        }
        self
    }

    pub fn countries(&self) -> Vec<String> {
        let mut out: Vec<String> = self.counts.keys().map(|(c, _)| c.clone()).collect();
        out.dedup();
        out
    }

    /// Totals re-keyed by a country→region grouping; ungrouped countries
    /// keep their own code. A reporting view only.
    pub fn grouped(&self, groups: &BTreeMap<String, String>) -> BTreeMap<(String, Register), u64> {
        let mut out: BTreeMap<(String, Register), u64> = BTreeMap::new();
        for ((country, register), words) in &self.counts {
            let key = groups.get(country).unwrap_or(country).clone();
            *out.entry((key, *register)).or_insert(0) += *words;
        }
        out
    }
}

/// Exact word totals over a document stream.
pub fn tabulate(docs: &[GeoDocument]) -> CorpusStats {
    docs.par_iter()
        .fold(CorpusStats::new, |mut stats, doc| {
            stats.add(&doc.country, doc.register, doc.word_count);
            stats
        })
        .reduce(CorpusStats::new, CorpusStats::merge)
}

/// The set of countries cleared for modeling, with the threshold that
/// produced it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VarietyInventory {
    /// Sorted country codes.
    pub varieties: Vec<String>,
    pub threshold: u64,
}

impl VarietyInventory {
    pub fn contains(&self, country: &str) -> bool {
        self.varieties.binary_search_by(|v| v.as_str().cmp(country)).is_ok()
    }
}

/// Countries whose totals meet `threshold` in both registers, sorted.
pub fn select_inventory(stats: &CorpusStats, threshold: u64) -> VarietyInventory {
    let varieties = stats
        .countries()
        .into_iter()
        .filter(|c| {
            stats.words(c, Register::Web) >= threshold
                && stats.words(c, Register::Social) >= threshold
        })
        .collect();
    VarietyInventory { varieties, threshold }
}

pub fn write_stats_csv(path: &Path, stats: &CorpusStats) -> Result<(), MappingError> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["country", "register", "words"])?;
    for ((country, register), words) in &stats.counts {
        w.write_record([country.as_str(), register.as_str(), &words.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_stats_csv(path: &Path) -> Result<CorpusStats, MappingError> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_path(path)?;
    let mut stats = CorpusStats::new();
    for (i, row) in rdr.records().enumerate() {
        let row = row?;
        let bad = |msg: &str| MappingError::BadRow {
            path: path.display().to_string(),
            line: i + 2,
            msg: msg.to_string(),
        };
        if row.len() != 3 {
            return Err(bad("expected country,register,words"));
        }
        let register: Register = row[1].parse().map_err(|e: String| bad(&e))?;
        let words: u64 = row[2].parse().map_err(|_| bad("bad word count"))?;
        stats.add(&row[0], register, words);
    }
    Ok(stats)
}

/// Plain list, one country code per line.
pub fn write_inventory(path: &Path, inventory: &VarietyInventory) -> Result<(), MappingError> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
    for v in &inventory.varieties {
        writeln!(w, "{v}")?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_inventory(path: &Path, threshold: u64) -> Result<VarietyInventory, MappingError> {
    let text = std::fs::read_to_string(path)?;
    let mut varieties: Vec<String> = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(String::from)
        .collect();
    varieties.sort();
    varieties.dedup();
    Ok(VarietyInventory { varieties, threshold })
}

/// `country,region` rows for the grouped reporting view.
pub fn read_region_groups(path: &Path) -> Result<BTreeMap<String, String>, MappingError> {
    let text = std::fs::read_to_string(path)?;
    let mut out = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || (i == 0 && line.eq_ignore_ascii_case("country,region")) {
            continue;
        }
        let (country, region) = line.split_once(',').ok_or_else(|| MappingError::BadRow {
            path: path.display().to_string(),
            line: i + 1,
            msg: "expected country,region".to_string(),
        })?;
        out.insert(country.trim().to_string(), region.trim().to_string());
    }
    Ok(out)
}
