//! Sample featurization: construction counts, hashed word n-grams, and
//! function-word counts. All generators are pure and stateless, so the
//! same sample always vectorizes identically, with no fitted vocabulary
//! that could leak region information.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::io::{BufRead, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::cxg::{annotate_text, Lexicon, Matcher};
use crate::sampling::RegionSample;
use crate::text::{fnv1a_64, fold};

/// Hashed n-gram dimensionality.
pub const DEFAULT_HASH_DIM: u32 = 30_000;

#[derive(Debug, thiserror::Error)]
pub enum FeatureError {
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("{path}:{line}: {msg}")]
    BadLine { path: String, line: usize, msg: String },
}

/// Identifies which generator produced a vector. Grammar-count vectors
/// from different grammars share the `cxg` tag and are told apart by dim.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum FeatureSpace {
    #[serde(rename = "cxg")]
    Cxg,
    #[serde(rename = "ngram1")]
    Ngram1,
    #[serde(rename = "ngram2")]
    Ngram2,
    #[serde(rename = "ngram3")]
    Ngram3,
    #[serde(rename = "funct")]
    Funct,
}

impl FeatureSpace {
    pub fn as_str(self) -> &'static str {
        match self {
            FeatureSpace::Cxg => "cxg",
            FeatureSpace::Ngram1 => "ngram1",
            FeatureSpace::Ngram2 => "ngram2",
            FeatureSpace::Ngram3 => "ngram3",
            FeatureSpace::Funct => "funct",
        }
    }

    pub fn ngram_n(self) -> Option<usize> {
        match self {
            FeatureSpace::Ngram1 => Some(1),
            FeatureSpace::Ngram2 => Some(2),
            FeatureSpace::Ngram3 => Some(3),
            _ => None,
        }
    }
}

impl fmt::Display for FeatureSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FeatureSpace {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "cxg" => Ok(FeatureSpace::Cxg),
            "ngram1" => Ok(FeatureSpace::Ngram1),
            "ngram2" => Ok(FeatureSpace::Ngram2),
            "ngram3" => Ok(FeatureSpace::Ngram3),
            "funct" => Ok(FeatureSpace::Funct),
            other => Err(format!("unknown feature space `{other}`")),
        }
    }
}

/// Sparse non-negative count vector. `values` is sorted by index, holds
/// only nonzero counts, and every index is < dim.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub space: FeatureSpace,
    pub dim: u32,
    pub values: Vec<(u32, u32)>,
}

impl FeatureVector {
    pub fn from_counts(space: FeatureSpace, counts: &BTreeMap<u32, u32>, dim: u32) -> Self {
        let values: Vec<(u32, u32)> = counts.iter().filter(|(_, &v)| v > 0).map(|(&i, &v)| (i, v)).collect();
        debug_assert!(values.iter().all(|&(i, _)| i < dim));
        FeatureVector { space, dim, values }
    }

    pub fn get(&self, index: u32) -> u32 {
        self.values
            .binary_search_by_key(&index, |&(i, _)| i)
            .map(|pos| self.values[pos].1)
            .unwrap_or(0)
    }

    /// Sum of all counts.
    pub fn total(&self) -> u64 {
        self.values.iter().map(|&(_, v)| v as u64).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Construction counts as a vector; dim equals grammar size.
pub fn cxg_vector(matcher: &Matcher<'_>, lexicon: &Lexicon, sample: &RegionSample) -> FeatureVector {
    let tokens = annotate_text(&sample.text, lexicon);
    let counts = matcher.count(&tokens);
    let values: Vec<(u32, u32)> = counts
        .iter()
        .enumerate()
        .filter(|&(_, &c)| c > 0)
        .map(|(i, &c)| (i as u32, c))
        .collect();
    FeatureVector { space: FeatureSpace::Cxg, dim: matcher.grammar().len() as u32, values }
}

/// Hash every contiguous word n-gram (case-folded, space-joined) into
/// `dim` buckets with FNV-1a. Stateless: no vocabulary is fitted.
pub fn hash_ngram_vector(text: &str, n: usize, dim: u32) -> FeatureVector {
    assert!((1..=3).contains(&n), "n must be 1..=3");
    let space = match n {
        1 => FeatureSpace::Ngram1,
        2 => FeatureSpace::Ngram2,
        _ => FeatureSpace::Ngram3,
    };
    let words: Vec<String> = text.split_whitespace().map(fold).collect();
    let mut counts: BTreeMap<u32, u32> = BTreeMap::new();
    if words.len() >= n {
        for window in words.windows(n) {
            let joined = window.join(" ");
            let index = (fnv1a_64(joined.as_bytes()) % dim as u64) as u32;
            *counts.entry(index).or_insert(0) += 1;
        }
    }
    FeatureVector::from_counts(space, &counts, dim)
}

/// Closed-class word list; index order is the file order.
#[derive(Debug, Clone)]
pub struct FunctionWordList {
    words: Vec<String>,
    index: HashMap<String, u32>,
}

impl FunctionWordList {
    /// Case-folds and drops repeats, keeping first positions.
    pub fn new<I: IntoIterator<Item = S>, S: AsRef<str>>(words: I) -> Self {
        let mut list = FunctionWordList { words: Vec::new(), index: HashMap::new() };
        for w in words {
            let w = fold(w.as_ref());
            if w.is_empty() || list.index.contains_key(&w) {
                continue;
            }
            list.index.insert(w.clone(), list.words.len() as u32);
            list.words.push(w);
        }
        list
    }

    /// Stock list of ~300 English closed-class words.
    pub fn builtin() -> Self {
        Self::new(
            include_str!("../data/function_words.txt")
                .lines()
                .map(str::trim)
                .filter(|l| !l.is_empty() && !l.starts_with('#')),
        )
    }

    pub fn from_path(path: &Path) -> Result<Self, FeatureError> {
        let text = std::fs::read_to_string(path)?;
        Ok(Self::new(
            text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')),
        ))
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn position(&self, word: &str) -> Option<u32> {
        self.index.get(&fold(word)).copied()
    }
}

/// Count occurrences of each list word (case-folded) in the text.
pub fn function_word_vector(text: &str, list: &FunctionWordList) -> FeatureVector {
    let mut counts: BTreeMap<u32, u32> = BTreeMap::new();
    for word in text.split_whitespace() {
        if let Some(i) = list.position(word) {
            *counts.entry(i).or_insert(0) += 1;
        }
    }
    FeatureVector::from_counts(FeatureSpace::Funct, &counts, list.len() as u32)
}

/// One vector per line: `sample_id space dim idx:val idx:val ...`.
pub fn write_vectors(path: &Path, entries: &[(String, FeatureVector)]) -> Result<(), FeatureError> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
    for (sample_id, v) in entries {
        write!(w, "{sample_id} {} {}", v.space, v.dim)?;
        for (i, c) in &v.values {
            write!(w, " {i}:{c}")?;
        }
        writeln!(w)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_vectors(path: &Path) -> Result<Vec<(String, FeatureVector)>, FeatureError> {
    let file = std::fs::File::open(path)?;
    let mut out = Vec::new();
    for (lineno, line) in std::io::BufReader::new(file).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let bad = |msg: &str| FeatureError::BadLine {
            path: path.display().to_string(),
            line: lineno + 1,
            msg: msg.to_string(),
        };
        let mut parts = line.split_whitespace();
        let sample_id = parts.next().ok_or_else(|| bad("missing sample id"))?.to_string();
        let space: FeatureSpace = parts
            .next()
            .ok_or_else(|| bad("missing space"))?
            .parse()
            .map_err(|e: String| bad(&e))?;
        let dim: u32 = parts
            .next()
            .ok_or_else(|| bad("missing dim"))?
            .parse()
            .map_err(|_| bad("bad dim"))?;
        let mut values = Vec::new();
        let mut prev: Option<u32> = None;
        for pair in parts {
            let (i, c) = pair.split_once(':').ok_or_else(|| bad("expected idx:val"))?;
            let i: u32 = i.parse().map_err(|_| bad("bad index"))?;
            let c: u32 = c.parse().map_err(|_| bad("bad count"))?;
            if i >= dim {
                return Err(bad(&format!("index {i} out of range for dim {dim}")));
            }
            if c == 0 {
                return Err(bad("zero count stored"));
            }
            if prev.is_some_and(|p| p >= i) {
                return Err(bad("indices must be strictly increasing"));
            }
            prev = Some(i);
            values.push((i, c));
        }
        out.push((sample_id, FeatureVector { space, dim, values }));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cxg::{count_matches, Grammar};
    use crate::ingest::Register;
    use crate::sampling::Split;

    fn sample(text: &str) -> RegionSample {
        RegionSample {
            sample_id: "s-000001".into(),
            region: "CA".into(),
            register: Register::Web,
            split: Split::Train,
            text: text.into(),
        }
    }

    #[test]
    fn cxg_vector_mirrors_match_counts() {
        let grammar = Grammar::parse("g", "LEX:a -- LEX:b\nLEX:missing\nLEX:b\nLEX:c\n").unwrap();
        let lexicon = Lexicon::new();
        let matcher = Matcher::new(&grammar);
        let s = sample("a b c a b");
        let v = cxg_vector(&matcher, &lexicon, &s);
        assert_eq!(v.dim, 4);
        assert_eq!(v.values, vec![(0, 2), (2, 2), (3, 1)]);

        let tokens = annotate_text(&s.text, &lexicon);
        let counts = count_matches(&grammar, &tokens);
        for (i, &c) in counts.iter().enumerate() {
            assert_eq!(v.get(i as u32), c);
        }
    }

    #[test]
    fn cxg_vector_empty_when_nothing_matches() {
        let grammar = Grammar::parse("g", "LEX:zz\n").unwrap();
        let matcher = Matcher::new(&grammar);
        let v = cxg_vector(&matcher, &Lexicon::new(), &sample("a b c"));
        assert!(v.is_empty());
        assert_eq!(v.dim, 1);
    }

    #[test]
    fn unigram_totals_conserve_word_count() {
        let words: Vec<String> = (0..1000).map(|i| format!("w{}", i % 37)).collect();
        let text = words.join(" ");
        for n in 1..=3 {
            let v = hash_ngram_vector(&text, n, DEFAULT_HASH_DIM);
            assert_eq!(v.total(), (1000 - n + 1) as u64);
        }
        assert_eq!(hash_ngram_vector("a b", 3, 100).total(), 0);
    }

    #[test]
    fn hashing_is_stateless_and_case_folded() {
        let a = hash_ngram_vector("The Cat Sat", 2, 1000);
        let b = hash_ngram_vector("the cat sat", 2, 1000);
        assert_eq!(a, b);
        assert_eq!(a, hash_ngram_vector("The Cat Sat", 2, 1000));
    }

    #[test]
    fn bigram_buckets_match_independent_fnv() {
        use std::hash::Hasher;
        let text = "w1 w2 w3";
        let dim = 100u32;
        let v = hash_ngram_vector(text, 2, dim);
        let mut expected: BTreeMap<u32, u32> = BTreeMap::new();
        for joined in ["w1 w2", "w2 w3"] {
            let mut h = fnv::FnvHasher::default();
            h.write(joined.as_bytes());
            *expected.entry((h.finish() % dim as u64) as u32).or_insert(0) += 1;
        }
        assert_eq!(v, FeatureVector::from_counts(FeatureSpace::Ngram2, &expected, dim));
    }

    #[test]
    fn function_word_counts() {
        let list = FunctionWordList::new(["the", "of"]);
        let v = function_word_vector("The cat the dog", &list);
        assert_eq!(v.values, vec![(0, 2)]);
        assert_eq!(v.dim, 2);
        assert!(function_word_vector("cat dog", &list).is_empty());
    }

    #[test]
    fn function_word_counts_match_naive_tally() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(29);
        let list = FunctionWordList::builtin();
        let vocab: Vec<&str> = ["the", "of", "and", "cat", "dog", "run", "to", "a"].to_vec();
        for _ in 0..20 {
            let words: Vec<&str> =
                (0..200).map(|_| vocab[rng.gen_range(0..vocab.len())]).collect();
            let text = words.join(" ");
            let v = function_word_vector(&text, &list);
            let mut tally: HashMap<u32, u32> = HashMap::new();
            for w in &words {
                if let Some(i) = list.position(w) {
                    *tally.entry(i).or_insert(0) += 1;
                }
            }
            assert_eq!(v.values.len(), tally.len());
            for (i, c) in &v.values {
                assert_eq!(tally[i], *c);
            }
        }
    }

    #[test]
    fn builtin_list_is_deduplicated_and_sized() {
        let list = FunctionWordList::builtin();
        assert!(list.len() >= 250, "got {}", list.len());
        let mut sorted: Vec<&String> = list.words().iter().collect();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), list.len());
    }

    #[test]
    fn vector_file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("vectors.txt");
        let entries = vec![
            ("s1".to_string(), hash_ngram_vector("a b c d", 2, 50)),
            ("s2".to_string(), hash_ngram_vector("", 1, 50)),
            (
                "s3".to_string(),
                FeatureVector { space: FeatureSpace::Cxg, dim: 10, values: vec![(3, 1)] },
            ),
        ];
        write_vectors(&path, &entries).unwrap();
        assert_eq!(read_vectors(&path).unwrap(), entries);
    }

    #[test]
    fn reader_rejects_malformed_lines() {
        let dir = tempfile::tempdir().unwrap();
        for bad in [
            "s1 cxg 10 12:1",       // out of range
            "s1 cxg 10 3:0",        // zero count
            "s1 cxg 10 3:1 2:1",    // not increasing
            "s1 nope 10 1:1",       // unknown space
            "s1 cxg ten 1:1",       // bad dim
        ] {
            let path = dir.path().join("v.txt");
            std::fs::write(&path, format!("{bad}\n")).unwrap();
            assert!(read_vectors(&path).is_err(), "{bad} should fail");
        }
    }
}
