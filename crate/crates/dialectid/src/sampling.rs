//! Random aggregation of documents into exactly-1,000-word samples and
//! capped train/dev/test assignment per (region, register).

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::ingest::{GeoDocument, IngestError, Register};
use crate::text::derive_seed;

/// Every sample is exactly this many words.
pub const SAMPLE_WORDS: usize = 1000;

#[derive(Debug, thiserror::Error)]
pub enum SamplingError {
    #[error("{region}/{register}: {post_dev} samples left after dev, need at least {needed}")]
    InsufficientData {
        region: String,
        register: Register,
        post_dev: usize,
        needed: usize,
    },
    #[error(transparent)]
    Io(#[from] IngestError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Dev,
    Test,
}

impl Split {
    pub fn as_str(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Dev => "dev",
            Split::Test => "test",
        }
    }

    pub const ALL: [Split; 3] = [Split::Train, Split::Dev, Split::Test];
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Split {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "train" => Ok(Split::Train),
            "dev" => Ok(Split::Dev),
            "test" => Ok(Split::Test),
            other => Err(format!("unknown split `{other}` (expected train|dev|test)")),
        }
    }
}

/// An exactly-1,000-word sample from one region and register.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionSample {
    pub sample_id: String,
    /// Country code.
    pub region: String,
    pub register: Register,
    pub split: Split,
    /// Words joined by single spaces.
    pub text: String,
}

impl RegionSample {
    pub fn tokens(&self) -> impl Iterator<Item = &str> {
        self.text.split_whitespace()
    }

    pub fn token_count(&self) -> usize {
        self.tokens().count()
    }
}

/// Split sizing for one (region, register): dev is fixed, train and test
/// are ratio-split and capped.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitPlan {
    pub dev_per_region: usize,
    pub max_train: usize,
    pub max_test: usize,
    pub min_train: usize,
    pub min_test: usize,
    pub seed: u64,
}

impl SplitPlan {
    pub fn with_seed(seed: u64) -> Self {
        SplitPlan {
            dev_per_region: 2_000,
            max_train: 25_000,
            max_test: 5_000,
            min_train: 12_000,
            min_test: 2_500,
            seed,
        }
    }
}

/// Shuffle documents, concatenate their words, and cut exact 1,000-word
/// samples. A document lying across a cut contributes to both sides; the
/// sub-1,000-word tail is discarded. Splits are provisional (`Train`)
/// until [`assign_splits`] runs.
///
/// The RNG is scoped by (region, register), so one corpus-wide seed gives
/// every group its own shuffle.
pub fn aggregate(docs: &[GeoDocument], seed: u64) -> Vec<RegionSample> {
    let Some(first) = docs.first() else {
        return Vec::new();
    };
    let region = first.country.clone();
    let register = first.register;
    debug_assert!(docs.iter().all(|d| d.country == region && d.register == register));

    let mut order: Vec<usize> = (0..docs.len()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(
        seed,
        &format!("aggregate:{region}:{register}"),
    ));
    order.shuffle(&mut rng);

    let mut samples = Vec::new();
    let mut buf: Vec<&str> = Vec::with_capacity(SAMPLE_WORDS);
    for &i in &order {
        for word in docs[i].text.split_whitespace() {
            buf.push(word);
            if buf.len() == SAMPLE_WORDS {
                samples.push(RegionSample {
                    sample_id: format!("{region}-{register}-{:06}", samples.len()),
                    region: region.clone(),
                    register,
                    split: Split::Train,
                    text: buf.join(" "),
                });
                buf.clear();
            }
        }
    }
    samples
}

/// Shuffle, take `dev_per_region` dev samples, then split the rest 5:1
/// train:test with caps. Samples beyond the caps are dropped.
pub fn assign_splits(
    samples: Vec<RegionSample>,
    plan: &SplitPlan,
) -> Result<Vec<RegionSample>, SamplingError> {
    let Some(first) = samples.first() else {
        return Err(SamplingError::InsufficientData {
            region: String::new(),
            register: Register::Web,
            post_dev: 0,
            needed: plan.min_train + plan.min_test,
        });
    };
    let region = first.region.clone();
    let register = first.register;
    debug_assert!(samples.iter().all(|s| s.region == region && s.register == register));

    let mut samples = samples;
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(
        plan.seed,
        &format!("splits:{region}:{register}"),
    ));
    samples.shuffle(&mut rng);

    let post_dev = samples.len().saturating_sub(plan.dev_per_region);
    let needed = plan.min_train + plan.min_test;
    if post_dev < needed {
        return Err(SamplingError::InsufficientData { region, register, post_dev, needed });
    }

    // 5:1 comes from the cap ratio; minimums only bind near the floor,
    // where the test share is rounded up to min_test.
    let test = (post_dev / 6).clamp(plan.min_test, plan.max_test);
    let train = (post_dev - test).min(plan.max_train);
    debug_assert!(train >= plan.min_train);

    samples.truncate(plan.dev_per_region + train + test);
    for (i, s) in samples.iter_mut().enumerate() {
        s.split = if i < plan.dev_per_region {
            Split::Dev
        } else if i < plan.dev_per_region + train {
            Split::Train
        } else {
            Split::Test
        };
    }
    Ok(samples)
}

pub fn write_samples(path: &Path, samples: &[RegionSample]) -> Result<(), SamplingError> {
    Ok(crate::ingest::write_ndjson(path, samples)?)
}

pub fn read_samples(path: &Path) -> Result<Vec<RegionSample>, SamplingError> {
    Ok(crate::ingest::read_ndjson(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::Month;
    use std::collections::HashMap;

    fn doc(words: &[String]) -> GeoDocument {
        let text = words.join(" ");
        GeoDocument {
            source_id: "s".into(),
            register: Register::Web,
            text: text.clone(),
            domain_suffix: None,
            coordinates: None,
            month: "2017-01".parse::<Month>().unwrap(),
            language: None,
            country: "CA".into(),
            word_count: words.len() as u64,
        }
    }

    fn docs_with_total(total: usize, per_doc: usize) -> Vec<GeoDocument> {
        let mut docs = Vec::new();
        let mut written = 0;
        while written < total {
            let n = per_doc.min(total - written);
            let words: Vec<String> = (written..written + n).map(|i| format!("t{i}")).collect();
            docs.push(doc(&words));
            written += n;
        }
        docs
    }

    #[test]
    fn chunks_are_exactly_one_thousand_words() {
        let samples = aggregate(&docs_with_total(2_500, 137), 5);
        assert_eq!(samples.len(), 2);
        for s in &samples {
            assert_eq!(s.token_count(), SAMPLE_WORDS);
            assert_eq!(s.region, "CA");
            assert_eq!(s.register, Register::Web);
        }
    }

    #[test]
    fn below_chunk_size_yields_nothing() {
        assert!(aggregate(&docs_with_total(999, 50), 5).is_empty());
        assert!(aggregate(&[], 5).is_empty());
    }

    #[test]
    fn short_posts_aggregate_to_full_sample() {
        // 59 posts of 17 words each: 1,003 words, one full sample.
        let samples = aggregate(&docs_with_total(59 * 17, 17), 9);
        assert_eq!(samples.len(), 1);
        assert_eq!(samples[0].token_count(), SAMPLE_WORDS);
    }

    #[test]
    fn documents_split_at_chunk_boundaries() {
        // 600-word docs never align with the 1,000-word grid, so samples
        // only exist because documents split.
        let samples = aggregate(&docs_with_total(3_000, 600), 2);
        assert_eq!(samples.len(), 3);
    }

    #[test]
    fn tokens_are_drawn_from_input_at_most_once() {
        let docs = docs_with_total(5_432, 321);
        let mut budget: HashMap<&str, i64> = HashMap::new();
        for d in &docs {
            for w in d.text.split_whitespace() {
                *budget.entry(w).or_insert(0) += 1;
            }
        }
        let samples = aggregate(&docs, 13);
        assert_eq!(samples.len(), 5);
        for s in &samples {
            for w in s.tokens() {
                let left = budget.get_mut(w).expect("token came from input");
                *left -= 1;
                assert!(*left >= 0, "token {w} used more often than supplied");
            }
        }
    }

    #[test]
    fn aggregation_is_deterministic_per_seed() {
        let docs = docs_with_total(4_000, 250);
        let a = aggregate(&docs, 42);
        let b = aggregate(&docs, 42);
        assert_eq!(a, b);
        let c = aggregate(&docs, 43);
        assert_ne!(a, c);
    }

    fn dummy_samples(n: usize) -> Vec<RegionSample> {
        (0..n)
            .map(|i| RegionSample {
                sample_id: format!("CA-web-{i:06}"),
                region: "CA".into(),
                register: Register::Web,
                split: Split::Train,
                text: "x".into(),
            })
            .collect()
    }

    fn split_sizes(samples: &[RegionSample]) -> (usize, usize, usize) {
        let count = |sp: Split| samples.iter().filter(|s| s.split == sp).count();
        (count(Split::Dev), count(Split::Train), count(Split::Test))
    }

    #[test]
    fn caps_bind_for_large_regions() {
        let out = assign_splits(dummy_samples(40_000), &SplitPlan::with_seed(1)).unwrap();
        assert_eq!(split_sizes(&out), (2_000, 25_000, 5_000));
        assert_eq!(out.len(), 32_000);
    }

    #[test]
    fn ratio_binds_for_mid_size_regions() {
        let out = assign_splits(dummy_samples(20_000), &SplitPlan::with_seed(1)).unwrap();
        assert_eq!(split_sizes(&out), (2_000, 15_000, 3_000));
    }

    #[test]
    fn error_when_test_share_cannot_reach_minimum() {
        let err = assign_splits(dummy_samples(16_400), &SplitPlan::with_seed(1)).unwrap_err();
        match err {
            SamplingError::InsufficientData { post_dev, needed, .. } => {
                assert_eq!(post_dev, 14_400);
                assert_eq!(needed, 14_500);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn floor_case_rounds_test_up_to_minimum() {
        // 16,500 total: 14,500 post-dev; a bare 1/6 share would be 2,416.
        let out = assign_splits(dummy_samples(16_500), &SplitPlan::with_seed(1)).unwrap();
        assert_eq!(split_sizes(&out), (2_000, 12_000, 2_500));
    }

    #[test]
    fn assignment_keeps_ids_unique_and_is_deterministic() {
        let out1 = assign_splits(dummy_samples(20_000), &SplitPlan::with_seed(7)).unwrap();
        let out2 = assign_splits(dummy_samples(20_000), &SplitPlan::with_seed(7)).unwrap();
        assert_eq!(out1, out2);
        let mut ids: Vec<&str> = out1.iter().map(|s| s.sample_id.as_str()).collect();
        ids.sort_unstable();
        ids.dedup();
        assert_eq!(ids.len(), out1.len());
    }

    #[test]
    fn sample_ndjson_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("samples.ndjson");
        let samples = dummy_samples(3);
        write_samples(&path, &samples).unwrap();
        assert_eq!(read_samples(&path).unwrap(), samples);
    }
}
