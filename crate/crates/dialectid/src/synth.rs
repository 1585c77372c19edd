//! Synthetic corpora with analytically known construction frequencies.
//! Each construction gets a reserved trigger word and a single-slot
//! grammar entry, so per-sample match counts are exact Binomial draws.
//! This is an oracle for the pipeline, not a simulation of language.

use std::collections::{BTreeMap, BTreeSet};

use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cxg::{Construction, Grammar, Lexicon, SlotConstraint};
use crate::ingest::Register;
use crate::sampling::{RegionSample, Split, SAMPLE_WORDS};
use crate::text::derive_seed;

/// Syntax tag assigned to construction trigger words.
pub const TRIGGER_TAG: &str = "CX";
/// Syntax tag assigned to background filler words.
pub const BACKGROUND_TAG: &str = "W";

/// Filler vocabulary for profiles that do not specify `lexicon_bias`.
pub const DEFAULT_BACKGROUND: &[&str] = &[
    "the", "of", "and", "a", "to", "in", "is", "was", "it", "for", "on", "with", "as", "at",
    "by", "an", "be", "this", "that", "from", "or", "had", "not", "but", "all", "we", "when",
    "your", "can", "said", "there", "use", "each", "which", "she", "do", "how", "their", "if",
    "will", "up", "other", "about", "out", "many", "then", "them", "these", "so", "some",
];

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("invalid profile for {region}: {reason}")]
    InvalidProfile { region: String, reason: String },
    #[error("invalid options: {0}")]
    BadOptions(String),
}

/// How the SOCIAL register deviates from the WEB construction distribution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum RegisterShift {
    /// Multiply every construction probability, clamping into [0, 1].
    Scale(f64),
    /// Swap in a different construction distribution.
    Replace(BTreeMap<String, f64>),
}

/// One region's generating distribution: per-token construction emission
/// probabilities plus a weighted background vocabulary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DialectProfile {
    pub region: String,
    pub construction_probs: BTreeMap<String, f64>,
    /// word -> weight; empty means [`DEFAULT_BACKGROUND`] at uniform weight.
    #[serde(default)]
    pub lexicon_bias: BTreeMap<String, f64>,
    #[serde(default)]
    pub register_shift: Option<RegisterShift>,
}

fn valid_name(s: &str) -> bool {
    !s.is_empty()
        && s.chars().all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_' || c == '-')
}

fn check_distribution(
    region: &str,
    probs: &BTreeMap<String, f64>,
    what: &str,
) -> Result<(), SynthError> {
    let invalid = |reason: String| SynthError::InvalidProfile {
        region: region.to_string(),
        reason,
    };
    let mut total = 0.0;
    for (name, &p) in probs {
        if !valid_name(name) {
            return Err(invalid(format!(
                "{what} construction `{name}` must be lowercase ascii [a-z0-9_-]"
            )));
        }
        if !p.is_finite() || !(0.0..=1.0).contains(&p) {
            return Err(invalid(format!("{what} probability for `{name}` is {p}")));
        }
        total += p;
    }
    if total > 1.0 {
        return Err(invalid(format!("{what} probabilities sum to {total} > 1")));
    }
    Ok(())
}

impl DialectProfile {
    pub fn new(region: &str, construction_probs: BTreeMap<String, f64>) -> Self {
        DialectProfile {
            region: region.to_string(),
            construction_probs,
            lexicon_bias: BTreeMap::new(),
            register_shift: None,
        }
    }

    fn validate(&self) -> Result<(), SynthError> {
        let invalid = |reason: String| SynthError::InvalidProfile {
            region: self.region.clone(),
            reason,
        };
        if self.region.is_empty() {
            return Err(invalid("empty region label".into()));
        }
        check_distribution(&self.region, &self.construction_probs, "web")?;
        check_distribution(&self.region, &self.probs_for(Register::Social), "social")?;
        if let Some(RegisterShift::Scale(f)) = self.register_shift {
            if !f.is_finite() || f < 0.0 {
                return Err(invalid(format!("scale factor is {f}")));
            }
        }
        for (word, &w) in &self.lexicon_bias {
            if word.is_empty() || word.split_whitespace().count() != 1 {
                return Err(invalid(format!("background word `{word}` is not a single token")));
            }
            if word.starts_with("cx_") {
                return Err(invalid(format!(
                    "background word `{word}` collides with the reserved trigger prefix"
                )));
            }
            if !w.is_finite() || w < 0.0 {
                return Err(invalid(format!("background weight for `{word}` is {w}")));
            }
        }
        if !self.lexicon_bias.is_empty() && self.lexicon_bias.values().all(|&w| w == 0.0) {
            return Err(invalid("no background word has positive weight".into()));
        }
        Ok(())
    }

    /// Construction distribution for one register; the SOCIAL register
    /// applies `register_shift` when present.
    pub fn probs_for(&self, register: Register) -> BTreeMap<String, f64> {
        match (register, &self.register_shift) {
            (Register::Social, Some(RegisterShift::Scale(f))) => self
                .construction_probs
                .iter()
                .map(|(name, &p)| (name.clone(), (p * f).clamp(0.0, 1.0)))
                .collect(),
            (Register::Social, Some(RegisterShift::Replace(probs))) => probs.clone(),
            _ => self.construction_probs.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthOptions {
    pub train_per_region: usize,
    pub dev_per_region: usize,
    pub test_per_region: usize,
    pub registers: Vec<Register>,
    pub words_per_sample: usize,
    pub seed: u64,
}

impl Default for SynthOptions {
    fn default() -> Self {
        SynthOptions {
            train_per_region: 200,
            dev_per_region: 0,
            test_per_region: 50,
            registers: vec![Register::Web],
            words_per_sample: SAMPLE_WORDS,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SynthCorpus {
    pub samples: Vec<RegionSample>,
    pub grammar: Grammar,
    pub lexicon: Lexicon,
    /// Construction names in grammar position order, so feature index i
    /// counts the construction named `construction_names[i]`.
    pub construction_names: Vec<String>,
}

/// Trigger word reserved for a construction name.
pub fn trigger_word(name: &str) -> String {
    format!("cx_{name}")
}

fn background_for(profile: &DialectProfile) -> (Vec<String>, Vec<f64>) {
    if profile.lexicon_bias.is_empty() {
        let words = DEFAULT_BACKGROUND.iter().map(|w| w.to_string()).collect();
        let weights = vec![1.0; DEFAULT_BACKGROUND.len()];
        (words, weights)
    } else {
        let mut words = Vec::new();
        let mut weights = Vec::new();
        for (word, &w) in &profile.lexicon_bias {
            if w > 0.0 {
                words.push(word.clone());
                weights.push(w);
            }
        }
        (words, weights)
    }
}

/// Emit `train + dev + test` samples per region and register, together
/// with the grammar and lexicon that recover the construction counts.
/// Pure given (profiles, options); regions and registers run in parallel.
pub fn generate(profiles: &[DialectProfile], options: &SynthOptions) -> Result<SynthCorpus, SynthError> {
    if profiles.len() < 2 {
        return Err(SynthError::BadOptions(format!(
            "need at least 2 profiles, got {}",
            profiles.len()
        )));
    }
    let total = options.train_per_region + options.dev_per_region + options.test_per_region;
    if total == 0 {
        return Err(SynthError::BadOptions("zero samples per region".into()));
    }
    if options.words_per_sample == 0 {
        return Err(SynthError::BadOptions("zero words per sample".into()));
    }
    if options.registers.is_empty() {
        return Err(SynthError::BadOptions("no registers requested".into()));
    }
    let mut regions = BTreeSet::new();
    for profile in profiles {
        profile.validate()?;
        if !regions.insert(profile.region.as_str()) {
            return Err(SynthError::BadOptions(format!(
                "duplicate region `{}`",
                profile.region
            )));
        }
    }

    let mut names: BTreeSet<String> = BTreeSet::new();
    for profile in profiles {
        names.extend(profile.construction_probs.keys().cloned());
        if let Some(RegisterShift::Replace(probs)) = &profile.register_shift {
            names.extend(probs.keys().cloned());
        }
    }
    let construction_names: Vec<String> = names.into_iter().collect();

    let constructions = construction_names
        .iter()
        .enumerate()
        .map(|(id, name)| Construction {
            id,
            slots: vec![SlotConstraint::Sem(name.clone())],
        })
        .collect();
    let grammar = Grammar {
        name: "synthetic".to_string(),
        constructions,
    };

    let mut lexicon = Lexicon::new();
    for name in &construction_names {
        lexicon.insert(&trigger_word(name), TRIGGER_TAG, Some(name));
    }
    for profile in profiles {
        let (words, _) = background_for(profile);
        for word in &words {
            lexicon.insert(word, BACKGROUND_TAG, None);
        }
    }

    let jobs: Vec<(&DialectProfile, Register)> = profiles
        .iter()
        .flat_map(|p| options.registers.iter().map(move |&r| (p, r)))
        .collect();
    let per_job: Vec<Vec<RegionSample>> = jobs
        .par_iter()
        .map(|&(profile, register)| {
            let scope = format!("synth:{}:{}", profile.region, register.as_str());
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(options.seed, &scope));
            let probs = profile.probs_for(register);
            let triggers: Vec<String> =
                probs.keys().map(|name| trigger_word(name)).collect();
            let mut cumulative = Vec::with_capacity(probs.len());
            let mut acc = 0.0;
            for &p in probs.values() {
                acc += p;
                cumulative.push(acc);
            }
            let trigger_mass = acc;
            let (bg_words, bg_weights) = background_for(profile);
            let bg_index = WeightedIndex::new(&bg_weights).expect("validated weights");

            (0..total)
                .map(|i| {
                    let mut words: Vec<&str> = Vec::with_capacity(options.words_per_sample);
                    for _ in 0..options.words_per_sample {
                        let u: f64 = rng.gen();
                        if u < trigger_mass {
                            let slot = cumulative.partition_point(|&c| c <= u);
                            words.push(&triggers[slot]);
                        } else {
                            words.push(&bg_words[bg_index.sample(&mut rng)]);
                        }
                    }
                    let split = if i < options.train_per_region {
                        Split::Train
                    } else if i < options.train_per_region + options.dev_per_region {
                        Split::Dev
                    } else {
                        Split::Test
                    };
                    RegionSample {
                        sample_id: format!("{}-{}-{:06}", profile.region, register.as_str(), i),
                        region: profile.region.clone(),
                        register,
                        split,
                        text: words.join(" "),
                    }
                })
                .collect()
        })
        .collect();

    Ok(SynthCorpus {
        samples: per_job.into_iter().flatten().collect(),
        grammar,
        lexicon,
        construction_names,
    })
}

fn region_label(i: usize) -> String {
    format!("r{i:02}")
}

fn construction_label(i: usize) -> String {
    format!("c{i:04}")
}

/// K regions with pairwise-disjoint construction supports: region k owns
/// `per_region` constructions, each emitted at probability `p`.
pub fn disjoint_profiles(k: usize, per_region: usize, p: f64) -> Vec<DialectProfile> {
    (0..k)
        .map(|r| {
            let probs = (0..per_region)
                .map(|j| (construction_label(r * per_region + j), p))
                .collect();
            DialectProfile::new(&region_label(r), probs)
        })
        .collect()
}

/// K regions sharing one construction distribution; no class signal.
pub fn identical_profiles(k: usize, n_constructions: usize, p: f64) -> Vec<DialectProfile> {
    let probs: BTreeMap<String, f64> =
        (0..n_constructions).map(|j| (construction_label(j), p)).collect();
    (0..k)
        .map(|r| DialectProfile::new(&region_label(r), probs.clone()))
        .collect()
}

/// All of each region's signal riding one construction.
pub fn concentrated_profiles(k: usize, p_total: f64) -> Vec<DialectProfile> {
    disjoint_profiles(k, 1, p_total)
}

/// The same total signal spread thinly over many constructions.
pub fn spread_profiles(k: usize, per_region: usize, p_total: f64) -> Vec<DialectProfile> {
    disjoint_profiles(k, per_region, p_total / per_region as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cxg::{annotate_text, Matcher};

    fn probs(entries: &[(&str, f64)]) -> BTreeMap<String, f64> {
        entries.iter().map(|&(k, v)| (k.to_string(), v)).collect()
    }

    fn two_profiles() -> Vec<DialectProfile> {
        vec![
            DialectProfile::new("aa", probs(&[("c0000", 0.02)])),
            DialectProfile::new("bb", probs(&[("c0001", 0.02)])),
        ]
    }

    #[test]
    fn generation_is_deterministic_and_seed_sensitive() {
        let profiles = two_profiles();
        let opts = SynthOptions {
            train_per_region: 3,
            dev_per_region: 1,
            test_per_region: 2,
            words_per_sample: 200,
            seed: 42,
            ..SynthOptions::default()
        };
        let a = generate(&profiles, &opts).unwrap();
        let b = generate(&profiles, &opts).unwrap();
        assert_eq!(a.samples, b.samples);
        assert_eq!(a.grammar.to_file_string(), b.grammar.to_file_string());
        assert_eq!(a.lexicon.to_tsv_string(), b.lexicon.to_tsv_string());

        let other = generate(&profiles, &SynthOptions { seed: 43, ..opts }).unwrap();
        assert_ne!(a.samples[0].text, other.samples[0].text);
    }

    #[test]
    fn split_counts_and_word_budget_hold() {
        let profiles = two_profiles();
        let opts = SynthOptions {
            train_per_region: 4,
            dev_per_region: 2,
            test_per_region: 3,
            registers: vec![Register::Web, Register::Social],
            words_per_sample: 150,
            seed: 1,
        };
        let corpus = generate(&profiles, &opts).unwrap();
        assert_eq!(corpus.samples.len(), 2 * 2 * 9);
        let mut counts: BTreeMap<(String, Register, Split), usize> = BTreeMap::new();
        for s in &corpus.samples {
            assert_eq!(s.token_count(), 150);
            *counts.entry((s.region.clone(), s.register, s.split)).or_default() += 1;
        }
        for region in ["aa", "bb"] {
            for register in [Register::Web, Register::Social] {
                assert_eq!(counts[&(region.to_string(), register, Split::Train)], 4);
                assert_eq!(counts[&(region.to_string(), register, Split::Dev)], 2);
                assert_eq!(counts[&(region.to_string(), register, Split::Test)], 3);
            }
        }
    }

    #[test]
    fn grammar_and_lexicon_recover_exact_trigger_counts() {
        let profiles = two_profiles();
        let opts = SynthOptions {
            train_per_region: 2,
            dev_per_region: 0,
            test_per_region: 0,
            words_per_sample: 400,
            seed: 7,
            ..SynthOptions::default()
        };
        let corpus = generate(&profiles, &opts).unwrap();
        let matcher = Matcher::new(&corpus.grammar);
        assert_eq!(corpus.construction_names, vec!["c0000", "c0001"]);
        for s in &corpus.samples {
            let tokens = annotate_text(&s.text, &corpus.lexicon);
            let counts = matcher.count(&tokens);
            let raw0 = s.tokens().filter(|w| *w == "cx_c0000").count() as u32;
            let raw1 = s.tokens().filter(|w| *w == "cx_c0001").count() as u32;
            assert_eq!(counts, vec![raw0, raw1]);
            match s.region.as_str() {
                "aa" => assert_eq!(raw1, 0),
                _ => assert_eq!(raw0, 0),
            }
        }
    }

    #[test]
    fn trigger_counts_match_the_binomial_expectation() {
        // 1000 tokens at p = 0.02: mean 20, sd 4.427; the mean of 500
        // samples stays within 3 sd / sqrt(500) = 0.594 of 20.
        let profiles = two_profiles();
        let opts = SynthOptions {
            train_per_region: 500,
            dev_per_region: 0,
            test_per_region: 0,
            words_per_sample: 1000,
            seed: 1234,
            ..SynthOptions::default()
        };
        let corpus = generate(&profiles, &opts).unwrap();
        let matcher = Matcher::new(&corpus.grammar);
        let totals: u64 = corpus
            .samples
            .iter()
            .filter(|s| s.region == "aa")
            .map(|s| matcher.count(&annotate_text(&s.text, &corpus.lexicon))[0] as u64)
            .sum();
        let mean = totals as f64 / 500.0;
        assert!((mean - 20.0).abs() < 0.594, "empirical mean {mean}");
    }

    #[test]
    fn register_shift_touches_only_the_social_register() {
        let mut profiles = two_profiles();
        profiles[0].register_shift = Some(RegisterShift::Scale(0.0));
        profiles[1].register_shift =
            Some(RegisterShift::Replace(probs(&[("c0000", 0.05)])));
        let opts = SynthOptions {
            train_per_region: 10,
            dev_per_region: 0,
            test_per_region: 0,
            registers: vec![Register::Web, Register::Social],
            words_per_sample: 500,
            seed: 5,
        };
        let corpus = generate(&profiles, &opts).unwrap();
        let trigger_share = |region: &str, register: Register, word: &str| -> usize {
            corpus
                .samples
                .iter()
                .filter(|s| s.region == region && s.register == register)
                .flat_map(|s| s.tokens())
                .filter(|w| *w == word)
                .count()
        };
        assert!(trigger_share("aa", Register::Web, "cx_c0000") > 0);
        assert_eq!(trigger_share("aa", Register::Social, "cx_c0000"), 0);
        assert!(trigger_share("bb", Register::Web, "cx_c0001") > 0);
        assert_eq!(trigger_share("bb", Register::Social, "cx_c0001"), 0);
        assert!(trigger_share("bb", Register::Social, "cx_c0000") > 0);
    }

    #[test]
    fn lexicon_bias_steers_the_background_vocabulary() {
        let mut profiles = two_profiles();
        profiles[0].lexicon_bias = probs(&[("zonked", 3.0), ("quux", 1.0), ("never", 0.0)]);
        let opts = SynthOptions {
            train_per_region: 20,
            dev_per_region: 0,
            test_per_region: 0,
            words_per_sample: 400,
            seed: 9,
            ..SynthOptions::default()
        };
        let corpus = generate(&profiles, &opts).unwrap();
        let mut zonked = 0usize;
        let mut quux = 0usize;
        for s in corpus.samples.iter().filter(|s| s.region == "aa") {
            for w in s.tokens() {
                match w {
                    "zonked" => zonked += 1,
                    "quux" => quux += 1,
                    "never" => panic!("zero-weight word emitted"),
                    other => assert!(other.starts_with("cx_"), "unexpected token {other}"),
                }
            }
        }
        // 3:1 weights over ~7840 expected background tokens.
        assert!(zonked > 2 * quux, "zonked {zonked} quux {quux}");
        assert!(quux > 0);
        assert_eq!(corpus.lexicon.get("zonked"), Some((BACKGROUND_TAG, None)));
    }

    #[test]
    fn invalid_profiles_and_options_are_rejected() {
        let bad_prob = vec![
            DialectProfile::new("aa", probs(&[("c0000", 1.5)])),
            DialectProfile::new("bb", probs(&[("c0001", 0.1)])),
        ];
        assert!(matches!(
            generate(&bad_prob, &SynthOptions::default()),
            Err(SynthError::InvalidProfile { .. })
        ));

        let bad_sum = vec![
            DialectProfile::new("aa", probs(&[("c0000", 0.7), ("c0001", 0.7)])),
            DialectProfile::new("bb", probs(&[("c0002", 0.1)])),
        ];
        assert!(generate(&bad_sum, &SynthOptions::default()).is_err());

        let bad_name = vec![
            DialectProfile::new("aa", probs(&[("Not Valid", 0.1)])),
            DialectProfile::new("bb", probs(&[("c0001", 0.1)])),
        ];
        assert!(generate(&bad_name, &SynthOptions::default()).is_err());

        let mut bad_bias = two_profiles();
        bad_bias[0].lexicon_bias = probs(&[("cx_c0001", 1.0)]);
        assert!(generate(&bad_bias, &SynthOptions::default()).is_err());

        let mut bad_weight = two_profiles();
        bad_weight[0].lexicon_bias = probs(&[("fine", -1.0)]);
        assert!(generate(&bad_weight, &SynthOptions::default()).is_err());

        let mut bad_shift = two_profiles();
        bad_shift[0].register_shift = Some(RegisterShift::Replace(probs(&[("c0000", 2.0)])));
        assert!(generate(&bad_shift, &SynthOptions::default()).is_err());

        let one = vec![DialectProfile::new("aa", probs(&[("c0000", 0.1)]))];
        assert!(matches!(
            generate(&one, &SynthOptions::default()),
            Err(SynthError::BadOptions(_))
        ));

        let zero = SynthOptions {
            train_per_region: 0,
            dev_per_region: 0,
            test_per_region: 0,
            ..SynthOptions::default()
        };
        assert!(generate(&two_profiles(), &zero).is_err());
    }

    #[test]
    fn preset_profiles_have_the_advertised_shapes() {
        let disjoint = disjoint_profiles(3, 2, 0.05);
        assert_eq!(disjoint.len(), 3);
        let mut seen = BTreeSet::new();
        for p in &disjoint {
            assert_eq!(p.construction_probs.len(), 2);
            for (name, &prob) in &p.construction_probs {
                assert!(seen.insert(name.clone()), "support overlap at {name}");
                assert_eq!(prob, 0.05);
            }
        }

        let identical = identical_profiles(4, 3, 0.02);
        for p in &identical[1..] {
            assert_eq!(p.construction_probs, identical[0].construction_probs);
        }

        let concentrated = concentrated_profiles(2, 0.3);
        assert_eq!(concentrated[0].construction_probs.len(), 1);
        let spread = spread_profiles(2, 10, 0.3);
        assert_eq!(spread[0].construction_probs.len(), 10);
        let total: f64 = spread[0].construction_probs.values().sum();
        assert!((total - 0.3).abs() < 1e-12);
    }
}
