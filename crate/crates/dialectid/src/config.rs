//! Declarative run configuration: one TOML file names the corpus inputs,
//! grammars, split plan, feature spaces, and seed for a whole pipeline
//! run. Paths are resolved against the config file and checked before
//! any stage does work.

use std::collections::BTreeSet;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::classify::DEFAULT_C_GRID;
use crate::features::{FeatureSpace, DEFAULT_HASH_DIM};
use crate::ingest::Register;
use crate::mapping::DEFAULT_INVENTORY_THRESHOLD;
use crate::sampling::{SplitPlan, SAMPLE_WORDS};
use crate::synth::{
    concentrated_profiles, disjoint_profiles, identical_profiles, spread_profiles,
    DialectProfile, SynthOptions,
};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("reading {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("config parse: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("{field}: path does not exist: {path}")]
    MissingPath { field: &'static str, path: PathBuf },
    #[error("invalid config: {0}")]
    Invalid(String),
}

/// Pipeline stages in dependency order. `synth` replaces the three
/// corpus stages when a run works from generated data.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Synth,
    Ingest,
    Map,
    Sample,
    Featurize,
    Train,
    Eval,
    Crossdomain,
    Density,
    Unmask,
    Similarity,
}

impl Stage {
    pub const ALL: [Stage; 11] = [
        Stage::Synth,
        Stage::Ingest,
        Stage::Map,
        Stage::Sample,
        Stage::Featurize,
        Stage::Train,
        Stage::Eval,
        Stage::Crossdomain,
        Stage::Density,
        Stage::Unmask,
        Stage::Similarity,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Stage::Synth => "synth",
            Stage::Ingest => "ingest",
            Stage::Map => "map",
            Stage::Sample => "sample",
            Stage::Featurize => "featurize",
            Stage::Train => "train",
            Stage::Eval => "eval",
            Stage::Crossdomain => "crossdomain",
            Stage::Density => "density",
            Stage::Unmask => "unmask",
            Stage::Similarity => "similarity",
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Stage {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Stage::ALL
            .into_iter()
            .find(|stage| stage.as_str() == s)
            .ok_or_else(|| format!("unknown stage `{s}`"))
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct InputsConfig {
    /// Web page records, one JSON object per line.
    pub web: Option<PathBuf>,
    /// Social media post records, one JSON object per line.
    pub social: Option<PathBuf>,
    /// `name,country,lat,lon` city index; required with social input.
    pub cities: Option<PathBuf>,
    /// `suffix,country` overrides for the built-in top-level domain table.
    pub tlds: Option<PathBuf>,
    /// Optional `country,region` relabeling applied before sampling.
    pub region_groups: Option<PathBuf>,
    /// Pre-built samples, skipping the corpus stages entirely.
    pub samples: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GrammarsConfig {
    /// Grammar files; the first one backs the `cxg` feature space and all
    /// of them become density columns.
    pub paths: Vec<PathBuf>,
    pub lexicon: Option<PathBuf>,
}

fn default_threshold() -> u64 {
    DEFAULT_INVENTORY_THRESHOLD
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MappingConfig {
    /// Minimum words per register for a country to enter the inventory.
    pub threshold: u64,
}

impl Default for MappingConfig {
    fn default() -> Self {
        MappingConfig { threshold: default_threshold() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SamplingConfig {
    pub dev_per_region: usize,
    pub max_train: usize,
    pub max_test: usize,
    pub min_train: usize,
    pub min_test: usize,
}

impl Default for SamplingConfig {
    fn default() -> Self {
        let plan = SplitPlan::with_seed(0);
        SamplingConfig {
            dev_per_region: plan.dev_per_region,
            max_train: plan.max_train,
            max_test: plan.max_test,
            min_train: plan.min_train,
            min_test: plan.min_test,
        }
    }
}

impl SamplingConfig {
    pub fn plan(&self, seed: u64) -> SplitPlan {
        SplitPlan {
            dev_per_region: self.dev_per_region,
            max_train: self.max_train,
            max_test: self.max_test,
            min_train: self.min_train,
            min_test: self.min_test,
            seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FeaturesConfig {
    pub spaces: Vec<FeatureSpace>,
    pub hash_dim: u32,
}

impl Default for FeaturesConfig {
    fn default() -> Self {
        FeaturesConfig { spaces: vec![FeatureSpace::Cxg], hash_dim: DEFAULT_HASH_DIM }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ClassifyConfig {
    pub c_grid: Vec<f64>,
    /// Training register for the cross-register transfer stage.
    pub primary_register: Register,
    /// Held-out register the transfer stage tests on.
    pub secondary_register: Register,
}

impl Default for ClassifyConfig {
    fn default() -> Self {
        ClassifyConfig {
            c_grid: DEFAULT_C_GRID.to_vec(),
            primary_register: Register::Web,
            secondary_register: Register::Social,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct UnmaskingConfig {
    pub rounds: usize,
    /// Regularization for every refit; falls back to the trained cxg
    /// model's tuned C, then to 1.0.
    pub c: Option<f64>,
}

impl Default for UnmaskingConfig {
    fn default() -> Self {
        UnmaskingConfig { rounds: 100, c: None }
    }
}

/// Which preset shape `[synth]` generates when no profiles file is given.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProfileKind {
    /// Disjoint construction supports, `probability` per construction.
    Disjoint,
    /// One shared distribution; no class signal.
    Identical,
    /// Disjoint supports with `probability` split across the region's
    /// constructions.
    Spread,
    /// Disjoint supports with all of `probability` on one construction.
    Concentrated,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SynthConfig {
    /// JSON list of dialect profiles; overrides the preset fields.
    pub profiles: Option<PathBuf>,
    pub kind: ProfileKind,
    pub regions: usize,
    pub constructions_per_region: usize,
    pub probability: f64,
    pub train: usize,
    pub dev: usize,
    pub test: usize,
    pub registers: Vec<Register>,
    pub words_per_sample: usize,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            profiles: None,
            kind: ProfileKind::Disjoint,
            regions: 4,
            constructions_per_region: 5,
            probability: 0.01,
            train: 200,
            dev: 50,
            test: 50,
            registers: vec![Register::Web],
            words_per_sample: SAMPLE_WORDS,
        }
    }
}

impl SynthConfig {
    pub fn to_profiles(&self) -> Result<Vec<DialectProfile>, ConfigError> {
        if let Some(path) = &self.profiles {
            let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
                path: path.clone(),
                source,
            })?;
            return serde_json::from_str(&text)
                .map_err(|e| ConfigError::Invalid(format!("profiles {}: {e}", path.display())));
        }
        Ok(match self.kind {
            ProfileKind::Disjoint => {
                disjoint_profiles(self.regions, self.constructions_per_region, self.probability)
            }
            ProfileKind::Identical => {
                identical_profiles(self.regions, self.constructions_per_region, self.probability)
            }
            ProfileKind::Spread => {
                spread_profiles(self.regions, self.constructions_per_region, self.probability)
            }
            ProfileKind::Concentrated => concentrated_profiles(self.regions, self.probability),
        })
    }

    pub fn to_options(&self, seed: u64) -> SynthOptions {
        SynthOptions {
            train_per_region: self.train,
            dev_per_region: self.dev,
            test_per_region: self.test,
            registers: self.registers.clone(),
            words_per_sample: self.words_per_sample,
            seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Mandatory; every stochastic step derives its stream from this.
    pub seed: u64,
    pub output_dir: PathBuf,
    /// Empty means "infer from the configured inputs".
    #[serde(default)]
    pub stages: Vec<Stage>,
    /// Worker cap for intra-stage parallelism.
    #[serde(default)]
    pub jobs: Option<usize>,
    #[serde(default)]
    pub inputs: InputsConfig,
    #[serde(default)]
    pub synth: Option<SynthConfig>,
    #[serde(default)]
    pub grammars: GrammarsConfig,
    #[serde(default)]
    pub mapping: MappingConfig,
    #[serde(default)]
    pub sampling: SamplingConfig,
    #[serde(default)]
    pub features: FeaturesConfig,
    #[serde(default)]
    pub classify: ClassifyConfig,
    #[serde(default)]
    pub unmasking: UnmaskingConfig,
}

fn resolve(base: &Path, path: &mut PathBuf) {
    if path.is_relative() {
        *path = base.join(&*path);
    }
}

impl RunConfig {
    /// Parse, resolve relative paths against the config file's directory,
    /// and validate.
    pub fn from_path(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let mut config: RunConfig = toml::from_str(&text)?;
        let base = path.parent().unwrap_or_else(|| Path::new(".")).to_path_buf();
        config.resolve_paths(&base);
        config.validate()?;
        Ok(config)
    }

    /// All-synthetic run writing under `output_dir`.
    pub fn synthetic(output_dir: &Path, seed: u64) -> Self {
        RunConfig {
            seed,
            output_dir: output_dir.to_path_buf(),
            stages: Vec::new(),
            jobs: None,
            inputs: InputsConfig::default(),
            synth: Some(SynthConfig::default()),
            grammars: GrammarsConfig::default(),
            mapping: MappingConfig::default(),
            sampling: SamplingConfig::default(),
            features: FeaturesConfig::default(),
            classify: ClassifyConfig::default(),
            unmasking: UnmaskingConfig::default(),
        }
    }

    fn resolve_paths(&mut self, base: &Path) {
        resolve(base, &mut self.output_dir);
        for path in [
            &mut self.inputs.web,
            &mut self.inputs.social,
            &mut self.inputs.cities,
            &mut self.inputs.tlds,
            &mut self.inputs.region_groups,
            &mut self.inputs.samples,
        ]
        .into_iter()
        .flatten()
        {
            resolve(base, path);
        }
        for path in &mut self.grammars.paths {
            resolve(base, path);
        }
        if let Some(path) = &mut self.grammars.lexicon {
            resolve(base, path);
        }
        if let Some(synth) = &mut self.synth {
            if let Some(path) = &mut synth.profiles {
                resolve(base, path);
            }
        }
    }

    /// Requested stages in dependency order, or the inferred default when
    /// none were requested.
    pub fn effective_stages(&self) -> Result<Vec<Stage>, ConfigError> {
        if !self.stages.is_empty() {
            let set: BTreeSet<Stage> = self.stages.iter().copied().collect();
            return Ok(Stage::ALL.into_iter().filter(|s| set.contains(s)).collect());
        }
        let corpus: &[Stage] = if self.synth.is_some() {
            &[Stage::Synth]
        } else if self.inputs.samples.is_some() {
            &[]
        } else if self.inputs.web.is_some() || self.inputs.social.is_some() {
            &[Stage::Ingest, Stage::Map, Stage::Sample]
        } else {
            return Err(ConfigError::Invalid(
                "nothing to do: no [synth] section, no inputs, no explicit stages".into(),
            ));
        };
        let mut stages = corpus.to_vec();
        stages.extend([Stage::Featurize, Stage::Train, Stage::Eval]);
        if self.run_registers().len() > 1 {
            stages.push(Stage::Crossdomain);
        }
        stages.extend([Stage::Density, Stage::Unmask, Stage::Similarity]);
        Ok(stages)
    }

    /// Registers the configured corpus source will produce.
    fn run_registers(&self) -> Vec<Register> {
        if let Some(synth) = &self.synth {
            return synth.registers.clone();
        }
        let mut out = Vec::new();
        if self.inputs.web.is_some() {
            out.push(Register::Web);
        }
        if self.inputs.social.is_some() {
            out.push(Register::Social);
        }
        if out.is_empty() {
            out = vec![Register::Web, Register::Social];
        }
        out
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let must_exist = |field: &'static str, path: &Path| {
            if path.exists() {
                Ok(())
            } else {
                Err(ConfigError::MissingPath { field, path: path.to_path_buf() })
            }
        };
        for (field, path) in [
            ("inputs.web", &self.inputs.web),
            ("inputs.social", &self.inputs.social),
            ("inputs.cities", &self.inputs.cities),
            ("inputs.tlds", &self.inputs.tlds),
            ("inputs.region_groups", &self.inputs.region_groups),
            ("inputs.samples", &self.inputs.samples),
            ("grammars.lexicon", &self.grammars.lexicon),
        ] {
            if let Some(path) = path {
                must_exist(field, path)?;
            }
        }
        for path in &self.grammars.paths {
            must_exist("grammars.paths", path)?;
        }
        if let Some(synth) = &self.synth {
            if let Some(path) = &synth.profiles {
                must_exist("synth.profiles", path)?;
            }
            if synth.registers.is_empty() {
                return Err(ConfigError::Invalid("synth.registers is empty".into()));
            }
        }

        let stages = self.effective_stages()?;
        if stages.is_empty() {
            return Err(ConfigError::Invalid("stage list is empty".into()));
        }
        if stages.contains(&Stage::Synth)
            && (stages.contains(&Stage::Ingest) || stages.contains(&Stage::Sample))
        {
            return Err(ConfigError::Invalid(
                "synth and the corpus stages both produce samples; pick one source".into(),
            ));
        }
        if stages.contains(&Stage::Synth) && self.synth.is_none() {
            return Err(ConfigError::Invalid("synth stage needs a [synth] section".into()));
        }
        if stages.contains(&Stage::Ingest)
            && self.inputs.web.is_none()
            && self.inputs.social.is_none()
        {
            return Err(ConfigError::Invalid("ingest stage needs inputs.web or inputs.social".into()));
        }
        if self.inputs.social.is_some() && self.inputs.cities.is_none() {
            return Err(ConfigError::Invalid(
                "social input needs inputs.cities for georeferencing".into(),
            ));
        }
        if stages.contains(&Stage::Featurize)
            && self.features.spaces.contains(&FeatureSpace::Cxg)
            && self.grammars.paths.is_empty()
            && self.synth.is_none()
        {
            return Err(ConfigError::Invalid(
                "cxg features need grammars.paths (or a [synth] section that generates one)".into(),
            ));
        }
        if stages.contains(&Stage::Density) && self.grammars.paths.is_empty() && self.synth.is_none()
        {
            return Err(ConfigError::Invalid(
                "density stage needs grammars.paths (or a [synth] section)".into(),
            ));
        }
        if (self.grammars.paths.is_empty()) != (self.grammars.lexicon.is_none()) {
            return Err(ConfigError::Invalid(
                "grammars.paths and grammars.lexicon go together".into(),
            ));
        }

        if self.features.spaces.is_empty() {
            return Err(ConfigError::Invalid("features.spaces is empty".into()));
        }
        let mut seen = BTreeSet::new();
        for space in &self.features.spaces {
            if !seen.insert(*space) {
                return Err(ConfigError::Invalid(format!("duplicate feature space {space}")));
            }
        }
        if self.features.hash_dim == 0 {
            return Err(ConfigError::Invalid("features.hash_dim must be positive".into()));
        }
        if self.classify.c_grid.is_empty()
            || self.classify.c_grid.iter().any(|&c| !c.is_finite() || c <= 0.0)
        {
            return Err(ConfigError::Invalid("classify.c_grid must be positive and finite".into()));
        }
        if let Some(c) = self.unmasking.c {
            if !c.is_finite() || c <= 0.0 {
                return Err(ConfigError::Invalid("unmasking.c must be positive".into()));
            }
        }
        if self.sampling.min_train > self.sampling.max_train
            || self.sampling.min_test > self.sampling.max_test
        {
            return Err(ConfigError::Invalid("sampling minimums exceed maximums".into()));
        }
        if self.classify.primary_register == self.classify.secondary_register
            && stages.contains(&Stage::Crossdomain)
        {
            return Err(ConfigError::Invalid(
                "crossdomain needs distinct primary and secondary registers".into(),
            ));
        }
        Ok(())
    }

    /// Canonical hash covering every knob; manifests use it to decide
    /// whether a completed stage may be skipped.
    pub fn sha256(&self) -> String {
        let canonical = toml::to_string(self).expect("config serializes");
        crate::text::sha256_hex(canonical.as_bytes())
    }
}
