//! Stage runner. Executes the configured stages in dependency order and
//! memoizes each one behind a manifest of config and file fingerprints,
//! so rerunning with unchanged inputs is a no-op and interrupted stages
//! are detected and redone.

use std::collections::BTreeMap;
use std::collections::HashMap;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::classify::{
    evaluate, read_confusion_csv, run_experiment, similarity_from_counts, train,
    write_confusion_csv, write_report_csv, write_similarity_csv, LinearModel, Mode, RegisterSet,
};
use crate::config::{ConfigError, RunConfig, Stage};
use crate::cxg::{
    feature_density, group_by_region, write_density_csv, Grammar, Lexicon, Matcher,
};
use crate::features::{
    cxg_vector, function_word_vector, hash_ngram_vector, read_vectors, write_vectors,
    FeatureSpace, FeatureVector, FunctionWordList,
};
use crate::ingest::{
    deduplicate, read_documents, read_social_records, read_web_records, write_documents,
    CityIndex, GeoDocument, Ingestor, Register, TldTable,
};
use crate::mapping::{
    read_inventory, read_region_groups, select_inventory, tabulate, write_inventory,
    write_stats_csv,
};
use crate::sampling::{aggregate, assign_splits, read_samples, write_samples, RegionSample, Split};
use crate::synth;
use crate::text::sha256_hex;
use crate::unmasking::{unmask, write_curve_csv, write_removed_log_csv, UnmaskOptions};

/// Overrides where stage manifests are stored (default: `<output_dir>/manifests`).
pub const CACHE_ENV: &str = "DIALECTID_CACHE";

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("stage {stage}: {source}")]
    Stage {
        stage: Stage,
        source: Box<dyn std::error::Error + Send + Sync>,
    },
}

fn at<E>(stage: Stage) -> impl FnOnce(E) -> PipelineError
where
    E: Into<Box<dyn std::error::Error + Send + Sync>>,
{
    move |e| PipelineError::Stage { stage, source: e.into() }
}

/// Canonical locations of every artifact under one output directory.
#[derive(Debug, Clone)]
pub struct Artifacts {
    out: PathBuf,
    manifest_dir: PathBuf,
}

impl Artifacts {
    pub fn new(out: &Path, manifest_dir: Option<&Path>) -> Self {
        Artifacts {
            out: out.to_path_buf(),
            manifest_dir: manifest_dir
                .map(Path::to_path_buf)
                .unwrap_or_else(|| out.join("manifests")),
        }
    }

    /// Manifest location honoring the `DIALECTID_CACHE` environment variable.
    pub fn for_config(config: &RunConfig) -> Self {
        let cache = std::env::var_os(CACHE_ENV).map(PathBuf::from);
        Artifacts::new(&config.output_dir, cache.as_deref())
    }

    pub fn documents(&self) -> PathBuf {
        self.out.join("documents.ndjson")
    }

    pub fn stats(&self) -> PathBuf {
        self.out.join("stats.csv")
    }

    pub fn inventory(&self) -> PathBuf {
        self.out.join("inventory.txt")
    }

    pub fn samples(&self) -> PathBuf {
        self.out.join("samples.ndjson")
    }

    /// Grammar written by the synth stage.
    pub fn grammar(&self) -> PathBuf {
        self.out.join("grammars").join("synthetic.txt")
    }

    /// Lexicon written by the synth stage.
    pub fn lexicon(&self) -> PathBuf {
        self.out.join("lexicon.tsv")
    }

    pub fn vectors(&self, space: FeatureSpace) -> PathBuf {
        self.out.join("vectors").join(format!("{space}.txt"))
    }

    pub fn model(&self, space: FeatureSpace) -> PathBuf {
        self.out.join("models").join(format!("{space}.json"))
    }

    pub fn report(&self, space: FeatureSpace) -> PathBuf {
        self.out.join("report").join(format!("{space}_report.csv"))
    }

    pub fn confusion(&self, space: FeatureSpace) -> PathBuf {
        self.out.join("report").join(format!("{space}_confusion.csv"))
    }

    pub fn cross_report(&self, space: FeatureSpace) -> PathBuf {
        self.out.join("report").join(format!("{space}_cross_report.csv"))
    }

    pub fn cross_confusion(&self, space: FeatureSpace) -> PathBuf {
        self.out.join("report").join(format!("{space}_cross_confusion.csv"))
    }

    pub fn density(&self) -> PathBuf {
        self.out.join("report").join("density.csv")
    }

    pub fn unmask_curve(&self) -> PathBuf {
        self.out.join("report").join("unmasking.csv")
    }

    pub fn unmask_removed(&self) -> PathBuf {
        self.out.join("report").join("unmasking_removed.csv")
    }

    pub fn similarity(&self, space: FeatureSpace) -> PathBuf {
        self.out.join("report").join(format!("{space}_similarity.csv"))
    }

    pub fn manifest(&self, stage: Stage) -> PathBuf {
        self.manifest_dir.join(format!("{stage}.json"))
    }
}

/// Fingerprint record for one completed (or in-flight) stage. Contains
/// no timestamps so reruns stay byte-identical.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageManifest {
    pub stage: String,
    pub tool_version: String,
    pub seed: u64,
    pub config_sha256: String,
    /// Input path -> content sha256.
    pub inputs: BTreeMap<String, String>,
    /// Output path -> content sha256; empty while `partial`.
    pub outputs: BTreeMap<String, String>,
    /// True from stage start until its outputs are fully written.
    pub partial: bool,
}

#[derive(Debug, Clone)]
pub struct StageOutcome {
    pub stage: Stage,
    /// True when the manifest check proved the stage was already done.
    pub skipped: bool,
    pub outputs: Vec<PathBuf>,
}

/// Cap rayon's worker count for every later parallel section. Safe to
/// call more than once; only the first call takes effect.
pub fn limit_jobs(jobs: usize) {
    if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global() {
        log::debug!("thread pool already initialized: {e}");
    }
}

fn hash_file(path: &Path) -> std::io::Result<String> {
    Ok(sha256_hex(&std::fs::read(path)?))
}

fn hash_files(stage: Stage, paths: &[PathBuf]) -> Result<BTreeMap<String, String>, PipelineError> {
    let mut out = BTreeMap::new();
    for path in paths {
        let digest = hash_file(path).map_err(|e| {
            at::<String>(stage)(format!("hashing {}: {e}", path.display()))
        })?;
        out.insert(path.display().to_string(), digest);
    }
    Ok(out)
}

/// Samples file the analysis stages read: either the pre-built one from
/// the config or the artifact produced by `sample`/`synth`.
fn samples_file(config: &RunConfig, art: &Artifacts) -> PathBuf {
    config.inputs.samples.clone().unwrap_or_else(|| art.samples())
}

/// Grammar and lexicon paths: configured ones, else the synth artifacts.
fn grammar_files(config: &RunConfig, art: &Artifacts) -> (Vec<PathBuf>, PathBuf) {
    if config.grammars.paths.is_empty() {
        (vec![art.grammar()], art.lexicon())
    } else {
        (
            config.grammars.paths.clone(),
            config.grammars.lexicon.clone().expect("validated with paths"),
        )
    }
}

/// Declared inputs and outputs of one stage under this config. The input
/// list is what the manifest fingerprints; outputs are what must exist
/// afterwards.
fn stage_io(stage: Stage, config: &RunConfig, art: &Artifacts) -> (Vec<PathBuf>, Vec<PathBuf>) {
    let spaces = &config.features.spaces;
    let samples = samples_file(config, art);
    match stage {
        Stage::Synth => {
            let mut inputs = Vec::new();
            if let Some(synth) = &config.synth {
                if let Some(profiles) = &synth.profiles {
                    inputs.push(profiles.clone());
                }
            }
            (inputs, vec![art.samples(), art.grammar(), art.lexicon()])
        }
        Stage::Ingest => {
            let mut inputs = Vec::new();
            for path in [
                &config.inputs.web,
                &config.inputs.social,
                &config.inputs.cities,
                &config.inputs.tlds,
            ]
            .into_iter()
            .flatten()
            {
                inputs.push(path.clone());
            }
            (inputs, vec![art.documents()])
        }
        Stage::Map => (vec![art.documents()], vec![art.stats(), art.inventory()]),
        Stage::Sample => {
            let mut inputs = vec![art.documents(), art.inventory()];
            if let Some(groups) = &config.inputs.region_groups {
                inputs.push(groups.clone());
            }
            (inputs, vec![art.samples()])
        }
        Stage::Featurize => {
            let mut inputs = vec![samples];
            if spaces.contains(&FeatureSpace::Cxg) {
                let (grammars, lexicon) = grammar_files(config, art);
                inputs.push(grammars[0].clone());
                inputs.push(lexicon);
            }
            (inputs, spaces.iter().map(|&s| art.vectors(s)).collect())
        }
        Stage::Train => {
            let mut inputs = vec![samples];
            inputs.extend(spaces.iter().map(|&s| art.vectors(s)));
            (inputs, spaces.iter().map(|&s| art.model(s)).collect())
        }
        Stage::Eval => {
            let mut inputs = vec![samples];
            for &space in spaces {
                inputs.push(art.vectors(space));
                inputs.push(art.model(space));
            }
            let mut outputs = Vec::new();
            for &space in spaces {
                outputs.push(art.report(space));
                outputs.push(art.confusion(space));
            }
            (inputs, outputs)
        }
        Stage::Crossdomain => {
            let mut inputs = vec![samples];
            inputs.extend(spaces.iter().map(|&s| art.vectors(s)));
            let mut outputs = Vec::new();
            for &space in spaces {
                outputs.push(art.cross_report(space));
                outputs.push(art.cross_confusion(space));
            }
            (inputs, outputs)
        }
        Stage::Density => {
            let (grammars, lexicon) = grammar_files(config, art);
            let mut inputs = vec![samples];
            inputs.extend(grammars);
            inputs.push(lexicon);
            (inputs, vec![art.density()])
        }
        Stage::Unmask => {
            let space = spaces[0];
            let mut inputs = vec![samples, art.vectors(space)];
            // The tuned C is reused when a trained model is around.
            if config.unmasking.c.is_none() && art.model(space).exists() {
                inputs.push(art.model(space));
            }
            (inputs, vec![art.unmask_curve(), art.unmask_removed()])
        }
        Stage::Similarity => (
            spaces.iter().map(|&s| art.confusion(s)).collect(),
            spaces.iter().map(|&s| art.similarity(s)).collect(),
        ),
    }
}

/// Vectors joined with their samples' regions and splits, per register.
struct JoinedVectors {
    by_register: BTreeMap<Register, RegisterSet>,
}

impl JoinedVectors {
    fn load(
        stage: Stage,
        vectors_path: &Path,
        samples: &[RegionSample],
    ) -> Result<JoinedVectors, PipelineError> {
        let entries = read_vectors(vectors_path).map_err(at(stage))?;
        let by_id: HashMap<&str, &RegionSample> =
            samples.iter().map(|s| (s.sample_id.as_str(), s)).collect();
        let mut by_register: BTreeMap<Register, RegisterSet> = BTreeMap::new();
        for (id, vector) in entries {
            let sample = by_id.get(id.as_str()).ok_or_else(|| {
                at::<String>(stage)(format!("vector `{id}` has no sample"))
            })?;
            let set = by_register.entry(sample.register).or_default();
            let labeled = match sample.split {
                Split::Train => &mut set.train,
                Split::Dev => &mut set.dev,
                Split::Test => &mut set.test,
            };
            labeled.push(vector, sample.region.clone());
        }
        Ok(JoinedVectors { by_register })
    }

    /// All registers pooled, splits kept.
    fn pooled(&self) -> RegisterSet {
        let mut pooled = RegisterSet::default();
        for set in self.by_register.values() {
            pooled.train.extend_from(&set.train);
            pooled.dev.extend_from(&set.dev);
            pooled.test.extend_from(&set.test);
        }
        pooled
    }

    fn register(&self, register: Register) -> Option<&RegisterSet> {
        self.by_register.get(&register)
    }
}

fn execute(stage: Stage, config: &RunConfig, art: &Artifacts) -> Result<(), PipelineError> {
    match stage {
        Stage::Synth => stage_synth(config, art),
        Stage::Ingest => stage_ingest(config, art),
        Stage::Map => stage_map(config, art),
        Stage::Sample => stage_sample(config, art),
        Stage::Featurize => stage_featurize(config, art),
        Stage::Train => stage_train(config, art),
        Stage::Eval => stage_eval(config, art),
        Stage::Crossdomain => stage_crossdomain(config, art),
        Stage::Density => stage_density(config, art),
        Stage::Unmask => stage_unmask(config, art),
        Stage::Similarity => stage_similarity(config, art),
    }
}

fn stage_synth(config: &RunConfig, art: &Artifacts) -> Result<(), PipelineError> {
    let stage = Stage::Synth;
    let synth_config = config
        .synth
        .as_ref()
        .ok_or_else(|| at::<String>(stage)("missing [synth] section".into()))?;
    let profiles = synth_config.to_profiles().map_err(at(stage))?;
    let options = synth_config.to_options(config.seed);
    let corpus = synth::generate(&profiles, &options).map_err(at(stage))?;
    write_samples(&art.samples(), &corpus.samples).map_err(at(stage))?;
    corpus.grammar.write_to(&art.grammar()).map_err(at(stage))?;
    corpus.lexicon.write_to(&art.lexicon()).map_err(at(stage))?;
    Ok(())
}

fn stage_ingest(config: &RunConfig, art: &Artifacts) -> Result<(), PipelineError> {
    let stage = Stage::Ingest;
    let tlds = match &config.inputs.tlds {
        Some(path) => TldTable::from_paths(path, None).map_err(at(stage))?,
        None => TldTable::builtin(),
    };
    let cities = match &config.inputs.cities {
        Some(path) => {
            let file = std::fs::File::open(path).map_err(at(stage))?;
            CityIndex::from_csv_reader(std::io::BufReader::new(file)).map_err(at(stage))?
        }
        None => CityIndex::new(Vec::new()),
    };
    let ingestor = Ingestor::new(tlds, cities);
    let mut docs: Vec<GeoDocument> = Vec::new();
    if let Some(web) = &config.inputs.web {
        let records = read_web_records(web).map_err(at(stage))?;
        docs.extend(ingestor.ingest_web(&records));
    }
    if let Some(social) = &config.inputs.social {
        let records = read_social_records(social).map_err(at(stage))?;
        docs.extend(ingestor.ingest_social(&records));
    }
    let docs = deduplicate(docs);
    write_documents(&art.documents(), &docs).map_err(at(stage))?;
    Ok(())
}

fn stage_map(config: &RunConfig, art: &Artifacts) -> Result<(), PipelineError> {
    let stage = Stage::Map;
    let docs = read_documents(&art.documents()).map_err(at(stage))?;
    let stats = tabulate(&docs);
    write_stats_csv(&art.stats(), &stats).map_err(at(stage))?;
    let inventory = select_inventory(&stats, config.mapping.threshold);
    write_inventory(&art.inventory(), &inventory).map_err(at(stage))?;
    Ok(())
}

fn stage_sample(config: &RunConfig, art: &Artifacts) -> Result<(), PipelineError> {
    let stage = Stage::Sample;
    let docs = read_documents(&art.documents()).map_err(at(stage))?;
    let inventory =
        read_inventory(&art.inventory(), config.mapping.threshold).map_err(at(stage))?;
    let groups_map = match &config.inputs.region_groups {
        Some(path) => Some(read_region_groups(path).map_err(at(stage))?),
        None => None,
    };

    let mut grouped: BTreeMap<(String, Register), Vec<GeoDocument>> = BTreeMap::new();
    for mut doc in docs {
        if !inventory.contains(&doc.country) {
            continue;
        }
        if let Some(groups) = &groups_map {
            if let Some(region) = groups.get(&doc.country) {
                doc.country = region.clone();
            }
        }
        grouped.entry((doc.country.clone(), doc.register)).or_default().push(doc);
    }

    let plan = config.sampling.plan(config.seed);
    let mut all = Vec::new();
    for ((_, _), group) in grouped {
        let samples = aggregate(&group, config.seed);
        let samples = assign_splits(samples, &plan).map_err(at(stage))?;
        all.extend(samples);
    }
    write_samples(&art.samples(), &all).map_err(at(stage))?;
    Ok(())
}

fn stage_featurize(config: &RunConfig, art: &Artifacts) -> Result<(), PipelineError> {
    let stage = Stage::Featurize;
    let samples = read_samples(&samples_file(config, art)).map_err(at(stage))?;
    if samples.is_empty() {
        return Err(at::<String>(stage)("no samples to featurize".into()));
    }

    let needs_grammar = config.features.spaces.contains(&FeatureSpace::Cxg);
    let grammar_lexicon: Option<(Grammar, Lexicon)> = if needs_grammar {
        let (grammar_paths, lexicon_path) = grammar_files(config, art);
        let grammar = Grammar::from_path(&grammar_paths[0]).map_err(at(stage))?;
        let lexicon = Lexicon::from_path(&lexicon_path).map_err(at(stage))?;
        Some((grammar, lexicon))
    } else {
        None
    };

    for &space in &config.features.spaces {
        let entries: Vec<(String, FeatureVector)> = match space {
            FeatureSpace::Cxg => {
                let (grammar, lexicon) = grammar_lexicon.as_ref().expect("loaded above");
                let matcher = Matcher::new(grammar);
                samples
                    .par_iter()
                    .map(|s| (s.sample_id.clone(), cxg_vector(&matcher, lexicon, s)))
                    .collect()
            }
            FeatureSpace::Ngram1 | FeatureSpace::Ngram2 | FeatureSpace::Ngram3 => {
                let n = space.ngram_n().expect("ngram space");
                samples
                    .par_iter()
                    .map(|s| {
                        (
                            s.sample_id.clone(),
                            hash_ngram_vector(&s.text, n, config.features.hash_dim),
                        )
                    })
                    .collect()
            }
            FeatureSpace::Funct => {
                let list = FunctionWordList::builtin();
                samples
                    .par_iter()
                    .map(|s| (s.sample_id.clone(), function_word_vector(&s.text, &list)))
                    .collect()
            }
        };
        write_vectors(&art.vectors(space), &entries).map_err(at(stage))?;
    }
    Ok(())
}

fn stage_train(config: &RunConfig, art: &Artifacts) -> Result<(), PipelineError> {
    let stage = Stage::Train;
    let samples = read_samples(&samples_file(config, art)).map_err(at(stage))?;
    for &space in &config.features.spaces {
        let joined = JoinedVectors::load(stage, &art.vectors(space), &samples)?;
        let pooled = joined.pooled();
        if pooled.dev.is_empty() && config.classify.c_grid.len() > 1 {
            return Err(at::<String>(stage)(
                "tuning over a C grid needs dev samples; configure a dev split or a single C"
                    .into(),
            ));
        }
        let model = train(
            &pooled.train.vectors,
            &pooled.train.labels,
            &pooled.dev.vectors,
            &pooled.dev.labels,
            &config.classify.c_grid,
        )
        .map_err(at(stage))?;
        model.to_json_path(&art.model(space)).map_err(at(stage))?;
    }
    Ok(())
}

fn stage_eval(config: &RunConfig, art: &Artifacts) -> Result<(), PipelineError> {
    let stage = Stage::Eval;
    let samples = read_samples(&samples_file(config, art)).map_err(at(stage))?;
    for &space in &config.features.spaces {
        let model = LinearModel::from_json_path(&art.model(space)).map_err(at(stage))?;
        let joined = JoinedVectors::load(stage, &art.vectors(space), &samples)?;
        let test = joined.pooled().test;
        let report = evaluate(&model, &test.vectors, &test.labels).map_err(at(stage))?;
        write_report_csv(&art.report(space), &report).map_err(at(stage))?;
        write_confusion_csv(&art.confusion(space), &report).map_err(at(stage))?;
    }
    Ok(())
}

fn stage_crossdomain(config: &RunConfig, art: &Artifacts) -> Result<(), PipelineError> {
    let stage = Stage::Crossdomain;
    let samples = read_samples(&samples_file(config, art)).map_err(at(stage))?;
    let primary = config.classify.primary_register;
    let secondary = config.classify.secondary_register;
    for &space in &config.features.spaces {
        let joined = JoinedVectors::load(stage, &art.vectors(space), &samples)?;
        let missing = |register: Register| {
            at::<String>(stage)(format!("no {register} samples for cross-register transfer"))
        };
        let primary_set = joined.register(primary).ok_or_else(|| missing(primary))?;
        let secondary_set = joined.register(secondary).ok_or_else(|| missing(secondary))?;
        let (_, report) =
            run_experiment(primary_set, secondary_set, Mode::Cross, &config.classify.c_grid)
                .map_err(at(stage))?;
        write_report_csv(&art.cross_report(space), &report).map_err(at(stage))?;
        write_confusion_csv(&art.cross_confusion(space), &report).map_err(at(stage))?;
    }
    Ok(())
}

fn stage_density(config: &RunConfig, art: &Artifacts) -> Result<(), PipelineError> {
    let stage = Stage::Density;
    let samples = read_samples(&samples_file(config, art)).map_err(at(stage))?;
    let (grammar_paths, lexicon_path) = grammar_files(config, art);
    let lexicon = Lexicon::from_path(&lexicon_path).map_err(at(stage))?;
    let groups = group_by_region(&samples);
    let mut columns = Vec::new();
    for path in &grammar_paths {
        let grammar = Grammar::from_path(path).map_err(at(stage))?;
        let density = feature_density(&grammar, &lexicon, &groups).map_err(at(stage))?;
        columns.push((grammar.name.clone(), density));
    }
    write_density_csv(&art.density(), &columns).map_err(at(stage))?;
    Ok(())
}

fn stage_unmask(config: &RunConfig, art: &Artifacts) -> Result<(), PipelineError> {
    let stage = Stage::Unmask;
    let space = config.features.spaces[0];
    let samples = read_samples(&samples_file(config, art)).map_err(at(stage))?;
    let joined = JoinedVectors::load(stage, &art.vectors(space), &samples)?;
    let pooled = joined.pooled();
    let c = match config.unmasking.c {
        Some(c) => c,
        None => match LinearModel::from_json_path(&art.model(space)) {
            Ok(model) => model.c,
            Err(_) => 1.0,
        },
    };
    let curve = unmask(
        &pooled.train.vectors,
        &pooled.train.labels,
        &pooled.test.vectors,
        &pooled.test.labels,
        &UnmaskOptions { rounds: config.unmasking.rounds, c },
    )
    .map_err(at(stage))?;
    write_curve_csv(&art.unmask_curve(), &curve).map_err(at(stage))?;
    write_removed_log_csv(&art.unmask_removed(), &curve).map_err(at(stage))?;
    Ok(())
}

fn stage_similarity(config: &RunConfig, art: &Artifacts) -> Result<(), PipelineError> {
    let stage = Stage::Similarity;
    for &space in &config.features.spaces {
        let (classes, confusion) = read_confusion_csv(&art.confusion(space)).map_err(at(stage))?;
        let pairs = similarity_from_counts(&classes, &confusion);
        write_similarity_csv(&art.similarity(space), &pairs).map_err(at(stage))?;
    }
    Ok(())
}

fn read_manifest(path: &Path) -> Option<StageManifest> {
    let text = std::fs::read_to_string(path).ok()?;
    serde_json::from_str(&text).ok()
}

fn write_manifest(path: &Path, manifest: &StageManifest) -> std::io::Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    let mut text = serde_json::to_string_pretty(manifest).expect("manifest serializes");
    text.push('\n');
    std::fs::write(path, text)
}

/// True when the stored manifest proves this exact stage already ran to
/// completion on these exact inputs and its outputs are intact.
fn can_skip(
    manifest: Option<&StageManifest>,
    config_hash: &str,
    inputs: &BTreeMap<String, String>,
    outputs: &[PathBuf],
) -> bool {
    let Some(m) = manifest else {
        return false;
    };
    if m.partial || m.config_sha256 != config_hash || &m.inputs != inputs {
        return false;
    }
    outputs.iter().all(|path| {
        m.outputs
            .get(&path.display().to_string())
            .and_then(|want| hash_file(path).ok().map(|got| got == *want))
            .unwrap_or(false)
    })
}

/// Run every requested stage in dependency order. Completed stages with
/// unchanged fingerprints are skipped.
pub fn run(config: &RunConfig) -> Result<Vec<StageOutcome>, PipelineError> {
    config.validate()?;
    if let Some(jobs) = config.jobs {
        limit_jobs(jobs);
    }
    let art = Artifacts::for_config(config);
    let config_hash = config.sha256();
    let stages = config.effective_stages()?;

    let mut outcomes = Vec::with_capacity(stages.len());
    for stage in stages {
        let (input_paths, output_paths) = stage_io(stage, config, &art);
        for path in &input_paths {
            if !path.exists() {
                return Err(at::<String>(stage)(format!(
                    "missing input {}; run the producing stage first or fix the config",
                    path.display()
                )));
            }
        }
        let inputs = hash_files(stage, &input_paths)?;
        let manifest_path = art.manifest(stage);
        if can_skip(read_manifest(&manifest_path).as_ref(), &config_hash, &inputs, &output_paths) {
            log::info!("{stage}: up to date, skipping");
            outcomes.push(StageOutcome { stage, skipped: true, outputs: output_paths });
            continue;
        }

        let mut manifest = StageManifest {
            stage: stage.to_string(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            seed: config.seed,
            config_sha256: config_hash.clone(),
            inputs,
            outputs: BTreeMap::new(),
            partial: true,
        };
        write_manifest(&manifest_path, &manifest).map_err(at(stage))?;

        execute(stage, config, &art)?;

        for path in &output_paths {
            if !path.exists() {
                return Err(at::<String>(stage)(format!(
                    "stage finished without writing {}",
                    path.display()
                )));
            }
        }
        manifest.outputs = hash_files(stage, &output_paths)?;
        manifest.partial = false;
        write_manifest(&manifest_path, &manifest).map_err(at(stage))?;
        log::info!("{stage}: done");
        outcomes.push(StageOutcome { stage, skipped: false, outputs: output_paths });
    }
    Ok(outcomes)
}
