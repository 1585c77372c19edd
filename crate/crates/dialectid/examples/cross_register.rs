//! Measure how well a model trained on one register transfers to another.
//!
//! Two synthetic corpora make the contrast: in the first, web and social
//! share each region's construction profile, so cross-register accuracy
//! tracks within-register accuracy. In the second, the social register
//! replaces every region's profile with one shared (region-blind)
//! profile, and transfer collapses to chance.

use std::collections::BTreeMap;

use dialectid::classify::{run_experiment, LabeledVectors, Mode, RegisterSet};
use dialectid::cxg::Matcher;
use dialectid::features::cxg_vector;
use dialectid::sampling::Split;
use dialectid::synth::{disjoint_profiles, generate, RegisterShift, SynthCorpus, SynthOptions};
use dialectid::Register;

fn register_sets(corpus: &SynthCorpus) -> BTreeMap<Register, RegisterSet> {
    let matcher = Matcher::new(&corpus.grammar);
    let mut sets: BTreeMap<Register, RegisterSet> = BTreeMap::new();
    for sample in &corpus.samples {
        let vector = cxg_vector(&matcher, &corpus.lexicon, sample);
        let set = sets.entry(sample.register).or_default();
        let bucket: &mut LabeledVectors = match sample.split {
            Split::Train => &mut set.train,
            Split::Dev => &mut set.dev,
            Split::Test => &mut set.test,
        };
        bucket.push(vector, sample.region.clone());
    }
    sets
}

fn report(name: &str, corpus: &SynthCorpus) -> anyhow::Result<()> {
    let sets = register_sets(corpus);
    let web = &sets[&Register::Web];
    let social = &sets[&Register::Social];
    let grid = [0.1, 1.0];

    let (_, within) = run_experiment(web, web, Mode::Within, &grid)?;
    let (_, cross) = run_experiment(web, social, Mode::Cross, &grid)?;
    println!(
        "{name}: within-register F1 {:.3}, cross-register F1 {:.3}",
        within.weighted.f1, cross.weighted.f1
    );
    Ok(())
}

fn main() -> anyhow::Result<()> {
    let options = SynthOptions {
        train_per_region: 50,
        dev_per_region: 15,
        test_per_region: 15,
        registers: vec![Register::Web, Register::Social],
        words_per_sample: 400,
        seed: 3,
        ..SynthOptions::default()
    };

    let shared = disjoint_profiles(4, 3, 0.02);
    report("shared signal  ", &generate(&shared, &options)?)?;

    // Every region's social register draws from the same profile: the
    // web-trained model has nothing to key on.
    let blind_profile: BTreeMap<String, f64> =
        (0..4).map(|c| (format!("c{c:04}"), 0.02)).collect();
    let mut destroyed = disjoint_profiles(4, 3, 0.02);
    for profile in &mut destroyed {
        profile.register_shift = Some(RegisterShift::Replace(blind_profile.clone()));
    }
    report("destroyed signal", &generate(&destroyed, &options)?)?;
    Ok(())
}
