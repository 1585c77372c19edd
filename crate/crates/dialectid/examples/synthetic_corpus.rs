//! Generate a corpus with known construction statistics.
//!
//! Each profile gives per-token trigger probabilities, so a sample's
//! construction counts are Binomial(words, p) by design and the bundled
//! grammar recovers them exactly. Register shifts and lexicon bias show
//! the two knobs: social text can scale or replace the web profile, and
//! background words can be steered per region.

use std::collections::BTreeMap;

use dialectid::cxg::{annotate_text, count_matches};
use dialectid::synth::{generate, DialectProfile, RegisterShift, SynthOptions};
use dialectid::Register;

fn main() -> anyhow::Result<()> {
    let mut kiwi = DialectProfile::new(
        "NZ",
        BTreeMap::from([("eh-tag".to_string(), 0.03), ("wee-adj".to_string(), 0.01)]),
    );
    // Social register doubles both rates.
    kiwi.register_shift = Some(RegisterShift::Scale(2.0));
    kiwi.lexicon_bias =
        BTreeMap::from([("bach".to_string(), 3.0), ("togs".to_string(), 1.0)]);

    let scot = DialectProfile::new(
        "SC",
        BTreeMap::from([("wee-adj".to_string(), 0.04)]),
    );

    let corpus = generate(
        &[kiwi, scot],
        &SynthOptions {
            train_per_region: 40,
            dev_per_region: 0,
            test_per_region: 10,
            registers: vec![Register::Web, Register::Social],
            words_per_sample: 1_000,
            seed: 42,
            ..SynthOptions::default()
        },
    )?;

    println!(
        "{} samples, grammar of {} constructions: {:?}",
        corpus.samples.len(),
        corpus.grammar.len(),
        corpus.construction_names
    );

    // Mean matches per sample for each (region, register) cell.
    let mut totals: BTreeMap<(String, Register), (Vec<u64>, usize)> = BTreeMap::new();
    for sample in &corpus.samples {
        let tokens = annotate_text(&sample.text, &corpus.lexicon);
        let counts = count_matches(&corpus.grammar, &tokens);
        let entry = totals
            .entry((sample.region.clone(), sample.register))
            .or_insert_with(|| (vec![0; corpus.grammar.len()], 0));
        for (slot, c) in entry.0.iter_mut().zip(&counts) {
            *slot += *c as u64;
        }
        entry.1 += 1;
    }
    println!("\nmean matches per 1,000-word sample:");
    println!("{:<14} {:>8} {:>8}", "cell", "eh-tag", "wee-adj");
    for ((region, register), (sums, n)) in &totals {
        println!(
            "{:<14} {:>8.1} {:>8.1}",
            format!("{region}/{register}"),
            sums[0] as f64 / *n as f64,
            sums[1] as f64 / *n as f64,
        );
    }

    let nz_web = corpus
        .samples
        .iter()
        .find(|s| s.region == "NZ" && s.register == Register::Web)
        .unwrap();
    let biased: Vec<&str> =
        nz_web.tokens().filter(|t| *t == "bach" || *t == "togs").take(8).collect();
    println!("\nNZ background words drawn 3:1 bach:togs, e.g. {biased:?}");
    Ok(())
}
