//! Compare how densely different regions use a grammar's constructions.
//!
//! Density is each region's mean matches per sample, expressed as the
//! percent deviation from the unweighted mean across regions, so the
//! column sums to roughly zero. Region A is built to use the grammar
//! twice as often as region B, which lands near +33% / -33%.

use dialectid::cxg::{feature_density, group_by_region, Grammar, Lexicon};
use dialectid::synth::{generate, DialectProfile, SynthOptions};

fn main() -> anyhow::Result<()> {
    let heavy = DialectProfile::new("AA", [("greeting".to_string(), 0.04)].into());
    let light = DialectProfile::new("BB", [("greeting".to_string(), 0.02)].into());
    let even = DialectProfile::new("CC", [("greeting".to_string(), 0.03)].into());

    let corpus = generate(
        &[heavy, light, even],
        &SynthOptions {
            train_per_region: 150,
            dev_per_region: 0,
            test_per_region: 0,
            words_per_sample: 1_000,
            seed: 5,
            ..SynthOptions::default()
        },
    )?;

    let groups = group_by_region(&corpus.samples);
    let density = feature_density(&corpus.grammar, &corpus.lexicon, &groups)?;

    println!("{:<8} {:>10}", "region", "density");
    for (region, percent) in &density {
        println!("{:<8} {:>+9.2}%", region, percent);
    }
    let sum: f64 = density.values().sum();
    println!("column sum {sum:+.6} (zero by construction)");

    // A second, unrelated grammar that no sample ever triggers shows the
    // all-zero case: every region reports 0%.
    let silent = Grammar::parse("silent", "LEX:zzz -- LEX:yyy\n")?;
    let flat = feature_density(&silent, &Lexicon::new(), &groups)?;
    assert!(flat.values().all(|&p| p == 0.0));
    println!("silent grammar: all regions 0%");
    Ok(())
}
