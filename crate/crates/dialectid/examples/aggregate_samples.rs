//! Cut a region's documents into exact 1,000-word samples and split them.
//!
//! Documents are shuffled and concatenated, so samples mix sources and a
//! boundary document contributes to both neighbors. Split sizing here is
//! scaled far below the production plan to stay readable: 2 dev samples,
//! then the remainder 5:1 train:test.

use dialectid::ingest::{GeoDocument, RawDocument, Register};
use dialectid::sampling::{aggregate, assign_splits, Split, SplitPlan};

fn doc(i: usize, words: usize) -> GeoDocument {
    let text: Vec<String> = (0..words).map(|w| format!("w{i}x{w}")).collect();
    let raw = RawDocument {
        source_id: format!("doc{i:03}"),
        register: Register::Web,
        text: text.join(" "),
        domain_suffix: Some("nz".into()),
        coordinates: None,
        month: "2021-06".parse().unwrap(),
        language: None,
    };
    GeoDocument::from_raw(raw, "NZ".into())
}

fn main() -> anyhow::Result<()> {
    // 24 documents of 700 words each: 16,800 words -> 16 full samples.
    let docs: Vec<GeoDocument> = (0..24).map(|i| doc(i, 700)).collect();
    let total: u64 = docs.iter().map(|d| d.word_count).sum();

    let samples = aggregate(&docs, 7);
    println!("{} docs, {} words -> {} samples", docs.len(), total, samples.len());
    assert!(samples.iter().all(|s| s.token_count() == 1_000));

    let plan = SplitPlan {
        dev_per_region: 2,
        min_train: 5,
        max_train: 80,
        min_test: 1,
        max_test: 16,
        seed: 7,
    };
    let samples = assign_splits(samples, &plan)?;
    for split in [Split::Train, Split::Dev, Split::Test] {
        let n = samples.iter().filter(|s| s.split == split).count();
        println!("  {:<5} {n:>3} samples", split.as_str());
    }

    let first = &samples[0];
    let preview: Vec<&str> = first.tokens().take(6).collect();
    println!("{} starts: {} ...", first.sample_id, preview.join(" "));
    Ok(())
}
