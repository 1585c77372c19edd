//! Drop repeated documents from a corpus.
//!
//! The key is a 128-bit hash of the case-folded, whitespace-collapsed
//! text, so reposts that differ only in casing or spacing collapse to
//! one surviving copy (the first seen).

use dialectid::ingest::{GeoDocument, RawDocument, Register};

fn doc(id: &str, text: &str) -> GeoDocument {
    let raw = RawDocument {
        source_id: id.into(),
        register: Register::Social,
        text: text.into(),
        domain_suffix: None,
        coordinates: None,
        month: "2020-01".parse().unwrap(),
        language: Some("en".into()),
    };
    GeoDocument::from_raw(raw, "NZ".into())
}

fn main() {
    let docs = vec![
        doc("a", "the match starts at seven"),
        doc("b", "The   match starts at SEVEN"),
        doc("c", "the match starts at eight"),
        doc("d", "the match starts at seven"),
    ];
    println!("before: {} documents", docs.len());

    let kept = dialectid::ingest::deduplicate(docs);
    println!("after:  {} documents", kept.len());
    for d in &kept {
        println!("  kept {} -> {:?}", d.source_id, d.text);
    }
}
