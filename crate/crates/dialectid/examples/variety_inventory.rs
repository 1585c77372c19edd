//! Decide which countries have enough text to model as varieties.
//!
//! A country qualifies only when BOTH registers clear the word
//! threshold, so a variety is never represented by web text alone or
//! social text alone.

use dialectid::ingest::{GeoDocument, RawDocument, Register};
use dialectid::mapping::{select_inventory, tabulate};

fn doc(country: &str, register: Register, words: usize) -> GeoDocument {
    let raw = RawDocument {
        source_id: format!("{country}-{register}"),
        register,
        text: vec!["word"; words].join(" "),
        domain_suffix: None,
        coordinates: None,
        month: "2020-01".parse().unwrap(),
        language: None,
    };
    GeoDocument::from_raw(raw, country.into())
}

fn main() {
    let docs = vec![
        doc("AU", Register::Web, 1_500),
        doc("AU", Register::Social, 1_200),
        doc("IE", Register::Web, 2_000),
        doc("IE", Register::Social, 400), // social side too thin
        doc("MY", Register::Web, 900),
        doc("MY", Register::Social, 3_000),
    ];

    let stats = tabulate(&docs);
    println!("{:<8} {:>10} {:>10}", "country", "web", "social");
    for country in stats.countries() {
        println!(
            "{:<8} {:>10} {:>10}",
            country,
            stats.words(&country, Register::Web),
            stats.words(&country, Register::Social),
        );
    }

    let threshold = 1_000;
    let inventory = select_inventory(&stats, threshold);
    println!("\nthreshold {threshold} words per register:");
    println!("inventory = {:?}", inventory.varieties);
    for shut_out in ["IE", "MY"] {
        assert!(!inventory.contains(shut_out));
    }
}
