//! Build the three feature representations from one text sample.
//!
//! Construction counts live in a grammar-indexed space, word n-grams are
//! hashed into a fixed 30,000-dimension space, and function words index
//! into the built-in stopword list. All three share the same sparse
//! vector type, so the classifier is representation-agnostic.

use dialectid::cxg::{Grammar, Lexicon, Matcher};
use dialectid::features::{
    cxg_vector, function_word_vector, hash_ngram_vector, FunctionWordList,
};
use dialectid::sampling::{RegionSample, Split};
use dialectid::Register;

fn main() -> anyhow::Result<()> {
    let mut lexicon = Lexicon::new();
    lexicon.insert("reckon", "VERB", Some("opine"));
    lexicon.insert("i", "PRON", Some("person"));
    let grammar = Grammar::parse("demo", "SEM:person -- SEM:opine\nLEX:i\n")?;

    let sample = RegionSample {
        sample_id: "ZA-web-000001".into(),
        region: "ZA".into(),
        register: Register::Web,
        split: Split::Train,
        text: "i reckon the weather will hold but i reckon we should leave early".into(),
    };

    let matcher = Matcher::new(&grammar);
    let constructions = cxg_vector(&matcher, &lexicon, &sample);
    println!("construction space (dim {}):", constructions.dim);
    for &(index, count) in &constructions.values {
        println!("  construction #{index}: {count}");
    }

    let ngrams = hash_ngram_vector(&sample.text, 3, 30_000);
    println!(
        "hashed word 3-grams: {} distinct buckets, {} total grams",
        ngrams.values.len(),
        ngrams.total()
    );

    let list = FunctionWordList::builtin();
    let funct = function_word_vector(&sample.text, &list);
    println!("function words ({} in the list):", list.len());
    for &(index, count) in &funct.values {
        println!("  {:<8} {count}", list.words()[index as usize]);
    }
    Ok(())
}
