//! Count construction matches in annotated text.
//!
//! A construction is a sequence of slot constraints over contiguous
//! tokens: LEX pins the word form, SYN the lexicon's syntactic tag, SEM
//! its semantic class, SYNSEM both. Matches may overlap; each start
//! position is counted.

use dialectid::cxg::{annotate_text, count_matches, Grammar, Lexicon};

fn main() -> anyhow::Result<()> {
    let mut lexicon = Lexicon::new();
    for (form, syn, sem) in [
        ("i", "PRON", Some("person")),
        ("you", "PRON", Some("person")),
        ("need", "VERB", Some("want")),
        ("want", "VERB", Some("want")),
        ("a", "DET", None),
        ("the", "DET", None),
        ("coffee", "NOUN", Some("drink")),
        ("tea", "NOUN", Some("drink")),
        ("flat", "ADJ", None),
        ("white", "ADJ", None),
    ] {
        lexicon.insert(form, syn, sem);
    }

    let grammar = Grammar::parse(
        "demo",
        "# desire framed with an article\n\
         SEM:person -- SEM:want -- SYN:DET\n\
         # any determiner + noun pair\n\
         SYN:DET -- SYN:NOUN\n\
         # the fixed phrase, by word form\n\
         LEX:flat -- LEX:white\n",
    )?;

    let text = "I want a coffee and you need the tea but I want a flat white";
    let tokens = annotate_text(text, &lexicon);
    let counts = count_matches(&grammar, &tokens);

    println!("text: {text}\n");
    for (construction, count) in grammar.constructions.iter().zip(&counts) {
        let slots: Vec<String> = construction.slots.iter().map(|s| s.to_string()).collect();
        println!("{:<40} {count} match(es)", slots.join(" -- "));
    }
    assert_eq!(counts, vec![3, 2, 1]);
    Ok(())
}
