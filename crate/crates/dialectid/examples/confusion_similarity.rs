//! Read variety similarity out of a confusion matrix.
//!
//! Two varieties that the classifier confuses often are, by this
//! measure, similar: the score for a pair is the sum of both
//! off-diagonal cells, so it is symmetric and ignores the diagonal.

use dialectid::classify::{report_from_confusion, similarity_from_confusion};

fn main() {
    let classes: Vec<String> = ["AU", "GB", "NZ", "US"].map(String::from).into();
    // Truth in rows, predictions in columns. AU and NZ leak into each
    // other; US is nearly never confused with anyone.
    let confusion = vec![
        vec![80, 2, 17, 1],
        vec![3, 90, 5, 2],
        vec![21, 4, 74, 1],
        vec![0, 3, 1, 96],
    ];

    let report = report_from_confusion(classes, confusion);
    let similarity = similarity_from_confusion(&report);

    let mut pairs: Vec<_> = similarity.iter().collect();
    pairs.sort_by_key(|(_, &count)| std::cmp::Reverse(count));

    println!("{:<12} {:>10}", "pair", "confusions");
    for ((a, b), count) in pairs {
        println!("{:<12} {:>10}", format!("{a}-{b}"), count);
    }

    let top = similarity.get(&("AU".into(), "NZ".into())).copied().unwrap();
    assert_eq!(top, 17 + 21);
    println!("\nmost similar pair: AU-NZ with {top} cross-misclassifications");
}
