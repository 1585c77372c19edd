//! Construction match counting. `Matcher` indexes constructions by their
//! first slot so each position only tries plausible candidates;
//! `naive_count_matches` is the position-by-position reference scan and
//! stays in-tree as the oracle the fast path is tested against.

use std::collections::HashMap;

use crate::cxg::{AnnotatedToken, Construction, Grammar, SlotConstraint};
use crate::text::fold;

/// Single-slot acceptance. LEX compares case-folded forms; SEM never
/// matches a token without a semantic class.
pub fn slot_matches(constraint: &SlotConstraint, token: &AnnotatedToken) -> bool {
    match constraint {
        SlotConstraint::Lex(w) => fold(&token.form) == *w,
        SlotConstraint::Syn(t) => token.syn == *t,
        SlotConstraint::Sem(c) => token.sem.as_deref() == Some(c),
        SlotConstraint::SynSem { syn, sem } => {
            token.syn == *syn && token.sem.as_deref() == Some(sem)
        }
    }
}

/// Reusable matcher over one grammar. Construction ids are bucketed by
/// what their first slot can accept, so a position is only checked
/// against constructions whose first slot fits its token.
pub struct Matcher<'g> {
    grammar: &'g Grammar,
    by_lex: HashMap<&'g str, Vec<usize>>,
    by_syn: HashMap<&'g str, Vec<usize>>,
    by_sem: HashMap<&'g str, Vec<usize>>,
    by_synsem: HashMap<(&'g str, &'g str), Vec<usize>>,
}

impl<'g> Matcher<'g> {
    pub fn new(grammar: &'g Grammar) -> Self {
        let mut m = Matcher {
            grammar,
            by_lex: HashMap::new(),
            by_syn: HashMap::new(),
            by_sem: HashMap::new(),
            by_synsem: HashMap::new(),
        };
        for c in &grammar.constructions {
            match &c.slots[0] {
                SlotConstraint::Lex(w) => m.by_lex.entry(w).or_default().push(c.id),
                SlotConstraint::Syn(t) => m.by_syn.entry(t).or_default().push(c.id),
                SlotConstraint::Sem(s) => m.by_sem.entry(s).or_default().push(c.id),
                SlotConstraint::SynSem { syn, sem } => {
                    m.by_synsem.entry((syn, sem)).or_default().push(c.id)
                }
            }
        }
        m
    }

    pub fn grammar(&self) -> &'g Grammar {
        self.grammar
    }

    /// Count vector indexed by construction id; entry c is the number of
    /// start positions where c matches contiguously.
    pub fn count(&self, tokens: &[AnnotatedToken]) -> Vec<u32> {
        let mut counts = vec![0u32; self.grammar.len()];
        if tokens.is_empty() {
            return counts;
        }
        // LEX slots store folded forms; fold each token once up front.
        let folded: Vec<String> = tokens.iter().map(|t| fold(&t.form)).collect();

        let check = |c: &Construction, start: usize| -> bool {
            if start + c.slots.len() > tokens.len() {
                return false;
            }
            c.slots.iter().zip(start..).all(|(slot, j)| match slot {
                SlotConstraint::Lex(w) => folded[j] == *w,
                SlotConstraint::Syn(t) => tokens[j].syn == *t,
                SlotConstraint::Sem(s) => tokens[j].sem.as_deref() == Some(s),
                SlotConstraint::SynSem { syn, sem } => {
                    tokens[j].syn == *syn && tokens[j].sem.as_deref() == Some(sem)
                }
            })
        };

        for (i, token) in tokens.iter().enumerate() {
            let try_bucket = |bucket: Option<&Vec<usize>>, counts: &mut Vec<u32>| {
                if let Some(ids) = bucket {
                    for &id in ids {
                        if check(&self.grammar.constructions[id], i) {
                            counts[id] += 1;
                        }
                    }
                }
            };
            try_bucket(self.by_lex.get(folded[i].as_str()), &mut counts);
            try_bucket(self.by_syn.get(token.syn.as_str()), &mut counts);
            if let Some(sem) = token.sem.as_deref() {
                try_bucket(self.by_sem.get(sem), &mut counts);
                try_bucket(self.by_synsem.get(&(token.syn.as_str(), sem)), &mut counts);
            }
        }
        counts
    }
}

pub fn count_matches(grammar: &Grammar, tokens: &[AnnotatedToken]) -> Vec<u32> {
    Matcher::new(grammar).count(tokens)
}

/// Oracle: try every construction at every start position through
/// `slot_matches`, no indexing, no pre-folding.
pub fn naive_count_matches(grammar: &Grammar, tokens: &[AnnotatedToken]) -> Vec<u32> {
    let mut counts = vec![0u32; grammar.len()];
    for c in &grammar.constructions {
        for start in 0..tokens.len() {
            if start + c.slots.len() > tokens.len() {
                break;
            }
            if c.slots.iter().zip(&tokens[start..]).all(|(s, t)| slot_matches(s, t)) {
                counts[c.id] += 1;
            }
        }
    }
    counts
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cxg::{annotate, Lexicon};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn tok(form: &str, syn: &str, sem: Option<&str>) -> AnnotatedToken {
        AnnotatedToken { form: form.into(), syn: syn.into(), sem: sem.map(String::from) }
    }

    #[test]
    fn slot_matching_rules() {
        let mailed = tok("mailed", "VERB", Some("transfer"));
        assert!(slot_matches(
            &SlotConstraint::SynSem { syn: "VERB".into(), sem: "transfer".into() },
            &mailed
        ));
        // SEM needs a class present.
        assert!(!slot_matches(&SlotConstraint::Sem("animate".into()), &tok("he", "NOUN", None)));
        // SYN ignores the class.
        assert!(slot_matches(&SlotConstraint::Syn("NOUN".into()), &tok("letter", "NOUN", Some("artifact"))));
        // LEX folds case.
        assert!(slot_matches(&SlotConstraint::Lex("the".into()), &tok("The", "DET", None)));
    }

    #[test]
    fn ditransitive_transfer_example_counts_once() {
        let g = Grammar::parse(
            "g",
            "SYN:NOUN -- SYNSEM:VERB:transfer -- SYNSEM:NOUN:animate -- SYN:NOUN\n",
        )
        .unwrap();
        // "a letter" annotated as one noun token headed by "letter".
        let tokens = vec![
            tok("He", "NOUN", None),
            tok("mailed", "VERB", Some("transfer")),
            tok("Mary", "NOUN", Some("animate")),
            tok("a letter", "NOUN", Some("artifact")),
        ];
        assert_eq!(count_matches(&g, &tokens), vec![1]);
        assert_eq!(naive_count_matches(&g, &tokens), vec![1]);
    }

    #[test]
    fn empty_grammar_gives_empty_vector() {
        let g = Grammar::parse("g", "").unwrap();
        assert_eq!(count_matches(&g, &[tok("x", "A", None)]), Vec::<u32>::new());
    }

    #[test]
    fn overlapping_starts_all_count() {
        let g = Grammar::parse("g", "SYN:A -- SYN:A\n").unwrap();
        let tokens: Vec<AnnotatedToken> = (0..4).map(|i| tok(&format!("w{i}"), "A", None)).collect();
        assert_eq!(count_matches(&g, &tokens), vec![3]);
    }

    #[test]
    fn lexicon_driven_match() {
        let mut lex = Lexicon::new();
        for (w, syn, sem) in [
            ("he", "NOUN", None),
            ("mailed", "VERB", Some("transfer")),
            ("mary", "NOUN", Some("animate")),
            ("letters", "NOUN", Some("artifact")),
        ] {
            lex.insert(w, syn, sem);
        }
        let g = Grammar::parse("g", "SYN:NOUN -- SYNSEM:VERB:transfer -- SYNSEM:NOUN:animate -- SYN:NOUN\n").unwrap();
        let tokens = annotate("He mailed Mary letters".split_whitespace(), &lex);
        assert_eq!(count_matches(&g, &tokens), vec![1]);
    }

    fn random_grammar(rng: &mut ChaCha8Rng) -> Grammar {
        let syns = ["A", "B", "C"];
        let sems = ["x", "y"];
        let forms = ["w1", "w2", "w3", "w4", "w5"];
        let mut lines = Vec::new();
        let n = rng.gen_range(1..=20);
        for _ in 0..n {
            let len = rng.gen_range(1..=4);
            let slots: Vec<String> = (0..len)
                .map(|_| match rng.gen_range(0..4) {
                    0 => format!("LEX:{}", forms[rng.gen_range(0..forms.len())]),
                    1 => format!("SYN:{}", syns[rng.gen_range(0..syns.len())]),
                    2 => format!("SEM:{}", sems[rng.gen_range(0..sems.len())]),
                    _ => format!(
                        "SYNSEM:{}:{}",
                        syns[rng.gen_range(0..syns.len())],
                        sems[rng.gen_range(0..sems.len())]
                    ),
                })
                .collect();
            lines.push(slots.join(" -- "));
        }
        lines.sort();
        lines.dedup();
        Grammar::parse("random", &lines.join("\n")).unwrap()
    }

    fn random_tokens(rng: &mut ChaCha8Rng, n: usize) -> Vec<AnnotatedToken> {
        let syns = ["A", "B", "C"];
        let sems = ["x", "y"];
        let forms = ["w1", "w2", "w3", "w4", "w5"];
        (0..n)
            .map(|_| {
                let sem = if rng.gen_bool(0.5) { Some(sems[rng.gen_range(0..sems.len())]) } else { None };
                tok(forms[rng.gen_range(0..forms.len())], syns[rng.gen_range(0..syns.len())], sem)
            })
            .collect()
    }

    #[test]
    fn indexed_matcher_agrees_with_naive_scan() {
        let mut rng = ChaCha8Rng::seed_from_u64(6021);
        for _ in 0..500 {
            let g = random_grammar(&mut rng);
            let tokens = random_tokens(&mut rng, 200);
            assert_eq!(Matcher::new(&g).count(&tokens), naive_count_matches(&g, &tokens));
        }
    }

    #[test]
    fn appending_tokens_never_decreases_counts() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for _ in 0..100 {
            let g = random_grammar(&mut rng);
            let mut tokens = random_tokens(&mut rng, 50);
            let before = count_matches(&g, &tokens);
            tokens.extend(random_tokens(&mut rng, 10));
            let after = count_matches(&g, &tokens);
            assert!(before.iter().zip(&after).all(|(b, a)| a >= b));
        }
    }

    #[test]
    fn concatenation_at_least_sums_part_counts() {
        let mut rng = ChaCha8Rng::seed_from_u64(78);
        for _ in 0..100 {
            let g = random_grammar(&mut rng);
            let t1 = random_tokens(&mut rng, 60);
            let t2 = random_tokens(&mut rng, 60);
            let c1 = count_matches(&g, &t1);
            let c2 = count_matches(&g, &t2);
            let mut joined = t1.clone();
            joined.extend(t2);
            let cj = count_matches(&g, &joined);
            assert!(cj.iter().zip(c1.iter().zip(&c2)).all(|(j, (a, b))| *j >= a + b));
        }
    }
}
