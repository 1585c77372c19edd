//! Word-level annotation against a lexicon. Tagging quality is whatever
//! the lexicon provides; unknown words fall back to the UNK tag.

use std::collections::HashMap;
use std::path::Path;

use crate::cxg::CxgError;
use crate::text::fold;

/// Syntactic tag for words missing from the lexicon.
pub const UNK_TAG: &str = "UNK";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnnotatedToken {
    pub form: String,
    pub syn: String,
    pub sem: Option<String>,
}

/// Case-folded word → (syntactic tag, optional semantic class).
/// TSV rows `form<TAB>syn<TAB>sem` with `-` for no class.
#[derive(Debug, Clone, Default)]
pub struct Lexicon {
    entries: HashMap<String, (String, Option<String>)>,
}

impl Lexicon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, form: &str, syn: &str, sem: Option<&str>) {
        self.entries.insert(fold(form), (syn.to_string(), sem.map(String::from)));
    }

    pub fn get(&self, word: &str) -> Option<(&str, Option<&str>)> {
        self.entries.get(&fold(word)).map(|(syn, sem)| (syn.as_str(), sem.as_deref()))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn from_tsv(text: &str) -> Result<Self, CxgError> {
        let mut lex = Lexicon::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim_end();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut parts = line.split('\t');
            let (form, syn, sem) = match (parts.next(), parts.next(), parts.next(), parts.next()) {
                (Some(f), Some(s), Some(c), None) if !f.is_empty() && !s.is_empty() && !c.is_empty() => (f, s, c),
                _ => return Err(CxgError::BadLexiconRow { line: i + 1 }),
            };
            lex.insert(form, syn, (sem != "-").then_some(sem));
        }
        Ok(lex)
    }

    pub fn from_path(path: &Path) -> Result<Self, CxgError> {
        Self::from_tsv(&std::fs::read_to_string(path)?)
    }

    /// Rows sorted by folded form; inverse of `from_tsv`.
    pub fn to_tsv_string(&self) -> String {
        let mut rows: Vec<(&String, &(String, Option<String>))> = self.entries.iter().collect();
        rows.sort_by_key(|(form, _)| form.as_str());
        let mut out = String::new();
        for (form, (syn, sem)) in rows {
            out.push_str(form);
            out.push('\t');
            out.push_str(syn);
            out.push('\t');
            out.push_str(sem.as_deref().unwrap_or("-"));
            out.push('\n');
        }
        out
    }

    pub fn write_to(&self, path: &Path) -> Result<(), CxgError> {
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir)?;
        }
        std::fs::write(path, self.to_tsv_string())?;
        Ok(())
    }
}

/// Look up each word case-folded; forms pass through unchanged.
pub fn annotate<'a, I>(words: I, lexicon: &Lexicon) -> Vec<AnnotatedToken>
where
    I: IntoIterator<Item = &'a str>,
{
    words
        .into_iter()
        .map(|w| match lexicon.get(w) {
            Some((syn, sem)) => AnnotatedToken {
                form: w.to_string(),
                syn: syn.to_string(),
                sem: sem.map(String::from),
            },
            None => AnnotatedToken { form: w.to_string(), syn: UNK_TAG.to_string(), sem: None },
        })
        .collect()
}

pub fn annotate_text(text: &str, lexicon: &Lexicon) -> Vec<AnnotatedToken> {
    annotate(text.split_whitespace(), lexicon)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lookup_and_unk_fallback() {
        let mut lex = Lexicon::new();
        lex.insert("mailed", "VERB", Some("transfer"));
        let tokens = annotate_text("He mailed it", &lex);
        assert_eq!(tokens[0].syn, UNK_TAG);
        assert_eq!(tokens[0].sem, None);
        assert_eq!(tokens[1].form, "mailed");
        assert_eq!(tokens[1].syn, "VERB");
        assert_eq!(tokens[1].sem.as_deref(), Some("transfer"));
    }

    #[test]
    fn lookup_is_case_folded_but_forms_survive() {
        let mut lex = Lexicon::new();
        lex.insert("The", "DET", None);
        let tokens = annotate_text("THE the The", &lex);
        assert!(tokens.iter().all(|t| t.syn == "DET"));
        let forms: Vec<&str> = tokens.iter().map(|t| t.form.as_str()).collect();
        assert_eq!(forms, vec!["THE", "the", "The"]);
    }

    #[test]
    fn tsv_round_trip() {
        let text = "a\tDET\t-\nletter\tNOUN\tartifact\nmailed\tVERB\ttransfer\n";
        let lex = Lexicon::from_tsv(text).unwrap();
        assert_eq!(lex.len(), 3);
        assert_eq!(lex.get("letter"), Some(("NOUN", Some("artifact"))));
        assert_eq!(lex.get("a"), Some(("DET", None)));
        assert_eq!(lex.to_tsv_string(), text);
    }

    #[test]
    fn bad_rows_report_line_numbers() {
        for (text, line) in [("a\tDET\n", 1), ("a\tDET\t-\nb\n", 2), ("a\tDET\t-\tjunk\n", 1)] {
            match Lexicon::from_tsv(text) {
                Err(CxgError::BadLexiconRow { line: l }) => assert_eq!(l, line, "{text:?}"),
                other => panic!("{text:?} gave {other:?}"),
            }
        }
    }
}
