//! Grammar file parsing. One construction per line, slots separated by
//! " -- ", slot syntax `LEX:<form>` | `SYN:<tag>` | `SEM:<class>` |
//! `SYNSEM:<tag>:<class>`; `#` starts a comment.

use std::collections::HashMap;
use std::fmt;
use std::path::Path;

use crate::cxg::CxgError;
use crate::text::fold;

/// One slot of a construction. LEX matches the case-folded word form,
/// SYN the syntactic tag, SEM the semantic class (absent never matches),
/// SYNSEM both tag and class.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum SlotConstraint {
    /// Stored case-folded.
    Lex(String),
    Syn(String),
    Sem(String),
    SynSem { syn: String, sem: String },
}

impl SlotConstraint {
    fn parse(line: usize, slot: &str) -> Result<Self, CxgError> {
        let bad = |reason: &str| CxgError::BadSlot {
            line,
            slot: slot.to_string(),
            reason: reason.to_string(),
        };
        let (kind, rest) = slot.split_once(':').ok_or_else(|| bad("missing `:`"))?;
        if rest.is_empty() {
            return Err(bad("empty value"));
        }
        match kind {
            "LEX" => Ok(SlotConstraint::Lex(fold(rest))),
            "SYN" => Ok(SlotConstraint::Syn(rest.to_string())),
            "SEM" => Ok(SlotConstraint::Sem(rest.to_string())),
            "SYNSEM" => {
                let (syn, sem) = rest.split_once(':').ok_or_else(|| bad("SYNSEM needs <tag>:<class>"))?;
                if syn.is_empty() || sem.is_empty() {
                    return Err(bad("SYNSEM needs <tag>:<class>"));
                }
                Ok(SlotConstraint::SynSem { syn: syn.to_string(), sem: sem.to_string() })
            }
            other => Err(bad(&format!("unknown kind `{other}`"))),
        }
    }
}

impl fmt::Display for SlotConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SlotConstraint::Lex(w) => write!(f, "LEX:{w}"),
            SlotConstraint::Syn(t) => write!(f, "SYN:{t}"),
            SlotConstraint::Sem(c) => write!(f, "SEM:{c}"),
            SlotConstraint::SynSem { syn, sem } => write!(f, "SYNSEM:{syn}:{sem}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Construction {
    /// Position in the grammar, 0-based and contiguous.
    pub id: usize,
    pub slots: Vec<SlotConstraint>,
}

impl fmt::Display for Construction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, slot) in self.slots.iter().enumerate() {
            if i > 0 {
                f.write_str(" -- ")?;
            }
            write!(f, "{slot}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Grammar {
    pub name: String,
    pub constructions: Vec<Construction>,
}

impl Grammar {
    pub fn parse(name: &str, text: &str) -> Result<Self, CxgError> {
        let mut constructions = Vec::new();
        let mut seen: HashMap<Vec<SlotConstraint>, usize> = HashMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let slots = line
                .split(" -- ")
                .map(|s| SlotConstraint::parse(line_no, s.trim()))
                .collect::<Result<Vec<_>, _>>()?;
            if let Some(&first) = seen.get(&slots) {
                return Err(CxgError::DuplicateConstruction { line: line_no, first });
            }
            seen.insert(slots.clone(), line_no);
            constructions.push(Construction { id: constructions.len(), slots });
        }
        Ok(Grammar { name: name.to_string(), constructions })
    }

    /// Name comes from the file stem.
    pub fn from_path(path: &Path) -> Result<Self, CxgError> {
        let name = path.file_stem().map_or_else(String::new, |s| s.to_string_lossy().into_owned());
        Self::parse(&name, &std::fs::read_to_string(path)?)
    }

    pub fn len(&self) -> usize {
        self.constructions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.constructions.is_empty()
    }

    /// Inverse of `parse`, modulo comments and blank lines.
    pub fn to_file_string(&self) -> String {
        let mut out = String::new();
        for c in &self.constructions {
            out.push_str(&c.to_string());
            out.push('\n');
        }
        out
    }

    pub fn write_to(&self, path: &Path) -> Result<(), CxgError> {
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir)?;
        }
        std::fs::write(path, self.to_file_string())?;
        Ok(())
    }
}
