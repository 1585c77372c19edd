//! Unmasking: repeatedly retrain while deleting each class's strongest
//! positive and negative features. Models whose signal is spread across
//! many features degrade slowly; models riding a few features collapse.

use std::collections::BTreeSet;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::classify::{evaluate, fit_ovr, ClassifyError, FitOptions};
use crate::features::FeatureVector;

#[derive(Debug, Clone, Copy)]
pub struct UnmaskOptions {
    /// Removal rounds after round 0.
    pub rounds: usize,
    /// Frozen for every refit; tune it once beforehand.
    pub c: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnmaskRound {
    pub round: usize,
    pub weighted_f1: f64,
    /// Features removed going into this round; empty at round 0.
    pub removed: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnmaskingCurve {
    pub rounds: Vec<UnmaskRound>,
    pub removed_total: usize,
    /// True when the feature space ran out before the requested rounds;
    /// the curve is truncated at that point.
    pub exhausted: bool,
}

/// Copy vectors with the removed indices masked out. Dimensions stay
/// unchanged so feature identities survive for reporting.
pub fn apply_mask(vectors: &[FeatureVector], removed: &BTreeSet<u32>) -> Vec<FeatureVector> {
    vectors
        .iter()
        .map(|v| FeatureVector {
            space: v.space,
            dim: v.dim,
            values: v.values.iter().filter(|(i, _)| !removed.contains(i)).copied().collect(),
        })
        .collect()
}

/// For each class, the not-yet-removed feature with the largest weight
/// and the one with the smallest; duplicates across classes collapse.
fn select_removals(weights: &[Vec<f64>], removed: &BTreeSet<u32>) -> BTreeSet<u32> {
    let mut picks = BTreeSet::new();
    for w in weights {
        let mut hi: Option<(u32, f64)> = None;
        let mut lo: Option<(u32, f64)> = None;
        for (j, &x) in w.iter().enumerate() {
            let j = j as u32;
            if removed.contains(&j) {
                continue;
            }
            if hi.is_none_or(|(_, best)| x > best) {
                hi = Some((j, x));
            }
            if lo.is_none_or(|(_, best)| x < best) {
                lo = Some((j, x));
            }
        }
        if let Some((j, _)) = hi {
            picks.insert(j);
        }
        if let Some((j, _)) = lo {
            picks.insert(j);
        }
    }
    picks
}

/// Round 0 trains and scores on the full space; each later round removes
/// the per-class extreme features, retrains from scratch with the same C,
/// and scores again.
pub fn unmask(
    train_vectors: &[FeatureVector],
    train_labels: &[String],
    test_vectors: &[FeatureVector],
    test_labels: &[String],
    options: &UnmaskOptions,
) -> Result<UnmaskingCurve, ClassifyError> {
    let classes: Vec<String> = train_labels
        .iter()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .cloned()
        .collect();
    if classes.len() < 2 {
        return Err(ClassifyError::DegenerateData(format!(
            "need at least 2 classes, got {}",
            classes.len()
        )));
    }

    let mut removed: BTreeSet<u32> = BTreeSet::new();
    let mut removed_this_round: Vec<u32> = Vec::new();
    let mut rounds = Vec::with_capacity(options.rounds + 1);
    let mut exhausted = false;
    for round in 0..=options.rounds {
        let masked_train = apply_mask(train_vectors, &removed);
        let masked_test = apply_mask(test_vectors, &removed);
        let model = fit_ovr(&masked_train, train_labels, &classes, &FitOptions::with_c(options.c))?;
        let report = evaluate(&model, &masked_test, test_labels)?;
        rounds.push(UnmaskRound {
            round,
            weighted_f1: report.weighted.f1,
            removed: std::mem::take(&mut removed_this_round),
        });

        if round == options.rounds {
            break;
        }
        let picks = select_removals(&model.weights, &removed);
        if picks.is_empty() {
            exhausted = true;
            break;
        }
        removed.extend(picks.iter().copied());
        removed_this_round = picks.into_iter().collect();
    }

    Ok(UnmaskingCurve { rounds, removed_total: removed.len(), exhausted })
}

/// `round,f1,n_removed` with cumulative removal counts.
pub fn write_curve_csv(path: &Path, curve: &UnmaskingCurve) -> Result<(), std::io::Error> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(w, "round,f1,n_removed")?;
    let mut cumulative = 0usize;
    for r in &curve.rounds {
        cumulative += r.removed.len();
        writeln!(w, "{},{:.4},{}", r.round, r.weighted_f1, cumulative)?;
    }
    w.flush()?;
    Ok(())
}

/// One row per removed feature: `round,feature`.
pub fn write_removed_log_csv(path: &Path, curve: &UnmaskingCurve) -> Result<(), std::io::Error> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(w, "round,feature")?;
    for r in &curve.rounds {
        for f in &r.removed {
            writeln!(w, "{},{}", r.round, f)?;
        }
    }
    w.flush()?;
    Ok(())
}
