//! Evaluation: confusion matrices, per-class precision/recall/F1 with
//! support-weighted averages, and confusion-derived dialect similarity.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::classify::{ClassifyError, LinearModel};
use crate::features::FeatureVector;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub support: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub classes: Vec<String>,
    /// Rows are truth, columns predictions, indexed like `classes`.
    pub confusion: Vec<Vec<u64>>,
    /// Aligned with `classes`.
    pub per_class: Vec<ClassMetrics>,
    /// Support-weighted averages; weighted recall equals accuracy.
    pub weighted: ClassMetrics,
}

impl EvalReport {
    pub fn total(&self) -> u64 {
        self.confusion.iter().flatten().sum()
    }

    pub fn accuracy(&self) -> f64 {
        let correct: u64 = (0..self.classes.len()).map(|i| self.confusion[i][i]).sum();
        let total = self.total();
        if total == 0 {
            0.0
        } else {
            correct as f64 / total as f64
        }
    }

    pub fn class_metrics(&self, class: &str) -> Option<&ClassMetrics> {
        self.classes.iter().position(|c| c == class).map(|i| &self.per_class[i])
    }
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Standard metrics from a square confusion matrix. Zero denominators
/// yield 0 for the affected metric.
pub fn report_from_confusion(classes: Vec<String>, confusion: Vec<Vec<u64>>) -> EvalReport {
    let k = classes.len();
    assert!(confusion.len() == k && confusion.iter().all(|r| r.len() == k));
    let mut per_class = Vec::with_capacity(k);
    let total: u64 = confusion.iter().flatten().sum();
    let mut weighted = ClassMetrics { precision: 0.0, recall: 0.0, f1: 0.0, support: total };
    for i in 0..k {
        let tp = confusion[i][i];
        let row: u64 = confusion[i].iter().sum();
        let col: u64 = (0..k).map(|j| confusion[j][i]).sum();
        let precision = ratio(tp, col);
        let recall = ratio(tp, row);
        let f1 = if precision + recall == 0.0 {
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        };
        per_class.push(ClassMetrics { precision, recall, f1, support: row });
        if total > 0 {
            let w = row as f64 / total as f64;
            weighted.precision += w * precision;
            weighted.recall += w * recall;
            weighted.f1 += w * f1;
        }
    }
    EvalReport { classes, confusion, per_class, weighted }
}

/// Predict the test set and tabulate. Labels must all be known to the
/// model and the set must be non-empty.
pub fn evaluate(
    model: &LinearModel,
    vectors: &[FeatureVector],
    labels: &[String],
) -> Result<EvalReport, ClassifyError> {
    if vectors.is_empty() || vectors.len() != labels.len() {
        return Err(ClassifyError::EmptyTestSet);
    }
    let k = model.classes.len();
    let truth_ids: Vec<usize> = labels
        .iter()
        .map(|l| {
            model
                .classes
                .iter()
                .position(|c| c == l)
                .ok_or_else(|| ClassifyError::UnknownLabel(l.clone()))
        })
        .collect::<Result<_, _>>()?;
    let predictions = model.predict_batch(vectors)?;
    let mut confusion = vec![vec![0u64; k]; k];
    for (&truth, pred) in truth_ids.iter().zip(&predictions) {
        let p = model.classes.iter().position(|c| c == pred).expect("model label");
        confusion[truth][p] += 1;
    }
    Ok(report_from_confusion(model.classes.clone(), confusion))
}

/// Off-diagonal mass per unordered class pair: confusion[i][j] +
/// confusion[j][i]. High counts mark dialects the model cannot tell apart.
pub fn similarity_from_confusion(report: &EvalReport) -> BTreeMap<(String, String), u64> {
    similarity_from_counts(&report.classes, &report.confusion)
}

/// Same aggregation straight from a confusion matrix, for callers that
/// only have the stored CSV rather than a full report.
pub fn similarity_from_counts(
    classes: &[String],
    confusion: &[Vec<u64>],
) -> BTreeMap<(String, String), u64> {
    let k = classes.len();
    let mut out = BTreeMap::new();
    for i in 0..k {
        for j in (i + 1)..k {
            out.insert(
                (classes[i].clone(), classes[j].clone()),
                confusion[i][j] + confusion[j][i],
            );
        }
    }
    out
}

/// One row per class plus a trailing `w. avg` row.
pub fn write_report_csv(path: &Path, report: &EvalReport) -> Result<(), ClassifyError> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(w, "class,precision,recall,f1,support")?;
    for (class, m) in report.classes.iter().zip(&report.per_class) {
        writeln!(w, "{class},{:.4},{:.4},{:.4},{}", m.precision, m.recall, m.f1, m.support)?;
    }
    let a = &report.weighted;
    writeln!(w, "w. avg,{:.4},{:.4},{:.4},{}", a.precision, a.recall, a.f1, a.support)?;
    w.flush()?;
    Ok(())
}

/// Square matrix with a `truth` label column.
pub fn write_confusion_csv(path: &Path, report: &EvalReport) -> Result<(), ClassifyError> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(w, "truth,{}", report.classes.join(","))?;
    for (class, row) in report.classes.iter().zip(&report.confusion) {
        let cells: Vec<String> = row.iter().map(u64::to_string).collect();
        writeln!(w, "{class},{}", cells.join(","))?;
    }
    w.flush()?;
    Ok(())
}

/// Inverse of [`write_confusion_csv`]; checks the matrix is square and
/// row labels repeat the header order.
pub fn read_confusion_csv(path: &Path) -> Result<(Vec<String>, Vec<Vec<u64>>), ClassifyError> {
    let text = std::fs::read_to_string(path)?;
    let bad = || ClassifyError::BadModel(format!("malformed confusion csv {}", path.display()));
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(bad)?;
    let mut cols = header.split(',');
    if cols.next() != Some("truth") {
        return Err(bad());
    }
    let classes: Vec<String> = cols.map(str::to_string).collect();
    if classes.is_empty() {
        return Err(bad());
    }
    let mut confusion = Vec::with_capacity(classes.len());
    for (row, line) in lines.enumerate() {
        let mut cells = line.split(',');
        if cells.next() != Some(classes.get(row).map(String::as_str).ok_or_else(bad)?) {
            return Err(bad());
        }
        let counts: Vec<u64> = cells
            .map(|c| c.parse::<u64>().map_err(|_| bad()))
            .collect::<Result<_, _>>()?;
        if counts.len() != classes.len() {
            return Err(bad());
        }
        confusion.push(counts);
    }
    if confusion.len() != classes.len() {
        return Err(bad());
    }
    Ok((classes, confusion))
}

/// Pairs sorted by descending count, then lexicographically.
pub fn write_similarity_csv(
    path: &Path,
    similarity: &BTreeMap<(String, String), u64>,
) -> Result<(), ClassifyError> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    let mut rows: Vec<(&(String, String), &u64)> = similarity.iter().collect();
    rows.sort_by(|a, b| b.1.cmp(a.1).then_with(|| a.0.cmp(b.0)));
    let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(w, "region_a,region_b,misclassified")?;
    for ((a, b), count) in rows {
        writeln!(w, "{a},{b},{count}")?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn classes(names: &[&str]) -> Vec<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn three_class_hand_computed_metrics() {
        let report = report_from_confusion(
            classes(&["a", "b", "c"]),
            vec![vec![8, 1, 1], vec![2, 7, 1], vec![0, 2, 8]],
        );
        let expect = [(0.8, 0.8), (0.7, 0.7), (8.0 / 10.0, 0.8)];
        for (m, (p, r)) in report.per_class.iter().zip(expect) {
            assert!((m.precision - p).abs() < 1e-12);
            assert!((m.recall - r).abs() < 1e-12);
            assert!((m.f1 - 2.0 * p * r / (p + r)).abs() < 1e-12);
            assert_eq!(m.support, 10);
        }
        let w = &report.weighted;
        assert!((w.precision - 23.0 / 30.0).abs() < 1e-12);
        assert!((w.recall - 23.0 / 30.0).abs() < 1e-12);
        assert!((w.recall - report.accuracy()).abs() < 1e-12);
        assert_eq!(report.total(), 30);
    }

    #[test]
    fn perfect_and_broken_predictions() {
        let perfect =
            report_from_confusion(classes(&["a", "b"]), vec![vec![5, 0], vec![0, 5]]);
        for m in &perfect.per_class {
            assert_eq!((m.precision, m.recall, m.f1), (1.0, 1.0, 1.0));
        }
        assert_eq!(perfect.weighted.f1, 1.0);

        let broken = report_from_confusion(classes(&["a", "b"]), vec![vec![0, 5], vec![5, 0]]);
        for m in &broken.per_class {
            assert_eq!(m.f1, 0.0);
        }
    }

    #[test]
    fn zero_support_class_scores_zero() {
        let report =
            report_from_confusion(classes(&["a", "b"]), vec![vec![3, 0], vec![0, 0]]);
        assert_eq!(report.per_class[1].precision, 0.0);
        assert_eq!(report.per_class[1].recall, 0.0);
        assert_eq!(report.per_class[1].f1, 0.0);
    }

    #[test]
    fn weighted_recall_is_accuracy_on_random_matrices() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        for _ in 0..50 {
            let k = rng.gen_range(2..6);
            let confusion: Vec<Vec<u64>> =
                (0..k).map(|_| (0..k).map(|_| rng.gen_range(0..30)).collect()).collect();
            let names: Vec<String> = (0..k).map(|i| format!("c{i}")).collect();
            let report = report_from_confusion(names, confusion);
            assert!((report.weighted.recall - report.accuracy()).abs() < 1e-12);
        }
    }

    #[test]
    fn similarity_sums_symmetric_entries() {
        let report = report_from_confusion(
            classes(&["CA", "US"]),
            vec![vec![900, 101], vec![120, 880]],
        );
        let sim = similarity_from_confusion(&report);
        assert_eq!(sim[&("CA".to_string(), "US".to_string())], 221);

        let diagonal =
            report_from_confusion(classes(&["a", "b"]), vec![vec![5, 0], vec![0, 5]]);
        assert!(similarity_from_confusion(&diagonal).values().all(|&v| v == 0));
    }

    #[test]
    fn similarity_matches_brute_force_on_random_matrices() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(23);
        for _ in 0..20 {
            let k = rng.gen_range(2..7);
            let confusion: Vec<Vec<u64>> =
                (0..k).map(|_| (0..k).map(|_| rng.gen_range(0..50)).collect()).collect();
            let names: Vec<String> = (0..k).map(|i| format!("c{i}")).collect();
            let report = report_from_confusion(names.clone(), confusion.clone());
            let sim = similarity_from_confusion(&report);
            for i in 0..k {
                for j in (i + 1)..k {
                    assert_eq!(
                        sim[&(names[i].clone(), names[j].clone())],
                        confusion[i][j] + confusion[j][i]
                    );
                }
            }
            assert_eq!(sim.len(), k * (k - 1) / 2);
        }
    }

    #[test]
    fn confusion_csv_round_trips() {
        let report = report_from_confusion(
            classes(&["AU", "CA", "US"]),
            vec![vec![8, 1, 1], vec![2, 7, 1], vec![0, 2, 8]],
        );
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("confusion.csv");
        write_confusion_csv(&path, &report).unwrap();
        let (names, matrix) = read_confusion_csv(&path).unwrap();
        assert_eq!(names, report.classes);
        assert_eq!(matrix, report.confusion);
        assert_eq!(
            similarity_from_counts(&names, &matrix),
            similarity_from_confusion(&report)
        );

        std::fs::write(&path, "truth,a,b\na,1,2\n").unwrap();
        assert!(read_confusion_csv(&path).is_err());
        std::fs::write(&path, "truth,a,b\nb,1,2\na,0,1\n").unwrap();
        assert!(read_confusion_csv(&path).is_err());
    }

    #[test]
    fn csv_outputs_are_shaped_as_documented() {
        let dir = tempfile::tempdir().unwrap();
        let report = report_from_confusion(
            classes(&["a", "b"]),
            vec![vec![8, 2], vec![1, 9]],
        );
        let report_path = dir.path().join("report.csv");
        write_report_csv(&report_path, &report).unwrap();
        let text = std::fs::read_to_string(&report_path).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "class,precision,recall,f1,support");
        assert!(lines[1].starts_with("a,0.8889,0.8000,"));
        assert!(lines[3].starts_with("w. avg,"));

        let confusion_path = dir.path().join("confusion.csv");
        write_confusion_csv(&confusion_path, &report).unwrap();
        let text = std::fs::read_to_string(&confusion_path).unwrap();
        assert_eq!(text, "truth,a,b\na,8,2\nb,1,9\n");

        let sim_path = dir.path().join("similarity.csv");
        write_similarity_csv(&sim_path, &similarity_from_confusion(&report)).unwrap();
        let text = std::fs::read_to_string(&sim_path).unwrap();
        assert_eq!(text, "region_a,region_b,misclassified\na,b,3\n");
    }
}
