//! Experiment harness: within-register, cross-register, and merged
//! training/evaluation over prepared (vector, label) splits.

use serde::{Deserialize, Serialize};

use crate::classify::{evaluate, train, ClassifyError, EvalReport, LinearModel};
use crate::features::FeatureVector;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Train and test on the same register.
    Within,
    /// Train on one register, test on the other.
    Cross,
    /// Train and test on both registers pooled, splits kept as-is.
    Merged,
}

#[derive(Debug, Clone, Default)]
pub struct LabeledVectors {
    pub vectors: Vec<FeatureVector>,
    pub labels: Vec<String>,
}

impl LabeledVectors {
    pub fn push(&mut self, vector: FeatureVector, label: String) {
        self.vectors.push(vector);
        self.labels.push(label);
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn extend_from(&mut self, other: &LabeledVectors) {
        self.vectors.extend(other.vectors.iter().cloned());
        self.labels.extend(other.labels.iter().cloned());
    }
}

/// All three splits of one register in one feature space.
#[derive(Debug, Clone, Default)]
pub struct RegisterSet {
    pub train: LabeledVectors,
    pub dev: LabeledVectors,
    pub test: LabeledVectors,
}

/// Train per `mode` and evaluate; returns the tuned model and its report.
/// `primary` is the training register; `secondary` supplies the test set
/// for `Cross` and the second half of the pool for `Merged` (pass
/// `primary` again for `Within`).
pub fn run_experiment(
    primary: &RegisterSet,
    secondary: &RegisterSet,
    mode: Mode,
    c_grid: &[f64],
) -> Result<(LinearModel, EvalReport), ClassifyError> {
    let (train_data, dev_data, test_data) = match mode {
        Mode::Within => (primary.train.clone(), primary.dev.clone(), primary.test.clone()),
        Mode::Cross => (primary.train.clone(), primary.dev.clone(), secondary.test.clone()),
        Mode::Merged => {
            let mut train_data = primary.train.clone();
            train_data.extend_from(&secondary.train);
            let mut dev_data = primary.dev.clone();
            dev_data.extend_from(&secondary.dev);
            let mut test_data = primary.test.clone();
            test_data.extend_from(&secondary.test);
            (train_data, dev_data, test_data)
        }
    };
    let model = train(
        &train_data.vectors,
        &train_data.labels,
        &dev_data.vectors,
        &dev_data.labels,
        c_grid,
    )?;
    let report = evaluate(&model, &test_data.vectors, &test_data.labels)?;
    Ok((model, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::FeatureSpace;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    // Two classes with disjoint feature support plus shared noise; the
    // same process regardless of register.
    fn synth_register(rng: &mut ChaCha8Rng, n_per_class: usize) -> RegisterSet {
        let mut set = RegisterSet::default();
        for split in 0..3 {
            let out = match split {
                0 => &mut set.train,
                1 => &mut set.dev,
                _ => &mut set.test,
            };
            for i in 0..n_per_class * 2 {
                let class = i % 2;
                let mut values: Vec<(u32, u32)> = Vec::new();
                let signal = if class == 0 { 0 } else { 1 };
                values.push((signal, rng.gen_range(2..5)));
                if rng.gen_bool(0.7) {
                    values.push((2, rng.gen_range(1..3)));
                }
                if rng.gen_bool(0.5) {
                    values.push((3, rng.gen_range(1..3)));
                }
                out.push(
                    FeatureVector { space: FeatureSpace::Cxg, dim: 4, values },
                    if class == 0 { "a".to_string() } else { "b".to_string() },
                );
            }
        }
        set
    }

    #[test]
    fn within_mode_separates_disjoint_classes() {
        let mut rng = ChaCha8Rng::seed_from_u64(100);
        let reg = synth_register(&mut rng, 30);
        let (model, report) = run_experiment(&reg, &reg, Mode::Within, &[0.1, 1.0]).unwrap();
        assert_eq!(report.weighted.f1, 1.0);
        assert_eq!(model.classes, vec!["a".to_string(), "b".to_string()]);
    }

    #[test]
    fn cross_mode_matches_within_when_registers_share_distribution() {
        let mut rng = ChaCha8Rng::seed_from_u64(101);
        let reg_a = synth_register(&mut rng, 30);
        let reg_b = synth_register(&mut rng, 30);
        let (_, within) = run_experiment(&reg_a, &reg_a, Mode::Within, &[1.0]).unwrap();
        let (_, cross) = run_experiment(&reg_a, &reg_b, Mode::Cross, &[1.0]).unwrap();
        assert!((within.weighted.f1 - cross.weighted.f1).abs() <= 0.05);
    }

    #[test]
    fn merged_mode_pools_both_registers_keeping_splits() {
        let mut rng = ChaCha8Rng::seed_from_u64(102);
        let reg_a = synth_register(&mut rng, 20);
        let reg_b = synth_register(&mut rng, 20);
        let (_, report) = run_experiment(&reg_a, &reg_b, Mode::Merged, &[1.0]).unwrap();
        assert_eq!(report.total() as usize, reg_a.test.len() + reg_b.test.len());
        assert_eq!(report.weighted.f1, 1.0);
    }
}
