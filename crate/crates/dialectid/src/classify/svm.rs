//! One-vs-rest linear max-margin classifier. Each class gets an
//! L2-regularized L1-hinge binary problem solved by dual coordinate
//! descent with a fixed instance order, so training is bit-reproducible.
//! The bias rides along as an implicit constant-1 feature.

use std::collections::{BTreeSet, HashMap};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classify::{evaluate, ClassifyError};
use crate::features::{FeatureSpace, FeatureVector};

/// Regularization grid tried against the dev split.
pub const DEFAULT_C_GRID: [f64; 4] = [0.01, 0.1, 1.0, 10.0];

pub const MODEL_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy)]
pub struct FitOptions {
    pub c: f64,
    /// Relative primal-objective change that counts as converged.
    pub tol: f64,
    pub max_epochs: usize,
}

impl FitOptions {
    pub fn with_c(c: f64) -> Self {
        FitOptions { c, tol: 1e-4, max_epochs: 1000 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub version: u32,
    pub space: FeatureSpace,
    pub dim: u32,
    /// Sorted region labels; prediction ties go to the earliest.
    pub classes: Vec<String>,
    /// One dense vector per class, length `dim`.
    pub weights: Vec<Vec<f64>>,
    pub bias: Vec<f64>,
    pub c: f64,
}

impl LinearModel {
    fn check_space(&self, v: &FeatureVector) -> Result<(), ClassifyError> {
        if v.space != self.space || v.dim != self.dim {
            return Err(ClassifyError::SpaceMismatch {
                expected: format!("{}/{}", self.space, self.dim),
                got: format!("{}/{}", v.space, v.dim),
            });
        }
        Ok(())
    }

    /// Per-class decision values w_k · x + b_k.
    pub fn scores(&self, v: &FeatureVector) -> Result<Vec<f64>, ClassifyError> {
        self.check_space(v)?;
        Ok(self
            .weights
            .iter()
            .zip(&self.bias)
            .map(|(w, b)| {
                v.values.iter().map(|&(i, c)| w[i as usize] * c as f64).sum::<f64>() + b
            })
            .collect())
    }

    /// Argmax class; ties resolve to the earliest class.
    pub fn predict(&self, v: &FeatureVector) -> Result<&str, ClassifyError> {
        let scores = self.scores(v)?;
        let mut best = 0;
        for (k, &s) in scores.iter().enumerate() {
            if s > scores[best] {
                best = k;
            }
        }
        Ok(&self.classes[best])
    }

    pub fn predict_batch(&self, vectors: &[FeatureVector]) -> Result<Vec<&str>, ClassifyError> {
        vectors.par_iter().map(|v| self.predict(v)).collect()
    }

    pub fn to_json_path(&self, path: &Path) -> Result<(), ClassifyError> {
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir)?;
        }
        std::fs::write(path, serde_json::to_vec(self).map_err(ClassifyError::Json)?)?;
        Ok(())
    }

    pub fn from_json_path(path: &Path) -> Result<Self, ClassifyError> {
        let bytes = std::fs::read(path)?;
        let model: LinearModel = serde_json::from_slice(&bytes).map_err(ClassifyError::Json)?;
        if model.version != MODEL_VERSION {
            return Err(ClassifyError::BadModel(format!(
                "unsupported model version {}",
                model.version
            )));
        }
        if model.weights.len() != model.classes.len()
            || model.bias.len() != model.classes.len()
            || model.weights.iter().any(|w| w.len() != model.dim as usize)
        {
            return Err(ClassifyError::BadModel("inconsistent weight shapes".into()));
        }
        Ok(model)
    }
}

/// Dual coordinate descent for min_w ½‖w‖² + C Σ max(0, 1 − y_i w·x_i).
/// Instances are visited in fixed order every epoch. Returns the weight
/// vector (last entry is the bias) and whether the stop tolerance was hit;
/// on non-convergence the best iterate by primal objective is returned.
pub(crate) fn fit_binary(
    xs: &[&[(u32, u32)]],
    ys: &[f64],
    dim: usize,
    opts: &FitOptions,
) -> (Vec<f64>, bool) {
    let n = xs.len();
    let mut w = vec![0.0f64; dim + 1];
    let mut alpha = vec![0.0f64; n];
    let q: Vec<f64> = xs
        .iter()
        .map(|x| x.iter().map(|&(_, v)| (v as f64) * (v as f64)).sum::<f64>() + 1.0)
        .collect();

    let primal = |w: &[f64]| -> f64 {
        let reg = 0.5 * w.iter().map(|v| v * v).sum::<f64>();
        let hinge: f64 = xs
            .iter()
            .zip(ys)
            .map(|(x, &y)| {
                let s = x.iter().map(|&(i, v)| w[i as usize] * v as f64).sum::<f64>() + w[dim];
                (1.0 - y * s).max(0.0)
            })
            .sum();
        reg + opts.c * hinge
    };

    let mut prev_obj = primal(&w);
    let mut best_obj = prev_obj;
    let mut best_w = w.clone();
    let mut converged = false;

    for _ in 0..opts.max_epochs {
        let mut moved = false;
        for i in 0..n {
            let y = ys[i];
            let score =
                xs[i].iter().map(|&(j, v)| w[j as usize] * v as f64).sum::<f64>() + w[dim];
            let g = y * score - 1.0;
            let pg = if alpha[i] <= 0.0 {
                g.min(0.0)
            } else if alpha[i] >= opts.c {
                g.max(0.0)
            } else {
                g
            };
            if pg.abs() > 1e-12 {
                let new_alpha = (alpha[i] - g / q[i]).clamp(0.0, opts.c);
                let delta = new_alpha - alpha[i];
                if delta != 0.0 {
                    alpha[i] = new_alpha;
                    for &(j, v) in xs[i] {
                        w[j as usize] += delta * y * v as f64;
                    }
                    w[dim] += delta * y;
                    moved = true;
                }
            }
        }
        let obj = primal(&w);
        if obj < best_obj {
            best_obj = obj;
            best_w.copy_from_slice(&w);
        }
        let rel = (prev_obj - obj).abs() / prev_obj.max(f64::MIN_POSITIVE);
        if !moved || rel < opts.tol {
            converged = true;
            break;
        }
        prev_obj = obj;
    }
    if converged {
        (w, true)
    } else {
        (best_w, false)
    }
}

/// Fit one binary problem per class in parallel. `classes` must be sorted
/// and cover every label. Non-converged classes are logged and keep their
/// best iterate.
pub fn fit_ovr(
    vectors: &[FeatureVector],
    labels: &[String],
    classes: &[String],
    opts: &FitOptions,
) -> Result<LinearModel, ClassifyError> {
    let first = vectors.first().ok_or_else(|| {
        ClassifyError::DegenerateData("no training vectors".into())
    })?;
    let (space, dim) = (first.space, first.dim);
    for v in vectors {
        if v.space != space || v.dim != dim {
            return Err(ClassifyError::SpaceMismatch {
                expected: format!("{space}/{dim}"),
                got: format!("{}/{}", v.space, v.dim),
            });
        }
    }
    let class_index: HashMap<&str, usize> =
        classes.iter().enumerate().map(|(i, c)| (c.as_str(), i)).collect();
    let label_ids: Vec<usize> = labels
        .iter()
        .map(|l| {
            class_index
                .get(l.as_str())
                .copied()
                .ok_or_else(|| ClassifyError::UnknownLabel(l.clone()))
        })
        .collect::<Result<_, _>>()?;

    let xs: Vec<&[(u32, u32)]> = vectors.iter().map(|v| v.values.as_slice()).collect();
    let fits: Vec<(Vec<f64>, bool)> = (0..classes.len())
        .into_par_iter()
        .map(|k| {
            let ys: Vec<f64> =
                label_ids.iter().map(|&l| if l == k { 1.0 } else { -1.0 }).collect();
            fit_binary(&xs, &ys, dim as usize, opts)
        })
        .collect();

    let mut weights = Vec::with_capacity(classes.len());
    let mut bias = Vec::with_capacity(classes.len());
    for (k, (mut w, converged)) in fits.into_iter().enumerate() {
        if !converged {
            log::warn!(
                "class {} did not converge in {} epochs (C={}); keeping best iterate",
                classes[k],
                opts.max_epochs,
                opts.c
            );
        }
        let b = w.pop().expect("bias slot");
        weights.push(w);
        bias.push(b);
    }
    Ok(LinearModel {
        version: MODEL_VERSION,
        space,
        dim,
        classes: classes.to_vec(),
        weights,
        bias,
        c: opts.c,
    })
}

/// Dev-tuned training: fit the grid on TRAIN, pick the C with the best
/// weighted F1 on DEV (ties to the smallest C). Dev data is never folded
/// into the final fit.
pub fn train(
    train_vectors: &[FeatureVector],
    train_labels: &[String],
    dev_vectors: &[FeatureVector],
    dev_labels: &[String],
    c_grid: &[f64],
) -> Result<LinearModel, ClassifyError> {
    if train_vectors.len() != train_labels.len() || dev_vectors.len() != dev_labels.len() {
        return Err(ClassifyError::DegenerateData("vector/label length mismatch".into()));
    }
    let classes: Vec<String> = train_labels
        .iter()
        .chain(dev_labels)
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
    for class in &classes {
        if !train_labels.contains(class) {
            return Err(ClassifyError::DegenerateData(format!(
                "class `{class}` absent from training data"
            )));
        }
    }

    let mut grid: Vec<f64> = c_grid.to_vec();
    grid.sort_by(|a, b| a.partial_cmp(b).expect("finite C"));
    grid.dedup();
    if grid.is_empty() || grid[0] <= 0.0 {
        return Err(ClassifyError::DegenerateData("C grid must be positive".into()));
    }

    let mut best: Option<(f64, LinearModel)> = None;
    for &c in &grid {
        let model = fit_ovr(train_vectors, train_labels, &classes, &FitOptions::with_c(c))?;
        if grid.len() == 1 {
            return Ok(model);
        }
        let f1 = evaluate(&model, dev_vectors, dev_labels)?.weighted.f1;
        log::debug!("C={c}: dev weighted F1 {f1:.4}");
        // Strictly-greater keeps the smallest C on ties.
        if best.as_ref().is_none_or(|(bf, _)| f1 > *bf) {
            best = Some((f1, model));
        }
    }
    Ok(best.expect("non-empty grid").1)
}
