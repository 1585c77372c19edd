//! Linear one-vs-rest classification over sample vectors: training with
//! dev-tuned regularization, evaluation reports, register-transfer
//! experiments, and confusion-based dialect similarity.

mod experiments;
mod metrics;
mod svm;

pub use experiments::{run_experiment, LabeledVectors, Mode, RegisterSet};
pub use metrics::{
    evaluate, read_confusion_csv, report_from_confusion, similarity_from_confusion,
    similarity_from_counts, write_confusion_csv, write_report_csv, write_similarity_csv,
    ClassMetrics, EvalReport,
};
pub use svm::{fit_ovr, train, FitOptions, LinearModel, DEFAULT_C_GRID, MODEL_VERSION};

#[derive(Debug, thiserror::Error)]
pub enum ClassifyError {
    #[error("feature space mismatch: model expects {expected}, got {got}")]
    SpaceMismatch { expected: String, got: String },
    #[error("degenerate training data: {0}")]
    DegenerateData(String),
    #[error("unknown label `{0}`")]
    UnknownLabel(String),
    #[error("test set is empty")]
    EmptyTestSet,
    #[error("bad model file: {0}")]
    BadModel(String),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("model serialization: {0}")]
    Json(serde_json::Error),
}
