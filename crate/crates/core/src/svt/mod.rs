//! Entry evaluation of `P(sqrt(A^† A)) u` and the sampling estimator for
//! `v^† P(sqrt(A^† A)) u`.

mod entry;
mod estimator;

pub use entry::{chain_entry, svt_entry, ChainEvaluator, QueryStats, SvtEvaluator};
pub use estimator::{
    batch_count, draw_samples, estimate_bilinear, sample_count, single_sample, Estimate, EstimatorConfig,
};
