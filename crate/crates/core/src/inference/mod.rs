//! Multimodel inference: information criteria, Bayesian posteriors over
//! distribution parameters, and candidate model draws.

pub mod criteria;
pub mod ensemble;
pub mod pool;
pub mod posterior;

pub use criteria::{aic, aicc, criterion_deltas, model_probabilities};
pub use ensemble::{stretch_sample, ChainHistory, StretchSettings};
pub use pool::{
    build_pool, draw_candidates, posterior_cloud, select_models, CandidateModel, FittedModel, InferenceConfig, ModelPool,
    PosteriorCloud, SkippedFamily,
};
pub use posterior::{log_posterior, LogLikelihood, PriorBox, PriorSpec};
