//! Feed-forward network, losses and optimiser.

mod adam;
pub mod loss;
mod model;

pub use adam::{AdamState, BETA1, BETA2, EPSILON};
pub use loss::LossKind;
pub use model::{
    argmax, init_model, parameter_count, purity_norm, Batch, HeadSpec, MlpModel, NormMode, Targets,
    DEGENERATE_NORM,
};
