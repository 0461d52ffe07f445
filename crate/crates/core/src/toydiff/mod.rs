//! 2D diffusion lab: datasets, VP-frame algebra, a small MLP denoiser with
//! exact gradients, and an Adam training loop under any schedule and weight.

pub mod checkpoint;
pub mod dataset;
pub mod frame;
pub mod mlp;
pub mod train;

pub use dataset::{make_dataset, Dataset2D, DatasetKind};
pub use frame::{forward_noise, make_target, to_eps_residual, to_x0, PredictTarget};
pub use mlp::{model_forward, MlpShape};
pub use train::{loss_and_grad, train, Batch, LossEval, TraceRow, TrainConfig, TrainState};
