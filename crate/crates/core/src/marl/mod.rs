//! Multi-agent hybrid PPO: one independent learner per user, each with a
//! categorical server head, a squashed-Gaussian ratio head and a critic for
//! each.

pub mod adam;
pub mod buffer;
pub mod checkpoint;
pub mod gae;
pub mod mlp;
pub mod policy;
pub mod ppo;
pub mod train;

pub use checkpoint::Checkpoint;
pub use mlp::{gradients, Activation, Mlp};
pub use policy::{sample_hybrid_action, HybridPolicy, HybridSample};
pub use ppo::{ppo_update, PpoConfig};
pub use train::{train, train_with, EpochStats, LearnedPolicy, TrainConfig, TrainOutcome};
