//! Trusted multi-view classification with dynamic evidence decoupling.
//!
//! Small per-view networks emit non-negative Dirichlet evidence; the
//! per-class minimum across views forms consistent evidence and the
//! averaged residuals form complementary evidence. Training aligns the
//! (sharpened) consistent opinion strictly with the label while only
//! asking the complementary opinion to support the true class, and the
//! two parts are averaged at test time to produce a prediction together
//! with an uncertainty mass.
//!
//! The crate also ships a deterministic synthetic-dataset generator for
//! the semantic-vagueness benchmark, CSV bundle I/O, and experiment
//! runners (ablation variants, sharpening-exponent sweeps, noise
//! injection) used by the `ccml` command-line tool.

pub mod data;
pub mod error;
pub mod fusion;
pub mod losses;
pub mod numerics;
pub mod opinion;

pub use data::{
    generate_toy, inject_ood_noise, load_bundle, load_csv, save_bundle, split, BundleMeta,
    MultiViewDataset, ToySpec,
};
pub use error::{Error, Result};
pub use fusion::{aggregate_baseline, decouple, fuse_final, AggregateStrategy, DecoupledEvidence};
pub use losses::{
    ace_loss, complementary_loss, consistent_loss, instance_loss, joint_loss, kl_loss,
    view_specific_loss, AnnealingSchedule, JointLoss, LossValue, LossWeights, Objective,
};
pub use numerics::{digamma, finite_diff_gradient, ln_gamma, trigamma, Rng};
pub use opinion::{separation_degree, DirichletParams, EvidenceVector, SubjectiveOpinion};
