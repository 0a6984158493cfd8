//! Independent brute-force verifier for Wigner's-friend statistics.
//!
//! Ground truth is produced by two routes that share nothing but the
//! linear-algebra layer: a generic density-matrix pipeline built from
//! prepare/isometry/channel/measure steps, and an explicit enumeration of
//! collapse branches. Closed-form probability tables are implemented here
//! from scratch as plain scalar arithmetic, so cross-validation compares
//! three genuinely independent computations.
//!
//! This crate deliberately depends only on the linear-algebra layer and
//! takes raw amplitudes and channel angles as input; it never calls the
//! scenario library it is used to check.

mod closed_form;
mod config;
mod enumeration;
mod pipeline;
mod validate;

pub use closed_form::{
    collapse_table, conditional_chsh, joint_wn_table, message_overlaps, message_probs,
    record_joint_table, unitary_table,
};
pub use config::TrialConfig;
pub use enumeration::{collapse_enumeration, BranchNode, BranchTree};
pub use pipeline::{
    conditional_chsh_pipeline, extended_chsh_steps, run_pipeline, simple_channel_steps,
    simple_record_steps, simple_unitary_steps, BobSetting, Isometry, PipelineStep, WignerSetting,
};
pub use validate::{cross_validate, Report, WorstCase, DEFAULT_SEED, DEFAULT_TRIALS};
