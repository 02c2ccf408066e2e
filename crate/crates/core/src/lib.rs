//! Streaming classification of thermally expressive macro-poses from 2D
//! skeleton keypoint sequences.
//!
//! The pipeline ingests pose-estimator output in the 18-keypoint COCO
//! layout, normalizes all geometry by the forearm length, evaluates ten
//! rule sub-algorithms over a sliding window, and reports one of twelve
//! pose categories together with a seven-point comfort score and a coarse
//! thermal preference suitable for HVAC feedback.
//!
//! Modules:
//! - [`skeleton`]: keypoint/frame/window data model,
//! - [`ingest`]: wire formats (JSON, JSON lines, CSV replay), smoothing,
//!   region-of-interest gating,
//! - [`geometry`]: normalized distance, slope, joint angle, speed, and
//!   oscillation kernels,
//! - [`rules`]: the rule set, priority dispatch, scoring,
//! - [`stream`]: per-frame streaming classification and detection events,
//! - [`synth`]: deterministic labeled clip generator used as the test
//!   oracle,
//! - [`par`]: batch helpers with a sequential fallback behind the
//!   `parallel` feature.

pub mod geometry;
pub mod ingest;
pub mod par;
pub mod rules;
pub mod skeleton;
pub mod stream;
pub mod synth;

pub use rules::{classify, classify_clip, Detection, PoseCategory, RuleConfig};
pub use skeleton::{FrameWindow, Keypoint, KeypointIndex, SkeletonFrame};
