//! The macro-pose rule set: ten sub-algorithms covering twelve categories,
//! a fixed-priority dispatcher, and the mapping from category to comfort
//! score and thermal preference.
//!
//! Walking and stamping share one sub-algorithm, as do hands-around-neck
//! and warm-hands-with-breath; all other categories have one each.

mod detect;

pub use detect::{
    detect_fanning, detect_folded_arm, detect_hands_neck_or_breath, detect_leg_cross,
    detect_roll_sleeves, detect_scratch_head, detect_shaking_tshirt, detect_shoulder_shaking,
    detect_walk_or_stamp, detect_wiping_sweat,
};
pub(crate) use detect::{evaluate_all, usable_frames};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::skeleton::FrameWindow;

/// The twelve recognized macro-poses plus the no-detection state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PoseCategory {
    WipingSweat,
    FanningWithHands,
    ShakingTShirt,
    ScratchHead,
    RollUpSleeves,
    Walking,
    ShoulderShaking,
    FoldedArm,
    LegCross,
    HandsAroundNeck,
    WarmHandsWithBreath,
    StampingFeet,
    None,
}

impl PoseCategory {
    /// The twelve scored categories, in seven-point-scale order.
    pub const SCORED: [PoseCategory; 12] = {
        use PoseCategory::*;
        [
            WipingSweat,
            FanningWithHands,
            ShakingTShirt,
            ScratchHead,
            RollUpSleeves,
            Walking,
            ShoulderShaking,
            FoldedArm,
            LegCross,
            HandsAroundNeck,
            WarmHandsWithBreath,
            StampingFeet,
        ]
    };

    pub fn name(self) -> &'static str {
        match self {
            PoseCategory::WipingSweat => "WipingSweat",
            PoseCategory::FanningWithHands => "FanningWithHands",
            PoseCategory::ShakingTShirt => "ShakingTShirt",
            PoseCategory::ScratchHead => "ScratchHead",
            PoseCategory::RollUpSleeves => "RollUpSleeves",
            PoseCategory::Walking => "Walking",
            PoseCategory::ShoulderShaking => "ShoulderShaking",
            PoseCategory::FoldedArm => "FoldedArm",
            PoseCategory::LegCross => "LegCross",
            PoseCategory::HandsAroundNeck => "HandsAroundNeck",
            PoseCategory::WarmHandsWithBreath => "WarmHandsWithBreath",
            PoseCategory::StampingFeet => "StampingFeet",
            PoseCategory::None => "None",
        }
    }

    pub fn score(self) -> i32 {
        score_of(self)
    }
}

impl std::fmt::Display for PoseCategory {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Seven-point comfort score of a recognized category, from +3 (hot)
/// down to -3 (cold).
///
/// Panics for [`PoseCategory::None`], which carries no score.
pub fn score_of(category: PoseCategory) -> i32 {
    use PoseCategory::*;
    match category {
        WipingSweat => 3,
        FanningWithHands => 3,
        ShakingTShirt => 2,
        ScratchHead => 2,
        RollUpSleeves => 1,
        Walking => 0,
        ShoulderShaking => -1,
        FoldedArm => -2,
        LegCross => -2,
        HandsAroundNeck => -2,
        WarmHandsWithBreath => -3,
        StampingFeet => -3,
        None => panic!("PoseCategory::None carries no comfort score"),
    }
}

/// Thermal preference implied by a comfort score: the sign, so +1 means the
/// occupant runs hot and would prefer it cooler.
pub fn preference_of(score: i32) -> i32 {
    score.signum()
}

/// Fixed evaluation order: head-proximal, most specific rules first, then
/// held postures, with generic locomotion last. Within ties, the larger
/// absolute score goes first so extreme thermal states are never masked.
pub const PRIORITY: [PoseCategory; 12] = {
    use PoseCategory::*;
    [
        WipingSweat,
        FanningWithHands,
        WarmHandsWithBreath,
        HandsAroundNeck,
        ScratchHead,
        ShakingTShirt,
        FoldedArm,
        RollUpSleeves,
        ShoulderShaking,
        LegCross,
        StampingFeet,
        Walking,
    ]
};

/// Thresholds and temporal constants consumed by the rules. Serializes to a
/// flat key/value table; every field is overridable from the command line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RuleConfig {
    /// Keypoint confidence gate; points below it never enter a feature.
    pub epsilon: f64,
    /// Declared nearest-distance threshold. Stored for completeness; it is
    /// the twin of the shoulder-shake divisor and nothing else consumes it.
    pub tau: f64,
    pub wiping_sweat_lr: f64,
    pub fanning_angle_max_deg: f64,
    pub fanning_angle_min_deg: f64,
    pub shaking_tshirt_lr: f64,
    pub scratch_head_lr: f64,
    pub roll_sleeves_lr: f64,
    pub walk_lr: f64,
    pub stamp_slope_delta_deg: f64,
    pub shoulder_shake_lr: f64,
    pub folded_arm_lr: f64,
    pub leg_cross_lr: f64,
    pub neck_breath_lr: f64,
    /// Sliding-window span in seconds.
    pub window_seconds: f64,
    /// Consecutive satisfied frames before a proximity rule may fire.
    pub hysteresis_frames: usize,
    /// Full cycles before an oscillation rule may fire.
    pub min_cycles: usize,
    /// Minimum normalized lateral wrist speed of a wiping sweep, in
    /// forearm lengths per second. Scratching sits below it.
    pub sweep_speed_min: f64,
    /// Walk-versus-stamp gate: walking needs hip travel of at least
    /// `L_s / hip_travel_max_lr` over the window.
    pub hip_travel_max_lr: f64,
}

impl Default for RuleConfig {
    fn default() -> Self {
        Self {
            epsilon: 0.5,
            tau: 1.5,
            wiping_sweat_lr: 1.8,
            fanning_angle_max_deg: 120.0,
            fanning_angle_min_deg: 80.0,
            shaking_tshirt_lr: 1.8,
            scratch_head_lr: 1.8,
            roll_sleeves_lr: 0.9,
            walk_lr: 1.8,
            stamp_slope_delta_deg: 30.0,
            shoulder_shake_lr: 1.5,
            folded_arm_lr: 2.0,
            leg_cross_lr: 1.0,
            neck_breath_lr: 3.0,
            window_seconds: 2.0,
            hysteresis_frames: 5,
            min_cycles: 2,
            sweep_speed_min: 1.5,
            hip_travel_max_lr: 2.0,
        }
    }
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("invalid configuration: {0}")]
    Invalid(String),
    #[error("could not parse configuration: {0}")]
    Parse(String),
}

impl RuleConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        let positive = [
            ("tau", self.tau),
            ("wiping_sweat_lr", self.wiping_sweat_lr),
            ("fanning_angle_max_deg", self.fanning_angle_max_deg),
            ("fanning_angle_min_deg", self.fanning_angle_min_deg),
            ("shaking_tshirt_lr", self.shaking_tshirt_lr),
            ("scratch_head_lr", self.scratch_head_lr),
            ("roll_sleeves_lr", self.roll_sleeves_lr),
            ("walk_lr", self.walk_lr),
            ("stamp_slope_delta_deg", self.stamp_slope_delta_deg),
            ("shoulder_shake_lr", self.shoulder_shake_lr),
            ("folded_arm_lr", self.folded_arm_lr),
            ("leg_cross_lr", self.leg_cross_lr),
            ("neck_breath_lr", self.neck_breath_lr),
            ("window_seconds", self.window_seconds),
            ("hip_travel_max_lr", self.hip_travel_max_lr),
        ];
        for (name, value) in positive {
            if !(value > 0.0) {
                return Err(ConfigError::Invalid(format!(
                    "{name} must be positive, got {value}"
                )));
            }
        }
        if !(0.0..=1.0).contains(&self.epsilon) {
            return Err(ConfigError::Invalid(format!(
                "epsilon must lie in [0, 1], got {}",
                self.epsilon
            )));
        }
        if self.fanning_angle_min_deg >= self.fanning_angle_max_deg {
            return Err(ConfigError::Invalid(format!(
                "fanning_angle_min_deg ({}) must be below fanning_angle_max_deg ({})",
                self.fanning_angle_min_deg, self.fanning_angle_max_deg
            )));
        }
        if self.hysteresis_frames == 0 || self.min_cycles == 0 {
            return Err(ConfigError::Invalid(
                "hysteresis_frames and min_cycles must be at least 1".into(),
            ));
        }
        if !(self.sweep_speed_min >= 0.0) {
            return Err(ConfigError::Invalid(format!(
                "sweep_speed_min must be non-negative, got {}",
                self.sweep_speed_min
            )));
        }
        Ok(())
    }

    /// Parses a flat key/value TOML file; omitted keys keep their defaults,
    /// unknown keys are rejected.
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let patch: RuleConfigPatch =
            toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        let mut config = Self::default();
        config.apply(&patch);
        config.validate()?;
        Ok(config)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("flat config always serializes")
    }

    pub fn apply(&mut self, patch: &RuleConfigPatch) {
        macro_rules! take {
            ($($field:ident),+ $(,)?) => {
                $(if let Some(v) = patch.$field { self.$field = v; })+
            };
        }
        take!(
            epsilon,
            tau,
            wiping_sweat_lr,
            fanning_angle_max_deg,
            fanning_angle_min_deg,
            shaking_tshirt_lr,
            scratch_head_lr,
            roll_sleeves_lr,
            walk_lr,
            stamp_slope_delta_deg,
            shoulder_shake_lr,
            folded_arm_lr,
            leg_cross_lr,
            neck_breath_lr,
            window_seconds,
            hysteresis_frames,
            min_cycles,
            sweep_speed_min,
            hip_travel_max_lr,
        );
    }
}

/// Partial overlay for [`RuleConfig`]: config files and CLI flags both
/// deserialize into this and are applied over the defaults in order.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RuleConfigPatch {
    pub epsilon: Option<f64>,
    pub tau: Option<f64>,
    pub wiping_sweat_lr: Option<f64>,
    pub fanning_angle_max_deg: Option<f64>,
    pub fanning_angle_min_deg: Option<f64>,
    pub shaking_tshirt_lr: Option<f64>,
    pub scratch_head_lr: Option<f64>,
    pub roll_sleeves_lr: Option<f64>,
    pub walk_lr: Option<f64>,
    pub stamp_slope_delta_deg: Option<f64>,
    pub shoulder_shake_lr: Option<f64>,
    pub folded_arm_lr: Option<f64>,
    pub leg_cross_lr: Option<f64>,
    pub neck_breath_lr: Option<f64>,
    pub window_seconds: Option<f64>,
    pub hysteresis_frames: Option<usize>,
    pub min_cycles: Option<usize>,
    pub sweep_speed_min: Option<f64>,
    pub hip_travel_max_lr: Option<f64>,
}

/// One deciding feature: name, observed value, and the threshold it was
/// held against.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Evidence {
    pub feature: &'static str,
    pub value: f64,
    pub threshold: f64,
}

impl Evidence {
    pub fn new(feature: &'static str, value: f64, threshold: f64) -> Self {
        Self {
            feature,
            value,
            threshold,
        }
    }
}

/// A fired rule: which category, over which frame span, on what evidence.
#[derive(Debug, Clone, PartialEq)]
pub struct RuleMatch {
    pub category: PoseCategory,
    pub onset_frame: u64,
    pub last_frame: u64,
    pub evidence: Vec<Evidence>,
}

/// Classification result for one window.
#[derive(Debug, Clone, PartialEq)]
pub struct Detection {
    pub category: PoseCategory,
    /// Comfort score; absent when no rule fired.
    pub score: Option<i32>,
    /// Thermal preference, the sign of the score; absent when no rule fired.
    pub preference: Option<i32>,
    pub onset_frame: u64,
    pub last_frame: u64,
    pub evidence: Vec<Evidence>,
}

impl Detection {
    fn from_match(m: RuleMatch) -> Self {
        let score = score_of(m.category);
        Self {
            category: m.category,
            score: Some(score),
            preference: Some(preference_of(score)),
            onset_frame: m.onset_frame,
            last_frame: m.last_frame,
            evidence: m.evidence,
        }
    }

    fn none(window: &FrameWindow) -> Self {
        Self {
            category: PoseCategory::None,
            score: None,
            preference: None,
            onset_frame: window.first().map_or(0, |f| f.frame_index),
            last_frame: window.last().map_or(0, |f| f.frame_index),
            evidence: Vec::new(),
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum ClassifyError {
    /// Every frame in the window failed the standard-distance computation;
    /// there is nothing to classify. Distinct from a clean no-detection.
    #[error("no usable frames: no frame in the window yields a standard distance")]
    NoUsableFrames,
}

/// Runs the sub-algorithms in priority order over the window; the first
/// firing rule decides. Pure and deterministic in `(window, config)`.
pub fn classify(window: &FrameWindow, config: &RuleConfig) -> Result<Detection, ClassifyError> {
    let usable = usable_frames(window, config.epsilon);
    if usable.is_empty() {
        return Err(ClassifyError::NoUsableFrames);
    }
    let fired = evaluate_all(&usable, config);
    for category in PRIORITY {
        if let Some(m) = fired.iter().find(|m| m.category == category) {
            return Ok(Detection::from_match(m.clone()));
        }
    }
    Ok(Detection::none(window))
}

/// Builds a window over an entire clip and classifies its final state.
pub fn classify_clip(
    frames: &[crate::skeleton::SkeletonFrame],
    fps: f64,
    config: &RuleConfig,
) -> Result<Detection, ClassifyError> {
    let window = FrameWindow::from_frames(frames.iter().cloned(), config.window_seconds, fps);
    classify(&window, config)
}
