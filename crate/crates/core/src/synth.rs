//! Deterministic parametric generator of labeled skeleton clips: one
//! animation per macro-pose, a neutral clip, and adversarial confusers.
//! These clips are the independent oracle for the rule suite; their defining
//! geometry is asserted with raw coordinate arithmetic in tests, never by
//! calling the detectors.
//!
//! The body is an 18-point stick figure with fixed proportions in units of
//! the forearm length `L_s` (the generated scale), hip midpoint at the local
//! origin, y growing downward:
//!
//! - shoulder width 2.0, hip width 1.0, hip-to-neck 2.6
//! - nose 0.6 above the neck, eyes/ears around it
//! - upper arm 1.2, forearm 1.0 (forearms never foreshorten: they are the
//!   measuring stick)
//! - thigh 2.0, shank 2.0
//!
//! Every gesture satisfies its rule's thresholds with margin by
//! construction, and leaves every higher-priority rule's predicate
//! unsatisfied.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::rules::PoseCategory;
use crate::skeleton::{Keypoint, KeypointIndex, SkeletonFrame, KEYPOINT_COUNT};

type P = (f64, f64);

const TAU: f64 = std::f64::consts::TAU;

// Keypoint slots by layout index.
const NOSE: usize = 0;
const NECK: usize = 1;
const RSHO: usize = 2;
const RELB: usize = 3;
const RWRI: usize = 4;
const LSHO: usize = 5;
const LELB: usize = 6;
const LWRI: usize = 7;
const RHIP: usize = 8;
const RKNE: usize = 9;
const RANK: usize = 10;
const LHIP: usize = 11;
const LKNE: usize = 12;
const LANK: usize = 13;
const REYE: usize = 14;
const LEYE: usize = 15;
const REAR: usize = 16;
const LEAR: usize = 17;

/// Standing or seated working style. Locomotion clips are always standing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stance {
    Standing,
    Seated,
}

/// Parametric description of one labeled clip. Identical scripts generate
/// bit-identical output.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthScript {
    /// Acted category; `PoseCategory::None` generates the neutral clip.
    pub category: PoseCategory,
    pub stance: Stance,
    pub duration_seconds: f64,
    pub fps: f64,
    /// Forearm length of the generated body, in pixels.
    pub scale: f64,
    /// Image position of the hip midpoint at t = 0.
    pub origin: P,
    /// Primary gesture amplitude. Units depend on the category: sweep
    /// half-width in forearms (wiping), elbow-angle half-swing in degrees
    /// (fanning), grip-slide radius (shirt shaking), wobble radius
    /// (scratching), slide half-range (sleeves), shank half-swing in degrees
    /// (walking), shoulder amplitude (shoulder shaking), lift depth fraction
    /// (stamping). Unused by held postures.
    pub amplitude: f64,
    pub frequency_hz: f64,
    /// Horizontal hip velocity in forearms per second; only walking moves.
    pub hip_speed: f64,
    /// Uniform noise half-width in pixels, applied to every coordinate.
    pub jitter_px: f64,
    pub seed: u64,
}

impl SynthScript {
    /// The tuned standard script for a category.
    pub fn standard(category: PoseCategory, seed: u64) -> Self {
        use PoseCategory::*;
        let (amplitude, frequency_hz, hip_speed) = match category {
            WipingSweat => (0.9, 0.75, 0.0),
            FanningWithHands => (40.0, 2.0, 0.0),
            ShakingTShirt => (0.42, 2.0, 0.0),
            ScratchHead => (0.06, 3.0, 0.0),
            RollUpSleeves => (0.35, 1.0, 0.0),
            Walking => (24.0, 1.5, 2.0),
            ShoulderShaking => (0.45, 3.0, 0.0),
            StampingFeet => (1.0, 1.5, 0.0),
            FoldedArm | LegCross | HandsAroundNeck | WarmHandsWithBreath | None => {
                (0.0, 0.0, 0.0)
            }
        };
        Self {
            category,
            stance: if category == LegCross {
                Stance::Seated
            } else {
                Stance::Standing
            },
            duration_seconds: 2.0,
            fps: 30.0,
            scale: 80.0,
            origin: (960.0, 400.0),
            amplitude,
            frequency_hz,
            hip_speed,
            jitter_px: 0.0,
            seed,
        }
    }
}

fn unit(v: P) -> P {
    let n = (v.0 * v.0 + v.1 * v.1).sqrt();
    debug_assert!(n > 0.0);
    (v.0 / n, v.1 / n)
}

fn add(a: P, b: P) -> P {
    (a.0 + b.0, a.1 + b.1)
}

fn scale_p(v: P, s: f64) -> P {
    (v.0 * s, v.1 * s)
}

fn len(v: P) -> f64 {
    (v.0 * v.0 + v.1 * v.1).sqrt()
}

/// Two-link inverse kinematics: the joint position given an anchor
/// (shoulder/hip), an end effector (wrist/ankle), and the two bone lengths.
/// Of the two mirror solutions, `down` picks the one with the larger y
/// (lower on screen).
fn ik_joint(anchor: P, effector: P, l1: f64, l2: f64, down: bool) -> P {
    let d = len((effector.0 - anchor.0, effector.1 - anchor.1));
    assert!(
        d > (l1 - l2).abs() + 1e-12 && d < l1 + l2 - 1e-12 || (d >= (l1 - l2).abs() && d <= l1 + l2),
        "IK target out of reach: d={d}, bones {l1}+{l2}"
    );
    assert!(d >= (l1 - l2).abs() - 1e-9 && d <= l1 + l2 + 1e-9, "unreachable: {d}");
    let d = d.clamp((l1 - l2).abs(), l1 + l2);
    let a = (l1 * l1 - l2 * l2 + d * d) / (2.0 * d);
    let h = (l1 * l1 - a * a).max(0.0).sqrt();
    let u = unit((effector.0 - anchor.0, effector.1 - anchor.1));
    let n = (-u.1, u.0);
    let base = add(anchor, scale_p(u, a));
    let plus = add(base, scale_p(n, h));
    let minus = add(base, scale_p(n, -h));
    let pick_plus = if down { plus.1 >= minus.1 } else { plus.1 < minus.1 };
    if pick_plus {
        plus
    } else {
        minus
    }
}

// Body proportions in forearm units.
const TORSO: f64 = 2.6;
const SHOULDER_HALF: f64 = 1.0;
const HIP_HALF: f64 = 0.5;
const UPPER_ARM: f64 = 1.2;
const FOREARM: f64 = 1.0;
const THIGH: f64 = 2.0;
const SHANK: f64 = 2.0;

fn rest_pose(stance: Stance) -> [P; KEYPOINT_COUNT] {
    let neck_y = -TORSO;
    let mut p = [(0.0, 0.0); KEYPOINT_COUNT];
    p[NOSE] = (0.0, neck_y - 0.6);
    p[NECK] = (0.0, neck_y);
    p[RSHO] = (-SHOULDER_HALF, neck_y);
    p[LSHO] = (SHOULDER_HALF, neck_y);
    p[RELB] = (-SHOULDER_HALF, neck_y + UPPER_ARM);
    p[LELB] = (SHOULDER_HALF, neck_y + UPPER_ARM);
    p[RWRI] = (-SHOULDER_HALF, neck_y + UPPER_ARM + FOREARM);
    p[LWRI] = (SHOULDER_HALF, neck_y + UPPER_ARM + FOREARM);
    p[RHIP] = (-HIP_HALF, 0.0);
    p[LHIP] = (HIP_HALF, 0.0);
    p[REYE] = (-0.25, neck_y - 0.7);
    p[LEYE] = (0.25, neck_y - 0.7);
    p[REAR] = (-0.5, neck_y - 0.65);
    p[LEAR] = (0.5, neck_y - 0.65);
    match stance {
        Stance::Standing => {
            p[RKNE] = (-HIP_HALF, THIGH);
            p[LKNE] = (HIP_HALF, THIGH);
            p[RANK] = (-HIP_HALF, THIGH + SHANK);
            p[LANK] = (HIP_HALF, THIGH + SHANK);
        }
        Stance::Seated => {
            // Thighs foreshortened toward the camera, shanks hanging.
            p[RKNE] = (-0.55, 0.6);
            p[LKNE] = (0.55, 0.6);
            p[RANK] = (-0.55, 2.6);
            p[LANK] = (0.55, 2.6);
        }
    }
    p
}

fn eye_mid(p: &[P; KEYPOINT_COUNT]) -> P {
    ((p[REYE].0 + p[LEYE].0) / 2.0, (p[REYE].1 + p[LEYE].1) / 2.0)
}

fn chest_anchor(p: &[P; KEYPOINT_COUNT]) -> P {
    let hip_mid = ((p[RHIP].0 + p[LHIP].0) / 2.0, (p[RHIP].1 + p[LHIP].1) / 2.0);
    ((p[NECK].0 + hip_mid.0) / 2.0, (p[NECK].1 + hip_mid.1) / 2.0)
}

/// Rotates `v` by `deg` degrees (screen coordinates, y down).
fn rotate(v: P, deg: f64) -> P {
    let (s, c) = deg.to_radians().sin_cos();
    (v.0 * c - v.1 * s, v.0 * s + v.1 * c)
}

fn pose_at(script: &SynthScript, t: f64) -> [P; KEYPOINT_COUNT] {
    use PoseCategory::*;
    let stance = match script.category {
        Walking | StampingFeet => Stance::Standing,
        _ => script.stance,
    };
    let mut p = rest_pose(stance);
    let w = TAU * script.frequency_hz;
    match script.category {
        None => {}
        WipingSweat => {
            // Right wrist sweeps across the brow, slightly below the eye
            // line, crossing the contact zone around the forehead proxy.
            let proxy = eye_mid(&p);
            let wrist = (proxy.0 + script.amplitude * (w * t).sin(), proxy.1 + 0.15);
            p[RWRI] = wrist;
            p[RELB] = ik_joint(p[RSHO], wrist, UPPER_ARM, FOREARM, true);
        }
        FanningWithHands => {
            // Arm held out to the side, clear of the face and chest zones;
            // the forearm fans about a fixed elbow so the elbow angle swings
            // across the band, hand up when flexed.
            let elbow = add(p[RSHO], scale_p(unit((-0.95, 0.65)), UPPER_ARM));
            let toward_shoulder = unit((p[RSHO].0 - elbow.0, p[RSHO].1 - elbow.1));
            let angle = 100.0 + script.amplitude * (w * t).sin();
            let wrist = add(elbow, scale_p(rotate(toward_shoulder, -angle), FOREARM));
            p[RELB] = elbow;
            p[RWRI] = wrist;
        }
        ShakingTShirt => {
            // Right hand grips the shirt front near the sternum and pumps
            // along the shoulder axis; the elbow stays raised so the flexed
            // extreme never reads as a raised hand.
            let anchor = chest_anchor(&p);
            let axis = unit((p[RSHO].0 - anchor.0, p[RSHO].1 - anchor.1));
            let wrist = add(anchor, scale_p(axis, script.amplitude * (w * t).cos()));
            p[RWRI] = wrist;
            p[RELB] = ik_joint(p[RSHO], wrist, UPPER_ARM, FOREARM, false);
        }
        ScratchHead => {
            // Right wrist parked against the right ear with a small wobble.
            let base = add(p[REAR], (-0.28, 0.2));
            let wrist = (
                base.0 + script.amplitude * (w * t).sin(),
                base.1 + 0.04 * (w * t).cos(),
            );
            p[RWRI] = wrist;
            p[RELB] = ik_joint(p[RSHO], wrist, UPPER_ARM, FOREARM, true);
        }
        RollUpSleeves => {
            // Left forearm held across the lower chest; the right hand rides
            // along it.
            let left_elbow = (1.1, -1.5);
            let axis = unit((-0.98, 0.2));
            let left_wrist = add(left_elbow, scale_p(axis, FOREARM));
            p[LELB] = left_elbow;
            p[LWRI] = left_wrist;
            let mid = (
                (left_elbow.0 + left_wrist.0) / 2.0,
                (left_elbow.1 + left_wrist.1) / 2.0,
            );
            let normal = (-axis.1, axis.0); // points upward off the forearm
            let wrist = add(
                add(mid, scale_p(axis, script.amplitude * (w * t).sin())),
                scale_p(normal, 0.15),
            );
            p[RWRI] = wrist;
            // Elbow kept high so it never wanders toward the left wrist,
            // which would read as a folded-arm tuck.
            p[RELB] = ik_joint(p[RSHO], wrist, UPPER_ARM, FOREARM, false);
        }
        Walking => {
            let shift = script.hip_speed * t;
            for point in &mut p {
                point.0 += shift;
            }
            for (hip, knee, ankle, phase) in
                [(RHIP, RKNE, RANK, 0.0), (LHIP, LKNE, LANK, std::f64::consts::PI)]
            {
                let s = (w * t + phase).sin();
                let knee_p = add(p[hip], (0.45 * s, 1.95));
                let shank_deg = script.amplitude * s;
                let dir = (shank_deg.to_radians().sin(), shank_deg.to_radians().cos());
                p[knee] = knee_p;
                p[ankle] = add(knee_p, scale_p(dir, SHANK));
            }
        }
        ShoulderShaking => {
            let dy = script.amplitude * (w * t).sin();
            for slot in [RSHO, LSHO, RELB, LELB, RWRI, LWRI] {
                p[slot].1 += dy;
            }
        }
        FoldedArm => {
            p[RELB] = (-0.65, -1.8);
            p[LELB] = (0.65, -1.8);
            p[RWRI] = add(p[RELB], (FOREARM, 0.0));
            p[LWRI] = add(p[LELB], (-FOREARM, 0.0));
        }
        LegCross => match stance {
            Stance::Seated => {
                p[LANK] = add(p[RKNE], (0.3, -0.4));
                p[LKNE] = (0.75, 0.45);
            }
            Stance::Standing => {
                p[LANK] = add(p[RKNE], (0.3, -0.4));
                p[LKNE] = (0.9, 1.6);
            }
        },
        HandsAroundNeck => {
            p[RWRI] = add(p[NECK], (-0.25, 0.0));
            p[LWRI] = add(p[NECK], (0.25, 0.0));
            p[RELB] = ik_joint(p[RSHO], p[RWRI], UPPER_ARM, FOREARM, true);
            p[LELB] = ik_joint(p[LSHO], p[LWRI], UPPER_ARM, FOREARM, true);
        }
        WarmHandsWithBreath => {
            p[RWRI] = add(p[NOSE], (-0.25, 0.0));
            p[LWRI] = add(p[NOSE], (0.25, 0.0));
            p[RELB] = ik_joint(p[RSHO], p[RWRI], UPPER_ARM, FOREARM, true);
            p[LELB] = ik_joint(p[LSHO], p[LWRI], UPPER_ARM, FOREARM, true);
        }
        StampingFeet => {
            for (hip, knee, ankle, phase) in
                [(RHIP, RKNE, RANK, 0.0), (LHIP, LKNE, LANK, std::f64::consts::PI)]
            {
                let lift = (w * t + phase).sin().max(0.0) * script.amplitude;
                let knee_p = add(p[hip], (0.5 * lift, THIGH - 0.9 * lift));
                let shank_deg = 45.0 * lift;
                let dir = (
                    -shank_deg.to_radians().sin(),
                    shank_deg.to_radians().cos(),
                );
                p[knee] = knee_p;
                p[ankle] = add(knee_p, scale_p(dir, SHANK));
            }
        }
    }
    p
}

/// Generates the clip described by a script. Pure: the same script yields
/// bit-identical frames.
pub fn generate(script: &SynthScript) -> Vec<SkeletonFrame> {
    assert!(script.duration_seconds > 0.0, "duration must be positive");
    assert!(script.fps > 0.0, "fps must be positive");
    assert!(script.scale > 0.0, "scale must be positive");
    assert!(script.jitter_px >= 0.0, "jitter must be non-negative");
    let frames = (script.duration_seconds * script.fps).round().max(1.0) as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(script.seed);
    (0..frames)
        .map(|i| {
            let t = i as f64 / script.fps;
            let pose = pose_at(script, t);
            let mut keypoints = [Keypoint::new(0.0, 0.0, 1.0); KEYPOINT_COUNT];
            for (slot, &(ux, uy)) in pose.iter().enumerate() {
                let mut x = script.origin.0 + script.scale * ux;
                let mut y = script.origin.1 + script.scale * uy;
                if script.jitter_px > 0.0 {
                    x += rng.gen_range(-script.jitter_px..=script.jitter_px);
                    y += rng.gen_range(-script.jitter_px..=script.jitter_px);
                }
                keypoints[slot] = Keypoint::new(x, y, 1.0);
            }
            SkeletonFrame {
                keypoints,
                frame_index: i as u64,
                timestamp: i as f64 / script.fps,
                person_id: 0,
            }
        })
        .collect()
}

/// A named perturbation applied on top of generated frames.
#[derive(Debug, Clone, PartialEq)]
pub enum Perturbation {
    /// Force one keypoint's confidence to a value in every frame.
    DropConfidence { index: KeypointIndex, value: f64 },
    /// Add uniform noise to every coordinate.
    Jitter { half_width: f64, seed: u64 },
    /// Zero one keypoint's confidence over an inclusive frame-index range.
    OccludeSpan {
        index: KeypointIndex,
        from_frame: u64,
        to_frame: u64,
    },
}

/// Applies exactly the named perturbation; everything else is untouched.
pub fn perturb(frames: &[SkeletonFrame], kind: &Perturbation) -> Vec<SkeletonFrame> {
    let mut out = frames.to_vec();
    match *kind {
        Perturbation::DropConfidence { index, value } => {
            for frame in &mut out {
                frame.keypoints[index as usize].confidence = value;
            }
        }
        Perturbation::Jitter { half_width, seed } => {
            assert!(half_width >= 0.0);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for frame in &mut out {
                for kp in &mut frame.keypoints {
                    if half_width > 0.0 {
                        kp.x += rng.gen_range(-half_width..=half_width);
                        kp.y += rng.gen_range(-half_width..=half_width);
                    }
                }
            }
        }
        Perturbation::OccludeSpan {
            index,
            from_frame,
            to_frame,
        } => {
            for frame in &mut out {
                if (from_frame..=to_frame).contains(&frame.frame_index) {
                    frame.keypoints[index as usize].confidence = 0.0;
                }
            }
        }
    }
    out
}

/// One labeled oracle clip.
#[derive(Debug, Clone)]
pub struct LabeledClip {
    pub name: String,
    /// Category the classifier must report; `None` for the neutral clip.
    pub expected: PoseCategory,
    pub script: SynthScript,
    pub frames: Vec<SkeletonFrame>,
}

/// Keypoints a category's standard clip depends on: dropping any one of
/// them below the confidence gate suppresses that rule.
pub fn rule_keypoints(category: PoseCategory) -> &'static [KeypointIndex] {
    use KeypointIndex::*;
    use PoseCategory::*;
    match category {
        WipingSweat => &[RightWrist],
        FanningWithHands => &[RightShoulder, RightElbow, RightWrist],
        ShakingTShirt => &[RightShoulder, RightElbow, RightWrist, Neck, RightHip, LeftHip],
        ScratchHead => &[RightWrist, RightEar],
        RollUpSleeves => &[RightWrist, LeftElbow, LeftWrist],
        Walking | StampingFeet => &[RightHip, LeftHip, RightKnee, LeftKnee, RightAnkle, LeftAnkle],
        ShoulderShaking => &[RightShoulder, LeftShoulder],
        FoldedArm => &[
            RightShoulder,
            RightElbow,
            RightWrist,
            LeftShoulder,
            LeftElbow,
            LeftWrist,
        ],
        LegCross => &[LeftAnkle, RightKnee],
        HandsAroundNeck => &[RightWrist, LeftWrist, Neck],
        WarmHandsWithBreath => &[RightWrist, LeftWrist, Nose],
        None => &[],
    }
}

fn seeded_variation(script: &mut SynthScript, rng: &mut ChaCha8Rng) {
    script.scale = rng.gen_range(60.0..100.0);
    script.origin = (rng.gen_range(300.0..1400.0), rng.gen_range(150.0..650.0));
    if script.frequency_hz > 0.0 {
        script.frequency_hz *= rng.gen_range(0.95..1.05);
    }
}

/// The labeled oracle corpus: twelve positive clips (one per category), one
/// neutral clip, and four adversarial confusers (walk-vs-stamp and
/// scratch-vs-wipe pairs). Deterministic in the seed; body scale, image
/// placement, and gesture rate vary with it inside margin-safe bands.
pub fn corpus(seed: u64) -> Vec<LabeledClip> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9E37_79B9).wrapping_add(7));
    let mut clips = Vec::with_capacity(17);
    for (i, category) in PoseCategory::SCORED.into_iter().enumerate() {
        let mut script = SynthScript::standard(category, seed.wrapping_add(i as u64));
        seeded_variation(&mut script, &mut rng);
        clips.push(LabeledClip {
            name: format!("{category}"),
            expected: category,
            frames: generate(&script),
            script,
        });
    }
    let mut neutral = SynthScript::standard(PoseCategory::None, seed.wrapping_add(100));
    seeded_variation(&mut neutral, &mut rng);
    clips.push(LabeledClip {
        name: "Neutral".to_string(),
        expected: PoseCategory::None,
        frames: generate(&neutral),
        script: neutral,
    });

    // Confuser pairs probe the two disambiguations that matter: locomotion
    // versus stamping in place, and sweeping versus scratching.
    let mut walk = SynthScript::standard(PoseCategory::Walking, seed.wrapping_add(200));
    walk.hip_speed = 0.8;
    walk.amplitude = 20.0;
    seeded_variation(&mut walk, &mut rng);
    let mut stamp = SynthScript::standard(PoseCategory::StampingFeet, seed.wrapping_add(201));
    stamp.frequency_hz = 2.2;
    stamp.amplitude = 0.9;
    seeded_variation(&mut stamp, &mut rng);
    let mut wipe = SynthScript::standard(PoseCategory::WipingSweat, seed.wrapping_add(202));
    wipe.frequency_hz = 1.0;
    seeded_variation(&mut wipe, &mut rng);
    wipe.frequency_hz = wipe.frequency_hz.min(1.0);
    let mut scratch = SynthScript::standard(PoseCategory::ScratchHead, seed.wrapping_add(203));
    scratch.amplitude = 0.08;
    scratch.frequency_hz = 3.5;
    seeded_variation(&mut scratch, &mut rng);
    for (name, script) in [
        ("WalkingConfuser", walk),
        ("StampingConfuser", stamp),
        ("WipingConfuser", wipe),
        ("ScratchConfuser", scratch),
    ] {
        clips.push(LabeledClip {
            name: name.to_string(),
            expected: script.category,
            frames: generate(&script),
            script,
        });
    }
    clips
}
