//! The ten pose sub-algorithms.
//!
//! Every detector shares the same shape: it sees only the window's *usable*
//! frames (those with a standard distance), evaluates a per-frame geometric
//! predicate plus a temporal condition (a sustained run or an oscillation
//! count), and reports the deciding feature values as evidence. Fewer usable
//! frames than the hysteresis length simply reads as "did not fire".

use crate::geometry::{
    detect_oscillation, joint_angle_deg_points, midpoint, rel_from_distance, slope_deg_points,
    slope_range_deg, standard_distance,
};
use crate::rules::{Evidence, PoseCategory, RuleConfig, RuleMatch};
use crate::skeleton::{FrameWindow, KeypointIndex, SkeletonFrame};

use KeypointIndex::*;

/// One usable window frame with its normalization scale.
pub(crate) struct Usable<'a> {
    pub frame: &'a SkeletonFrame,
    pub ls: f64,
}

pub(crate) fn usable_frames(window: &FrameWindow, epsilon: f64) -> Vec<Usable<'_>> {
    window
        .iter()
        .filter_map(|frame| {
            standard_distance(frame, epsilon).ok().map(|ctx| Usable {
                frame,
                ls: ctx.standard_distance,
            })
        })
        .collect()
}

fn mean_ls(usable: &[Usable<'_>]) -> f64 {
    usable.iter().map(|u| u.ls).sum::<f64>() / usable.len() as f64
}

/// Maximal runs of consecutive `true` flags as `(start, len)`.
fn runs(flags: &[bool]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, &flag) in flags.iter().enumerate() {
        match (flag, start) {
            (true, None) => start = Some(i),
            (false, Some(s)) => {
                out.push((s, i - s));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push((s, flags.len() - s));
    }
    out
}

/// The longest run, earliest on ties. Sustained rules report this span so
/// the detection onset reflects the longest hold, not the first flicker.
fn longest_run(runs: impl IntoIterator<Item = (usize, usize)>) -> Option<(usize, usize)> {
    runs.into_iter()
        .max_by_key(|&(start, len)| (len, std::cmp::Reverse(start)))
}

/// Mean normalized lateral (x) speed of a keypoint over a span of usable
/// frames, in forearm lengths per second. `None` with fewer than two frames.
fn mean_lateral_speed(
    usable: &[Usable<'_>],
    point: KeypointIndex,
    start: usize,
    len: usize,
) -> Option<f64> {
    if len < 2 {
        return None;
    }
    let span = &usable[start..start + len];
    let mut total = 0.0;
    let mut pairs = 0usize;
    for pair in span.windows(2) {
        let (prev, next) = (&pair[0], &pair[1]);
        let dt = next.frame.timestamp - prev.frame.timestamp;
        debug_assert!(dt > 0.0);
        let dx = next.frame.pos(point).0 - prev.frame.pos(point).0;
        total += (dx / dt).abs() / next.ls;
        pairs += 1;
    }
    (pairs > 0).then(|| total / pairs as f64)
}

fn span_match(
    usable: &[Usable<'_>],
    category: PoseCategory,
    start: usize,
    len: usize,
    evidence: Vec<Evidence>,
) -> RuleMatch {
    RuleMatch {
        category,
        onset_frame: usable[start].frame.frame_index,
        last_frame: usable[start + len - 1].frame.frame_index,
        evidence,
    }
}

/// Forehead stand-in: eye midpoint when both eyes are valid, else the nose
/// raised by half a forearm.
fn forehead_proxy(u: &Usable<'_>, epsilon: f64) -> Option<(f64, f64)> {
    let f = u.frame;
    if f.valid(RightEye, epsilon) && f.valid(LeftEye, epsilon) {
        Some(midpoint(f.pos(RightEye), f.pos(LeftEye)))
    } else if f.valid(Nose, epsilon) {
        let (x, y) = f.pos(Nose);
        Some((x, y - 0.5 * u.ls))
    } else {
        None
    }
}

/// Sternum stand-in: midpoint of the neck and the hip midpoint. Needs all
/// three keypoints.
fn chest_anchor(frame: &SkeletonFrame, epsilon: f64) -> Option<(f64, f64)> {
    (frame.valid(Neck, epsilon) && frame.valid(RightHip, epsilon) && frame.valid(LeftHip, epsilon))
        .then(|| {
            midpoint(
                frame.pos(Neck),
                midpoint(frame.pos(RightHip), frame.pos(LeftHip)),
            )
        })
}

// ---------------------------------------------------------------------------
// Elbow-angle band oscillation (shared by fanning and shirt shaking)
// ---------------------------------------------------------------------------

struct ArmSample {
    angle: f64,
    wrist_above_elbow: bool,
}

fn arm_samples(
    usable: &[Usable<'_>],
    shoulder: KeypointIndex,
    elbow: KeypointIndex,
    wrist: KeypointIndex,
    epsilon: f64,
) -> Vec<Option<ArmSample>> {
    usable
        .iter()
        .map(|u| {
            let f = u.frame;
            if !f.required_valid(&[shoulder, elbow, wrist], epsilon) {
                return None;
            }
            let (s, e, w) = (f.pos(shoulder), f.pos(elbow), f.pos(wrist));
            if s == e || w == e {
                return None;
            }
            Some(ArmSample {
                angle: joint_angle_deg_points(s, e, w),
                wrist_above_elbow: w.1 < e.1,
            })
        })
        .collect()
}

#[derive(Clone, Copy, PartialEq)]
enum BandSide {
    Low,
    High,
}

/// Scans an elbow-angle trace for excursions that leave the band on
/// alternating sides and returns the counted events in frame order.
///
/// An excursion below `min_deg` counts at its extreme frame; when
/// `flex_needs_raised_hand` is set (the fanning rule) the extreme frame must
/// also show the wrist above the elbow. Excursions above `max_deg` count
/// unconditionally. A full cycle is a pair of alternations.
fn band_events(
    samples: &[Option<ArmSample>],
    min_deg: f64,
    max_deg: f64,
    flex_needs_raised_hand: bool,
) -> Vec<(usize, BandSide)> {
    struct Excursion {
        side: BandSide,
        extreme_pos: usize,
        extreme_angle: f64,
        raised_at_extreme: bool,
    }
    let mut events: Vec<(usize, BandSide)> = Vec::new();
    let mut active: Option<Excursion> = None;
    let mut last_counted: Option<BandSide> = None;

    let finalize = |active: &mut Option<Excursion>, events: &mut Vec<(usize, BandSide)>,
                    last_counted: &mut Option<BandSide>| {
        if let Some(exc) = active.take() {
            let qualifies = match exc.side {
                BandSide::Low => !flex_needs_raised_hand || exc.raised_at_extreme,
                BandSide::High => true,
            };
            if qualifies && *last_counted != Some(exc.side) {
                events.push((exc.extreme_pos, exc.side));
                *last_counted = Some(exc.side);
            }
        }
    };

    for (pos, sample) in samples.iter().enumerate() {
        let Some(sample) = sample else {
            finalize(&mut active, &mut events, &mut last_counted);
            continue;
        };
        let side = if sample.angle < min_deg {
            Some(BandSide::Low)
        } else if sample.angle > max_deg {
            Some(BandSide::High)
        } else {
            None
        };
        match side {
            None => finalize(&mut active, &mut events, &mut last_counted),
            Some(side) => {
                let extend = matches!(&active, Some(exc) if exc.side == side);
                if extend {
                    let exc = active.as_mut().unwrap();
                    let more_extreme = match side {
                        BandSide::Low => sample.angle < exc.extreme_angle,
                        BandSide::High => sample.angle > exc.extreme_angle,
                    };
                    if more_extreme {
                        exc.extreme_pos = pos;
                        exc.extreme_angle = sample.angle;
                        exc.raised_at_extreme = sample.wrist_above_elbow;
                    }
                } else {
                    finalize(&mut active, &mut events, &mut last_counted);
                    active = Some(Excursion {
                        side,
                        extreme_pos: pos,
                        extreme_angle: sample.angle,
                        raised_at_extreme: sample.wrist_above_elbow,
                    });
                }
            }
        }
    }
    finalize(&mut active, &mut events, &mut last_counted);
    events
}

const ARMS: [(KeypointIndex, KeypointIndex, KeypointIndex); 2] = [
    (RightShoulder, RightElbow, RightWrist),
    (LeftShoulder, LeftElbow, LeftWrist),
];

const WRISTS: [KeypointIndex; 2] = [RightWrist, LeftWrist];

// ---------------------------------------------------------------------------
// The ten sub-algorithms
// ---------------------------------------------------------------------------

pub(crate) fn wiping_sweat(usable: &[Usable<'_>], config: &RuleConfig) -> Option<RuleMatch> {
    if usable.len() < config.hysteresis_frames {
        return None;
    }
    for wrist in WRISTS {
        let rels: Vec<Option<f64>> = usable
            .iter()
            .map(|u| {
                if !u.frame.valid(wrist, config.epsilon) {
                    return None;
                }
                let proxy = forehead_proxy(u, config.epsilon)?;
                Some(rel_from_distance(
                    u.ls,
                    crate::geometry::dist(u.frame.pos(wrist), proxy),
                ))
            })
            .collect();
        let flags: Vec<bool> = rels
            .iter()
            .map(|r| r.is_some_and(|rel| rel >= config.wiping_sweat_lr))
            .collect();
        let qualifying: Vec<(usize, usize, f64)> = runs(&flags)
            .into_iter()
            .filter_map(|(start, len)| {
                if len < config.hysteresis_frames {
                    return None;
                }
                let lateral = mean_lateral_speed(usable, wrist, start, len)?;
                (lateral >= config.sweep_speed_min).then_some((start, len, lateral))
            })
            .collect();
        if let Some(&(start, len, lateral)) = qualifying
            .iter()
            .max_by_key(|&&(start, len, _)| (len, std::cmp::Reverse(start)))
        {
            let min_rel = rels[start..start + len]
                .iter()
                .flatten()
                .fold(f64::INFINITY, |a, &b| a.min(b));
            return Some(span_match(
                usable,
                PoseCategory::WipingSweat,
                start,
                len,
                vec![
                    Evidence::new("wrist_forehead_rel", min_rel, config.wiping_sweat_lr),
                    Evidence::new("lateral_sweep_speed", lateral, config.sweep_speed_min),
                ],
            ));
        }
    }
    None
}

pub(crate) fn fanning(usable: &[Usable<'_>], config: &RuleConfig) -> Option<RuleMatch> {
    if usable.len() < config.hysteresis_frames {
        return None;
    }
    for (shoulder, elbow, wrist) in ARMS {
        let samples = arm_samples(usable, shoulder, elbow, wrist, config.epsilon);
        let events = band_events(
            &samples,
            config.fanning_angle_min_deg,
            config.fanning_angle_max_deg,
            true,
        );
        let cycles = events.len() / 2;
        if cycles >= config.min_cycles {
            let (first, last) = (events[0].0, events[events.len() - 1].0);
            return Some(span_match(
                usable,
                PoseCategory::FanningWithHands,
                first,
                last - first + 1,
                vec![Evidence::new(
                    "elbow_band_cycles",
                    cycles as f64,
                    config.min_cycles as f64,
                )],
            ));
        }
    }
    None
}

pub(crate) fn shaking_tshirt(usable: &[Usable<'_>], config: &RuleConfig) -> Option<RuleMatch> {
    if usable.len() < config.hysteresis_frames {
        return None;
    }
    for (shoulder, elbow, wrist) in ARMS {
        let rels: Vec<Option<f64>> = usable
            .iter()
            .map(|u| {
                if !u.frame.valid(wrist, config.epsilon) {
                    return None;
                }
                let anchor = chest_anchor(u.frame, config.epsilon)?;
                Some(rel_from_distance(
                    u.ls,
                    crate::geometry::dist(u.frame.pos(wrist), anchor),
                ))
            })
            .collect();
        let flags: Vec<bool> = rels
            .iter()
            .map(|r| r.is_some_and(|rel| rel >= config.shaking_tshirt_lr))
            .collect();
        let Some((start, len)) = longest_run(
            runs(&flags)
                .into_iter()
                .filter(|&(_, len)| len >= config.hysteresis_frames),
        ) else {
            continue;
        };
        let samples = arm_samples(usable, shoulder, elbow, wrist, config.epsilon);
        let events = band_events(
            &samples,
            config.fanning_angle_min_deg,
            config.fanning_angle_max_deg,
            false,
        );
        let cycles = events.len() / 2;
        if cycles >= config.min_cycles {
            let min_rel = rels[start..start + len]
                .iter()
                .flatten()
                .fold(f64::INFINITY, |a, &b| a.min(b));
            return Some(span_match(
                usable,
                PoseCategory::ShakingTShirt,
                start,
                len,
                vec![
                    Evidence::new("wrist_chest_rel", min_rel, config.shaking_tshirt_lr),
                    Evidence::new(
                        "elbow_band_cycles",
                        cycles as f64,
                        config.min_cycles as f64,
                    ),
                ],
            ));
        }
    }
    None
}

pub(crate) fn scratch_head(usable: &[Usable<'_>], config: &RuleConfig) -> Option<RuleMatch> {
    if usable.len() < config.hysteresis_frames {
        return None;
    }
    for wrist in WRISTS {
        let rels: Vec<Option<f64>> = usable
            .iter()
            .map(|u| {
                let f = u.frame;
                if !f.valid(wrist, config.epsilon) {
                    return None;
                }
                let w = f.pos(wrist);
                let mut best: Option<f64> = None;
                for ear in [RightEar, LeftEar] {
                    if f.valid(ear, config.epsilon) {
                        let rel = rel_from_distance(u.ls, crate::geometry::dist(w, f.pos(ear)));
                        best = Some(best.map_or(rel, |b: f64| b.max(rel)));
                    }
                }
                if f.valid(Nose, config.epsilon) {
                    let (nx, ny) = f.pos(Nose);
                    let top = (nx, ny - u.ls);
                    let rel = rel_from_distance(u.ls, crate::geometry::dist(w, top));
                    best = Some(best.map_or(rel, |b: f64| b.max(rel)));
                }
                best
            })
            .collect();
        let flags: Vec<bool> = rels
            .iter()
            .map(|r| r.is_some_and(|rel| rel >= config.scratch_head_lr))
            .collect();
        let qualifying: Vec<(usize, usize, f64)> = runs(&flags)
            .into_iter()
            .filter_map(|(start, len)| {
                if len < config.hysteresis_frames {
                    return None;
                }
                let lateral = mean_lateral_speed(usable, wrist, start, len)?;
                (lateral < config.sweep_speed_min).then_some((start, len, lateral))
            })
            .collect();
        if let Some(&(start, len, lateral)) = qualifying
            .iter()
            .max_by_key(|&&(start, len, _)| (len, std::cmp::Reverse(start)))
        {
            let min_rel = rels[start..start + len]
                .iter()
                .flatten()
                .fold(f64::INFINITY, |a, &b| a.min(b));
            return Some(span_match(
                usable,
                PoseCategory::ScratchHead,
                start,
                len,
                vec![
                    Evidence::new("wrist_head_rel", min_rel, config.scratch_head_lr),
                    Evidence::new("lateral_speed", lateral, config.sweep_speed_min),
                ],
            ));
        }
    }
    None
}

pub(crate) fn roll_sleeves(usable: &[Usable<'_>], config: &RuleConfig) -> Option<RuleMatch> {
    if usable.len() < config.hysteresis_frames {
        return None;
    }
    let arms = [
        (RightWrist, LeftElbow, LeftWrist),
        (LeftWrist, RightElbow, RightWrist),
    ];
    for (acting, opp_elbow, opp_wrist) in arms {
        let mut rels: Vec<Option<f64>> = Vec::with_capacity(usable.len());
        let mut projections: Vec<f64> = Vec::new();
        for u in usable {
            let f = u.frame;
            if !f.required_valid(&[acting, opp_elbow, opp_wrist], config.epsilon) {
                rels.push(None);
                continue;
            }
            let (ex, ey) = f.pos(opp_elbow);
            let (wx, wy) = f.pos(opp_wrist);
            let axis = (wx - ex, wy - ey);
            let norm = (axis.0 * axis.0 + axis.1 * axis.1).sqrt();
            if norm == 0.0 {
                rels.push(None);
                continue;
            }
            let unit = (axis.0 / norm, axis.1 / norm);
            let mid = midpoint((ex, ey), (wx, wy));
            let a = f.pos(acting);
            rels.push(Some(rel_from_distance(
                u.ls,
                crate::geometry::dist(a, mid),
            )));
            projections.push((a.0 * unit.0 + a.1 * unit.1) / u.ls);
        }
        let flags: Vec<bool> = rels
            .iter()
            .map(|r| r.is_some_and(|rel| rel >= config.roll_sleeves_lr))
            .collect();
        let Some((start, len)) = longest_run(
            runs(&flags)
                .into_iter()
                .filter(|&(_, len)| len >= config.hysteresis_frames),
        ) else {
            continue;
        };
        if projections.len() < 2 {
            continue;
        }
        let lo = projections.iter().fold(f64::INFINITY, |a, &b| a.min(b));
        let hi = projections.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b));
        let travel = hi - lo;
        if travel >= 0.5 {
            let min_rel = rels[start..start + len]
                .iter()
                .flatten()
                .fold(f64::INFINITY, |a, &b| a.min(b));
            return Some(span_match(
                usable,
                PoseCategory::RollUpSleeves,
                start,
                len,
                vec![
                    Evidence::new("wrist_forearm_rel", min_rel, config.roll_sleeves_lr),
                    Evidence::new("axial_travel_ls", travel, 0.5),
                ],
            ));
        }
    }
    None
}

/// Shared walk/stamp sub-algorithm. Both need leg activity (each shank's
/// slope swinging past the threshold, or the ankle bobbing); hip travel then
/// separates locomotion from stamping in place, and walking additionally
/// needs the stride to open past `L_s / walk_lr`.
pub(crate) fn walk_or_stamp(usable: &[Usable<'_>], config: &RuleConfig) -> Option<RuleMatch> {
    if usable.len() < config.hysteresis_frames {
        return None;
    }
    let ls = mean_ls(usable);
    let legs = [(RightKnee, RightAnkle), (LeftKnee, LeftAnkle)];
    let mut slope_ranges = [0.0f64; 2];
    for (i, (knee, ankle)) in legs.into_iter().enumerate() {
        let slopes: Vec<f64> = usable
            .iter()
            .filter_map(|u| {
                let f = u.frame;
                (f.valid(knee, config.epsilon)
                    && f.valid(ankle, config.epsilon)
                    && f.pos(knee) != f.pos(ankle))
                .then(|| slope_deg_points(f.pos(knee), f.pos(ankle)))
            })
            .collect();
        let range = slope_range_deg(&slopes);
        slope_ranges[i] = range;
        if range < config.stamp_slope_delta_deg {
            let (_, ankle_idx) = legs[i];
            let bobs: Vec<(f64, f64)> = usable
                .iter()
                .filter(|u| u.frame.valid(ankle_idx, config.epsilon))
                .map(|u| (u.frame.timestamp, u.frame.pos(ankle_idx).1))
                .collect();
            let osc = detect_oscillation(&bobs, ls / 2.0, config.min_cycles);
            if osc.cycle_count < config.min_cycles {
                return None;
            }
        }
    }

    let hip_xs: Vec<f64> = usable
        .iter()
        .filter_map(|u| {
            let f = u.frame;
            (f.valid(RightHip, config.epsilon) && f.valid(LeftHip, config.epsilon))
                .then(|| midpoint(f.pos(RightHip), f.pos(LeftHip)).0)
        })
        .collect();
    if hip_xs.is_empty() {
        return None;
    }
    let travel = hip_xs.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b))
        - hip_xs.iter().fold(f64::INFINITY, |a, &b| a.min(b));
    let travel_gate = ls / config.hip_travel_max_lr;

    let evidence_base = vec![
        Evidence::new(
            "shank_slope_range",
            slope_ranges[0].min(slope_ranges[1]),
            config.stamp_slope_delta_deg,
        ),
        Evidence::new("hip_travel_px", travel, travel_gate),
    ];

    if travel >= travel_gate {
        // Peak stride width: the smallest ankle-to-ankle relative distance.
        let min_rel = usable
            .iter()
            .filter_map(|u| {
                let f = u.frame;
                (f.valid(RightAnkle, config.epsilon) && f.valid(LeftAnkle, config.epsilon)).then(
                    || {
                        rel_from_distance(
                            u.ls,
                            crate::geometry::dist(f.pos(RightAnkle), f.pos(LeftAnkle)),
                        )
                    },
                )
            })
            .fold(f64::INFINITY, |a, b| a.min(b));
        if min_rel <= config.walk_lr {
            let mut evidence = evidence_base;
            evidence.push(Evidence::new("stride_rel", min_rel, config.walk_lr));
            return Some(span_match(
                usable,
                PoseCategory::Walking,
                0,
                usable.len(),
                evidence,
            ));
        }
        return None;
    }
    Some(span_match(
        usable,
        PoseCategory::StampingFeet,
        0,
        usable.len(),
        evidence_base,
    ))
}

pub(crate) fn shoulder_shaking(usable: &[Usable<'_>], config: &RuleConfig) -> Option<RuleMatch> {
    if usable.len() < config.hysteresis_frames {
        return None;
    }
    let ls = mean_ls(usable);
    let samples: Vec<(f64, f64)> = usable
        .iter()
        .filter_map(|u| {
            let f = u.frame;
            (f.valid(RightShoulder, config.epsilon) && f.valid(LeftShoulder, config.epsilon))
                .then(|| {
                    (
                        f.timestamp,
                        (f.pos(RightShoulder).1 + f.pos(LeftShoulder).1) / 2.0,
                    )
                })
        })
        .collect();
    let amplitude = ls / config.shoulder_shake_lr;
    let osc = detect_oscillation(&samples, amplitude, config.min_cycles);
    if osc.cycle_count >= config.min_cycles
        && osc.peak_to_peak.is_some_and(|pp| pp >= amplitude)
    {
        return Some(span_match(
            usable,
            PoseCategory::ShoulderShaking,
            0,
            usable.len(),
            vec![
                Evidence::new(
                    "shoulder_y_peak_to_peak",
                    osc.peak_to_peak.unwrap(),
                    amplitude,
                ),
                Evidence::new(
                    "shoulder_cycles",
                    osc.cycle_count as f64,
                    config.min_cycles as f64,
                ),
            ],
        ));
    }
    None
}

pub(crate) fn folded_arm(usable: &[Usable<'_>], config: &RuleConfig) -> Option<RuleMatch> {
    if usable.len() < config.hysteresis_frames {
        return None;
    }
    let required = [
        RightShoulder,
        RightElbow,
        RightWrist,
        LeftShoulder,
        LeftElbow,
        LeftWrist,
    ];
    let mut min_rel = f64::INFINITY;
    let flags: Vec<bool> = usable
        .iter()
        .map(|u| {
            let f = u.frame;
            if !f.required_valid(&required, config.epsilon) {
                return false;
            }
            let rel_l = rel_from_distance(
                u.ls,
                crate::geometry::dist(f.pos(LeftWrist), f.pos(RightElbow)),
            );
            let rel_r = rel_from_distance(
                u.ls,
                crate::geometry::dist(f.pos(RightWrist), f.pos(LeftElbow)),
            );
            let (lo, hi) = {
                let a = f.pos(RightShoulder).0;
                let b = f.pos(LeftShoulder).0;
                (a.min(b), a.max(b))
            };
            let between = |x: f64| x > lo && x < hi;
            let ok = rel_l >= config.folded_arm_lr
                && rel_r >= config.folded_arm_lr
                && between(f.pos(LeftWrist).0)
                && between(f.pos(RightWrist).0);
            if ok {
                min_rel = min_rel.min(rel_l.min(rel_r));
            }
            ok
        })
        .collect();
    longest_run(
        runs(&flags)
            .into_iter()
            .filter(|&(_, len)| len >= config.hysteresis_frames),
    )
    .map(|(start, len)| {
        span_match(
            usable,
            PoseCategory::FoldedArm,
            start,
            len,
            vec![Evidence::new(
                "wrist_opposite_elbow_rel",
                min_rel,
                config.folded_arm_lr,
            )],
        )
    })
}

pub(crate) fn leg_cross(usable: &[Usable<'_>], config: &RuleConfig) -> Option<RuleMatch> {
    // A held posture, not a transient: double hysteresis.
    let needed = 2 * config.hysteresis_frames;
    if usable.len() < needed {
        return None;
    }
    let pairs = [(RightAnkle, LeftKnee), (LeftAnkle, RightKnee)];
    for (ankle, knee) in pairs {
        let rels: Vec<Option<f64>> = usable
            .iter()
            .map(|u| {
                let f = u.frame;
                (f.valid(ankle, config.epsilon) && f.valid(knee, config.epsilon)).then(|| {
                    rel_from_distance(u.ls, crate::geometry::dist(f.pos(ankle), f.pos(knee)))
                })
            })
            .collect();
        let flags: Vec<bool> = rels
            .iter()
            .map(|r| r.is_some_and(|rel| rel >= config.leg_cross_lr))
            .collect();
        if let Some((start, len)) =
            longest_run(runs(&flags).into_iter().filter(|&(_, len)| len >= needed))
        {
            let min_rel = rels[start..start + len]
                .iter()
                .flatten()
                .fold(f64::INFINITY, |a, &b| a.min(b));
            return Some(span_match(
                usable,
                PoseCategory::LegCross,
                start,
                len,
                vec![Evidence::new(
                    "ankle_opposite_knee_rel",
                    min_rel,
                    config.leg_cross_lr,
                )],
            ));
        }
    }
    None
}

/// Shared neck/breath sub-algorithm: both wrists held close to a target.
/// Nose means warming the hands with breath, neck means hands around the
/// neck; when both targets qualify the closer one (larger summed relative
/// distance) wins.
pub(crate) fn hands_neck_or_breath(
    usable: &[Usable<'_>],
    config: &RuleConfig,
) -> Option<RuleMatch> {
    if usable.len() < config.hysteresis_frames {
        return None;
    }
    struct Candidate {
        category: PoseCategory,
        start: usize,
        len: usize,
        mean_sum: f64,
        min_rel: f64,
    }
    let targets = [
        (Nose, PoseCategory::WarmHandsWithBreath),
        (Neck, PoseCategory::HandsAroundNeck),
    ];
    let mut candidates: Vec<Candidate> = Vec::new();
    for (target, category) in targets {
        let per_frame: Vec<Option<(f64, f64)>> = usable
            .iter()
            .map(|u| {
                let f = u.frame;
                if !f.required_valid(&[RightWrist, LeftWrist, target], config.epsilon) {
                    return None;
                }
                let t = f.pos(target);
                let rel_r = rel_from_distance(u.ls, crate::geometry::dist(f.pos(RightWrist), t));
                let rel_l = rel_from_distance(u.ls, crate::geometry::dist(f.pos(LeftWrist), t));
                Some((rel_r.min(rel_l), rel_r + rel_l))
            })
            .collect();
        let flags: Vec<bool> = per_frame
            .iter()
            .map(|s| s.is_some_and(|(min_rel, _)| min_rel >= config.neck_breath_lr))
            .collect();
        let Some((start, len)) = longest_run(
            runs(&flags)
                .into_iter()
                .filter(|&(_, len)| len >= config.hysteresis_frames),
        ) else {
            continue;
        };
        let span: Vec<(f64, f64)> = per_frame[start..start + len]
            .iter()
            .flatten()
            .copied()
            .collect();
        let mean_sum = span.iter().map(|(_, sum)| sum).sum::<f64>() / span.len() as f64;
        let min_rel = span
            .iter()
            .map(|&(min_rel, _)| min_rel)
            .fold(f64::INFINITY, f64::min);
        candidates.push(Candidate {
            category,
            start,
            len,
            mean_sum,
            min_rel,
        });
    }
    let winner = candidates.into_iter().max_by(|a, b| {
        a.mean_sum
            .partial_cmp(&b.mean_sum)
            .unwrap_or(std::cmp::Ordering::Equal)
    })?;
    Some(span_match(
        usable,
        winner.category,
        winner.start,
        winner.len,
        vec![
            Evidence::new("wrists_target_rel", winner.min_rel, config.neck_breath_lr),
            Evidence::new("summed_rel", winner.mean_sum, 2.0 * config.neck_breath_lr),
        ],
    ))
}

/// Runs all ten sub-algorithms once and collects the fired matches.
pub(crate) fn evaluate_all(usable: &[Usable<'_>], config: &RuleConfig) -> Vec<RuleMatch> {
    [
        wiping_sweat(usable, config),
        fanning(usable, config),
        shaking_tshirt(usable, config),
        scratch_head(usable, config),
        roll_sleeves(usable, config),
        walk_or_stamp(usable, config),
        shoulder_shaking(usable, config),
        folded_arm(usable, config),
        leg_cross(usable, config),
        hands_neck_or_breath(usable, config),
    ]
    .into_iter()
    .flatten()
    .collect()
}

macro_rules! public_detector {
    ($(#[$doc:meta])* $name:ident, $impl:ident) => {
        $(#[$doc])*
        pub fn $name(window: &FrameWindow, config: &RuleConfig) -> Option<RuleMatch> {
            let usable = usable_frames(window, config.epsilon);
            $impl(&usable, config)
        }
    };
}

public_detector!(
    /// Wrist held close to the forehead with a fast lateral sweep.
    detect_wiping_sweat,
    wiping_sweat
);
public_detector!(
    /// Elbow angle oscillating out of the flex/extend band with the hand
    /// raised at the flexed extreme.
    detect_fanning,
    fanning
);
public_detector!(
    /// Wrist gripping near the chest while the elbow angle flaps across the
    /// band.
    detect_shaking_tshirt,
    shaking_tshirt
);
public_detector!(
    /// Wrist held at an ear or the crown with low lateral speed.
    detect_scratch_head,
    scratch_head
);
public_detector!(
    /// Wrist riding the opposite forearm with axial travel.
    detect_roll_sleeves,
    roll_sleeves
);
public_detector!(
    /// Shared locomotion rule; returns Walking or StampingFeet.
    detect_walk_or_stamp,
    walk_or_stamp
);
public_detector!(
    /// Shoulder line bobbing vertically.
    detect_shoulder_shaking,
    shoulder_shaking
);
public_detector!(
    /// Both wrists tucked at the opposite elbows between the shoulders.
    detect_folded_arm,
    folded_arm
);
public_detector!(
    /// One ankle resting on the opposite knee, held.
    detect_leg_cross,
    leg_cross
);
public_detector!(
    /// Shared proximity rule; returns HandsAroundNeck or
    /// WarmHandsWithBreath.
    detect_hands_neck_or_breath,
    hands_neck_or_breath
);
