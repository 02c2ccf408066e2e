//! Geometric feature kernels: forearm-normalized distances, slopes, joint
//! angles, movement speed, and windowed oscillation detection.
//!
//! All functions are pure. Distances are normalized by the *standard
//! distance*: the left forearm length, falling back to the right forearm
//! when the left is not measurable. The relative distance between two points
//! is `standard / separation`, so a LARGER value means the points are
//! CLOSER, in reciprocal forearm units.

use thiserror::Error;

use crate::skeleton::{FrameWindow, KeypointIndex, SkeletonFrame};

#[derive(Debug, Error, PartialEq)]
pub enum FeatureError {
    /// Neither forearm yields a positive length; the frame carries no scale
    /// and must be discarded from classification.
    #[error("frame unusable: no forearm with two valid keypoints and positive length")]
    FrameUnusable,
    #[error("insufficient data: fewer than two valid samples")]
    InsufficientData,
}

/// Which forearm produced the standard distance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ForearmSource {
    Left,
    Right,
}

/// Per-frame normalization state: the standard distance and the validity
/// gate it was computed under.
#[derive(Debug, Clone, Copy)]
pub struct FeatureContext<'a> {
    pub frame: &'a SkeletonFrame,
    pub epsilon: f64,
    /// Forearm length in pixels; always positive.
    pub standard_distance: f64,
    pub source: ForearmSource,
}

pub(crate) fn dist(a: (f64, f64), b: (f64, f64)) -> f64 {
    let dx = b.0 - a.0;
    let dy = b.1 - a.1;
    (dx * dx + dy * dy).sqrt()
}

pub(crate) fn midpoint(a: (f64, f64), b: (f64, f64)) -> (f64, f64) {
    ((a.0 + b.0) / 2.0, (a.1 + b.1) / 2.0)
}

/// Relative distance from a raw separation. A zero separation means the
/// points coincide; that returns infinity so every proximity test of the
/// form `rel >= threshold` treats coincident points as satisfied.
pub fn rel_from_distance(standard: f64, separation: f64) -> f64 {
    if separation == 0.0 {
        f64::INFINITY
    } else {
        standard / separation
    }
}

/// Computes the standard distance for a frame: the left forearm
/// (elbow 6 to wrist 7) when both points are valid, otherwise the right
/// forearm (3 to 4).
///
/// A frame whose selected forearm has zero length, or with no valid forearm
/// at all, is unusable and must be dropped from classification.
pub fn standard_distance(
    frame: &SkeletonFrame,
    epsilon: f64,
) -> Result<FeatureContext<'_>, FeatureError> {
    use KeypointIndex::*;
    let forearm = |elbow: KeypointIndex, wrist: KeypointIndex| {
        (frame.valid(elbow, epsilon) && frame.valid(wrist, epsilon))
            .then(|| dist(frame.pos(elbow), frame.pos(wrist)))
    };
    let (standard, source) = if let Some(d) = forearm(LeftElbow, LeftWrist) {
        (d, ForearmSource::Left)
    } else if let Some(d) = forearm(RightElbow, RightWrist) {
        (d, ForearmSource::Right)
    } else {
        return Err(FeatureError::FrameUnusable);
    };
    if standard == 0.0 {
        return Err(FeatureError::FrameUnusable);
    }
    Ok(FeatureContext {
        frame,
        epsilon,
        standard_distance: standard,
        source,
    })
}

impl<'a> FeatureContext<'a> {
    /// Relative distance between two derived points, in reciprocal forearm
    /// units.
    pub fn rel_between(&self, a: (f64, f64), b: (f64, f64)) -> f64 {
        rel_from_distance(self.standard_distance, dist(a, b))
    }
}

/// Relative Euclidean distance between two keypoints.
///
/// Panics if the keypoints are equal indices or not valid under the
/// context's epsilon; callers gate on validity first.
pub fn rel_distance(ctx: &FeatureContext<'_>, a: KeypointIndex, b: KeypointIndex) -> f64 {
    assert_ne!(a, b, "rel_distance needs two distinct keypoints");
    assert!(
        ctx.frame.valid(a, ctx.epsilon) && ctx.frame.valid(b, ctx.epsilon),
        "rel_distance requires valid keypoints ({} and {})",
        a.name(),
        b.name()
    );
    ctx.rel_between(ctx.frame.pos(a), ctx.frame.pos(b))
}

/// Slope of the segment from `a` to `b`, in degrees in `(-90, 90]`.
/// A vertical segment returns exactly 90.
///
/// Panics when the points coincide. Validity is the caller's contract.
pub fn slope_deg(frame: &SkeletonFrame, a: KeypointIndex, b: KeypointIndex) -> f64 {
    let (ax, ay) = frame.pos(a);
    let (bx, by) = frame.pos(b);
    assert!(
        ax != bx || ay != by,
        "slope is undefined for coincident points ({} and {})",
        a.name(),
        b.name()
    );
    slope_deg_points((ax, ay), (bx, by))
}

pub(crate) fn slope_deg_points(a: (f64, f64), b: (f64, f64)) -> f64 {
    let dx = b.0 - a.0;
    if dx == 0.0 {
        90.0
    } else {
        ((b.1 - a.1) / dx).atan().to_degrees()
    }
}

/// Interior angle at `vertex` between the rays toward `a` and `c`, in
/// degrees in `[0, 180]`.
///
/// Panics on a zero-length ray.
pub fn joint_angle_deg(
    frame: &SkeletonFrame,
    a: KeypointIndex,
    vertex: KeypointIndex,
    c: KeypointIndex,
) -> f64 {
    joint_angle_deg_points(frame.pos(a), frame.pos(vertex), frame.pos(c))
}

pub(crate) fn joint_angle_deg_points(a: (f64, f64), vertex: (f64, f64), c: (f64, f64)) -> f64 {
    let u = (a.0 - vertex.0, a.1 - vertex.1);
    let w = (c.0 - vertex.0, c.1 - vertex.1);
    let nu = (u.0 * u.0 + u.1 * u.1).sqrt();
    let nw = (w.0 * w.0 + w.1 * w.1).sqrt();
    assert!(
        nu > 0.0 && nw > 0.0,
        "joint angle is undefined for a zero-length ray"
    );
    let cos = ((u.0 * w.0 + u.1 * w.1) / (nu * nw)).clamp(-1.0, 1.0);
    cos.acos().to_degrees()
}

/// One per-pair speed measurement; `frame_index`/`timestamp` are the later
/// frame's.
#[derive(Debug, Clone, Copy)]
pub struct SpeedSample {
    pub frame_index: u64,
    pub timestamp: f64,
    /// Euclidean speed in pixels per second.
    pub px_per_sec: f64,
    /// Signed velocity components in pixels per second.
    pub vx_px_per_sec: f64,
    pub vy_px_per_sec: f64,
    /// Speed divided by the later frame's standard distance, when that frame
    /// is usable.
    pub normalized: Option<f64>,
}

/// Movement speed of one keypoint over the window: one sample per
/// consecutive pair of frames where the keypoint is valid.
pub fn speed(
    window: &FrameWindow,
    index: KeypointIndex,
    epsilon: f64,
) -> Result<Vec<SpeedSample>, FeatureError> {
    let frames: Vec<&SkeletonFrame> = window
        .iter()
        .filter(|f| f.valid(index, epsilon))
        .collect();
    if frames.len() < 2 {
        return Err(FeatureError::InsufficientData);
    }
    Ok(frames
        .windows(2)
        .map(|pair| {
            let (prev, next) = (pair[0], pair[1]);
            let dt = next.timestamp - prev.timestamp;
            debug_assert!(dt > 0.0);
            let (px, py) = prev.pos(index);
            let (nx, ny) = next.pos(index);
            let vx = (nx - px) / dt;
            let vy = (ny - py) / dt;
            let px_per_sec = dist((px, py), (nx, ny)) / dt;
            let normalized = standard_distance(next, epsilon)
                .ok()
                .map(|ctx| px_per_sec / ctx.standard_distance);
            SpeedSample {
                frame_index: next.frame_index,
                timestamp: next.timestamp,
                px_per_sec,
                vx_px_per_sec: vx,
                vy_px_per_sec: vy,
                normalized,
            }
        })
        .collect())
}

/// Summary of a detected oscillation. `peak_to_peak` and `period` are absent
/// when no full cycle was counted.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Oscillation {
    pub cycle_count: usize,
    pub peak_to_peak: Option<f64>,
    pub period: Option<f64>,
}

impl Oscillation {
    pub const NONE: Oscillation = Oscillation {
        cycle_count: 0,
        peak_to_peak: None,
        period: None,
    };
}

/// Counts oscillation cycles in a timestamped signal.
///
/// The signal is mean-removed; a half-cycle is counted each time the
/// centered signal reaches at least `min_amplitude / 2` on the side opposite
/// the previously counted one. A full cycle is a pair of such alternations.
/// `min_cycles` is the caller's acceptance threshold and must be at least 1;
/// the measurement itself is always reported.
pub fn detect_oscillation(
    samples: &[(f64, f64)],
    min_amplitude: f64,
    min_cycles: usize,
) -> Oscillation {
    assert!(min_amplitude > 0.0, "min_amplitude must be positive");
    assert!(min_cycles >= 1, "min_cycles must be at least 1");
    if samples.len() < 3 {
        return Oscillation::NONE;
    }
    debug_assert!(
        samples.windows(2).all(|w| w[0].0 <= w[1].0),
        "samples must be ordered by timestamp"
    );
    let mean = samples.iter().map(|&(_, v)| v).sum::<f64>() / samples.len() as f64;
    let half = min_amplitude / 2.0;

    let mut last_side: i8 = 0;
    let mut half_cycles = 0usize;
    for &(_, v) in samples {
        let centered = v - mean;
        if centered >= half && last_side != 1 {
            last_side = 1;
            half_cycles += 1;
        } else if centered <= -half && last_side != -1 {
            last_side = -1;
            half_cycles += 1;
        }
    }
    let cycle_count = half_cycles / 2;
    if cycle_count == 0 {
        return Oscillation::NONE;
    }

    let (min, max) = samples.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &(_, v)| {
        (lo.min(v), hi.max(v))
    });
    let span = samples.last().unwrap().0 - samples.first().unwrap().0;
    Oscillation {
        cycle_count,
        peak_to_peak: Some(max - min),
        period: Some(span / cycle_count as f64),
    }
}

/// Minimal arc, in degrees, containing a set of undirected line slopes.
///
/// Slopes live on a circle of circumference 180 (a segment at 89° and one at
/// -89° are only 2° apart), so a plain max-minus-min would explode for
/// near-vertical limbs. Returns 0 for fewer than two samples.
pub fn slope_range_deg(slopes: &[f64]) -> f64 {
    if slopes.len() < 2 {
        return 0.0;
    }
    let mut angles: Vec<f64> = slopes.iter().map(|s| s.rem_euclid(180.0)).collect();
    angles.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut max_gap = 180.0 - angles.last().unwrap() + angles.first().unwrap();
    for pair in angles.windows(2) {
        max_gap = max_gap.max(pair[1] - pair[0]);
    }
    (180.0 - max_gap).max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::skeleton::KEYPOINT_COUNT;

    fn frame_with(points: &[(KeypointIndex, f64, f64, f64)]) -> SkeletonFrame {
        let mut rows = [[0.0; 3]; KEYPOINT_COUNT];
        for &(index, x, y, c) in points {
            rows[index as usize] = [x, y, c];
        }
        SkeletonFrame::from_matrix(&rows, 0, 30.0, 0).unwrap()
    }

    use KeypointIndex::*;

    #[test]
    fn standard_distance_prefers_left_forearm() {
        let frame = frame_with(&[
            (LeftElbow, 300.0, 300.0, 0.9),
            (LeftWrist, 300.0, 380.0, 0.9),
        ]);
        let ctx = standard_distance(&frame, 0.5).unwrap();
        assert_eq!(ctx.standard_distance, 80.0);
        assert_eq!(ctx.source, ForearmSource::Left);
    }

    #[test]
    fn standard_distance_falls_back_to_right() {
        let frame = frame_with(&[
            (RightElbow, 100.0, 100.0, 0.9),
            (RightWrist, 130.0, 140.0, 0.9),
            (LeftWrist, 10.0, 10.0, 0.9), // elbow invalid, so left is out
        ]);
        let ctx = standard_distance(&frame, 0.5).unwrap();
        assert_eq!(ctx.standard_distance, 50.0);
        assert_eq!(ctx.source, ForearmSource::Right);
    }

    #[test]
    fn standard_distance_zero_length_is_unusable() {
        let frame = frame_with(&[
            (LeftElbow, 300.0, 300.0, 0.9),
            (LeftWrist, 300.0, 300.0, 0.9),
        ]);
        assert_eq!(
            standard_distance(&frame, 0.5).unwrap_err(),
            FeatureError::FrameUnusable
        );
    }

    #[test]
    fn standard_distance_requires_a_forearm() {
        let frame = frame_with(&[(Nose, 5.0, 5.0, 0.9)]);
        assert_eq!(
            standard_distance(&frame, 0.5).unwrap_err(),
            FeatureError::FrameUnusable
        );
    }

    #[test]
    fn rel_distance_quotients() {
        let frame = frame_with(&[
            (LeftElbow, 0.0, 0.0, 0.9),
            (LeftWrist, 0.0, 80.0, 0.9),
            (Nose, 100.0, 0.0, 0.9),
            (Neck, 140.0, 0.0, 0.9),
            (RightHip, 100.0, 80.0, 0.9),
        ]);
        let ctx = standard_distance(&frame, 0.5).unwrap();
        assert_eq!(rel_distance(&ctx, Nose, Neck), 2.0);
        assert_eq!(rel_distance(&ctx, Nose, RightHip), 1.0);
        // Dividing the forearm length by itself is exactly 1.
        assert_eq!(rel_distance(&ctx, LeftWrist, LeftElbow), 1.0);
    }

    #[test]
    fn rel_distance_coincident_points_read_as_infinitely_close() {
        let frame = frame_with(&[
            (LeftElbow, 0.0, 0.0, 0.9),
            (LeftWrist, 0.0, 80.0, 0.9),
            (Nose, 7.0, 7.0, 0.9),
            (Neck, 7.0, 7.0, 0.9),
        ]);
        let ctx = standard_distance(&frame, 0.5).unwrap();
        let rel = rel_distance(&ctx, Nose, Neck);
        assert!(rel.is_infinite() && rel > 0.0);
        assert!(rel >= 3.0, "every proximity threshold is satisfied");
    }

    #[test]
    fn rel_distance_is_symmetric() {
        let frame = frame_with(&[
            (LeftElbow, 3.0, 4.0, 0.9),
            (LeftWrist, 60.0, 81.5, 0.9),
            (Nose, 12.0, -9.0, 0.9),
            (Neck, 31.0, 44.0, 0.9),
        ]);
        let ctx = standard_distance(&frame, 0.5).unwrap();
        assert_eq!(
            rel_distance(&ctx, Nose, Neck),
            rel_distance(&ctx, Neck, Nose)
        );
    }

    #[test]
    fn slope_conventions() {
        let frame = frame_with(&[
            (Nose, 100.0, 100.0, 0.9),
            (Neck, 150.0, 150.0, 0.9),
            (RightShoulder, 100.0, 250.0, 0.9),
            (RightElbow, 200.0, 100.0, 0.9),
        ]);
        assert_eq!(slope_deg(&frame, Nose, Neck), 45.0);
        assert_eq!(slope_deg(&frame, Nose, RightShoulder), 90.0);
        assert_eq!(slope_deg(&frame, Nose, RightElbow), 0.0);
        // Direction does not matter for an undirected segment.
        assert_eq!(slope_deg(&frame, Neck, Nose), 45.0);
    }

    #[test]
    fn joint_angle_conventions() {
        let frame = frame_with(&[
            (LeftShoulder, 0.0, 0.0, 0.9),
            (LeftElbow, 0.0, 100.0, 0.9),
            (LeftWrist, 0.0, 200.0, 0.9),
            (RightWrist, 100.0, 100.0, 0.9),
        ]);
        assert_eq!(joint_angle_deg(&frame, LeftShoulder, LeftElbow, LeftWrist), 180.0);
        assert_eq!(joint_angle_deg(&frame, LeftShoulder, LeftElbow, RightWrist), 90.0);
        // Swapping the endpoints is bit-exact.
        assert_eq!(
            joint_angle_deg(&frame, LeftShoulder, LeftElbow, RightWrist),
            joint_angle_deg(&frame, RightWrist, LeftElbow, LeftShoulder)
        );
    }

    fn moving_window(positions: &[(f64, f64)]) -> FrameWindow {
        let mut window = FrameWindow::new(10.0, 30.0);
        for (i, &(x, y)) in positions.iter().enumerate() {
            let mut rows = [[0.0; 3]; KEYPOINT_COUNT];
            rows[RightWrist as usize] = [x, y, 0.9];
            rows[LeftElbow as usize] = [0.0, 0.0, 0.9];
            rows[LeftWrist as usize] = [0.0, 80.0, 0.9];
            window.push(SkeletonFrame::from_matrix(&rows, i as u64, 30.0, 0).unwrap());
        }
        window
    }

    #[test]
    fn speed_of_a_step_is_distance_times_fps() {
        let window = moving_window(&[(0.0, 0.0), (30.0, 40.0)]);
        let samples = speed(&window, RightWrist, 0.5).unwrap();
        assert_eq!(samples.len(), 1);
        assert!((samples[0].px_per_sec - 1500.0).abs() < 1e-9);
        assert!((samples[0].normalized.unwrap() - 1500.0 / 80.0).abs() < 1e-9);
    }

    #[test]
    fn speed_of_a_stationary_point_is_zero() {
        let window = moving_window(&[(5.0, 5.0), (5.0, 5.0), (5.0, 5.0)]);
        let samples = speed(&window, RightWrist, 0.5).unwrap();
        assert!(samples.iter().all(|s| s.px_per_sec == 0.0));
    }

    #[test]
    fn speed_needs_two_valid_samples() {
        let window = moving_window(&[(0.0, 0.0)]);
        assert_eq!(
            speed(&window, RightWrist, 0.5).unwrap_err(),
            FeatureError::InsufficientData
        );
    }

    #[test]
    fn oscillation_constant_signal() {
        let samples: Vec<(f64, f64)> = (0..30).map(|i| (i as f64 / 30.0, 4.0)).collect();
        assert_eq!(detect_oscillation(&samples, 1.0, 1), Oscillation::NONE);
    }

    #[test]
    fn oscillation_square_wave_counts_full_cycles() {
        // Three full cycles of a +/-A square wave with A = min_amplitude.
        let a = 2.0;
        let mut samples = Vec::new();
        for cycle in 0..3 {
            for i in 0..5 {
                samples.push(((cycle * 10 + i) as f64 * 0.01, a));
            }
            for i in 5..10 {
                samples.push(((cycle * 10 + i) as f64 * 0.01, -a));
            }
        }
        let osc = detect_oscillation(&samples, a, 1);
        assert_eq!(osc.cycle_count, 3);
        assert_eq!(osc.peak_to_peak, Some(2.0 * a));
        assert!(osc.period.is_some());
    }

    #[test]
    fn oscillation_subthreshold_wiggle_does_not_count() {
        let samples: Vec<(f64, f64)> = (0..60)
            .map(|i| {
                let t = i as f64 / 30.0;
                (t, 0.2 * (t * 12.0).sin())
            })
            .collect();
        assert_eq!(detect_oscillation(&samples, 1.0, 1).cycle_count, 0);
    }

    #[test]
    fn oscillation_is_sign_symmetric() {
        let samples: Vec<(f64, f64)> = (0..90)
            .map(|i| {
                let t = i as f64 / 30.0;
                (t, 3.0 * (t * 8.0).sin() + 1.7)
            })
            .collect();
        let negated: Vec<(f64, f64)> = samples.iter().map(|&(t, v)| (t, -v)).collect();
        let a = detect_oscillation(&samples, 2.0, 1);
        let b = detect_oscillation(&negated, 2.0, 1);
        assert_eq!(a.cycle_count, b.cycle_count);
        assert_eq!(a.peak_to_peak, b.peak_to_peak);
    }

    #[test]
    fn slope_range_handles_vertical_wraparound() {
        // A shank wobbling 2 degrees either side of vertical.
        let range = slope_range_deg(&[88.0, -88.0, 89.0, -89.0]);
        assert!((range - 4.0).abs() < 1e-9, "got {range}");
        // A genuine 40-degree swing.
        let range = slope_range_deg(&[70.0, 90.0, 110.0 - 180.0]);
        assert!((range - 40.0).abs() < 1e-9, "got {range}");
        assert_eq!(slope_range_deg(&[45.0]), 0.0);
        assert_eq!(slope_range_deg(&[45.0, 45.0, 45.0]), 0.0);
    }
}
