//! Keypoint, frame, and sliding-window data model shared by every other
//! module.
//!
//! Coordinates are image-space pixels with `y` growing downward. A keypoint
//! whose confidence falls below the caller's epsilon is *invalid* and its
//! coordinates must not feed any feature computation.

use std::collections::VecDeque;

use thiserror::Error;

/// Number of body keypoints in the COCO-18 layout. The background class is
/// never stored.
pub const KEYPOINT_COUNT: usize = 18;

/// Body-part index of the 18-keypoint skeleton layout.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[repr(usize)]
pub enum KeypointIndex {
    Nose = 0,
    Neck = 1,
    RightShoulder = 2,
    RightElbow = 3,
    RightWrist = 4,
    LeftShoulder = 5,
    LeftElbow = 6,
    LeftWrist = 7,
    RightHip = 8,
    RightKnee = 9,
    RightAnkle = 10,
    LeftHip = 11,
    LeftKnee = 12,
    LeftAnkle = 13,
    RightEye = 14,
    LeftEye = 15,
    RightEar = 16,
    LeftEar = 17,
}

impl KeypointIndex {
    pub const ALL: [KeypointIndex; KEYPOINT_COUNT] = {
        use KeypointIndex::*;
        [
            Nose,
            Neck,
            RightShoulder,
            RightElbow,
            RightWrist,
            LeftShoulder,
            LeftElbow,
            LeftWrist,
            RightHip,
            RightKnee,
            RightAnkle,
            LeftHip,
            LeftKnee,
            LeftAnkle,
            RightEye,
            LeftEye,
            RightEar,
            LeftEar,
        ]
    };

    /// Maps a raw array index to its body part, `None` for anything ≥ 18.
    pub fn from_index(index: usize) -> Option<Self> {
        Self::ALL.get(index).copied()
    }

    pub fn name(self) -> &'static str {
        match self {
            KeypointIndex::Nose => "nose",
            KeypointIndex::Neck => "neck",
            KeypointIndex::RightShoulder => "right_shoulder",
            KeypointIndex::RightElbow => "right_elbow",
            KeypointIndex::RightWrist => "right_wrist",
            KeypointIndex::LeftShoulder => "left_shoulder",
            KeypointIndex::LeftElbow => "left_elbow",
            KeypointIndex::LeftWrist => "left_wrist",
            KeypointIndex::RightHip => "right_hip",
            KeypointIndex::RightKnee => "right_knee",
            KeypointIndex::RightAnkle => "right_ankle",
            KeypointIndex::LeftHip => "left_hip",
            KeypointIndex::LeftKnee => "left_knee",
            KeypointIndex::LeftAnkle => "left_ankle",
            KeypointIndex::RightEye => "right_eye",
            KeypointIndex::LeftEye => "left_eye",
            KeypointIndex::RightEar => "right_ear",
            KeypointIndex::LeftEar => "left_ear",
        }
    }
}

/// One detected body point: image coordinates plus detector confidence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Keypoint {
    pub x: f64,
    pub y: f64,
    pub confidence: f64,
}

impl Keypoint {
    pub fn new(x: f64, y: f64, confidence: f64) -> Self {
        Self { x, y, confidence }
    }

    /// Valid means confidence at or above the gate. The boundary is
    /// inclusive: a keypoint at exactly epsilon is kept.
    pub fn is_valid(&self, epsilon: f64) -> bool {
        self.confidence >= epsilon
    }

    pub fn pos(&self) -> (f64, f64) {
        (self.x, self.y)
    }
}

/// Errors raised while building frames from raw coordinate matrices.
#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    #[error("expected an 18x3 coordinate matrix, got {rows} rows")]
    WrongShape { rows: usize },
    #[error("expected 54 values (18 keypoints x 3), got {len}")]
    WrongFlatLength { len: usize },
    #[error(
        "row {row} ({part}) holds an invalid keypoint: x={x}, y={y}, confidence={confidence} \
         (coordinates must be finite, confidence in [0, 1])"
    )]
    InvalidRow {
        row: usize,
        part: &'static str,
        x: f64,
        y: f64,
        confidence: f64,
    },
}

/// One person's 18 keypoints at a timestamped frame index.
#[derive(Debug, Clone, PartialEq)]
pub struct SkeletonFrame {
    pub keypoints: [Keypoint; KEYPOINT_COUNT],
    pub frame_index: u64,
    /// Seconds; derived as `frame_index / fps` when built from a stream.
    pub timestamp: f64,
    pub person_id: u32,
}

impl SkeletonFrame {
    /// Builds a frame from an 18x3 matrix of `(x, y, confidence)` rows in
    /// layout order. The timestamp is `frame_index / fps`.
    pub fn from_matrix(
        rows: &[[f64; 3]],
        frame_index: u64,
        fps: f64,
        person_id: u32,
    ) -> Result<Self, ModelError> {
        assert!(fps > 0.0, "fps must be positive");
        if rows.len() != KEYPOINT_COUNT {
            return Err(ModelError::WrongShape { rows: rows.len() });
        }
        let mut keypoints = [Keypoint::new(0.0, 0.0, 0.0); KEYPOINT_COUNT];
        for (row, values) in rows.iter().enumerate() {
            let [x, y, confidence] = *values;
            if !x.is_finite() || !y.is_finite() || !(0.0..=1.0).contains(&confidence) {
                return Err(ModelError::InvalidRow {
                    row,
                    part: KeypointIndex::ALL[row].name(),
                    x,
                    y,
                    confidence,
                });
            }
            keypoints[row] = Keypoint::new(x, y, confidence);
        }
        Ok(Self {
            keypoints,
            frame_index,
            timestamp: frame_index as f64 / fps,
            person_id,
        })
    }

    /// Same as [`SkeletonFrame::from_matrix`] but from the flat 54-value
    /// triplet layout used on the wire.
    pub fn from_flat(
        flat: &[f64],
        frame_index: u64,
        fps: f64,
        person_id: u32,
    ) -> Result<Self, ModelError> {
        if flat.len() != KEYPOINT_COUNT * 3 {
            return Err(ModelError::WrongFlatLength { len: flat.len() });
        }
        let mut rows = [[0.0; 3]; KEYPOINT_COUNT];
        for (i, chunk) in flat.chunks_exact(3).enumerate() {
            rows[i] = [chunk[0], chunk[1], chunk[2]];
        }
        Self::from_matrix(&rows, frame_index, fps, person_id)
    }

    /// Inverse of [`SkeletonFrame::from_matrix`].
    pub fn matrix(&self) -> [[f64; 3]; KEYPOINT_COUNT] {
        let mut rows = [[0.0; 3]; KEYPOINT_COUNT];
        for (row, kp) in self.keypoints.iter().enumerate() {
            rows[row] = [kp.x, kp.y, kp.confidence];
        }
        rows
    }

    pub fn kp(&self, index: KeypointIndex) -> Keypoint {
        self.keypoints[index as usize]
    }

    pub fn pos(&self, index: KeypointIndex) -> (f64, f64) {
        self.kp(index).pos()
    }

    /// True iff the keypoint's confidence is at or above `epsilon`.
    pub fn valid(&self, index: KeypointIndex, epsilon: f64) -> bool {
        self.kp(index).is_valid(epsilon)
    }

    /// True iff every listed keypoint is valid.
    ///
    /// Panics on an empty index set; a rule with no required keypoints is a
    /// programming error.
    pub fn required_valid(&self, indices: &[KeypointIndex], epsilon: f64) -> bool {
        assert!(!indices.is_empty(), "required_valid needs at least one index");
        indices.iter().all(|&i| self.valid(i, epsilon))
    }
}

/// Sliding window over the most recent `window_seconds` of one person's
/// frames. Oldest frames are evicted first; the window never holds more than
/// `ceil(window_seconds * fps)` frames and never reorders.
#[derive(Debug, Clone)]
pub struct FrameWindow {
    frames: VecDeque<SkeletonFrame>,
    window_seconds: f64,
    fps: f64,
    capacity: usize,
}

impl FrameWindow {
    pub fn new(window_seconds: f64, fps: f64) -> Self {
        assert!(window_seconds > 0.0, "window_seconds must be positive");
        assert!(fps > 0.0, "fps must be positive");
        let capacity = (window_seconds * fps).ceil().max(1.0) as usize;
        Self {
            frames: VecDeque::with_capacity(capacity + 1),
            window_seconds,
            fps,
            capacity,
        }
    }

    /// Builds a window holding the tail of `frames`.
    pub fn from_frames(
        frames: impl IntoIterator<Item = SkeletonFrame>,
        window_seconds: f64,
        fps: f64,
    ) -> Self {
        let mut window = Self::new(window_seconds, fps);
        for frame in frames {
            window.push(frame);
        }
        window
    }

    /// Appends a frame, evicting anything older than the window span or over
    /// capacity.
    ///
    /// Panics if the frame does not strictly follow the previous one for the
    /// same person; the window is a single-writer structure.
    pub fn push(&mut self, frame: SkeletonFrame) {
        if let Some(last) = self.frames.back() {
            assert_eq!(
                last.person_id, frame.person_id,
                "a window tracks a single person"
            );
            assert!(
                frame.frame_index > last.frame_index,
                "frame_index must strictly increase within a stream"
            );
        }
        let cutoff = frame.timestamp - self.window_seconds;
        self.frames.push_back(frame);
        while self
            .frames
            .front()
            .is_some_and(|front| front.timestamp < cutoff)
        {
            self.frames.pop_front();
        }
        while self.frames.len() > self.capacity {
            self.frames.pop_front();
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = &SkeletonFrame> {
        self.frames.iter()
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn fps(&self) -> f64 {
        self.fps
    }

    pub fn window_seconds(&self) -> f64 {
        self.window_seconds
    }

    pub fn first(&self) -> Option<&SkeletonFrame> {
        self.frames.front()
    }

    pub fn last(&self) -> Option<&SkeletonFrame> {
        self.frames.back()
    }
}
