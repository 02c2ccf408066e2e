//! Streaming classification: per-frame window updates, detection-event
//! spans with onset and release, and the document-in/events-out pipeline the
//! CLI drives (smoothing look-ahead, ROI gating, one classifier per person).

use std::collections::BTreeMap;

use crate::ingest::{OpenPoseDocument, RoiGate, SmoothingBuffer};
use crate::rules::{classify, Detection, Evidence, PoseCategory, RuleConfig};
use crate::skeleton::{FrameWindow, SkeletonFrame};

/// One closed detection span: a contiguous stretch of frames classified as
/// the same non-idle category.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectionEvent {
    pub person_id: u32,
    pub category: PoseCategory,
    pub score: i32,
    pub preference: i32,
    pub onset_frame: u64,
    pub last_frame: u64,
    pub onset_timestamp: f64,
    /// Evidence from the first window that reported the category.
    pub evidence: Vec<Evidence>,
}

/// Per-frame classification verdict, for frame-granular output.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameVerdict {
    pub person_id: u32,
    pub frame_index: u64,
    pub timestamp: f64,
    pub category: PoseCategory,
    pub score: Option<i32>,
    pub preference: Option<i32>,
}

struct OpenSpan {
    category: PoseCategory,
    onset_frame: u64,
    onset_timestamp: f64,
    last_frame: u64,
    evidence: Vec<Evidence>,
}

/// Single-person streaming classifier: feed frames in order, collect events
/// as spans close. The final open span is flushed by [`StreamClassifier::finish`].
pub struct StreamClassifier {
    window: FrameWindow,
    config: RuleConfig,
    person_id: u32,
    open: Option<OpenSpan>,
    usable_frames: u64,
    frames_seen: u64,
}

impl StreamClassifier {
    pub fn new(config: RuleConfig, fps: f64, person_id: u32) -> Self {
        Self {
            window: FrameWindow::new(config.window_seconds, fps),
            config,
            person_id,
            open: None,
            usable_frames: 0,
            frames_seen: 0,
        }
    }

    /// Frames whose window produced a usable standard distance.
    pub fn usable_frames(&self) -> u64 {
        self.usable_frames
    }

    pub fn frames_seen(&self) -> u64 {
        self.frames_seen
    }

    /// Pushes one frame; returns the verdict for this frame and, when the
    /// running span closed, the finished event.
    pub fn push(&mut self, frame: SkeletonFrame) -> (FrameVerdict, Option<DetectionEvent>) {
        self.frames_seen += 1;
        let frame_index = frame.frame_index;
        let timestamp = frame.timestamp;
        if crate::geometry::standard_distance(&frame, self.config.epsilon).is_ok() {
            self.usable_frames += 1;
        }
        self.window.push(frame);
        let detection: Option<Detection> = classify(&self.window, &self.config).ok();
        let category = detection
            .as_ref()
            .map_or(PoseCategory::None, |d| d.category);

        let verdict = FrameVerdict {
            person_id: self.person_id,
            frame_index,
            timestamp,
            category,
            score: detection.as_ref().and_then(|d| d.score),
            preference: detection.as_ref().and_then(|d| d.preference),
        };

        let mut closed = None;
        match &mut self.open {
            Some(span) if span.category == category => {
                span.last_frame = frame_index;
            }
            _ => {
                closed = self.take_event();
                if category != PoseCategory::None {
                    self.open = Some(OpenSpan {
                        category,
                        onset_frame: frame_index,
                        onset_timestamp: timestamp,
                        last_frame: frame_index,
                        evidence: detection.map(|d| d.evidence).unwrap_or_default(),
                    });
                }
            }
        }
        (verdict, closed)
    }

    /// Closes and returns the running span, if any.
    pub fn finish(&mut self) -> Option<DetectionEvent> {
        self.take_event()
    }

    fn take_event(&mut self) -> Option<DetectionEvent> {
        self.open.take().map(|span| {
            let score = crate::rules::score_of(span.category);
            DetectionEvent {
                person_id: self.person_id,
                category: span.category,
                score,
                preference: crate::rules::preference_of(score),
                onset_frame: span.onset_frame,
                last_frame: span.last_frame,
                onset_timestamp: span.onset_timestamp,
                evidence: span.evidence,
            }
        })
    }
}

/// Output of one pipeline step.
#[derive(Debug, Default)]
pub struct StepOutput {
    pub events: Vec<DetectionEvent>,
    pub verdicts: Vec<FrameVerdict>,
}

struct PersonState {
    smoother: SmoothingBuffer,
    classifier: StreamClassifier,
}

/// Document-level pipeline: positional person identity, look-ahead
/// smoothing, ROI gating, then one streaming classifier per person.
pub struct Pipeline {
    config: RuleConfig,
    fps: f64,
    smooth_radius: usize,
    roi: Option<RoiGate>,
    persons: BTreeMap<u32, PersonState>,
    next_document: u64,
}

impl Pipeline {
    pub fn new(config: RuleConfig, fps: f64, smooth_radius: usize, roi: Option<RoiGate>) -> Self {
        assert!(fps > 0.0, "fps must be positive");
        Self {
            config,
            fps,
            smooth_radius,
            roi,
            persons: BTreeMap::new(),
            next_document: 0,
        }
    }

    /// Feeds one document; the document position is the frame index.
    pub fn push_document(&mut self, document: &OpenPoseDocument) -> StepOutput {
        let frame_index = self.next_document;
        self.next_document += 1;
        let mut out = StepOutput::default();
        for (person, record) in document.people.iter().enumerate() {
            match SkeletonFrame::from_flat(
                &record.pose_keypoints_2d,
                frame_index,
                self.fps,
                person as u32,
            ) {
                Ok(frame) => self.feed(frame, &mut out),
                Err(_) => continue,
            }
        }
        out
    }

    /// Feeds one pre-built frame (CSV replay path).
    pub fn push_frame(&mut self, frame: SkeletonFrame) -> StepOutput {
        let mut out = StepOutput::default();
        self.feed(frame, &mut out);
        out
    }

    fn feed(&mut self, frame: SkeletonFrame, out: &mut StepOutput) {
        let person_id = frame.person_id;
        let config = self.config.clone();
        let fps = self.fps;
        let radius = self.smooth_radius;
        let state = self.persons.entry(person_id).or_insert_with(|| PersonState {
            smoother: SmoothingBuffer::new(radius, config.epsilon),
            classifier: StreamClassifier::new(config.clone(), fps, person_id),
        });
        if let Some(smoothed) = state.smoother.push(frame) {
            Self::classify_frame(&self.roi, &self.config, state, smoothed, out);
        }
    }

    fn classify_frame(
        roi: &Option<RoiGate>,
        config: &RuleConfig,
        state: &mut PersonState,
        frame: SkeletonFrame,
        out: &mut StepOutput,
    ) {
        if let Some(gate) = roi {
            if !gate.admits(&frame, config.epsilon) {
                return;
            }
        }
        let (verdict, closed) = state.classifier.push(frame);
        out.verdicts.push(verdict);
        out.events.extend(closed);
    }

    /// Flushes smoothing look-ahead and closes all running spans.
    pub fn finish(&mut self) -> StepOutput {
        let mut out = StepOutput::default();
        let roi = self.roi;
        let config = self.config.clone();
        for state in self.persons.values_mut() {
            for frame in state.smoother.finish() {
                Self::classify_frame(&roi, &config, state, frame, &mut out);
            }
            out.events.extend(state.classifier.finish());
        }
        out
    }

    pub fn frames_seen(&self) -> u64 {
        self.persons.values().map(|s| s.classifier.frames_seen()).sum()
    }

    pub fn usable_frames(&self) -> u64 {
        self.persons
            .values()
            .map(|s| s.classifier.usable_frames())
            .sum()
    }

    pub fn person_count(&self) -> usize {
        self.persons.len()
    }
}
