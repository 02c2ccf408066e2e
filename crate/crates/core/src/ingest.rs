//! Parsing of pose-estimator output into skeleton frame sequences, plus
//! keypoint-domain cleanup: confidence-weighted smoothing and region-of-
//! interest gating.
//!
//! Three input carriers are supported:
//! - a directory of per-frame JSON files (the estimator's native layout,
//!   sorted lexicographically),
//! - a JSON-lines stream, one document per line, for live piping,
//! - a CSV replay file with header
//!   `frame_index,person_id,kp00_x,kp00_y,kp00_c,...,kp17_c`.

use std::fs;
use std::io::{BufRead, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::skeleton::{Keypoint, KeypointIndex, ModelError, SkeletonFrame, KEYPOINT_COUNT};

/// Values per person on the wire: 18 keypoints x (x, y, confidence).
pub const FLAT_LEN: usize = KEYPOINT_COUNT * 3;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("malformed JSON at line {line}, column {column} (byte offset {offset}): {message}")]
    Json {
        line: usize,
        column: usize,
        offset: usize,
        message: String,
    },
    #[error("person {person}: pose_keypoints_2d holds {len} values, expected {FLAT_LEN}")]
    KeypointCount { person: usize, len: usize },
    #[error("person {person}: {source}")]
    BadKeypoint { person: usize, source: ModelError },
    #[error("configuration error: {0}")]
    Config(String),
    #[error("csv error: {0}")]
    Csv(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// One pose-estimator output document: every person found in one frame.
/// Unknown fields are ignored on input.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OpenPoseDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub version: Option<f64>,
    #[serde(default)]
    pub people: Vec<PersonRecord>,
}

/// One person's flat keypoint triplets `[x0, y0, c0, ..., x17, y17, c17]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PersonRecord {
    pub pose_keypoints_2d: Vec<f64>,
}

/// Parses one document from UTF-8 JSON bytes, validating the 54-value
/// keypoint layout for every person.
pub fn parse_openpose_json(text: &[u8]) -> Result<OpenPoseDocument, IngestError> {
    let document: OpenPoseDocument =
        serde_json::from_slice(text).map_err(|e| json_error(text, &e))?;
    for (person, record) in document.people.iter().enumerate() {
        if record.pose_keypoints_2d.len() != FLAT_LEN {
            return Err(IngestError::KeypointCount {
                person,
                len: record.pose_keypoints_2d.len(),
            });
        }
    }
    Ok(document)
}

fn json_error(text: &[u8], err: &serde_json::Error) -> IngestError {
    let (line, column) = (err.line().max(1), err.column());
    // serde_json reports 1-based line/column; recover the byte offset.
    let offset = text
        .split(|&b| b == b'\n')
        .take(line - 1)
        .map(|l| l.len() + 1)
        .sum::<usize>()
        + column.saturating_sub(1);
    IngestError::Json {
        line,
        column,
        offset: offset.min(text.len()),
        message: err.to_string(),
    }
}

/// Serializes a document; parsing the result yields a value-identical
/// document (floats are written in shortest round-trip form).
pub fn to_json_string(document: &OpenPoseDocument) -> String {
    serde_json::to_string(document).expect("documents always serialize")
}

/// Converts ordered documents into per-person frame sequences.
///
/// Person identity is positional: `people[i]` is person `i`. Frame indices
/// are document positions; a person absent from a document simply leaves a
/// gap in that person's sequence. Returned sequences are indexed by
/// person id.
pub fn load_sequence(
    documents: impl IntoIterator<Item = OpenPoseDocument>,
    fps: f64,
) -> Result<Vec<Vec<SkeletonFrame>>, IngestError> {
    if !(fps > 0.0) {
        return Err(IngestError::Config(format!(
            "fps must be positive, got {fps}"
        )));
    }
    let mut sequences: Vec<Vec<SkeletonFrame>> = Vec::new();
    for (frame_index, document) in documents.into_iter().enumerate() {
        for (person, record) in document.people.iter().enumerate() {
            if sequences.len() <= person {
                sequences.resize_with(person + 1, Vec::new);
            }
            let frame = SkeletonFrame::from_flat(
                &record.pose_keypoints_2d,
                frame_index as u64,
                fps,
                person as u32,
            )
            .map_err(|source| IngestError::BadKeypoint { person, source })?;
            sequences[person].push(frame);
        }
    }
    Ok(sequences)
}

/// Reads a directory of per-frame JSON files, sorted lexicographically by
/// file name. Only `*.json` entries are considered.
pub fn read_openpose_dir(dir: &Path) -> Result<Vec<OpenPoseDocument>, IngestError> {
    let mut paths: Vec<_> = fs::read_dir(dir)?
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .map(|entry| entry.path())
        .filter(|p| p.extension().is_some_and(|ext| ext == "json"))
        .collect();
    paths.sort();
    let mut documents = Vec::with_capacity(paths.len());
    for path in paths {
        documents.push(parse_openpose_json(&fs::read(&path)?)?);
    }
    Ok(documents)
}

/// Reads a JSON-lines stream: one document per LF-terminated line. Blank
/// lines are skipped.
pub fn read_jsonl(reader: impl BufRead) -> Result<Vec<OpenPoseDocument>, IngestError> {
    let mut documents = Vec::new();
    for line in reader.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        documents.push(parse_openpose_json(line.as_bytes())?);
    }
    Ok(documents)
}

/// Writes documents as JSON lines.
pub fn write_jsonl(
    mut writer: impl Write,
    documents: &[OpenPoseDocument],
) -> Result<(), IngestError> {
    for document in documents {
        writeln!(writer, "{}", to_json_string(document))?;
    }
    Ok(())
}

/// Writes documents as a directory of per-frame JSON files named
/// `NNNNNN_keypoints.json` so a lexicographic sort restores frame order.
pub fn write_openpose_dir(dir: &Path, documents: &[OpenPoseDocument]) -> Result<(), IngestError> {
    fs::create_dir_all(dir)?;
    for (i, document) in documents.iter().enumerate() {
        let path = dir.join(format!("{i:06}_keypoints.json"));
        fs::write(path, to_json_string(document))?;
    }
    Ok(())
}

/// Header of the CSV replay format.
pub fn csv_header() -> Vec<String> {
    let mut header = vec!["frame_index".to_string(), "person_id".to_string()];
    for i in 0..KEYPOINT_COUNT {
        for axis in ["x", "y", "c"] {
            header.push(format!("kp{i:02}_{axis}"));
        }
    }
    header
}

/// Writes per-person frame rows to the CSV replay format, one row per
/// (frame, person), ordered by frame index then person id.
pub fn write_csv(writer: impl Write, sequences: &[Vec<SkeletonFrame>]) -> Result<(), IngestError> {
    let mut rows: Vec<&SkeletonFrame> = sequences.iter().flatten().collect();
    rows.sort_by_key(|f| (f.frame_index, f.person_id));
    let mut out = csv::Writer::from_writer(writer);
    out.write_record(csv_header())
        .map_err(|e| IngestError::Csv(e.to_string()))?;
    for frame in rows {
        let mut record = vec![frame.frame_index.to_string(), frame.person_id.to_string()];
        for kp in &frame.keypoints {
            record.push(kp.x.to_string());
            record.push(kp.y.to_string());
            record.push(kp.confidence.to_string());
        }
        out.write_record(record)
            .map_err(|e| IngestError::Csv(e.to_string()))?;
    }
    out.flush()?;
    Ok(())
}

/// Reads the CSV replay format into per-person sequences indexed by
/// person id. Timestamps come from the recorded frame indices and `fps`.
pub fn read_csv(
    reader: impl std::io::Read,
    fps: f64,
) -> Result<Vec<Vec<SkeletonFrame>>, IngestError> {
    if !(fps > 0.0) {
        return Err(IngestError::Config(format!(
            "fps must be positive, got {fps}"
        )));
    }
    let mut csv_reader = csv::Reader::from_reader(reader);
    let expected = csv_header();
    let header = csv_reader
        .headers()
        .map_err(|e| IngestError::Csv(e.to_string()))?;
    if header.len() != expected.len() {
        return Err(IngestError::Csv(format!(
            "expected {} columns, got {}",
            expected.len(),
            header.len()
        )));
    }
    let mut sequences: Vec<Vec<SkeletonFrame>> = Vec::new();
    for (row, record) in csv_reader.records().enumerate() {
        let record = record.map_err(|e| IngestError::Csv(e.to_string()))?;
        let field = |i: usize| -> Result<f64, IngestError> {
            record
                .get(i)
                .ok_or_else(|| IngestError::Csv(format!("row {row}: missing column {i}")))?
                .trim()
                .parse::<f64>()
                .map_err(|e| IngestError::Csv(format!("row {row}, column {i}: {e}")))
        };
        let frame_index = field(0)? as u64;
        let person_id = field(1)? as u32;
        let mut flat = [0.0; FLAT_LEN];
        for (i, slot) in flat.iter_mut().enumerate() {
            *slot = field(2 + i)?;
        }
        let frame = SkeletonFrame::from_flat(&flat, frame_index, fps, person_id)
            .map_err(|source| IngestError::BadKeypoint {
                person: person_id as usize,
                source,
            })?;
        let person = person_id as usize;
        if sequences.len() <= person {
            sequences.resize_with(person + 1, Vec::new);
        }
        sequences[person].push(frame);
    }
    for seq in &mut sequences {
        seq.sort_by_key(|f| f.frame_index);
    }
    Ok(sequences)
}

/// Packs single-person frames back into one document per frame. Used by the
/// synthetic generator to exercise the real parsers.
pub fn documents_from_frames(frames: &[SkeletonFrame]) -> Vec<OpenPoseDocument> {
    frames
        .iter()
        .map(|frame| {
            let mut flat = Vec::with_capacity(FLAT_LEN);
            for kp in &frame.keypoints {
                flat.extend_from_slice(&[kp.x, kp.y, kp.confidence]);
            }
            OpenPoseDocument {
                version: Some(1.3),
                people: vec![PersonRecord {
                    pose_keypoints_2d: flat,
                }],
            }
        })
        .collect()
}

/// Smooths one keypoint of the frame at `center` against its neighborhood
/// `[center - radius, center + radius]` (clipped to the sequence bounds).
///
/// The smoothed position is the confidence-weighted moving average over the
/// frames where that keypoint is valid, computed as the current position
/// plus the weighted mean offset so that uniform translation commutes
/// bit-exactly. Confidences are never altered; invalid keypoints pass
/// through untouched.
fn smooth_at(frames: &[&SkeletonFrame], center: usize, radius: usize, epsilon: f64) -> SkeletonFrame {
    let mut out = frames[center].clone();
    if radius == 0 {
        return out;
    }
    let lo = center.saturating_sub(radius);
    let hi = (center + radius).min(frames.len() - 1);
    for index in KeypointIndex::ALL {
        let current = frames[center].kp(index);
        if !current.is_valid(epsilon) {
            continue;
        }
        let mut weight_sum = 0.0;
        let mut dx_sum = 0.0;
        let mut dy_sum = 0.0;
        for frame in &frames[lo..=hi] {
            let kp = frame.kp(index);
            if kp.is_valid(epsilon) {
                weight_sum += kp.confidence;
                dx_sum += kp.confidence * (kp.x - current.x);
                dy_sum += kp.confidence * (kp.y - current.y);
            }
        }
        debug_assert!(weight_sum > 0.0, "the center keypoint itself is valid");
        out.keypoints[index as usize] = Keypoint::new(
            current.x + dx_sum / weight_sum,
            current.y + dy_sum / weight_sum,
            current.confidence,
        );
    }
    out
}

/// De-noises a sequence by confidence-weighted moving average over
/// `[t - radius, t + radius]` positions. Radius 0 is the identity.
pub fn smooth(frames: &[SkeletonFrame], radius: usize, epsilon: f64) -> Vec<SkeletonFrame> {
    let refs: Vec<&SkeletonFrame> = frames.iter().collect();
    (0..refs.len())
        .map(|center| smooth_at(&refs, center, radius, epsilon))
        .collect()
}

/// Incremental counterpart of [`smooth`]: emits frames once `radius`
/// look-ahead frames have arrived, producing exactly the batch result.
#[derive(Debug)]
pub struct SmoothingBuffer {
    radius: usize,
    epsilon: f64,
    pending: std::collections::VecDeque<SkeletonFrame>,
    /// Stream position of `pending[0]`.
    base: usize,
    /// Total frames pushed so far.
    pushed: usize,
}

impl SmoothingBuffer {
    pub fn new(radius: usize, epsilon: f64) -> Self {
        Self {
            radius,
            epsilon,
            pending: std::collections::VecDeque::new(),
            base: 0,
            pushed: 0,
        }
    }

    /// Feeds one raw frame; returns the next smoothed frame once its
    /// look-ahead is complete. Frame `c` becomes computable when frame
    /// `c + radius` arrives.
    pub fn push(&mut self, frame: SkeletonFrame) -> Option<SkeletonFrame> {
        self.pending.push_back(frame);
        let position = self.pushed;
        self.pushed += 1;
        if position < self.radius {
            return None;
        }
        let center = position - self.radius;
        // Nothing before `center - radius` is needed anymore.
        let low = center.saturating_sub(self.radius);
        while self.base < low {
            self.pending.pop_front();
            self.base += 1;
        }
        let refs: Vec<&SkeletonFrame> = self.pending.iter().collect();
        Some(smooth_at(&refs, center - self.base, self.radius, self.epsilon))
    }

    /// Flushes the trailing frames whose look-ahead windows are clipped by
    /// the end of the stream.
    pub fn finish(&mut self) -> Vec<SkeletonFrame> {
        let refs: Vec<&SkeletonFrame> = self.pending.iter().collect();
        let out = (self.pushed.saturating_sub(self.radius)..self.pushed)
            .map(|center| smooth_at(&refs, center - self.base, self.radius, self.epsilon))
            .collect();
        self.pending.clear();
        self.base = 0;
        self.pushed = 0;
        out
    }
}

/// Spatial gating mode for [`RoiGate`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RoiMode {
    /// Admit a frame iff the neck keypoint is valid and inside the box.
    RequireNeckInside,
    /// Admit a frame iff every valid keypoint is inside the box.
    RequireAllValidInside,
}

/// Axis-aligned region of interest; frames outside it are not occupants of
/// the monitored zone.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoiGate {
    pub x_min: f64,
    pub y_min: f64,
    pub x_max: f64,
    pub y_max: f64,
    pub mode: RoiMode,
}

impl RoiGate {
    pub fn new(x_min: f64, y_min: f64, x_max: f64, y_max: f64, mode: RoiMode) -> Result<Self, IngestError> {
        if !(x_min < x_max && y_min < y_max) {
            return Err(IngestError::Config(format!(
                "degenerate ROI rectangle ({x_min},{y_min})-({x_max},{y_max})"
            )));
        }
        Ok(Self {
            x_min,
            y_min,
            x_max,
            y_max,
            mode,
        })
    }

    fn contains(&self, (x, y): (f64, f64)) -> bool {
        // Edges are inclusive.
        x >= self.x_min && x <= self.x_max && y >= self.y_min && y <= self.y_max
    }

    /// True iff the frame passes the gate under this mode.
    pub fn admits(&self, frame: &SkeletonFrame, epsilon: f64) -> bool {
        match self.mode {
            RoiMode::RequireNeckInside => {
                frame.valid(KeypointIndex::Neck, epsilon)
                    && self.contains(frame.pos(KeypointIndex::Neck))
            }
            RoiMode::RequireAllValidInside => KeypointIndex::ALL
                .iter()
                .filter(|&&i| frame.valid(i, epsilon))
                .all(|&i| self.contains(frame.pos(i))),
        }
    }
}

/// Convenience wrapper matching the gate operation's functional shape.
pub fn roi_filter(frame: &SkeletonFrame, gate: &RoiGate, epsilon: f64) -> bool {
    gate.admits(frame, epsilon)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_empty_people() {
        let doc = parse_openpose_json(br#"{"version":1.3,"people":[]}"#).unwrap();
        assert_eq!(doc.version, Some(1.3));
        assert!(doc.people.is_empty());
    }

    #[test]
    fn parse_one_person_of_zeros() {
        let zeros = vec!["0.0"; FLAT_LEN].join(",");
        let text = format!(r#"{{"version":1.3,"people":[{{"pose_keypoints_2d":[{zeros}]}}]}}"#);
        let doc = parse_openpose_json(text.as_bytes()).unwrap();
        assert_eq!(doc.people.len(), 1);
        assert!(doc.people[0].pose_keypoints_2d.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn parse_ignores_unknown_fields() {
        let doc = parse_openpose_json(
            br#"{"version":1.3,"people":[],"part_candidates":[{"0":[1,2,3]}]}"#,
        )
        .unwrap();
        assert!(doc.people.is_empty());
    }

    #[test]
    fn parse_rejects_wrong_triplet_count() {
        for len in [53usize, 55] {
            let values = vec!["1.0"; len].join(",");
            let text = format!(r#"{{"people":[{{"pose_keypoints_2d":[{values}]}}]}}"#);
            match parse_openpose_json(text.as_bytes()).unwrap_err() {
                IngestError::KeypointCount { person: 0, len: got } => assert_eq!(got, len),
                other => panic!("unexpected error: {other}"),
            }
        }
    }

    #[test]
    fn parse_reports_json_position() {
        let text = b"{\"version\":1.3,\n\"people\": oops}";
        match parse_openpose_json(text).unwrap_err() {
            IngestError::Json { line, offset, .. } => {
                assert_eq!(line, 2);
                assert!(offset > 16 && offset <= text.len(), "offset {offset}");
            }
            other => panic!("unexpected error: {other}"),
        }
    }

    #[test]
    fn round_trip_preserves_every_number() {
        let mut flat = vec![0.0; FLAT_LEN];
        flat[21] = 300.125;
        flat[22] = 380.0625;
        flat[23] = 0.9;
        flat[0] = 1.0 / 3.0;
        let doc = OpenPoseDocument {
            version: Some(1.3),
            people: vec![PersonRecord {
                pose_keypoints_2d: flat,
            }],
        };
        let text = to_json_string(&doc);
        let back = parse_openpose_json(text.as_bytes()).unwrap();
        assert_eq!(doc, back);
        let again = parse_openpose_json(to_json_string(&back).as_bytes()).unwrap();
        assert_eq!(back, again);
    }

    fn doc_with_people(n: usize) -> OpenPoseDocument {
        OpenPoseDocument {
            version: None,
            people: (0..n)
                .map(|p| {
                    let mut flat = vec![0.0; FLAT_LEN];
                    flat[0] = p as f64; // distinguishable but valid
                    PersonRecord {
                        pose_keypoints_2d: flat,
                    }
                })
                .collect(),
        }
    }

    #[test]
    fn load_sequence_assigns_positional_indices() {
        let sequences =
            load_sequence([doc_with_people(1), doc_with_people(1), doc_with_people(1)], 30.0)
                .unwrap();
        assert_eq!(sequences.len(), 1);
        let indices: Vec<u64> = sequences[0].iter().map(|f| f.frame_index).collect();
        assert_eq!(indices, vec![0, 1, 2]);
    }

    #[test]
    fn load_sequence_tracks_people_positionally() {
        let sequences = load_sequence([doc_with_people(2), doc_with_people(1)], 30.0).unwrap();
        assert_eq!(sequences.len(), 2);
        assert_eq!(sequences[0].len(), 2);
        assert_eq!(sequences[1].len(), 1);
        assert_eq!(sequences[1][0].person_id, 1);
    }

    #[test]
    fn load_sequence_preserves_total_frame_count() {
        let docs = [doc_with_people(3), doc_with_people(0), doc_with_people(2)];
        let expected: usize = docs.iter().map(|d| d.people.len()).sum();
        let sequences = load_sequence(docs, 30.0).unwrap();
        let total: usize = sequences.iter().map(|s| s.len()).sum();
        assert_eq!(total, expected);
    }

    #[test]
    fn load_sequence_rejects_bad_fps() {
        assert!(matches!(
            load_sequence([doc_with_people(1)], 0.0).unwrap_err(),
            IngestError::Config(_)
        ));
    }

    fn wobble_frames() -> Vec<SkeletonFrame> {
        (0..12)
            .map(|i| {
                let mut rows = [[0.0; 3]; KEYPOINT_COUNT];
                rows[0] = [100.0 + (i % 3) as f64, 50.0, 0.8];
                rows[4] = [7.0, 7.0, 0.2]; // invalid, must pass through
                SkeletonFrame::from_matrix(&rows, i as u64, 30.0, 0).unwrap()
            })
            .collect()
    }

    #[test]
    fn smooth_radius_zero_is_identity() {
        let frames = wobble_frames();
        assert_eq!(smooth(&frames, 0, 0.5), frames);
    }

    #[test]
    fn smooth_constant_sequence_is_unchanged() {
        let frames: Vec<SkeletonFrame> = (0..10)
            .map(|i| {
                let mut rows = [[62.5, -17.25, 0.7]; KEYPOINT_COUNT];
                rows[3] = [9.0, 9.0, 0.1];
                SkeletonFrame::from_matrix(&rows, i as u64, 30.0, 0).unwrap()
            })
            .collect();
        let smoothed = smooth(&frames, 3, 0.5);
        for (a, b) in frames.iter().zip(&smoothed) {
            assert_eq!(a.keypoints, b.keypoints);
        }
    }

    #[test]
    fn smooth_leaves_confidence_and_invalid_points_alone() {
        let frames = wobble_frames();
        let smoothed = smooth(&frames, 2, 0.5);
        for (raw, out) in frames.iter().zip(&smoothed) {
            assert_eq!(out.keypoints[4], raw.keypoints[4]);
            assert_eq!(out.keypoints[0].confidence, raw.keypoints[0].confidence);
        }
    }

    #[test]
    fn smooth_commutes_with_translation_exactly() {
        let frames = wobble_frames();
        let translate = |frames: &[SkeletonFrame], tx: f64, ty: f64| -> Vec<SkeletonFrame> {
            frames
                .iter()
                .map(|f| {
                    let mut f = f.clone();
                    for kp in &mut f.keypoints {
                        kp.x += tx;
                        kp.y += ty;
                    }
                    f
                })
                .collect()
        };
        let (tx, ty) = (137.62, -41.875);
        let a = smooth(&translate(&frames, tx, ty), 2, 0.5);
        let b = translate(&smooth(&frames, 2, 0.5), tx, ty);
        for (fa, fb) in a.iter().zip(&b) {
            for (ka, kb) in fa.keypoints.iter().zip(&fb.keypoints) {
                assert_eq!(ka.x, kb.x);
                assert_eq!(ka.y, kb.y);
            }
        }
    }

    #[test]
    fn smoothing_buffer_matches_batch() {
        let frames = wobble_frames();
        for radius in [0usize, 1, 2, 4] {
            let batch = smooth(&frames, radius, 0.5);
            let mut buffer = SmoothingBuffer::new(radius, 0.5);
            let mut streamed = Vec::new();
            for frame in frames.clone() {
                streamed.extend(buffer.push(frame));
            }
            streamed.extend(buffer.finish());
            assert_eq!(batch, streamed, "radius {radius}");
        }
    }

    #[test]
    fn roi_neck_mode() {
        let gate = RoiGate::new(0.0, 0.0, 1920.0, 1080.0, RoiMode::RequireNeckInside).unwrap();
        let mut rows = [[0.0; 3]; KEYPOINT_COUNT];
        rows[1] = [500.0, 400.0, 0.9];
        let frame = SkeletonFrame::from_matrix(&rows, 0, 30.0, 0).unwrap();
        assert!(roi_filter(&frame, &gate, 0.5));

        rows[1][2] = 0.1; // an invalid neck cannot certify presence
        let frame = SkeletonFrame::from_matrix(&rows, 0, 30.0, 0).unwrap();
        assert!(!roi_filter(&frame, &gate, 0.5));
    }

    #[test]
    fn roi_all_valid_mode() {
        let gate = RoiGate::new(0.0, 0.0, 100.0, 100.0, RoiMode::RequireAllValidInside).unwrap();
        let mut rows = [[50.0, 50.0, 0.9]; KEYPOINT_COUNT];
        rows[7] = [150.0, 50.0, 0.9];
        let frame = SkeletonFrame::from_matrix(&rows, 0, 30.0, 0).unwrap();
        assert!(!gate.admits(&frame, 0.5));
        rows[7][2] = 0.0; // once invalid, the stray wrist no longer counts
        let frame = SkeletonFrame::from_matrix(&rows, 0, 30.0, 0).unwrap();
        assert!(gate.admits(&frame, 0.5));
    }

    #[test]
    fn roi_rejects_degenerate_rectangles() {
        assert!(RoiGate::new(10.0, 0.0, 10.0, 5.0, RoiMode::RequireNeckInside).is_err());
    }

    #[test]
    fn csv_round_trip() {
        let frames: Vec<SkeletonFrame> = (0..5)
            .map(|i| {
                let mut rows = [[0.0; 3]; KEYPOINT_COUNT];
                rows[6] = [10.0 + i as f64 / 3.0, 20.0, 0.9];
                rows[7] = [10.0, 100.0, 0.825];
                SkeletonFrame::from_matrix(&rows, i as u64, 30.0, 0).unwrap()
            })
            .collect();
        let mut bytes = Vec::new();
        write_csv(&mut bytes, std::slice::from_ref(&frames)).unwrap();
        let back = read_csv(bytes.as_slice(), 30.0).unwrap();
        assert_eq!(back.len(), 1);
        assert_eq!(back[0], frames);
    }
}
