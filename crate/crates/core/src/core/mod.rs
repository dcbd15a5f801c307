//! Domain types shared by every pipeline stage.

pub(crate) mod files;
mod mot;
pub(crate) mod prob;

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub use files::{load_rosters, load_vocabulary, save_rosters, save_vocabulary, Rosters};
pub use mot::{
    format_detection_rows, group_by_frame, parse_detection_file, parse_detection_str,
    tracks_from_rows, tracks_to_rows, write_detection_file, DetectionRow,
};
pub use prob::{ProbVector, SUM_TOLERANCE};

pub type Frame = u32;
pub type TrackId = i64;

/// Axis-aligned box in image pixels, `(x, y)` is the top-left corner.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundingBox {
    pub x: f64,
    pub y: f64,
    pub w: f64,
    pub h: f64,
}

impl BoundingBox {
    pub fn new(x: f64, y: f64, w: f64, h: f64) -> Result<Self> {
        if !(x.is_finite() && y.is_finite() && w.is_finite() && h.is_finite()) {
            return Err(Error::Validation(format!(
                "box coordinates must be finite: ({x}, {y}, {w}, {h})"
            )));
        }
        if w <= 0.0 || h <= 0.0 {
            return Err(Error::Validation(format!(
                "box width and height must be positive: w={w}, h={h}"
            )));
        }
        Ok(Self { x, y, w, h })
    }

    pub fn area(&self) -> f64 {
        self.w * self.h
    }

    pub fn center(&self) -> (f64, f64) {
        (self.x + self.w / 2.0, self.y + self.h / 2.0)
    }

    pub fn right(&self) -> f64 {
        self.x + self.w
    }

    pub fn bottom(&self) -> f64 {
        self.y + self.h
    }

    /// Intersection over union, in `[0, 1]`.
    pub fn iou(&self, other: &BoundingBox) -> f64 {
        let iw = (self.right().min(other.right()) - self.x.max(other.x)).max(0.0);
        let ih = (self.bottom().min(other.bottom()) - self.y.max(other.y)).max(0.0);
        let inter = iw * ih;
        if inter <= 0.0 {
            return 0.0;
        }
        let union = self.area() + other.area() - inter;
        (inter / union).clamp(0.0, 1.0)
    }
}

/// One observed box at a frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Detection {
    pub frame: Frame,
    pub bbox: BoundingBox,
    pub confidence: f64,
}

impl Detection {
    pub fn new(frame: Frame, bbox: BoundingBox, confidence: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&confidence) {
            return Err(Error::Validation(format!(
                "confidence must be in [0, 1], got {confidence}"
            )));
        }
        Ok(Self {
            frame,
            bbox,
            confidence,
        })
    }
}

/// Time-ordered detections sharing one tracker identity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Track {
    track_id: TrackId,
    detections: Vec<Detection>,
}

impl Track {
    pub fn new(track_id: TrackId, detections: Vec<Detection>) -> Result<Self> {
        if detections.is_empty() {
            return Err(Error::Validation(format!("track {track_id} has no detections")));
        }
        if let Some(w) = detections.windows(2).find(|w| w[1].frame <= w[0].frame) {
            return Err(Error::Validation(format!(
                "track {track_id}: frames not strictly increasing ({} then {})",
                w[0].frame, w[1].frame
            )));
        }
        Ok(Self {
            track_id,
            detections,
        })
    }

    pub fn track_id(&self) -> TrackId {
        self.track_id
    }

    pub fn detections(&self) -> &[Detection] {
        &self.detections
    }

    pub fn len(&self) -> usize {
        self.detections.len()
    }

    pub fn is_empty(&self) -> bool {
        self.detections.is_empty()
    }

    pub fn first_frame(&self) -> Frame {
        self.detections[0].frame
    }

    pub fn last_frame(&self) -> Frame {
        self.detections[self.detections.len() - 1].frame
    }
}

/// Ordered jersey-number labels plus a reserved null class at the last index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassVocabulary {
    labels: Vec<u8>,
    index: HashMap<u8, usize>,
}

impl ClassVocabulary {
    pub const MAX_JERSEY: u8 = 99;

    pub fn new(labels: Vec<u8>) -> Result<Self> {
        let mut index = HashMap::with_capacity(labels.len());
        for (i, &label) in labels.iter().enumerate() {
            if label > Self::MAX_JERSEY {
                return Err(Error::Validation(format!(
                    "jersey label {label} outside 0..=99"
                )));
            }
            if index.insert(label, i).is_some() {
                return Err(Error::Validation(format!("duplicate jersey label {label}")));
            }
        }
        Ok(Self { labels, index })
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn null_index(&self) -> usize {
        self.labels.len()
    }

    /// Number of classes including null.
    pub fn class_count(&self) -> usize {
        self.labels.len() + 1
    }

    pub fn index_of(&self, label: u8) -> Option<usize> {
        self.index.get(&label).copied()
    }

    /// Jersey label for a class index, `None` for the null class.
    pub fn label_of(&self, class: usize) -> Option<u8> {
        self.labels.get(class).copied()
    }

    /// Converts a class index into an [`Identity`].
    pub fn identity_of(&self, class: usize) -> Identity {
        match self.label_of(class) {
            Some(n) => Identity::Jersey(n),
            None => Identity::Null,
        }
    }
}

impl Default for ClassVocabulary {
    /// Jersey numbers 1 through 85, giving 86 classes with null.
    fn default() -> Self {
        Self::new((1..=85).collect()).expect("default vocabulary is valid")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TeamLabel {
    Home,
    Away,
    Referee,
}

impl TeamLabel {
    pub const ALL: [TeamLabel; 3] = [TeamLabel::Home, TeamLabel::Away, TeamLabel::Referee];

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for TeamLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TeamLabel::Home => "home",
            TeamLabel::Away => "away",
            TeamLabel::Referee => "referee",
        })
    }
}

/// Binary mask over the class vocabulary; the null class is always admitted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RosterVector {
    mask: Vec<bool>,
}

impl RosterVector {
    /// Mask admitting exactly the roster numbers and null.
    pub fn build(roster: &BTreeSet<u8>, vocab: &ClassVocabulary) -> Result<Self> {
        let missing: Vec<u8> = roster
            .iter()
            .copied()
            .filter(|n| vocab.index_of(*n).is_none())
            .collect();
        if !missing.is_empty() {
            return Err(Error::OutOfVocabulary(missing));
        }
        let mut mask: Vec<bool> = vocab.labels().iter().map(|n| roster.contains(n)).collect();
        mask.push(true);
        Ok(Self { mask })
    }

    /// Mask admitting every class; equivalent to running without a roster.
    pub fn admit_all(vocab: &ClassVocabulary) -> Self {
        Self {
            mask: vec![true; vocab.class_count()],
        }
    }

    pub fn len(&self) -> usize {
        self.mask.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mask.is_empty()
    }

    pub fn admits(&self, class: usize) -> bool {
        self.mask.get(class).copied().unwrap_or(false)
    }

    pub fn as_bits(&self) -> Vec<u8> {
        self.mask.iter().map(|&b| u8::from(b)).collect()
    }
}

/// Final identity assigned to a tracklet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Identity {
    Jersey(u8),
    /// No jersey number could be read.
    Null,
    /// Referee sentinel, outside the jersey vocabulary.
    Referee,
}

impl fmt::Display for Identity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Identity::Jersey(n) => write!(f, "{n}"),
            Identity::Null => f.write_str("null"),
            Identity::Referee => f.write_str("ref"),
        }
    }
}

// JSON: a jersey number, `null`, or the string "ref".
impl Serialize for Identity {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Identity::Jersey(n) => s.serialize_u8(*n),
            Identity::Null => s.serialize_none(),
            Identity::Referee => s.serialize_str("ref"),
        }
    }
}

impl<'de> Deserialize<'de> for Identity {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Number(u8),
            Tag(String),
        }
        match Option::<Repr>::deserialize(d)? {
            None => Ok(Identity::Null),
            Some(Repr::Number(n)) => Ok(Identity::Jersey(n)),
            Some(Repr::Tag(t)) if t == "ref" => Ok(Identity::Referee),
            Some(Repr::Tag(t)) if t == "null" => Ok(Identity::Null),
            Some(Repr::Tag(t)) => Err(serde::de::Error::custom(format!("unknown identity {t:?}"))),
        }
    }
}
