//! MOTChallenge-style CSV: `frame,id,x,y,w,h,conf`, one row per box.
//!
//! Raw detections carry `id = -1`. Ten-column MOTChallenge rows (with the
//! trailing world coordinates) are accepted and the extra columns dropped.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::core::{BoundingBox, Detection, Frame, Track, TrackId};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectionRow {
    pub track_id: TrackId,
    pub detection: Detection,
}

pub fn parse_detection_file(path: impl AsRef<Path>) -> Result<Vec<DetectionRow>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_detection_str(&text, &path.display().to_string())
}

/// Parses CSV text; `source` names the input in error messages.
pub fn parse_detection_str(text: &str, source: &str) -> Result<Vec<DetectionRow>> {
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        rows.push(parse_line(line).map_err(|message| Error::Parse {
            path: source.to_string(),
            line: i + 1,
            message,
        })?);
    }
    Ok(rows)
}

fn parse_line(line: &str) -> std::result::Result<DetectionRow, String> {
    let fields: Vec<&str> = line.split(',').map(str::trim).collect();
    if fields.len() != 7 && fields.len() != 10 {
        return Err(format!("expected 7 fields, found {}", fields.len()));
    }
    let frame: i64 = fields[0]
        .parse()
        .map_err(|_| format!("bad frame {:?}", fields[0]))?;
    let frame = Frame::try_from(frame).map_err(|_| format!("frame {frame} out of range"))?;
    let track_id: TrackId = fields[1]
        .parse()
        .map_err(|_| format!("bad id {:?}", fields[1]))?;
    let mut nums = [0.0f64; 5];
    for (slot, name, raw) in nums
        .iter_mut()
        .zip(["x", "y", "w", "h", "conf"])
        .zip(&fields[2..7])
        .map(|((s, n), r)| (s, n, r))
    {
        *slot = raw.parse().map_err(|_| format!("bad {name} {raw:?}"))?;
    }
    let [x, y, w, h, conf] = nums;
    let bbox = BoundingBox::new(x, y, w, h).map_err(|e| e.to_string())?;
    let detection = Detection::new(frame, bbox, conf).map_err(|e| e.to_string())?;
    Ok(DetectionRow {
        track_id,
        detection,
    })
}

/// Canonical CSV text for rows, in the order given.
pub fn format_detection_rows(rows: &[DetectionRow]) -> String {
    let mut out = String::with_capacity(rows.len() * 32);
    for r in rows {
        let d = &r.detection;
        let b = &d.bbox;
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            d.frame, r.track_id, b.x, b.y, b.w, b.h, d.confidence
        );
    }
    out
}

pub fn write_detection_file(path: impl AsRef<Path>, rows: &[DetectionRow]) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, format_detection_rows(rows)).map_err(|e| Error::io(path, e))
}

/// Groups rows by frame, keeping file order within a frame.
pub fn group_by_frame(rows: &[DetectionRow]) -> BTreeMap<Frame, Vec<DetectionRow>> {
    let mut frames: BTreeMap<Frame, Vec<DetectionRow>> = BTreeMap::new();
    for r in rows {
        frames.entry(r.detection.frame).or_default().push(*r);
    }
    frames
}

/// Builds one track per id, sorted by id. Rows with `id < 0` are rejected.
pub fn tracks_from_rows(rows: &[DetectionRow]) -> Result<Vec<Track>> {
    let mut by_id: BTreeMap<TrackId, Vec<Detection>> = BTreeMap::new();
    for r in rows {
        if r.track_id < 0 {
            return Err(Error::Validation(format!(
                "row at frame {} has no track id",
                r.detection.frame
            )));
        }
        by_id.entry(r.track_id).or_default().push(r.detection);
    }
    by_id
        .into_iter()
        .map(|(id, mut dets)| {
            dets.sort_by_key(|d| d.frame);
            Track::new(id, dets)
        })
        .collect()
}

/// Flattens tracks into rows ordered by frame, then track id.
pub fn tracks_to_rows(tracks: &[Track]) -> Vec<DetectionRow> {
    let mut rows: Vec<DetectionRow> = tracks
        .iter()
        .flat_map(|t| {
            t.detections().iter().map(move |d| DetectionRow {
                track_id: t.track_id(),
                detection: *d,
            })
        })
        .collect();
    rows.sort_by_key(|r| (r.detection.frame, r.track_id));
    rows
}
