//! Context (CSV) and gesture (JIGSAWS-style line) transcripts.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::trial_io::annotations::csv_error;
use crate::trial_io::{ContextFrame, ContextSchema, Gesture, StateVariable};

/// Context samples at a fixed rate.
#[derive(Clone, Debug, PartialEq)]
pub struct ContextTranscript {
    pub rate_hz: f64,
    pub frames: Vec<ContextFrame>,
}

impl ContextTranscript {
    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }
}

const CONTEXT_HEADER: [&str; 6] = ["sample_index", "LH", "LC", "RH", "RC", "S5"];

/// Reads a context CSV and checks every value against `schema`.
pub fn read_context_transcript(path: impl AsRef<Path>, schema: &ContextSchema) -> Result<Vec<ContextFrame>> {
    let path = path.as_ref();
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| csv_error(path, e))?;
    let headers = rdr.headers().map_err(|e| csv_error(path, e))?.clone();
    if headers.iter().collect::<Vec<_>>() != CONTEXT_HEADER {
        return Err(Error::parse(path, 1, format!("expected header {}", CONTEXT_HEADER.join(","))));
    }
    let mut frames: Vec<ContextFrame> = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let line = i + 2;
        let rec = rec.map_err(|e| csv_error(path, e))?;
        if rec.len() != 6 {
            return Err(Error::parse(path, line, "expected 6 columns"));
        }
        let sample_index: usize = rec[0]
            .parse()
            .map_err(|_| Error::parse(path, line, format!("non-integer sample index {:?}", &rec[0])))?;
        let mut values = [0u8; 5];
        for (k, v) in values.iter_mut().enumerate() {
            *v = rec[k + 1].parse().map_err(|_| {
                Error::parse(
                    path,
                    line,
                    format!("non-integer {} value {:?}", CONTEXT_HEADER[k + 1], &rec[k + 1]),
                )
            })?;
        }
        if frames.last().is_some_and(|f| f.sample_index >= sample_index) {
            return Err(Error::parse(path, line, "sample indices must be strictly increasing"));
        }
        let frame = ContextFrame::new(sample_index, values);
        schema
            .check(&frame)
            .map_err(|e| Error::parse(path, line, e.to_string()))?;
        frames.push(frame);
    }
    Ok(frames)
}

pub fn format_context_transcript(frames: &[ContextFrame]) -> String {
    let mut s = CONTEXT_HEADER.join(",");
    s.push('\n');
    for f in frames {
        let _ = write!(s, "{}", f.sample_index);
        for var in StateVariable::ALL {
            let _ = write!(s, ",{}", f.get(var));
        }
        s.push('\n');
    }
    s
}

pub fn write_context_transcript(frames: &[ContextFrame], path: impl AsRef<Path>) -> Result<()> {
    write_atomic(path.as_ref(), format_context_transcript(frames).as_bytes())
}

/// Whether frame numbers refer to native video frames or output-rate samples.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum FrameBasis {
    #[default]
    Native,
    Output,
}

/// Inclusive frame range carrying one gesture label.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GestureSegment {
    pub start: usize,
    pub end: usize,
    pub gesture: Gesture,
}

impl GestureSegment {
    pub fn len(&self) -> usize {
        self.end - self.start + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct GestureTranscript {
    pub basis: FrameBasis,
    pub segments: Vec<GestureSegment>,
}

impl GestureTranscript {
    /// Run-length encodes per-sample labels into an output-basis transcript.
    pub fn from_samples(labels: &[Gesture]) -> Self {
        let mut segments: Vec<GestureSegment> = Vec::new();
        for (i, &g) in labels.iter().enumerate() {
            match segments.last_mut() {
                Some(s) if s.gesture == g && s.end + 1 == i => s.end = i,
                _ => segments.push(GestureSegment {
                    start: i,
                    end: i,
                    gesture: g,
                }),
            }
        }
        GestureTranscript {
            basis: FrameBasis::Output,
            segments,
        }
    }

    /// Converts output-rate sample indices to native frame indices.
    pub fn to_native(&self, stride: usize) -> Self {
        match self.basis {
            FrameBasis::Native => self.clone(),
            FrameBasis::Output => GestureTranscript {
                basis: FrameBasis::Native,
                segments: self
                    .segments
                    .iter()
                    .map(|s| GestureSegment {
                        start: s.start * stride,
                        end: (s.end + 1) * stride - 1,
                        gesture: s.gesture,
                    })
                    .collect(),
            },
        }
    }

    pub fn labels(&self) -> Vec<Gesture> {
        self.segments.iter().map(|s| s.gesture).collect()
    }

    pub fn first_frame(&self) -> Option<usize> {
        self.segments.first().map(|s| s.start)
    }

    pub fn last_frame(&self) -> Option<usize> {
        self.segments.last().map(|s| s.end)
    }

    /// Label at every frame in `[from, to]`; `None` inside gaps.
    pub fn per_frame(&self, from: usize, to: usize) -> Vec<Option<Gesture>> {
        let mut out = vec![None; to + 1 - from];
        for s in &self.segments {
            let lo = s.start.max(from);
            let hi = s.end.min(to);
            if lo <= hi {
                out[lo - from..=hi - from].fill(Some(s.gesture));
            }
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        for (i, s) in self.segments.iter().enumerate() {
            if s.start > s.end {
                return Err(Error::Validation(format!(
                    "segment {}: start {} after end {}",
                    i + 1,
                    s.start,
                    s.end
                )));
            }
            if i > 0 && self.segments[i - 1].end >= s.start {
                return Err(Error::Validation(format!(
                    "segment {} ({}-{}) overlaps the previous segment ending at {}",
                    i + 1,
                    s.start,
                    s.end,
                    self.segments[i - 1].end
                )));
            }
        }
        Ok(())
    }
}

pub fn parse_gesture_transcript(text: &str, origin: &Path) -> Result<GestureTranscript> {
    let mut t = GestureTranscript::default();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            if let Some(basis) = comment.trim().strip_prefix("basis:") {
                t.basis = match basis.trim() {
                    "native" => FrameBasis::Native,
                    "output" => FrameBasis::Output,
                    other => return Err(Error::parse(origin, i + 1, format!("unknown basis {other:?}"))),
                };
            }
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(Error::parse(origin, i + 1, "expected `start_frame end_frame G<k>`"));
        }
        let num = |s: &str| {
            s.parse::<usize>()
                .map_err(|_| Error::parse(origin, i + 1, format!("bad frame number {s:?}")))
        };
        let seg = GestureSegment {
            start: num(fields[0])?,
            end: num(fields[1])?,
            gesture: fields[2]
                .parse()
                .map_err(|e: Error| Error::parse(origin, i + 1, e.to_string()))?,
        };
        t.segments.push(seg);
        let probe = GestureTranscript {
            basis: t.basis,
            segments: t.segments[t.segments.len().saturating_sub(2)..].to_vec(),
        };
        probe
            .validate()
            .map_err(|e| Error::parse(origin, i + 1, e.to_string()))?;
    }
    Ok(t)
}

pub fn read_gesture_transcript(path: impl AsRef<Path>) -> Result<GestureTranscript> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_gesture_transcript(&text, path)
}

pub fn format_gesture_transcript(t: &GestureTranscript) -> String {
    let mut s = String::new();
    let basis = match t.basis {
        FrameBasis::Native => "native",
        FrameBasis::Output => "output",
    };
    let _ = writeln!(s, "# basis: {basis}");
    for seg in &t.segments {
        let _ = writeln!(s, "{} {} {}", seg.start, seg.end, seg.gesture);
    }
    s
}

pub fn write_gesture_transcript(t: &GestureTranscript, path: impl AsRef<Path>) -> Result<()> {
    t.validate()?;
    write_atomic(path.as_ref(), format_gesture_transcript(t).as_bytes())
}

/// Writes through a temporary sibling and renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let file_name = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| "out".into());
    let tmp = path.with_file_name(format!(".{file_name}.tmp"));
    fs::write(&tmp, bytes).map_err(|e| Error::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}
