//! Manual annotations: grasper jaw ends per frame and static tissue points.

use std::collections::BTreeMap;
use std::path::Path;

use crate::error::{Error, Result};
use crate::geometry::Point;

/// Jaw-end pixel coordinates of both graspers in one frame.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JawEnds {
    pub left: [Point; 2],
    pub right: [Point; 2],
}

/// Sparse per-frame jaw-end annotations.
///
/// Frames without a row inherit the most recent earlier row. Frames before
/// the first row use the first row.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct JawEndSeries {
    rows: BTreeMap<usize, JawEnds>,
}

impl JawEndSeries {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, frame: usize, ends: JawEnds) {
        self.rows.insert(frame, ends);
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn at(&self, frame: usize) -> Option<JawEnds> {
        self.rows
            .range(..=frame)
            .next_back()
            .or_else(|| self.rows.iter().next())
            .map(|(_, e)| *e)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &JawEnds)> {
        self.rows.iter().map(|(f, e)| (*f, e))
    }
}

const JAW_HEADER: [&str; 9] = ["frame", "lx1", "ly1", "lx2", "ly2", "rx1", "ry1", "rx2", "ry2"];

pub fn read_jaw_ends(path: impl AsRef<Path>) -> Result<JawEndSeries> {
    let path = path.as_ref();
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| csv_error(path, e))?;
    let headers = rdr.headers().map_err(|e| csv_error(path, e))?.clone();
    if headers.iter().collect::<Vec<_>>() != JAW_HEADER {
        return Err(Error::parse(path, 1, format!("expected header {}", JAW_HEADER.join(","))));
    }
    let mut series = JawEndSeries::new();
    for (i, rec) in rdr.records().enumerate() {
        let line = i + 2;
        let rec = rec.map_err(|e| csv_error(path, e))?;
        if rec.len() != 9 {
            return Err(Error::parse(path, line, "expected 9 columns"));
        }
        let frame: usize = rec[0]
            .parse()
            .map_err(|_| Error::parse(path, line, format!("bad frame index {:?}", &rec[0])))?;
        let mut v = [0f64; 8];
        for (k, slot) in v.iter_mut().enumerate() {
            *slot = rec[k + 1]
                .parse()
                .map_err(|_| Error::parse(path, line, format!("bad coordinate {:?}", &rec[k + 1])))?;
        }
        series.insert(
            frame,
            JawEnds {
                left: [Point::new(v[0], v[1]), Point::new(v[2], v[3])],
                right: [Point::new(v[4], v[5]), Point::new(v[6], v[7])],
            },
        );
    }
    Ok(series)
}

pub fn write_jaw_ends(series: &JawEndSeries, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_error(path, e))?;
    w.write_record(JAW_HEADER).map_err(|e| csv_error(path, e))?;
    for (frame, e) in series.iter() {
        let p = [e.left[0], e.left[1], e.right[0], e.right[1]];
        let mut row = vec![frame.to_string()];
        for q in p {
            row.push(q.x.to_string());
            row.push(q.y.to_string());
        }
        w.write_record(&row).map_err(|e| csv_error(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Reads an `x,y` point list.
pub fn read_points(path: impl AsRef<Path>) -> Result<Vec<Point>> {
    let path = path.as_ref();
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| csv_error(path, e))?;
    let headers = rdr.headers().map_err(|e| csv_error(path, e))?.clone();
    if headers.iter().collect::<Vec<_>>() != ["x", "y"] {
        return Err(Error::parse(path, 1, "expected header x,y"));
    }
    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| csv_error(path, e))?;
        let parse = |s: &str| {
            s.parse::<f64>()
                .map_err(|_| Error::parse(path, i + 2, format!("bad coordinate {s:?}")))
        };
        if rec.len() != 2 {
            return Err(Error::parse(path, i + 2, "expected 2 columns"));
        }
        out.push(Point::new(parse(&rec[0])?, parse(&rec[1])?));
    }
    Ok(out)
}

pub fn write_points(points: &[Point], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_error(path, e))?;
    w.write_record(["x", "y"]).map_err(|e| csv_error(path, e))?;
    for p in points {
        w.write_record([p.x.to_string(), p.y.to_string()])
            .map_err(|e| csv_error(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub(crate) fn csv_error(path: &Path, e: csv::Error) -> Error {
    let line = e.position().map(|p| p.line() as usize).unwrap_or(0);
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::parse(path, line, format!("{other:?}")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ends(d: f64) -> JawEnds {
        JawEnds {
            left: [Point::new(0.0, 0.0), Point::new(d, 0.0)],
            right: [Point::new(5.0, 5.0), Point::new(5.0, 5.0 + d)],
        }
    }

    #[test]
    fn missing_frames_inherit_previous() {
        let mut s = JawEndSeries::new();
        s.insert(5, ends(10.0));
        s.insert(9, ends(30.0));
        assert_eq!(s.at(0), Some(ends(10.0)));
        assert_eq!(s.at(7), Some(ends(10.0)));
        assert_eq!(s.at(9), Some(ends(30.0)));
        assert_eq!(s.at(1000), Some(ends(30.0)));
        assert_eq!(JawEndSeries::new().at(3), None);
    }

    #[test]
    fn jaw_csv_round_trip() {
        let mut s = JawEndSeries::new();
        s.insert(0, ends(10.5));
        s.insert(12, ends(25.0));
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("jaw.csv");
        write_jaw_ends(&s, &p).unwrap();
        assert_eq!(read_jaw_ends(&p).unwrap(), s);
    }

    #[test]
    fn bad_header_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("jaw.csv");
        std::fs::write(&p, "frame,a,b\n1,2,3\n").unwrap();
        assert!(read_jaw_ends(&p).is_err());
    }

    #[test]
    fn points_round_trip() {
        let pts = vec![Point::new(1.0, 2.0), Point::new(3.5, 4.25)];
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("pts.csv");
        write_points(&pts, &p).unwrap();
        assert_eq!(read_points(&p).unwrap(), pts);
    }
}
