//! Scanline rasterisation of polygon sets onto the pixel grid.
//!
//! A pixel counts as covered when its centre lies inside the even-odd
//! interior of any component. Polygons traced along pixel edges therefore
//! rasterise back to exactly their source pixels.

use crate::geometry::{ObjectPolygons, Polygon};

type Span = (f64, f64);

/// Interior spans of one polygon along the horizontal line `y`.
fn polygon_spans(poly: &Polygon, y: f64, out: &mut Vec<Span>) {
    let mut xs: Vec<f64> = Vec::new();
    for (a, b) in poly.edges() {
        if (a.y <= y) != (b.y <= y) {
            xs.push(a.x + (y - a.y) * (b.x - a.x) / (b.y - a.y));
        }
    }
    xs.sort_by(|a, b| a.total_cmp(b));
    out.extend(xs.chunks_exact(2).map(|c| (c[0], c[1])));
}

/// Sorted, disjoint union of spans of every component along `y`.
fn union_spans(components: &[Polygon], y: f64) -> Vec<Span> {
    let mut spans = Vec::new();
    for c in components {
        polygon_spans(c, y, &mut spans);
    }
    spans.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut merged: Vec<Span> = Vec::with_capacity(spans.len());
    for s in spans {
        match merged.last_mut() {
            Some(last) if s.0 <= last.1 => last.1 = last.1.max(s.1),
            _ => merged.push(s),
        }
    }
    merged
}

fn intersect_spans(a: &[Span], b: &[Span]) -> Vec<Span> {
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::new();
    while i < a.len() && j < b.len() {
        let lo = a[i].0.max(b[j].0);
        let hi = a[i].1.min(b[j].1);
        if lo < hi {
            out.push((lo, hi));
        }
        if a[i].1 < b[j].1 {
            i += 1;
        } else {
            j += 1;
        }
    }
    out
}

/// Pixel centres `px + 0.5` inside `[lo, hi)`.
fn count_centres(lo: f64, hi: f64) -> usize {
    let first = (lo - 0.5).ceil();
    let end = (hi - 0.5).ceil();
    (end - first).max(0.0) as usize
}

fn y_range(components: &[Polygon]) -> Option<(f64, f64)> {
    components
        .iter()
        .map(Polygon::bounds)
        .map(|b| (b.1, b.3))
        .reduce(|a, b| (a.0.min(b.0), a.1.max(b.1)))
}

/// Number of pixels covered by the union of `components`.
pub fn rasterized_area(components: &[Polygon]) -> f64 {
    let Some((y0, y1)) = y_range(components) else {
        return 0.0;
    };
    let mut count = 0;
    for py in (y0.floor() as i64)..(y1.ceil() as i64) {
        let yc = py as f64 + 0.5;
        count += union_spans(components, yc)
            .iter()
            .map(|&(lo, hi)| count_centres(lo, hi))
            .sum::<usize>();
    }
    count as f64
}

/// Pixels covered by both objects, in square pixels.
pub fn intersection_area(i: &ObjectPolygons, j: &ObjectPolygons) -> f64 {
    let (Some(ri), Some(rj)) = (y_range(&i.components), y_range(&j.components)) else {
        return 0.0;
    };
    let y0 = ri.0.max(rj.0);
    let y1 = ri.1.min(rj.1);
    if y0 >= y1 {
        return 0.0;
    }
    let mut count = 0;
    for py in (y0.floor() as i64)..(y1.ceil() as i64) {
        let yc = py as f64 + 0.5;
        let a = union_spans(&i.components, yc);
        if a.is_empty() {
            continue;
        }
        let b = union_spans(&j.components, yc);
        count += intersect_spans(&a, &b)
            .iter()
            .map(|&(lo, hi)| count_centres(lo, hi))
            .sum::<usize>();
    }
    count as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trial_io::ObjectClass;

    fn obj(c: Vec<Polygon>) -> ObjectPolygons {
        ObjectPolygons::new(ObjectClass::Needle, c)
    }

    #[test]
    fn disjoint_is_zero() {
        let a = obj(vec![Polygon::rect(0.0, 0.0, 4.0, 4.0)]);
        let b = obj(vec![Polygon::rect(10.0, 0.0, 14.0, 4.0)]);
        assert_eq!(intersection_area(&a, &b), 0.0);
    }

    #[test]
    fn touching_is_zero() {
        let a = obj(vec![Polygon::rect(0.0, 0.0, 4.0, 4.0)]);
        let b = obj(vec![Polygon::rect(4.0, 0.0, 8.0, 4.0)]);
        assert_eq!(intersection_area(&a, &b), 0.0);
    }

    #[test]
    fn offset_squares_overlap_by_four() {
        let a = obj(vec![Polygon::rect(0.0, 0.0, 4.0, 4.0)]);
        let b = obj(vec![Polygon::rect(2.0, 2.0, 6.0, 6.0)]);
        assert_eq!(intersection_area(&a, &b), 4.0);
        assert_eq!(intersection_area(&b, &a), 4.0);
    }

    #[test]
    fn self_intersection_is_own_area() {
        let a = obj(vec![Polygon::rect(3.0, 1.0, 9.0, 8.0)]);
        assert_eq!(intersection_area(&a, &a), 42.0);
    }

    #[test]
    fn overlapping_components_counted_once() {
        let a = obj(vec![Polygon::rect(0.0, 0.0, 4.0, 4.0), Polygon::rect(2.0, 0.0, 6.0, 4.0)]);
        assert_eq!(rasterized_area(&a.components), 24.0);
        let b = obj(vec![Polygon::rect(0.0, 0.0, 10.0, 10.0)]);
        assert_eq!(intersection_area(&a, &b), 24.0);
    }

    #[test]
    fn empty_object() {
        let a = obj(vec![Polygon::rect(0.0, 0.0, 4.0, 4.0)]);
        assert_eq!(intersection_area(&a, &obj(vec![])), 0.0);
    }
}
