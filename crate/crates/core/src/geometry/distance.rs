use crate::geometry::{ObjectPolygons, Point, Polygon};

/// Distance reported when either object has no polygons.
pub const ABSENT_DISTANCE: f64 = f64::INFINITY;

fn orient(a: Point, b: Point, c: Point) -> f64 {
    (b - a).cross(c - a)
}

fn on_segment(a: Point, b: Point, p: Point) -> bool {
    p.x >= a.x.min(b.x) && p.x <= a.x.max(b.x) && p.y >= a.y.min(b.y) && p.y <= a.y.max(b.y)
}

/// Closed-segment intersection test, collinear overlaps included.
pub fn segments_intersect(p1: Point, p2: Point, q1: Point, q2: Point) -> bool {
    let d1 = orient(q1, q2, p1);
    let d2 = orient(q1, q2, p2);
    let d3 = orient(p1, p2, q1);
    let d4 = orient(p1, p2, q2);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0)) {
        return true;
    }
    (d1 == 0.0 && on_segment(q1, q2, p1))
        || (d2 == 0.0 && on_segment(q1, q2, p2))
        || (d3 == 0.0 && on_segment(p1, p2, q1))
        || (d4 == 0.0 && on_segment(p1, p2, q2))
}

/// Minimum distance between segments `p1`-`p2` and `q1`-`q2`, via the
/// clamped closest-point parameters of both segments.
pub fn segment_distance(p1: Point, p2: Point, q1: Point, q2: Point) -> f64 {
    if segments_intersect(p1, p2, q1, q2) {
        return 0.0;
    }
    let d1 = p2 - p1;
    let d2 = q2 - q1;
    let r = p1 - q1;
    let a = d1.dot(d1);
    let e = d2.dot(d2);
    let f = d2.dot(r);
    let (s, t);
    if a <= f64::EPSILON && e <= f64::EPSILON {
        return p1.distance(q1);
    }
    if a <= f64::EPSILON {
        s = 0.0;
        t = (f / e).clamp(0.0, 1.0);
    } else {
        let c = d1.dot(r);
        if e <= f64::EPSILON {
            t = 0.0;
            s = (-c / a).clamp(0.0, 1.0);
        } else {
            let b = d1.dot(d2);
            let denom = a * e - b * b;
            let mut s0 = if denom > 0.0 { ((b * f - c * e) / denom).clamp(0.0, 1.0) } else { 0.0 };
            let mut t0 = (b * s0 + f) / e;
            if t0 < 0.0 {
                t0 = 0.0;
                s0 = (-c / a).clamp(0.0, 1.0);
            } else if t0 > 1.0 {
                t0 = 1.0;
                s0 = ((b - c) / a).clamp(0.0, 1.0);
            }
            s = s0;
            t = t0;
        }
    }
    (p1 + d1 * s).distance(q1 + d2 * t)
}

/// Minimum boundary distance between two polygons; zero when the
/// boundaries cross or one polygon contains the other.
pub fn component_distance(i: &Polygon, j: &Polygon) -> f64 {
    if i.contains(j.points()[0]) || j.contains(i.points()[0]) {
        return 0.0;
    }
    let mut best = f64::INFINITY;
    for (a, b) in i.edges() {
        for (c, d) in j.edges() {
            // Lower bound from the bounding box of each edge pair.
            let gx = (a.x.min(b.x) - c.x.max(d.x)).max(c.x.min(d.x) - a.x.max(b.x)).max(0.0);
            let gy = (a.y.min(b.y) - c.y.max(d.y)).max(c.y.min(d.y) - a.y.max(b.y)).max(0.0);
            if gx * gx + gy * gy >= best * best {
                continue;
            }
            best = best.min(segment_distance(a, b, c, d));
            if best == 0.0 {
                return 0.0;
            }
        }
    }
    best
}

/// Mean of `component_distance` over every pair of components.
pub fn object_distance(i: &ObjectPolygons, j: &ObjectPolygons) -> f64 {
    if i.is_empty() || j.is_empty() {
        return ABSENT_DISTANCE;
    }
    let mut sum = 0.0;
    for a in &i.components {
        for b in &j.components {
            sum += component_distance(a, b);
        }
    }
    sum / (i.components.len() * j.components.len()) as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trial_io::ObjectClass;

    fn unit(x: f64, y: f64) -> Polygon {
        Polygon::rect(x, y, x + 1.0, y + 1.0)
    }

    #[test]
    fn shared_edge_is_zero() {
        assert_eq!(component_distance(&unit(0.0, 0.0), &unit(1.0, 0.0)), 0.0);
    }

    #[test]
    fn five_pixel_gap() {
        assert_eq!(component_distance(&unit(0.0, 0.0), &unit(6.0, 0.0)), 5.0);
    }

    #[test]
    fn containment_is_zero() {
        let big = Polygon::rect(0.0, 0.0, 10.0, 10.0);
        let small = Polygon::rect(3.0, 3.0, 5.0, 5.0);
        assert_eq!(component_distance(&big, &small), 0.0);
        assert_eq!(component_distance(&small, &big), 0.0);
    }

    #[test]
    fn diagonal_gap() {
        let d = component_distance(&unit(0.0, 0.0), &unit(4.0, 5.0));
        assert!((d - 5.0).abs() < 1e-12);
    }

    #[test]
    fn object_distance_averages_pairs() {
        let j = ObjectPolygons::new(ObjectClass::Needle, vec![unit(0.0, 0.0)]);
        let i = ObjectPolygons::new(ObjectClass::LeftGrasper, vec![unit(3.0, 0.0), unit(5.0, 0.0)]);
        assert_eq!(object_distance(&i, &j), 3.0);
        let single = ObjectPolygons::new(ObjectClass::LeftGrasper, vec![unit(3.0, 0.0)]);
        assert_eq!(object_distance(&single, &j), component_distance(&unit(3.0, 0.0), &unit(0.0, 0.0)));
        let empty = ObjectPolygons::new(ObjectClass::Needle, vec![]);
        assert_eq!(object_distance(&i, &empty), f64::INFINITY);
    }

    #[test]
    fn parallel_and_degenerate_segments() {
        let p = |x, y| Point::new(x, y);
        assert_eq!(segment_distance(p(0.0, 0.0), p(4.0, 0.0), p(1.0, 2.0), p(3.0, 2.0)), 2.0);
        assert_eq!(segment_distance(p(0.0, 0.0), p(0.0, 0.0), p(3.0, 4.0), p(3.0, 4.0)), 5.0);
        assert_eq!(segment_distance(p(0.0, 0.0), p(4.0, 0.0), p(2.0, 0.0), p(6.0, 0.0)), 0.0);
    }
}
