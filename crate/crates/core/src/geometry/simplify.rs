//! Ramer–Douglas–Peucker simplification.

use crate::geometry::{Point, Polygon};

/// Distance from `p` to the segment `a`-`b`.
pub fn point_segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let ab = b - a;
    let len2 = ab.dot(ab);
    if len2 == 0.0 {
        return p.distance(a);
    }
    let t = ((p - a).dot(ab) / len2).clamp(0.0, 1.0);
    p.distance(a + ab * t)
}

/// Simplifies an open polyline. Both endpoints are always kept.
pub fn simplify_polyline(points: &[Point], epsilon: f64) -> Vec<Point> {
    if points.len() < 3 || epsilon <= 0.0 {
        return points.to_vec();
    }
    let mut keep = vec![false; points.len()];
    keep[0] = true;
    keep[points.len() - 1] = true;
    let mut stack = vec![(0usize, points.len() - 1)];
    while let Some((first, last)) = stack.pop() {
        if last <= first + 1 {
            continue;
        }
        let (a, b) = (points[first], points[last]);
        let (idx, dmax) = (first + 1..last)
            .map(|i| (i, point_segment_distance(points[i], a, b)))
            .fold((first, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if dmax > epsilon {
            keep[idx] = true;
            stack.push((first, idx));
            stack.push((idx, last));
        }
    }
    points
        .iter()
        .zip(keep)
        .filter_map(|(p, k)| k.then_some(*p))
        .collect()
}

/// Simplifies a closed ring.
///
/// The ring is split at its first vertex and the vertex farthest from it,
/// and each half is simplified as a polyline. Returns `None` when fewer than
/// three vertices survive.
pub fn simplify(polygon: &Polygon, epsilon: f64) -> Option<Polygon> {
    let pts = polygon.points();
    if epsilon <= 0.0 {
        return Some(polygon.clone());
    }
    let anchor = pts[0];
    let far = (1..pts.len())
        .max_by(|&i, &j| {
            anchor
                .distance(pts[i])
                .partial_cmp(&anchor.distance(pts[j]))
                .unwrap_or(std::cmp::Ordering::Equal)
        })
        .expect("polygon has at least three vertices");
    let first_half = simplify_polyline(&pts[..=far], epsilon);
    let mut second: Vec<Point> = pts[far..].to_vec();
    second.push(anchor);
    let second_half = simplify_polyline(&second, epsilon);

    let mut ring = first_half;
    ring.extend_from_slice(&second_half[1..second_half.len() - 1]);
    Polygon::new(ring)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pts(v: &[(f64, f64)]) -> Vec<Point> {
        v.iter().map(|&(x, y)| Point::new(x, y)).collect()
    }

    #[test]
    fn collinear_points_collapse() {
        let out = simplify_polyline(&pts(&[(0.0, 0.0), (1.0, 0.0), (2.0, 0.0)]), 0.5);
        assert_eq!(out, pts(&[(0.0, 0.0), (2.0, 0.0)]));
    }

    #[test]
    fn square_with_midpoints_keeps_corners() {
        let sq = Polygon::new(pts(&[
            (0.0, 0.0),
            (1.0, 0.0),
            (2.0, 0.0),
            (2.0, 1.0),
            (2.0, 2.0),
            (1.0, 2.0),
            (0.0, 2.0),
            (0.0, 1.0),
        ]))
        .unwrap();
        let out = simplify(&sq, 0.1).unwrap();
        assert_eq!(out.points(), pts(&[(0.0, 0.0), (2.0, 0.0), (2.0, 2.0), (0.0, 2.0)]).as_slice());
    }

    #[test]
    fn zero_epsilon_is_identity() {
        let p = Polygon::new(pts(&[(0.0, 0.0), (1.0, 0.0), (2.0, 0.0), (1.0, 3.0)])).unwrap();
        assert_eq!(simplify(&p, 0.0).unwrap(), p);
        let line = pts(&[(0.0, 0.0), (1.0, 0.0), (2.0, 0.0)]);
        assert_eq!(simplify_polyline(&line, 0.0), line);
    }

    #[test]
    fn degenerate_ring_dropped() {
        let thin = Polygon::new(pts(&[(0.0, 0.0), (5.0, 0.0), (10.0, 0.1)])).unwrap();
        assert!(simplify(&thin, 1.0).is_none());
    }

    #[test]
    fn point_segment_distance_cases() {
        let (a, b) = (Point::new(0.0, 0.0), Point::new(10.0, 0.0));
        assert_eq!(point_segment_distance(Point::new(5.0, 3.0), a, b), 3.0);
        assert_eq!(point_segment_distance(Point::new(13.0, 4.0), a, b), 5.0);
        assert_eq!(point_segment_distance(Point::new(1.0, 1.0), a, a), 2f64.sqrt());
    }
}
