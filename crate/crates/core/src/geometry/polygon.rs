use std::ops::{Add, Mul, Sub};

use crate::trial_io::ObjectClass;

#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn dot(self, o: Point) -> f64 {
        self.x * o.x + self.y * o.y
    }

    pub fn cross(self, o: Point) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn distance(self, o: Point) -> f64 {
        (self - o).norm()
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    fn mul(self, s: f64) -> Point {
        Point::new(self.x * s, self.y * s)
    }
}

/// Closed ring of at least three vertices; the closing edge is implicit.
#[derive(Clone, Debug, PartialEq)]
pub struct Polygon {
    points: Vec<Point>,
}

impl Polygon {
    /// Returns `None` for fewer than three vertices. A duplicated closing
    /// vertex is removed.
    pub fn new(mut points: Vec<Point>) -> Option<Self> {
        if points.len() > 1 && points.first() == points.last() {
            points.pop();
        }
        (points.len() >= 3).then_some(Polygon { points })
    }

    /// Axis-aligned rectangle `[x0, x1] x [y0, y1]`.
    pub fn rect(x0: f64, y0: f64, x1: f64, y1: f64) -> Self {
        Polygon {
            points: vec![
                Point::new(x0, y0),
                Point::new(x1, y0),
                Point::new(x1, y1),
                Point::new(x0, y1),
            ],
        }
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Edges `(p[i], p[i+1])`, including the closing edge.
    pub fn edges(&self) -> impl Iterator<Item = (Point, Point)> + '_ {
        let n = self.points.len();
        (0..n).map(move |i| (self.points[i], self.points[(i + 1) % n]))
    }

    pub fn signed_area(&self) -> f64 {
        signed_area(&self.points)
    }

    pub fn area(&self) -> f64 {
        self.signed_area().abs()
    }

    /// `(min_x, min_y, max_x, max_y)`.
    pub fn bounds(&self) -> (f64, f64, f64, f64) {
        self.points.iter().fold(
            (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY),
            |(a, b, c, d), p| (a.min(p.x), b.min(p.y), c.max(p.x), d.max(p.y)),
        )
    }

    /// Even-odd point-in-polygon test; points on the boundary may go either way.
    pub fn contains(&self, p: Point) -> bool {
        let mut inside = false;
        for (a, b) in self.edges() {
            if (a.y > p.y) != (b.y > p.y) {
                let x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
                if p.x < x {
                    inside = !inside;
                }
            }
        }
        inside
    }

    pub fn translate(&self, dx: f64, dy: f64) -> Polygon {
        Polygon {
            points: self.points.iter().map(|p| Point::new(p.x + dx, p.y + dy)).collect(),
        }
    }
}

/// Shoelace sum over an implicitly closed ring.
pub fn signed_area(points: &[Point]) -> f64 {
    let n = points.len();
    if n < 3 {
        return 0.0;
    }
    let twice: f64 = (0..n).map(|i| points[i].cross(points[(i + 1) % n])).sum();
    twice / 2.0
}

/// Shoelace area of a polygon, in square pixels.
pub fn area(polygon: &Polygon) -> f64 {
    polygon.area()
}

/// Drops components whose area is below `min_area`.
pub fn filter_small(components: Vec<Polygon>, min_area: f64) -> Vec<Polygon> {
    components.into_iter().filter(|p| p.area() >= min_area).collect()
}

/// All polygon components of one object class in one frame.
#[derive(Clone, Debug, PartialEq)]
pub struct ObjectPolygons {
    pub object_class: ObjectClass,
    pub components: Vec<Polygon>,
}

impl ObjectPolygons {
    pub fn new(object_class: ObjectClass, components: Vec<Polygon>) -> Self {
        ObjectPolygons {
            object_class,
            components,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// Mean of every vertex of every component.
    pub fn midpoint(&self) -> Option<Point> {
        midpoint(self)
    }

    pub fn area(&self) -> f64 {
        self.components.iter().map(Polygon::area).sum()
    }
}

/// Arithmetic mean of all vertices; `None` when the object has no vertices.
pub fn midpoint(object: &ObjectPolygons) -> Option<Point> {
    let (sum, n) = object
        .components
        .iter()
        .flat_map(|c| c.points())
        .fold((Point::default(), 0usize), |(s, n), &p| (s + p, n + 1));
    (n > 0).then(|| sum * (1.0 / n as f64))
}
