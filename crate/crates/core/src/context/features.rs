use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::geometry::{intersection_area, object_distance, ObjectPolygons, Point, Polygon};
use crate::trial_io::ObjectClass;

/// One scalar feature of a frame.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FeatureKey {
    /// Mean pairwise component distance `D(I, J)`.
    Distance(ObjectClass, ObjectClass),
    /// Intersection area `Inter(I, J)`.
    Intersection(ObjectClass, ObjectClass),
    MidX(ObjectClass),
    MidY(ObjectClass),
}

impl fmt::Display for FeatureKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FeatureKey::Distance(a, b) => write!(f, "D({},{})", a.symbol(), b.symbol()),
            FeatureKey::Intersection(a, b) => write!(f, "Inter({},{})", a.symbol(), b.symbol()),
            FeatureKey::MidX(a) => write!(f, "{}.x", a.symbol()),
            FeatureKey::MidY(a) => write!(f, "{}.y", a.symbol()),
        }
    }
}

impl FeatureKey {
    pub fn objects(&self) -> Vec<ObjectClass> {
        match *self {
            FeatureKey::Distance(a, b) | FeatureKey::Intersection(a, b) => vec![a, b],
            FeatureKey::MidX(a) | FeatureKey::MidY(a) => vec![a],
        }
    }
}

/// Grasper side for jaw-openness flags.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Left,
    Right,
}

/// Distances, intersection areas, midpoints and jaw flags for one frame.
///
/// Distances involving an absent object are `+inf`; midpoints of an absent
/// object are NaN. Intersections with an absent object are 0.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct FeatureVector {
    pub frame_index: usize,
    pub values: BTreeMap<FeatureKey, f64>,
    /// `true` when the left grasper is open.
    pub alpha_left: bool,
    pub alpha_right: bool,
}

impl FeatureVector {
    pub fn get(&self, key: FeatureKey) -> Option<f64> {
        self.values.get(&key).copied()
    }

    pub fn alpha(&self, side: Side) -> bool {
        match side {
            Side::Left => self.alpha_left,
            Side::Right => self.alpha_right,
        }
    }

    pub fn with(mut self, key: FeatureKey, value: f64) -> Self {
        self.values.insert(key, value);
        self
    }
}

/// `true` (open) unless the jaw ends are closer than `closed_below_px`.
pub fn grasper_open(jaw: [Point; 2], closed_below_px: f64) -> bool {
    jaw[0].distance(jaw[1]) >= closed_below_px
}

/// Square polygons of half-size `radius` around annotated points.
pub fn point_markers(class: ObjectClass, points: &[Point], radius: f64) -> ObjectPolygons {
    ObjectPolygons::new(
        class,
        points
            .iter()
            .map(|p| Polygon::rect(p.x - radius, p.y - radius, p.x + radius, p.y + radius))
            .collect(),
    )
}

/// Evaluates the requested features over the polygons of one frame.
///
/// Classes missing from `objects` are treated as empty.
pub fn compute_features(
    frame_index: usize,
    objects: &BTreeMap<ObjectClass, ObjectPolygons>,
    alpha_left: bool,
    alpha_right: bool,
    required: &BTreeSet<FeatureKey>,
) -> FeatureVector {
    let empty = |c: ObjectClass| ObjectPolygons::new(c, Vec::new());
    let get = |c: ObjectClass| objects.get(&c).cloned().unwrap_or_else(|| empty(c));
    let mut values = BTreeMap::new();
    for &key in required {
        let v = match key {
            FeatureKey::Distance(a, b) => object_distance(&get(a), &get(b)),
            FeatureKey::Intersection(a, b) => intersection_area(&get(a), &get(b)),
            FeatureKey::MidX(a) => get(a).midpoint().map_or(f64::NAN, |p| p.x),
            FeatureKey::MidY(a) => get(a).midpoint().map_or(f64::NAN, |p| p.y),
        };
        values.insert(key, v);
    }
    FeatureVector {
        frame_index,
        values,
        alpha_left,
        alpha_right,
    }
}
