//! Mask-to-polygon conversion and the distance and intersection primitives
//! used to build per-frame features.

mod contour;
mod distance;
mod polygon;
mod raster;
mod simplify;

pub use contour::extract_contours;
pub use distance::{
    component_distance, object_distance, segment_distance, segments_intersect, ABSENT_DISTANCE,
};
pub use polygon::{area, filter_small, midpoint, signed_area, ObjectPolygons, Point, Polygon};
pub use raster::{intersection_area, rasterized_area};
pub use simplify::{point_segment_distance, simplify, simplify_polyline};

use crate::trial_io::Mask;

/// Contours of `mask`, simplified with tolerance `epsilon` and stripped of
/// components smaller than `min_area`.
pub fn mask_to_polygons(mask: &Mask, epsilon: f64, min_area: f64) -> ObjectPolygons {
    let simplified = extract_contours(mask)
        .iter()
        .filter_map(|c| simplify(c, epsilon))
        .collect();
    ObjectPolygons::new(mask.object_class, filter_small(simplified, min_area))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trial_io::ObjectClass;

    #[test]
    fn small_blobs_are_dropped() {
        let mut m = Mask::empty(40, 40, ObjectClass::Thread, 0);
        m.fill_rect(1, 1, 4, 4);
        m.fill_rect(10, 10, 14, 14);
        let objs = mask_to_polygons(&m, 1.5, 15.0);
        assert_eq!(objs.components.len(), 1);
        assert_eq!(objs.components[0].area(), 16.0);
    }
}
