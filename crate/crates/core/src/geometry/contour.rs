//! Outer boundaries of 8-connected mask components.
//!
//! Boundaries run along pixel edges, so pixel `(x, y)` occupies the unit
//! square `[x, x+1] x [y, y+1]` and a solid block of `w x h` pixels yields a
//! rectangle of area `w * h`. Holes are not traced.

use crate::geometry::{Point, Polygon};
use crate::trial_io::Mask;

type Dir = (i64, i64);

const NORTH: Dir = (0, -1);

#[inline]
fn right_of(d: Dir) -> Dir {
    (-d.1, d.0)
}

#[inline]
fn left_of(d: Dir) -> Dir {
    (d.1, -d.0)
}

/// Pixel diagonally ahead of vertex `v` on side `side` when moving along `d`.
#[inline]
fn pixel_ahead(v: (i64, i64), d: Dir, side: Dir) -> (i64, i64) {
    ((2 * v.0 + d.0 + side.0 - 1) >> 1, (2 * v.1 + d.1 + side.1 - 1) >> 1)
}

/// One polygon per 8-connected component, in scanline discovery order.
pub fn extract_contours(mask: &Mask) -> Vec<Polygon> {
    let (w, h) = (mask.width, mask.height);
    let mut visited = vec![false; w * h];
    let mut stack = Vec::new();
    let mut out = Vec::new();

    let mut idx = 0;
    let n = w * h;
    while idx < n {
        // Skip background eight bytes at a time.
        if idx + 8 <= n && mask.bits[idx..idx + 8].iter().all(|&b| b == 0) {
            idx += 8;
            continue;
        }
        if mask.bits[idx] != 0 && !visited[idx] {
            flood(mask, &mut visited, &mut stack, idx);
            let (x0, y0) = ((idx % w) as i64, (idx / w) as i64);
            let ring = trace(mask, x0, y0);
            if let Some(p) = Polygon::new(ring) {
                out.push(p);
            }
        }
        idx += 1;
    }
    out
}

fn flood(mask: &Mask, visited: &mut [bool], stack: &mut Vec<usize>, seed: usize) {
    let (w, h) = (mask.width as i64, mask.height as i64);
    visited[seed] = true;
    stack.push(seed);
    while let Some(i) = stack.pop() {
        let (x, y) = ((i as i64) % w, (i as i64) / w);
        for dy in -1..=1 {
            for dx in -1..=1 {
                let (nx, ny) = (x + dx, y + dy);
                if nx < 0 || ny < 0 || nx >= w || ny >= h {
                    continue;
                }
                let j = (ny * w + nx) as usize;
                if mask.bits[j] != 0 && !visited[j] {
                    visited[j] = true;
                    stack.push(j);
                }
            }
        }
    }
}

/// Follows the outer crack boundary starting at the top-left corner of the
/// component's first pixel, keeping the object on the right-hand side.
fn trace(mask: &Mask, x0: i64, y0: i64) -> Vec<Point> {
    let start = (x0, y0);
    let mut v = start;
    // Arriving at the start corner from below, along the component's left side.
    let mut d = NORTH;
    let mut corners = Vec::new();
    loop {
        let r = right_of(d);
        let l = left_of(d);
        let (lx, ly) = pixel_ahead(v, d, l);
        let (rx, ry) = pixel_ahead(v, d, r);
        let next = if mask.get(lx, ly) {
            l
        } else if mask.get(rx, ry) {
            d
        } else {
            r
        };
        if next != d {
            corners.push(Point::new(v.0 as f64, v.1 as f64));
        }
        d = next;
        v = (v.0 + d.0, v.1 + d.1);
        if v == start {
            break;
        }
    }
    corners
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trial_io::ObjectClass;

    fn mask(w: usize, h: usize) -> Mask {
        Mask::empty(w, h, ObjectClass::Needle, 0)
    }

    #[test]
    fn empty_mask_has_no_contours() {
        assert!(extract_contours(&mask(16, 9)).is_empty());
    }

    #[test]
    fn block_gives_its_bounding_rectangle() {
        let mut m = mask(30, 20);
        m.fill_rect(5, 3, 15, 13);
        let c = extract_contours(&m);
        assert_eq!(c.len(), 1);
        assert_eq!(c[0].bounds(), (5.0, 3.0, 15.0, 13.0));
        assert_eq!(c[0].len(), 4);
        assert_eq!(c[0].area(), 100.0);
    }

    #[test]
    fn single_pixel_and_image_border() {
        let mut m = mask(3, 3);
        m.set(0, 0, true);
        let c = extract_contours(&m);
        assert_eq!(c[0].area(), 1.0);
        let mut full = mask(4, 4);
        full.fill_rect(0, 0, 4, 4);
        assert_eq!(extract_contours(&full)[0].area(), 16.0);
    }

    #[test]
    fn diagonal_pixels_are_one_component() {
        let mut m = mask(5, 5);
        m.set(1, 1, true);
        m.set(2, 2, true);
        let c = extract_contours(&m);
        assert_eq!(c.len(), 1);
        assert_eq!(c[0].area(), 2.0);
    }

    #[test]
    fn disjoint_blocks_in_scan_order() {
        let mut m = mask(40, 40);
        m.fill_rect(20, 30, 25, 35);
        m.fill_rect(2, 2, 6, 6);
        let c = extract_contours(&m);
        assert_eq!(c.len(), 2);
        assert_eq!(c[0].bounds().0, 2.0);
        assert_eq!(c[1].bounds().0, 20.0);
    }

    #[test]
    fn ring_hole_is_ignored() {
        let mut m = mask(12, 12);
        m.fill_rect(1, 1, 11, 11);
        for y in 4..8 {
            for x in 4..8 {
                m.set(x, y, false);
            }
        }
        let c = extract_contours(&m);
        assert_eq!(c.len(), 1);
        assert_eq!(c[0].area(), 100.0);
    }

    #[test]
    fn concave_l_shape() {
        let mut m = mask(10, 10);
        m.fill_rect(0, 0, 2, 6);
        m.fill_rect(0, 4, 6, 6);
        let c = extract_contours(&m);
        assert_eq!(c.len(), 1);
        assert_eq!(c[0].len(), 6);
        assert_eq!(c[0].area(), (12 + 8) as f64);
    }
}
