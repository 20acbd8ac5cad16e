//! Even-odd scanline fill at pixel centers.

use super::{BinaryMask, Polygon};
use crate::error::{Error, Result};

/// Pixels whose centers fall inside `polygon` (even-odd rule).
///
/// For polygons from [`trace_boundary`](super::trace_boundary) this
/// reproduces the hole-filled component exactly.
pub fn rasterize_polygon(polygon: &Polygon, width: u32, height: u32) -> Result<BinaryMask> {
    rasterize_points(&polygon.points(), width, height)
}

/// Even-odd fill of an arbitrary closed point loop. Vertices must lie in
/// `[0, width] × [0, height]`.
pub fn rasterize_points(points: &[[f64; 2]], width: u32, height: u32) -> Result<BinaryMask> {
    let mut mask = BinaryMask::empty(width, height)?;
    fill_into(&mut mask, points)?;
    Ok(mask)
}

/// Union of the even-odd fills of several flat `[x1, y1, x2, y2, ...]` rings.
pub fn rasterize_rings(rings: &[Vec<f64>], width: u32, height: u32) -> Result<BinaryMask> {
    let mut mask = BinaryMask::empty(width, height)?;
    for ring in rings {
        if ring.len() % 2 != 0 {
            return Err(Error::InvalidArgument("polygon has odd coordinate count".into()));
        }
        let points: Vec<[f64; 2]> = ring.chunks_exact(2).map(|c| [c[0], c[1]]).collect();
        fill_into(&mut mask, &points)?;
    }
    Ok(mask)
}

/// ORs the even-odd fill of `points` into `mask`.
pub(crate) fn fill_into(mask: &mut BinaryMask, points: &[[f64; 2]]) -> Result<()> {
    let (w, h) = (mask.width(), mask.height());
    for (i, p) in points.iter().enumerate() {
        let ok = p[0].is_finite()
            && p[1].is_finite()
            && (0.0..=w as f64).contains(&p[0])
            && (0.0..=h as f64).contains(&p[1]);
        if !ok {
            return Err(Error::OutOfBounds(format!(
                "vertex {i} ({}, {}) outside [0,{w}]x[0,{h}]",
                p[0], p[1]
            )));
        }
    }
    if points.len() < 3 {
        return Ok(());
    }

    let n = points.len();
    let min_y = points.iter().map(|p| p[1]).fold(f64::INFINITY, f64::min);
    let max_y = points.iter().map(|p| p[1]).fold(f64::NEG_INFINITY, f64::max);
    let first_row = (min_y - 0.5).ceil().max(0.0) as u32;
    let last_row = ((max_y - 0.5).ceil().max(0.0) as u32).min(h);

    let mut crossings = Vec::new();
    for y in first_row..last_row {
        let yc = y as f64 + 0.5;
        crossings.clear();
        for i in 0..n {
            let [xi, yi] = points[i];
            let [xj, yj] = points[(i + n - 1) % n];
            if (yi > yc) != (yj > yc) {
                crossings.push((xj - xi) * (yc - yi) / (yj - yi) + xi);
            }
        }
        crossings.sort_by(f64::total_cmp);
        for span in crossings.chunks_exact(2) {
            // Centers with span[0] <= x+0.5 < span[1].
            let start = (span[0] - 0.5).ceil().max(0.0) as u32;
            let end = ((span[1] - 0.5).ceil().max(0.0) as u32).min(w);
            for x in start..end {
                mask.set(x, y, true);
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Classic crossing-number test evaluated at one point.
    fn pnpoly(points: &[[f64; 2]], px: f64, py: f64) -> bool {
        let mut inside = false;
        let n = points.len();
        let mut j = n - 1;
        for i in 0..n {
            let [xi, yi] = points[i];
            let [xj, yj] = points[j];
            if (yi > py) != (yj > py) && px < (xj - xi) * (py - yi) / (yj - yi) + xi {
                inside = !inside;
            }
            j = i;
        }
        inside
    }

    fn oracle(points: &[[f64; 2]], w: u32, h: u32) -> BinaryMask {
        BinaryMask::from_fn(w, h, |x, y| pnpoly(points, x as f64 + 0.5, y as f64 + 0.5)).unwrap()
    }

    #[test]
    fn unit_square() {
        let poly = Polygon::new(vec![(3, 5), (4, 5), (4, 6), (3, 6)]).unwrap();
        let m = rasterize_polygon(&poly, 8, 8).unwrap();
        assert_eq!(m.pixels().collect::<Vec<_>>(), vec![(3, 5)]);
    }

    #[test]
    fn triangle_matches_point_oracle() {
        let tri = [[0.0, 0.0], [4.0, 0.0], [0.0, 4.0]];
        let m = rasterize_points(&tri, 4, 4).unwrap();
        assert_eq!(m, oracle(&tri, 4, 4));
        // Centers with x+y == 4 sit on the hypotenuse and fall outside the
        // half-open crossing rule.
        let got: Vec<(u32, u32)> = m.pixels().collect();
        assert_eq!(got, vec![(0, 0), (1, 0), (2, 0), (0, 1), (1, 1), (0, 2)]);
    }

    #[test]
    fn decimal_polygons_match_oracle() {
        let shapes: Vec<Vec<[f64; 2]>> = vec![
            vec![[0.3, 0.7], [9.2, 1.1], [5.5, 8.9]],
            vec![[1.0, 1.0], [9.0, 1.0], [9.0, 9.0], [5.0, 2.5], [1.0, 9.0]],
            // self-intersecting bow tie
            vec![[0.0, 0.0], [10.0, 10.0], [10.0, 0.0], [0.0, 10.0]],
            vec![[2.5, 2.5], [7.5, 2.5], [7.5, 7.5], [2.5, 7.5]],
        ];
        for s in shapes {
            assert_eq!(rasterize_points(&s, 10, 10).unwrap(), oracle(&s, 10, 10));
        }
    }

    #[test]
    fn rejects_out_of_bounds_vertex() {
        let s = [[0.0, 0.0], [5.0, 0.0], [0.0, 5.0]];
        assert!(matches!(rasterize_points(&s, 4, 4), Err(Error::OutOfBounds(_))));
    }

    #[test]
    fn rings_are_unioned() {
        let a = vec![0.0, 0.0, 2.0, 0.0, 2.0, 2.0, 0.0, 2.0];
        let b = vec![1.0, 1.0, 3.0, 1.0, 3.0, 3.0, 1.0, 3.0];
        let m = rasterize_rings(&[a, b], 4, 4).unwrap();
        assert_eq!(m.area(), 7);
    }
}
