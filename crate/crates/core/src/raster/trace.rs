//! Crack-boundary tracing.
//!
//! The outline of a region is walked along pixel edges (the "cracks"
//! between defect and background pixels) with the region kept on the
//! right-hand side of travel as seen on screen. With `y` pointing down
//! this gives a positive shoelace area, i.e. counter-clockwise in image
//! coordinates.

use super::components::Component;
use super::Connectivity;
use crate::error::{Error, Result};

/// Closed lattice polygon on pixel corners; the last vertex connects to the first.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Polygon {
    vertices: Vec<(u32, u32)>,
}

impl Polygon {
    /// Checks the boundary-walk invariants: at least four vertices, unit
    /// axis-aligned steps (including the closing step) and non-zero area.
    pub fn new(vertices: Vec<(u32, u32)>) -> Result<Self> {
        if vertices.len() < 4 {
            return Err(Error::InvalidArgument(format!(
                "polygon needs at least 4 vertices, got {}",
                vertices.len()
            )));
        }
        for (i, a) in vertices.iter().enumerate() {
            let b = vertices[(i + 1) % vertices.len()];
            let dx = a.0.abs_diff(b.0);
            let dy = a.1.abs_diff(b.1);
            if dx + dy != 1 {
                return Err(Error::InvalidArgument(format!(
                    "vertices {i} and {} are not one lattice step apart",
                    (i + 1) % vertices.len()
                )));
            }
        }
        let poly = Self { vertices };
        if poly.signed_area() == 0 {
            return Err(Error::InvalidArgument("polygon has zero area".into()));
        }
        Ok(poly)
    }

    pub fn vertices(&self) -> &[(u32, u32)] {
        &self.vertices
    }

    /// Shoelace area; positive for counter-clockwise loops in image coordinates.
    pub fn signed_area(&self) -> i64 {
        let n = self.vertices.len();
        let twice: i64 = (0..n)
            .map(|i| {
                let (x0, y0) = self.vertices[i];
                let (x1, y1) = self.vertices[(i + 1) % n];
                x0 as i64 * y1 as i64 - x1 as i64 * y0 as i64
            })
            .sum();
        // Unit-step lattice loops always have an even doubled area.
        twice / 2
    }

    /// COCO-style flat coordinate list `[x1, y1, x2, y2, ...]`.
    pub fn to_flat(&self) -> Vec<f64> {
        self.vertices.iter().flat_map(|&(x, y)| [x as f64, y as f64]).collect()
    }

    pub fn points(&self) -> Vec<[f64; 2]> {
        self.vertices.iter().map(|&(x, y)| [x as f64, y as f64]).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Dir {
    Right,
    Down,
    Left,
    Up,
}

impl Dir {
    fn step(self) -> (i64, i64) {
        match self {
            Dir::Right => (1, 0),
            Dir::Down => (0, 1),
            Dir::Left => (-1, 0),
            Dir::Up => (0, -1),
        }
    }

    /// Counter-clockwise on screen.
    fn turn_left(self) -> Self {
        match self {
            Dir::Right => Dir::Up,
            Dir::Up => Dir::Left,
            Dir::Left => Dir::Down,
            Dir::Down => Dir::Right,
        }
    }

    fn turn_right(self) -> Self {
        match self {
            Dir::Right => Dir::Down,
            Dir::Down => Dir::Left,
            Dir::Left => Dir::Up,
            Dir::Up => Dir::Right,
        }
    }

    /// Pixels ahead-left and ahead-right of vertex `(vx, vy)` when arriving
    /// in this direction.
    fn ahead(self, vx: i64, vy: i64) -> ((i64, i64), (i64, i64)) {
        let tl = (vx - 1, vy - 1);
        let tr = (vx, vy - 1);
        let bl = (vx - 1, vy);
        let br = (vx, vy);
        match self {
            Dir::Right => (tr, br),
            Dir::Down => (br, bl),
            Dir::Left => (bl, tl),
            Dir::Up => (tl, tr),
        }
    }
}

/// Outer boundary of a component as a lattice polygon.
///
/// Holes are filled first, so the result encloses exactly the hole-filled
/// component. The walk starts at the top-left corner of the top-left-most
/// pixel heading right. At saddle vertices (two diagonal defect pixels) the
/// walk stays with the diagonal neighbour for 8-connected components and
/// splits off for 4-connected ones, so a single loop always covers the whole
/// component.
pub fn trace_boundary(component: &Component) -> Polygon {
    let grid = component.filled_local();
    let eight = component.connectivity == Connectivity::Eight;

    // Top-left-most filled cell; the padded border guarantees it is not on row 0.
    let first = grid.cells.iter().position(|&c| c).expect("component is non-empty");
    let start = ((first % grid.width) as i64, (first / grid.width) as i64);

    let mut vertices = Vec::new();
    let (mut v, mut dir) = (start, Dir::Right);
    loop {
        vertices.push(((v.0 + grid.origin.0) as u32, (v.1 + grid.origin.1) as u32));
        let (dx, dy) = dir.step();
        v = (v.0 + dx, v.1 + dy);
        if v == start {
            break;
        }
        let (left, right) = dir.ahead(v.0, v.1);
        let left = grid.at(left.0, left.1);
        let right = grid.at(right.0, right.1);
        dir = match (left, right) {
            (true, true) => dir.turn_left(),
            (true, false) if eight => dir.turn_left(),
            (true, false) => dir.turn_right(),
            (false, true) => dir,
            (false, false) => dir.turn_right(),
        };
    }
    Polygon { vertices }
}
