use std::collections::VecDeque;

use super::{BinaryMask, PixelRect};
use crate::error::{Error, Result};

/// Pixel adjacency used for labeling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Connectivity {
    Four,
    #[default]
    Eight,
}

impl Connectivity {
    /// Background adjacency paired with this foreground adjacency.
    pub fn dual(self) -> Self {
        match self {
            Connectivity::Four => Connectivity::Eight,
            Connectivity::Eight => Connectivity::Four,
        }
    }

    fn offsets(self) -> &'static [(i64, i64)] {
        const FOUR: [(i64, i64); 4] = [(1, 0), (-1, 0), (0, 1), (0, -1)];
        const EIGHT: [(i64, i64); 8] = [(1, 0), (-1, 0), (0, 1), (0, -1), (1, 1), (1, -1), (-1, 1), (-1, -1)];
        match self {
            Connectivity::Four => &FOUR,
            Connectivity::Eight => &EIGHT,
        }
    }
}

impl TryFrom<u8> for Connectivity {
    type Error = Error;

    fn try_from(value: u8) -> Result<Self> {
        match value {
            4 => Ok(Connectivity::Four),
            8 => Ok(Connectivity::Eight),
            other => Err(Error::InvalidArgument(format!(
                "connectivity must be 4 or 8, got {other}"
            ))),
        }
    }
}

/// One maximal connected set of defect pixels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Component {
    /// 1-based label in top-left-most-pixel order.
    pub id: u32,
    /// Member pixels in raster order.
    pub pixels: Vec<(u32, u32)>,
    pub bbox: PixelRect,
    pub connectivity: Connectivity,
}

impl Component {
    pub fn area(&self) -> usize {
        self.pixels.len()
    }

    /// The component drawn into a `width × height` mask.
    pub fn to_mask(&self, width: u32, height: u32) -> Result<BinaryMask> {
        BinaryMask::from_pixels(width, height, &self.pixels)
    }

    /// Component pixels plus every enclosed hole, as a local grid over the
    /// bounding box padded by one background pixel on each side.
    pub(crate) fn filled_local(&self) -> LocalGrid {
        let w = self.bbox.w as usize + 2;
        let h = self.bbox.h as usize + 2;
        let mut cells = vec![false; w * h];
        for &(x, y) in &self.pixels {
            let lx = (x - self.bbox.x) as usize + 1;
            let ly = (y - self.bbox.y) as usize + 1;
            cells[ly * w + lx] = true;
        }
        let outside = flood_background(&cells, w, h, self.connectivity.dual());
        for (c, o) in cells.iter_mut().zip(outside) {
            *c = !o;
        }
        LocalGrid {
            width: w,
            height: h,
            origin: (self.bbox.x as i64 - 1, self.bbox.y as i64 - 1),
            cells,
        }
    }

    /// Pixels of the component with its holes filled, in raster order.
    pub fn filled_pixels(&self) -> Vec<(u32, u32)> {
        let grid = self.filled_local();
        let mut out = Vec::new();
        for ly in 0..grid.height {
            for lx in 0..grid.width {
                if grid.cells[ly * grid.width + lx] {
                    out.push(((lx as i64 + grid.origin.0) as u32, (ly as i64 + grid.origin.1) as u32));
                }
            }
        }
        out
    }
}

/// Row-major boolean grid placed at `origin` in image coordinates.
pub(crate) struct LocalGrid {
    pub width: usize,
    pub height: usize,
    pub origin: (i64, i64),
    pub cells: Vec<bool>,
}

impl LocalGrid {
    pub fn at(&self, x: i64, y: i64) -> bool {
        if x < 0 || y < 0 || x >= self.width as i64 || y >= self.height as i64 {
            return false;
        }
        self.cells[y as usize * self.width + x as usize]
    }
}

/// Background cells reachable from cell (0,0) under `conn`.
pub(crate) fn flood_background(fg: &[bool], w: usize, h: usize, conn: Connectivity) -> Vec<bool> {
    let mut seen = vec![false; w * h];
    if fg[0] {
        return seen;
    }
    let mut queue = VecDeque::from([(0usize, 0usize)]);
    seen[0] = true;
    while let Some((x, y)) = queue.pop_front() {
        for &(dx, dy) in conn.offsets() {
            let nx = x as i64 + dx;
            let ny = y as i64 + dy;
            if nx < 0 || ny < 0 || nx >= w as i64 || ny >= h as i64 {
                continue;
            }
            let i = ny as usize * w + nx as usize;
            if !fg[i] && !seen[i] {
                seen[i] = true;
                queue.push_back((nx as usize, ny as usize));
            }
        }
    }
    seen
}

/// Label the defect pixels of `mask` into maximal connected sets.
///
/// Components are ordered by their top-left-most pixel (minimum y, then
/// minimum x) and numbered from 1 in that order.
pub fn connected_components(mask: &BinaryMask, connectivity: Connectivity) -> Vec<Component> {
    let w = mask.width() as usize;
    let h = mask.height() as usize;
    let data = mask.data();
    let mut visited = vec![false; w * h];
    let mut out = Vec::new();
    let mut queue = VecDeque::new();

    for start in 0..w * h {
        if !data[start] || visited[start] {
            continue;
        }
        visited[start] = true;
        queue.push_back(start);
        let mut members = Vec::new();
        while let Some(i) = queue.pop_front() {
            members.push(i);
            let (x, y) = ((i % w) as i64, (i / w) as i64);
            for &(dx, dy) in connectivity.offsets() {
                let (nx, ny) = (x + dx, y + dy);
                if nx < 0 || ny < 0 || nx >= w as i64 || ny >= h as i64 {
                    continue;
                }
                let j = ny as usize * w + nx as usize;
                if data[j] && !visited[j] {
                    visited[j] = true;
                    queue.push_back(j);
                }
            }
        }
        members.sort_unstable();
        let pixels: Vec<(u32, u32)> = members.into_iter().map(|i| ((i % w) as u32, (i / w) as u32)).collect();
        let bbox = PixelRect::enclosing(pixels.iter().copied()).expect("component has at least one pixel");
        out.push(Component {
            id: out.len() as u32 + 1,
            pixels,
            bbox,
            connectivity,
        });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mask(w: u32, h: u32, px: &[(u32, u32)]) -> BinaryMask {
        BinaryMask::from_pixels(w, h, px).unwrap()
    }

    /// Union-find over all pixel pairs; independent of the BFS labeler.
    fn union_find_labels(m: &BinaryMask, conn: Connectivity) -> Vec<Vec<(u32, u32)>> {
        let px: Vec<(u32, u32)> = m.pixels().collect();
        let mut parent: Vec<usize> = (0..px.len()).collect();
        fn find(p: &mut [usize], mut i: usize) -> usize {
            while p[i] != i {
                p[i] = p[p[i]];
                i = p[i];
            }
            i
        }
        for i in 0..px.len() {
            for j in 0..i {
                let dx = (px[i].0 as i64 - px[j].0 as i64).abs();
                let dy = (px[i].1 as i64 - px[j].1 as i64).abs();
                let adjacent = match conn {
                    Connectivity::Four => dx + dy == 1,
                    Connectivity::Eight => dx.max(dy) == 1,
                };
                if adjacent {
                    let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                    parent[a] = b;
                }
            }
        }
        let mut groups: std::collections::BTreeMap<usize, Vec<(u32, u32)>> = Default::default();
        for (i, &p) in px.iter().enumerate() {
            let r = find(&mut parent, i);
            groups.entry(r).or_default().push(p);
        }
        let mut out: Vec<Vec<(u32, u32)>> = groups.into_values().collect();
        for g in &mut out {
            g.sort_by_key(|&(x, y)| (y, x));
        }
        out.sort_by_key(|g| (g[0].1, g[0].0));
        out
    }

    #[test]
    fn diagonal_pair() {
        let m = mask(2, 2, &[(0, 0), (1, 1)]);
        assert_eq!(connected_components(&m, Connectivity::Four).len(), 2);
        let eight = connected_components(&m, Connectivity::Eight);
        assert_eq!(eight.len(), 1);
        assert_eq!(eight[0].area(), 2);
    }

    #[test]
    fn block_and_isolated_pixel() {
        let m = mask(5, 5, &[(1, 1), (2, 1), (1, 2), (2, 2), (4, 4)]);
        let comps = connected_components(&m, Connectivity::Eight);
        let oracle = union_find_labels(&m, Connectivity::Eight);
        assert_eq!(comps.len(), 2);
        assert_eq!(comps[0].area(), 4);
        assert_eq!(comps[0].bbox, PixelRect { x: 1, y: 1, w: 2, h: 2 });
        assert_eq!(comps[1].area(), 1);
        assert_eq!(comps[1].bbox, PixelRect { x: 4, y: 4, w: 1, h: 1 });
        let ours: Vec<Vec<(u32, u32)>> = comps
            .iter()
            .map(|c| {
                let mut p = c.pixels.clone();
                p.sort_by_key(|&(x, y)| (y, x));
                p
            })
            .collect();
        assert_eq!(ours, oracle);
        assert_eq!(comps.iter().map(|c| c.id).collect::<Vec<_>>(), vec![1, 2]);
    }

    #[test]
    fn matches_union_find_on_all_4x4_masks() {
        for bits in 0u32..(1 << 16) {
            let m = BinaryMask::from_fn(4, 4, |x, y| bits >> (y * 4 + x) & 1 == 1).unwrap();
            for conn in [Connectivity::Four, Connectivity::Eight] {
                let ours: Vec<Vec<(u32, u32)>> = connected_components(&m, conn).into_iter().map(|c| c.pixels).collect();
                assert_eq!(ours, union_find_labels(&m, conn), "mask {bits:#06x} {conn:?}");
            }
            let n4 = connected_components(&m, Connectivity::Four).len();
            let n8 = connected_components(&m, Connectivity::Eight).len();
            assert!(n8 <= n4);
        }
    }

    #[test]
    fn empty_mask_has_no_components() {
        let m = BinaryMask::empty(3, 3).unwrap();
        assert!(connected_components(&m, Connectivity::Eight).is_empty());
    }

    #[test]
    fn connectivity_from_int() {
        assert_eq!(Connectivity::try_from(4).unwrap(), Connectivity::Four);
        assert_eq!(Connectivity::try_from(8).unwrap(), Connectivity::Eight);
        assert!(Connectivity::try_from(6).is_err());
    }
}
