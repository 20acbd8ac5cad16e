//! Raster primitives shared by every pipeline stage.
//!
//! Coordinates are `(x, y)` with `y` growing downwards. A pixel `(x, y)`
//! covers the unit square `[x, x+1] × [y, y+1]`; polygons live on the lattice
//! of pixel corners and are filled by testing pixel centers `(x+0.5, y+0.5)`
//! with the even-odd rule.

mod components;
mod fill;
mod io;
mod trace;

pub use components::{connected_components, Component, Connectivity};
pub use fill::{rasterize_points, rasterize_polygon, rasterize_rings};
pub use io::{decode_image, encode_mask_pgm, encode_pgm, encode_png_gray, encode_png_rgb, load_image};
pub use trace::{trace_boundary, Polygon};

use crate::error::{Error, Result};

/// 8-bit single-channel image, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayImage {
    width: u32,
    height: u32,
    data: Vec<u8>,
}

impl GrayImage {
    pub fn new(width: u32, height: u32, data: Vec<u8>) -> Result<Self> {
        check_dims(width, height, data.len())?;
        Ok(Self { width, height, data })
    }

    /// Image filled with a single intensity.
    pub fn filled(width: u32, height: u32, value: u8) -> Result<Self> {
        Self::new(width, height, vec![value; width as usize * height as usize])
    }

    pub fn from_fn(width: u32, height: u32, mut f: impl FnMut(u32, u32) -> u8) -> Result<Self> {
        let mut data = Vec::with_capacity(width as usize * height as usize);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Self::new(width, height, data)
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    pub fn get(&self, x: u32, y: u32) -> u8 {
        self.data[y as usize * self.width as usize + x as usize]
    }

    pub fn set(&mut self, x: u32, y: u32, value: u8) {
        self.data[y as usize * self.width as usize + x as usize] = value;
    }

    /// Intensity counts per level.
    pub fn histogram(&self) -> [u64; 256] {
        let mut hist = [0u64; 256];
        for &v in &self.data {
            hist[v as usize] += 1;
        }
        hist
    }
}

/// Per-pixel defect labeling: `true` is defect (white), `false` background (black).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BinaryMask {
    width: u32,
    height: u32,
    data: Vec<bool>,
}

impl BinaryMask {
    pub fn new(width: u32, height: u32, data: Vec<bool>) -> Result<Self> {
        check_dims(width, height, data.len())?;
        Ok(Self { width, height, data })
    }

    /// All-background mask.
    pub fn empty(width: u32, height: u32) -> Result<Self> {
        Self::new(width, height, vec![false; width as usize * height as usize])
    }

    pub fn from_fn(width: u32, height: u32, mut f: impl FnMut(u32, u32) -> bool) -> Result<Self> {
        let mut data = Vec::with_capacity(width as usize * height as usize);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Self::new(width, height, data)
    }

    /// Mask of the given pixels. Pixels outside the raster are an error.
    pub fn from_pixels(width: u32, height: u32, pixels: &[(u32, u32)]) -> Result<Self> {
        let mut mask = Self::empty(width, height)?;
        for &(x, y) in pixels {
            if x >= width || y >= height {
                return Err(Error::OutOfBounds(format!("pixel ({x},{y}) outside {width}x{height}")));
            }
            mask.set(x, y, true);
        }
        Ok(mask)
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn data(&self) -> &[bool] {
        &self.data
    }

    pub fn get(&self, x: u32, y: u32) -> bool {
        self.data[y as usize * self.width as usize + x as usize]
    }

    pub fn set(&mut self, x: u32, y: u32, value: bool) {
        self.data[y as usize * self.width as usize + x as usize] = value;
    }

    /// Number of defect pixels.
    pub fn area(&self) -> usize {
        self.data.iter().filter(|&&b| b).count()
    }

    /// Defect pixels in raster order.
    pub fn pixels(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        let w = self.width as usize;
        self.data
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(move |(i, _)| ((i % w) as u32, (i / w) as u32))
    }

    /// Tight box around the defect pixels.
    pub fn bbox(&self) -> Result<PixelRect> {
        PixelRect::enclosing(self.pixels())
    }

    /// Pixel-wise OR. Both masks must have the same size.
    pub fn union_with(&mut self, other: &BinaryMask) -> Result<()> {
        self.check_same_size(other)?;
        for (a, &b) in self.data.iter_mut().zip(&other.data) {
            *a |= b;
        }
        Ok(())
    }

    pub(crate) fn check_same_size(&self, other: &BinaryMask) -> Result<()> {
        if self.width != other.width || self.height != other.height {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} vs {}x{}",
                self.width, self.height, other.width, other.height
            )));
        }
        Ok(())
    }

    /// Fill every background region that cannot reach the raster border.
    ///
    /// Background connectivity is the dual of `fg`: holes of an
    /// 8-connected foreground are 4-connected background regions and
    /// vice versa.
    pub fn fill_holes(&self, fg: Connectivity) -> BinaryMask {
        let w = self.width as usize + 2;
        let h = self.height as usize + 2;
        let mut padded = vec![false; w * h];
        for y in 0..self.height as usize {
            for x in 0..self.width as usize {
                padded[(y + 1) * w + x + 1] = self.data[y * self.width as usize + x];
            }
        }
        let outside = components::flood_background(&padded, w, h, fg.dual());
        let data = (0..self.height as usize)
            .flat_map(|y| (0..self.width as usize).map(move |x| (x, y)))
            .map(|(x, y)| !outside[(y + 1) * w + x + 1])
            .collect();
        BinaryMask {
            width: self.width,
            height: self.height,
            data,
        }
    }

    /// Gray rendering: 255 for defect, 0 for background.
    pub fn to_gray(&self) -> GrayImage {
        GrayImage {
            width: self.width,
            height: self.height,
            data: self.data.iter().map(|&b| if b { 255 } else { 0 }).collect(),
        }
    }
}

/// Axis-aligned pixel box in COCO order `[x, y, width, height]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PixelRect {
    pub x: u32,
    pub y: u32,
    pub w: u32,
    pub h: u32,
}

impl PixelRect {
    /// Tightest box around `pixels`; errors on an empty iterator.
    pub fn enclosing(pixels: impl IntoIterator<Item = (u32, u32)>) -> Result<Self> {
        let mut it = pixels.into_iter();
        let (x0, y0) = it.next().ok_or(Error::EmptyRegion)?;
        let (mut min_x, mut min_y, mut max_x, mut max_y) = (x0, y0, x0, y0);
        for (x, y) in it {
            min_x = min_x.min(x);
            min_y = min_y.min(y);
            max_x = max_x.max(x);
            max_y = max_y.max(y);
        }
        Ok(Self {
            x: min_x,
            y: min_y,
            w: max_x - min_x + 1,
            h: max_y - min_y + 1,
        })
    }

    pub fn contains(&self, x: u32, y: u32) -> bool {
        x >= self.x && y >= self.y && x < self.x + self.w && y < self.y + self.h
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.x as f64, self.y as f64, self.w as f64, self.h as f64]
    }
}

/// Pixel-count area and tight box of a mask.
///
/// Empty masks have area 0 but no box, so they are reported as
/// [`Error::EmptyRegion`].
pub fn mask_area_bbox(mask: &BinaryMask) -> Result<(usize, PixelRect)> {
    Ok((mask.area(), mask.bbox()?))
}

/// Pixel `true` iff intensity is strictly above `threshold`.
pub fn binarize(image: &GrayImage, threshold: u8) -> BinaryMask {
    BinaryMask {
        width: image.width,
        height: image.height,
        data: image.data.iter().map(|&v| v > threshold).collect(),
    }
}

fn check_dims(width: u32, height: u32, len: usize) -> Result<()> {
    if width == 0 || height == 0 {
        return Err(Error::InvalidArgument(format!(
            "raster dimensions must be positive, got {width}x{height}"
        )));
    }
    if len != width as usize * height as usize {
        return Err(Error::DimensionMismatch(format!(
            "{width}x{height} raster needs {} values, got {len}",
            width as usize * height as usize
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binarize_is_strict() {
        let img = GrayImage::new(2, 2, vec![0, 128, 255, 7]).unwrap();
        assert_eq!(binarize(&img, 127).data(), &[false, true, true, false]);
        assert_eq!(binarize(&img, 255).area(), 0);
        let zeros = GrayImage::filled(3, 3, 0).unwrap();
        assert_eq!(binarize(&zeros, 0).area(), 0);
    }

    #[test]
    fn binarize_monotone_in_threshold() {
        let img = GrayImage::from_fn(16, 16, |x, y| (x * 16 + y) as u8).unwrap();
        let mut prev = binarize(&img, 0);
        for t in 1..=255u8 {
            let cur = binarize(&img, t);
            for (a, b) in cur.data().iter().zip(prev.data()) {
                assert!(!a || *b);
            }
            prev = cur;
        }
    }

    #[test]
    fn area_and_bbox() {
        let block = BinaryMask::from_pixels(5, 5, &[(1, 1), (2, 1), (1, 2), (2, 2)]).unwrap();
        let (area, bbox) = mask_area_bbox(&block).unwrap();
        assert_eq!(area, 4);
        assert_eq!(bbox, PixelRect { x: 1, y: 1, w: 2, h: 2 });

        let corners = BinaryMask::from_pixels(5, 5, &[(0, 0), (4, 4)]).unwrap();
        let (area, bbox) = mask_area_bbox(&corners).unwrap();
        assert_eq!(area, 2);
        assert_eq!(bbox, PixelRect { x: 0, y: 0, w: 5, h: 5 });

        let empty = BinaryMask::empty(4, 4).unwrap();
        assert_eq!(empty.area(), 0);
        assert!(matches!(mask_area_bbox(&empty), Err(Error::EmptyRegion)));
    }

    #[test]
    fn rejects_bad_dimensions() {
        assert!(GrayImage::new(0, 3, vec![]).is_err());
        assert!(GrayImage::new(2, 2, vec![1, 2, 3]).is_err());
        assert!(BinaryMask::new(2, 1, vec![true]).is_err());
    }

    #[test]
    fn fill_holes_respects_duality() {
        // 3x3 ring: center is a hole for both connectivities.
        let ring = BinaryMask::from_fn(3, 3, |x, y| !(x == 1 && y == 1)).unwrap();
        assert_eq!(ring.fill_holes(Connectivity::Eight).area(), 9);
        assert_eq!(ring.fill_holes(Connectivity::Four).area(), 9);

        // Diamond around (1,1): 8-connected foreground encloses a 4-connected hole,
        // but the hole leaks through the diagonal corners under 8-connected background.
        let diamond = BinaryMask::from_pixels(3, 3, &[(1, 0), (0, 1), (2, 1), (1, 2)]).unwrap();
        assert_eq!(diamond.fill_holes(Connectivity::Eight).area(), 5);
        assert_eq!(diamond.fill_holes(Connectivity::Four).area(), 4);
    }
}
