//! Overlay rendering: the gray input expanded to RGB with each detection's
//! segmentation blended in, its box outlined and a `<name> <NN>%` label.

mod font;

use std::collections::BTreeMap;

use crate::detections::{detections_to_mask, Detection};
use crate::error::{Error, Result};
use crate::raster::{encode_png_rgb, GrayImage};

use font::{glyph, GLYPH_H, GLYPH_W};

/// Horizontal advance per character, including one column of spacing.
const ADVANCE: u32 = GLYPH_W + 1;
/// Label strip height: one pixel of padding above and below the glyphs.
const LABEL_H: u32 = GLYPH_H + 2;

pub type Rgb = [u8; 3];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OverlayStyle {
    /// Blend weight of `fill_color` over segmentation pixels, in `[0, 1]`.
    pub fill_opacity: f64,
    pub fill_color: Rgb,
    pub box_color: Rgb,
    pub text_color: Rgb,
}

impl Default for OverlayStyle {
    fn default() -> Self {
        Self {
            fill_opacity: 0.4,
            fill_color: [255, 0, 0],
            box_color: [255, 200, 0],
            text_color: [0, 0, 0],
        }
    }
}

/// Interleaved 8-bit RGB raster.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RgbImage {
    pub width: u32,
    pub height: u32,
    pub data: Vec<u8>,
}

impl RgbImage {
    pub fn from_gray(image: &GrayImage) -> Self {
        Self {
            width: image.width(),
            height: image.height(),
            data: image.data().iter().flat_map(|&v| [v, v, v]).collect(),
        }
    }

    pub fn get(&self, x: u32, y: u32) -> Rgb {
        let i = 3 * (y as usize * self.width as usize + x as usize);
        [self.data[i], self.data[i + 1], self.data[i + 2]]
    }

    fn put(&mut self, x: i64, y: i64, c: Rgb) {
        if x < 0 || y < 0 || x >= self.width as i64 || y >= self.height as i64 {
            return;
        }
        let i = 3 * (y as usize * self.width as usize + x as usize);
        self.data[i..i + 3].copy_from_slice(&c);
    }

    pub fn to_png(&self) -> Result<Vec<u8>> {
        encode_png_rgb(self.width, self.height, &self.data)
    }
}

/// `"<name> <pct>%"` with the score as a whole percentage, rounded half up.
pub fn label_text(name: &str, score: f64) -> String {
    // The nudge keeps decimal halves such as 0.715 from rounding down.
    let pct = (score * 100.0 + 0.5 + 1e-9).floor() as i64;
    format!("{name} {pct}%")
}

/// Draw detections over `image`.
///
/// Fills go first, then boxes, then labels, each in detection order.
/// Labels sit on a strip above the box, or below it when there is no room
/// above, and are shifted to stay inside the image. Category names default
/// to the numeric id when missing from `category_names`.
pub fn overlay(
    image: &GrayImage,
    detections: &[Detection],
    category_names: &BTreeMap<u64, String>,
    style: &OverlayStyle,
) -> Result<RgbImage> {
    if !(0.0..=1.0).contains(&style.fill_opacity) {
        return Err(Error::InvalidArgument(format!(
            "fill opacity {} outside [0,1]",
            style.fill_opacity
        )));
    }
    if let Some(first) = detections.first() {
        if let Some(other) = detections.iter().find(|d| d.image_id != first.image_id) {
            return Err(Error::InvalidArgument(format!(
                "detections span images {} and {}",
                first.image_id, other.image_id
            )));
        }
    }
    let (w, h) = (image.width(), image.height());
    let mut boxes = Vec::with_capacity(detections.len());
    for (i, d) in detections.iter().enumerate() {
        let [x, y, bw, bh] = d.bbox;
        if !(x >= 0.0 && y >= 0.0 && bw > 0.0 && bh > 0.0 && x + bw <= w as f64 && y + bh <= h as f64) {
            return Err(Error::OutOfBounds(format!(
                "detection {i} bbox [{x}, {y}, {bw}, {bh}] outside the {w}x{h} image"
            )));
        }
        boxes.push(pixel_box(&d.bbox));
    }

    let mut out = RgbImage::from_gray(image);
    let a = style.fill_opacity;
    for d in detections.iter().filter(|d| !d.segmentation.is_empty()) {
        let mask = detections_to_mask(std::slice::from_ref(d), w, h)?;
        for (x, y) in mask.pixels() {
            let src = out.get(x, y);
            let mut c = [0u8; 3];
            for k in 0..3 {
                c[k] = ((1.0 - a) * src[k] as f64 + a * style.fill_color[k] as f64).round() as u8;
            }
            out.put(x as i64, y as i64, c);
        }
    }

    for &(x0, y0, x1, y1) in &boxes {
        for x in x0..=x1 {
            out.put(x, y0, style.box_color);
            out.put(x, y1, style.box_color);
        }
        for y in y0..=y1 {
            out.put(x0, y, style.box_color);
            out.put(x1, y, style.box_color);
        }
    }

    for d in detections {
        let name = category_names
            .get(&d.category_id)
            .cloned()
            .unwrap_or_else(|| d.category_id.to_string());
        let text = label_text(&name, d.score);
        let rect = label_rect(&d.bbox, &text, w, h);
        draw_label(&mut out, rect, &text, style);
    }
    Ok(out)
}

/// Pixel box of a detection: `floor(x) ..= ceil(x + w) - 1`, likewise in y.
fn pixel_box(bbox: &[f64; 4]) -> (i64, i64, i64, i64) {
    let [x, y, bw, bh] = *bbox;
    let x0 = x.floor() as i64;
    let y0 = y.floor() as i64;
    let x1 = ((x + bw).ceil() as i64 - 1).max(x0);
    let y1 = ((y + bh).ceil() as i64 - 1).max(y0);
    (x0, y0, x1, y1)
}

/// Label strip `(x, y, width, height)` for `text` attached to `bbox` in a
/// `width`×`height` image. The strip may extend past the image when the
/// image is smaller than the strip; drawing clips it.
pub fn label_rect(bbox: &[f64; 4], text: &str, width: u32, height: u32) -> (i64, i64, i64, i64) {
    let (x0, y0, _, y1) = pixel_box(bbox);
    let lw = text.chars().count() as i64 * ADVANCE as i64 + 1;
    let lh = LABEL_H as i64;
    let lx = x0.min(width as i64 - lw).max(0);
    let ly = if y0 >= lh { y0 - lh } else { y1 + 1 };
    let ly = ly.min(height as i64 - lh).max(0);
    (lx, ly, lw, lh)
}

fn draw_label(out: &mut RgbImage, (lx, ly, lw, lh): (i64, i64, i64, i64), text: &str, style: &OverlayStyle) {
    for y in ly..ly + lh {
        for x in lx..lx + lw {
            out.put(x, y, style.box_color);
        }
    }
    for (i, c) in text.chars().enumerate() {
        let gx = lx + 1 + i as i64 * ADVANCE as i64;
        for (row, bits) in glyph(c).iter().enumerate() {
            for col in 0..GLYPH_W {
                if bits >> (GLYPH_W - 1 - col) & 1 == 1 {
                    out.put(gx + col as i64, ly + 1 + row as i64, style.text_color);
                }
            }
        }
    }
}
