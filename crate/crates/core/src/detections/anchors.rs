use crate::error::{Error, Result};

/// Side lengths in grid-cell units.
pub const DEFAULT_SCALES: [f64; 3] = [1.0, 2.0, 4.0];

/// Width / height ratios.
pub const DEFAULT_RATIOS: [f64; 3] = [0.5, 1.0, 2.0];

/// Reference box centred on a grid cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Anchor {
    pub cx: f64,
    pub cy: f64,
    pub scale: f64,
    pub aspect_ratio: f64,
    /// The box reaches past the grid extent. Anchors are never clipped.
    pub crosses_boundary: bool,
}

impl Anchor {
    /// `[x, y, w, h]` with `w = s·√r`, `h = s/√r`, so `w·h = s²`.
    pub fn bbox(&self) -> [f64; 4] {
        let root = self.aspect_ratio.sqrt();
        let w = self.scale * root;
        let h = self.scale / root;
        [self.cx - w / 2.0, self.cy - h / 2.0, w, h]
    }
}

/// One anchor per (cell, scale, ratio), cells in raster order.
///
/// The count is `width × height × |scales| × |ratios|`, i.e. nine per cell
/// for the default three scales and three ratios.
pub fn generate_anchors(width: u32, height: u32, scales: &[f64], ratios: &[f64]) -> Result<Vec<Anchor>> {
    if scales.is_empty() || ratios.is_empty() {
        return Err(Error::InvalidArgument("scales and ratios must be non-empty".into()));
    }
    if let Some(s) = scales.iter().find(|s| !(s.is_finite() && **s > 0.0)) {
        return Err(Error::InvalidArgument(format!(
            "anchor scale must be positive, got {s}"
        )));
    }
    if let Some(r) = ratios.iter().find(|r| !(r.is_finite() && **r > 0.0)) {
        return Err(Error::InvalidArgument(format!(
            "aspect ratio must be positive, got {r}"
        )));
    }

    let mut out = Vec::with_capacity(width as usize * height as usize * scales.len() * ratios.len());
    for y in 0..height {
        for x in 0..width {
            for &scale in scales {
                for &aspect_ratio in ratios {
                    let mut anchor = Anchor {
                        cx: x as f64 + 0.5,
                        cy: y as f64 + 0.5,
                        scale,
                        aspect_ratio,
                        crosses_boundary: false,
                    };
                    let [bx, by, bw, bh] = anchor.bbox();
                    anchor.crosses_boundary = bx < 0.0 || by < 0.0 || bx + bw > width as f64 || by + bh > height as f64;
                    out.push(anchor);
                }
            }
        }
    }
    Ok(out)
}
