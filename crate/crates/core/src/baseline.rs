//! Classical automatic-threshold detector.
//!
//! Otsu's threshold splits the histogram, connected components of the
//! foreground become detections, and a contrast ratio stands in for the
//! confidence a learned model would report. It lets the whole pipeline run
//! without any deep-learning runtime.

use num_bigint::BigUint;

use crate::detections::{Detection, DetectionSet};
use crate::error::{Error, Result};
use crate::raster::{connected_components, trace_boundary, BinaryMask, Connectivity, GrayImage};

/// Source label written into baseline detection sets.
pub const BASELINE_SOURCE: &str = "baseline-otsu";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BaselineParams {
    /// Components smaller than this many pixels are dropped. Values below 1 act as 1.
    pub min_area: usize,
    pub connectivity: Connectivity,
    /// Look for dark defects (intensity `<= t`) instead of bright ones (`> t`).
    pub invert: bool,
}

impl Default for BaselineParams {
    fn default() -> Self {
        Self {
            min_area: 3,
            connectivity: Connectivity::Eight,
            invert: false,
        }
    }
}

/// Otsu's threshold: the level `t` maximizing the between-class variance
/// `ω0(t)·ω1(t)·(μ0(t) − μ1(t))²` of the split `{≤ t} | {> t}`.
///
/// Ties go to the smallest `t`; a histogram with a single occupied level has
/// zero variance everywhere and yields 0. The comparison is exact: with
/// `n0, s0` the count and intensity sum below the cut and `N, S` the totals,
/// the variance is proportional to `(N·s0 − n0·S)² / (n0·n1)`, which is
/// compared by cross-multiplication in big integers.
pub fn otsu_threshold(histogram: &[u64; 256]) -> Result<u8> {
    let total: u128 = histogram.iter().map(|&c| c as u128).sum();
    if total == 0 {
        return Err(Error::InvalidArgument("histogram is empty".into()));
    }
    let sum: u128 = histogram.iter().enumerate().map(|(i, &c)| i as u128 * c as u128).sum();

    let mut best_t = 0u8;
    let mut best_num = BigUint::from(0u32);
    let mut best_den = BigUint::from(1u32);
    let (mut n0, mut s0) = (0u128, 0u128);
    for (t, &count) in histogram.iter().enumerate() {
        n0 += count as u128;
        s0 += t as u128 * count as u128;
        let n1 = total - n0;
        if n0 == 0 || n1 == 0 {
            continue;
        }
        let lhs = BigUint::from(total) * BigUint::from(s0);
        let rhs = BigUint::from(n0) * BigUint::from(sum);
        let diff = if lhs >= rhs { lhs - rhs } else { rhs - lhs };
        let num = &diff * &diff;
        let den = BigUint::from(n0) * BigUint::from(n1);
        if &num * &best_den > &best_num * &den {
            best_t = t as u8;
            best_num = num;
            best_den = den;
        }
    }
    Ok(best_t)
}

/// Threshold `image` at its Otsu level and report every large-enough
/// connected blob as a defect of category 1.
///
/// The score is the blob's normalized contrast against the threshold:
/// `(mean − t) / (255 − t)` for bright defects, `(t − mean) / t` for dark
/// ones, clamped to `[0, 1]`. Images with fewer than two distinct
/// intensities have no foreground and yield an empty set.
pub fn detect_defects(image: &GrayImage, image_id: u64, params: &BaselineParams) -> DetectionSet {
    let hist = image.histogram();
    let mut set = DetectionSet::new(BASELINE_SOURCE, Vec::new());
    if hist.iter().filter(|&&c| c > 0).count() < 2 {
        return set;
    }
    let t = otsu_threshold(&hist).expect("non-empty image");
    let mask = foreground(image, t, params.invert);

    for component in connected_components(&mask, params.connectivity) {
        if component.area() < params.min_area.max(1) {
            continue;
        }
        let mean = component
            .pixels
            .iter()
            .map(|&(x, y)| image.get(x, y) as f64)
            .sum::<f64>()
            / component.area() as f64;
        let (num, den) = if params.invert {
            (t as f64 - mean, t as f64)
        } else {
            (mean - t as f64, 255.0 - t as f64)
        };
        let score = if den > 0.0 { (num / den).clamp(0.0, 1.0) } else { 1.0 };
        set.detections.push(Detection {
            image_id,
            category_id: 1,
            score,
            bbox: component.bbox.to_array(),
            segmentation: vec![trace_boundary(&component).to_flat()],
        });
    }
    set
}

/// Foreground at threshold `t`: `> t`, or `<= t` when inverted.
pub fn foreground(image: &GrayImage, t: u8, invert: bool) -> BinaryMask {
    BinaryMask::from_fn(image.width(), image.height(), |x, y| {
        let v = image.get(x, y);
        if invert {
            v <= t
        } else {
            v > t
        }
    })
    .expect("same dimensions as a valid image")
}
