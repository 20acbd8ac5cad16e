//! castseg: defect segmentation tooling for X-ray casting inspection.
//!
//! The crate covers the deterministic half of a detect-and-segment
//! workflow around an external instance-segmentation model:
//!
//! 1. **raster** – gray images, binary masks, connected components, crack-boundary
//!    polygon tracing and pixel-center polygon rasterization.
//! 2. **coco** – COCO dataset model, mask → COCO conversion, COCO → mask
//!    reconstruction, validation and seeded train/test split.
//! 3. **detections** – model-output interchange format, IoU, score filtering,
//!    non-maximum suppression, anchor grids and detection → mask reconstruction.
//! 4. **baseline** – Otsu automatic-threshold detector used as a built-in model.
//! 5. **metrics** – pixel-level precision / recall / F1, instance matching,
//!    iteration sweeps and plateau detection.
//! 6. **render** – overlay images with fill, box, label and confidence.
//!
//! [`config::RunConfig`] records the settings handed to the external trainer.

pub mod baseline;
pub mod coco;
pub mod config;
pub mod detections;
pub mod error;
pub mod metrics;
pub mod raster;
pub mod render;

mod json;

pub use error::{Error, Result, Violation};
