//! COCO dataset model: parsing, serialization, validation, mask conversion
//! and train/test splitting.

mod convert;
mod model;
mod split;

pub use convert::{annotation_mask, coco_to_masks, masks_to_coco, MaskEntry};
pub use model::{parse_coco, serialize_coco, validate, CocoAnnotation, CocoCategory, CocoDataset, CocoImage};
pub use split::{split_by_names, split_dataset, SplitMix64};
