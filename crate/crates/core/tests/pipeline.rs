use castseg::baseline::{detect_defects, BaselineParams};
use castseg::coco::{masks_to_coco, parse_coco, serialize_coco, validate, MaskEntry};
use castseg::detections::{detections_to_mask, parse_detections, serialize_detections, validate_detections};
use castseg::raster::{connected_components, BinaryMask, Connectivity, GrayImage};
use proptest::prelude::*;

fn mask_strategy() -> impl Strategy<Value = BinaryMask> {
    (1u32..=20, 1u32..=20).prop_flat_map(|(w, h)| {
        proptest::collection::vec(any::<bool>(), (w * h) as usize)
            .prop_map(move |bits| BinaryMask::new(w, h, bits).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn converted_datasets_always_validate(masks in proptest::collection::vec(mask_strategy(), 1..5)) {
        let entries: Vec<MaskEntry> = masks
            .iter()
            .enumerate()
            .map(|(i, m)| MaskEntry { file_name: format!("{i}.png"), width: m.width(), height: m.height(), mask: m.clone() })
            .collect();
        let dataset = masks_to_coco(&entries, "defect").unwrap();
        prop_assert!(validate(&dataset).is_empty());
        let text = serialize_coco(&dataset).unwrap();
        prop_assert_eq!(serialize_coco(&parse_coco(&text).unwrap()).unwrap(), text);
    }

    /// Detector output is valid interchange JSON and each detection's
    /// polygon rasterizes back to its hole-filled blob.
    #[test]
    fn detections_round_trip_to_blobs(mask in mask_strategy(), lo in 0u8..100, hi in 150u8..=255) {
        let image = GrayImage::from_fn(mask.width(), mask.height(), |x, y| if mask.get(x, y) { hi } else { lo }).unwrap();
        let params = BaselineParams { min_area: 1, ..Default::default() };
        let set = detect_defects(&image, 1, &params);
        let text = serialize_detections(&set).unwrap();
        let parsed = parse_detections(&text).unwrap();
        prop_assert!(validate_detections(&parsed).is_empty());
        prop_assert_eq!(&parsed, &set);

        let blobs = connected_components(&mask, Connectivity::Eight);
        let uniform = mask.area() == 0 || mask.area() == (mask.width() * mask.height()) as usize;
        prop_assert_eq!(parsed.len(), if uniform { 0 } else { blobs.len() });
        for (det, blob) in parsed.detections.iter().zip(&blobs) {
            let raster = detections_to_mask(std::slice::from_ref(det), mask.width(), mask.height()).unwrap();
            let filled = BinaryMask::from_pixels(mask.width(), mask.height(), &blob.filled_pixels()).unwrap();
            prop_assert_eq!(raster, filled);
        }
    }
}
