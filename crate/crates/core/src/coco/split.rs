//! Whole-image train/test split.

use std::collections::HashSet;

use super::model::CocoDataset;
use crate::error::{Error, Result};

/// SplitMix64 (Steele, Lea & Flood 2014).
///
/// ```text
/// state += 0x9E3779B97F4A7C15
/// z = state
/// z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
/// z = (z ^ (z >> 27)) * 0x94D049BB133111EB
/// return z ^ (z >> 31)
/// ```
///
/// All arithmetic wraps modulo 2^64. The shuffle in [`split_dataset`] draws
/// `next_u64() % (i + 1)` for `i` from `n-1` down to 1 (Fisher–Yates), so any
/// implementation of these few lines reproduces the same split.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = (self.next_u64() % (i as u64 + 1)) as usize;
            items.swap(i, j);
        }
    }
}

/// Shuffle images (taken in id order) with a seeded SplitMix64 and put the
/// first `n_train` into the training set. Annotations follow their image;
/// categories are copied to both sides.
pub fn split_dataset(dataset: &CocoDataset, n_train: usize, seed: u64) -> Result<(CocoDataset, CocoDataset)> {
    if n_train > dataset.images.len() {
        return Err(Error::InvalidArgument(format!(
            "train count {n_train} exceeds {} images",
            dataset.images.len()
        )));
    }
    let mut ids: Vec<u64> = dataset.images.iter().map(|im| im.id).collect();
    ids.sort_unstable();
    SplitMix64::new(seed).shuffle(&mut ids);
    let train: HashSet<u64> = ids[..n_train].iter().copied().collect();
    Ok(partition(dataset, &train))
}

/// Split by explicit training file names; every other image goes to test.
pub fn split_by_names(dataset: &CocoDataset, train_names: &[String]) -> Result<(CocoDataset, CocoDataset)> {
    let mut train = HashSet::new();
    for name in train_names {
        let image = dataset
            .image_by_name(name)
            .ok_or_else(|| Error::InvalidArgument(format!("no image named {name:?}")))?;
        train.insert(image.id);
    }
    Ok(partition(dataset, &train))
}

fn partition(dataset: &CocoDataset, train_ids: &HashSet<u64>) -> (CocoDataset, CocoDataset) {
    let side = |keep: bool| {
        let mut out = CocoDataset {
            images: dataset
                .images
                .iter()
                .filter(|im| train_ids.contains(&im.id) == keep)
                .cloned()
                .collect(),
            categories: dataset.categories.clone(),
            annotations: dataset
                .annotations
                .iter()
                .filter(|a| train_ids.contains(&a.image_id) == keep)
                .cloned()
                .collect(),
        };
        out = out.sorted();
        out
    };
    (side(true), side(false))
}
