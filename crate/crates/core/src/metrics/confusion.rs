use std::ops::{Add, AddAssign};

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::raster::BinaryMask;

/// Pixel counts of a prediction/ground-truth comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Confusion {
    pub tp: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
    pub tn: u64,
}

impl Confusion {
    pub fn total(&self) -> u64 {
        self.tp + self.fp + self.fn_ + self.tn
    }

    pub fn scores(&self) -> Scores {
        let p = precision(self);
        let r = recall(self);
        Scores {
            precision: p,
            recall: r,
            f1: f1(p, r),
        }
    }
}

impl Add for Confusion {
    type Output = Confusion;

    fn add(self, o: Confusion) -> Confusion {
        Confusion {
            tp: self.tp + o.tp,
            fp: self.fp + o.fp,
            fn_: self.fn_ + o.fn_,
            tn: self.tn + o.tn,
        }
    }
}

impl AddAssign for Confusion {
    fn add_assign(&mut self, o: Confusion) {
        *self = *self + o;
    }
}

impl std::iter::Sum for Confusion {
    fn sum<I: Iterator<Item = Confusion>>(iter: I) -> Confusion {
        iter.fold(Confusion::default(), Add::add)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scores {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

/// Compare a predicted mask with the ground-truth mask of the same size.
pub fn pixel_confusion(pred: &BinaryMask, gt: &BinaryMask) -> Result<Confusion> {
    pred.check_same_size(gt)?;
    let mut c = Confusion::default();
    for (&p, &g) in pred.data().iter().zip(gt.data()) {
        match (p, g) {
            (true, true) => c.tp += 1,
            (true, false) => c.fp += 1,
            (false, true) => c.fn_ += 1,
            (false, false) => c.tn += 1,
        }
    }
    Ok(c)
}

/// `tp / (tp + fp)`.
///
/// With nothing predicted the ratio is 0/0: it scores 1.0 when the ground
/// truth is empty too (perfect agreement) and 0.0 otherwise.
pub fn precision(c: &Confusion) -> f64 {
    if c.tp + c.fp == 0 {
        return if c.fn_ == 0 { 1.0 } else { 0.0 };
    }
    c.tp as f64 / (c.tp + c.fp) as f64
}

/// `tp / (tp + fn)`, with the mirrored 0/0 rule: 1.0 when nothing was
/// predicted either, 0.0 when only false positives exist.
pub fn recall(c: &Confusion) -> f64 {
    if c.tp + c.fn_ == 0 {
        return if c.fp == 0 { 1.0 } else { 0.0 };
    }
    c.tp as f64 / (c.tp + c.fn_) as f64
}

/// Harmonic mean `2PR / (P + R)`; 0 when `P + R == 0`.
pub fn f1(precision: f64, recall: f64) -> f64 {
    if precision + recall == 0.0 {
        return 0.0;
    }
    2.0 * precision * recall / (precision + recall)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(tp: u64, fp: u64, fn_: u64) -> Confusion {
        Confusion { tp, fp, fn_, tn: 0 }
    }

    #[test]
    fn confusion_examples() {
        let gt = BinaryMask::from_fn(8, 8, |x, y| y == 0 && x < 8 || y == 1 && x < 2).unwrap();
        assert_eq!(
            pixel_confusion(&gt, &gt).unwrap(),
            Confusion {
                tp: 10,
                fp: 0,
                fn_: 0,
                tn: 54
            }
        );

        let gt5 = BinaryMask::from_fn(8, 8, |x, y| y == 0 && x < 5).unwrap();
        let none = BinaryMask::empty(8, 8).unwrap();
        let cm = pixel_confusion(&none, &gt5).unwrap();
        assert_eq!((cm.tp, cm.fn_), (0, 5));

        let pred = BinaryMask::from_pixels(2, 2, &[(0, 0), (1, 0)]).unwrap();
        let gt = BinaryMask::from_pixels(2, 2, &[(1, 0), (1, 1)]).unwrap();
        assert_eq!(
            pixel_confusion(&pred, &gt).unwrap(),
            Confusion {
                tp: 1,
                fp: 1,
                fn_: 1,
                tn: 1
            }
        );

        assert!(pixel_confusion(&pred, &BinaryMask::empty(3, 2).unwrap()).is_err());
    }

    #[test]
    fn ratio_examples() {
        assert_eq!(precision(&c(8, 2, 0)), 0.8);
        assert_eq!(precision(&c(0, 0, 0)), 1.0);
        assert_eq!(precision(&c(0, 0, 3)), 0.0);
        assert_eq!(recall(&c(6, 0, 2)), 0.75);
        assert_eq!(recall(&c(0, 0, 0)), 1.0);
        assert_eq!(recall(&c(5, 0, 0)), 1.0);
        assert_eq!(recall(&c(0, 4, 0)), 0.0);
        assert_eq!(f1(1.0, 0.0), 0.0);
        assert_eq!(f1(0.0, 0.0), 0.0);
        assert!((f1(0.5, 1.0) - 2.0 / 3.0).abs() < 1e-15);
        for i in 0..=100 {
            let x = i as f64 / 100.0;
            assert!((f1(x, x) - x).abs() < 1e-15);
        }
    }

    proptest! {
        #[test]
        fn ratio_bounds(tp in 0u64..1000, fp in 0u64..1000, fn_ in 0u64..1000) {
            let s = c(tp, fp, fn_).scores();
            for v in [s.precision, s.recall, s.f1] {
                prop_assert!((0.0..=1.0).contains(&v));
            }
            if s.precision > 0.0 && s.recall > 0.0 {
                prop_assert!(s.f1 <= s.precision.max(s.recall) + 1e-15);
                prop_assert!(s.f1 >= s.precision.min(s.recall) - 1e-15);
            }
        }

        #[test]
        fn swap_exchanges_precision_and_recall(a in proptest::collection::vec(any::<bool>(), 36), b in proptest::collection::vec(any::<bool>(), 36)) {
            let pa = BinaryMask::new(6, 6, a).unwrap();
            let pb = BinaryMask::new(6, 6, b).unwrap();
            let ab = pixel_confusion(&pa, &pb).unwrap();
            let ba = pixel_confusion(&pb, &pa).unwrap();
            prop_assert_eq!(ab.total(), 36);
            prop_assert_eq!((ab.fp, ab.fn_), (ba.fn_, ba.fp));
            prop_assert_eq!(precision(&ab), recall(&ba));
            prop_assert_eq!(recall(&ab), precision(&ba));
        }
    }
}
