use num_bigint::BigUint;
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;

use super::{BinaryImage, GrayImage};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Threshold {
    pub value: u8,
    /// Set when every threshold has zero between-class variance (a single
    /// distinct intensity); the whole image is then treated as background.
    pub degenerate: bool,
}

/// Between-class variance of a split, kept as the exact fraction
/// `(s0*n1 - s1*n0)^2 / (n0*n1)`. Scaling by `1/N^2` is common to every
/// split so it is dropped.
struct Variance {
    num: BigUint,
    den: BigUint,
}

impl Variance {
    fn zero() -> Self {
        Self {
            num: BigUint::from(0u32),
            den: BigUint::from(1u32),
        }
    }

    fn is_zero(&self) -> bool {
        self.num == BigUint::from(0u32)
    }

    fn cmp(&self, other: &Variance) -> Ordering {
        (&self.num * &other.den).cmp(&(&other.num * &self.den))
    }
}

/// Otsu threshold over a 256-bin histogram. Class 0 holds intensities `<= t`.
/// Ties resolve to the smallest optimal `t`.
pub fn otsu_threshold(hist: &[u64; 256]) -> Threshold {
    let total: u64 = hist.iter().sum();
    let total_sum: u128 = hist
        .iter()
        .enumerate()
        .map(|(i, &c)| i as u128 * c as u128)
        .sum();

    let mut best = Variance::zero();
    let mut best_t = 0u8;
    let mut n0: u64 = 0;
    let mut s0: u128 = 0;
    for (t, &count) in hist.iter().enumerate() {
        n0 += count;
        s0 += t as u128 * count as u128;
        let n1 = total - n0;
        if n0 == 0 || n1 == 0 {
            continue;
        }
        let s1 = total_sum - s0;
        let lhs = s0 * n1 as u128;
        let rhs = s1 * n0 as u128;
        let diff = BigUint::from(lhs.abs_diff(rhs));
        let v = Variance {
            num: &diff * &diff,
            den: BigUint::from(n0) * BigUint::from(n1),
        };
        if v.cmp(&best) == Ordering::Greater {
            best = v;
            best_t = t as u8;
        }
    }

    if best.is_zero() {
        // at most one populated bin
        let value = hist.iter().position(|&c| c > 0).unwrap_or(0) as u8;
        return Threshold {
            value,
            degenerate: true,
        };
    }
    Threshold {
        value: best_t,
        degenerate: false,
    }
}

/// Binarizes with Otsu's threshold. Dark-on-light polarity: pixels
/// `<= threshold` are foreground.
pub fn binarize_otsu(img: &GrayImage) -> (BinaryImage, Threshold) {
    let mut hist = [0u64; 256];
    for &p in img.pixels() {
        hist[p as usize] += 1;
    }
    let threshold = otsu_threshold(&hist);
    let pixels = if threshold.degenerate {
        vec![false; img.pixels().len()]
    } else {
        img.pixels().iter().map(|&p| p <= threshold.value).collect()
    };
    let bin = BinaryImage::from_pixels(img.width(), img.height(), pixels)
        .expect("dimensions come from a valid GrayImage");
    (bin, threshold)
}
