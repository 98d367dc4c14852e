use serde::{Deserialize, Serialize};

use super::components::label_components;
use super::{median, BinaryImage};
use crate::geometry::Rect;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    Horizontal,
    Vertical,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ruling {
    pub orientation: Orientation,
    pub span: Rect,
}

#[derive(Debug, Clone)]
pub struct RulingParams {
    /// Minimum length/thickness ratio.
    pub elongation: f64,
    /// Minimum length in units of the estimated character height.
    pub min_length_ach: f64,
    /// Shortest pixel run considered part of a line.
    pub min_run: u32,
}

impl Default for RulingParams {
    fn default() -> Self {
        Self {
            elongation: 20.0,
            min_length_ach: 10.0,
            min_run: 20,
        }
    }
}

/// Keeps only runs of at least `min_run` pixels along one axis.
fn long_runs(bin: &BinaryImage, min_run: u32, horizontal: bool) -> BinaryImage {
    let (w, h) = (bin.width(), bin.height());
    let mut out = BinaryImage::new(w, h);
    let (outer, inner) = if horizontal { (h, w) } else { (w, h) };
    let at = |o: u32, i: u32| if horizontal { (i, o) } else { (o, i) };
    for o in 0..outer {
        let mut i = 0;
        while i < inner {
            let (x, y) = at(o, i);
            if !bin.get(x, y) {
                i += 1;
                continue;
            }
            let start = i;
            while i < inner && {
                let (x, y) = at(o, i);
                bin.get(x, y)
            } {
                i += 1;
            }
            if i - start >= min_run {
                for k in start..i {
                    let (x, y) = at(o, k);
                    out.set(x, y, true);
                }
            }
        }
    }
    out
}

/// Finds horizontal and vertical rulings.
///
/// Candidates are components of the long-run masks whose length is at least
/// `elongation` times their thickness. The character height used for the
/// minimum-length rule is estimated from the components left after masking
/// the candidates out; with nothing left the length rule is vacuous.
pub fn detect_rulings(bin: &BinaryImage, params: &RulingParams) -> Vec<Ruling> {
    let mut candidates = Vec::new();
    for (horizontal, orientation) in [(true, Orientation::Horizontal), (false, Orientation::Vertical)] {
        let runs = long_runs(bin, params.min_run, horizontal);
        for cc in label_components(&runs) {
            let (len, thick) = if horizontal {
                (cc.bbox.w, cc.bbox.h)
            } else {
                (cc.bbox.h, cc.bbox.w)
            };
            if len >= params.elongation * thick {
                candidates.push(Ruling {
                    orientation,
                    span: cc.bbox,
                });
            }
        }
    }
    if candidates.is_empty() {
        return candidates;
    }

    let rest = remove_rulings(bin, &candidates);
    let mut heights: Vec<f64> = label_components(&rest).iter().map(|c| c.bbox.h).collect();
    let ach = median(&mut heights).unwrap_or(0.0);
    candidates.retain(|r| {
        let len = match r.orientation {
            Orientation::Horizontal => r.span.w,
            Orientation::Vertical => r.span.h,
        };
        len >= params.min_length_ach * ach
    });
    candidates
}

/// Clears every pixel inside the ruling spans; everything else is copied.
pub fn remove_rulings(bin: &BinaryImage, rulings: &[Ruling]) -> BinaryImage {
    let mut out = bin.clone();
    for r in rulings {
        out.fill_rect(&r.span, false);
    }
    out
}
