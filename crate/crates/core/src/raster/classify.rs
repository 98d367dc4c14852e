use std::collections::HashMap;

use super::components::{label_with_map, ComponentLabel, ConnectedComponent};
use super::{median, BinaryImage};
use crate::error::{Error, Result};

/// Thresholds for text/non-text separation, all in units of the page's
/// estimated character height.
#[derive(Debug, Clone)]
pub struct ClassifyParams {
    /// Components taller than this are non-text.
    pub tall: f64,
    /// Fill density above which a large component counts as a solid region.
    pub solid_density: f64,
    /// Side of the square area a solid component must exceed.
    pub solid_side: f64,
    /// Side of the square closing element.
    pub close_side: f64,
    /// Side of the square area a closed cluster must exceed.
    pub cluster_side: f64,
    /// Members of a qualifying cluster must have a median height below this.
    pub cluster_member: f64,
}

impl Default for ClassifyParams {
    fn default() -> Self {
        Self {
            tall: 4.0,
            solid_density: 0.9,
            solid_side: 4.0,
            close_side: 2.0,
            cluster_side: 6.0,
            cluster_member: 0.5,
        }
    }
}

/// Labels every foreground component as text or non-text.
///
/// A component is non-text when it is tall, when it is a large solid blob,
/// or when the closing of the page merges it into a large region made of
/// sub-character-sized specks (halftone screens, dithered pictures).
pub fn classify_text_nontext(bin: &BinaryImage, params: &ClassifyParams) -> Vec<ConnectedComponent> {
    let (mut comps, _) = label_with_map(bin);
    if comps.is_empty() {
        return comps;
    }
    let ach = estimate_char_height(&comps);

    let solid_area = (params.solid_side * ach).powi(2);
    for c in comps.iter_mut() {
        let tall = c.bbox.h > params.tall * ach;
        let solid = c.density() > params.solid_density && c.bbox.area() > solid_area;
        c.label = if tall || solid {
            ComponentLabel::NonText
        } else {
            ComponentLabel::Text
        };
    }

    let side = (params.close_side * ach).round().max(1.0) as usize;
    let closed = close_square(bin, side);
    let (regions, region_map) = label_with_map(&closed);
    let mut members: HashMap<u32, Vec<usize>> = HashMap::new();
    for (i, c) in comps.iter().enumerate() {
        let idx = c.seed.1 as usize * bin.width() as usize + c.seed.0 as usize;
        members.entry(region_map[idx]).or_default().push(i);
    }
    let cluster_area = (params.cluster_side * ach).powi(2);
    for (region, idxs) in members {
        if region == u32::MAX || (regions[region as usize].pixel_count as f64) <= cluster_area {
            continue;
        }
        let mut hs: Vec<f64> = idxs.iter().map(|&i| comps[i].bbox.h).collect();
        let member_h = median(&mut hs).expect("non-empty");
        if member_h < params.cluster_member * ach {
            for i in idxs {
                comps[i].label = ComponentLabel::NonText;
            }
        }
    }
    comps
}

/// Median component height, ignoring specks below `MIN_GLYPH` pixels tall
/// unless nothing else is present.
fn estimate_char_height(comps: &[ConnectedComponent]) -> f64 {
    const MIN_GLYPH: f64 = 3.0;
    let mut hs: Vec<f64> = comps.iter().map(|c| c.bbox.h).filter(|&h| h >= MIN_GLYPH).collect();
    if hs.is_empty() {
        hs = comps.iter().map(|c| c.bbox.h).collect();
    }
    median(&mut hs).unwrap_or(1.0)
}

/// Median height of text components.
pub fn avg_char_height(components: &[ConnectedComponent]) -> Result<f64> {
    let mut hs: Vec<f64> = components
        .iter()
        .filter(|c| c.label == ComponentLabel::Text)
        .map(|c| c.bbox.h)
        .collect();
    median(&mut hs).ok_or(Error::NoTextContent)
}

/// Morphological closing with a `side`×`side` square, via box sums.
/// Pixels outside the image count as background for dilation and as
/// foreground for erosion, so closing never shrinks the input.
pub fn close_square(bin: &BinaryImage, side: usize) -> BinaryImage {
    let w = bin.width() as usize;
    let h = bin.height() as usize;
    let lo = (side - 1) / 2;
    let hi = side - 1 - lo;
    let dilated = box_filter(bin.pixels(), w, h, lo, hi, |count, _| count > 0, false);
    // erosion reflects the element
    let eroded = box_filter(&dilated, w, h, hi, lo, |count, area| count == area, true);
    BinaryImage::from_pixels(bin.width(), bin.height(), eroded).expect("same dimensions")
}

/// Applies `keep(count, window_area)` over the window `[x-lo, x+hi]` in both
/// axes. `outside` is the value assumed beyond the image border.
fn box_filter(
    px: &[bool],
    w: usize,
    h: usize,
    lo: usize,
    hi: usize,
    keep: impl Fn(u64, u64) -> bool,
    outside: bool,
) -> Vec<bool> {
    let pad = lo.max(hi);
    let pw = w + 2 * pad;
    let ph = h + 2 * pad;
    // integral image over the padded grid
    let mut sat = vec![0u64; (pw + 1) * (ph + 1)];
    for y in 0..ph {
        let mut row = 0u64;
        for x in 0..pw {
            let inside = x >= pad && x < pad + w && y >= pad && y < pad + h;
            let v = if inside {
                px[(y - pad) * w + (x - pad)]
            } else {
                outside
            };
            row += v as u64;
            sat[(y + 1) * (pw + 1) + x + 1] = sat[y * (pw + 1) + x + 1] + row;
        }
    }
    let area = ((lo + hi + 1) * (lo + hi + 1)) as u64;
    let mut out = vec![false; w * h];
    for y in 0..h {
        for x in 0..w {
            let (x0, y0) = (x + pad - lo, y + pad - lo);
            let (x1, y1) = (x + pad + hi + 1, y + pad + hi + 1);
            let s = sat[y1 * (pw + 1) + x1] + sat[y0 * (pw + 1) + x0]
                - sat[y0 * (pw + 1) + x1]
                - sat[y1 * (pw + 1) + x0];
            out[y * w + x] = keep(s, area);
        }
    }
    out
}
