use serde::{Deserialize, Serialize};

use super::BinaryImage;
use crate::geometry::Rect;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ComponentLabel {
    Text,
    #[serde(rename = "nontext")]
    NonText,
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConnectedComponent {
    pub bbox: Rect,
    pub pixel_count: u64,
    pub label: ComponentLabel,
    /// First pixel of the component in raster order.
    pub seed: (u32, u32),
}

impl ConnectedComponent {
    pub fn height(&self) -> f64 {
        self.bbox.h
    }

    pub fn density(&self) -> f64 {
        self.pixel_count as f64 / self.bbox.area()
    }
}

/// 8-connected component labeling. Components come out in raster order of
/// their first pixel, all labeled `Unknown`.
pub fn label_components(bin: &BinaryImage) -> Vec<ConnectedComponent> {
    label_with_map(bin).0
}

/// Like [`label_components`], also returning the per-pixel component index
/// (`u32::MAX` for background).
pub(crate) fn label_with_map(bin: &BinaryImage) -> (Vec<ConnectedComponent>, Vec<u32>) {
    let w = bin.width() as usize;
    let h = bin.height() as usize;
    let px = bin.pixels();
    let mut map = vec![u32::MAX; w * h];
    let mut out = Vec::new();
    let mut stack = Vec::new();

    for start in 0..w * h {
        if !px[start] || map[start] != u32::MAX {
            continue;
        }
        let id = out.len() as u32;
        map[start] = id;
        stack.push(start);
        let (mut x0, mut y0, mut x1, mut y1) = (usize::MAX, usize::MAX, 0usize, 0usize);
        let mut count = 0u64;
        while let Some(p) = stack.pop() {
            let (x, y) = (p % w, p / w);
            count += 1;
            x0 = x0.min(x);
            y0 = y0.min(y);
            x1 = x1.max(x);
            y1 = y1.max(y);
            let xs = x.saturating_sub(1)..=(x + 1).min(w - 1);
            for ny in y.saturating_sub(1)..=(y + 1).min(h - 1) {
                for nx in xs.clone() {
                    let q = ny * w + nx;
                    if px[q] && map[q] == u32::MAX {
                        map[q] = id;
                        stack.push(q);
                    }
                }
            }
        }
        out.push(ConnectedComponent {
            bbox: Rect::new(
                x0 as f64,
                y0 as f64,
                (x1 - x0 + 1) as f64,
                (y1 - y0 + 1) as f64,
            ),
            pixel_count: count,
            label: ComponentLabel::Unknown,
            seed: ((start % w) as u32, (start / w) as u32),
        });
    }
    (out, map)
}
