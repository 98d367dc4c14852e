//! Page raster processing: binarization, ruling removal, text/non-text
//! classification and adaptive run-length smoothing into layout blocks.

mod arlsa;
mod classify;
mod components;
mod otsu;
mod rulings;

pub use arlsa::{arlsa_blocks, ArlsaParams};
pub use classify::{avg_char_height, classify_text_nontext, close_square, ClassifyParams};
pub use components::{label_components, ComponentLabel, ConnectedComponent};
pub use otsu::{binarize_otsu, otsu_threshold, Threshold};
pub use rulings::{detect_rulings, remove_rulings, Orientation, Ruling, RulingParams};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Kind, PageDims, Rect};
use crate::graph::HorizontalLine;

/// 8-bit grayscale image, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayImage {
    width: u32,
    height: u32,
    pixels: Vec<u8>,
}

impl GrayImage {
    pub fn new(width: u32, height: u32, pixels: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 || pixels.len() != width as usize * height as usize {
            return Err(Error::InvalidDimensions { width, height });
        }
        Ok(Self { width, height, pixels })
    }

    pub fn filled(width: u32, height: u32, value: u8) -> Result<Self> {
        Self::new(width, height, vec![value; width as usize * height as usize])
    }

    /// Decodes PGM (P2/P5) or PNG bytes, converting to grayscale.
    pub fn decode(bytes: &[u8]) -> Result<Self> {
        let img = image::load_from_memory(bytes).map_err(|e| Error::Decode(e.to_string()))?;
        let luma = img.to_luma8();
        let (w, h) = luma.dimensions();
        Self::new(w, h, luma.into_raw())
    }

    /// Binary PGM (P5) encoding.
    pub fn to_pgm(&self) -> Vec<u8> {
        let mut out = format!("P5\n{} {}\n255\n", self.width, self.height).into_bytes();
        out.extend_from_slice(&self.pixels);
        out
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub fn get(&self, x: u32, y: u32) -> u8 {
        self.pixels[y as usize * self.width as usize + x as usize]
    }

    pub fn set(&mut self, x: u32, y: u32, v: u8) {
        self.pixels[y as usize * self.width as usize + x as usize] = v;
    }

    /// Paints an axis-aligned rectangle, clipped to the image.
    pub fn fill_rect(&mut self, x: i64, y: i64, w: i64, h: i64, v: u8) {
        let x0 = x.max(0) as u32;
        let y0 = y.max(0) as u32;
        let x1 = (x + w).clamp(0, self.width as i64) as u32;
        let y1 = (y + h).clamp(0, self.height as i64) as u32;
        for yy in y0..y1 {
            let row = yy as usize * self.width as usize;
            self.pixels[row + x0 as usize..row + x1 as usize].fill(v);
        }
    }
}

/// Foreground/background mask with the dimensions of its source image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryImage {
    width: u32,
    height: u32,
    pixels: Vec<bool>,
}

impl BinaryImage {
    pub fn new(width: u32, height: u32) -> Self {
        Self {
            width,
            height,
            pixels: vec![false; width as usize * height as usize],
        }
    }

    pub fn from_pixels(width: u32, height: u32, pixels: Vec<bool>) -> Result<Self> {
        if width == 0 || height == 0 || pixels.len() != width as usize * height as usize {
            return Err(Error::InvalidDimensions { width, height });
        }
        Ok(Self { width, height, pixels })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn pixels(&self) -> &[bool] {
        &self.pixels
    }

    #[inline]
    pub fn get(&self, x: u32, y: u32) -> bool {
        self.pixels[y as usize * self.width as usize + x as usize]
    }

    #[inline]
    pub fn set(&mut self, x: u32, y: u32, v: bool) {
        self.pixels[y as usize * self.width as usize + x as usize] = v;
    }

    pub fn foreground_count(&self) -> usize {
        self.pixels.iter().filter(|&&p| p).count()
    }

    /// Sets every pixel of the rectangle (clipped) to `v`.
    pub fn fill_rect(&mut self, rect: &Rect, v: bool) {
        let x0 = rect.left().max(0.0) as u32;
        let y0 = rect.top().max(0.0) as u32;
        let x1 = (rect.right().min(self.width as f64)).max(0.0) as u32;
        let y1 = (rect.bottom().min(self.height as f64)).max(0.0) as u32;
        for y in y0..y1 {
            let row = y as usize * self.width as usize;
            self.pixels[row + x0 as usize..row + x1 as usize].fill(v);
        }
    }
}

/// Output block of the raster stage, before any graph processing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawBlock {
    pub bbox: Rect,
    pub kind: Kind,
    /// Median height of member text components; zero for pure non-text blocks.
    pub ach_block: f64,
}

#[derive(Debug, Clone, Default)]
pub struct IngestParams {
    pub rulings: RulingParams,
    pub classify: ClassifyParams,
    pub arlsa: ArlsaParams,
}

/// Everything the raster stage hands to graph construction.
#[derive(Debug, Clone)]
pub struct PageSegmentation {
    pub page: PageDims,
    pub threshold: Threshold,
    pub ach_doc: f64,
    pub blocks: Vec<RawBlock>,
    pub lines: Vec<HorizontalLine>,
}

/// Full raster pipeline for one page.
///
/// A page without text components gets `ach_doc = 0`, which disables the
/// character-height based merges downstream.
pub fn segment_page(img: &GrayImage, params: &IngestParams) -> PageSegmentation {
    let (bin, threshold) = binarize_otsu(img);
    let rulings = detect_rulings(&bin, &params.rulings);
    let cleaned = remove_rulings(&bin, &rulings);
    let components = classify_text_nontext(&cleaned, &params.classify);
    let ach_doc = avg_char_height(&components).unwrap_or(0.0);
    let blocks = arlsa_blocks(&components, &params.arlsa);
    let lines = rulings
        .iter()
        .filter(|r| r.orientation == Orientation::Horizontal)
        .map(|r| HorizontalLine {
            y: r.span.cy(),
            x0: r.span.left(),
            x1: r.span.right(),
        })
        .collect();
    PageSegmentation {
        page: PageDims::new(img.width() as f64, img.height() as f64),
        threshold,
        ach_doc,
        blocks,
        lines,
    }
}

/// Median of a non-empty slice; mean of the middle pair for even lengths.
pub(crate) fn median(values: &mut [f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    values.sort_by(f64::total_cmp);
    let n = values.len();
    Some(if n % 2 == 1 {
        values[n / 2]
    } else {
        (values[n / 2 - 1] + values[n / 2]) / 2.0
    })
}
