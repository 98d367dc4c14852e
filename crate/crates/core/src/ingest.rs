//! Entry points that turn an input page (image or block annotation) into the
//! four hypothesis graphs the store indexes.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Kind, PageDims, Rect};
use crate::graph::{build_all_hypotheses, GraphParams, HorizontalLine, LayoutGraph, SourceMeta};
use crate::raster::{segment_page, GrayImage, IngestParams, RawBlock};

/// Raster and graph tunables together.
#[derive(Debug, Clone, Default)]
pub struct PipelineParams {
    pub raster: IngestParams,
    pub graph: GraphParams,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnotatedBlock {
    pub x: f64,
    pub y: f64,
    pub w: f64,
    pub h: f64,
    pub kind: Kind,
    /// Median character height of the block's text; 0 for non-text.
    #[serde(default)]
    pub ach_block: f64,
}

/// Pre-segmented page: what `ingest` writes and what `--blocks` and
/// `POST /documents` accept in place of an image.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockAnnotation {
    pub doc_id: String,
    pub page: PageDims,
    /// Document character height; derived from the text blocks when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ach_doc: Option<f64>,
    pub blocks: Vec<AnnotatedBlock>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub lines: Vec<HorizontalLine>,
}

impl BlockAnnotation {
    pub fn from_segmentation(doc_id: &str, seg: &crate::raster::PageSegmentation) -> Self {
        Self {
            doc_id: doc_id.to_string(),
            page: seg.page,
            ach_doc: Some(seg.ach_doc),
            blocks: seg
                .blocks
                .iter()
                .map(|b| AnnotatedBlock {
                    x: b.bbox.x,
                    y: b.bbox.y,
                    w: b.bbox.w,
                    h: b.bbox.h,
                    kind: b.kind,
                    ach_block: b.ach_block,
                })
                .collect(),
            lines: seg.lines.clone(),
        }
    }

    fn raw_blocks(&self) -> Result<Vec<RawBlock>> {
        let ok = |v: f64| v.is_finite();
        if !(self.page.w > 0.0 && self.page.h > 0.0 && ok(self.page.w) && ok(self.page.h)) {
            return Err(Error::InvalidGraph("page dimensions must be positive".into()));
        }
        if self.doc_id.is_empty() {
            return Err(Error::InvalidGraph("empty doc_id".into()));
        }
        self.blocks
            .iter()
            .enumerate()
            .map(|(i, b)| {
                if !(ok(b.x) && ok(b.y) && b.w > 0.0 && b.h > 0.0 && ok(b.w) && ok(b.h) && b.ach_block >= 0.0) {
                    return Err(Error::InvalidGraph(format!("block {i} has no area")));
                }
                Ok(RawBlock {
                    bbox: Rect::new(b.x, b.y, b.w, b.h),
                    kind: b.kind,
                    ach_block: b.ach_block,
                })
            })
            .collect()
    }

    /// Explicit `ach_doc`, else the median `ach_block` of text blocks that
    /// carry one, else 0.
    pub fn effective_ach(&self) -> f64 {
        if let Some(a) = self.ach_doc {
            return a;
        }
        let mut hs: Vec<f64> = self
            .blocks
            .iter()
            .filter(|b| b.kind == Kind::Text && b.ach_block > 0.0)
            .map(|b| b.ach_block)
            .collect();
        crate::raster::median(&mut hs).unwrap_or(0.0)
    }
}

/// Builds the hypothesis graphs of an annotated page.
pub fn ingest_annotation(ann: &BlockAnnotation, params: &GraphParams) -> Result<Vec<LayoutGraph>> {
    let raw = ann.raw_blocks()?;
    Ok(build_all_hypotheses(
        &ann.doc_id,
        &raw,
        &ann.lines,
        ann.page,
        ann.effective_ach(),
        params,
    ))
}

/// Segments an image and builds its hypothesis graphs.
pub fn ingest_image(doc_id: &str, img: &GrayImage, params: &PipelineParams) -> Result<(Vec<LayoutGraph>, SourceMeta)> {
    let seg = segment_page(img, &params.raster);
    let ann = BlockAnnotation::from_segmentation(doc_id, &seg);
    let graphs = ingest_annotation(&ann, &params.graph)?;
    let meta = SourceMeta {
        kind: "image".into(),
        threshold: Some(seg.threshold.value),
    };
    Ok((graphs, meta))
}

pub fn annotation_meta() -> SourceMeta {
    SourceMeta {
        kind: "annotation".into(),
        threshold: None,
    }
}

/// Either input form, as decided by [`sniff_input`].
#[derive(Debug)]
pub enum PageInput {
    Image(GrayImage),
    Annotation(BlockAnnotation),
}

/// Classifies raw upload bytes: JSON objects are annotations, anything else
/// must decode as an image.
pub fn sniff_input(bytes: &[u8]) -> Result<PageInput> {
    let first = bytes.iter().find(|b| !b.is_ascii_whitespace());
    match first {
        None => Err(Error::Decode("empty input".into())),
        Some(b'{') => Ok(PageInput::Annotation(serde_json::from_slice(bytes)?)),
        Some(_) => Ok(PageInput::Image(GrayImage::decode(bytes)?)),
    }
}
