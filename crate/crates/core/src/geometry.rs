//! Rectangles, block kinds, directions and the five-way page location label.

use serde::{Deserialize, Serialize};

/// Axis-aligned rectangle, `y` grows downwards.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub x: f64,
    pub y: f64,
    pub w: f64,
    pub h: f64,
}

impl Rect {
    pub const fn new(x: f64, y: f64, w: f64, h: f64) -> Self {
        Self { x, y, w, h }
    }

    pub fn from_edges(left: f64, top: f64, right: f64, bottom: f64) -> Self {
        Self::new(left, top, right - left, bottom - top)
    }

    #[inline]
    pub fn left(&self) -> f64 {
        self.x
    }

    #[inline]
    pub fn top(&self) -> f64 {
        self.y
    }

    #[inline]
    pub fn right(&self) -> f64 {
        self.x + self.w
    }

    #[inline]
    pub fn bottom(&self) -> f64 {
        self.y + self.h
    }

    #[inline]
    pub fn cx(&self) -> f64 {
        self.x + self.w / 2.0
    }

    #[inline]
    pub fn cy(&self) -> f64 {
        self.y + self.h / 2.0
    }

    pub fn area(&self) -> f64 {
        self.w * self.h
    }

    /// Width over height.
    pub fn aspect(&self) -> f64 {
        self.w / self.h
    }

    pub fn union(&self, other: &Rect) -> Rect {
        Rect::from_edges(
            self.left().min(other.left()),
            self.top().min(other.top()),
            self.right().max(other.right()),
            self.bottom().max(other.bottom()),
        )
    }

    pub fn intersection(&self, other: &Rect) -> Option<Rect> {
        let l = self.left().max(other.left());
        let t = self.top().max(other.top());
        let r = self.right().min(other.right());
        let b = self.bottom().min(other.bottom());
        (r > l && b > t).then(|| Rect::from_edges(l, t, r, b))
    }

    /// True when the two rectangles share a region of positive area.
    pub fn overlaps(&self, other: &Rect) -> bool {
        self.intersection(other).is_some()
    }

    pub fn contains(&self, other: &Rect) -> bool {
        other.left() >= self.left()
            && other.top() >= self.top()
            && other.right() <= self.right()
            && other.bottom() <= self.bottom()
    }

    /// Interval covered along the axis perpendicular to `dir`.
    pub fn span_across(&self, dir: Direction) -> (f64, f64) {
        if dir.is_horizontal() {
            (self.top(), self.bottom())
        } else {
            (self.left(), self.right())
        }
    }

    /// Interval covered along the axis of `dir`.
    pub fn span_along(&self, dir: Direction) -> (f64, f64) {
        if dir.is_horizontal() {
            (self.left(), self.right())
        } else {
            (self.top(), self.bottom())
        }
    }

    /// Applies independent axis scalings followed by a translation.
    pub fn scaled(&self, sx: f64, sy: f64, dx: f64, dy: f64) -> Rect {
        Rect::new(self.x * sx + dx, self.y * sy + dy, self.w * sx, self.h * sy)
    }
}

/// Length of the overlap of two closed intervals, negative when disjoint.
#[inline]
pub fn interval_overlap(a: (f64, f64), b: (f64, f64)) -> f64 {
    a.1.min(b.1) - a.0.max(b.0)
}

/// Block content type.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Text,
    #[serde(rename = "nontext")]
    NonText,
}

impl Kind {
    pub fn code(self) -> u32 {
        match self {
            Kind::Text => 0,
            Kind::NonText => 1,
        }
    }

    pub fn from_code(code: u32) -> Option<Self> {
        match code {
            0 => Some(Kind::Text),
            1 => Some(Kind::NonText),
            _ => None,
        }
    }
}

/// The four neighbor directions. The discriminant is the slot index used
/// throughout neighbor tables and context keys.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Top = 0,
    Bottom = 1,
    Left = 2,
    Right = 3,
}

impl Direction {
    pub const ALL: [Direction; 4] = [
        Direction::Top,
        Direction::Bottom,
        Direction::Left,
        Direction::Right,
    ];

    #[inline]
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn opposite(self) -> Direction {
        match self {
            Direction::Top => Direction::Bottom,
            Direction::Bottom => Direction::Top,
            Direction::Left => Direction::Right,
            Direction::Right => Direction::Left,
        }
    }

    /// Left and right are horizontal directions.
    #[inline]
    pub fn is_horizontal(self) -> bool {
        matches!(self, Direction::Left | Direction::Right)
    }
}

/// Coarse position of a block on its page.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Location {
    Top,
    Bottom,
    Left,
    Right,
    Center,
}

impl Location {
    pub const ALL: [Location; 5] = [
        Location::Top,
        Location::Bottom,
        Location::Left,
        Location::Right,
        Location::Center,
    ];

    pub fn code(self) -> u32 {
        match self {
            Location::Top => 0,
            Location::Bottom => 1,
            Location::Left => 2,
            Location::Right => 3,
            Location::Center => 4,
        }
    }

    pub fn from_code(code: u32) -> Option<Self> {
        Self::ALL.get(code as usize).copied()
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "top" => Some(Location::Top),
            "bottom" => Some(Location::Bottom),
            "left" => Some(Location::Left),
            "right" => Some(Location::Right),
            "center" | "centre" => Some(Location::Center),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Location::Top => "top",
            Location::Bottom => "bottom",
            Location::Left => "left",
            Location::Right => "right",
            Location::Center => "center",
        }
    }
}

/// Page (or canvas) dimensions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PageDims {
    pub w: f64,
    pub h: f64,
}

impl PageDims {
    pub const fn new(w: f64, h: f64) -> Self {
        Self { w, h }
    }
}

/// Quantizes the centroid of `bbox` into one of five page locations.
///
/// The centroid is normalized to `[0,1]²`; the middle third in both axes is
/// `Center`, otherwise the label follows the axis of largest displacement
/// from the page center, with the vertical axis winning ties. Comparisons are
/// done on cross-multiplied values so uniform scaling cannot flip a label.
pub fn spatial_location(bbox: &Rect, page: PageDims) -> Location {
    // doubled centroid, so 2*cx in [0, 2w]
    let cx2 = 2.0 * bbox.x + bbox.w;
    let cy2 = 2.0 * bbox.y + bbox.h;
    let in_mid = |c2: f64, extent: f64| 3.0 * c2 >= 2.0 * extent && 3.0 * c2 <= 4.0 * extent;
    if in_mid(cx2, page.w) && in_mid(cy2, page.h) {
        return Location::Center;
    }
    // displacement from center, normalized: |c/extent - 1/2| = |2c - extent| / (2 extent)
    let du = (cx2 - page.w).abs() * page.h;
    let dv = (cy2 - page.h).abs() * page.w;
    if dv >= du {
        if cy2 < page.h {
            Location::Top
        } else {
            Location::Bottom
        }
    } else if cx2 < page.w {
        Location::Left
    } else {
        Location::Right
    }
}
