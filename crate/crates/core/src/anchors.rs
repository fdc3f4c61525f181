//! Multi-scale square anchors and their training labels.
//!
//! Anchor centers sit on the feature-map lattice `(i·stride, j·stride)` of
//! each level; every lattice point carries one square per size multiplier.
//! With the default strides `{8, 16, 32, 64}` and multipliers
//! `{2, 2.5, 3, 3.5}` the side lengths run from 16 to 224 pixels.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::geom::{point_in_polygon, Point, Polygon};
use crate::maskgrid::ScoreGrid;

pub const DEFAULT_STRIDES: [u32; 4] = [8, 16, 32, 64];
pub const DEFAULT_K_SET: [f64; 4] = [2.0, 2.5, 3.0, 3.5];

/// Largest anchor side, relative to the ground-truth height, that may still
/// be labeled positive.
pub const MAX_SIDE_TO_HEIGHT: f64 = 1.8;

/// Score of the inner (strong) text region in segment labels.
pub const STRONG_SCORE: f32 = 1.0;
/// Score of the outer (weak) text region in segment labels.
pub const WEAK_SCORE: f32 = 0.1;
/// Fraction of the ground-truth area treated as the strong region.
pub const STRONG_AREA_FRACTION: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SquareAnchor {
    pub cx: f64,
    pub cy: f64,
    pub side: f64,
    /// Index into the stride list.
    pub level: usize,
    pub i: usize,
    pub j: usize,
    /// Index into the size multipliers of this level.
    pub k_index: usize,
}

impl SquareAnchor {
    pub fn center(&self) -> Point {
        Point::new(self.cx, self.cy)
    }

    pub fn top_left(&self) -> Point {
        Point::new(self.cx - self.side / 2.0, self.cy - self.side / 2.0)
    }

    /// Corners as `[top-left, top-right, bottom-right, bottom-left]`.
    pub fn corners(&self) -> [Point; 4] {
        let h = self.side / 2.0;
        [
            Point::new(self.cx - h, self.cy - h),
            Point::new(self.cx + h, self.cy - h),
            Point::new(self.cx + h, self.cy + h),
            Point::new(self.cx - h, self.cy + h),
        ]
    }

    pub fn to_polygon(&self) -> Polygon {
        let h = self.side / 2.0;
        Polygon::rect(self.cx - h, self.cy - h, self.cx + h, self.cy + h)
            .expect("anchor sides are positive")
    }
}

/// Strides and size multipliers defining the anchor inventory.
#[derive(Debug, Clone, PartialEq)]
pub struct AnchorSpec {
    pub strides: Vec<u32>,
    pub k_set: Vec<f64>,
}

impl Default for AnchorSpec {
    fn default() -> Self {
        Self {
            strides: DEFAULT_STRIDES.to_vec(),
            k_set: DEFAULT_K_SET.to_vec(),
        }
    }
}

impl AnchorSpec {
    pub fn new(strides: Vec<u32>, k_set: Vec<f64>) -> Result<Self> {
        if strides.is_empty() || strides.contains(&0) {
            return Err(Error::InvalidInput(format!("invalid strides {strides:?}")));
        }
        if k_set.is_empty() || k_set.iter().any(|k| !(*k > 0.0 && k.is_finite())) {
            return Err(Error::InvalidInput(format!("invalid size multipliers {k_set:?}")));
        }
        Ok(Self { strides, k_set })
    }

    pub fn levels(&self) -> usize {
        self.strides.len()
    }

    pub fn stride(&self, level: usize) -> Result<f64> {
        self.strides
            .get(level)
            .map(|&s| f64::from(s))
            .ok_or_else(|| Error::InvalidInput(format!("level {level} out of range")))
    }

    /// Side lengths grouped by level: `stride × k` for each multiplier.
    pub fn side_lengths(&self) -> Vec<Vec<f64>> {
        self.strides
            .iter()
            .map(|&s| self.k_set.iter().map(|k| f64::from(s) * k).collect())
            .collect()
    }

    /// Feature-map size of a level for an image of the given size.
    pub fn feature_size(&self, level: usize, image_w: u32, image_h: u32) -> Result<(usize, usize)> {
        let s = self.strides.get(level).copied().ok_or_else(|| {
            Error::InvalidInput(format!("level {level} out of range"))
        })?;
        Ok((image_w.div_ceil(s) as usize, image_h.div_ceil(s) as usize))
    }

    /// `w × h × |k_set|` anchors of one level, row-major over the lattice with
    /// the sizes innermost.
    pub fn grid_anchors(&self, level: usize, w: usize, h: usize) -> Result<Vec<SquareAnchor>> {
        let stride = self.stride(level)?;
        let mut out = Vec::with_capacity(w * h * self.k_set.len());
        for j in 0..h {
            for i in 0..w {
                for (k_index, k) in self.k_set.iter().enumerate() {
                    out.push(SquareAnchor {
                        cx: i as f64 * stride,
                        cy: j as f64 * stride,
                        side: stride * k,
                        level,
                        i,
                        j,
                        k_index,
                    });
                }
            }
        }
        Ok(out)
    }

    /// Every anchor of every level for an image of the given size.
    pub fn image_anchors(&self, image_w: u32, image_h: u32) -> Vec<SquareAnchor> {
        let mut out = Vec::new();
        for level in 0..self.levels() {
            let (w, h) = self.feature_size(level, image_w, image_h).expect("level in range");
            out.extend(self.grid_anchors(level, w, h).expect("level in range"));
        }
        out
    }
}

/// Side lengths of the default inventory, grouped by level.
pub fn side_lengths() -> Vec<Vec<f64>> {
    AnchorSpec::default().side_lengths()
}

/// Anchors of one level of the default inventory.
pub fn grid_anchors(level: usize, w: usize, h: usize) -> Result<Vec<SquareAnchor>> {
    AnchorSpec::default().grid_anchors(level, w, h)
}

/// Height of a ground-truth text polygon.
///
/// A 14-vertex polygon is read as 7 top vertices followed by 7 bottom
/// vertices in reverse, and its height is the mean distance between paired
/// top/bottom vertices. Any other polygon uses its bounding-box height.
pub fn polygon_height(gt: &Polygon) -> f64 {
    let v = gt.vertices();
    if v.len() == 14 {
        (0..7).map(|i| v[i].distance(v[13 - i])).sum::<f64>() / 7.0
    } else {
        gt.bbox().height()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Label {
    Positive,
    Negative,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnchorLabel {
    pub anchor: SquareAnchor,
    pub label: Label,
    /// Index of the first ground truth for which the anchor is positive.
    pub matched_gt: Option<usize>,
}

impl AnchorLabel {
    pub fn is_positive(&self) -> bool {
        self.label == Label::Positive
    }
}

/// Whether `a` is a positive anchor for `gt`.
///
/// The center must lie inside the polygon and the side must not exceed
/// [`MAX_SIDE_TO_HEIGHT`] times the polygon height. In addition the square
/// must span the text vertically: at least one top corner and at least one
/// bottom corner fall outside the polygon.
pub fn is_positive_for(a: &SquareAnchor, gt: &Polygon) -> bool {
    if !point_in_polygon(a.center(), gt) || a.side > MAX_SIDE_TO_HEIGHT * polygon_height(gt) {
        return false;
    }
    let [tl, tr, br, bl] = a.corners();
    let outside = |p| !point_in_polygon(p, gt);
    (outside(tl) || outside(tr)) && (outside(bl) || outside(br))
}

pub fn assign_label(a: &SquareAnchor, gts: &[Polygon]) -> AnchorLabel {
    let matched_gt = gts.iter().position(|gt| is_positive_for(a, gt));
    AnchorLabel {
        anchor: *a,
        label: if matched_gt.is_some() {
            Label::Positive
        } else {
            Label::Negative
        },
        matched_gt,
    }
}

/// Inner region of `gt` holding half its area: the polygon scaled about its
/// area centroid by `√0.5`.
pub fn strong_region(gt: &Polygon) -> Polygon {
    gt.scale_about(gt.centroid(), STRONG_AREA_FRACTION.sqrt())
}

/// Per-cell segmentation target over an anchor's square, with values in
/// `{0, 0.1, 1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct SegmentLabelGrid(ScoreGrid);

impl SegmentLabelGrid {
    pub fn grid(&self) -> &ScoreGrid {
        &self.0
    }

    pub fn into_grid(self) -> ScoreGrid {
        self.0
    }
}

impl std::ops::Deref for SegmentLabelGrid {
    type Target = ScoreGrid;
    fn deref(&self) -> &ScoreGrid {
        &self.0
    }
}

/// Cells whose centers fall in the strong region get 1, the rest of the
/// polygon 0.1, everything else 0.
pub fn segment_label(a: &SquareAnchor, gt: &Polygon, resolution: usize) -> Result<SegmentLabelGrid> {
    if resolution == 0 {
        return Err(Error::InvalidInput("resolution must be positive".into()));
    }
    let strong = strong_region(gt);
    let cell = a.side / resolution as f64;
    let origin = a.top_left();
    let mut values = Vec::with_capacity(resolution * resolution);
    for r in 0..resolution {
        for c in 0..resolution {
            let p = origin + Point::new((c as f64 + 0.5) * cell, (r as f64 + 0.5) * cell);
            values.push(if point_in_polygon(p, &strong) {
                STRONG_SCORE
            } else if point_in_polygon(p, gt) {
                WEAK_SCORE
            } else {
                0.0
            });
        }
    }
    ScoreGrid::new(resolution, resolution, cell as f32, values).map(SegmentLabelGrid)
}

/// Indices of scores strictly above `s3`, highest first (ties keep input
/// order), truncated to `cap`.
pub fn rank_positive(scores: &[f64], s3: f64, cap: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..scores.len()).filter(|&i| scores[i] > s3).collect();
    idx.sort_by(|&a, &b| scores[b].partial_cmp(&scores[a]).unwrap_or(Ordering::Equal));
    idx.truncate(cap);
    idx
}

pub fn filter_positive_squares(
    anchors: &[SquareAnchor],
    scores: &[f64],
    s3: f64,
    cap: usize,
) -> Result<Vec<SquareAnchor>> {
    if anchors.len() != scores.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} anchors but {} scores",
            anchors.len(),
            scores.len()
        )));
    }
    Ok(rank_positive(scores, s3, cap)
        .into_iter()
        .map(|i| anchors[i])
        .collect())
}
