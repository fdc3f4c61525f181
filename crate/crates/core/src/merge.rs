//! Merging of per-square segment masks into per-instance regions.
//!
//! Masks are binarized, resampled onto a shared canvas, and joined whenever
//! the overlap of two masks covers more than `s2` of the smaller one. Regions
//! are the connected components of that pairwise overlap graph, so the result
//! does not depend on the order of the input masks.

use crate::error::{Error, Result};
use crate::maskgrid::{BitGrid, Footprint, SegmentMask};

pub const DEFAULT_S1: f64 = 0.5;
pub const DEFAULT_S2: f64 = 0.2;
pub const DEFAULT_CANVAS_STRIDE: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MergeConfig {
    /// Binarization threshold on mask scores.
    pub s1: f64,
    /// Overlap-ratio threshold for joining two masks.
    pub s2: f64,
    /// Canvas cell size in pixels.
    pub canvas_stride: f64,
}

impl Default for MergeConfig {
    fn default() -> Self {
        Self {
            s1: DEFAULT_S1,
            s2: DEFAULT_S2,
            canvas_stride: DEFAULT_CANVAS_STRIDE,
        }
    }
}

impl MergeConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.s1) || !(0.0..=1.0).contains(&self.s2) {
            return Err(Error::InvalidInput(format!(
                "thresholds must be in [0, 1], got s1={} s2={}",
                self.s1, self.s2
            )));
        }
        if !(self.canvas_stride > 0.0 && self.canvas_stride.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "canvas stride must be positive, got {}",
                self.canvas_stride
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MergedRegion {
    /// OR of the members' masks on the shared canvas.
    pub mask: BitGrid,
    /// Input indices, ascending.
    pub members: Vec<usize>,
}

/// Canvas aligned to `stride` that covers every mask square.
pub fn canvas_for(masks: &[SegmentMask], stride: f64) -> Option<BitGrid> {
    let first = masks.first()?;
    let (mut min, mut max) = (first.origin(), first.origin());
    for m in masks {
        let o = m.origin();
        min.x = min.x.min(o.x);
        min.y = min.y.min(o.y);
        max.x = max.x.max(o.x + m.side());
        max.y = max.y.max(o.y + m.side());
    }
    Some(BitGrid::covering(min, max, stride))
}

struct DisjointSet {
    parent: Vec<usize>,
}

impl DisjointSet {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            // Keep the smaller index as root so component order is stable.
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }
}

fn windows_overlap(a: &Footprint, b: &Footprint) -> bool {
    a.col0 < b.col0 + b.width
        && b.col0 < a.col0 + a.width
        && a.row0 < b.row0 + b.height
        && b.row0 < a.row0 + a.height
}

/// Groups binarized masks into regions; see the module docs. Regions are
/// ordered by their smallest member index.
pub fn merge_masks(masks: &[SegmentMask], cfg: &MergeConfig) -> Result<Vec<MergedRegion>> {
    cfg.validate()?;
    let Some(canvas) = canvas_for(masks, cfg.canvas_stride) else {
        return Ok(Vec::new());
    };
    let prints: Vec<Footprint> = masks.iter().map(|m| Footprint::of(&canvas, m)).collect();

    let mut sets = DisjointSet::new(masks.len());
    for i in 0..prints.len() {
        if prints[i].area == 0 {
            continue;
        }
        for j in (i + 1)..prints.len() {
            let (a, b) = (&prints[i], &prints[j]);
            if b.area == 0 || !windows_overlap(a, b) {
                continue;
            }
            let ratio = a.intersection(b) as f64 / a.area.min(b.area) as f64;
            if ratio > cfg.s2 {
                sets.union(i, j);
            }
        }
    }

    let mut by_root: Vec<Option<usize>> = vec![None; masks.len()];
    let mut regions: Vec<MergedRegion> = Vec::new();
    for (i, print) in prints.iter().enumerate() {
        let root = sets.find(i);
        let slot = match by_root[root] {
            Some(slot) => slot,
            None => {
                by_root[root] = Some(regions.len());
                regions.push(MergedRegion {
                    mask: canvas.clone(),
                    members: Vec::new(),
                });
                regions.len() - 1
            }
        };
        print.or_into(&mut regions[slot].mask);
        regions[slot].members.push(i);
    }
    Ok(regions)
}

/// Drops masks with no set cell.
pub fn drop_empty(masks: Vec<SegmentMask>) -> Vec<SegmentMask> {
    masks.into_iter().filter(|m| !m.is_empty()).collect()
}
