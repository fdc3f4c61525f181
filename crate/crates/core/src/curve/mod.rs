//! Turning a merged region into a text polygon.
//!
//! A principal curve is fit through a sample of the region's cells, extended
//! to the extreme cells at both ends, and sampled at equal arc length. Each
//! pair of consecutive samples bounds a slab of the region; the rectangle
//! circumscribing the slab's cells (with one side along the slab axis) gives
//! the local half-widths on either side of the center line. The widths are
//! attached to the center points, producing one vertex above and one below
//! each point.

mod principal;

pub use principal::{fit_principal_curve, Polyline, Projection, CURVE_VERTICES, MAX_ITERATIONS, SMOOTHING_SPAN, THICKNESS_FACTOR};

use rand::rngs::StdRng;
use rand::SeedableRng;

use crate::error::{Error, Result};
use crate::geom::{Point, Polygon};
use crate::maskgrid::BitGrid;
use crate::merge::MergedRegion;

/// Number of center-line samples; the polygon has twice as many vertices.
pub const CENTER_POINTS: usize = 7;
pub const DEFAULT_SAMPLE_SIZE: usize = 512;

/// Ordered center-line samples with unit tangents.
#[derive(Debug, Clone, PartialEq)]
pub struct CenterLine {
    points: Vec<Point>,
    tangents: Vec<Point>,
}

impl CenterLine {
    pub fn new(points: Vec<Point>, tangents: Vec<Point>) -> Result<Self> {
        if points.len() < 2 || points.len() != tangents.len() {
            return Err(Error::InvalidInput(format!(
                "center line needs matching points and tangents, got {} and {}",
                points.len(),
                tangents.len()
            )));
        }
        if points.windows(2).any(|w| w[0].distance(w[1]) <= crate::geom::EPS) {
            return Err(Error::Degenerate("consecutive center points coincide".into()));
        }
        let tangents = tangents
            .into_iter()
            .map(|t| t.normalized().ok_or_else(|| Error::Degenerate("zero tangent".into())))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { points, tangents })
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn tangents(&self) -> &[Point] {
        &self.tangents
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Output polygon: the upper chain left to right along the center line,
/// then the lower chain back.
#[derive(Debug, Clone, PartialEq)]
pub struct TextPolygon {
    polygon: Polygon,
}

impl TextPolygon {
    pub fn polygon(&self) -> &Polygon {
        &self.polygon
    }

    pub fn into_polygon(self) -> Polygon {
        self.polygon
    }

    pub fn vertices(&self) -> &[Point] {
        self.polygon.vertices()
    }
}

/// Curve-stage settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveConfig {
    pub n_sample: usize,
    pub seed: u64,
}

impl Default for CurveConfig {
    fn default() -> Self {
        Self {
            n_sample: DEFAULT_SAMPLE_SIZE,
            seed: 0,
        }
    }
}

/// Centers of all region cells when there are at most `n`, otherwise a
/// uniform sample of `n` of them drawn from `seed`.
pub fn sample_positive_pixels(region: &BitGrid, n: usize, seed: u64) -> Result<Vec<Point>> {
    if n < CENTER_POINTS {
        return Err(Error::InvalidInput(format!("sample size must be at least {CENTER_POINTS}, got {n}")));
    }
    let centers = region.set_cell_centers();
    if centers.is_empty() {
        return Err(Error::InvalidInput("region has no positive cells".into()));
    }
    if centers.len() <= n {
        return Ok(centers);
    }
    let mut rng = StdRng::seed_from_u64(seed);
    let mut picked = rand::seq::index::sample(&mut rng, centers.len(), n).into_vec();
    picked.sort_unstable();
    Ok(picked.into_iter().map(|i| centers[i]).collect())
}

/// Half extent of a square cell of side `stride` along unit direction `u`.
fn cell_support(stride: f64, u: Point) -> f64 {
    0.5 * stride * (u.x.abs() + u.y.abs())
}

/// Fraction of the curve length over which the end directions used for
/// extension are measured.
pub const END_CHORD_FRACTION: f64 = 0.1;

/// Extends `curve` at both ends so that it reaches the farthest projection of
/// any cell lying beyond that end (cell extent included). Each end is
/// extended along the chord spanning the last [`END_CHORD_FRACTION`] of the
/// curve, which is steadier than the last segment alone.
pub fn extend_to_cells(curve: &Polyline, cells: &[Point], stride: f64) -> Polyline {
    let len = curve.length();
    let reach = END_CHORD_FRACTION * len;
    let u0 = (curve.point_at(reach) - curve.start()).normalized().unwrap_or(curve.direction(0));
    let u1 = (curve.end() - curve.point_at(len - reach))
        .normalized()
        .unwrap_or(curve.direction(curve.points().len() - 2));
    let (mut before, mut after) = (0.0f64, 0.0f64);
    for &c in cells {
        before = before.max((curve.start() - c).dot(u0) + cell_support(stride, u0));
        after = after.max((c - curve.end()).dot(u1) + cell_support(stride, u1));
    }
    let mut pts = Vec::with_capacity(curve.points().len() + 2);
    if before > crate::geom::EPS {
        pts.push(curve.start() - u0 * before);
    }
    pts.extend_from_slice(curve.points());
    if after > crate::geom::EPS {
        pts.push(curve.end() + u1 * after);
    }
    Polyline::new(pts).unwrap_or_else(|_| curve.clone())
}

/// Orients a curve to run left to right (top to bottom when vertical).
pub fn orient_left_to_right(curve: Polyline) -> Polyline {
    let d = curve.end() - curve.start();
    if d.x < 0.0 || (d.x == 0.0 && d.y < 0.0) {
        curve.reversed()
    } else {
        curve
    }
}

/// `count` points at equal arc-length spacing (both endpoints included).
/// Tangents are finite differences between neighbouring samples: central at
/// interior points, one-sided at the two ends.
pub fn sample_center_points(curve: &Polyline, count: usize) -> Result<CenterLine> {
    if count < 2 {
        return Err(Error::InvalidInput(format!("need at least 2 center points, got {count}")));
    }
    let len = curve.length();
    if len <= crate::geom::EPS {
        return Err(Error::Degenerate("curve has zero length".into()));
    }
    let step = len / (count - 1) as f64;
    let points: Vec<Point> = (0..count)
        .map(|k| if k == count - 1 { curve.end() } else { curve.point_at(step * k as f64) })
        .collect();
    let tangents = (0..count)
        .map(|k| points[(k + 1).min(count - 1)] - points[k.saturating_sub(1)])
        .collect();
    CenterLine::new(points, tangents)
}

/// Builds the polygon around `cl` from the cells of `region`; see the module
/// docs. Slabs without cells borrow the width of the nearest non-empty slab.
pub fn build_polygon(region: &MergedRegion, cl: &CenterLine) -> Result<TextPolygon> {
    let grid = &region.mask;
    let cells = grid.set_cell_centers();
    if cells.is_empty() {
        return Err(Error::InvalidInput("region has no positive cells".into()));
    }
    let stride = grid.stride();
    let pts = cl.points();
    let slabs = pts.len() - 1;

    // Each cell goes to the nearest center-line segment, provided its
    // projection falls within that segment (up to one cell).
    let mut members: Vec<Vec<Point>> = vec![Vec::new(); slabs];
    for &c in &cells {
        let mut best: Option<(usize, f64)> = None;
        for k in 0..slabs {
            let (a, b) = (pts[k], pts[k + 1]);
            let d = crate::geom::point_segment_distance(c, a, b);
            if best.is_none_or(|(_, bd)| d < bd) {
                best = Some((k, d));
            }
        }
        let (k, _) = best.expect("at least one slab");
        let (a, b) = (pts[k], pts[k + 1]);
        let len = a.distance(b);
        let t = (c - a).dot((b - a) * (1.0 / len));
        if t >= -stride && t <= len + stride {
            members[k].push(c);
        }
    }

    // Left/right half-widths of each slab from the rectangle with axis
    // p_k -> p_k+1 circumscribing its cell centers. When the slab edge runs
    // along a lattice axis the outermost centers sit half a cell inside
    // the true edge; the more lattice rows the edge crosses along the slab,
    // the closer they get, so the pad shrinks to zero.
    let mut widths: Vec<Option<(f64, f64)>> = Vec::with_capacity(slabs);
    for k in 0..slabs {
        if members[k].is_empty() {
            widths.push(None);
            continue;
        }
        let a = pts[k];
        let n = (pts[k + 1] - a).normalized().unwrap().left_normal();
        let drift = a.distance(pts[k + 1]) * n.x.abs().min(n.y.abs());
        let pad = 0.5 * (stride - drift).max(0.0);
        let (lo, hi) = members[k].iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &c| {
            let d = (c - a).dot(n);
            (lo.min(d), hi.max(d))
        });
        widths.push(Some((hi + pad, pad - lo)));
    }
    if widths.iter().all(Option::is_none) {
        return Err(Error::Degenerate("no cell falls within any slab".into()));
    }
    let filled: Vec<(f64, f64)> = (0..slabs)
        .map(|k| {
            (0..slabs)
                .filter_map(|j| widths[j].map(|w| (k.abs_diff(j), j, w)))
                .min_by_key(|(dist, j, _)| (*dist, *j))
                .map(|(_, _, w)| w)
                .unwrap()
        })
        .collect();

    let mut upper = Vec::with_capacity(pts.len());
    let mut lower = Vec::with_capacity(pts.len());
    for (k, (&p, &t)) in pts.iter().zip(cl.tangents()).enumerate() {
        let (left, right) = if k == 0 {
            filled[0]
        } else if k == slabs {
            filled[slabs - 1]
        } else {
            let (a, b) = (filled[k - 1], filled[k]);
            (0.5 * (a.0 + b.0), 0.5 * (a.1 + b.1))
        };
        let n = t.left_normal();
        upper.push(p + n * left.max(0.5 * stride));
        lower.push(p - n * right.max(0.5 * stride));
    }
    lower.reverse();
    upper.extend(lower);
    Ok(TextPolygon {
        polygon: Polygon::new(upper)?,
    })
}

/// Full curve stage for one region: sample, fit, orient, extend, sample the
/// center line, and build the polygon.
pub fn polygonize(region: &MergedRegion, cfg: &CurveConfig) -> Result<TextPolygon> {
    let sample = sample_positive_pixels(&region.mask, cfg.n_sample, cfg.seed)?;
    let curve = orient_left_to_right(fit_principal_curve(&sample)?);
    let cells = region.mask.set_cell_centers();
    let curve = extend_to_cells(&curve, &cells, region.mask.stride());
    let cl = sample_center_points(&curve, CENTER_POINTS)?;
    build_polygon(region, &cl)
}
