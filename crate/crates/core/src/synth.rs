//! Seeded synthetic curved-text cases: ground-truth bands plus the segment
//! predictions an ideal network would emit for them.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::anchors::{assign_label, AnchorSpec, SquareAnchor};
use crate::error::{Error, Result};
use crate::geom::{point_in_polygon, point_segment_distance, segments_intersect, Point, Polygon};
use crate::maskgrid::SegmentPrediction;

#[derive(Debug, Clone, PartialEq)]
pub struct SynthParams {
    pub image_size: (u32, u32),
    /// Inclusive range for the number of bands per image.
    pub bands: (usize, usize),
    pub width: (f64, f64),
    pub length: (f64, f64),
    /// Smallest allowed radius of curvature as a multiple of band width.
    pub min_radius_factor: f64,
    /// Largest turning angle of an arc band, in degrees.
    pub max_sweep_deg: f64,
    /// Minimum clearance between two bands and between a band and the
    /// image border.
    pub min_gap: f64,
    pub min_anchors: usize,
    pub resolution: usize,
    /// 3×3 box blur over every mask's scores.
    pub blur: bool,
    /// Low-confidence predictions with random masks scattered over the image.
    pub distractors: usize,
    pub anchors: AnchorSpec,
    pub max_attempts: usize,
}

impl Default for SynthParams {
    fn default() -> Self {
        SynthParams {
            image_size: (512, 512),
            bands: (1, 4),
            width: (10.0, 40.0),
            length: (120.0, 360.0),
            min_radius_factor: 2.0,
            max_sweep_deg: 120.0,
            min_gap: 24.0,
            min_anchors: 3,
            resolution: 32,
            blur: false,
            distractors: 8,
            anchors: AnchorSpec::default(),
            max_attempts: 500,
        }
    }
}

impl SynthParams {
    fn validate(&self) -> Result<()> {
        let (w, h) = self.image_size;
        let bad = |msg: String| Err(Error::InvalidInput(msg));
        if self.bands.0 == 0 || self.bands.0 > self.bands.1 {
            return bad(format!("band count range {:?} is empty", self.bands));
        }
        if !(self.width.0 > 0.0 && self.width.0 <= self.width.1) {
            return bad(format!("width range {:?} is invalid", self.width));
        }
        if !(self.length.0 > 0.0 && self.length.0 <= self.length.1) {
            return bad(format!("length range {:?} is invalid", self.length));
        }
        let room = f64::from(w.min(h)) - 2.0 * self.min_gap;
        if self.width.1 >= room || self.length.0 >= room {
            return bad(format!(
                "bands of width {} and length {} do not fit a {w}x{h} image",
                self.width.1, self.length.0
            ));
        }
        if self.min_radius_factor <= 0.0 || !(self.max_sweep_deg > 0.0 && self.max_sweep_deg < 360.0) {
            return bad("curvature limits must be positive".into());
        }
        if self.resolution == 0 {
            return bad("mask resolution must be positive".into());
        }
        Ok(())
    }
}

/// Shape of a band's center line, parameterized over `t ∈ [0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CenterCurve {
    Line {
        start: Point,
        dir: Point,
        length: f64,
    },
    Arc {
        center: Point,
        radius: f64,
        start_angle: f64,
        sweep: f64,
    },
    /// `start + x·dir + amp·sin(2πx/wavelength + phase)·normal` for
    /// `x ∈ [0, length]`.
    Sine {
        start: Point,
        dir: Point,
        length: f64,
        amp: f64,
        wavelength: f64,
        phase: f64,
    },
}

impl CenterCurve {
    /// Point and unit tangent at parameter `t`.
    pub fn eval(&self, t: f64) -> (Point, Point) {
        match *self {
            CenterCurve::Line { start, dir, length } => (start + dir * (t * length), dir),
            CenterCurve::Arc {
                center,
                radius,
                start_angle,
                sweep,
            } => {
                let a = start_angle + t * sweep;
                let radial = Point::new(a.cos(), a.sin());
                let tangent = Point::new(-a.sin(), a.cos()) * sweep.signum();
                (center + radial * radius, tangent)
            }
            CenterCurve::Sine {
                start,
                dir,
                length,
                amp,
                wavelength,
                phase,
            } => {
                let normal = Point::new(-dir.y, dir.x);
                let x = t * length;
                let w = std::f64::consts::TAU / wavelength;
                let p = start + dir * x + normal * (amp * (w * x + phase).sin());
                let d = dir + normal * (amp * w * (w * x + phase).cos());
                (p, d * (1.0 / d.norm()))
            }
        }
    }

    /// Band polygon of the given width: 7 vertices on the left of the
    /// traversal direction, then 7 on the right in reverse, rounded to
    /// integer pixels.
    pub fn band_polygon(&self, width: f64) -> Result<Polygon> {
        let mut top = Vec::with_capacity(7);
        let mut bottom = Vec::with_capacity(7);
        for i in 0..7 {
            let (p, d) = self.eval(i as f64 / 6.0);
            let n = d.left_normal() * (0.5 * width);
            top.push(round(p + n));
            bottom.push(round(p - n));
        }
        top.extend(bottom.into_iter().rev());
        Polygon::new(top)
    }
}

fn round(p: Point) -> Point {
    Point::new(p.x.round(), p.y.round())
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthCase {
    pub image_id: String,
    pub image_size: (u32, u32),
    pub gt_polygons: Vec<Polygon>,
    /// Positive anchors, in the anchor lattice order.
    pub anchors: Vec<SquareAnchor>,
    /// Ground-truth index of each positive anchor.
    pub matched_gt: Vec<usize>,
    /// One prediction per positive anchor.
    pub masks: Vec<SegmentPrediction>,
    /// Low-score predictions that a correct pipeline drops.
    pub distractors: Vec<SegmentPrediction>,
    pub seed: u64,
}

impl SynthCase {
    /// Every prediction the pipeline sees, positives first.
    pub fn predictions(&self) -> Vec<SegmentPrediction> {
        self.masks.iter().chain(&self.distractors).cloned().collect()
    }

    /// Checks the construction guarantees: each positive anchor is labeled
    /// positive for its ground truth, mask cells set to 1 have centers
    /// inside that ground truth, and every ground truth has at least
    /// `min_anchors` anchors.
    pub fn check(&self, min_anchors: usize) -> Result<()> {
        let mut per_gt = vec![0usize; self.gt_polygons.len()];
        for ((a, &g), m) in self.anchors.iter().zip(&self.matched_gt).zip(&self.masks) {
            if assign_label(a, &self.gt_polygons).matched_gt != Some(g) {
                return Err(Error::Degenerate(format!("anchor {a:?} is not positive for gt {g}")));
            }
            per_gt[g] += 1;
            let cell = m.side / m.resolution as f64;
            let origin = m.origin();
            for (idx, &v) in m.scores.iter().enumerate() {
                let (r, c) = (idx / m.resolution, idx % m.resolution);
                let p = origin + Point::new((c as f64 + 0.5) * cell, (r as f64 + 0.5) * cell);
                if v >= 1.0 && !point_in_polygon(p, &self.gt_polygons[g]) {
                    return Err(Error::Degenerate(format!("mask cell ({c}, {r}) lies outside gt {g}")));
                }
            }
        }
        match per_gt.iter().position(|&n| n < min_anchors) {
            Some(g) => Err(Error::Degenerate(format!("gt {g} has only {} anchors", per_gt[g]))),
            None => Ok(()),
        }
    }
}

/// Generates one case. Identical `(seed, params)` give identical cases.
pub fn gen_case(seed: u64, params: &SynthParams) -> Result<SynthCase> {
    params.validate()?;
    let mut rng = StdRng::seed_from_u64(seed);
    let (w, h) = params.image_size;
    let all_anchors = params.anchors.image_anchors(w, h);
    let n_bands = rng.random_range(params.bands.0..=params.bands.1);

    let mut gts: Vec<Polygon> = Vec::new();
    let mut attempts = 0;
    while gts.len() < n_bands && attempts < params.max_attempts {
        attempts += 1;
        let width = rng.random_range(params.width.0..=params.width.1);
        let Some(curve) = random_curve(&mut rng, params, width) else {
            continue;
        };
        let Ok(gt) = curve.band_polygon(width) else {
            continue;
        };
        if !gt.is_simple() || !inside_image(&gt, params) {
            continue;
        }
        if gts.iter().any(|o| polygon_distance(o, &gt) < params.min_gap) {
            continue;
        }
        let support = all_anchors
            .iter()
            .filter(|a| crate::anchors::is_positive_for(a, &gt))
            .count();
        if support < params.min_anchors {
            continue;
        }
        gts.push(gt);
    }
    if gts.is_empty() {
        return Err(Error::InvalidInput(format!(
            "no feasible band after {} attempts",
            params.max_attempts
        )));
    }

    let mut anchors = Vec::new();
    let mut matched_gt = Vec::new();
    let mut masks = Vec::new();
    for a in &all_anchors {
        let Some(g) = assign_label(a, &gts).matched_gt else {
            continue;
        };
        let mut scores = rasterize(a, &gts[g], params.resolution);
        if params.blur {
            scores = box_blur(&scores, params.resolution);
        }
        let score = rng.random_range(0.6f32..=1.0);
        masks.push(SegmentPrediction::new(a.center(), a.side, params.resolution, scores, score)?);
        anchors.push(*a);
        matched_gt.push(g);
    }

    let mut distractors = Vec::with_capacity(params.distractors);
    for _ in 0..params.distractors {
        let a = all_anchors[rng.random_range(0..all_anchors.len())];
        let scores = (0..params.resolution * params.resolution)
            .map(|_| rng.random::<f32>())
            .collect();
        let score = rng.random_range(0.0f32..0.35);
        distractors.push(SegmentPrediction::new(a.center(), a.side, params.resolution, scores, score)?);
    }

    Ok(SynthCase {
        image_id: format!("synth_{seed}"),
        image_size: params.image_size,
        gt_polygons: gts,
        anchors,
        matched_gt,
        masks,
        distractors,
        seed,
    })
}

fn random_curve(rng: &mut StdRng, params: &SynthParams, width: f64) -> Option<CenterCurve> {
    let (w, h) = params.image_size;
    let length = rng.random_range(params.length.0..=params.length.1);
    let start = Point::new(
        rng.random_range(0.0..f64::from(w)),
        rng.random_range(0.0..f64::from(h)),
    );
    // Mostly left-to-right text, tilted by at most 45 degrees.
    let theta = rng.random_range(-0.25 * std::f64::consts::PI..=0.25 * std::f64::consts::PI);
    let dir = Point::new(theta.cos(), theta.sin());
    let min_radius = params.min_radius_factor * width;
    match rng.random_range(0..3) {
        0 => Some(CenterCurve::Line { start, dir, length }),
        1 => {
            let max_sweep = params.max_sweep_deg.to_radians();
            let sweep = rng.random_range(0.2..=max_sweep) * if rng.random::<bool>() { 1.0 } else { -1.0 };
            let radius = length / sweep.abs();
            if radius < min_radius {
                return None;
            }
            // Start the arc heading along `dir`.
            let normal = Point::new(-dir.y, dir.x) * sweep.signum();
            let center = start + normal * radius;
            let r0 = start - center;
            Some(CenterCurve::Arc {
                center,
                radius,
                start_angle: r0.y.atan2(r0.x),
                sweep,
            })
        }
        _ => {
            // At most one period, with the tangent turning no more than
            // a quarter of the arc sweep limit away from `dir`.
            let wavelength = rng.random_range(length..=2.0 * length);
            let k = std::f64::consts::TAU / wavelength;
            let max_slope = (0.25 * params.max_sweep_deg).to_radians().tan();
            let max_amp = (1.0 / (min_radius * k * k)).min(max_slope / k);
            let amp = rng.random_range(0.0..=max_amp);
            let phase = rng.random_range(0.0..std::f64::consts::TAU);
            Some(CenterCurve::Sine {
                start,
                dir,
                length,
                amp,
                wavelength,
                phase,
            })
        }
    }
}

fn inside_image(gt: &Polygon, params: &SynthParams) -> bool {
    let b = gt.bbox();
    let (w, h) = params.image_size;
    let m = params.min_gap;
    b.min.x >= m && b.min.y >= m && b.max.x <= f64::from(w) - m && b.max.y <= f64::from(h) - m
}

/// Smallest distance between the boundaries of two polygons, or 0 when
/// they touch or one contains the other.
fn polygon_distance(a: &Polygon, b: &Polygon) -> f64 {
    if point_in_polygon(a.vertices()[0], b) || point_in_polygon(b.vertices()[0], a) {
        return 0.0;
    }
    let mut best = f64::INFINITY;
    for (p, q) in a.edges() {
        for (r, s) in b.edges() {
            if segments_intersect(p, q, r, s) {
                return 0.0;
            }
            best = best
                .min(point_segment_distance(p, r, s))
                .min(point_segment_distance(q, r, s))
                .min(point_segment_distance(r, p, q))
                .min(point_segment_distance(s, p, q));
        }
    }
    best
}

/// Scores over the anchor's square: 1 where the cell center lies inside
/// `gt`, 0 elsewhere.
fn rasterize(a: &SquareAnchor, gt: &Polygon, resolution: usize) -> Vec<f32> {
    let cell = a.side / resolution as f64;
    let origin = a.top_left();
    let mut out = Vec::with_capacity(resolution * resolution);
    for r in 0..resolution {
        for c in 0..resolution {
            let p = origin + Point::new((c as f64 + 0.5) * cell, (r as f64 + 0.5) * cell);
            out.push(if point_in_polygon(p, gt) { 1.0 } else { 0.0 });
        }
    }
    out
}

fn box_blur(scores: &[f32], n: usize) -> Vec<f32> {
    let mut out = vec![0.0; scores.len()];
    for r in 0..n {
        for c in 0..n {
            let (mut sum, mut count) = (0.0f32, 0.0f32);
            for rr in r.saturating_sub(1)..=(r + 1).min(n - 1) {
                for cc in c.saturating_sub(1)..=(c + 1).min(n - 1) {
                    sum += scores[rr * n + cc];
                    count += 1.0;
                }
            }
            out[r * n + c] = sum / count;
        }
    }
    out
}

/// Width of the band, in cells, within which [`perturb`] may flip a cell.
pub const NOISE_BAND: usize = 2;

/// Flips each mask cell that lies within [`NOISE_BAND`] cells (Chebyshev
/// distance) of a 0/1 edge with probability `noise`. Interior cells, and
/// the distractors, are left alone. Randomness is derived from the case
/// seed, so the result is reproducible.
pub fn perturb(case: &SynthCase, noise: f64) -> Result<SynthCase> {
    if !(0.0..=0.5).contains(&noise) {
        return Err(Error::InvalidInput(format!("noise {noise} outside [0, 0.5]")));
    }
    let mut out = case.clone();
    if noise == 0.0 {
        return Ok(out);
    }
    let mut rng = StdRng::seed_from_u64(case.seed ^ 0x6e6f_6973_6521);
    for m in &mut out.masks {
        let n = m.resolution;
        let on: Vec<bool> = m.scores.iter().map(|&v| v > 0.5).collect();
        let near_edge = |r: usize, c: usize| {
            let rows = r.saturating_sub(NOISE_BAND)..=(r + NOISE_BAND).min(n - 1);
            rows.into_iter().any(|rr| {
                (c.saturating_sub(NOISE_BAND)..=(c + NOISE_BAND).min(n - 1))
                    .any(|cc| on[rr * n + cc] != on[r * n + c])
            })
        };
        for r in 0..n {
            for c in 0..n {
                if near_edge(r, c) && rng.random_bool(noise) {
                    let v = &mut m.scores[r * n + c];
                    *v = 1.0 - *v;
                }
            }
        }
    }
    Ok(out)
}
