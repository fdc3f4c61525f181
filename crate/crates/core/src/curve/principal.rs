//! Principal curves by iterated projection and smoothing.
//!
//! Starting from the first principal-component segment of the cloud, each
//! iteration projects every point onto the current polyline to obtain an
//! arc-length parameter, then re-estimates the curve as the local-linear
//! (tricube) regression of the coordinates on that parameter.

use crate::error::{Error, Result};
use crate::geom::{Point, EPS};

/// Number of vertices of the polyline rebuilt after each smoothing pass.
pub const CURVE_VERTICES: usize = 50;
/// Full width of the smoothing window as a fraction of the curve length.
pub const SMOOTHING_SPAN: f64 = 0.3;
pub const MAX_ITERATIONS: usize = 20;
/// Convergence threshold on mean projection displacement, relative to the
/// diagonal of the cloud's bounding box.
pub const CONVERGENCE_TOL: f64 = 1e-3;
/// Lower bound on the smoothing half-window as a multiple of the RMS
/// distance of the points to the current curve. A window much narrower
/// than the cloud is thick lets the curve fold back on itself.
pub const THICKNESS_FACTOR: f64 = 6.0;

/// Polyline parameterized by arc length.
#[derive(Debug, Clone, PartialEq)]
pub struct Polyline {
    points: Vec<Point>,
    cumulative: Vec<f64>,
}

/// Closest point on a polyline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Projection {
    pub point: Point,
    /// Arc length of `point` from the start of the polyline.
    pub arc: f64,
    pub distance: f64,
    pub segment: usize,
    /// Unclamped parameter along `segment`, in units of its length; values
    /// outside `[0, 1]` mean the query lies beyond the segment's ends.
    pub t: f64,
}

impl Polyline {
    /// Builds a polyline, dropping consecutive duplicate vertices.
    pub fn new(points: Vec<Point>) -> Result<Self> {
        let mut pts: Vec<Point> = Vec::with_capacity(points.len());
        for p in points {
            if !p.is_finite() {
                return Err(Error::InvalidInput(format!("non-finite curve vertex {p:?}")));
            }
            if pts.last().is_none_or(|q: &Point| q.distance(p) > EPS) {
                pts.push(p);
            }
        }
        if pts.len() < 2 {
            return Err(Error::Degenerate("curve has zero length".into()));
        }
        let mut cumulative = Vec::with_capacity(pts.len());
        cumulative.push(0.0);
        for w in pts.windows(2) {
            let last = *cumulative.last().unwrap();
            cumulative.push(last + w[0].distance(w[1]));
        }
        Ok(Self {
            points: pts,
            cumulative,
        })
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn length(&self) -> f64 {
        *self.cumulative.last().unwrap()
    }

    pub fn start(&self) -> Point {
        self.points[0]
    }

    pub fn end(&self) -> Point {
        *self.points.last().unwrap()
    }

    pub fn reversed(&self) -> Polyline {
        let mut pts = self.points.clone();
        pts.reverse();
        Polyline::new(pts).expect("reversal keeps a valid polyline")
    }

    /// Unit direction of segment `i`.
    pub fn direction(&self, i: usize) -> Point {
        (self.points[i + 1] - self.points[i])
            .normalized()
            .expect("segments have positive length")
    }

    /// Point at arc length `s`, clamped to the curve.
    pub fn point_at(&self, s: f64) -> Point {
        let s = s.clamp(0.0, self.length());
        let i = match self.cumulative.binary_search_by(|c| c.total_cmp(&s)) {
            Ok(i) => return self.points[i],
            Err(i) => i.saturating_sub(1).min(self.points.len() - 2),
        };
        let seg = self.cumulative[i + 1] - self.cumulative[i];
        let t = (s - self.cumulative[i]) / seg;
        self.points[i] + (self.points[i + 1] - self.points[i]) * t
    }

    pub fn project(&self, p: Point) -> Projection {
        let mut best = Projection {
            point: self.points[0],
            arc: 0.0,
            distance: f64::INFINITY,
            segment: 0,
            t: 0.0,
        };
        for i in 0..self.points.len() - 1 {
            let a = self.points[i];
            let ab = self.points[i + 1] - a;
            let len2 = ab.dot(ab);
            let t = (p - a).dot(ab) / len2;
            let tc = t.clamp(0.0, 1.0);
            let q = a + ab * tc;
            let d = p.distance(q);
            if d < best.distance {
                best = Projection {
                    point: q,
                    arc: self.cumulative[i] + tc * len2.sqrt(),
                    distance: d,
                    segment: i,
                    t,
                };
            }
        }
        best
    }

    /// Adds a straight piece of length `before` ahead of the first vertex and
    /// one of length `after` past the last, along the end directions.
    pub fn extended(&self, before: f64, after: f64) -> Polyline {
        let mut pts = Vec::with_capacity(self.points.len() + 2);
        if before > EPS {
            pts.push(self.start() - self.direction(0) * before);
        }
        pts.extend_from_slice(&self.points);
        if after > EPS {
            let last = self.points.len() - 2;
            pts.push(self.end() + self.direction(last) * after);
        }
        Polyline::new(pts).expect("extension keeps a valid polyline")
    }
}

/// Mean and principal axis of a point cloud, plus the eigenvalues
/// `(major, minor)` of its covariance.
pub(crate) fn principal_axis(points: &[Point]) -> (Point, Point, f64, f64) {
    let n = points.len() as f64;
    let mean = points.iter().fold(Point::default(), |acc, &p| acc + p) * (1.0 / n);
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for &p in points {
        let d = p - mean;
        sxx += d.x * d.x;
        sxy += d.x * d.y;
        syy += d.y * d.y;
    }
    let (sxx, sxy, syy) = (sxx / n, sxy / n, syy / n);
    let half_trace = 0.5 * (sxx + syy);
    let disc = (0.25 * (sxx - syy).powi(2) + sxy * sxy).sqrt();
    let (major, minor) = (half_trace + disc, (half_trace - disc).max(0.0));
    let axis = if sxy.abs() > EPS * (sxx + syy).max(1.0) {
        Point::new(major - syy, sxy)
    } else if sxx >= syy {
        Point::new(1.0, 0.0)
    } else {
        Point::new(0.0, 1.0)
    };
    (mean, axis.normalized().unwrap_or(Point::new(1.0, 0.0)), major, minor)
}

fn tricube(u: f64) -> f64 {
    let a = u.abs();
    if a >= 1.0 {
        0.0
    } else {
        let c = 1.0 - a * a * a;
        c * c * c
    }
}

/// Local-linear estimate at `at` of the responses `ys` against `params`.
fn local_linear(params: &[f64], ys: &[Point], at: f64, half_width: f64) -> Point {
    let (mut s0, mut s1, mut s2) = (0.0, 0.0, 0.0);
    let (mut t0, mut t1) = (Point::default(), Point::default());
    for (&l, &y) in params.iter().zip(ys) {
        let d = l - at;
        let w = tricube(d / half_width);
        if w == 0.0 {
            continue;
        }
        s0 += w;
        s1 += w * d;
        s2 += w * d * d;
        t0 = t0 + y * w;
        t1 = t1 + y * (w * d);
    }
    let denom = s0 * s2 - s1 * s1;
    if s0 > 0.0 && denom > 1e-12 * s0 * s2.max(f64::MIN_POSITIVE) {
        (t0 * s2 - t1 * s1) * (1.0 / denom)
    } else if s0 > 0.0 {
        t0 * (1.0 / s0)
    } else {
        // Empty window: nearest response by parameter.
        let i = params
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - at).abs().total_cmp(&(b.1 - at).abs()))
            .map(|(i, _)| i)
            .unwrap();
        ys[i]
    }
}

/// Fits a principal curve through `points` (at least 7, not all coincident).
///
/// Collinear input returns the segment spanned by the points.
pub fn fit_principal_curve(points: &[Point]) -> Result<Polyline> {
    if points.len() < 7 {
        return Err(Error::InvalidInput(format!(
            "principal curve needs at least 7 points, got {}",
            points.len()
        )));
    }
    if let Some(p) = points.iter().find(|p| !p.is_finite()) {
        return Err(Error::InvalidInput(format!("non-finite point {p:?}")));
    }
    let (mean, axis, major, minor) = principal_axis(points);
    let (tmin, tmax) = points.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &p| {
        let t = (p - mean).dot(axis);
        (lo.min(t), hi.max(t))
    });
    if tmax - tmin <= EPS {
        return Err(Error::Degenerate("all points coincide".into()));
    }
    let mut curve = Polyline::new(vec![mean + axis * tmin, mean + axis * tmax])?;
    if minor <= EPS * major {
        return Ok(curve);
    }

    let diag = {
        let bb = crate::geom::BBox::from_points(points).unwrap();
        bb.width().hypot(bb.height())
    };
    let mut projections: Vec<Projection> = points.iter().map(|&p| curve.project(p)).collect();
    for _ in 0..MAX_ITERATIONS {
        let params: Vec<f64> = projections.iter().map(|p| p.arc).collect();
        let (lo, hi) = params
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &l| (lo.min(l), hi.max(l)));
        let span = hi - lo;
        if span <= EPS {
            break;
        }
        let rms = (projections.iter().map(|p| p.distance * p.distance).sum::<f64>() / points.len() as f64).sqrt();
        let half_width = (0.5 * SMOOTHING_SPAN * span).max(THICKNESS_FACTOR * rms);
        let vertices: Vec<Point> = (0..CURVE_VERTICES)
            .map(|g| {
                let at = lo + span * g as f64 / (CURVE_VERTICES - 1) as f64;
                local_linear(&params, points, at, half_width)
            })
            .collect();
        let next = match Polyline::new(vertices) {
            Ok(c) => c,
            Err(_) => break,
        };
        let next_proj: Vec<Projection> = points.iter().map(|&p| next.project(p)).collect();
        let displacement = projections
            .iter()
            .zip(&next_proj)
            .map(|(a, b)| a.point.distance(b.point))
            .sum::<f64>()
            / points.len() as f64;
        curve = next;
        projections = next_proj;
        if displacement < CONVERGENCE_TOL * diag {
            break;
        }
    }
    Ok(curve)
}
