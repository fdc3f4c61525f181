//! Planar polygon primitives in image coordinates (x right, y down).
//!
//! Everything here is double precision. Collinearity and on-boundary tests use
//! a fixed tolerance of [`EPS`], which is ample for pixel-scale inputs.

use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// Tolerance for collinearity and on-boundary tests.
pub const EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    #[inline]
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    #[inline]
    pub fn dot(self, other: Point) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the 3-D cross product.
    #[inline]
    pub fn cross(self, other: Point) -> f64 {
        self.x * other.y - self.y * other.x
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    #[inline]
    pub fn distance(self, other: Point) -> f64 {
        (self - other).norm()
    }

    pub fn normalized(self) -> Option<Point> {
        let n = self.norm();
        (n > EPS && n.is_finite()).then(|| self * (1.0 / n))
    }

    /// Unit normal on the left of this direction as seen in an image
    /// (y axis pointing down), i.e. `(1, 0)` maps to `(0, -1)`.
    #[inline]
    pub fn left_normal(self) -> Point {
        Point::new(self.y, -self.x)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn rotate(self, angle: f64) -> Point {
        let (s, c) = angle.sin_cos();
        Point::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }
}

impl Add for Point {
    type Output = Point;
    #[inline]
    fn add(self, rhs: Point) -> Point {
        Point::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Point {
    type Output = Point;
    #[inline]
    fn sub(self, rhs: Point) -> Point {
        Point::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    #[inline]
    fn mul(self, rhs: f64) -> Point {
        Point::new(self.x * rhs, self.y * rhs)
    }
}

impl Neg for Point {
    type Output = Point;
    #[inline]
    fn neg(self) -> Point {
        Point::new(-self.x, -self.y)
    }
}

/// Axis-aligned bounding box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BBox {
    pub min: Point,
    pub max: Point,
}

impl BBox {
    pub fn from_points<'a>(points: impl IntoIterator<Item = &'a Point>) -> Option<BBox> {
        let mut it = points.into_iter();
        let first = *it.next()?;
        let mut bb = BBox {
            min: first,
            max: first,
        };
        for p in it {
            bb.min.x = bb.min.x.min(p.x);
            bb.min.y = bb.min.y.min(p.y);
            bb.max.x = bb.max.x.max(p.x);
            bb.max.y = bb.max.y.max(p.y);
        }
        Some(bb)
    }

    pub fn width(&self) -> f64 {
        self.max.x - self.min.x
    }

    pub fn height(&self) -> f64 {
        self.max.y - self.min.y
    }

    pub fn union(&self, other: &BBox) -> BBox {
        BBox {
            min: Point::new(self.min.x.min(other.min.x), self.min.y.min(other.min.y)),
            max: Point::new(self.max.x.max(other.max.x), self.max.y.max(other.max.y)),
        }
    }

    pub fn intersects(&self, other: &BBox) -> bool {
        self.min.x <= other.max.x
            && other.min.x <= self.max.x
            && self.min.y <= other.max.y
            && other.min.y <= self.max.y
    }
}

/// A closed polygon with at least three vertices and nonzero area.
///
/// Orientation is whatever the vertex order implies; area-based operations
/// are orientation independent. Simplicity is not enforced by the
/// constructor (see [`Polygon::is_simple`]) because detector output is
/// accepted as-is; annotation parsers do enforce it.
#[derive(Debug, Clone, PartialEq)]
pub struct Polygon {
    vertices: Vec<Point>,
}

impl Polygon {
    pub fn new(vertices: Vec<Point>) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(Error::Degenerate(format!(
                "polygon needs at least 3 vertices, got {}",
                vertices.len()
            )));
        }
        if let Some(p) = vertices.iter().find(|p| !p.is_finite()) {
            return Err(Error::InvalidInput(format!("non-finite vertex {p:?}")));
        }
        let n = vertices.len();
        for i in 0..n {
            if vertices[i].distance(vertices[(i + 1) % n]) <= EPS {
                return Err(Error::Degenerate(format!(
                    "consecutive vertices {i} and {} coincide",
                    (i + 1) % n
                )));
            }
        }
        let area = signed_area(&vertices);
        if area.abs() <= EPS {
            return Err(Error::Degenerate("polygon has zero area".into()));
        }
        Ok(Self { vertices })
    }

    /// Rectangle `[x0, x1] × [y0, y1]`, vertices starting at the top-left corner.
    pub fn rect(x0: f64, y0: f64, x1: f64, y1: f64) -> Result<Self> {
        Self::new(vec![
            Point::new(x0, y0),
            Point::new(x1, y0),
            Point::new(x1, y1),
            Point::new(x0, y1),
        ])
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn into_vertices(self) -> Vec<Point> {
        self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn edges(&self) -> impl Iterator<Item = (Point, Point)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }

    /// Shoelace area; positive when the vertex order is counter-clockwise in
    /// a y-up frame.
    pub fn signed_area(&self) -> f64 {
        signed_area(&self.vertices)
    }

    pub fn area(&self) -> f64 {
        self.signed_area().abs()
    }

    pub fn bbox(&self) -> BBox {
        BBox::from_points(&self.vertices).expect("polygon has vertices")
    }

    /// Area centroid.
    pub fn centroid(&self) -> Point {
        let a = self.signed_area();
        let origin = self.vertices[0];
        let (mut cx, mut cy) = (0.0, 0.0);
        for (p, q) in self.edges() {
            let (p, q) = (p - origin, q - origin);
            let w = p.cross(q);
            cx += (p.x + q.x) * w;
            cy += (p.y + q.y) * w;
        }
        Point::new(origin.x + cx / (6.0 * a), origin.y + cy / (6.0 * a))
    }

    pub fn contains(&self, pt: Point) -> bool {
        point_in_polygon(pt, self)
    }

    /// True if no two non-adjacent edges touch and adjacent edges only share
    /// their common vertex.
    pub fn is_simple(&self) -> bool {
        let n = self.vertices.len();
        let v = &self.vertices;
        for i in 0..n {
            let (a, b) = (v[i], v[(i + 1) % n]);
            for j in (i + 1)..n {
                let (c, d) = (v[j], v[(j + 1) % n]);
                let adjacent = j == i + 1 || (i == 0 && j == n - 1);
                if adjacent {
                    // Adjacent edges may only overlap in the shared vertex; a
                    // fold-back (collinear overlap) counts as self-intersection.
                    let (shared, other_a, other_b) = if j == i + 1 { (b, a, d) } else { (a, b, c) };
                    let da = other_a - shared;
                    let db = other_b - shared;
                    if da.cross(db).abs() <= EPS * da.norm().max(db.norm()) && da.dot(db) > 0.0 {
                        return false;
                    }
                } else if segments_intersect(a, b, c, d) {
                    return false;
                }
            }
        }
        true
    }

    pub fn translate(&self, delta: Point) -> Polygon {
        Polygon {
            vertices: self.vertices.iter().map(|&p| p + delta).collect(),
        }
    }

    /// Scales the polygon about `center` by `factor` (> 0).
    pub fn scale_about(&self, center: Point, factor: f64) -> Polygon {
        Polygon {
            vertices: self
                .vertices
                .iter()
                .map(|&p| center + (p - center) * factor)
                .collect(),
        }
    }

    pub fn reversed(&self) -> Polygon {
        let mut vertices = self.vertices.clone();
        vertices.reverse();
        Polygon { vertices }
    }
}

fn signed_area(vertices: &[Point]) -> f64 {
    let n = vertices.len();
    if n < 3 {
        return 0.0;
    }
    // Relative to the first vertex to limit cancellation far from the origin.
    let o = vertices[0];
    let mut sum = 0.0;
    for i in 1..n - 1 {
        sum += (vertices[i] - o).cross(vertices[i + 1] - o);
    }
    0.5 * sum
}

/// Absolute shoelace area.
pub fn polygon_area(p: &Polygon) -> f64 {
    p.area()
}

/// Distance from `p` to the closed segment `a`–`b`.
pub fn point_segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let ab = b - a;
    let len2 = ab.dot(ab);
    if len2 <= EPS * EPS {
        return p.distance(a);
    }
    let t = ((p - a).dot(ab) / len2).clamp(0.0, 1.0);
    p.distance(a + ab * t)
}

fn orient(a: Point, b: Point, c: Point) -> f64 {
    (b - a).cross(c - a)
}

fn on_segment(p: Point, a: Point, b: Point) -> bool {
    point_segment_distance(p, a, b) <= EPS
}

/// Closed-segment intersection test (touching counts).
pub fn segments_intersect(a: Point, b: Point, c: Point, d: Point) -> bool {
    let d1 = orient(c, d, a);
    let d2 = orient(c, d, b);
    let d3 = orient(a, b, c);
    let d4 = orient(a, b, d);
    if ((d1 > EPS && d2 < -EPS) || (d1 < -EPS && d2 > EPS))
        && ((d3 > EPS && d4 < -EPS) || (d3 < -EPS && d4 > EPS))
    {
        return true;
    }
    on_segment(a, c, d) || on_segment(b, c, d) || on_segment(c, a, b) || on_segment(d, a, b)
}

/// Containment test; points on the boundary count as inside.
pub fn point_in_polygon(pt: Point, p: &Polygon) -> bool {
    let mut inside = false;
    for (a, b) in p.edges() {
        if on_segment(pt, a, b) {
            return true;
        }
        if (a.y > pt.y) != (b.y > pt.y) {
            let x = a.x + (pt.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if pt.x < x {
                inside = !inside;
            }
        }
    }
    inside
}

/// Area of `a ∩ b` for arbitrary simple polygons, convex or not.
///
/// Each polygon is decomposed into a fan of signed triangles whose signed
/// indicator functions sum to the polygon's winding number. The
/// intersection area is then the sum over all triangle pairs of the signed
/// product of their (convex) clipped overlap.
pub fn polygon_intersection_area(a: &Polygon, b: &Polygon) -> f64 {
    if !a.bbox().intersects(&b.bbox()) {
        return 0.0;
    }
    let sign_a = a.signed_area().signum();
    let sign_b = b.signed_area().signum();
    let fan_a = signed_fan(a.vertices());
    let fan_b = signed_fan(b.vertices());
    let mut total = 0.0;
    for (ta, sa) in &fan_a {
        let bb_a = BBox::from_points(ta).unwrap();
        for (tb, sb) in &fan_b {
            let bb_b = BBox::from_points(tb).unwrap();
            if !bb_a.intersects(&bb_b) {
                continue;
            }
            let overlap = convex_intersection_area(ta, tb);
            total += sa * sb * overlap;
        }
    }
    let area = total * sign_a * sign_b;
    area.clamp(0.0, a.area().min(b.area()))
}

/// Fan triangles from the first vertex, each stored counter-clockwise (y-up
/// sense) together with the sign of its original orientation.
fn signed_fan(v: &[Point]) -> Vec<([Point; 3], f64)> {
    let o = v[0];
    let mut out = Vec::with_capacity(v.len().saturating_sub(2));
    for i in 1..v.len() - 1 {
        let (p, q) = (v[i], v[i + 1]);
        let s = orient(o, p, q);
        if s.abs() <= EPS {
            continue;
        }
        if s > 0.0 {
            out.push(([o, p, q], 1.0));
        } else {
            out.push(([o, q, p], -1.0));
        }
    }
    out
}

/// Overlap area of two counter-clockwise convex polygons (Sutherland–Hodgman).
fn convex_intersection_area(subject: &[Point], clip: &[Point]) -> f64 {
    let mut poly: Vec<Point> = subject.to_vec();
    let m = clip.len();
    for i in 0..m {
        if poly.is_empty() {
            return 0.0;
        }
        let (c0, c1) = (clip[i], clip[(i + 1) % m]);
        let edge = c1 - c0;
        let inside = |p: Point| edge.cross(p - c0) >= 0.0;
        let input = std::mem::take(&mut poly);
        let k = input.len();
        for j in 0..k {
            let cur = input[j];
            let prev = input[(j + k - 1) % k];
            let (cin, pin) = (inside(cur), inside(prev));
            if cin {
                if !pin {
                    poly.push(line_intersection(prev, cur, c0, c1));
                }
                poly.push(cur);
            } else if pin {
                poly.push(line_intersection(prev, cur, c0, c1));
            }
        }
    }
    signed_area(&poly).abs()
}

fn line_intersection(p: Point, q: Point, a: Point, b: Point) -> Point {
    let r = q - p;
    let s = b - a;
    let denom = r.cross(s);
    if denom.abs() <= f64::MIN_POSITIVE {
        return p;
    }
    let t = ((a - p).cross(s) / denom).clamp(0.0, 1.0);
    p + r * t
}

/// Intersection over union; `union = area(a) + area(b) - inter`.
pub fn polygon_iou(a: &Polygon, b: &Polygon) -> f64 {
    let inter = polygon_intersection_area(a, b);
    let union = a.area() + b.area() - inter;
    if union <= 0.0 {
        return 0.0;
    }
    (inter / union).clamp(0.0, 1.0)
}

/// Smallest rectangle containing `points` with one side parallel to `axis`.
///
/// The first two vertices lie on the side to the left of `axis` (image
/// convention, see [`Point::left_normal`]), ordered along `axis`; the other
/// two follow around the rectangle.
pub fn oriented_rect(points: &[Point], axis: Point) -> Result<Polygon> {
    if points.is_empty() {
        return Err(Error::InvalidInput("empty point set".into()));
    }
    let u = axis
        .normalized()
        .ok_or_else(|| Error::InvalidInput(format!("zero axis {axis:?}")))?;
    let n = u.left_normal();
    let (mut umin, mut umax) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut nmin, mut nmax) = (f64::INFINITY, f64::NEG_INFINITY);
    for p in points {
        let (pu, pn) = (p.dot(u), p.dot(n));
        umin = umin.min(pu);
        umax = umax.max(pu);
        nmin = nmin.min(pn);
        nmax = nmax.max(pn);
    }
    if umax - umin <= EPS || nmax - nmin <= EPS {
        return Err(Error::Degenerate(format!(
            "circumscribed rectangle has zero extent ({} x {})",
            umax - umin,
            nmax - nmin
        )));
    }
    let at = |a: f64, b: f64| u * a + n * b;
    Polygon::new(vec![
        at(umin, nmax),
        at(umax, nmax),
        at(umax, nmin),
        at(umin, nmin),
    ])
}
