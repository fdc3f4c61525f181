//! Score grids, binary grids, and segment masks.
//!
//! A [`ScoreGrid`] holds per-cell scores in `[0, 1]`. A [`BitGrid`] is a
//! binary grid placed in image space by an origin and a stride; it doubles as
//! the merging canvas. A [`SegmentMask`] is the binarized mask of a single
//! square proposal.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::geom::Point;

const SCOREGRID_MAGIC: &[u8; 4] = b"SGRD";

#[derive(Debug, Clone, PartialEq)]
pub struct ScoreGrid {
    width: usize,
    height: usize,
    stride: f32,
    values: Vec<f32>,
}

impl ScoreGrid {
    pub fn new(width: usize, height: usize, stride: f32, values: Vec<f32>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidInput(format!(
                "score grid must be non-empty, got {width}x{height}"
            )));
        }
        if !(stride > 0.0 && stride.is_finite()) {
            return Err(Error::InvalidInput(format!("stride must be > 0, got {stride}")));
        }
        if values.len() != width * height {
            return Err(Error::ShapeMismatch(format!(
                "{} values for a {width}x{height} grid",
                values.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::InvalidInput(format!("score {v} outside [0, 1]")));
        }
        Ok(Self {
            width,
            height,
            stride,
            values,
        })
    }

    pub fn filled(width: usize, height: usize, stride: f32, value: f32) -> Result<Self> {
        Self::new(width, height, stride, vec![value; width * height])
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn stride(&self) -> f32 {
        self.stride
    }

    pub fn values(&self) -> &[f32] {
        &self.values
    }

    pub fn get(&self, col: usize, row: usize) -> f32 {
        self.values[row * self.width + col]
    }

    pub fn same_shape(&self, other: &ScoreGrid) -> bool {
        self.width == other.width && self.height == other.height
    }

    /// Text form: a `SCOREGRID <width> <height> <stride>` header followed by
    /// one line of space-separated scores per row.
    pub fn to_text(&self) -> String {
        let mut out = format!("SCOREGRID {} {} {}\n", self.width, self.height, self.stride);
        for row in self.values.chunks(self.width) {
            for (i, v) in row.iter().enumerate() {
                if i > 0 {
                    out.push(' ');
                }
                let _ = write!(out, "{v}");
            }
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (hline, header) = lines
            .next()
            .ok_or_else(|| Error::parse(1, "missing SCOREGRID header"))?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 4 || fields[0] != "SCOREGRID" {
            return Err(Error::parse(
                hline + 1,
                "expected `SCOREGRID <width> <height> <stride>`",
            ));
        }
        let width: usize = parse_field(fields[1], hline + 1, "width")?;
        let height: usize = parse_field(fields[2], hline + 1, "height")?;
        let stride: f32 = parse_field(fields[3], hline + 1, "stride")?;
        let mut values = Vec::with_capacity(width.saturating_mul(height).min(1 << 24));
        let mut rows = 0;
        for (lno, line) in lines {
            if rows == height {
                return Err(Error::parse(lno + 1, format!("more than {height} rows")));
            }
            let before = values.len();
            for tok in line.split_whitespace() {
                values.push(parse_field::<f32>(tok, lno + 1, "score")?);
            }
            if values.len() - before != width {
                return Err(Error::parse(
                    lno + 1,
                    format!("expected {width} values, got {}", values.len() - before),
                ));
            }
            rows += 1;
        }
        if rows != height {
            return Err(Error::parse(
                hline + 1,
                format!("expected {height} rows, got {rows}"),
            ));
        }
        Self::new(width, height, stride, values).map_err(|e| Error::parse(hline + 1, e.to_string()))
    }

    /// Binary form: `SGRD`, u32 width, u32 height, f32 stride, then the
    /// row-major f32 scores, all little-endian.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(16 + 4 * self.values.len());
        out.extend_from_slice(SCOREGRID_MAGIC);
        out.extend_from_slice(&(self.width as u32).to_le_bytes());
        out.extend_from_slice(&(self.height as u32).to_le_bytes());
        out.extend_from_slice(&self.stride.to_le_bytes());
        for v in &self.values {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = ByteReader::new(bytes);
        let magic = r.take(4)?;
        if magic != SCOREGRID_MAGIC {
            return Err(Error::format(0, "missing SGRD magic"));
        }
        let width = r.u32()? as usize;
        let height = r.u32()? as usize;
        let stride = r.f32()?;
        let count = width
            .checked_mul(height)
            .ok_or_else(|| Error::format(4, "grid size overflows"))?;
        if r.remaining() != count * 4 {
            return Err(Error::format(
                r.offset(),
                format!("expected {} payload bytes, found {}", count * 4, r.remaining()),
            ));
        }
        let values = (0..count).map(|_| r.f32()).collect::<Result<Vec<_>>>()?;
        Self::new(width, height, stride, values).map_err(|e| Error::format(4, e.to_string()))
    }
}

pub(crate) fn parse_field<T: std::str::FromStr>(tok: &str, line: usize, what: &str) -> Result<T> {
    tok.trim()
        .parse()
        .map_err(|_| Error::parse(line, format!("invalid {what} `{tok}`")))
}

/// Little-endian cursor that reports the byte offset of every failure.
pub(crate) struct ByteReader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> ByteReader<'a> {
    pub(crate) fn new(bytes: &'a [u8]) -> Self {
        Self { bytes, pos: 0 }
    }

    pub(crate) fn offset(&self) -> usize {
        self.pos
    }

    pub(crate) fn remaining(&self) -> usize {
        self.bytes.len() - self.pos
    }

    pub(crate) fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.remaining() < n {
            return Err(Error::format(
                self.pos,
                format!("unexpected end of data (need {n} bytes, have {})", self.remaining()),
            ));
        }
        let s = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    pub(crate) fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    pub(crate) fn f32(&mut self) -> Result<f32> {
        Ok(f32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }
}

/// Binary grid placed in image space: cell `(col, row)` covers
/// `origin + [col, col+1) × [row, row+1) · stride`.
#[derive(Debug, Clone, PartialEq)]
pub struct BitGrid {
    width: usize,
    height: usize,
    origin: Point,
    stride: f64,
    bits: Vec<bool>,
}

impl BitGrid {
    pub fn empty(width: usize, height: usize, origin: Point, stride: f64) -> Self {
        assert!(stride > 0.0, "stride must be positive");
        Self {
            width,
            height,
            origin,
            stride,
            bits: vec![false; width * height],
        }
    }

    pub fn from_bits(
        width: usize,
        height: usize,
        origin: Point,
        stride: f64,
        bits: Vec<bool>,
    ) -> Result<Self> {
        if bits.len() != width * height {
            return Err(Error::ShapeMismatch(format!(
                "{} bits for a {width}x{height} grid",
                bits.len()
            )));
        }
        if !(stride > 0.0 && stride.is_finite()) {
            return Err(Error::InvalidInput(format!("stride must be > 0, got {stride}")));
        }
        Ok(Self {
            width,
            height,
            origin,
            stride,
            bits,
        })
    }

    /// Smallest canvas aligned to multiples of `stride` that covers the
    /// image-space rectangle `[min, max]`.
    pub fn covering(min: Point, max: Point, stride: f64) -> Self {
        let x0 = (min.x / stride).floor();
        let y0 = (min.y / stride).floor();
        let x1 = (max.x / stride).ceil();
        let y1 = (max.y / stride).ceil();
        let width = ((x1 - x0) as usize).max(1);
        let height = ((y1 - y0) as usize).max(1);
        Self::empty(width, height, Point::new(x0 * stride, y0 * stride), stride)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn origin(&self) -> Point {
        self.origin
    }

    pub fn stride(&self) -> f64 {
        self.stride
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn get(&self, col: usize, row: usize) -> bool {
        self.bits[row * self.width + col]
    }

    pub fn set(&mut self, col: usize, row: usize, value: bool) {
        self.bits[row * self.width + col] = value;
    }

    /// Image-space center of a cell.
    pub fn cell_center(&self, col: usize, row: usize) -> Point {
        Point::new(
            self.origin.x + (col as f64 + 0.5) * self.stride,
            self.origin.y + (row as f64 + 0.5) * self.stride,
        )
    }

    /// Centers of all set cells in row-major order.
    pub fn set_cell_centers(&self) -> Vec<Point> {
        self.iter_set()
            .map(|(c, r)| self.cell_center(c, r))
            .collect()
    }

    pub fn iter_set(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let w = self.width;
        self.bits
            .iter()
            .enumerate()
            .filter(|(_, b)| **b)
            .map(move |(i, _)| (i % w, i / w))
    }

    pub fn same_frame(&self, other: &BitGrid) -> bool {
        self.width == other.width
            && self.height == other.height
            && self.stride == other.stride
            && self.origin == other.origin
    }

    pub fn or_assign(&mut self, other: &BitGrid) -> Result<()> {
        if !self.same_frame(other) {
            return Err(Error::ShapeMismatch("grids differ in frame".into()));
        }
        for (a, b) in self.bits.iter_mut().zip(&other.bits) {
            *a |= *b;
        }
        Ok(())
    }

    /// 0/1 score grid with the same dimensions and stride.
    pub fn to_score_grid(&self) -> ScoreGrid {
        let values = self.bits.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect();
        ScoreGrid::new(self.width.max(1), self.height.max(1), self.stride as f32, values)
            .expect("bit grid dimensions are valid")
    }
}

/// Cell is 1 iff its score is strictly greater than `s1`.
pub fn binarize(g: &ScoreGrid, s1: f64) -> BitGrid {
    let bits = g.values.iter().map(|&v| f64::from(v) > s1).collect();
    BitGrid {
        width: g.width,
        height: g.height,
        origin: Point::default(),
        stride: f64::from(g.stride),
        bits,
    }
}

pub fn mask_area(m: &BitGrid) -> usize {
    m.bits.iter().filter(|b| **b).count()
}

/// `area(a ∩ b) / min(area(a), area(b))`, or 0 when either is empty.
pub fn overlap_ratio_min(a: &BitGrid, b: &BitGrid) -> Result<f64> {
    if !a.same_frame(b) {
        return Err(Error::ShapeMismatch("overlap of grids in different frames".into()));
    }
    let (area_a, area_b) = (mask_area(a), mask_area(b));
    let min = area_a.min(area_b);
    if min == 0 {
        return Ok(0.0);
    }
    let inter = a.bits.iter().zip(&b.bits).filter(|(x, y)| **x && **y).count();
    Ok(inter as f64 / min as f64)
}

/// Binarized mask of one square proposal. `origin` is the image-space
/// top-left corner of the square.
#[derive(Debug, Clone, PartialEq)]
pub struct SegmentMask {
    origin: Point,
    side: f64,
    resolution: usize,
    bits: Vec<bool>,
}

impl SegmentMask {
    pub fn new(origin: Point, side: f64, resolution: usize, bits: Vec<bool>) -> Result<Self> {
        if !(side > 0.0 && side.is_finite()) || !origin.is_finite() {
            return Err(Error::InvalidInput(format!(
                "segment square must have finite origin and positive side, got {origin:?} / {side}"
            )));
        }
        if resolution == 0 {
            return Err(Error::InvalidInput("mask resolution must be positive".into()));
        }
        if bits.len() != resolution * resolution {
            return Err(Error::ShapeMismatch(format!(
                "{} mask cells for resolution {resolution}",
                bits.len()
            )));
        }
        Ok(Self {
            origin,
            side,
            resolution,
            bits,
        })
    }

    pub fn origin(&self) -> Point {
        self.origin
    }

    pub fn side(&self) -> f64 {
        self.side
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn is_empty(&self) -> bool {
        !self.bits.iter().any(|b| *b)
    }

    pub fn center(&self) -> Point {
        self.origin + Point::new(self.side, self.side) * 0.5
    }

    /// Nearest-neighbor lookup at an image-space point; `None` outside the square.
    pub fn sample(&self, p: Point) -> Option<bool> {
        let u = (p.x - self.origin.x) / self.side;
        let v = (p.y - self.origin.y) / self.side;
        if !(0.0..1.0).contains(&u) || !(0.0..1.0).contains(&v) {
            return None;
        }
        let res = self.resolution;
        let col = ((u * res as f64) as usize).min(res - 1);
        let row = ((v * res as f64) as usize).min(res - 1);
        Some(self.bits[row * res + col])
    }
}

/// Scored mask of one square proposal, as emitted by a detector: a
/// `resolution × resolution` score grid over the square centered at
/// `center`, plus the square's classification score.
#[derive(Debug, Clone, PartialEq)]
pub struct SegmentPrediction {
    pub center: Point,
    pub side: f64,
    pub resolution: usize,
    pub scores: Vec<f32>,
    pub score: f32,
}

impl SegmentPrediction {
    pub fn new(center: Point, side: f64, resolution: usize, scores: Vec<f32>, score: f32) -> Result<Self> {
        if !(side > 0.0 && side.is_finite()) || !center.is_finite() {
            return Err(Error::InvalidInput(format!(
                "segment square must have finite center and positive side, got {center:?} / {side}"
            )));
        }
        if resolution == 0 {
            return Err(Error::InvalidInput("mask resolution must be positive".into()));
        }
        if scores.len() != resolution * resolution {
            return Err(Error::ShapeMismatch(format!(
                "{} mask scores for resolution {resolution}",
                scores.len()
            )));
        }
        if let Some(v) = scores.iter().chain(std::iter::once(&score)).find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::InvalidInput(format!("score {v} outside [0, 1]")));
        }
        Ok(Self {
            center,
            side,
            resolution,
            scores,
            score,
        })
    }

    pub fn origin(&self) -> Point {
        self.center - Point::new(self.side, self.side) * 0.5
    }

    pub fn score_grid(&self) -> ScoreGrid {
        ScoreGrid::new(
            self.resolution,
            self.resolution,
            (self.side / self.resolution as f64) as f32,
            self.scores.clone(),
        )
        .expect("validated on construction")
    }

    /// Mask of cells scoring strictly above `s1`.
    pub fn binarize(&self, s1: f64) -> SegmentMask {
        let bits = self.scores.iter().map(|&v| f64::from(v) > s1).collect();
        SegmentMask::new(self.origin(), self.side, self.resolution, bits)
            .expect("validated on construction")
    }

    /// Mean score of the cells above `s1`, or 0 when there are none.
    pub fn mean_positive_score(&self, s1: f64) -> f64 {
        let (sum, n) = self
            .scores
            .iter()
            .filter(|v| f64::from(**v) > s1)
            .fold((0.0, 0usize), |(s, n), v| (s + f64::from(*v), n + 1));
        if n == 0 {
            0.0
        } else {
            sum / n as f64
        }
    }
}

/// A mask resampled into a canvas frame, stored as a window of canvas cells.
#[derive(Debug, Clone)]
pub(crate) struct Footprint {
    pub col0: usize,
    pub row0: usize,
    pub width: usize,
    pub height: usize,
    pub bits: Vec<bool>,
    pub area: usize,
}

impl Footprint {
    pub(crate) fn of(frame: &BitGrid, m: &SegmentMask) -> Footprint {
        let s = frame.stride;
        let rel = m.origin - frame.origin;
        // Canvas cells whose centers fall inside the square [rel, rel + side).
        let first = |a: f64| ((a / s - 0.5).ceil().max(0.0)) as usize;
        let last = |a: f64, limit: usize| (((a + m.side) / s - 0.5).ceil().max(0.0) as usize).min(limit);
        let (col0, col1) = (first(rel.x).min(frame.width), last(rel.x, frame.width));
        let (row0, row1) = (first(rel.y).min(frame.height), last(rel.y, frame.height));
        let width = col1.saturating_sub(col0);
        let height = row1.saturating_sub(row0);
        let mut bits = vec![false; width * height];
        let mut area = 0;
        for r in 0..height {
            for c in 0..width {
                let center = frame.cell_center(col0 + c, row0 + r);
                if m.sample(center) == Some(true) {
                    bits[r * width + c] = true;
                    area += 1;
                }
            }
        }
        Footprint {
            col0,
            row0,
            width,
            height,
            bits,
            area,
        }
    }

    pub(crate) fn intersection(&self, other: &Footprint) -> usize {
        let c0 = self.col0.max(other.col0);
        let c1 = (self.col0 + self.width).min(other.col0 + other.width);
        let r0 = self.row0.max(other.row0);
        let r1 = (self.row0 + self.height).min(other.row0 + other.height);
        let mut count = 0;
        for r in r0..r1 {
            for c in c0..c1 {
                let a = self.bits[(r - self.row0) * self.width + (c - self.col0)];
                let b = other.bits[(r - other.row0) * other.width + (c - other.col0)];
                count += usize::from(a && b);
            }
        }
        count
    }

    pub(crate) fn or_into(&self, canvas: &mut BitGrid) {
        for r in 0..self.height {
            for c in 0..self.width {
                if self.bits[r * self.width + c] {
                    canvas.set(self.col0 + c, self.row0 + r, true);
                }
            }
        }
    }
}

/// OR of `m` resampled (nearest neighbor) into a copy of `canvas`. Parts of the
/// mask outside the canvas are clipped.
pub fn paste(canvas: &BitGrid, m: &SegmentMask) -> BitGrid {
    let mut out = canvas.clone();
    Footprint::of(canvas, m).or_into(&mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn full_mask(origin: Point, side: f64, res: usize) -> SegmentMask {
        SegmentMask::new(origin, side, res, vec![true; res * res]).unwrap()
    }

    #[test]
    fn binarize_is_strict() {
        let g = ScoreGrid::new(3, 1, 1.0, vec![0.4, 0.5, 0.6]).unwrap();
        assert_eq!(binarize(&g, 0.5).bits(), &[false, false, true]);
        let hi = ScoreGrid::filled(2, 2, 1.0, 0.9).unwrap();
        assert!(binarize(&hi, 0.5).bits().iter().all(|b| *b));
        let lo = ScoreGrid::filled(2, 2, 1.0, 0.0).unwrap();
        assert_eq!(mask_area(&binarize(&lo, 0.5)), 0);
    }

    #[test]
    fn areas() {
        let g = BitGrid::empty(4, 4, Point::default(), 1.0);
        assert_eq!(mask_area(&g), 0);
        let ones = BitGrid::from_bits(4, 4, Point::default(), 1.0, vec![true; 16]).unwrap();
        assert_eq!(mask_area(&ones), 16);
        let checker = (0..16).map(|i| (i % 4 + i / 4) % 2 == 0).collect();
        let checker = BitGrid::from_bits(4, 4, Point::default(), 1.0, checker).unwrap();
        assert_eq!(mask_area(&checker), 8);
    }

    #[test]
    fn overlap_ratio_examples() {
        let mk = |bits: &[u8]| {
            BitGrid::from_bits(4, 1, Point::default(), 1.0, bits.iter().map(|b| *b == 1).collect())
                .unwrap()
        };
        let a = mk(&[1, 1, 0, 0]);
        assert_eq!(overlap_ratio_min(&a, &a).unwrap(), 1.0);
        assert_eq!(overlap_ratio_min(&a, &mk(&[0, 0, 1, 1])).unwrap(), 0.0);
        assert_eq!(overlap_ratio_min(&mk(&[0, 1, 0, 0]), &mk(&[1, 1, 1, 0])).unwrap(), 1.0);
        assert_eq!(overlap_ratio_min(&a, &mk(&[0, 0, 0, 0])).unwrap(), 0.0);
        let other = BitGrid::empty(5, 1, Point::default(), 1.0);
        assert!(overlap_ratio_min(&a, &other).is_err());
    }

    #[test]
    fn paste_footprint() {
        let canvas = BitGrid::empty(16, 16, Point::default(), 2.0);
        let m = full_mask(Point::new(4.0, 4.0), 8.0, 8);
        let once = paste(&canvas, &m);
        assert_eq!(mask_area(&once), 16);
        for (c, r) in once.iter_set() {
            assert!((2..6).contains(&c) && (2..6).contains(&r));
        }
        assert_eq!(paste(&once, &m), once);
        let shifted = full_mask(Point::new(8.0, 4.0), 8.0, 8);
        assert_eq!(mask_area(&paste(&once, &shifted)), 24);
    }

    #[test]
    fn paste_clips_out_of_bounds() {
        let canvas = BitGrid::empty(4, 4, Point::default(), 1.0);
        let m = full_mask(Point::new(-2.0, -2.0), 4.0, 4);
        let out = paste(&canvas, &m);
        assert_eq!(mask_area(&out), 4);
        let gone = full_mask(Point::new(10.0, 10.0), 4.0, 4);
        assert_eq!(mask_area(&paste(&canvas, &gone)), 0);
    }

    #[test]
    fn paste_resamples_nearest() {
        // Left half of a 2x2 mask set; pasted into a 4x4 canvas covering it.
        let m = SegmentMask::new(Point::default(), 4.0, 2, vec![true, false, true, false]).unwrap();
        let out = paste(&BitGrid::empty(4, 4, Point::default(), 1.0), &m);
        for r in 0..4 {
            for c in 0..4 {
                assert_eq!(out.get(c, r), c < 2);
            }
        }
    }

    #[test]
    fn covering_canvas_is_stride_aligned() {
        let g = BitGrid::covering(Point::new(-5.0, 3.0), Point::new(9.0, 10.0), 4.0);
        assert_eq!(g.origin(), Point::new(-8.0, 0.0));
        assert_eq!((g.width(), g.height()), (5, 3));
    }

    #[test]
    fn scoregrid_rejects_bad_input() {
        assert!(ScoreGrid::new(2, 2, 1.0, vec![0.0; 3]).is_err());
        assert!(ScoreGrid::new(1, 1, 0.0, vec![0.0]).is_err());
        assert!(ScoreGrid::new(1, 1, 1.0, vec![1.5]).is_err());
        assert!(ScoreGrid::new(1, 1, 1.0, vec![f32::NAN]).is_err());
    }

    #[test]
    fn scoregrid_text_format() {
        let g = ScoreGrid::new(3, 2, 4.0, vec![0.0, 0.25, 1.0, 0.5, 0.125, 0.1]).unwrap();
        let text = g.to_text();
        assert!(text.starts_with("SCOREGRID 3 2 4\n0 0.25 1\n"));
        assert_eq!(ScoreGrid::from_text(&text).unwrap(), g);
        assert!(ScoreGrid::from_text("SCOREGRID 2 1 1\n0.5\n").is_err());
        assert!(ScoreGrid::from_text("SCOREGRID 1 2 1\n0.5\n").is_err());
        assert!(ScoreGrid::from_text("GRID 1 1 1\n0.5\n").is_err());
        assert!(ScoreGrid::from_text("").is_err());
    }

    #[test]
    fn scoregrid_binary_format() {
        let g = ScoreGrid::new(2, 2, 8.0, vec![0.0, 0.3, 0.7, 1.0]).unwrap();
        let bytes = g.to_bytes();
        assert_eq!(&bytes[..4], b"SGRD");
        assert_eq!(&bytes[4..8], &2u32.to_le_bytes());
        assert_eq!(&bytes[12..16], &8.0f32.to_le_bytes());
        assert_eq!(bytes.len(), 16 + 16);
        assert_eq!(ScoreGrid::from_bytes(&bytes).unwrap(), g);
        match ScoreGrid::from_bytes(&bytes[..20]) {
            Err(Error::Format { offset, .. }) => assert_eq!(offset, 16),
            other => panic!("unexpected {other:?}"),
        }
    }
}
