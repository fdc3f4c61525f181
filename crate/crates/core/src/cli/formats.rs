//! Text and binary formats: annotation lines, detection files and the
//! segment-prediction dump.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::geom::{Point, Polygon};
use crate::maskgrid::{ByteReader, SegmentPrediction};

pub const CTW_VALUES: usize = 28;
pub const TOTALTEXT_MIN_N: usize = 2;
pub const TOTALTEXT_MAX_N: usize = 15;
pub const SEGMENT_MAGIC: &[u8; 4] = b"SEGD";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AnnotationFormat {
    Ctw,
    TotalText,
    /// CTW for lines with exactly 28 values, Total-Text otherwise.
    #[default]
    Auto,
}

impl std::str::FromStr for AnnotationFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ctw" => Ok(AnnotationFormat::Ctw),
            "totaltext" => Ok(AnnotationFormat::TotalText),
            "auto" => Ok(AnnotationFormat::Auto),
            _ => Err(Error::InvalidInput(format!("unknown annotation format {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnnotationRecord {
    pub image_id: String,
    pub polygons: Vec<Polygon>,
}

fn points(values: &[f64]) -> Vec<Point> {
    values.chunks_exact(2).map(|c| Point::new(c[0], c[1])).collect()
}

fn ctw(line: &str) -> std::result::Result<Polygon, String> {
    let tokens: Vec<&str> = line.split(',').map(str::trim).collect();
    if tokens.len() != CTW_VALUES {
        return Err(format!("expected {CTW_VALUES} values, got {}", tokens.len()));
    }
    let values = tokens
        .iter()
        .map(|t| {
            t.parse::<i64>()
                .map(|v| v as f64)
                .map_err(|_| format!("`{t}` is not an integer"))
        })
        .collect::<std::result::Result<Vec<f64>, String>>()?;
    let poly = Polygon::new(points(&values)).map_err(|e| e.to_string())?;
    if !poly.is_simple() {
        return Err("polygon is self-intersecting".into());
    }
    Ok(poly)
}

fn totaltext(record: &str) -> std::result::Result<Polygon, String> {
    let values = record
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<f64>().map_err(|_| format!("`{t}` is not a number")))
        .collect::<std::result::Result<Vec<f64>, String>>()?;
    if values.len() % 2 != 0 {
        return Err(format!("odd number of coordinates ({})", values.len()));
    }
    let vertices = values.len() / 2;
    if vertices % 2 != 0 {
        return Err(format!("{vertices} vertices cannot split into top and bottom halves"));
    }
    let n = vertices / 2;
    if !(TOTALTEXT_MIN_N..=TOTALTEXT_MAX_N).contains(&n) {
        return Err(format!(
            "N = {n} outside [{TOTALTEXT_MIN_N}, {TOTALTEXT_MAX_N}]"
        ));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err("non-finite coordinate".into());
    }
    Polygon::new(points(&values)).map_err(|e| e.to_string())
}

/// One CTW-style line: 28 comma-separated integers `x1,y1,...,x14,y14`.
/// Tokens may be padded with whitespace.
pub fn parse_ctw_line(line: &str) -> Result<Polygon> {
    ctw(line).map_err(|m| Error::parse(1, m))
}

/// One Total-Text-style record: `2N` vertices (`4N` numbers, separated by
/// commas or whitespace) with `N` in `[2, 15]`.
pub fn parse_totaltext_record(record: &str) -> Result<Polygon> {
    totaltext(record).map_err(|m| Error::parse(1, m))
}

/// All polygons of an annotation file, one per non-blank line.
pub fn parse_annotation(text: &str, format: AnnotationFormat) -> Result<Vec<Polygon>> {
    let mut out = Vec::new();
    for (n, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let parsed = match format {
            AnnotationFormat::Ctw => ctw(line),
            AnnotationFormat::TotalText => totaltext(line),
            AnnotationFormat::Auto => {
                if line.split(',').count() == CTW_VALUES {
                    ctw(line)
                } else {
                    totaltext(line)
                }
            }
        };
        out.push(parsed.map_err(|m| Error::parse(n + 1, m))?);
    }
    Ok(out)
}

/// Vertex list as `x1,y1,x2,y2,...` with shortest exact float formatting.
pub fn format_coords(p: &Polygon) -> String {
    let mut s = String::new();
    for (i, v) in p.vertices().iter().enumerate() {
        if i > 0 {
            s.push(',');
        }
        let _ = write!(s, "{},{}", v.x, v.y);
    }
    s
}

/// CTW-style line for a polygon with integer coordinates.
pub fn format_ctw_line(p: &Polygon) -> String {
    format_coords(p)
}

pub fn parse_coords(tok: &str) -> std::result::Result<Polygon, String> {
    let values = tok
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| format!("`{t}` is not a number")))
        .collect::<std::result::Result<Vec<f64>, String>>()?;
    if values.len() % 2 != 0 {
        return Err(format!("odd number of coordinates ({})", values.len()));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err("non-finite coordinate".into());
    }
    Polygon::new(points(&values)).map_err(|e| e.to_string())
}

#[derive(Debug, Clone, PartialEq)]
pub struct Detection {
    pub image_id: String,
    pub score: f64,
    pub polygon: Polygon,
}

pub fn format_detection(d: &Detection) -> String {
    format!("{} {} {}", d.image_id, d.score, format_coords(&d.polygon))
}

pub fn write_detections(dets: &[Detection]) -> String {
    let mut s = String::new();
    for d in dets {
        s.push_str(&format_detection(d));
        s.push('\n');
    }
    s
}

/// Lines of `<image_id> <score> x1,y1,...`.
pub fn parse_detections(text: &str) -> Result<Vec<Detection>> {
    let mut out = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.is_empty() {
            continue;
        }
        if fields.len() != 3 {
            return Err(Error::parse(
                n + 1,
                format!("expected `<image_id> <score> <coords>`, got {} fields", fields.len()),
            ));
        }
        let score: f64 = fields[1]
            .parse()
            .ok()
            .filter(|s: &f64| s.is_finite())
            .ok_or_else(|| Error::parse(n + 1, format!("invalid score `{}`", fields[1])))?;
        let polygon = parse_coords(fields[2]).map_err(|m| Error::parse(n + 1, m))?;
        out.push(Detection {
            image_id: fields[0].to_string(),
            score,
            polygon,
        });
    }
    Ok(out)
}

/// Polygons from any line-oriented polygon file whose last whitespace
/// token holds the coordinates (detection files, bare coordinate lists).
pub fn parse_polygon_list(text: &str) -> Result<Vec<Polygon>> {
    let mut out = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let Some(last) = line.split_whitespace().last() else {
            continue;
        };
        out.push(parse_coords(last).map_err(|m| Error::parse(n + 1, m))?);
    }
    Ok(out)
}

/// Groups items by image id in order of first appearance.
pub fn group_by_image<T>(items: impl IntoIterator<Item = (String, T)>) -> Vec<(String, Vec<T>)> {
    let mut out: Vec<(String, Vec<T>)> = Vec::new();
    let mut index = std::collections::HashMap::new();
    for (id, item) in items {
        let slot = *index.entry(id.clone()).or_insert_with(|| {
            out.push((id, Vec::new()));
            out.len() - 1
        });
        out[slot].1.push(item);
    }
    out
}

/// Ground truth from a directory of `<image_id>.txt` annotation files, or
/// from a single polygon file with `<image_id> [<score>] <coords>` lines.
pub fn load_annotations(path: &Path, format: AnnotationFormat) -> Result<Vec<AnnotationRecord>> {
    if path.is_dir() {
        let mut files: Vec<_> = fs::read_dir(path)
            .map_err(|e| Error::io(path, e))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "txt"))
            .collect();
        files.sort();
        let mut out = Vec::with_capacity(files.len());
        for f in files {
            let text = fs::read_to_string(&f).map_err(|e| Error::io(&f, e))?;
            let polygons = parse_annotation(&text, format)
                .map_err(|e| Error::InvalidInput(format!("{}: {e}", f.display())))?;
            let image_id = f
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default();
            out.push(AnnotationRecord { image_id, polygons });
        }
        return Ok(out);
    }
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut rows = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.is_empty() {
            continue;
        }
        if !(2..=3).contains(&fields.len()) {
            return Err(Error::parse(n + 1, "expected `<image_id> [<score>] <coords>`"));
        }
        let poly = parse_coords(fields[fields.len() - 1]).map_err(|m| Error::parse(n + 1, m))?;
        rows.push((fields[0].to_string(), poly));
    }
    Ok(group_by_image(rows)
        .into_iter()
        .map(|(image_id, polygons)| AnnotationRecord { image_id, polygons })
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct SegmentRecord {
    pub image_id: String,
    pub prediction: SegmentPrediction,
}

fn check_image_id(id: &str) -> Result<()> {
    if id.is_empty() || id.chars().any(char::is_whitespace) {
        return Err(Error::InvalidInput(format!("image id {id:?} must be non-empty without whitespace")));
    }
    Ok(())
}

/// Text dump: per record a header `SEG <image_id> <cx> <cy> <side>
/// <resolution> <score>` followed by `resolution` rows of scores.
pub fn write_segment_dump_text(records: &[SegmentRecord]) -> Result<String> {
    let mut s = String::new();
    for r in records {
        check_image_id(&r.image_id)?;
        let p = &r.prediction;
        let _ = writeln!(
            s,
            "SEG {} {} {} {} {} {}",
            r.image_id, p.center.x, p.center.y, p.side, p.resolution, p.score
        );
        for row in p.scores.chunks(p.resolution) {
            let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            s.push_str(&line.join(" "));
            s.push('\n');
        }
    }
    Ok(s)
}

/// Parses the text dump. The trailing score field of a header is optional
/// and defaults to 1. Errors carry the byte offset of the offending line.
pub fn parse_segment_dump_text(text: &str) -> Result<Vec<SegmentRecord>> {
    let mut lines = Vec::new();
    let mut offset = 0;
    for line in text.split_inclusive('\n') {
        if !line.trim().is_empty() {
            lines.push((offset, line.trim_end_matches(['\n', '\r'])));
        }
        offset += line.len();
    }
    let mut out = Vec::new();
    let mut it = lines.into_iter();
    while let Some((off, header)) = it.next() {
        let f: Vec<&str> = header.split_whitespace().collect();
        if !(6..=7).contains(&f.len()) || f[0] != "SEG" {
            return Err(Error::format(
                off,
                "expected `SEG <image_id> <cx> <cy> <side> <resolution> [<score>]`",
            ));
        }
        let num = |i: usize, what: &str| -> Result<f64> {
            f[i].parse::<f64>()
                .map_err(|_| Error::format(off, format!("invalid {what} `{}`", f[i])))
        };
        let (cx, cy, side) = (num(2, "cx")?, num(3, "cy")?, num(4, "side")?);
        let res: usize = f[5]
            .parse()
            .ok()
            .filter(|&r| r > 0 && r <= 4096)
            .ok_or_else(|| Error::format(off, format!("invalid resolution `{}`", f[5])))?;
        let score: f32 = match f.get(6) {
            Some(t) => t
                .parse()
                .map_err(|_| Error::format(off, format!("invalid score `{t}`")))?,
            None => 1.0,
        };
        let mut scores = Vec::with_capacity(res * res);
        for row in 0..res {
            let (roff, line) = it.next().ok_or_else(|| {
                Error::format(text.len(), format!("record at byte {off} has {row} of {res} rows"))
            })?;
            let before = scores.len();
            for t in line.split_whitespace() {
                scores.push(
                    t.parse::<f32>()
                        .map_err(|_| Error::format(roff, format!("invalid score `{t}`")))?,
                );
            }
            if scores.len() - before != res {
                return Err(Error::format(
                    roff,
                    format!("expected {res} values, got {}", scores.len() - before),
                ));
            }
        }
        let prediction = SegmentPrediction::new(Point::new(cx, cy), side, res, scores, score)
            .map_err(|e| Error::format(off, e.to_string()))?;
        out.push(SegmentRecord {
            image_id: f[1].to_string(),
            prediction,
        });
    }
    Ok(out)
}

/// Binary dump: per record `SEGD`, u32 id length, id bytes (UTF-8), f64
/// cx, f64 cy, f64 side, u32 resolution, f32 score, then the row-major f32
/// scores, all little-endian.
pub fn write_segment_dump_binary(records: &[SegmentRecord]) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    for r in records {
        check_image_id(&r.image_id)?;
        let p = &r.prediction;
        out.extend_from_slice(SEGMENT_MAGIC);
        out.extend_from_slice(&(r.image_id.len() as u32).to_le_bytes());
        out.extend_from_slice(r.image_id.as_bytes());
        for v in [p.center.x, p.center.y, p.side] {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out.extend_from_slice(&(p.resolution as u32).to_le_bytes());
        out.extend_from_slice(&p.score.to_le_bytes());
        for v in &p.scores {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    Ok(out)
}

pub fn parse_segment_dump_binary(bytes: &[u8]) -> Result<Vec<SegmentRecord>> {
    let mut r = ByteReader::new(bytes);
    let mut out = Vec::new();
    while r.remaining() > 0 {
        let start = r.offset();
        if r.take(4)? != SEGMENT_MAGIC {
            return Err(Error::format(start, "missing SEGD magic"));
        }
        let id_len = r.u32()? as usize;
        let id_off = r.offset();
        let id = std::str::from_utf8(r.take(id_len)?)
            .map_err(|_| Error::format(id_off, "image id is not UTF-8"))?
            .to_string();
        check_image_id(&id).map_err(|e| Error::format(id_off, e.to_string()))?;
        let f64_at = |r: &mut ByteReader| -> Result<f64> {
            Ok(f64::from_le_bytes(r.take(8)?.try_into().unwrap()))
        };
        let (cx, cy, side) = (f64_at(&mut r)?, f64_at(&mut r)?, f64_at(&mut r)?);
        let res_off = r.offset();
        let res = r.u32()? as usize;
        let score = r.f32()?;
        let count = res
            .checked_mul(res)
            .filter(|&c| c.checked_mul(4).is_some_and(|b| b <= r.remaining()))
            .ok_or_else(|| Error::format(res_off, format!("resolution {res} exceeds remaining data")))?;
        let scores = (0..count).map(|_| r.f32()).collect::<Result<Vec<_>>>()?;
        let prediction = SegmentPrediction::new(Point::new(cx, cy), side, res, scores, score)
            .map_err(|e| Error::format(start, e.to_string()))?;
        out.push(SegmentRecord { image_id: id, prediction });
    }
    Ok(out)
}

/// Reads a dump file in either form; binary files start with `SEGD`.
pub fn read_segment_dump(path: &Path) -> Result<Vec<SegmentRecord>> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    if bytes.starts_with(SEGMENT_MAGIC) {
        return parse_segment_dump_binary(&bytes);
    }
    let text = std::str::from_utf8(&bytes).map_err(|e| Error::format(e.valid_up_to(), "dump is not UTF-8 text"))?;
    parse_segment_dump_text(text)
}
