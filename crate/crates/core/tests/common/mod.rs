//! Oracles and generators shared by the integration tests and the
//! acceptance runner. Nothing here calls into the code it is used to check,
//! apart from building inputs.

#![allow(dead_code)]

use std::collections::BTreeSet;

use curvetext::maskgrid::{overlap_ratio_min, paste, SegmentMask};
use curvetext::merge::{canvas_for, MergeConfig};
use curvetext::{Point, Polygon};
use rand::rngs::StdRng;
use rand::Rng;

/// Star-shaped polygon around `c` with `n` vertices at sorted random angles
/// and radii in `[0.25, 1] * r`. Concave for almost every draw.
pub fn star_polygon(rng: &mut StdRng, c: Point, r: f64, n: usize) -> Polygon {
    let mut angles: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..std::f64::consts::TAU)).collect();
    angles.sort_by(f64::total_cmp);
    let v = angles
        .iter()
        .map(|&a| {
            let rad = r * rng.random_range(0.25..1.0);
            Point::new(c.x + rad * a.cos(), c.y + rad * a.sin())
        })
        .collect();
    Polygon::new(v).expect("star polygon")
}

pub fn is_concave(p: &Polygon) -> bool {
    let v = p.vertices();
    let n = v.len();
    let sign = p.signed_area().signum();
    (0..n).any(|i| {
        let (a, b, c) = (v[i], v[(i + 1) % n], v[(i + 2) % n]);
        (b - a).cross(c - b) * sign < 0.0
    })
}

/// Winding number of `p` with respect to a closed ring.
pub fn winding_number(p: Point, ring: &[Point]) -> i32 {
    let mut wn = 0;
    for i in 0..ring.len() {
        let (a, b) = (ring[i], ring[(i + 1) % ring.len()]);
        let side = (b.x - a.x) * (p.y - a.y) - (p.x - a.x) * (b.y - a.y);
        if a.y <= p.y {
            if b.y > p.y && side > 0.0 {
                wn += 1;
            }
        } else if b.y <= p.y && side < 0.0 {
            wn -= 1;
        }
    }
    wn
}

/// IoU estimated from `samples` uniform points over the joint bounding box.
pub fn monte_carlo_iou(a: &Polygon, b: &Polygon, samples: usize, rng: &mut StdRng) -> f64 {
    let bb = a.bbox().union(&b.bbox());
    let (mut inter, mut uni) = (0usize, 0usize);
    for _ in 0..samples {
        let p = Point::new(
            rng.random_range(bb.min.x..bb.max.x),
            rng.random_range(bb.min.y..bb.max.y),
        );
        let ia = winding_number(p, a.vertices()) != 0;
        let ib = winding_number(p, b.vertices()) != 0;
        inter += (ia && ib) as usize;
        uni += (ia || ib) as usize;
    }
    if uni == 0 {
        0.0
    } else {
        inter as f64 / uni as f64
    }
}

/// Up to `max` masks of random position, size and resolution. Most are
/// blobs so that overlaps are common; a few are sparse noise or empty.
pub fn random_masks(rng: &mut StdRng, max: usize) -> Vec<SegmentMask> {
    let n = rng.random_range(1..=max);
    let mut masks = Vec::with_capacity(n);
    for _ in 0..n {
        let res = rng.random_range(2..=12usize);
        let side = rng.random_range(4.0..40.0f64);
        let origin = Point::new(rng.random_range(0.0..80.0), rng.random_range(0.0..80.0));
        let kind = rng.random_range(0..10);
        let h = (res as f64 - 1.0) / 2.0;
        let shrink = rng.random_range(0.6..1.0);
        let mut bits = Vec::with_capacity(res * res);
        for k in 0..res * res {
            let (r, c) = ((k / res) as f64, (k % res) as f64);
            bits.push(match kind {
                0 => false,
                1 | 2 => rng.random_bool(0.3),
                _ => (r - h).powi(2) + (c - h).powi(2) <= (h + 0.5).powi(2) * shrink,
            });
        }
        masks.push(SegmentMask::new(origin, side, res, bits).unwrap());
    }
    masks
}

/// Connected components of the "overlap ratio above s2" graph, found by
/// pasting every mask onto its own full canvas and flooding a plain
/// adjacency matrix.
pub fn oracle_partition(masks: &[SegmentMask], cfg: &MergeConfig) -> BTreeSet<BTreeSet<usize>> {
    let Some(canvas) = canvas_for(masks, cfg.canvas_stride) else {
        return BTreeSet::new();
    };
    let pasted: Vec<_> = masks.iter().map(|m| paste(&canvas, m)).collect();
    let n = masks.len();
    let mut adj = vec![vec![false; n]; n];
    for i in 0..n {
        for j in 0..n {
            if i != j && overlap_ratio_min(&pasted[i], &pasted[j]).unwrap() > cfg.s2 {
                adj[i][j] = true;
            }
        }
    }
    let mut seen = vec![false; n];
    let mut parts = BTreeSet::new();
    for s in 0..n {
        if seen[s] {
            continue;
        }
        let mut comp = BTreeSet::new();
        let mut stack = vec![s];
        seen[s] = true;
        while let Some(x) = stack.pop() {
            comp.insert(x);
            for y in 0..n {
                if adj[x][y] && !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
        parts.insert(comp);
    }
    parts
}

/// 14-vertex band `[x0, x1] × [y0, y1]` in annotation order with integer
/// corners and evenly spaced edge vertices.
pub fn ctw_band(x0: i64, y0: i64, x1: i64, y1: i64) -> Polygon {
    let xs: Vec<f64> = (0..7).map(|i| (x0 + (x1 - x0) * i / 6) as f64).collect();
    let mut v: Vec<Point> = xs.iter().map(|&x| Point::new(x, y0 as f64)).collect();
    v.extend(xs.iter().rev().map(|&x| Point::new(x, y1 as f64)));
    Polygon::new(v).unwrap()
}

const ALPHABET: &[&str] = &[
    "0", "1", "7", "-", ",", ".", " ", "\t", "e", "x", "NaN", "inf", "1e308", "9999999999999999999999", "é", "#", "\u{0}",
];

/// One random edit of `line`: drop, duplicate or swap a token, insert or
/// delete a character, splice in junk, or truncate.
pub fn mutate(line: &str, rng: &mut StdRng) -> String {
    let mut tokens: Vec<String> = line.split(',').map(str::to_string).collect();
    match rng.random_range(0..8) {
        0 if !tokens.is_empty() => {
            tokens.remove(rng.random_range(0..tokens.len()));
            tokens.join(",")
        }
        1 if !tokens.is_empty() => {
            let i = rng.random_range(0..tokens.len());
            tokens.insert(i, tokens[i].clone());
            tokens.join(",")
        }
        2 if tokens.len() > 1 => {
            let (i, j) = (rng.random_range(0..tokens.len()), rng.random_range(0..tokens.len()));
            tokens.swap(i, j);
            tokens.join(",")
        }
        3 if !tokens.is_empty() => {
            let i = rng.random_range(0..tokens.len());
            tokens[i] = ALPHABET[rng.random_range(0..ALPHABET.len())].to_string();
            tokens.join(",")
        }
        4 => {
            let chars: Vec<char> = line.chars().collect();
            let cut = rng.random_range(0..=chars.len());
            chars[..cut].iter().collect()
        }
        5 => {
            let mut chars: Vec<char> = line.chars().collect();
            if !chars.is_empty() {
                chars.remove(rng.random_range(0..chars.len()));
            }
            chars.into_iter().collect()
        }
        _ => {
            let chars: Vec<char> = line.chars().collect();
            let at = rng.random_range(0..=chars.len());
            let junk = ALPHABET[rng.random_range(0..ALPHABET.len())];
            let mut s: String = chars[..at].iter().collect();
            s.push_str(junk);
            s.extend(&chars[at..]);
            s
        }
    }
}

/// Tally of one fuzzing run.
#[derive(Debug, Default)]
pub struct FuzzReport {
    pub cases: usize,
    pub rejected: usize,
    pub panics: usize,
    /// Inputs accepted although the result breaks the format's rules.
    pub bad_accepts: usize,
}

impl FuzzReport {
    pub fn clean(&self) -> bool {
        self.panics == 0 && self.bad_accepts == 0
    }
}

/// A well-formed CTW line, Total-Text record, detection line and text
/// dump, each derived from one random band.
pub fn seed_inputs(rng: &mut StdRng) -> Vec<String> {
    use curvetext::cli::formats::{format_coords, format_ctw_line};
    let x0 = rng.random_range(-50..200i64);
    let y0 = rng.random_range(-50..200i64);
    let band = ctw_band(x0, y0, x0 + rng.random_range(12..300), y0 + rng.random_range(5..60));
    let res = rng.random_range(1..4usize);
    let rows: Vec<String> = (0..res)
        .map(|_| (0..res).map(|_| format!("{}", rng.random_range(0.0..1.0f32))).collect::<Vec<_>>().join(" "))
        .collect();
    vec![
        format_ctw_line(&band),
        format_coords(&band),
        format!("img_{x0} 0.75 {}", format_coords(&band)),
        format!("SEG img {x0} {y0} 16 {res} 0.5\n{}\n", rows.join("\n")),
    ]
}

/// Runs every text parser on `iterations` mutated inputs, each mutated one
/// to three times, catching panics.
pub fn fuzz_parsers(iterations: usize, rng: &mut StdRng) -> FuzzReport {
    use curvetext::cli::formats::{
        parse_annotation, parse_ctw_line, parse_detections, parse_segment_dump_text, parse_totaltext_record,
        AnnotationFormat,
    };
    let mut report = FuzzReport::default();
    for _ in 0..iterations {
        let seeds = seed_inputs(rng);
        let which = rng.random_range(0..=seeds.len());
        let mut s = seeds[which % seeds.len()].clone();
        for _ in 0..rng.random_range(1..=3) {
            s = mutate(&s, rng);
        }
        report.cases += 1;
        let outcome = std::panic::catch_unwind(|| match which {
            0 => match parse_ctw_line(&s) {
                Ok(p) => Some(p.len() == 14 && p.is_simple()),
                Err(_) => None,
            },
            1 => match parse_totaltext_record(&s) {
                Ok(p) => Some(p.len() % 2 == 0 && (4..=30).contains(&p.len())),
                Err(_) => None,
            },
            2 => match parse_detections(&s) {
                Ok(d) => Some(d.iter().all(|d| d.score.is_finite())),
                Err(_) => None,
            },
            3 => match parse_segment_dump_text(&s) {
                Ok(r) => Some(r.iter().all(|r| r.prediction.scores.len() == r.prediction.resolution.pow(2))),
                Err(_) => None,
            },
            _ => parse_annotation(&s, AnnotationFormat::Auto).ok().map(|v| v.len() <= 1),
        });
        match outcome {
            Err(_) => report.panics += 1,
            Ok(None) => report.rejected += 1,
            Ok(Some(true)) => {}
            Ok(Some(false)) => report.bad_accepts += 1,
        }
    }
    report
}
