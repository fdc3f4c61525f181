//! Segment predictions to text polygons, one image at a time.

use rayon::prelude::*;

use crate::anchors::rank_positive;
use crate::cli::config::PipelineConfig;
use crate::cli::formats::{group_by_image, Detection, SegmentRecord};
use crate::curve::polygonize;
use crate::error::{Error, Result};
use crate::geom::{Point, Polygon};
use crate::maskgrid::SegmentPrediction;
use crate::merge::{merge_masks, MergedRegion};

/// Output vertices are rounded to this many decimal places.
pub const COORD_DECIMALS: i32 = 3;

#[derive(Debug, Clone)]
pub struct ImageOutput {
    pub image_id: String,
    pub detections: Vec<Detection>,
    pub regions: Vec<MergedRegion>,
    /// One message per region (or for the whole image) that failed.
    pub diagnostics: Vec<String>,
}

fn quantize(p: &Polygon) -> Polygon {
    // Dividing by the power of ten gives the double nearest to the decimal,
    // so it prints back with at most three decimals.
    let scale = 10f64.powi(COORD_DECIMALS);
    let q = |v: f64| (v * scale).round() / scale;
    let v: Vec<Point> = p.vertices().iter().map(|v| Point::new(q(v.x), q(v.y))).collect();
    Polygon::new(v).unwrap_or_else(|_| p.clone())
}

/// Runs filter, binarize, merge and polygonize on one image's predictions.
///
/// Predictions scoring above `s3` are kept, best first, up to `max_rois`;
/// the survivors are then processed in their input order. A region whose
/// polygon cannot be built is skipped and reported in `diagnostics`.
pub fn connect_image(image_id: &str, preds: &[SegmentPrediction], cfg: &PipelineConfig) -> Result<ImageOutput> {
    cfg.validate()?;
    let scores: Vec<f64> = preds.iter().map(|p| f64::from(p.score)).collect();
    let mut keep = rank_positive(&scores, cfg.s3, cfg.max_rois);
    keep.sort_unstable();

    let mut kept = Vec::with_capacity(keep.len());
    let mut masks = Vec::with_capacity(keep.len());
    for i in keep {
        let m = preds[i].binarize(cfg.s1);
        if !m.is_empty() {
            kept.push(&preds[i]);
            masks.push(m);
        }
    }

    let regions = merge_masks(&masks, &cfg.merge_config())?;
    let curve_cfg = cfg.curve_config();
    let mut detections = Vec::with_capacity(regions.len());
    let mut diagnostics = Vec::new();
    for (r, region) in regions.iter().enumerate() {
        match polygonize(region, &curve_cfg) {
            Ok(poly) => {
                let score = region
                    .members
                    .iter()
                    .map(|&m| kept[m].mean_positive_score(cfg.s1))
                    .sum::<f64>()
                    / region.members.len() as f64;
                detections.push(Detection {
                    image_id: image_id.to_string(),
                    score,
                    polygon: quantize(poly.polygon()),
                });
            }
            Err(e) => diagnostics.push(format!("{image_id}: region {r}: {e}")),
        }
    }
    Ok(ImageOutput {
        image_id: image_id.to_string(),
        detections,
        regions,
        diagnostics,
    })
}

/// Processes every image of a dump on a pool of `jobs` workers (0 picks the
/// rayon default). Results come back in order of first appearance of each
/// image id, and a failing image yields an output with no detections and
/// a diagnostic instead of aborting the batch.
pub fn run_connect(records: Vec<SegmentRecord>, cfg: &PipelineConfig, jobs: usize) -> Result<Vec<ImageOutput>> {
    cfg.validate()?;
    let images = group_by_image(records.into_iter().map(|r| (r.image_id, r.prediction)));
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::InvalidInput(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(|| {
        images
            .par_iter()
            .map(|(id, preds)| {
                connect_image(id, preds, cfg).unwrap_or_else(|e| ImageOutput {
                    image_id: id.clone(),
                    detections: Vec::new(),
                    regions: Vec::new(),
                    diagnostics: vec![format!("{id}: {e}")],
                })
            })
            .collect()
    }))
}

/// Plain SVG with one closed path per polygon, outlined in `stroke`.
pub fn render_svg(layers: &[(&[Polygon], &str)]) -> String {
    let all: Vec<&Polygon> = layers.iter().flat_map(|(ps, _)| ps.iter()).collect();
    let (w, h) = all.iter().fold((1.0f64, 1.0f64), |(w, h), p| {
        let b = p.bbox();
        (w.max(b.max.x), h.max(b.max.y))
    });
    let mut s = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\">\n",
        w.ceil() + 1.0,
        h.ceil() + 1.0
    );
    for (polys, stroke) in layers {
        for p in polys.iter() {
            let mut d = String::new();
            for (i, v) in p.vertices().iter().enumerate() {
                d.push_str(if i == 0 { "M" } else { " L" });
                d.push_str(&format!("{:.2},{:.2}", v.x, v.y));
            }
            s.push_str(&format!(
                "  <path d=\"{d} Z\" fill=\"none\" stroke=\"{stroke}\" stroke-width=\"1\"/>\n"
            ));
        }
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square_pred(cx: f64, cy: f64, score: f32) -> SegmentPrediction {
        SegmentPrediction::new(Point::new(cx, cy), 16.0, 8, vec![1.0; 64], score).unwrap()
    }

    #[test]
    fn low_scores_give_no_detections() {
        let preds: Vec<_> = (0..5).map(|i| square_pred(20.0 + 8.0 * i as f64, 20.0, 0.3)).collect();
        let out = connect_image("x", &preds, &PipelineConfig::default()).unwrap();
        assert!(out.detections.is_empty() && out.regions.is_empty() && out.diagnostics.is_empty());
    }

    #[test]
    fn a_row_of_squares_becomes_one_polygon() {
        let preds: Vec<_> = (0..10).map(|i| square_pred(20.0 + 8.0 * i as f64, 20.0, 0.9)).collect();
        let out = connect_image("x", &preds, &PipelineConfig::default()).unwrap();
        assert_eq!(out.detections.len(), 1);
        let det = &out.detections[0];
        assert_eq!(det.polygon.len(), 14);
        assert_eq!(det.score, 1.0);
        let truth = Polygon::rect(12.0, 12.0, 100.0, 28.0).unwrap();
        assert!(crate::geom::polygon_iou(&det.polygon, &truth) > 0.9);
    }

    #[test]
    fn batch_keeps_input_order_and_isolates_images() {
        let mk = |id: &str, x: f64| SegmentRecord {
            image_id: id.into(),
            prediction: square_pred(x, 20.0, 0.9),
        };
        let records = vec![mk("b", 20.0), mk("a", 20.0), mk("b", 28.0)];
        let out = run_connect(records, &PipelineConfig::default(), 2).unwrap();
        let ids: Vec<&str> = out.iter().map(|o| o.image_id.as_str()).collect();
        assert_eq!(ids, vec!["b", "a"]);
        assert_eq!(out[0].regions[0].members, vec![0, 1]);
    }

    #[test]
    fn svg_has_one_path_per_polygon() {
        let p = Polygon::rect(0.0, 0.0, 10.0, 5.0).unwrap();
        let svg = render_svg(&[(std::slice::from_ref(&p), "red"), (&[p.clone(), p.clone()], "blue")]);
        assert_eq!(svg.matches("<path").count(), 3);
    }
}
