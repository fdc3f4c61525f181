//! Precision, recall and F-measure of a small set of detections.
//!
//! cargo run --example evaluate

use curvetext::eval::{evaluate, match_image};
use curvetext::Polygon;

fn main() -> curvetext::Result<()> {
    let gts = vec![
        Polygon::rect(10.0, 10.0, 110.0, 40.0)?,
        Polygon::rect(10.0, 60.0, 200.0, 90.0)?,
        Polygon::rect(300.0, 10.0, 340.0, 200.0)?,
    ];
    let dets = vec![
        Polygon::rect(12.0, 8.0, 108.0, 42.0)?,
        Polygon::rect(10.0, 60.0, 90.0, 90.0)?,
        Polygon::rect(400.0, 400.0, 450.0, 420.0)?,
    ];
    let m = match_image(&dets, &gts, 0.5);
    for pair in &m.matches {
        println!("det {} <-> gt {} (IoU {:.3})", pair.det, pair.gt, pair.iou);
    }
    let report = evaluate(&[(dets, gts)], 0.5);
    println!(
        "P {:.3}  R {:.3}  F {:.3}  ({} of {} detections, {} ground truths)",
        report.precision, report.recall, report.f_measure, report.tp, report.n_det, report.n_gt
    );
    Ok(())
}
