//! End-to-end check on seeded synthetic cases: generate bands and ideal
//! segment masks, run the connect pipeline, and score the polygons.
//!
//! cargo run --release --example synth_roundtrip -- [cases] [noise] [canvas_stride]

use std::time::Instant;

use curvetext::cli::config::PipelineConfig;
use curvetext::cli::connect::connect_image;
use curvetext::cli::synth_cases;
use curvetext::eval::{aggregate, match_image};
use curvetext::geom::polygon_iou;
use curvetext::synth::SynthParams;

fn main() -> curvetext::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let cases: usize = args.first().and_then(|s| s.parse().ok()).unwrap_or(50);
    let noise: f64 = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(0.0);
    let mut cfg = PipelineConfig::default();
    if let Some(s) = args.get(2).and_then(|s| s.parse().ok()) {
        cfg.canvas_stride = s;
    }

    let start = Instant::now();
    let cases = synth_cases(0, cases, &SynthParams::default(), noise)?;
    let generated = start.elapsed();

    let mut per_image = Vec::new();
    let mut worst = f64::INFINITY;
    let mut ious = Vec::new();
    for case in &cases {
        let out = connect_image(&case.image_id, &case.predictions(), &cfg)?;
        for d in &out.diagnostics {
            eprintln!("{d}");
        }
        let dets: Vec<_> = out.detections.into_iter().map(|d| d.polygon).collect();
        for gt in &case.gt_polygons {
            let best = dets.iter().map(|d| polygon_iou(d, gt)).fold(0.0, f64::max);
            worst = worst.min(best);
            ious.push(best);
            if best < 0.8 {
                println!("{}: gt with best IoU {best:.3} ({} detections)", case.image_id, dets.len());
            }
        }
        per_image.push(match_image(&dets, &case.gt_polygons, 0.5));
    }
    let report = aggregate(&per_image);
    let mean = ious.iter().sum::<f64>() / ious.len() as f64;
    println!(
        "cases {}  gts {}  P {:.4}  R {:.4}  F {:.4}  mean IoU {mean:.4}  worst IoU {worst:.4}",
        cases.len(),
        report.n_gt,
        report.precision,
        report.recall,
        report.f_measure
    );
    println!("generate {:.2?}  total {:.2?}", generated, start.elapsed());
    Ok(())
}
