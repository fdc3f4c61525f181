//! Acceptance runner: one PASS/FAIL line per criterion, exit status 1 if
//! any criterion fails.

mod common;

use std::f64::consts::{LN_2, PI};
use std::time::Instant;

use curvetext::anchors::{grid_anchors, side_lengths};
use curvetext::cli::config::PipelineConfig;
use curvetext::cli::connect::run_connect;
use curvetext::cli::formats::*;
use curvetext::cli::{case_records, synth_cases};
use curvetext::curve::fit_principal_curve;
use curvetext::eval::evaluate;
use curvetext::geom::{point_segment_distance, polygon_iou};
use curvetext::lossref::{check_gradients, focal_loss, smooth_l1, LossConfig};
use curvetext::maskgrid::SegmentPrediction;
use curvetext::merge::{merge_masks, MergeConfig};
use curvetext::synth::{SynthCase, SynthParams};
use curvetext::Point;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use common::*;

type Outcome = (bool, String);
type Criterion = (&'static str, fn() -> Outcome);

/// Runs the pipeline on every case and scores it. Returns the evaluation
/// report and the best IoU reached by each ground truth.
fn run_cases(cases: &[SynthCase]) -> (curvetext::eval::EvalReport, Vec<f64>) {
    let outputs = run_connect(case_records(cases), &PipelineConfig::default(), 1).unwrap();
    let mut images = Vec::new();
    let mut best = Vec::new();
    for (case, out) in cases.iter().zip(&outputs) {
        assert_eq!(case.image_id, out.image_id);
        let dets: Vec<_> = out.detections.iter().map(|d| d.polygon.clone()).collect();
        for gt in &case.gt_polygons {
            best.push(dets.iter().map(|d| polygon_iou(d, gt)).fold(0.0, f64::max));
        }
        images.push((dets, case.gt_polygons.clone()));
    }
    (evaluate(&images, 0.5), best)
}

fn synthetic_round_trip() -> Outcome {
    let start = Instant::now();
    let cases = synth_cases(0, 50, &SynthParams::default(), 0.0).unwrap();
    let (report, best) = run_cases(&cases);
    let secs = start.elapsed().as_secs_f64();
    let worst = best.iter().copied().fold(f64::INFINITY, f64::min);
    let prf_ok = report.precision == 1.0 && report.recall == 1.0 && report.f_measure == 1.0;
    (
        worst >= 0.8 && prf_ok && secs < 30.0,
        format!(
            "{} gts, worst IoU {worst:.4}, P {:.4} R {:.4} F {:.4}, {secs:.1} s on one thread",
            best.len(),
            report.precision,
            report.recall,
            report.f_measure
        ),
    )
}

fn noise_robustness() -> Outcome {
    let cases = synth_cases(0, 50, &SynthParams::default(), 0.1).unwrap();
    let (report, best) = run_cases(&cases);
    let mean = best.iter().sum::<f64>() / best.len() as f64;
    (
        report.f_measure >= 0.95,
        format!("F {:.4} at noise 0.1 (mean best IoU {mean:.4})", report.f_measure),
    )
}

fn merge_oracle() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0x6d65);
    let mut mismatches = 0;
    for _ in 0..200 {
        let masks = random_masks(&mut rng, 20);
        let cfg = MergeConfig {
            s1: 0.5,
            s2: rng.random_range(0.0..0.9),
            canvas_stride: [1.0, 2.0, 2.5, 4.0][rng.random_range(0..4)],
        };
        let got: std::collections::BTreeSet<std::collections::BTreeSet<usize>> = merge_masks(&masks, &cfg)
            .unwrap()
            .iter()
            .map(|r| r.members.iter().copied().collect())
            .collect();
        if got != oracle_partition(&masks, &cfg) {
            mismatches += 1;
        }
    }
    (mismatches == 0, format!("{mismatches} of 200 partitions differ"))
}

fn iou_oracle() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0x696f75);
    let mut worst: f64 = 0.0;
    let mut pairs = 0;
    while pairs < 100 {
        let (na, nb) = (rng.random_range(5..16), rng.random_range(5..16));
        let c = Point::new(rng.random_range(-6.0..6.0), rng.random_range(-6.0..6.0));
        let rb = rng.random_range(5.0..12.0);
        let a = star_polygon(&mut rng, Point::new(0.0, 0.0), 10.0, na);
        let b = star_polygon(&mut rng, c, rb, nb);
        if !(is_concave(&a) && is_concave(&b) && a.is_simple() && b.is_simple()) {
            continue;
        }
        let mc = monte_carlo_iou(&a, &b, 1_000_000, &mut rng);
        worst = worst.max((mc - polygon_iou(&a, &b)).abs());
        pairs += 1;
    }
    (worst < 1e-2, format!("max |exact - sampled| = {worst:.2e} over 100 concave pairs"))
}

fn gradient_checks() -> Outcome {
    let r = check_gradients(1000, 0);
    (
        r.passed(),
        format!(
            "max rel err focal {:.1e}, smooth_l1 {:.1e}; kink gaps {:.1e} / {:.1e}",
            r.focal_max_rel_err, r.smooth_l1_max_rel_err, r.kink_value_gap, r.kink_grad_gap
        ),
    )
}

fn loss_spot_values() -> Outcome {
    let focal = focal_loss(0.5, true, &LossConfig::default()).unwrap();
    let expected = 0.25 * 0.25 * LN_2;
    let ok = (focal - expected).abs() < 1e-12 && smooth_l1(1.0) == 0.5 && smooth_l1(2.0) == 1.5;
    (
        ok,
        format!(
            "focal {focal:.15} vs {expected:.15}; smooth_l1(1) {}, smooth_l1(2) {}",
            smooth_l1(1.0),
            smooth_l1(2.0)
        ),
    )
}

fn anchor_inventory() -> Outcome {
    let expected: Vec<f64> = [8.0, 16.0, 32.0, 64.0]
        .iter()
        .flat_map(|s| [2.0, 2.5, 3.0, 3.5].map(|k| k * s))
        .collect();
    let got: Vec<f64> = side_lengths().into_iter().flatten().collect();
    let mut counts_ok = true;
    for level in 0..4 {
        for (w, h) in [(1, 1), (3, 5), (64, 48)] {
            counts_ok &= grid_anchors(level, w, h).unwrap().len() == w * h * 4;
        }
    }
    (
        got == expected && counts_ok,
        format!("{} side lengths, grid counts w*h*4 {}", got.len(), if counts_ok { "hold" } else { "differ" }),
    )
}

fn principal_curve() -> Outcome {
    let line: Vec<Point> = (0..=100).map(|i| Point::new(0.1 * i as f64, 0.0)).collect();
    let c = fit_principal_curve(&line).unwrap();
    let dev = c
        .points()
        .iter()
        .map(|p| point_segment_distance(*p, Point::new(0.0, 0.0), Point::new(10.0, 0.0)))
        .fold(0.0, f64::max);
    let r = 50.0;
    let arc: Vec<Point> = (0..=400)
        .map(|i| {
            let a = PI * i as f64 / 400.0;
            Point::new(r * a.cos(), -r * a.sin())
        })
        .collect();
    let c = fit_principal_curve(&arc).unwrap();
    let rel = c.points().iter().map(|p| (p.norm() - r).abs() / r).fold(0.0, f64::max);
    (
        dev < 1e-6 && rel < 0.05,
        format!("line max deviation {dev:.1e}; semicircle max radial error {:.2}%", 100.0 * rel),
    )
}

fn parser_fuzzing() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0x66757a);
    let report = fuzz_parsers(10_000, &mut rng);

    let mut round_trips = true;
    for i in 0..200 {
        let seeds = seed_inputs(&mut rng);
        let band = parse_ctw_line(&seeds[0]).unwrap();
        round_trips &= format_ctw_line(&band) == seeds[0];
        round_trips &= parse_totaltext_record(&format_coords(&band)).unwrap() == band;
        let det = vec![Detection {
            image_id: format!("im{i}"),
            score: rng.random_range(0.0..1.0),
            polygon: band.clone(),
        }];
        round_trips &= parse_detections(&write_detections(&det)).unwrap() == det;
        let res = rng.random_range(1..6usize);
        let rec = vec![SegmentRecord {
            image_id: format!("im{i}"),
            prediction: SegmentPrediction::new(
                Point::new(rng.random_range(0.0..500.0), rng.random_range(0.0..500.0)),
                rng.random_range(8.0..200.0),
                res,
                (0..res * res).map(|_| rng.random_range(0.0..1.0f32)).collect(),
                rng.random_range(0.0..1.0f32),
            )
            .unwrap(),
        }];
        round_trips &= parse_segment_dump_text(&write_segment_dump_text(&rec).unwrap()).unwrap() == rec;
        round_trips &= parse_segment_dump_binary(&write_segment_dump_binary(&rec).unwrap()).unwrap() == rec;
    }
    (
        report.clean() && round_trips,
        format!(
            "{} mutated inputs: {} rejected, {} panics, {} bad accepts; round trips {}",
            report.cases,
            report.rejected,
            report.panics,
            report.bad_accepts,
            if round_trips { "exact" } else { "differ" }
        ),
    )
}

fn determinism() -> Outcome {
    let cases = synth_cases(3, 10, &SynthParams::default(), 0.05).unwrap();
    let cfg = PipelineConfig {
        seed: 17,
        ..PipelineConfig::default()
    };
    let render = |jobs: usize| -> String {
        run_connect(case_records(&cases), &cfg, jobs)
            .unwrap()
            .iter()
            .map(|o| write_detections(&o.detections))
            .collect()
    };
    let (a, b, c) = (render(1), render(1), render(4));
    (
        !a.is_empty() && a == b && a == c,
        format!("{} bytes of detections, identical across runs and worker counts", a.len()),
    )
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("synthetic round-trip", synthetic_round_trip),
        ("noise robustness", noise_robustness),
        ("merge oracle equivalence", merge_oracle),
        ("IoU oracle", iou_oracle),
        ("gradient checks", gradient_checks),
        ("loss spot values", loss_spot_values),
        ("anchor inventory", anchor_inventory),
        ("principal curve", principal_curve),
        ("parser fuzzing", parser_fuzzing),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let (ok, detail) = check();
        println!("{} {name}: {detail}", if ok { "PASS" } else { "FAIL" });
        failed += usize::from(!ok);
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
