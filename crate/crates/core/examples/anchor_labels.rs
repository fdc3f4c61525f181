//! Square anchors for a curved band: which ones are positive and what the
//! segment label inside one of them looks like.
//!
//! cargo run --example anchor_labels

use std::f64::consts::PI;

use curvetext::anchors::{assign_label, segment_label, side_lengths, AnchorSpec};
use curvetext::synth::CenterCurve;
use curvetext::Point;

fn main() -> curvetext::Result<()> {
    for (level, sides) in side_lengths().iter().enumerate() {
        println!("level {level}: sides {sides:?}");
    }

    let arc = CenterCurve::Arc {
        center: Point::new(256.0, 300.0),
        radius: 150.0,
        start_angle: -0.8 * PI,
        sweep: 0.6 * PI,
    };
    let gt = arc.band_polygon(32.0)?;
    let spec = AnchorSpec::default();
    let anchors = spec.image_anchors(512, 512);
    let positives: Vec<_> = anchors
        .iter()
        .filter(|a| assign_label(a, std::slice::from_ref(&gt)).is_positive())
        .collect();
    println!("{} anchors, {} positive", anchors.len(), positives.len());
    for level in 0..spec.levels() {
        let n = positives.iter().filter(|a| a.level == level).count();
        println!("  level {level}: {n}");
    }

    if let Some(a) = positives.first() {
        let grid = segment_label(a, &gt, 16)?.into_grid();
        println!("segment label of anchor at ({}, {}) side {}:", a.cx, a.cy, a.side);
        for r in 0..grid.height() {
            let row: String = (0..grid.width())
                .map(|c| match grid.get(c, r) {
                    v if v >= 1.0 => '#',
                    v if v > 0.0 => '+',
                    _ => '.',
                })
                .collect();
            println!("  {row}");
        }
    }
    Ok(())
}
