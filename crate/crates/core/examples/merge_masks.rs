//! Overlapping square masks grouped into text regions.
//!
//! cargo run --example merge_masks

use curvetext::maskgrid::{mask_area, SegmentMask};
use curvetext::merge::{merge_masks, MergeConfig};
use curvetext::Point;

fn filled(x: f64, y: f64, side: f64) -> SegmentMask {
    SegmentMask::new(Point::new(x, y), side, 8, vec![true; 64]).expect("valid mask")
}

fn main() -> curvetext::Result<()> {
    // Two chains of squares, plus one square that only grazes the first chain.
    let masks = vec![
        filled(0.0, 0.0, 32.0),
        filled(100.0, 100.0, 32.0),
        filled(16.0, 0.0, 32.0),
        filled(116.0, 104.0, 32.0),
        filled(32.0, 4.0, 32.0),
        filled(60.0, 28.0, 32.0),
    ];
    for s2 in [0.2, 0.01] {
        let cfg = MergeConfig {
            s2,
            ..MergeConfig::default()
        };
        println!("s2 = {s2}");
        for (k, region) in merge_masks(&masks, &cfg)?.iter().enumerate() {
            println!(
                "  region {k}: members {:?}, {} canvas cells",
                region.members,
                mask_area(&region.mask)
            );
        }
    }
    Ok(())
}
