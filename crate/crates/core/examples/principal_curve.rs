//! Fitting a principal curve to a noisy arc and turning a band mask into
//! a 14-vertex polygon.
//!
//! cargo run --example principal_curve

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use curvetext::curve::{fit_principal_curve, polygonize, sample_center_points, CurveConfig};
use curvetext::geom::{point_in_polygon, polygon_iou};
use curvetext::maskgrid::BitGrid;
use curvetext::merge::MergedRegion;
use curvetext::synth::CenterCurve;
use curvetext::Point;

fn main() -> curvetext::Result<()> {
    let mut rng = StdRng::seed_from_u64(3);
    let r = 80.0;
    let cloud: Vec<Point> = (0..600)
        .map(|_| {
            let a = rng.random_range(0.2..2.9f64);
            let rad = r + rng.random_range(-6.0..6.0);
            Point::new(rad * a.cos(), -rad * a.sin())
        })
        .collect();
    let curve = fit_principal_curve(&cloud)?;
    let worst = curve.points().iter().map(|p| (p.norm() - r).abs()).fold(0.0, f64::max);
    println!("curve length {:.1}, worst radial error {worst:.2}", curve.length());
    for p in sample_center_points(&curve, 7)?.points() {
        println!("  center point ({:7.2}, {:7.2})", p.x, p.y);
    }

    let band = CenterCurve::Sine {
        start: Point::new(20.0, 80.0),
        dir: Point::new(1.0, 0.0),
        length: 260.0,
        amp: 15.0,
        wavelength: 320.0,
        phase: 0.0,
    };
    let gt = band.band_polygon(24.0)?;
    let mut mask = BitGrid::covering(Point::new(0.0, 0.0), Point::new(300.0, 160.0), 2.0);
    for row in 0..mask.height() {
        for col in 0..mask.width() {
            if point_in_polygon(mask.cell_center(col, row), &gt) {
                mask.set(col, row, true);
            }
        }
    }
    let region = MergedRegion { mask, members: vec![0] };
    let poly = polygonize(&region, &CurveConfig::default())?;
    println!("polygon IoU with the band: {:.4}", polygon_iou(poly.polygon(), &gt));
    for v in poly.vertices() {
        println!("  ({:7.2}, {:7.2})", v.x, v.y);
    }
    Ok(())
}
