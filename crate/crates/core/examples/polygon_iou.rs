//! Exact IoU of two polygons, with one of them concave.
//!
//! cargo run --example polygon_iou

use curvetext::geom::{polygon_intersection_area, polygon_iou};
use curvetext::{Point, Polygon};

fn main() -> curvetext::Result<()> {
    // A "U" shape and a bar across its opening.
    let u = Polygon::new(vec![
        Point::new(0.0, 0.0),
        Point::new(3.0, 0.0),
        Point::new(3.0, 6.0),
        Point::new(7.0, 6.0),
        Point::new(7.0, 0.0),
        Point::new(10.0, 0.0),
        Point::new(10.0, 10.0),
        Point::new(0.0, 10.0),
    ])?;
    let bar = Polygon::rect(-2.0, 2.0, 12.0, 4.0)?;

    println!("area(U)       = {}", u.area());
    println!("area(bar)     = {}", bar.area());
    println!("intersection  = {}", polygon_intersection_area(&u, &bar));
    println!("IoU           = {:.6}", polygon_iou(&u, &bar));
    println!("U is simple   = {}", u.is_simple());
    Ok(())
}
