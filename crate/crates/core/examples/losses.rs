//! Focal and smooth-L1 loss values and the finite-difference gradient check.
//!
//! cargo run --example losses

use curvetext::lossref::{check_gradients, focal_loss, focal_loss_grad, smooth_l1, LossConfig};

fn main() -> curvetext::Result<()> {
    let cfg = LossConfig::default();
    println!("   p   focal(+)   d/dp(+)    focal(-)");
    for p in [0.05, 0.25, 0.5, 0.75, 0.95] {
        println!(
            "{p:5.2} {:9.5} {:10.5} {:10.5}",
            focal_loss(p, true, &cfg)?,
            focal_loss_grad(p, true, &cfg)?,
            focal_loss(p, false, &cfg)?
        );
    }
    for x in [-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0] {
        println!("smooth_l1({x:4}) = {}", smooth_l1(x));
    }

    let report = check_gradients(1000, 7);
    println!("{report:#?}");
    println!("passed: {}", report.passed());
    Ok(())
}
