//! Reference implementations of the training losses and their analytic
//! gradients with respect to the predictions.
//!
//! These exist to verify a training implementation, not to train: every
//! function is scalar, allocation-light, and checked against central finite
//! differences by [`check_gradients`].

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::error::{Error, Result};
use crate::maskgrid::{BitGrid, ScoreGrid};

/// Lower clamp on `p_t` before taking its logarithm.
pub const PROB_EPS: f64 = 1e-7;

/// Step used by the finite-difference checks.
pub const FD_STEP: f64 = 1e-5;

/// Maximum relative error accepted by [`GradientReport::passed`].
pub const MAX_REL_ERR: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossConfig {
    pub lambda1: f64,
    pub lambda2: f64,
    pub alpha_t: f64,
    pub gamma: f64,
}

impl Default for LossConfig {
    fn default() -> Self {
        Self {
            lambda1: 1.0,
            lambda2: 1.0,
            alpha_t: 0.25,
            gamma: 2.0,
        }
    }
}

impl LossConfig {
    pub fn new(lambda1: f64, lambda2: f64, alpha_t: f64, gamma: f64) -> Result<Self> {
        if !(lambda1 > 0.0 && lambda2 > 0.0) {
            return Err(Error::InvalidInput("loss weights must be positive".into()));
        }
        if !(alpha_t > 0.0 && alpha_t < 1.0) {
            return Err(Error::InvalidInput(format!("alpha_t must be in (0, 1), got {alpha_t}")));
        }
        if !(gamma >= 0.0 && gamma.is_finite()) {
            return Err(Error::InvalidInput(format!("gamma must be >= 0, got {gamma}")));
        }
        Ok(Self {
            lambda1,
            lambda2,
            alpha_t,
            gamma,
        })
    }
}

fn check_prob(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("probability {p} outside [0, 1]")))
    }
}

/// `-α_t (1 - p_t)^γ ln p_t`, with `p_t = p` for a positive label and `1 - p`
/// otherwise.
pub fn focal_loss(p: f64, positive: bool, cfg: &LossConfig) -> Result<f64> {
    check_prob(p)?;
    let pt = if positive { p } else { 1.0 - p }.max(PROB_EPS);
    Ok(-cfg.alpha_t * (1.0 - pt).powf(cfg.gamma) * pt.ln())
}

/// Derivative of [`focal_loss`] with respect to `p`. Zero where the clamp is
/// active.
pub fn focal_loss_grad(p: f64, positive: bool, cfg: &LossConfig) -> Result<f64> {
    check_prob(p)?;
    let raw = if positive { p } else { 1.0 - p };
    if raw < PROB_EPS {
        return Ok(0.0);
    }
    let pt = raw;
    let q = 1.0 - pt;
    let log_term = if cfg.gamma == 0.0 || pt == 1.0 {
        0.0
    } else {
        cfg.gamma * q.powf(cfg.gamma - 1.0) * pt.ln()
    };
    let d_pt = cfg.alpha_t * (log_term - q.powf(cfg.gamma) / pt);
    Ok(if positive { d_pt } else { -d_pt })
}

fn check_levels(preds: &[ScoreGrid], labels: &[BitGrid]) -> Result<()> {
    if preds.len() != labels.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} prediction levels but {} label levels",
            preds.len(),
            labels.len()
        )));
    }
    for (i, (p, l)) in preds.iter().zip(labels).enumerate() {
        if p.width() != l.width() || p.height() != l.height() {
            return Err(Error::ShapeMismatch(format!(
                "level {i}: prediction {}x{} vs label {}x{}",
                p.width(),
                p.height(),
                l.width(),
                l.height()
            )));
        }
    }
    Ok(())
}

/// Sum over feature levels of the mean per-cell focal loss.
pub fn cls_loss(preds: &[ScoreGrid], labels: &[BitGrid], cfg: &LossConfig) -> Result<f64> {
    check_levels(preds, labels)?;
    let mut total = 0.0;
    for (p, l) in preds.iter().zip(labels) {
        let mut sum = 0.0;
        for (&v, &y) in p.values().iter().zip(l.bits()) {
            sum += focal_loss(f64::from(v), y, cfg)?;
        }
        total += sum / p.values().len() as f64;
    }
    Ok(total)
}

/// Per-level, per-cell gradient of [`cls_loss`].
pub fn cls_loss_grad(preds: &[ScoreGrid], labels: &[BitGrid], cfg: &LossConfig) -> Result<Vec<Vec<f64>>> {
    check_levels(preds, labels)?;
    preds
        .iter()
        .zip(labels)
        .map(|(p, l)| {
            let n = p.values().len() as f64;
            p.values()
                .iter()
                .zip(l.bits())
                .map(|(&v, &y)| focal_loss_grad(f64::from(v), y, cfg).map(|g| g / n))
                .collect()
        })
        .collect()
}

/// Quadratic below `|x| = 1`, linear above.
pub fn smooth_l1(x: f64) -> f64 {
    let a = x.abs();
    if a < 1.0 {
        0.5 * x * x
    } else {
        a - 0.5
    }
}

/// Derivative of [`smooth_l1`]; at `|x| = 1` the quadratic branch is used,
/// which agrees with the linear one.
pub fn smooth_l1_grad(x: f64) -> f64 {
    if x.abs() <= 1.0 {
        x
    } else {
        x.signum()
    }
}

fn check_same_shape(pred: &ScoreGrid, label: &ScoreGrid) -> Result<()> {
    if pred.same_shape(label) {
        Ok(())
    } else {
        Err(Error::ShapeMismatch(format!(
            "prediction {}x{} vs label {}x{}",
            pred.width(),
            pred.height(),
            label.width(),
            label.height()
        )))
    }
}

/// Mean smooth-L1 of `pred - label` over the cells of one square.
pub fn segment_loss(pred: &ScoreGrid, label: &ScoreGrid) -> Result<f64> {
    check_same_shape(pred, label)?;
    let sum: f64 = pred
        .values()
        .iter()
        .zip(label.values())
        .map(|(&p, &g)| smooth_l1(f64::from(p) - f64::from(g)))
        .sum();
    Ok(sum / pred.values().len() as f64)
}

pub fn segment_loss_grad(pred: &ScoreGrid, label: &ScoreGrid) -> Result<Vec<f64>> {
    check_same_shape(pred, label)?;
    let n = pred.values().len() as f64;
    Ok(pred
        .values()
        .iter()
        .zip(label.values())
        .map(|(&p, &g)| smooth_l1_grad(f64::from(p) - f64::from(g)) / n)
        .collect())
}

/// `λ1·cls + λ2·seg`.
pub fn total_loss(cls: f64, seg: f64, cfg: &LossConfig) -> f64 {
    cfg.lambda1 * cls + cfg.lambda2 * seg
}

fn rel_err(analytic: f64, numeric: f64) -> f64 {
    (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(1e-10)
}

fn central_diff(f: impl Fn(f64) -> f64, x: f64) -> f64 {
    (f(x + FD_STEP) - f(x - FD_STEP)) / (2.0 * FD_STEP)
}

/// Outcome of [`check_gradients`].
#[derive(Debug, Clone, PartialEq)]
pub struct GradientReport {
    pub samples: usize,
    pub focal_max_rel_err: f64,
    pub smooth_l1_max_rel_err: f64,
    pub cls_max_rel_err: f64,
    pub segment_max_rel_err: f64,
    /// `|smooth_l1|` jump across `|x| = 1` between adjacent floats.
    pub kink_value_gap: f64,
    /// Derivative jump across `|x| = 1` between adjacent floats.
    pub kink_grad_gap: f64,
    pub negative_loss_seen: bool,
}

impl GradientReport {
    pub fn passed(&self) -> bool {
        self.focal_max_rel_err < MAX_REL_ERR
            && self.smooth_l1_max_rel_err < MAX_REL_ERR
            && self.cls_max_rel_err < MAX_REL_ERR
            && self.segment_max_rel_err < MAX_REL_ERR
            && self.kink_value_gap <= 4.0 * f64::EPSILON
            && self.kink_grad_gap <= 4.0 * f64::EPSILON
            && !self.negative_loss_seen
    }
}

/// Compares every analytic gradient against central finite differences on
/// `samples` random inputs, kept away from the probability clamp.
pub fn check_gradients(samples: usize, seed: u64) -> GradientReport {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut report = GradientReport {
        samples,
        focal_max_rel_err: 0.0,
        smooth_l1_max_rel_err: 0.0,
        cls_max_rel_err: 0.0,
        segment_max_rel_err: 0.0,
        kink_value_gap: 0.0,
        kink_grad_gap: 0.0,
        negative_loss_seen: false,
    };

    for s in 0..samples {
        // Every other sample uses the default hyper-parameters.
        let cfg = if s % 2 == 0 {
            LossConfig::default()
        } else {
            LossConfig {
                alpha_t: rng.random_range(0.05..0.95),
                gamma: rng.random_range(0.0..5.0),
                ..LossConfig::default()
            }
        };
        let p = rng.random_range(0.01..0.99);
        let y = rng.random_bool(0.5);
        let analytic = focal_loss_grad(p, y, &cfg).unwrap();
        let numeric = central_diff(|q| focal_loss(q, y, &cfg).unwrap(), p);
        report.focal_max_rel_err = report.focal_max_rel_err.max(rel_err(analytic, numeric));
        report.negative_loss_seen |= focal_loss(p, y, &cfg).unwrap() < 0.0;

        let x = rng.random_range(-3.0..3.0);
        let numeric = central_diff(smooth_l1, x);
        report.smooth_l1_max_rel_err = report.smooth_l1_max_rel_err.max(rel_err(smooth_l1_grad(x), numeric));
        report.negative_loss_seen |= smooth_l1(x) < 0.0;
    }

    // Grid losses: perturb one cell at a time. Values are kept in f64 by
    // evaluating the per-cell terms directly, since grids store f32.
    let cfg = LossConfig::default();
    for _ in 0..samples.div_ceil(50) {
        let (w, h) = (rng.random_range(1..4usize), rng.random_range(1..4usize));
        let levels = 4;
        let mut preds = Vec::new();
        let mut labels = Vec::new();
        for _ in 0..levels {
            let vals: Vec<f32> = (0..w * h).map(|_| rng.random_range(0.05f32..0.95)).collect();
            let bits: Vec<bool> = (0..w * h).map(|_| rng.random_bool(0.5)).collect();
            preds.push(ScoreGrid::new(w, h, 1.0, vals).unwrap());
            labels.push(BitGrid::from_bits(w, h, Default::default(), 1.0, bits).unwrap());
        }
        let grads = cls_loss_grad(&preds, &labels, &cfg).unwrap();
        for (lvl, (p, l)) in preds.iter().zip(&labels).enumerate() {
            let n = p.values().len() as f64;
            for (cell, (&v, &yv)) in p.values().iter().zip(l.bits()).enumerate() {
                // Other cells only add constants to the level mean.
                let numeric = central_diff(|q| focal_loss(q, yv, &cfg).unwrap() / n, f64::from(v));
                report.cls_max_rel_err = report.cls_max_rel_err.max(rel_err(grads[lvl][cell], numeric));
            }
        }

        let label = ScoreGrid::new(w, h, 1.0, (0..w * h).map(|_| [0.0, 0.1, 1.0][rng.random_range(0..3)]).collect()).unwrap();
        let seg_grad = segment_loss_grad(&preds[0], &label).unwrap();
        let n = (w * h) as f64;
        for (cell, (&pv, &gv)) in preds[0].values().iter().zip(label.values()).enumerate() {
            let numeric = central_diff(|q| smooth_l1(q - f64::from(gv)) / n, f64::from(pv));
            report.segment_max_rel_err = report.segment_max_rel_err.max(rel_err(seg_grad[cell], numeric));
        }
    }

    for one in [1.0f64, -1.0] {
        let below = one - one.signum() * f64::EPSILON / 2.0;
        let above = one + one.signum() * f64::EPSILON;
        let value_gap = (smooth_l1(below) - smooth_l1(one))
            .abs()
            .max((smooth_l1(above) - smooth_l1(one)).abs());
        let grad_gap = (smooth_l1_grad(below) - smooth_l1_grad(above)).abs();
        report.kink_value_gap = report.kink_value_gap.max(value_gap);
        report.kink_grad_gap = report.kink_grad_gap.max(grad_gap);
    }
    report
}
