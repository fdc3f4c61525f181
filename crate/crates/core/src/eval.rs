//! Detection evaluation: one-to-one polygon matching at an IoU threshold and
//! micro-averaged precision, recall and F-measure.

use crate::geom::{polygon_iou, Polygon};

pub const DEFAULT_IOU_THRESHOLD: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Match {
    pub det: usize,
    pub gt: usize,
    pub iou: f64,
}

/// Matching result for one image.
#[derive(Debug, Clone, PartialEq)]
pub struct ImageMatches {
    pub matches: Vec<Match>,
    pub n_det: usize,
    pub n_gt: usize,
}

impl ImageMatches {
    pub fn tp(&self) -> usize {
        self.matches.len()
    }
}

/// Greedy matching: all pairs sorted by IoU descending (ties by lower
/// detection index, then lower ground-truth index); a pair with IoU at or
/// above `iou_thr` is accepted when neither side is matched yet.
pub fn match_image(dets: &[Polygon], gts: &[Polygon], iou_thr: f64) -> ImageMatches {
    let mut pairs = Vec::new();
    for (d, det) in dets.iter().enumerate() {
        for (g, gt) in gts.iter().enumerate() {
            let iou = polygon_iou(det, gt);
            if iou >= iou_thr {
                pairs.push(Match { det: d, gt: g, iou });
            }
        }
    }
    pairs.sort_by(|a, b| {
        b.iou
            .total_cmp(&a.iou)
            .then(a.det.cmp(&b.det))
            .then(a.gt.cmp(&b.gt))
    });
    let mut det_used = vec![false; dets.len()];
    let mut gt_used = vec![false; gts.len()];
    let mut matches = Vec::new();
    for m in pairs {
        if !det_used[m.det] && !gt_used[m.gt] {
            det_used[m.det] = true;
            gt_used[m.gt] = true;
            matches.push(m);
        }
    }
    ImageMatches {
        matches,
        n_det: dets.len(),
        n_gt: gts.len(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Counts {
    pub tp: usize,
    pub n_det: usize,
    pub n_gt: usize,
}

impl Counts {
    /// `(precision, recall, f_measure)`; see [`aggregate`] for the
    /// conventions on empty sets.
    pub fn prf(&self) -> (f64, f64, f64) {
        if self.n_det == 0 && self.n_gt == 0 {
            return (1.0, 1.0, 1.0);
        }
        let p = if self.n_det == 0 { 0.0 } else { self.tp as f64 / self.n_det as f64 };
        let r = if self.n_gt == 0 { 0.0 } else { self.tp as f64 / self.n_gt as f64 };
        let f = if p + r > 0.0 { 2.0 * p * r / (p + r) } else { 0.0 };
        (p, r, f)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub precision: f64,
    pub recall: f64,
    pub f_measure: f64,
    pub tp: usize,
    pub n_det: usize,
    pub n_gt: usize,
    pub per_image: Vec<Counts>,
}

/// Micro-averages per-image matches: `P = Σtp/Σdet`, `R = Σtp/Σgt`,
/// `F = 2PR/(P+R)`. With no detections P is 0, with no ground truth R is 0,
/// and with neither all three are 1.
pub fn aggregate(per_image: &[ImageMatches]) -> EvalReport {
    let per_image: Vec<Counts> = per_image
        .iter()
        .map(|m| Counts {
            tp: m.tp(),
            n_det: m.n_det,
            n_gt: m.n_gt,
        })
        .collect();
    let total = per_image.iter().fold(
        Counts {
            tp: 0,
            n_det: 0,
            n_gt: 0,
        },
        |acc, c| Counts {
            tp: acc.tp + c.tp,
            n_det: acc.n_det + c.n_det,
            n_gt: acc.n_gt + c.n_gt,
        },
    );
    let (precision, recall, f_measure) = total.prf();
    EvalReport {
        precision,
        recall,
        f_measure,
        tp: total.tp,
        n_det: total.n_det,
        n_gt: total.n_gt,
        per_image,
    }
}

/// Matches and aggregates a whole dataset of `(detections, ground truth)`
/// pairs.
pub fn evaluate(images: &[(Vec<Polygon>, Vec<Polygon>)], iou_thr: f64) -> EvalReport {
    let matches: Vec<ImageMatches> = images
        .iter()
        .map(|(d, g)| match_image(d, g, iou_thr))
        .collect();
    aggregate(&matches)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Point;

    fn sq(x: f64, y: f64) -> Polygon {
        Polygon::rect(x, y, x + 1.0, y + 1.0).unwrap()
    }

    fn counts(tp: usize, n_det: usize, n_gt: usize) -> ImageMatches {
        ImageMatches {
            matches: (0..tp).map(|i| Match { det: i, gt: i, iou: 1.0 }).collect(),
            n_det,
            n_gt,
        }
    }

    #[test]
    fn identical_sets_match_fully() {
        let gts = vec![sq(0.0, 0.0), sq(5.0, 0.0), sq(0.0, 5.0)];
        let m = match_image(&gts, &gts, 0.5);
        assert_eq!(m.tp(), 3);
        assert!(m.matches.iter().all(|m| m.det == m.gt));
    }

    #[test]
    fn low_iou_does_not_match() {
        let m = match_image(&[sq(0.5, 0.0)], &[sq(0.0, 0.0)], 0.5);
        assert_eq!(m.tp(), 0);
    }

    #[test]
    fn better_detection_wins() {
        let gt = sq(0.0, 0.0);
        let close = Polygon::rect(0.1, 0.0, 1.1, 1.0).unwrap();
        let closer = Polygon::rect(0.05, 0.0, 1.05, 1.0).unwrap();
        let m = match_image(&[close, closer], &[gt], 0.5);
        assert_eq!(m.tp(), 1);
        assert_eq!((m.matches[0].det, m.matches[0].gt), (1, 0));
    }

    #[test]
    fn ties_prefer_lower_indices() {
        let gt = sq(0.0, 0.0);
        let m = match_image(&[gt.clone(), gt.clone()], &[gt.clone(), gt.clone()], 0.5);
        let pairs: Vec<(usize, usize)> = m.matches.iter().map(|m| (m.det, m.gt)).collect();
        assert_eq!(pairs, vec![(0, 0), (1, 1)]);
        let t = Polygon::new(vec![Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(0.0, 1.0)]).unwrap();
        assert_eq!(match_image(std::slice::from_ref(&t), std::slice::from_ref(&t), 0.5).tp(), 1);
    }

    #[test]
    fn aggregate_examples() {
        let r = aggregate(&[counts(5, 5, 5)]);
        assert_eq!((r.precision, r.recall, r.f_measure), (1.0, 1.0, 1.0));
        let r = aggregate(&[counts(2, 4, 2)]);
        assert_eq!((r.precision, r.recall), (0.5, 1.0));
        assert!((r.f_measure - 2.0 / 3.0).abs() < 1e-15);
        let r = aggregate(&[counts(0, 0, 0)]);
        assert_eq!((r.precision, r.recall, r.f_measure), (1.0, 1.0, 1.0));
        let r = aggregate(&[counts(0, 0, 3)]);
        assert_eq!((r.precision, r.recall, r.f_measure), (0.0, 0.0, 0.0));
        let r = aggregate(&[]);
        assert_eq!(r.f_measure, 1.0);
    }

    #[test]
    fn micro_average_over_images() {
        let r = aggregate(&[counts(1, 1, 2), counts(3, 4, 3)]);
        assert_eq!((r.tp, r.n_det, r.n_gt), (4, 5, 5));
        assert_eq!((r.precision, r.recall), (0.8, 0.8));
        assert_eq!(r.per_image.len(), 2);
        assert_eq!(r.per_image[0].prf().1, 0.5);
    }
}
