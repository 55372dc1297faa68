use crate::detect::{BBox, Detection};

/// Outcome of matching one image's detections against its targets.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct MatchCounts {
    pub matched_targets: usize,
    pub false_detections: usize,
}

/// Whether `detection` covers strictly more than half of `target`'s area.
pub fn covers_half(detection: &BBox, target: &BBox) -> bool {
    2 * detection.intersection_area(target) > target.area()
}

/// Greedy one-to-one matching under the half-coverage rule.
///
/// Detections are visited by descending score. Each takes the unconsumed
/// target it covers best (ties go to the earlier target); detections that
/// find none are false detections.
pub fn match_detections(detections: &[Detection], targets: &[BBox]) -> MatchCounts {
    let mut order: Vec<&Detection> = detections.iter().collect();
    order.sort_by(|a, b| b.score.total_cmp(&a.score));
    let mut consumed = vec![false; targets.len()];
    let mut counts = MatchCounts::default();
    for det in order {
        let best = targets
            .iter()
            .enumerate()
            .filter(|(i, t)| !consumed[*i] && covers_half(&det.bbox, t))
            .map(|(i, t)| (i, det.bbox.intersection_area(t) as f64 / t.area() as f64))
            .fold(None, |best: Option<(usize, f64)>, cand| match best {
                Some(b) if b.1 >= cand.1 => Some(b),
                _ => Some(cand),
            });
        match best {
            Some((i, _)) => {
                consumed[i] = true;
                counts.matched_targets += 1;
            }
            None => counts.false_detections += 1,
        }
    }
    counts
}

#[cfg(test)]
mod tests {
    use super::*;

    fn det(b: BBox, score: f64) -> Detection {
        Detection {
            bbox: b,
            score,
            scale: 1.0,
        }
    }

    #[test]
    fn exact_box_matches() {
        let t = BBox::new(10, 10, 64, 128);
        let c = match_detections(&[det(t, 1.0)], &[t]);
        assert_eq!(
            c,
            MatchCounts {
                matched_targets: 1,
                false_detections: 0
            }
        );
    }

    #[test]
    fn exactly_half_is_not_enough() {
        let t = BBox::new(0, 0, 10, 10);
        let half = BBox::new(5, 0, 10, 10);
        let c = match_detections(&[det(half, 1.0)], &[t]);
        assert_eq!(
            c,
            MatchCounts {
                matched_targets: 0,
                false_detections: 1
            }
        );
        let more = BBox::new(4, 0, 10, 10);
        assert_eq!(match_detections(&[det(more, 1.0)], &[t]).matched_targets, 1);
    }

    #[test]
    fn second_detection_on_one_target_is_false() {
        let t = BBox::new(0, 0, 10, 10);
        let c = match_detections(&[det(t, 2.0), det(BBox::new(1, 1, 10, 10), 1.0)], &[t]);
        assert_eq!(
            c,
            MatchCounts {
                matched_targets: 1,
                false_detections: 1
            }
        );
    }

    #[test]
    fn no_targets_means_all_false() {
        let c = match_detections(&[det(BBox::new(0, 0, 5, 5), 1.0)], &[]);
        assert_eq!(
            c,
            MatchCounts {
                matched_targets: 0,
                false_detections: 1
            }
        );
        assert_eq!(match_detections(&[], &[BBox::new(0, 0, 5, 5)]), MatchCounts::default());
    }
}
