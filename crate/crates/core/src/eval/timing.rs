use std::time::Instant;

use serde::Serialize;

use crate::detect::{detect_timed, DetectParams, PhaseTimes};
use crate::error::Result;
use crate::raster::GrayImage;
use crate::svm::LinearModel;

/// Median wall-clock timings over repeated detection runs.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PhaseTiming {
    pub repetitions: usize,
    /// Per-phase medians, each taken independently.
    pub phases: PhaseTimes,
    /// Median wall-clock time of the whole detect call.
    pub end_to_end_ms: f64,
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        (values[n / 2 - 1] + values[n / 2]) / 2.0
    }
}

/// Times `repetitions` (at least 5) detect runs on one image and reports medians.
pub fn time_phases(
    img: &GrayImage,
    model: &LinearModel,
    params: &DetectParams,
    repetitions: usize,
) -> Result<PhaseTiming> {
    let repetitions = repetitions.max(5);
    let mut pre = Vec::with_capacity(repetitions);
    let mut grad = Vec::with_capacity(repetitions);
    let mut scan = Vec::with_capacity(repetitions);
    let mut nms = Vec::with_capacity(repetitions);
    let mut total = Vec::with_capacity(repetitions);
    for _ in 0..repetitions {
        let start = Instant::now();
        let outcome = detect_timed(img, model, params)?;
        total.push(start.elapsed().as_secs_f64() * 1e3);
        pre.push(outcome.times.preprocess_ms);
        grad.push(outcome.times.gradient_ms);
        scan.push(outcome.times.scan_ms);
        nms.push(outcome.times.nms_ms);
    }
    Ok(PhaseTiming {
        repetitions,
        phases: PhaseTimes {
            preprocess_ms: median(&mut pre),
            gradient_ms: median(&mut grad),
            scan_ms: median(&mut scan),
            nms_ms: median(&mut nms),
        },
        end_to_end_ms: median(&mut total),
    })
}
