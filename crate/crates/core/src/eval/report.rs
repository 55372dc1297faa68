use std::collections::HashMap;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use serde::Serialize;

use crate::detect::{detect_timed, DetectOutcome, DetectParams, PhaseTimes};
use crate::error::{Error, Result};
use crate::eval::{match_detections, Annotation};
use crate::hog::HogConfig;
use crate::raster::{read_gray, GrayImage};
use crate::svm::LinearModel;

/// Where evaluation images come from.
pub trait ImageSource {
    fn load(&self, image_path: &str) -> Result<GrayImage>;
}

/// Netpbm files resolved relative to a root directory.
pub struct DirSource {
    pub root: PathBuf,
}

impl DirSource {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Self { root: root.into() }
    }
}

impl ImageSource for DirSource {
    fn load(&self, image_path: &str) -> Result<GrayImage> {
        read_gray(self.root.join(image_path))
    }
}

/// In-memory images keyed by annotation path.
#[derive(Default)]
pub struct MemorySource {
    pub images: HashMap<String, GrayImage>,
}

impl ImageSource for MemorySource {
    fn load(&self, image_path: &str) -> Result<GrayImage> {
        self.images.get(image_path).cloned().ok_or_else(|| {
            Error::Io(std::io::Error::new(
                std::io::ErrorKind::NotFound,
                image_path.to_string(),
            ))
        })
    }
}

/// An image that could not be evaluated.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ImageError {
    pub image: String,
    pub message: String,
}

/// Aggregate detection statistics over a dataset.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EvalReport {
    pub images: usize,
    pub targets: usize,
    pub detected_targets: usize,
    pub detections: usize,
    pub false_detections: usize,
    pub pre_nms_detections: usize,
    /// detected_targets / targets, 0 for an empty dataset.
    pub detection_rate: f64,
    /// false_detections / targets, 0 for an empty dataset.
    pub false_rate: f64,
    pub detection_percent: u64,
    pub false_percent: u64,
    pub false_rate_denominator: &'static str,
    pub mean_ms_per_image: f64,
    pub mean_phase_ms: PhaseTimes,
    pub decode_ms_total: f64,
    pub errors: Vec<ImageError>,
    pub config: HogConfig,
    pub params: DetectParams,
}

/// Integer percent of `num / den`, rounded half-up; 0 when `den` is 0.
pub fn percent(num: usize, den: usize) -> u64 {
    if den == 0 {
        0
    } else {
        // Exact integer form of floor(100·num/den + 1/2).
        ((200 * num as u128 + den as u128) / (2 * den as u128)) as u64
    }
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Runs `detector` on every image and aggregates the half-coverage matches.
///
/// Images that fail to load or detect are listed in `errors` and excluded
/// from every count.
pub fn evaluate_with<S, D>(
    dataset: &[Annotation],
    source: &S,
    mut detector: D,
    config: &HogConfig,
    params: &DetectParams,
) -> EvalReport
where
    S: ImageSource + ?Sized,
    D: FnMut(&GrayImage) -> Result<DetectOutcome>,
{
    let mut report = EvalReport {
        images: 0,
        targets: 0,
        detected_targets: 0,
        detections: 0,
        false_detections: 0,
        pre_nms_detections: 0,
        detection_rate: 0.0,
        false_rate: 0.0,
        detection_percent: 0,
        false_percent: 0,
        false_rate_denominator: "targets",
        mean_ms_per_image: 0.0,
        mean_phase_ms: PhaseTimes::default(),
        decode_ms_total: 0.0,
        errors: Vec::new(),
        config: config.clone(),
        params: params.clone(),
    };
    let mut total_ms = 0.0;
    let mut phases = PhaseTimes::default();
    for annotation in dataset {
        let start = Instant::now();
        let loaded = source.load(&annotation.image_path);
        report.decode_ms_total += start.elapsed().as_secs_f64() * 1e3;
        let img = match loaded {
            Ok(img) => img,
            Err(e) => {
                report.errors.push(ImageError {
                    image: annotation.image_path.clone(),
                    message: e.to_string(),
                });
                continue;
            }
        };
        let start = Instant::now();
        let outcome = match detector(&img) {
            Ok(o) => o,
            Err(e) => {
                report.errors.push(ImageError {
                    image: annotation.image_path.clone(),
                    message: e.to_string(),
                });
                continue;
            }
        };
        total_ms += start.elapsed().as_secs_f64() * 1e3;
        phases.preprocess_ms += outcome.times.preprocess_ms;
        phases.gradient_ms += outcome.times.gradient_ms;
        phases.scan_ms += outcome.times.scan_ms;
        phases.nms_ms += outcome.times.nms_ms;

        let counts = match_detections(&outcome.detections, &annotation.targets);
        report.images += 1;
        report.targets += annotation.targets.len();
        report.detected_targets += counts.matched_targets;
        report.false_detections += counts.false_detections;
        report.detections += outcome.detections.len();
        report.pre_nms_detections += outcome.pre_nms_count;
    }
    report.detection_rate = ratio(report.detected_targets, report.targets);
    report.false_rate = ratio(report.false_detections, report.targets);
    report.detection_percent = percent(report.detected_targets, report.targets);
    report.false_percent = percent(report.false_detections, report.targets);
    if report.images > 0 {
        let n = report.images as f64;
        report.mean_ms_per_image = total_ms / n;
        report.mean_phase_ms = PhaseTimes {
            preprocess_ms: phases.preprocess_ms / n,
            gradient_ms: phases.gradient_ms / n,
            scan_ms: phases.scan_ms / n,
            nms_ms: phases.nms_ms / n,
        };
    }
    report
}

/// Detects on every annotated image with `model` and aggregates the results.
pub fn evaluate<S: ImageSource + ?Sized>(
    dataset: &[Annotation],
    source: &S,
    model: &LinearModel,
    params: &DetectParams,
) -> EvalReport {
    evaluate_with(
        dataset,
        source,
        |img| detect_timed(img, model, params),
        &model.config,
        params,
    )
}

impl EvalReport {
    /// Pretty JSON document including the config echo.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub const CSV_HEADER: [&'static str; 10] = [
        "images",
        "targets",
        "detected",
        "detection_percent",
        "false_positives",
        "false_percent",
        "detections",
        "pre_nms_detections",
        "mean_ms",
        "errors",
    ];

    pub fn csv_fields(&self) -> Vec<String> {
        vec![
            self.images.to_string(),
            self.targets.to_string(),
            self.detected_targets.to_string(),
            self.detection_percent.to_string(),
            self.false_detections.to_string(),
            self.false_percent.to_string(),
            self.detections.to_string(),
            self.pre_nms_detections.to_string(),
            format!("{:.3}", self.mean_ms_per_image),
            self.errors.len().to_string(),
        ]
    }

    /// Header row plus one data row.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(Self::CSV_HEADER).map_err(std::io::Error::other)?;
        w.write_record(self.csv_fields()).map_err(std::io::Error::other)?;
        w.flush()?;
        Ok(())
    }
}
