//! Multi-scale sliding-window detection.
//!
//! An input frame is gamma-corrected per the model's config, downscaled into
//! a pyramid, and every level is scanned on a regular grid of window origins.
//! Windows whose decision value reaches the global threshold `tau` become
//! detections in original-image coordinates, optionally thinned by greedy NMS.

use std::io::Write;
use std::time::Instant;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::hog::{compute_gradient, window_descriptor, CellGrid, GradientField, HogConfig};
use crate::raster::{gamma_correct, resize_bilinear, round_half_up, GrayImage};
use crate::settings::{parse_flag, parse_value, Entry};
use crate::svm::LinearModel;

/// Axis-aligned box in pixels.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct BBox {
    pub x: i64,
    pub y: i64,
    pub width: i64,
    pub height: i64,
}

impl BBox {
    pub fn new(x: i64, y: i64, width: i64, height: i64) -> Self {
        Self { x, y, width, height }
    }

    pub fn area(&self) -> i64 {
        self.width.max(0) * self.height.max(0)
    }

    pub fn intersection_area(&self, other: &BBox) -> i64 {
        let x0 = self.x.max(other.x);
        let y0 = self.y.max(other.y);
        let x1 = (self.x + self.width).min(other.x + other.width);
        let y1 = (self.y + self.height).min(other.y + other.height);
        (x1 - x0).max(0) * (y1 - y0).max(0)
    }

    pub fn iou(&self, other: &BBox) -> f64 {
        let inter = self.intersection_area(other);
        let union = self.area() + other.area() - inter;
        if union <= 0 {
            0.0
        } else {
            inter as f64 / union as f64
        }
    }

    /// Intersection with `[0, width) × [0, height)`, or `None` if empty.
    pub fn clip(&self, width: usize, height: usize) -> Option<BBox> {
        let x0 = self.x.max(0);
        let y0 = self.y.max(0);
        let x1 = (self.x + self.width).min(width as i64);
        let y1 = (self.y + self.height).min(height as i64);
        (x1 > x0 && y1 > y0).then(|| BBox::new(x0, y0, x1 - x0, y1 - y0))
    }
}

/// A scored window in original-image coordinates.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Detection {
    #[serde(flatten)]
    pub bbox: BBox,
    pub score: f64,
    /// Pyramid scale factor of the level the window came from.
    pub scale: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DetectParams {
    /// Global threshold on the raw decision value.
    pub tau: f64,
    pub scale_step: f64,
    pub nms_overlap: f64,
    pub nms_enabled: bool,
    /// Window origin spacing; `None` means `cell_size`.
    pub window_stride: Option<usize>,
}

impl Default for DetectParams {
    fn default() -> Self {
        Self {
            tau: 1.05,
            scale_step: 1.05,
            nms_overlap: 0.5,
            nms_enabled: true,
            window_stride: None,
        }
    }
}

impl DetectParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.scale_step.is_finite() && self.scale_step > 1.0) {
            return Err(Error::Parameter(format!(
                "scale_step must exceed 1, got {}",
                self.scale_step
            )));
        }
        if !(0.0..=1.0).contains(&self.nms_overlap) {
            return Err(Error::Parameter(format!(
                "nms_overlap must lie in [0, 1], got {}",
                self.nms_overlap
            )));
        }
        if self.tau.is_nan() {
            return Err(Error::Parameter("tau must not be NaN".into()));
        }
        if self.window_stride == Some(0) {
            return Err(Error::Parameter("window_stride must be positive".into()));
        }
        Ok(())
    }

    pub fn stride_for(&self, config: &HogConfig) -> usize {
        self.window_stride.unwrap_or(config.cell_size)
    }

    /// Applies one entry if its key names a detection parameter.
    pub fn apply_entry(&mut self, entry: &Entry) -> Result<bool> {
        match entry.key.as_str() {
            "tau" => self.tau = parse_value(entry)?,
            "scale_step" => self.scale_step = parse_value(entry)?,
            "nms_overlap" => self.nms_overlap = parse_value(entry)?,
            "nms" | "nms_enabled" => self.nms_enabled = parse_flag(entry)?,
            "window_stride" => self.window_stride = Some(parse_value(entry)?),
            _ => return Ok(false),
        }
        Ok(true)
    }
}

/// One level of the scale pyramid.
#[derive(Clone, Debug)]
pub struct PyramidLevel {
    /// Factor that maps level coordinates back to the original image.
    pub scale: f64,
    pub image: GrayImage,
}

/// Downscales by `scale_step^k` for k = 0, 1, … while a full window still fits.
pub fn build_pyramid(img: &GrayImage, config: &HogConfig, scale_step: f64) -> Result<Vec<PyramidLevel>> {
    if !(scale_step.is_finite() && scale_step > 1.0) {
        return Err(Error::Parameter(format!("scale_step must exceed 1, got {scale_step}")));
    }
    let mut levels = Vec::new();
    for k in 0.. {
        let scale = scale_step.powi(k);
        let w = (img.width() as f64 / scale).floor() as usize;
        let h = (img.height() as f64 / scale).floor() as usize;
        if w < config.window_width || h < config.window_height {
            break;
        }
        let image = if k == 0 {
            img.clone()
        } else {
            resize_bilinear(img, w, h)?
        };
        levels.push(PyramidLevel { scale, image });
    }
    Ok(levels)
}

/// A window on one pyramid level whose score reached the threshold.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WindowHit {
    pub origin: (usize, usize),
    pub score: f64,
}

/// Scores every window on the `window_stride` grid and keeps those with score ≥ `tau`.
///
/// Results are in row-major origin order.
pub fn scan_level(
    field: &GradientField,
    model: &LinearModel,
    window_stride: usize,
    tau: f64,
) -> Result<Vec<WindowHit>> {
    let config = &model.config;
    let len = config.descriptor_len()?;
    if model.weights.len() != len {
        return Err(Error::Dimension(format!(
            "model has {} weights, config implies {len}",
            model.weights.len()
        )));
    }
    if window_stride == 0 {
        return Err(Error::Parameter("window_stride must be positive".into()));
    }
    let mut hits = Vec::new();
    if field.width() < config.window_width || field.height() < config.window_height {
        return Ok(hits);
    }
    let xs = (field.width() - config.window_width) / window_stride + 1;
    let ys = (field.height() - config.window_height) / window_stride + 1;
    let origins = (0..ys).flat_map(|j| (0..xs).map(move |i| (i * window_stride, j * window_stride)));

    if CellGrid::supports(config, window_stride) {
        let grid = CellGrid::new(field, config)?;
        let mut buf = Vec::with_capacity(len);
        for origin in origins {
            grid.write_descriptor(origin, &mut buf)?;
            let score = model.decision(&buf);
            if score >= tau {
                hits.push(WindowHit { origin, score });
            }
        }
    } else {
        for origin in origins {
            let d = window_descriptor(field, origin, config)?;
            let score = model.decision(d.values());
            if score >= tau {
                hits.push(WindowHit { origin, score });
            }
        }
    }
    Ok(hits)
}

/// Wall-clock milliseconds spent in each stage of one [`detect`] call.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct PhaseTimes {
    /// Gamma correction and pyramid construction.
    pub preprocess_ms: f64,
    pub gradient_ms: f64,
    /// Descriptor assembly and window scoring.
    pub scan_ms: f64,
    pub nms_ms: f64,
}

impl PhaseTimes {
    pub fn total_ms(&self) -> f64 {
        self.preprocess_ms + self.gradient_ms + self.scan_ms + self.nms_ms
    }
}

fn ms_since(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

fn map_hit(hit: &WindowHit, scale: f64, config: &HogConfig, width: usize, height: usize) -> Option<Detection> {
    let bbox = BBox::new(
        round_half_up(hit.origin.0 as f64 * scale) as i64,
        round_half_up(hit.origin.1 as f64 * scale) as i64,
        round_half_up(config.window_width as f64 * scale) as i64,
        round_half_up(config.window_height as f64 * scale) as i64,
    );
    bbox.clip(width, height).map(|bbox| Detection {
        bbox,
        score: hit.score,
        scale,
    })
}

fn sort_by_score(dets: &mut [Detection]) {
    dets.sort_by(|a, b| b.score.total_cmp(&a.score));
}

/// Everything one detection pass produces.
#[derive(Clone, Debug, PartialEq)]
pub struct DetectOutcome {
    /// Final detections, sorted by descending score.
    pub detections: Vec<Detection>,
    /// Number of windows at or above threshold before suppression.
    pub pre_nms_count: usize,
    pub times: PhaseTimes,
}

fn run(img: &GrayImage, model: &LinearModel, params: &DetectParams, apply_nms: bool) -> Result<DetectOutcome> {
    params.validate()?;
    let config = &model.config;
    let mut times = PhaseTimes::default();

    let start = Instant::now();
    let corrected;
    let source = match config.gamma {
        Some(g) => {
            corrected = gamma_correct(img, g)?;
            &corrected
        }
        None => img,
    };
    let pyramid = build_pyramid(source, config, params.scale_step)?;
    times.preprocess_ms = ms_since(start);

    let stride = params.stride_for(config);
    let mut detections = Vec::new();
    for level in &pyramid {
        let start = Instant::now();
        let field = compute_gradient(&level.image, config.gradient_filter)?;
        times.gradient_ms += ms_since(start);

        let start = Instant::now();
        let hits = scan_level(&field, model, stride, params.tau)?;
        detections.extend(
            hits.iter()
                .filter_map(|h| map_hit(h, level.scale, config, img.width(), img.height())),
        );
        times.scan_ms += ms_since(start);
    }

    let pre_nms_count = detections.len();
    let start = Instant::now();
    if apply_nms {
        detections = nms(detections, params.nms_overlap);
    } else {
        sort_by_score(&mut detections);
    }
    times.nms_ms = ms_since(start);
    Ok(DetectOutcome {
        detections,
        pre_nms_count,
        times,
    })
}

/// Full detection pass; results sorted by descending score.
pub fn detect(img: &GrayImage, model: &LinearModel, params: &DetectParams) -> Result<Vec<Detection>> {
    run(img, model, params, params.nms_enabled).map(|o| o.detections)
}

/// Like [`detect`], also reporting the pre-suppression hit count and per-phase timing.
pub fn detect_timed(img: &GrayImage, model: &LinearModel, params: &DetectParams) -> Result<DetectOutcome> {
    run(img, model, params, params.nms_enabled)
}

/// Every window at or above threshold across all levels, before suppression.
pub fn detect_pre_nms(img: &GrayImage, model: &LinearModel, params: &DetectParams) -> Result<Vec<Detection>> {
    run(img, model, params, false).map(|o| o.detections)
}

/// Greedy non-maximum suppression by intersection-over-union.
pub fn nms(mut detections: Vec<Detection>, overlap_threshold: f64) -> Vec<Detection> {
    sort_by_score(&mut detections);
    let mut kept: Vec<Detection> = Vec::with_capacity(detections.len());
    for det in detections {
        if kept.iter().all(|k| k.bbox.iou(&det.bbox) <= overlap_threshold) {
            kept.push(det);
        }
    }
    kept
}

#[derive(Serialize)]
struct DetectionRecord<'a> {
    image: &'a str,
    x: i64,
    y: i64,
    w: i64,
    h: i64,
    score: f64,
    scale: f64,
}

impl<'a> DetectionRecord<'a> {
    fn new(image: &'a str, d: &Detection) -> Self {
        Self {
            image,
            x: d.bbox.x,
            y: d.bbox.y,
            w: d.bbox.width,
            h: d.bbox.height,
            score: d.score,
            scale: d.scale,
        }
    }
}

/// One JSON object per line with fields image, x, y, w, h, score, scale.
pub fn write_detections_jsonl<W: Write>(mut out: W, image: &str, detections: &[Detection]) -> Result<()> {
    for d in detections {
        serde_json::to_writer(&mut out, &DetectionRecord::new(image, d)).map_err(std::io::Error::other)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

/// CSV with a header row and the same columns as the JSON records.
pub fn write_detections_csv<W: Write>(out: W, image: &str, detections: &[Detection]) -> Result<()> {
    let mut writer = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    writer
        .write_record(["image", "x", "y", "w", "h", "score", "scale"])
        .map_err(std::io::Error::other)?;
    for d in detections {
        writer
            .serialize(DetectionRecord::new(image, d))
            .map_err(std::io::Error::other)?;
    }
    writer.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn det(x: i64, y: i64, w: i64, h: i64, score: f64) -> Detection {
        Detection {
            bbox: BBox::new(x, y, w, h),
            score,
            scale: 1.0,
        }
    }

    #[test]
    fn pyramid_level_counts() {
        let config = HogConfig::standard();
        let frame = GrayImage::filled(320, 240, 0).unwrap();
        let levels = build_pyramid(&frame, &config, 1.05).unwrap();
        assert_eq!(levels.len(), 13);
        assert_eq!(levels[12].image.height(), 133);
        assert_eq!(levels[0].image, frame);

        let exact = GrayImage::filled(64, 128, 0).unwrap();
        assert_eq!(build_pyramid(&exact, &config, 1.05).unwrap().len(), 1);
        let narrow = GrayImage::filled(63, 128, 0).unwrap();
        assert!(build_pyramid(&narrow, &config, 1.05).unwrap().is_empty());
        assert!(matches!(build_pyramid(&exact, &config, 1.0), Err(Error::Parameter(_))));
    }

    #[test]
    fn constant_image_has_no_hits() {
        let config = HogConfig::standard();
        let model = LinearModel::new(vec![0.7; 3780], 0.0, config.clone()).unwrap();
        let field = compute_gradient(&GrayImage::filled(96, 160, 80).unwrap(), config.gradient_filter).unwrap();
        assert!(scan_level(&field, &model, 8, 1.05).unwrap().is_empty());

        let all = scan_level(&field, &model, 8, f64::NEG_INFINITY).unwrap();
        assert_eq!(all.len(), ((96 - 64) / 8 + 1) * ((160 - 128) / 8 + 1));
        assert_eq!(all[0].origin, (0, 0));
        assert_eq!(all[1].origin, (8, 0));
    }

    #[test]
    fn scan_rejects_mismatched_model() {
        let config = HogConfig::standard();
        let mut model = LinearModel::new(vec![0.0; 3780], 0.0, config.clone()).unwrap();
        model.weights.pop();
        let field = compute_gradient(&GrayImage::filled(64, 128, 0).unwrap(), config.gradient_filter).unwrap();
        assert!(matches!(scan_level(&field, &model, 8, 0.0), Err(Error::Dimension(_))));
    }

    #[test]
    fn blank_frame_detects_nothing() {
        let model = LinearModel::new(vec![1.0; 9360], -1.0, HogConfig::default()).unwrap();
        let frame = GrayImage::filled(320, 240, 128).unwrap();
        assert!(detect(&frame, &model, &DetectParams::default()).unwrap().is_empty());
    }

    #[test]
    fn nms_examples() {
        assert_eq!(nms(vec![det(0, 0, 10, 10, 1.0)], 0.5), vec![det(0, 0, 10, 10, 1.0)]);
        assert_eq!(
            nms(vec![det(0, 0, 10, 10, 1.0), det(0, 0, 10, 10, 2.0)], 0.5),
            vec![det(0, 0, 10, 10, 2.0)]
        );
        assert_eq!(
            nms(vec![det(0, 0, 10, 10, 1.0), det(20, 20, 10, 10, 2.0)], 0.5),
            vec![det(20, 20, 10, 10, 2.0), det(0, 0, 10, 10, 1.0)]
        );
    }

    #[test]
    fn bbox_geometry() {
        let a = BBox::new(0, 0, 10, 10);
        let b = BBox::new(5, 0, 10, 10);
        assert_eq!(a.intersection_area(&b), 50);
        assert!((a.iou(&b) - 50.0 / 150.0).abs() < 1e-12);
        assert_eq!(BBox::new(-3, 2, 10, 10).clip(5, 5), Some(BBox::new(0, 2, 5, 3)));
        assert_eq!(BBox::new(6, 0, 4, 4).clip(5, 5), None);
    }

    #[test]
    fn params_validation() {
        let mut p = DetectParams::default();
        assert!(p.validate().is_ok());
        p.scale_step = 1.0;
        assert!(p.validate().is_err());
        p = DetectParams {
            nms_overlap: 1.5,
            ..DetectParams::default()
        };
        assert!(p.validate().is_err());
    }

    #[test]
    fn emitters() {
        let dets = vec![det(1, 2, 64, 128, 1.5)];
        let mut json = Vec::new();
        write_detections_jsonl(&mut json, "a.pgm", &dets).unwrap();
        assert_eq!(
            String::from_utf8(json).unwrap(),
            "{\"image\":\"a.pgm\",\"x\":1,\"y\":2,\"w\":64,\"h\":128,\"score\":1.5,\"scale\":1.0}\n"
        );
        let mut csv = Vec::new();
        write_detections_csv(&mut csv, "a.pgm", &dets).unwrap();
        assert_eq!(
            String::from_utf8(csv).unwrap(),
            "image,x,y,w,h,score,scale\na.pgm,1,2,64,128,1.5,1.0\n"
        );
    }
}
