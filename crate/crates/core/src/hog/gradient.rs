use crate::error::{Error, Result};
use crate::hog::GradientFilter;
use crate::raster::GrayImage;

/// Per-pixel gradient magnitude and unsigned orientation in degrees, `[0, 180)`.
#[derive(Clone, Debug, PartialEq)]
pub struct GradientField {
    width: usize,
    height: usize,
    magnitude: Vec<f64>,
    orientation: Vec<f64>,
}

impl GradientField {
    /// Builds a field from precomputed planes, checking the type invariants.
    pub fn from_parts(width: usize, height: usize, magnitude: Vec<f64>, orientation: Vec<f64>) -> Result<Self> {
        if magnitude.len() != width * height || orientation.len() != width * height {
            return Err(Error::Dimension(format!(
                "planes of length {} and {} do not match {width}x{height}",
                magnitude.len(),
                orientation.len()
            )));
        }
        if magnitude.iter().any(|m| m.is_nan() || *m < 0.0) {
            return Err(Error::Parameter("magnitudes must be nonnegative".into()));
        }
        if orientation.iter().any(|t| !(0.0..180.0).contains(t)) {
            return Err(Error::Parameter("orientations must lie in [0, 180)".into()));
        }
        Ok(Self {
            width,
            height,
            magnitude,
            orientation,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn magnitude(&self) -> &[f64] {
        &self.magnitude
    }

    pub fn orientation(&self) -> &[f64] {
        &self.orientation
    }

    #[inline]
    pub fn at(&self, x: usize, y: usize) -> (f64, f64) {
        let i = y * self.width + x;
        (self.magnitude[i], self.orientation[i])
    }
}

/// Folds `atan2(gy, gx)` into `[0, 180)` degrees.
#[inline]
pub fn unsigned_orientation(gx: f64, gy: f64) -> f64 {
    if gx == 0.0 && gy == 0.0 {
        return 0.0;
    }
    let mut theta = gy.atan2(gx).to_degrees();
    if theta < 0.0 {
        theta += 180.0;
    }
    if theta >= 180.0 {
        theta -= 180.0;
    }
    theta
}

/// Computes the gradient field with clamp-to-edge borders.
pub fn compute_gradient(img: &GrayImage, filter: GradientFilter) -> Result<GradientField> {
    let (w, h) = (img.width(), img.height());
    if w < 3 || h < 3 {
        return Err(Error::Dimension(format!(
            "gradient needs at least a 3x3 image, got {w}x{h}"
        )));
    }
    let px = img.pixels();
    let at = |x: usize, y: usize| px[y * w + x] as i32;
    let mut magnitude = Vec::with_capacity(w * h);
    let mut orientation = Vec::with_capacity(w * h);
    for y in 0..h {
        let up = y.saturating_sub(1);
        let down = (y + 1).min(h - 1);
        for x in 0..w {
            let left = x.saturating_sub(1);
            let right = (x + 1).min(w - 1);
            let (gx, gy) = match filter {
                GradientFilter::OneDDerivative => (at(right, y) - at(left, y), at(x, down) - at(x, up)),
                GradientFilter::Sobel => {
                    let gx = (at(right, up) + 2 * at(right, y) + at(right, down))
                        - (at(left, up) + 2 * at(left, y) + at(left, down));
                    let gy = (at(left, down) + 2 * at(x, down) + at(right, down))
                        - (at(left, up) + 2 * at(x, up) + at(right, up));
                    (gx, gy)
                }
            };
            let (gx, gy) = (gx as f64, gy as f64);
            magnitude.push((gx * gx + gy * gy).sqrt());
            orientation.push(unsigned_orientation(gx, gy));
        }
    }
    Ok(GradientField {
        width: w,
        height: h,
        magnitude,
        orientation,
    })
}
