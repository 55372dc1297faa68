use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::settings::{parse_value, Entry};

/// Derivative operator used to build the gradient field.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GradientFilter {
    /// Centered `[-1 0 1]` masks in each axis.
    OneDDerivative,
    /// 3×3 Sobel kernels.
    Sobel,
}

impl fmt::Display for GradientFilter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GradientFilter::OneDDerivative => "one_d",
            GradientFilter::Sobel => "sobel",
        })
    }
}

impl FromStr for GradientFilter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "one_d" | "1d" | "one_d_derivative" | "derivative" => Ok(GradientFilter::OneDDerivative),
            "sobel" => Ok(GradientFilter::Sobel),
            other => Err(Error::Parameter(format!("unknown gradient filter `{other}`"))),
        }
    }
}

/// Window, cell, block and binning geometry plus the preprocessing knobs
/// that must match between training and detection.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HogConfig {
    pub window_width: usize,
    pub window_height: usize,
    pub cell_size: usize,
    pub block_size: usize,
    pub block_stride: usize,
    pub bin_count: usize,
    /// Added to the L1 norm of every block before dividing.
    pub epsilon: f64,
    /// Gamma exponent applied to the grayscale image; `None` disables correction.
    pub gamma: Option<f64>,
    pub gradient_filter: GradientFilter,
}

impl Default for HogConfig {
    fn default() -> Self {
        Self::real_time()
    }
}

impl HogConfig {
    /// 64×128 window, 8 px cells, 32 px blocks at 8 px stride, 9 bins (9360 values).
    pub fn real_time() -> Self {
        Self {
            window_width: 64,
            window_height: 128,
            cell_size: 8,
            block_size: 32,
            block_stride: 8,
            bin_count: 9,
            epsilon: 1e-5,
            gamma: Some(0.5),
            gradient_filter: GradientFilter::OneDDerivative,
        }
    }

    /// 64×128 window, 8 px cells, 2×2-cell blocks at 8 px stride, 9 bins (3780 values).
    pub fn standard() -> Self {
        Self {
            block_size: 16,
            ..Self::real_time()
        }
    }

    /// Looks up a built-in preset by name.
    pub fn preset(name: &str) -> Result<Self> {
        match name {
            "real_time" | "realtime" | "default" => Ok(Self::real_time()),
            "standard" | "3780" => Ok(Self::standard()),
            other => Err(Error::Parameter(format!(
                "unknown preset `{other}` (expected real_time or standard)"
            ))),
        }
    }

    pub fn bin_width_degrees(&self) -> f64 {
        180.0 / self.bin_count as f64
    }

    pub fn cells_per_block_side(&self) -> usize {
        self.block_size / self.cell_size
    }

    /// Length of one normalized block vector.
    pub fn block_len(&self) -> usize {
        self.cells_per_block_side().pow(2) * self.bin_count
    }

    /// Blocks per window along x and y.
    pub fn blocks_per_window(&self) -> (usize, usize) {
        (
            (self.window_width - self.block_size) / self.block_stride + 1,
            (self.window_height - self.block_size) / self.block_stride + 1,
        )
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(msg));
        if self.cell_size == 0 || self.block_size == 0 || self.block_stride == 0 || self.bin_count == 0 {
            return fail("cell_size, block_size, block_stride and bin_count must be positive".into());
        }
        if !self.block_size.is_multiple_of(self.cell_size) {
            return fail(format!(
                "block_size {} is not a multiple of cell_size {}",
                self.block_size, self.cell_size
            ));
        }
        if self.window_width < self.block_size || self.window_height < self.block_size {
            return fail(format!(
                "window {}x{} is smaller than block_size {}",
                self.window_width, self.window_height, self.block_size
            ));
        }
        for (name, extent) in [
            ("window_width", self.window_width),
            ("window_height", self.window_height),
        ] {
            if !(extent - self.block_size).is_multiple_of(self.block_stride) {
                return fail(format!(
                    "{name} {extent} minus block_size {} is not a multiple of block_stride {}",
                    self.block_size, self.block_stride
                ));
            }
        }
        if !(self.epsilon.is_finite() && self.epsilon > 0.0) {
            return fail(format!("epsilon must be positive, got {}", self.epsilon));
        }
        if let Some(g) = self.gamma {
            if !(g.is_finite() && g > 0.0) {
                return fail(format!("gamma must be positive, got {g}"));
            }
        }
        Ok(())
    }

    /// Number of values in one window descriptor.
    pub fn descriptor_len(&self) -> Result<usize> {
        self.validate()?;
        let (bx, by) = self.blocks_per_window();
        Ok(bx * by * self.block_len())
    }

    /// Serializes to `key = value` lines in a fixed key order.
    pub fn to_key_values(&self) -> String {
        let gamma = match self.gamma {
            Some(g) => g.to_string(),
            None => "off".to_string(),
        };
        format!(
            "window_width = {}\nwindow_height = {}\ncell_size = {}\nblock_size = {}\n\
             block_stride = {}\nbin_count = {}\nbin_width_degrees = {}\nepsilon = {}\n\
             gamma = {}\ngradient_filter = {}\n",
            self.window_width,
            self.window_height,
            self.cell_size,
            self.block_size,
            self.block_stride,
            self.bin_count,
            self.bin_width_degrees(),
            self.epsilon,
            gamma,
            self.gradient_filter,
        )
    }

    /// Applies one entry if its key names a config field. Returns whether it was consumed.
    pub fn apply_entry(&mut self, entry: &Entry) -> Result<bool> {
        match entry.key.as_str() {
            "window_width" => self.window_width = parse_value(entry)?,
            "window_height" => self.window_height = parse_value(entry)?,
            "cell_size" => self.cell_size = parse_value(entry)?,
            "block_size" => self.block_size = parse_value(entry)?,
            "block_stride" => self.block_stride = parse_value(entry)?,
            "bin_count" => self.bin_count = parse_value(entry)?,
            "epsilon" => self.epsilon = parse_value(entry)?,
            "gamma" => {
                self.gamma = parse_gamma(&entry.value).map_err(|_| Error::Parse {
                    line: entry.line,
                    message: format!("invalid gamma `{}`", entry.value),
                })?
            }
            "gradient_filter" => self.gradient_filter = parse_value(entry)?,
            // Derived; checked by the caller against bin_count if it cares.
            "bin_width_degrees" => {}
            _ => return Ok(false),
        }
        Ok(true)
    }
}

/// Parses a gamma value, accepting `off`/`none` for disabled correction.
pub fn parse_gamma(s: &str) -> Result<Option<f64>> {
    match s.trim() {
        "off" | "none" | "disabled" => Ok(None),
        v => v
            .parse::<f64>()
            .map(Some)
            .map_err(|_| Error::Parameter(format!("invalid gamma `{v}`"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::settings::parse_key_values;

    fn geometry(w: usize, h: usize, cell: usize, block: usize, stride: usize) -> HogConfig {
        HogConfig {
            window_width: w,
            window_height: h,
            cell_size: cell,
            block_size: block,
            block_stride: stride,
            ..HogConfig::real_time()
        }
    }

    #[test]
    fn descriptor_lengths() {
        assert_eq!(geometry(64, 128, 8, 16, 8).descriptor_len().unwrap(), 3780);
        assert_eq!(geometry(16, 16, 8, 16, 8).descriptor_len().unwrap(), 36);
        assert_eq!(geometry(64, 128, 8, 32, 8).descriptor_len().unwrap(), 9360);
        assert_eq!(HogConfig::standard().descriptor_len().unwrap(), 3780);
        assert_eq!(HogConfig::default().descriptor_len().unwrap(), 9360);
    }

    #[test]
    fn invalid_geometry_is_rejected() {
        assert!(matches!(
            geometry(64, 128, 8, 28, 8).descriptor_len(),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            geometry(64, 128, 8, 16, 12).descriptor_len(),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            geometry(8, 128, 8, 16, 8).descriptor_len(),
            Err(Error::Config(_))
        ));
        let bad_eps = HogConfig {
            epsilon: 0.0,
            ..HogConfig::default()
        };
        assert!(matches!(bad_eps.validate(), Err(Error::Config(_))));
    }

    #[test]
    fn key_values_round_trip() {
        let mut config = HogConfig::standard();
        config.gamma = None;
        config.gradient_filter = GradientFilter::Sobel;
        config.epsilon = 0.1 + 0.2;
        let mut parsed = HogConfig::real_time();
        for entry in parse_key_values(&config.to_key_values()).unwrap() {
            assert!(parsed.apply_entry(&entry).unwrap(), "unconsumed {}", entry.key);
        }
        assert_eq!(parsed, config);
    }
}
