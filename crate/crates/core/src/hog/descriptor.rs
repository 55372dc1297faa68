use crate::error::{Error, Result};
use crate::hog::{GradientField, HogConfig};

/// Concatenated, block-normalized window histogram.
#[derive(Clone, Debug, PartialEq)]
pub struct Descriptor(Vec<f64>);

impl Descriptor {
    pub fn from_vec(values: Vec<f64>) -> Self {
        Descriptor(values)
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }
}

impl From<Vec<f64>> for Descriptor {
    fn from(values: Vec<f64>) -> Self {
        Descriptor(values)
    }
}

/// Orientation bin for an angle in `[0, 180)`.
#[inline]
pub fn bin_index(theta: f64, bin_width: f64, bin_count: usize) -> usize {
    ((theta / bin_width) as usize).min(bin_count - 1)
}

/// Adds every pixel's magnitude into its orientation bin. No bounds checks.
fn accumulate_cell(field: &GradientField, x: usize, y: usize, config: &HogConfig, out: &mut [f64]) {
    let bin_width = config.bin_width_degrees();
    let w = field.width();
    let (mags, thetas) = (field.magnitude(), field.orientation());
    for row in y..y + config.cell_size {
        let start = row * w + x;
        for i in start..start + config.cell_size {
            out[bin_index(thetas[i], bin_width, config.bin_count)] += mags[i];
        }
    }
}

fn check_rect(field: &GradientField, x: usize, y: usize, w: usize, h: usize, what: &str) -> Result<()> {
    if x + w > field.width() || y + h > field.height() {
        return Err(Error::Dimension(format!(
            "{what} {w}x{h} at ({x},{y}) exceeds field {}x{}",
            field.width(),
            field.height()
        )));
    }
    Ok(())
}

/// Magnitude-weighted orientation histogram of the cell whose top-left pixel is `origin`.
pub fn cell_histogram(field: &GradientField, origin: (usize, usize), config: &HogConfig) -> Result<Vec<f64>> {
    config.validate()?;
    check_rect(field, origin.0, origin.1, config.cell_size, config.cell_size, "cell")?;
    let mut hist = vec![0.0; config.bin_count];
    accumulate_cell(field, origin.0, origin.1, config, &mut hist);
    Ok(hist)
}

/// In-place L1 normalization `v / (‖v‖₁ + epsilon)`.
pub fn normalize_block_in_place(v: &mut [f64], epsilon: f64) {
    let norm: f64 = v.iter().map(|x| x.abs()).sum::<f64>() + epsilon;
    for x in v.iter_mut() {
        *x /= norm;
    }
}

/// L1-normalizes the concatenated cell histograms of one block.
pub fn normalize_block(histograms: &[f64], epsilon: f64) -> Vec<f64> {
    let mut out = histograms.to_vec();
    normalize_block_in_place(&mut out, epsilon);
    out
}

/// Descriptor of the window whose top-left pixel is `origin`.
///
/// Blocks are visited row-major at `block_stride` spacing, cells row-major
/// inside a block, bins in ascending angle.
pub fn window_descriptor(field: &GradientField, origin: (usize, usize), config: &HogConfig) -> Result<Descriptor> {
    let len = config.descriptor_len()?;
    check_rect(
        field,
        origin.0,
        origin.1,
        config.window_width,
        config.window_height,
        "window",
    )?;
    let mut out = Vec::with_capacity(len);
    let (blocks_x, blocks_y) = config.blocks_per_window();
    let side = config.cells_per_block_side();
    let mut block = vec![0.0; config.block_len()];
    for by in 0..blocks_y {
        for bx in 0..blocks_x {
            let block_x = origin.0 + bx * config.block_stride;
            let block_y = origin.1 + by * config.block_stride;
            block.iter_mut().for_each(|v| *v = 0.0);
            for cy in 0..side {
                for cx in 0..side {
                    let slot = (cy * side + cx) * config.bin_count;
                    accumulate_cell(
                        field,
                        block_x + cx * config.cell_size,
                        block_y + cy * config.cell_size,
                        config,
                        &mut block[slot..slot + config.bin_count],
                    );
                }
            }
            normalize_block_in_place(&mut block, config.epsilon);
            out.extend_from_slice(&block);
        }
    }
    debug_assert_eq!(out.len(), len);
    Ok(Descriptor(out))
}

/// Cell histograms for every cell on the `cell_size` grid anchored at the
/// field origin.
///
/// When window origins and block offsets are multiples of `cell_size`, every
/// cell a window touches lives on this grid, so descriptors can be assembled
/// from cached histograms with results identical to [`window_descriptor`].
pub struct CellGrid<'a> {
    config: &'a HogConfig,
    cols: usize,
    rows: usize,
    bins: Vec<f64>,
}

impl<'a> CellGrid<'a> {
    pub fn new(field: &GradientField, config: &'a HogConfig) -> Result<Self> {
        config.validate()?;
        let cols = field.width() / config.cell_size;
        let rows = field.height() / config.cell_size;
        let mut bins = vec![0.0; cols * rows * config.bin_count];
        for r in 0..rows {
            for c in 0..cols {
                let slot = (r * cols + c) * config.bin_count;
                accumulate_cell(
                    field,
                    c * config.cell_size,
                    r * config.cell_size,
                    config,
                    &mut bins[slot..slot + config.bin_count],
                );
            }
        }
        Ok(Self {
            config,
            cols,
            rows,
            bins,
        })
    }

    /// Whether windows at multiples of `window_stride` stay on the cell grid.
    pub fn supports(config: &HogConfig, window_stride: usize) -> bool {
        window_stride.is_multiple_of(config.cell_size) && config.block_stride.is_multiple_of(config.cell_size)
    }

    fn cell(&self, col: usize, row: usize) -> &[f64] {
        let n = self.config.bin_count;
        let slot = (row * self.cols + col) * n;
        &self.bins[slot..slot + n]
    }

    /// Writes the descriptor of the window at `origin` into `out`, replacing its contents.
    ///
    /// `origin` must be cell-aligned and the window must fit in the grid.
    pub fn write_descriptor(&self, origin: (usize, usize), out: &mut Vec<f64>) -> Result<()> {
        let c = self.config;
        if !origin.0.is_multiple_of(c.cell_size)
            || !origin.1.is_multiple_of(c.cell_size)
            || !c.block_stride.is_multiple_of(c.cell_size)
        {
            return Err(Error::Dimension(format!(
                "window origin ({},{}) is not aligned to the {} px cell grid",
                origin.0, origin.1, c.cell_size
            )));
        }
        let col0 = origin.0 / c.cell_size;
        let row0 = origin.1 / c.cell_size;
        if (origin.0 + c.window_width) / c.cell_size > self.cols
            || (origin.1 + c.window_height) / c.cell_size > self.rows
        {
            return Err(Error::Dimension(format!(
                "window at ({},{}) exceeds the cell grid",
                origin.0, origin.1
            )));
        }
        out.clear();
        let (blocks_x, blocks_y) = c.blocks_per_window();
        let side = c.cells_per_block_side();
        let step = c.block_stride / c.cell_size;
        for by in 0..blocks_y {
            for bx in 0..blocks_x {
                let start = out.len();
                for cy in 0..side {
                    for cx in 0..side {
                        out.extend_from_slice(self.cell(col0 + bx * step + cx, row0 + by * step + cy));
                    }
                }
                normalize_block_in_place(&mut out[start..], c.epsilon);
            }
        }
        Ok(())
    }
}
