//! Histogram-of-oriented-gradients features.
//!
//! The pipeline is: [`compute_gradient`] turns a grayscale image into a
//! magnitude/orientation field, [`cell_histogram`] accumulates a hard
//! magnitude vote per pixel into `bin_count` unsigned-orientation bins,
//! [`normalize_block`] L1-normalizes the concatenated cells of one block, and
//! [`window_descriptor`] concatenates every block of a detection window.

mod config;
mod descriptor;
mod gradient;

pub use config::{parse_gamma, GradientFilter, HogConfig};
pub use descriptor::{
    bin_index, cell_histogram, normalize_block, normalize_block_in_place, window_descriptor, CellGrid, Descriptor,
};
pub use gradient::{compute_gradient, unsigned_orientation, GradientField};
