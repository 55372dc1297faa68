//! Human detection with HOG descriptors and a linear SVM.
//!
//! The crate covers the whole pipeline:
//!
//! - [`raster`]: PGM/PPM I/O, luma conversion, gamma correction, bilinear resize.
//! - [`hog`]: gradients, cell histograms, L1 block normalization, window descriptors.
//! - [`svm`]: seeded subgradient training of a linear SVM, scoring, model files.
//! - [`detect`]: scale pyramid, sliding-window scan against a global threshold, NMS.
//! - [`eval`]: annotations, half-coverage matching, reports, parameter sweeps, timing.
//! - [`synth`]: planted-target corpora for self-contained experiments.
//!
//! ```
//! use hogscan::hog::{compute_gradient, window_descriptor, HogConfig};
//! use hogscan::raster::GrayImage;
//!
//! let config = HogConfig::standard();
//! let img = GrayImage::from_fn(64, 128, |x, y| ((x * 3 + y) % 256) as u8).unwrap();
//! let field = compute_gradient(&img, config.gradient_filter).unwrap();
//! let descriptor = window_descriptor(&field, (0, 0), &config).unwrap();
//! assert_eq!(descriptor.len(), 3780);
//! ```

pub mod cli;
pub mod detect;
pub mod error;
pub mod eval;
pub mod hog;
pub mod raster;
pub mod settings;
pub mod svm;
pub mod synth;

pub use error::{Error, Result};
