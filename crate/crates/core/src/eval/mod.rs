//! Evaluation harness: annotations, half-coverage matching, aggregate
//! reports, parameter sweeps and per-phase timing.

mod annotations;
mod matching;
mod report;
mod sweep;
mod timing;
mod training;

pub use annotations::{format_annotations, parse_annotations, Annotation};
pub use matching::{covers_half, match_detections, MatchCounts};
pub use report::{evaluate, evaluate_with, percent, DirSource, EvalReport, ImageError, ImageSource, MemorySource};
pub use sweep::{sweep, write_sweep_csv, SweepAxis, SweepBase, SweepRow};
pub use timing::{time_phases, PhaseTiming};
pub use training::{build_samples, crop_descriptor, negative_origins, train_detector, TrainingSet};
