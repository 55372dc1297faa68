use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::Serialize;

use crate::detect::DetectParams;
use crate::error::{Error, Result};
use crate::eval::{evaluate, train_detector, Annotation, EvalReport, ImageSource, TrainingSet};
use crate::hog::{parse_gamma, GradientFilter, HogConfig};
use crate::raster::round_half_up;
use crate::svm::{LinearModel, TrainParams};

/// Parameter varied by a sweep.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    Gamma,
    Filter,
    CellSize,
    BlockSize,
    Threshold,
}

impl fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SweepAxis::Gamma => "gamma",
            SweepAxis::Filter => "filter",
            SweepAxis::CellSize => "cell_size",
            SweepAxis::BlockSize => "block_size",
            SweepAxis::Threshold => "threshold",
        })
    }
}

impl FromStr for SweepAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gamma" => Ok(SweepAxis::Gamma),
            "filter" | "gradient_filter" => Ok(SweepAxis::Filter),
            "cell_size" | "cell" => Ok(SweepAxis::CellSize),
            "block_size" | "block" => Ok(SweepAxis::BlockSize),
            "threshold" | "tau" => Ok(SweepAxis::Threshold),
            other => Err(Error::Parameter(format!("unknown sweep axis `{other}`"))),
        }
    }
}

/// Fixed inputs shared by every row of a sweep.
pub struct SweepBase<'a> {
    pub config: HogConfig,
    pub params: DetectParams,
    pub train_params: TrainParams,
    /// Needed by every axis except threshold, which may use `model` instead.
    pub training: Option<&'a TrainingSet>,
    pub negatives_per_image: usize,
    /// Model reused across threshold rows; trained from `training` if absent.
    pub model: Option<&'a LinearModel>,
}

/// One sweep row: the axis value and either its report or the reason it failed.
#[derive(Clone, Debug, Serialize)]
pub struct SweepRow {
    pub value: String,
    pub report: Option<EvalReport>,
    pub error: Option<String>,
}

/// Config for a cell-size row: cells-per-block and stride-in-cells are kept,
/// and the window is snapped to the nearest multiple of the new cell size.
fn cell_size_config(base: &HogConfig, cell: usize) -> Result<HogConfig> {
    if cell == 0 {
        return Err(Error::Parameter("cell size must be positive".into()));
    }
    base.validate()?;
    if !base.block_stride.is_multiple_of(base.cell_size) {
        return Err(Error::Config("base block_stride is not a whole number of cells".into()));
    }
    let snap = |extent: usize| {
        let cells = round_half_up(extent as f64 / cell as f64).max(1.0) as usize;
        cells * cell
    };
    let config = HogConfig {
        cell_size: cell,
        block_size: base.cells_per_block_side() * cell,
        block_stride: base.block_stride / base.cell_size * cell,
        window_width: snap(base.window_width),
        window_height: snap(base.window_height),
        ..base.clone()
    };
    config.validate()?;
    Ok(config)
}

fn row_config(base: &HogConfig, axis: SweepAxis, value: &str) -> Result<HogConfig> {
    let parse_usize = |v: &str| {
        v.trim()
            .parse::<usize>()
            .map_err(|_| Error::Parameter(format!("`{v}` is not a pixel count")))
    };
    let config = match axis {
        SweepAxis::Gamma => HogConfig {
            gamma: parse_gamma(value)?,
            ..base.clone()
        },
        SweepAxis::Filter => HogConfig {
            gradient_filter: value.parse::<GradientFilter>()?,
            ..base.clone()
        },
        SweepAxis::CellSize => cell_size_config(base, parse_usize(value)?)?,
        SweepAxis::BlockSize => HogConfig {
            block_size: parse_usize(value)?,
            ..base.clone()
        },
        SweepAxis::Threshold => base.clone(),
    };
    config.validate()?;
    Ok(config)
}

fn run_row<S: ImageSource + ?Sized>(
    dataset: &[Annotation],
    source: &S,
    base: &SweepBase<'_>,
    axis: SweepAxis,
    value: &str,
    shared_model: &mut Option<LinearModel>,
) -> Result<EvalReport> {
    let config = row_config(&base.config, axis, value)?;
    if axis == SweepAxis::Threshold {
        let tau: f64 = value
            .trim()
            .parse()
            .map_err(|_| Error::Parameter(format!("`{value}` is not a threshold")))?;
        let params = DetectParams {
            tau,
            ..base.params.clone()
        };
        params.validate()?;
        if shared_model.is_none() {
            let model = match base.model {
                Some(m) => m.clone(),
                None => {
                    let training = base
                        .training
                        .ok_or_else(|| Error::Parameter("threshold sweep needs a model or training data".into()))?;
                    train_detector(training, &config, &base.train_params, base.negatives_per_image)?
                }
            };
            *shared_model = Some(model);
        }
        return Ok(evaluate(dataset, source, shared_model.as_ref().unwrap(), &params));
    }
    let training = base
        .training
        .ok_or_else(|| Error::Parameter(format!("the {axis} axis retrains per row and needs training data")))?;
    let model = train_detector(training, &config, &base.train_params, base.negatives_per_image)?;
    Ok(evaluate(dataset, source, &model, &base.params))
}

/// Evaluates one report per axis value. Invalid values yield error rows
/// and the sweep continues.
pub fn sweep<S: ImageSource + ?Sized>(
    dataset: &[Annotation],
    source: &S,
    base: &SweepBase<'_>,
    axis: SweepAxis,
    values: &[String],
) -> Vec<SweepRow> {
    let mut shared_model = None;
    values
        .iter()
        .map(
            |value| match run_row(dataset, source, base, axis, value, &mut shared_model) {
                Ok(report) => SweepRow {
                    value: value.clone(),
                    report: Some(report),
                    error: None,
                },
                Err(e) => SweepRow {
                    value: value.clone(),
                    report: None,
                    error: Some(e.to_string()),
                },
            },
        )
        .collect()
}

/// Writes a sweep table whose first column is named after the axis.
pub fn write_sweep_csv<W: Write>(out: W, axis: SweepAxis, rows: &[SweepRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec![axis.to_string()];
    header.extend(EvalReport::CSV_HEADER.iter().map(|s| s.to_string()));
    header.push("error".into());
    w.write_record(&header).map_err(std::io::Error::other)?;
    for row in rows {
        let mut record = vec![row.value.clone()];
        match &row.report {
            Some(r) => record.extend(r.csv_fields()),
            None => record.extend(std::iter::repeat_n(String::new(), EvalReport::CSV_HEADER.len())),
        }
        record.push(row.error.clone().unwrap_or_default());
        w.write_record(&record).map_err(std::io::Error::other)?;
    }
    w.flush()?;
    Ok(())
}
