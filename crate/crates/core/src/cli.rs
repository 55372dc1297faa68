//! Command-line front end: `train`, `detect`, `eval`, `sweep`, `describe`
//! and `retrain-with-negatives`.
//!
//! Exit codes: 0 on success, 1 on usage errors (unknown flags, invalid
//! parameter values), 2 on data errors (unreadable or malformed inputs,
//! untrainable sets).

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::detect::{detect, detect_pre_nms, write_detections_csv, write_detections_jsonl, DetectParams};
use crate::error::Error;
use crate::eval::train_detector;
use crate::eval::{evaluate, parse_annotations, sweep, write_sweep_csv, DirSource, SweepAxis, SweepBase, TrainingSet};
use crate::hog::HogConfig;
use crate::raster::{read_gray, GrayImage};
use crate::settings::parse_key_values;
use crate::svm::{load_model, save_model, LinearModel, TrainParams};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "hogscan", version, about = "HOG + linear SVM human detector")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum DetectionFormat {
    Jsonl,
    Csv,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ReportFormat {
    Json,
    Csv,
}

#[derive(clap::Args, Debug)]
struct ConfigArgs {
    /// Flat `key = value` file overriding HOG, detection and training defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Built-in HOG geometry: real_time (32 px blocks) or standard (16 px blocks, 3780 values).
    #[arg(long)]
    preset: Option<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Train a model from window-sized positive crops and negative images.
    Train {
        #[arg(long)]
        pos: PathBuf,
        #[arg(long)]
        neg: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        cfg: ConfigArgs,
        /// Random windows sampled from each negative image.
        #[arg(long)]
        negatives_per_image: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Detect humans in one image.
    Detect {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        image: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        tau: Option<f64>,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "jsonl")]
        format: DetectionFormat,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Evaluate a model against an annotated image set.
    Eval {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        annotations: PathBuf,
        #[arg(long)]
        images_root: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        tau: Option<f64>,
        #[arg(long, value_enum, default_value = "json")]
        format: ReportFormat,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Evaluate one report per value of a parameter axis.
    Sweep {
        /// gamma, filter, cell_size, block_size or threshold.
        #[arg(long)]
        axis: String,
        /// Comma-separated axis values.
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<String>,
        #[arg(long)]
        annotations: PathBuf,
        #[arg(long)]
        images_root: PathBuf,
        /// Positive crops; required unless the axis is threshold and --model is given.
        #[arg(long)]
        pos: Option<PathBuf>,
        #[arg(long)]
        neg: Option<PathBuf>,
        /// Model reused by a threshold sweep.
        #[arg(long)]
        model: Option<PathBuf>,
        /// CSV table output.
        #[arg(long)]
        out: PathBuf,
        /// Optional JSON dump of every row's full report.
        #[arg(long)]
        json: Option<PathBuf>,
        #[command(flatten)]
        cfg: ConfigArgs,
        #[arg(long)]
        negatives_per_image: Option<usize>,
    },
    /// Print a model's configuration and descriptor length.
    Describe {
        #[arg(long)]
        model: PathBuf,
    },
    /// Retrain after adding false positives found on negative scenes as extra negatives.
    RetrainWithNegatives {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        pos: PathBuf,
        #[arg(long)]
        neg: PathBuf,
        /// Scenes without humans to mine false positives from.
        #[arg(long)]
        scenes: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        tau: Option<f64>,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        negatives_per_image: Option<usize>,
    },
}

enum CliError {
    Usage(String),
    Data(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Parameter(_) | Error::Config(_) => CliError::Usage(e.to_string()),
            _ => CliError::Data(e.to_string()),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn data_err(context: impl std::fmt::Display, e: impl std::fmt::Display) -> CliError {
    CliError::Data(format!("{context}: {e}"))
}

/// Every tunable the CLI can resolve, with its defaults.
#[derive(Clone, Debug)]
struct Resolved {
    hog: HogConfig,
    detect: DetectParams,
    train: TrainParams,
    negatives_per_image: usize,
}

impl Default for Resolved {
    fn default() -> Self {
        Self {
            hog: HogConfig::default(),
            detect: DetectParams::default(),
            train: TrainParams::default(),
            negatives_per_image: 10,
        }
    }
}

impl Resolved {
    fn to_key_values(&self, include_hog: bool, include_train: bool) -> String {
        let mut out = String::new();
        if include_hog {
            out.push_str(&self.hog.to_key_values());
            out.push_str(&format!(
                "descriptor_len = {}\n",
                self.hog.descriptor_len().unwrap_or(0)
            ));
        }
        let d = &self.detect;
        out.push_str(&format!(
            "tau = {}\nscale_step = {}\nnms_enabled = {}\nnms_overlap = {}\nwindow_stride = {}\n",
            d.tau,
            d.scale_step,
            d.nms_enabled,
            d.nms_overlap,
            d.stride_for(&self.hog)
        ));
        if include_train {
            let t = &self.train;
            out.push_str(&format!(
                "c = {}\nepochs = {}\neta0 = {}\nseed = {}\nnegatives_per_image = {}\n",
                t.c, t.epochs, t.eta0, t.seed, self.negatives_per_image
            ));
        }
        out
    }
}

fn load_config_file(path: &Path, resolved: &mut Resolved, allow_hog: bool) -> CliResult<()> {
    let text = fs::read_to_string(path).map_err(|e| data_err(path.display(), e))?;
    let entries = parse_key_values(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    // A preset line resets the geometry before the other keys apply.
    if let Some(p) = entries.iter().find(|e| e.key == "preset") {
        if allow_hog {
            resolved.hog = HogConfig::preset(&p.value)?;
        }
    }
    for entry in &entries {
        let usage = |e: Error| CliError::Usage(format!("{}: {e}", path.display()));
        if entry.key == "preset" {
            continue;
        }
        if entry.key == "negatives_per_image" {
            resolved.negatives_per_image = entry
                .value
                .parse()
                .map_err(|_| CliError::Usage(format!("{}: invalid negatives_per_image", path.display())))?;
            continue;
        }
        if resolved.detect.apply_entry(entry).map_err(usage)? || resolved.train.apply_entry(entry).map_err(usage)? {
            continue;
        }
        let mut hog = resolved.hog.clone();
        if hog.apply_entry(entry).map_err(usage)? {
            if allow_hog {
                resolved.hog = hog;
            }
            continue;
        }
        return Err(CliError::Usage(format!(
            "{}:{}: unknown key `{}`",
            path.display(),
            entry.line,
            entry.key
        )));
    }
    Ok(())
}

fn resolve(
    cfg: Option<&ConfigArgs>,
    config_path: Option<&PathBuf>,
    model: Option<&LinearModel>,
) -> CliResult<Resolved> {
    let mut resolved = Resolved::default();
    if let Some(preset) = cfg.and_then(|c| c.preset.as_deref()) {
        resolved.hog = HogConfig::preset(preset)?;
    }
    let path = cfg.and_then(|c| c.config.as_ref()).or(config_path);
    // A model fixes the HOG geometry; config files then only tune detection.
    if let Some(m) = model {
        resolved.hog = m.config.clone();
    }
    if let Some(p) = path {
        load_config_file(p, &mut resolved, model.is_none())?;
    }
    Ok(resolved)
}

fn validate(resolved: &Resolved) -> CliResult<()> {
    resolved.hog.validate()?;
    resolved.detect.validate()?;
    resolved.train.validate()?;
    Ok(())
}

fn read_model(path: &Path) -> CliResult<LinearModel> {
    let bytes = fs::read(path).map_err(|e| data_err(path.display(), e))?;
    load_model(&bytes).map_err(|e| data_err(path.display(), e))
}

fn write_model(path: &Path, model: &LinearModel) -> CliResult<()> {
    fs::write(path, save_model(model)).map_err(|e| data_err(path.display(), e))
}

/// Netpbm files in `dir`, sorted by name.
fn read_image_dir(dir: &Path) -> CliResult<Vec<GrayImage>> {
    let entries = fs::read_dir(dir).map_err(|e| data_err(dir.display(), e))?;
    let mut paths: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            matches!(
                p.extension()
                    .and_then(|e| e.to_str())
                    .map(str::to_ascii_lowercase)
                    .as_deref(),
                Some("pgm" | "ppm" | "pnm")
            )
        })
        .collect();
    paths.sort();
    paths
        .iter()
        .map(|p| read_gray(p).map_err(|e| data_err(p.display(), e)))
        .collect()
}

fn read_training_set(pos: &Path, neg: &Path) -> CliResult<TrainingSet> {
    let positives = read_image_dir(pos)?;
    if positives.is_empty() {
        return Err(CliError::Data(format!(
            "positive class is empty: no .pgm/.ppm images in {}",
            pos.display()
        )));
    }
    let negative_images = read_image_dir(neg)?;
    if negative_images.is_empty() {
        return Err(CliError::Data(format!(
            "negative class is empty: no .pgm/.ppm images in {}",
            neg.display()
        )));
    }
    Ok(TrainingSet {
        positives,
        negative_images,
    })
}

fn open_output(path: Option<&PathBuf>) -> CliResult<Box<dyn Write>> {
    match path {
        Some(p) => fs::File::create(p)
            .map(|f| Box::new(std::io::BufWriter::new(f)) as Box<dyn Write>)
            .map_err(|e| data_err(p.display(), e)),
        None => Ok(Box::new(std::io::stdout())),
    }
}

fn print_resolved(resolved: &Resolved, include_hog: bool, include_train: bool) {
    eprint!(
        "# resolved configuration\n{}",
        resolved.to_key_values(include_hog, include_train)
    );
}

fn execute(command: Command) -> CliResult<()> {
    match command {
        Command::Train {
            pos,
            neg,
            out,
            cfg,
            negatives_per_image,
            seed,
        } => {
            let mut resolved = resolve(Some(&cfg), None, None)?;
            if let Some(n) = negatives_per_image {
                resolved.negatives_per_image = n;
            }
            if let Some(s) = seed {
                resolved.train.seed = s;
            }
            validate(&resolved)?;
            print_resolved(&resolved, true, true);
            let set = read_training_set(&pos, &neg)?;
            let model = train_detector(&set, &resolved.hog, &resolved.train, resolved.negatives_per_image)?;
            write_model(&out, &model)?;
            if let Some(meta) = &model.meta {
                eprintln!(
                    "trained on {} positives / {} negatives, hinge loss {:.6}",
                    meta.positives, meta.negatives, meta.hinge_loss
                );
            }
        }
        Command::Detect {
            model,
            image,
            tau,
            out,
            format,
            config,
        } => {
            let model = read_model(&model)?;
            let mut resolved = resolve(None, config.as_ref(), Some(&model))?;
            if let Some(t) = tau {
                resolved.detect.tau = t;
            }
            validate(&resolved)?;
            print_resolved(&resolved, true, false);
            let img = read_gray(&image).map_err(|e| data_err(image.display(), e))?;
            let detections = detect(&img, &model, &resolved.detect)?;
            let name = image.to_string_lossy();
            let mut writer = open_output(out.as_ref())?;
            match format {
                DetectionFormat::Jsonl => write_detections_jsonl(&mut writer, &name, &detections)?,
                DetectionFormat::Csv => write_detections_csv(&mut writer, &name, &detections)?,
            }
            writer.flush().map_err(|e| data_err("output", e))?;
        }
        Command::Eval {
            model,
            annotations,
            images_root,
            out,
            tau,
            format,
            config,
        } => {
            let model = read_model(&model)?;
            let mut resolved = resolve(None, config.as_ref(), Some(&model))?;
            if let Some(t) = tau {
                resolved.detect.tau = t;
            }
            validate(&resolved)?;
            print_resolved(&resolved, true, false);
            let bytes = fs::read(&annotations).map_err(|e| data_err(annotations.display(), e))?;
            let dataset = parse_annotations(&bytes).map_err(|e| data_err(annotations.display(), e))?;
            let report = evaluate(&dataset, &DirSource::new(images_root), &model, &resolved.detect);
            for err in &report.errors {
                eprintln!("skipped {}: {}", err.image, err.message);
            }
            let mut writer = open_output(Some(&out))?;
            match format {
                ReportFormat::Json => {
                    writeln!(writer, "{}", report.to_json()).map_err(|e| data_err(out.display(), e))?
                }
                ReportFormat::Csv => report.write_csv(&mut writer)?,
            }
            writer.flush().map_err(|e| data_err(out.display(), e))?;
            eprintln!(
                "detected {}/{} targets ({}%), {} false detections",
                report.detected_targets, report.targets, report.detection_percent, report.false_detections
            );
        }
        Command::Sweep {
            axis,
            values,
            annotations,
            images_root,
            pos,
            neg,
            model,
            out,
            json,
            cfg,
            negatives_per_image,
        } => {
            let axis: SweepAxis = axis.parse()?;
            let model = model.as_deref().map(read_model).transpose()?;
            let mut resolved = resolve(Some(&cfg), None, model.as_ref())?;
            if let Some(n) = negatives_per_image {
                resolved.negatives_per_image = n;
            }
            validate(&resolved)?;
            print_resolved(&resolved, true, true);
            let training = match (pos, neg) {
                (Some(p), Some(n)) => Some(read_training_set(&p, &n)?),
                (None, None) => None,
                _ => return Err(CliError::Usage("--pos and --neg must be given together".into())),
            };
            if training.is_none() && !(axis == SweepAxis::Threshold && model.is_some()) {
                return Err(CliError::Usage(format!(
                    "the {axis} axis needs --pos and --neg (or --model for a threshold sweep)"
                )));
            }
            let bytes = fs::read(&annotations).map_err(|e| data_err(annotations.display(), e))?;
            let dataset = parse_annotations(&bytes).map_err(|e| data_err(annotations.display(), e))?;
            let base = SweepBase {
                config: resolved.hog.clone(),
                params: resolved.detect.clone(),
                train_params: resolved.train.clone(),
                training: training.as_ref(),
                negatives_per_image: resolved.negatives_per_image,
                model: model.as_ref(),
            };
            let rows = sweep(&dataset, &DirSource::new(images_root), &base, axis, &values);
            let writer = open_output(Some(&out))?;
            write_sweep_csv(writer, axis, &rows)?;
            if let Some(path) = json {
                let text = serde_json::to_string_pretty(&rows).map_err(|e| data_err(path.display(), e))?;
                fs::write(&path, text + "\n").map_err(|e| data_err(path.display(), e))?;
            }
            for row in &rows {
                if let Some(e) = &row.error {
                    eprintln!("{axis} = {}: {e}", row.value);
                }
            }
        }
        Command::Describe { model } => {
            let model = read_model(&model)?;
            let mut text = model.config.to_key_values();
            text.push_str(&format!(
                "descriptor_len = {}\nrho = {:.16e}\n",
                model.weights.len(),
                model.rho
            ));
            if let Some(meta) = &model.meta {
                text.push_str(&format!(
                    "trained_on = {} positives, {} negatives (C = {}, epochs = {}, seed = {})\n",
                    meta.positives, meta.negatives, meta.params.c, meta.params.epochs, meta.params.seed
                ));
            }
            // A closed pipe (`| head`) is not an error worth reporting.
            let _ = std::io::stdout().lock().write_all(text.as_bytes());
        }
        Command::RetrainWithNegatives {
            model,
            pos,
            neg,
            scenes,
            out,
            tau,
            config,
            negatives_per_image,
        } => {
            let model = read_model(&model)?;
            let mut resolved = resolve(None, config.as_ref(), Some(&model))?;
            if let Some(meta) = &model.meta {
                resolved.train = meta.params.clone();
            }
            if let Some(t) = tau {
                resolved.detect.tau = t;
            }
            if let Some(n) = negatives_per_image {
                resolved.negatives_per_image = n;
            }
            validate(&resolved)?;
            print_resolved(&resolved, true, true);
            let mut set = read_training_set(&pos, &neg)?;
            let scene_images = read_image_dir(&scenes)?;
            let mut mined = 0;
            for scene in &scene_images {
                for det in detect_pre_nms(scene, &model, &resolved.detect)? {
                    let b = det.bbox;
                    let crop = scene.crop(b.x as usize, b.y as usize, b.width as usize, b.height as usize)?;
                    // Window-sized crops contribute exactly one negative window.
                    let sized =
                        crate::raster::resize_bilinear(&crop, resolved.hog.window_width, resolved.hog.window_height)?;
                    set.negative_images.push(sized);
                    mined += 1;
                }
            }
            eprintln!("mined {mined} hard negatives from {} scenes", scene_images.len());
            let retrained = train_detector(&set, &resolved.hog, &resolved.train, resolved.negatives_per_image)?;
            write_model(&out, &retrained)?;
        }
    }
    Ok(())
}

/// Parses `args` (including the program name) and runs the subcommand.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli.command) {
        Ok(()) => EXIT_OK,
        Err(CliError::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            EXIT_USAGE
        }
        Err(CliError::Data(msg)) => {
            eprintln!("error: {msg}");
            EXIT_DATA
        }
    }
}
