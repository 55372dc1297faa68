//! Linear SVM: primal subgradient training, scoring, and the text model format.
//!
//! Training minimizes `(1/C)·‖w‖²/2 + Σ max(0, 1 − yᵢ(w·xᵢ − ρ))` with
//! seeded stochastic subgradient steps. Each step works on the per-sample
//! share of that objective, `λ/2·‖w‖² + hinge` with `λ = 1/(C·n)`, using the
//! inverse-time step `η_t = η₀ / (1 + η₀·λ·t)`, with η₀ capped at 1/λ. The offset ρ is not
//! regularized. After every epoch the full objective is evaluated and the
//! best iterate seen so far is kept.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hog::{Descriptor, HogConfig};
use crate::settings::{parse_key_values, parse_value, Entry};

pub const MODEL_MAGIC: &str = "hogscan-model v1";

/// Class label. Positive means "human".
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Label {
    Positive,
    Negative,
}

impl Label {
    pub fn sign(self) -> f64 {
        match self {
            Label::Positive => 1.0,
            Label::Negative => -1.0,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Label::Positive => Label::Negative,
            Label::Negative => Label::Positive,
        }
    }
}

/// Hyperparameters for [`train`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrainParams {
    /// Regularization constant C of the summed objective.
    pub c: f64,
    pub epochs: usize,
    /// Initial step size η₀.
    pub eta0: f64,
    pub seed: u64,
}

impl Default for TrainParams {
    fn default() -> Self {
        Self {
            c: 10.0,
            epochs: 50,
            eta0: 1.0,
            seed: 42,
        }
    }
}

impl TrainParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.c.is_finite() && self.c > 0.0) {
            return Err(Error::Parameter(format!("C must be positive, got {}", self.c)));
        }
        if self.epochs == 0 {
            return Err(Error::Parameter("epochs must be at least 1".into()));
        }
        if !(self.eta0.is_finite() && self.eta0 > 0.0) {
            return Err(Error::Parameter(format!("eta0 must be positive, got {}", self.eta0)));
        }
        Ok(())
    }

    /// Applies one entry if its key names a training parameter.
    pub fn apply_entry(&mut self, entry: &Entry) -> Result<bool> {
        match entry.key.as_str() {
            "c" | "C" => self.c = parse_value(entry)?,
            "epochs" => self.epochs = parse_value(entry)?,
            "eta0" => self.eta0 = parse_value(entry)?,
            "seed" => self.seed = parse_value(entry)?,
            _ => return Ok(false),
        }
        Ok(true)
    }
}

/// Training provenance stored alongside the weights.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrainMeta {
    pub positives: usize,
    pub negatives: usize,
    pub params: TrainParams,
    /// `Σ max(0, 1 − yᵢ(w·xᵢ − ρ))` of the returned model.
    pub hinge_loss: f64,
    /// Full regularized objective of the returned model.
    pub objective: f64,
}

/// Primal linear decision function `w·x − ρ`.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearModel {
    pub weights: Vec<f64>,
    pub rho: f64,
    pub config: HogConfig,
    pub meta: Option<TrainMeta>,
}

impl LinearModel {
    /// Builds a model and checks it against its config.
    pub fn new(weights: Vec<f64>, rho: f64, config: HogConfig) -> Result<Self> {
        let model = Self {
            weights,
            rho,
            config,
            meta: None,
        };
        model.check()?;
        Ok(model)
    }

    fn check(&self) -> Result<()> {
        let len = self.config.descriptor_len()?;
        if self.weights.len() != len {
            return Err(Error::Dimension(format!(
                "{} weights for a config with descriptor length {len}",
                self.weights.len()
            )));
        }
        if !self.rho.is_finite() || self.weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::Parameter("weights and rho must be finite".into()));
        }
        Ok(())
    }

    /// `w·x − ρ` without a length check beyond a debug assertion.
    #[inline]
    pub fn decision(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.weights.len());
        dot(&self.weights, x) - self.rho
    }
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Decision value of `x`; positive means human.
pub fn score(model: &LinearModel, x: &Descriptor) -> Result<f64> {
    if x.len() != model.weights.len() {
        return Err(Error::Dimension(format!(
            "descriptor has {} values, model expects {}",
            x.len(),
            model.weights.len()
        )));
    }
    Ok(model.decision(x.values()))
}

fn hinge_loss(weights: &[f64], rho: f64, samples: &[(Descriptor, Label)]) -> f64 {
    samples
        .iter()
        .map(|(x, y)| (1.0 - y.sign() * (dot(weights, x.values()) - rho)).max(0.0))
        .sum()
}

/// Trains a linear SVM on labeled descriptors.
///
/// Identical samples, params and config give a bit-identical model.
pub fn train(samples: &[(Descriptor, Label)], params: &TrainParams, config: &HogConfig) -> Result<LinearModel> {
    params.validate()?;
    let dim = config.descriptor_len()?;
    let positives = samples.iter().filter(|(_, y)| *y == Label::Positive).count();
    let negatives = samples.len() - positives;
    if positives == 0 {
        return Err(Error::Training("no positive samples".into()));
    }
    if negatives == 0 {
        return Err(Error::Training("no negative samples".into()));
    }
    if let Some((i, (x, _))) = samples.iter().enumerate().find(|(_, (x, _))| x.len() != dim) {
        return Err(Error::Training(format!(
            "sample {i} has {} values, config expects {dim}",
            x.len()
        )));
    }
    if samples.iter().any(|(x, _)| x.values().iter().any(|v| !v.is_finite())) {
        return Err(Error::Training("non-finite descriptor value".into()));
    }

    let n = samples.len();
    let lambda = 1.0 / (params.c * n as f64);
    // η₀·λ ≤ 1 keeps the shrink factor 1 − η·λ nonnegative.
    let eta0 = params.eta0.min(1.0 / lambda);
    let objective = |w: &[f64], hinge: f64| dot(w, w) / (2.0 * params.c) + hinge;

    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut order: Vec<usize> = (0..n).collect();
    let mut weights = vec![0.0; dim];
    let mut rho = 0.0;
    let mut best_hinge = hinge_loss(&weights, rho, samples);
    let mut best = (weights.clone(), rho, objective(&weights, best_hinge));
    let mut t: u64 = 0;

    for _ in 0..params.epochs {
        order.shuffle(&mut rng);
        for &i in &order {
            let (x, y) = &samples[i];
            let y = y.sign();
            let eta = eta0 / (1.0 + eta0 * lambda * t as f64);
            let margin = y * (dot(&weights, x.values()) - rho);
            let shrink = 1.0 - eta * lambda;
            if margin < 1.0 {
                for (w, xv) in weights.iter_mut().zip(x.values()) {
                    *w = shrink * *w + eta * y * xv;
                }
                rho -= eta * y;
            } else {
                weights.iter_mut().for_each(|w| *w *= shrink);
            }
            t += 1;
        }
        let hinge = hinge_loss(&weights, rho, samples);
        let obj = objective(&weights, hinge);
        if obj < best.2 {
            best = (weights.clone(), rho, obj);
            best_hinge = hinge;
        }
    }

    let (weights, rho, obj) = best;
    let mut model = LinearModel::new(weights, rho, config.clone())?;
    model.meta = Some(TrainMeta {
        positives,
        negatives,
        params: params.clone(),
        hinge_loss: best_hinge,
        objective: obj,
    });
    Ok(model)
}

/// Serializes a model to the versioned text format.
pub fn save_model(model: &LinearModel) -> Vec<u8> {
    let mut out = String::new();
    out.push_str(MODEL_MAGIC);
    out.push('\n');
    out.push_str(&model.config.to_key_values());
    if let Some(meta) = &model.meta {
        out.push_str(&format!(
            "train.positives = {}\ntrain.negatives = {}\ntrain.c = {}\ntrain.epochs = {}\n\
             train.eta0 = {}\ntrain.seed = {}\ntrain.hinge_loss = {}\ntrain.objective = {}\n",
            meta.positives,
            meta.negatives,
            meta.params.c,
            meta.params.epochs,
            meta.params.eta0,
            meta.params.seed,
            meta.hinge_loss,
            meta.objective,
        ));
    }
    out.push_str(&format!("rho = {:.16e}\n", model.rho));
    out.push_str(&format!("weights = {}\n", model.weights.len()));
    for w in &model.weights {
        out.push_str(&format!("{w:.16e}\n"));
    }
    out.into_bytes()
}

const CONFIG_KEYS: [&str; 9] = [
    "window_width",
    "window_height",
    "cell_size",
    "block_size",
    "block_stride",
    "bin_count",
    "epsilon",
    "gamma",
    "gradient_filter",
];

/// Parses a model file written by [`save_model`].
pub fn load_model(bytes: &[u8]) -> Result<LinearModel> {
    let text = std::str::from_utf8(bytes).map_err(|_| Error::model_load("encoding", "model file is not UTF-8"))?;
    let mut lines = text.lines();
    match lines.next().map(str::trim) {
        Some(MODEL_MAGIC) => {}
        Some(other) => {
            return Err(Error::model_load(
                "version",
                format!("expected `{MODEL_MAGIC}`, found `{other}`"),
            ))
        }
        None => return Err(Error::model_load("version", "empty model file")),
    }

    // Header: everything up to and including the `weights = n` line.
    let mut header = String::new();
    let mut weight_count = None;
    for line in lines.by_ref() {
        header.push_str(line);
        header.push('\n');
        if let Some((k, v)) = line.split_once('=') {
            if k.trim() == "weights" {
                let n = v
                    .trim()
                    .parse::<usize>()
                    .map_err(|_| Error::model_load("weights", format!("invalid count `{}`", v.trim())))?;
                weight_count = Some(n);
                break;
            }
        }
    }
    let weight_count = weight_count.ok_or_else(|| Error::model_load("weights", "missing `weights = <n>` line"))?;
    let entries = parse_key_values(&header).map_err(|e| Error::model_load("header", e.to_string()))?;

    let mut config = HogConfig::default();
    let mut seen = HashSet::new();
    let mut rho = None;
    let mut meta_entries = Vec::new();
    let mut bin_width = None;
    for entry in &entries {
        let key = entry.key.as_str();
        if !seen.insert(key.to_string()) {
            return Err(Error::model_load(key, "duplicate key"));
        }
        match key {
            "rho" => rho = Some(parse_value::<f64>(entry).map_err(|e| Error::model_load("rho", e.to_string()))?),
            "weights" => {}
            "bin_width_degrees" => {
                bin_width = Some(parse_value::<f64>(entry).map_err(|e| Error::model_load(key, e.to_string()))?)
            }
            k if k.starts_with("train.") => meta_entries.push(entry),
            _ => {
                let consumed = config
                    .apply_entry(entry)
                    .map_err(|e| Error::model_load(key, e.to_string()))?;
                if !consumed {
                    return Err(Error::model_load(key, "unknown key"));
                }
            }
        }
    }
    if let Some(missing) = CONFIG_KEYS.iter().find(|k| !seen.contains(**k)) {
        return Err(Error::model_load(*missing, "missing config key"));
    }
    config
        .validate()
        .map_err(|e| Error::model_load("config", e.to_string()))?;
    if let Some(bw) = bin_width {
        if (bw - config.bin_width_degrees()).abs() > 1e-9 {
            return Err(Error::model_load(
                "bin_width_degrees",
                format!("{bw} does not equal 180 / bin_count"),
            ));
        }
    }
    let rho = rho.ok_or_else(|| Error::model_load("rho", "missing `rho` line"))?;
    let expected = config.descriptor_len()?;
    if weight_count != expected {
        return Err(Error::model_load(
            "weights",
            format!("{weight_count} weights but the config implies descriptor length {expected}"),
        ));
    }

    let mut weights = Vec::with_capacity(weight_count);
    for line in lines {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let w = line
            .parse::<f64>()
            .map_err(|_| Error::model_load("weights", format!("invalid weight `{line}`")))?;
        weights.push(w);
    }
    if weights.len() != weight_count {
        return Err(Error::model_load(
            "weights",
            format!("declared {weight_count} weights, found {}", weights.len()),
        ));
    }

    let meta = if meta_entries.is_empty() {
        None
    } else {
        Some(parse_meta(&meta_entries)?)
    };
    let mut model = LinearModel::new(weights, rho, config).map_err(|e| Error::model_load("weights", e.to_string()))?;
    model.meta = meta;
    Ok(model)
}

fn parse_meta(entries: &[&Entry]) -> Result<TrainMeta> {
    let get = |name: &str| -> Result<&Entry> {
        entries
            .iter()
            .copied()
            .find(|e| e.key == format!("train.{name}"))
            .ok_or_else(|| Error::model_load(format!("train.{name}"), "missing training metadata"))
    };
    let num = |name: &str| -> Result<f64> {
        let e = get(name)?;
        parse_value(e).map_err(|err| Error::model_load(e.key.clone(), err.to_string()))
    };
    let int = |name: &str| -> Result<u64> {
        let e = get(name)?;
        parse_value(e).map_err(|err| Error::model_load(e.key.clone(), err.to_string()))
    };
    if let Some(e) = entries.iter().find(|e| {
        ![
            "positives",
            "negatives",
            "c",
            "epochs",
            "eta0",
            "seed",
            "hinge_loss",
            "objective",
        ]
        .contains(&&e.key["train.".len()..])
    }) {
        return Err(Error::model_load(e.key.clone(), "unknown key"));
    }
    Ok(TrainMeta {
        positives: int("positives")? as usize,
        negatives: int("negatives")? as usize,
        params: TrainParams {
            c: num("c")?,
            epochs: int("epochs")? as usize,
            eta0: num("eta0")?,
            seed: int("seed")?,
        },
        hinge_loss: num("hinge_loss")?,
        objective: num("objective")?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_config() -> HogConfig {
        HogConfig {
            window_width: 16,
            window_height: 16,
            block_size: 16,
            ..HogConfig::standard()
        }
    }

    fn embed(values: &[f64]) -> Descriptor {
        let mut v = vec![0.0; 36];
        v[..values.len()].copy_from_slice(values);
        Descriptor::from_vec(v)
    }

    #[test]
    fn separable_first_component() {
        let mut samples = Vec::new();
        for _ in 0..5 {
            samples.push((embed(&[0.0]), Label::Negative));
            samples.push((embed(&[2.0]), Label::Positive));
        }
        let model = train(&samples, &TrainParams::default(), &tiny_config()).unwrap();
        for (x, y) in &samples {
            assert_eq!(score(&model, x).unwrap() > 0.0, *y == Label::Positive);
        }

        let doubled: Vec<_> = samples.iter().chain(samples.iter()).cloned().collect();
        let model2 = train(&doubled, &TrainParams::default(), &tiny_config()).unwrap();
        for (x, _) in &samples {
            assert_eq!(score(&model, x).unwrap() > 0.0, score(&model2, x).unwrap() > 0.0);
        }
    }

    #[test]
    fn training_errors() {
        let config = tiny_config();
        let only_pos = vec![(embed(&[1.0]), Label::Positive)];
        assert!(
            matches!(train(&only_pos, &TrainParams::default(), &config), Err(Error::Training(m)) if m.contains("negative"))
        );
        let only_neg = vec![(embed(&[1.0]), Label::Negative)];
        assert!(
            matches!(train(&only_neg, &TrainParams::default(), &config), Err(Error::Training(m)) if m.contains("positive"))
        );
        let mismatched = vec![
            (embed(&[1.0]), Label::Positive),
            (Descriptor::from_vec(vec![0.0; 3]), Label::Negative),
        ];
        assert!(matches!(
            train(&mismatched, &TrainParams::default(), &config),
            Err(Error::Training(_))
        ));
        let bad_params = TrainParams {
            c: 0.0,
            ..TrainParams::default()
        };
        assert!(matches!(
            train(&mismatched, &bad_params, &config),
            Err(Error::Parameter(_))
        ));
    }

    #[test]
    fn score_examples() {
        let mut weights = vec![0.0; 36];
        weights[0] = 1.0;
        let model = LinearModel::new(weights, 0.0, tiny_config()).unwrap();
        assert_eq!(score(&model, &embed(&[0.5])).unwrap(), 0.5);

        let shifted = LinearModel::new(vec![0.3; 36], 0.75, tiny_config()).unwrap();
        assert_eq!(score(&shifted, &embed(&[])).unwrap(), -0.75);
        assert!(matches!(
            score(&shifted, &Descriptor::from_vec(vec![0.0; 35])),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn minimal_hand_written_model_loads() {
        let mut text = String::from(
            "hogscan-model v1\nwindow_width = 16\nwindow_height = 16\ncell_size = 8\nblock_size = 16\n\
             block_stride = 8\nbin_count = 9\nepsilon = 0.00001\ngamma = off\ngradient_filter = one_d\n\
             rho = 0.5\nweights = 36\n",
        );
        for i in 0..36 {
            text.push_str(&format!("{}\n", i as f64 / 10.0));
        }
        let model = load_model(text.as_bytes()).unwrap();
        assert_eq!(model.weights.len(), 36);
        assert_eq!(model.weights[35], 3.5);
        assert_eq!(model.rho, 0.5);
        assert_eq!(model.config.gamma, None);
        assert!(model.meta.is_none());
    }

    #[test]
    fn load_errors_name_the_field() {
        let model = LinearModel::new(vec![0.25; 36], -1.0, tiny_config()).unwrap();
        let good = String::from_utf8(save_model(&model)).unwrap();

        let field_of = |text: &str| match load_model(text.as_bytes()) {
            Err(Error::ModelLoad { field, .. }) => field,
            other => panic!("expected load error, got {other:?}"),
        };
        assert_eq!(field_of(&good.replace("v1", "v2")), "version");
        assert_eq!(field_of(&good.replace("weights = 36", "weights = 35")), "weights");
        assert_eq!(
            field_of(&good.replace("bin_count = 9", "bin_count = 4")),
            "bin_width_degrees"
        );
        let four_bins = good
            .replace("bin_count = 9", "bin_count = 4")
            .replace("bin_width_degrees = 20", "bin_width_degrees = 45");
        assert_eq!(field_of(&four_bins), "weights");
        assert_eq!(field_of(&good.replace("cell_size = 8", "cell_size = 5")), "config");
        assert_eq!(field_of(&good.replace("rho = ", "rh0 = ")), "rh0");
        let truncated: String = good
            .lines()
            .take(good.lines().count() - 1)
            .map(|l| format!("{l}\n"))
            .collect();
        assert_eq!(field_of(&truncated), "weights");
        let no_gamma: String = good
            .lines()
            .filter(|l| !l.starts_with("gamma"))
            .map(|l| format!("{l}\n"))
            .collect();
        assert_eq!(field_of(&no_gamma), "gamma");
    }

    #[test]
    fn saved_weights_carry_17_significant_digits() {
        let model = LinearModel::new(vec![1.0 / 3.0; 36], 0.1, tiny_config()).unwrap();
        let text = String::from_utf8(save_model(&model)).unwrap();
        assert!(text.contains("3.3333333333333331e-1\n"));
        assert_eq!(load_model(text.as_bytes()).unwrap(), model);
    }
}
