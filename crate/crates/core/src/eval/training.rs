use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::hog::{compute_gradient, window_descriptor, Descriptor, HogConfig};
use crate::raster::{gamma_correct, resize_bilinear, GrayImage};
use crate::svm::{train, Label, LinearModel, TrainParams};

/// Raw training material: window crops of the target class and scenes without it.
#[derive(Clone, Debug, Default)]
pub struct TrainingSet {
    pub positives: Vec<GrayImage>,
    pub negative_images: Vec<GrayImage>,
}

fn preprocess(img: &GrayImage, config: &HogConfig) -> Result<GrayImage> {
    match config.gamma {
        Some(g) => gamma_correct(img, g),
        None => Ok(img.clone()),
    }
}

/// Descriptor of a crop, resized to the window first if its size differs.
pub fn crop_descriptor(crop: &GrayImage, config: &HogConfig) -> Result<Descriptor> {
    let sized = if crop.width() != config.window_width || crop.height() != config.window_height {
        resize_bilinear(crop, config.window_width, config.window_height)?
    } else {
        crop.clone()
    };
    let field = compute_gradient(&preprocess(&sized, config)?, config.gradient_filter)?;
    window_descriptor(&field, (0, 0), config)
}

/// Seeded window origins, `per_image` per negative image.
///
/// Images smaller than the window contribute nothing. Exactly window-sized
/// images contribute their single window once.
pub fn negative_origins(
    images: &[GrayImage],
    config: &HogConfig,
    per_image: usize,
    seed: u64,
) -> Vec<(usize, (usize, usize))> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for (i, img) in images.iter().enumerate() {
        if img.width() < config.window_width || img.height() < config.window_height {
            continue;
        }
        let max_x = img.width() - config.window_width;
        let max_y = img.height() - config.window_height;
        if max_x == 0 && max_y == 0 {
            out.push((i, (0, 0)));
            continue;
        }
        for _ in 0..per_image {
            out.push((i, (rng.gen_range(0..=max_x), rng.gen_range(0..=max_y))));
        }
    }
    out
}

/// Labeled descriptors for every positive crop and every sampled negative window.
pub fn build_samples(
    set: &TrainingSet,
    config: &HogConfig,
    negatives_per_image: usize,
    seed: u64,
) -> Result<Vec<(Descriptor, Label)>> {
    config.validate()?;
    let mut samples = Vec::with_capacity(set.positives.len() + set.negative_images.len() * negatives_per_image);
    for crop in &set.positives {
        samples.push((crop_descriptor(crop, config)?, Label::Positive));
    }
    let origins = negative_origins(&set.negative_images, config, negatives_per_image, seed);
    let mut current: Option<(usize, crate::hog::GradientField)> = None;
    for (i, origin) in origins {
        if current.as_ref().map(|(j, _)| *j) != Some(i) {
            let img = preprocess(&set.negative_images[i], config)?;
            current = Some((i, compute_gradient(&img, config.gradient_filter)?));
        }
        let field = &current.as_ref().unwrap().1;
        samples.push((window_descriptor(field, origin, config)?, Label::Negative));
    }
    Ok(samples)
}

/// Samples descriptors and trains a model. Negative sampling reuses the training seed.
pub fn train_detector(
    set: &TrainingSet,
    config: &HogConfig,
    params: &TrainParams,
    negatives_per_image: usize,
) -> Result<LinearModel> {
    if set.positives.is_empty() {
        return Err(Error::Training("no positive samples".into()));
    }
    let samples = build_samples(set, config, negatives_per_image, params.seed)?;
    train(&samples, params, config)
}
