//! Synthetic planted-target corpora.
//!
//! A pedestrian-like silhouette (head, torso, two legs) is rendered with a
//! random foreground intensity onto textured noise. Scenes also carry
//! rectangular and elliptical distractors so a classifier has to learn the
//! silhouette's layout rather than "any strong edge".

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::detect::BBox;
use crate::eval::{Annotation, MemorySource, TrainingSet};
use crate::raster::GrayImage;

/// Textured background: a random base level plus per-pixel noise.
pub fn noise_background(width: usize, height: usize, rng: &mut impl Rng) -> GrayImage {
    let base: i32 = rng.gen_range(90..=165);
    let amp: i32 = rng.gen_range(6..=18);
    GrayImage::from_fn(width, height, |_, _| {
        (base + rng.gen_range(-amp..=amp)).clamp(0, 255) as u8
    })
    .expect("non-empty background")
}

fn in_figure(u: f64, v: f64) -> bool {
    let head = ((u - 0.5) / 0.13).powi(2) + ((v - 0.15) / 0.075).powi(2) <= 1.0;
    let torso = (0.30..=0.70).contains(&u) && (0.24..=0.58).contains(&v);
    let left_leg = (0.32..=0.46).contains(&u) && (0.58..=0.93).contains(&v);
    let right_leg = (0.54..=0.68).contains(&u) && (0.58..=0.93).contains(&v);
    head || torso || left_leg || right_leg
}

/// Paints the silhouette into `frame` (clipped to the image), keeping the
/// background's per-pixel texture in the foreground.
pub fn plant_figure(img: &mut GrayImage, frame: BBox, rng: &mut impl Rng) {
    let dark = rng.gen_bool(0.5);
    let level: i32 = if dark {
        rng.gen_range(15..=55)
    } else {
        rng.gen_range(200..=240)
    };
    let jitter_u = rng.gen_range(-0.03..=0.03);
    let jitter_v = rng.gen_range(-0.02..=0.02);
    for py in 0..frame.height {
        for px in 0..frame.width {
            let (x, y) = (frame.x + px, frame.y + py);
            if x < 0 || y < 0 || x >= img.width() as i64 || y >= img.height() as i64 {
                continue;
            }
            let u = (px as f64 + 0.5) / frame.width as f64 + jitter_u;
            let v = (py as f64 + 0.5) / frame.height as f64 + jitter_v;
            if in_figure(u, v) {
                let noise: i32 = rng.gen_range(-8..=8);
                img.set(x as usize, y as usize, (level + noise).clamp(0, 255) as u8);
            }
        }
    }
}

/// Adds `count` random filled rectangles and ellipses.
pub fn add_distractors(img: &mut GrayImage, count: usize, rng: &mut impl Rng) {
    let (w, h) = (img.width(), img.height());
    for _ in 0..count {
        let bw = rng.gen_range(6..=(w / 3).max(7));
        let bh = rng.gen_range(6..=(h / 3).max(7));
        let x0 = rng.gen_range(0..w);
        let y0 = rng.gen_range(0..h);
        let level: i32 = rng.gen_range(10..=245);
        let ellipse = rng.gen_bool(0.5);
        for y in y0..(y0 + bh).min(h) {
            for x in x0..(x0 + bw).min(w) {
                if ellipse {
                    let du = (x - x0) as f64 / bw as f64 - 0.5;
                    let dv = (y - y0) as f64 / bh as f64 - 0.5;
                    if du * du + dv * dv > 0.25 {
                        continue;
                    }
                }
                let noise: i32 = rng.gen_range(-8..=8);
                img.set(x, y, (level + noise).clamp(0, 255) as u8);
            }
        }
    }
}

/// A window-sized positive crop.
pub fn positive_crop(width: usize, height: usize, rng: &mut impl Rng) -> GrayImage {
    let mut img = noise_background(width, height, rng);
    let dx = rng.gen_range(-2..=2);
    let dy = rng.gen_range(-2..=2);
    plant_figure(&mut img, BBox::new(dx, dy, width as i64, height as i64), rng);
    img
}

/// A scene with distractors and no target.
pub fn negative_scene(width: usize, height: usize, rng: &mut impl Rng) -> GrayImage {
    let mut img = noise_background(width, height, rng);
    let count = rng.gen_range(2..=6);
    add_distractors(&mut img, count, rng);
    img
}

/// A scene with distractors and one target of `target_w × target_h` at an
/// origin drawn from multiples of `align`.
pub fn target_scene(
    width: usize,
    height: usize,
    target_w: usize,
    target_h: usize,
    align: usize,
    rng: &mut impl Rng,
) -> (GrayImage, BBox) {
    let mut img = noise_background(width, height, rng);
    let count = rng.gen_range(1..=4);
    add_distractors(&mut img, count, rng);
    let align = align.max(1);
    let x = rng.gen_range(0..=(width - target_w) / align) * align;
    let y = rng.gen_range(0..=(height - target_h) / align) * align;
    let frame = BBox::new(x as i64, y as i64, target_w as i64, target_h as i64);
    plant_figure(&mut img, frame, rng);
    (img, frame)
}

/// Everything needed for a self-contained train/evaluate round.
pub struct Corpus {
    pub training: TrainingSet,
    pub test: Vec<Annotation>,
    pub images: MemorySource,
}

/// Size knobs for [`generate_corpus`].
#[derive(Clone, Debug)]
pub struct CorpusSpec {
    pub window_width: usize,
    pub window_height: usize,
    pub positives: usize,
    pub negative_scenes: usize,
    pub test_scenes: usize,
    pub scene_width: usize,
    pub scene_height: usize,
    /// Test targets are planted at multiples of this many pixels.
    pub align: usize,
    pub seed: u64,
}

impl Default for CorpusSpec {
    fn default() -> Self {
        Self {
            window_width: 64,
            window_height: 128,
            positives: 200,
            negative_scenes: 20,
            test_scenes: 50,
            scene_width: 192,
            scene_height: 224,
            align: 8,
            seed: 7,
        }
    }
}

/// Generates a deterministic corpus from `spec.seed`.
pub fn generate_corpus(spec: &CorpusSpec) -> Corpus {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let positives = (0..spec.positives)
        .map(|_| positive_crop(spec.window_width, spec.window_height, &mut rng))
        .collect();
    let negative_images = (0..spec.negative_scenes)
        .map(|_| negative_scene(spec.scene_width, spec.scene_height, &mut rng))
        .collect();
    let mut images = MemorySource::default();
    let mut test = Vec::with_capacity(spec.test_scenes);
    for i in 0..spec.test_scenes {
        let (img, target) = target_scene(
            spec.scene_width,
            spec.scene_height,
            spec.window_width,
            spec.window_height,
            spec.align,
            &mut rng,
        );
        let name = format!("test_{i:03}.pgm");
        images.images.insert(name.clone(), img);
        test.push(Annotation {
            image_path: name,
            targets: vec![target],
        });
    }
    Corpus {
        training: TrainingSet {
            positives,
            negative_images,
        },
        test,
        images,
    }
}
