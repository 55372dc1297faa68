//! Brute-force reference implementations shared by the integration tests.
//!
//! Nothing here calls into the library's gradient or descriptor code: the
//! oracles recompute everything from raw pixels with plain loops.
#![allow(dead_code)]

use hogscan::hog::{GradientFilter, HogConfig};
use hogscan::raster::GrayImage;
use hogscan::svm::LinearModel;
use rand::Rng;

const ONE_D_X: [[i32; 3]; 3] = [[0, 0, 0], [-1, 0, 1], [0, 0, 0]];
const SOBEL_X: [[i32; 3]; 3] = [[-1, 0, 1], [-2, 0, 2], [-1, 0, 1]];

fn transpose(k: [[i32; 3]; 3]) -> [[i32; 3]; 3] {
    let mut t = [[0; 3]; 3];
    for (r, row) in k.iter().enumerate() {
        for (c, v) in row.iter().enumerate() {
            t[c][r] = *v;
        }
    }
    t
}

/// Magnitude and unsigned orientation (degrees) per pixel, clamp-to-edge.
pub fn oracle_gradient(img: &GrayImage, filter: GradientFilter) -> (Vec<f64>, Vec<f64>) {
    let kx = match filter {
        GradientFilter::OneDDerivative => ONE_D_X,
        GradientFilter::Sobel => SOBEL_X,
    };
    let ky = transpose(kx);
    let (w, h) = (img.width() as i64, img.height() as i64);
    let mut mag = Vec::new();
    let mut theta = Vec::new();
    for y in 0..h {
        for x in 0..w {
            let (mut gx, mut gy) = (0i64, 0i64);
            for dy in -1..=1i64 {
                for dx in -1..=1i64 {
                    let sx = (x + dx).clamp(0, w - 1) as usize;
                    let sy = (y + dy).clamp(0, h - 1) as usize;
                    let v = img.get(sx, sy) as i64;
                    gx += kx[(dy + 1) as usize][(dx + 1) as usize] as i64 * v;
                    gy += ky[(dy + 1) as usize][(dx + 1) as usize] as i64 * v;
                }
            }
            let (gx, gy) = (gx as f64, gy as f64);
            mag.push((gx * gx + gy * gy).sqrt());
            let mut t = if gx == 0.0 && gy == 0.0 {
                0.0
            } else {
                gy.atan2(gx).to_degrees()
            };
            if t < 0.0 {
                t += 180.0;
            }
            if t >= 180.0 {
                t = 0.0;
            }
            theta.push(t);
        }
    }
    (mag, theta)
}

/// Row-major window patch cut out of a full-image gradient field.
pub struct Patch {
    pub width: usize,
    pub mag: Vec<f64>,
    pub theta: Vec<f64>,
}

pub fn crop_field(mag: &[f64], theta: &[f64], img_width: usize, origin: (usize, usize), w: usize, h: usize) -> Patch {
    let mut p = Patch {
        width: w,
        mag: Vec::with_capacity(w * h),
        theta: Vec::with_capacity(w * h),
    };
    for y in origin.1..origin.1 + h {
        for x in origin.0..origin.0 + w {
            p.mag.push(mag[y * img_width + x]);
            p.theta.push(theta[y * img_width + x]);
        }
    }
    p
}

/// Histogram of the `cell`-sized square at (x, y) of the patch.
pub fn oracle_cell(p: &Patch, x: usize, y: usize, cell: usize, bins: usize) -> Vec<f64> {
    let width = 180.0 / bins as f64;
    let mut hist = vec![0.0; bins];
    for yy in y..y + cell {
        for xx in x..x + cell {
            let i = yy * p.width + xx;
            let b = ((p.theta[i] / width).floor() as usize).min(bins - 1);
            hist[b] += p.mag[i];
        }
    }
    hist
}

/// Descriptor of a patch that is exactly one window.
pub fn oracle_descriptor(p: &Patch, c: &HogConfig) -> Vec<f64> {
    let mut out = Vec::new();
    let side = c.block_size / c.cell_size;
    let mut by = 0;
    while by + c.block_size <= c.window_height {
        let mut bx = 0;
        while bx + c.block_size <= c.window_width {
            let mut block = Vec::new();
            for cy in 0..side {
                for cx in 0..side {
                    block.extend(oracle_cell(
                        p,
                        bx + cx * c.cell_size,
                        by + cy * c.cell_size,
                        c.cell_size,
                        c.bin_count,
                    ));
                }
            }
            let l1: f64 = block.iter().map(|v| v.abs()).sum();
            out.extend(block.iter().map(|v| v / (l1 + c.epsilon)));
            bx += c.block_stride;
        }
        by += c.block_stride;
    }
    out
}

pub fn oracle_score(model: &LinearModel, x: &[f64]) -> f64 {
    let mut s = 0.0;
    for (w, v) in model.weights.iter().zip(x) {
        s += w * v;
    }
    s - model.rho
}

/// Crops every window on the stride grid and scores it from scratch.
pub fn oracle_scan(img: &GrayImage, model: &LinearModel, stride: usize, tau: f64) -> Vec<((usize, usize), f64)> {
    let c = &model.config;
    let (mag, theta) = oracle_gradient(img, c.gradient_filter);
    let mut hits = Vec::new();
    let mut y = 0;
    while y + c.window_height <= img.height() {
        let mut x = 0;
        while x + c.window_width <= img.width() {
            let patch = crop_field(&mag, &theta, img.width(), (x, y), c.window_width, c.window_height);
            let score = oracle_score(model, &oracle_descriptor(&patch, c));
            if score >= tau {
                hits.push(((x, y), score));
            }
            x += stride;
        }
        y += stride;
    }
    hits
}

/// A valid geometry with a window of at most 48x96 pixels.
pub fn random_config(rng: &mut impl Rng) -> HogConfig {
    let cell = rng.gen_range(2..=8);
    let side = rng.gen_range(1..=3);
    let block = cell * side;
    let block_stride = if rng.gen_bool(0.7) {
        cell * rng.gen_range(1..=side)
    } else {
        rng.gen_range(1..=block)
    };
    let fit = |limit: usize, rng: &mut dyn rand::RngCore| {
        let max_k = (limit - block) / block_stride;
        block + block_stride * rng.gen_range(0..=max_k.min(6))
    };
    let window_width = fit(48, rng);
    let window_height = fit(96, rng);
    HogConfig {
        window_width,
        window_height,
        cell_size: cell,
        block_size: block,
        block_stride,
        bin_count: rng.gen_range(2..=12),
        epsilon: [1e-5, 1e-3, 1.0][rng.gen_range(0..3)],
        gamma: None,
        gradient_filter: if rng.gen_bool(0.5) {
            GradientFilter::OneDDerivative
        } else {
            GradientFilter::Sobel
        },
    }
}

/// Blocky noise so gradients cover every orientation and some regions are flat.
pub fn random_image(rng: &mut impl Rng, width: usize, height: usize) -> GrayImage {
    let tile = rng.gen_range(1..=6);
    let tw = width.div_ceil(tile);
    let tiles: Vec<u8> = (0..tw * height.div_ceil(tile)).map(|_| rng.gen()).collect();
    let noise = rng.gen_range(0..=20);
    GrayImage::from_fn(width, height, |x, y| {
        let base = tiles[(y / tile) * tw + x / tile] as i32;
        (base + rng.gen_range(-noise..=noise)).clamp(0, 255) as u8
    })
    .unwrap()
}

pub fn random_model(rng: &mut impl Rng, config: HogConfig) -> LinearModel {
    let len = config.descriptor_len().unwrap();
    let weights = (0..len).map(|_| rng.gen_range(-1.0..1.0)).collect();
    LinearModel::new(weights, rng.gen_range(-1.0..1.0), config).unwrap()
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    a == b || (a - b).abs() <= tol * a.abs().max(b.abs())
}

/// Descriptor of the window at `origin` computed from an image crop that
/// includes a one-pixel margin (where the image has one), so the derivative
/// mask sees the same neighbours as in the full image.
pub fn oracle_crop_descriptor(img: &GrayImage, origin: (usize, usize), c: &HogConfig) -> Vec<f64> {
    let x0 = origin.0.saturating_sub(1);
    let y0 = origin.1.saturating_sub(1);
    let x1 = (origin.0 + c.window_width + 1).min(img.width());
    let y1 = (origin.1 + c.window_height + 1).min(img.height());
    let crop = GrayImage::from_fn(x1 - x0, y1 - y0, |x, y| img.get(x0 + x, y0 + y)).unwrap();
    let (mag, theta) = oracle_gradient(&crop, c.gradient_filter);
    let patch = crop_field(
        &mag,
        &theta,
        crop.width(),
        (origin.0 - x0, origin.1 - y0),
        c.window_width,
        c.window_height,
    );
    oracle_descriptor(&patch, c)
}
