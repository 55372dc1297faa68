mod common;

use common::*;
use hogscan::hog::{
    bin_index, cell_histogram, compute_gradient, normalize_block, unsigned_orientation, window_descriptor, CellGrid,
    GradientFilter, HogConfig,
};
use hogscan::raster::GrayImage;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn vertical_step_gradient() {
    let img = GrayImage::new(3, 3, vec![0, 0, 0, 0, 0, 0, 10, 10, 10]).unwrap();
    let field = compute_gradient(&img, GradientFilter::OneDDerivative).unwrap();
    assert_eq!(field.at(1, 1), (10.0, 90.0));
}

#[test]
fn orientation_folds_opposite_directions() {
    assert_eq!(unsigned_orientation(0.0, 0.0), 0.0);
    assert_eq!(unsigned_orientation(1.0, 0.0), 0.0);
    assert_eq!(unsigned_orientation(-1.0, 0.0), 0.0);
    assert!((unsigned_orientation(-1.0, -1.0) - 45.0).abs() < 1e-12);
    assert!((unsigned_orientation(1.0, -1.0) - 135.0).abs() < 1e-12);
    assert_eq!(bin_index(179.999, 20.0, 9), 8);
    assert_eq!(bin_index(20.0, 20.0, 9), 1);
}

#[test]
fn two_orientation_cell() {
    // Half the pixels vote 1 at 10 degrees, half vote 2 at 170 degrees.
    let config = HogConfig::standard();
    let mut mag = vec![1.0; 64];
    let mut theta = vec![10.0; 64];
    for i in 32..64 {
        mag[i] = 2.0;
        theta[i] = 170.0;
    }
    let field = hogscan::hog::GradientField::from_parts(8, 8, mag, theta).unwrap();
    let hist = cell_histogram(&field, (0, 0), &config).unwrap();
    assert_eq!(hist, vec![32.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 64.0]);
}

#[test]
fn normalization_example() {
    let mut v = vec![0.0; 36];
    v[0] = 2.0;
    let n = normalize_block(&v, 1e-5);
    assert!((n[0] - 2.0 / (2.0 + 1e-5)).abs() < 1e-15);
    assert!(n[1..].iter().all(|&x| x == 0.0));
}

#[test]
fn sobel_and_one_d_agree_on_ramps() {
    let img = GrayImage::from_fn(10, 10, |x, _| (20 * x) as u8).unwrap();
    let a = compute_gradient(&img, GradientFilter::OneDDerivative).unwrap();
    let b = compute_gradient(&img, GradientFilter::Sobel).unwrap();
    assert_eq!(a.at(4, 4), (40.0, 0.0));
    assert_eq!(b.at(4, 4), (160.0, 0.0));
}

#[test]
fn cell_grid_matches_direct_descriptor_bitwise() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut checked = 0;
    while checked < 40 {
        let config = random_config(&mut rng);
        if !CellGrid::supports(&config, config.cell_size) {
            continue;
        }
        let img = random_image(
            &mut rng,
            config.window_width + 3 * config.cell_size,
            config.window_height + 2 * config.cell_size,
        );
        let field = compute_gradient(&img, config.gradient_filter).unwrap();
        let grid = CellGrid::new(&field, &config).unwrap();
        let mut buf = Vec::new();
        for oy in (0..=2 * config.cell_size).step_by(config.cell_size) {
            for ox in (0..=3 * config.cell_size).step_by(config.cell_size) {
                grid.write_descriptor((ox, oy), &mut buf).unwrap();
                let direct = window_descriptor(&field, (ox, oy), &config).unwrap();
                assert_eq!(buf.as_slice(), direct.values());
            }
        }
        assert!(grid.write_descriptor((1, 0), &mut buf).is_err());
        checked += 1;
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn window_descriptor_matches_crop_oracle(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let config = random_config(&mut rng);
        let w = rng.gen_range(config.window_width.max(3)..=config.window_width + 20);
        let h = rng.gen_range(config.window_height.max(3)..=config.window_height + 20);
        let img = random_image(&mut rng, w, h);
        let origin = (rng.gen_range(0..=w - config.window_width), rng.gen_range(0..=h - config.window_height));
        let field = compute_gradient(&img, config.gradient_filter).unwrap();
        let got = window_descriptor(&field, origin, &config).unwrap();
        let want = oracle_crop_descriptor(&img, origin, &config);
        prop_assert_eq!(got.len(), want.len());
        for (a, b) in got.values().iter().zip(&want) {
            prop_assert!(rel_close(*a, *b, 1e-12), "{} vs {}", a, b);
        }
    }

    #[test]
    fn descriptor_ignores_constant_offset(seed in any::<u64>(), offset in 1u8..=60) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let config = random_config(&mut rng);
        let img = GrayImage::from_fn(config.window_width.max(3), config.window_height.max(3), |_, _| rng.gen_range(0..=195)).unwrap();
        let shifted = GrayImage::from_fn(img.width(), img.height(), |x, y| img.get(x, y) + offset).unwrap();
        let a = window_descriptor(&compute_gradient(&img, config.gradient_filter).unwrap(), (0, 0), &config).unwrap();
        let b = window_descriptor(&compute_gradient(&shifted, config.gradient_filter).unwrap(), (0, 0), &config).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn block_values_are_bounded(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let config = random_config(&mut rng);
        let img = random_image(&mut rng, config.window_width.max(3), config.window_height.max(3));
        let d = window_descriptor(&compute_gradient(&img, config.gradient_filter).unwrap(), (0, 0), &config).unwrap();
        prop_assert_eq!(d.len(), config.descriptor_len().unwrap());
        for block in d.values().chunks(config.block_len()) {
            prop_assert!(block.iter().all(|&v| (0.0..1.0).contains(&v)));
            prop_assert!(block.iter().sum::<f64>() < 1.0);
        }
    }
}
