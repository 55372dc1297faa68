//! Compute a HOG descriptor for one window and show how the geometry
//! determines its length.

use hogscan::hog::{cell_histogram, compute_gradient, window_descriptor, HogConfig};
use hogscan::raster::gamma_correct;
use hogscan::synth::positive_crop;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> hogscan::Result<()> {
    for (name, config) in [
        ("standard", HogConfig::standard()),
        ("real_time", HogConfig::real_time()),
    ] {
        let (bx, by) = config.blocks_per_window();
        println!(
            "{name:>9}: {bx}x{by} blocks of {} values -> {} per window",
            config.block_len(),
            config.descriptor_len()?
        );
    }

    let config = HogConfig::standard();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let crop = positive_crop(config.window_width, config.window_height, &mut rng);
    let img = gamma_correct(&crop, 0.5)?;
    let field = compute_gradient(&img, config.gradient_filter)?;

    let torso = cell_histogram(&field, (24, 48), &config)?;
    println!("torso cell histogram: {:.1?}", torso);

    let descriptor = window_descriptor(&field, (0, 0), &config)?;
    let first_block: f64 = descriptor.values()[..config.block_len()].iter().sum();
    println!(
        "descriptor has {} values; first block sums to {:.6}",
        descriptor.len(),
        first_block
    );
    Ok(())
}
