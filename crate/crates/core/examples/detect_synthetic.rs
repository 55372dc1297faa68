//! Train on synthetic data, then run the multi-scale detector on a scene
//! containing an enlarged target.

use hogscan::detect::{detect_timed, write_detections_jsonl, DetectParams};
use hogscan::eval::train_detector;
use hogscan::hog::HogConfig;
use hogscan::svm::TrainParams;
use hogscan::synth::{generate_corpus, target_scene, CorpusSpec};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> hogscan::Result<()> {
    let corpus = generate_corpus(&CorpusSpec {
        test_scenes: 0,
        ..CorpusSpec::default()
    });
    let model = train_detector(&corpus.training, &HogConfig::default(), &TrainParams::default(), 10)?;

    let mut rng = ChaCha8Rng::seed_from_u64(99);
    // A target about 1.2x the window, so it is found on a coarser pyramid level.
    let (scene, truth) = target_scene(320, 240, 77, 154, 1, &mut rng);
    println!("planted target at {truth:?}");

    let outcome = detect_timed(&scene, &model, &DetectParams::default())?;
    println!(
        "{} raw windows, {} after suppression, {:.1} ms",
        outcome.pre_nms_count,
        outcome.detections.len(),
        outcome.times.total_ms()
    );
    write_detections_jsonl(std::io::stdout().lock(), "scene", &outcome.detections)?;
    Ok(())
}
