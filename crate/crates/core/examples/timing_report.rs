//! Median per-phase detection timings on a 320x240 frame.
//!
//! Build with `--release` for representative numbers.

use hogscan::detect::DetectParams;
use hogscan::eval::{time_phases, train_detector};
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
    let (frame, _) = target_scene(320, 240, 64, 128, 8, &mut ChaCha8Rng::seed_from_u64(5));

    let timing = time_phases(&frame, &model, &DetectParams::default(), 15)?;
    let p = timing.phases;
    println!("repetitions      {}", timing.repetitions);
    println!("preprocess  {:8.2} ms", p.preprocess_ms);
    println!("gradient    {:8.2} ms", p.gradient_ms);
    println!("scan        {:8.2} ms", p.scan_ms);
    println!("nms         {:8.2} ms", p.nms_ms);
    println!("end to end  {:8.2} ms", timing.end_to_end_ms);
    Ok(())
}
