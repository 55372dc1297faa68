//! Train a linear SVM on synthetic crops and write the model file.
//!
//! `cargo run --release --example train_svm [model.txt]`

use hogscan::eval::train_detector;
use hogscan::hog::HogConfig;
use hogscan::svm::{load_model, save_model, TrainParams};
use hogscan::synth::{generate_corpus, CorpusSpec};

fn main() -> hogscan::Result<()> {
    let corpus = generate_corpus(&CorpusSpec {
        test_scenes: 0,
        ..CorpusSpec::default()
    });
    let config = HogConfig::default();
    let params = TrainParams::default();
    let model = train_detector(&corpus.training, &config, &params, 10)?;
    let meta = model.meta.as_ref().expect("trained models carry metadata");
    println!(
        "{} positives, {} negatives, C = {}, hinge loss {:.4}, objective {:.4}",
        meta.positives, meta.negatives, params.c, meta.hinge_loss, meta.objective
    );
    println!("{} weights, rho = {:.4}", model.weights.len(), model.rho);

    let bytes = save_model(&model);
    assert_eq!(load_model(&bytes)?, model);
    let path = std::env::args().nth(1).unwrap_or_else(|| "model.txt".into());
    std::fs::write(&path, bytes)?;
    println!("wrote {path}");
    Ok(())
}
