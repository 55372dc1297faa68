//! Evaluate a trained detector on annotated synthetic scenes and print the
//! report as JSON.

use hogscan::detect::DetectParams;
use hogscan::eval::{evaluate, format_annotations, parse_annotations, train_detector};
use hogscan::hog::HogConfig;
use hogscan::svm::TrainParams;
use hogscan::synth::{generate_corpus, CorpusSpec};

fn main() -> hogscan::Result<()> {
    let corpus = generate_corpus(&CorpusSpec::default());
    let model = train_detector(&corpus.training, &HogConfig::default(), &TrainParams::default(), 10)?;

    // Round-trip through the text annotation format used on disk.
    let text = format_annotations(&corpus.test);
    println!("annotation file starts with: {}", text.lines().next().unwrap_or(""));
    let dataset = parse_annotations(text.as_bytes())?;

    let report = evaluate(&dataset, &corpus.images, &model, &DetectParams::default());
    println!("{}", report.to_json());
    eprintln!(
        "detected {}/{} ({}%), false detections {} ({}% of targets)",
        report.detected_targets,
        report.targets,
        report.detection_percent,
        report.false_detections,
        report.false_percent
    );
    Ok(())
}
