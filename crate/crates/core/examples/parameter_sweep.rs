//! Sweep the decision threshold and the gamma setting, printing CSV tables.

use hogscan::detect::DetectParams;
use hogscan::eval::{sweep, write_sweep_csv, SweepAxis, SweepBase};
use hogscan::hog::HogConfig;
use hogscan::svm::TrainParams;
use hogscan::synth::{generate_corpus, CorpusSpec};

fn main() -> hogscan::Result<()> {
    let corpus = generate_corpus(&CorpusSpec {
        test_scenes: 20,
        ..CorpusSpec::default()
    });
    let base = SweepBase {
        config: HogConfig::default(),
        params: DetectParams::default(),
        train_params: TrainParams::default(),
        training: Some(&corpus.training),
        negatives_per_image: 10,
        model: None,
    };

    let taus: Vec<String> = ["0.0", "0.5", "1.0", "1.05", "1.5"].map(String::from).to_vec();
    let rows = sweep(&corpus.test, &corpus.images, &base, SweepAxis::Threshold, &taus);
    write_sweep_csv(std::io::stdout().lock(), SweepAxis::Threshold, &rows)?;
    println!();

    let gammas: Vec<String> = ["off", "0.5", "2.0"].map(String::from).to_vec();
    let rows = sweep(&corpus.test, &corpus.images, &base, SweepAxis::Gamma, &gammas);
    write_sweep_csv(std::io::stdout().lock(), SweepAxis::Gamma, &rows)?;
    Ok(())
}
