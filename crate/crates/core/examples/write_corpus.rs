//! Write a synthetic corpus to disk in the layout the `hogscan` binary expects.
//!
//! ```text
//! cargo run --example write_corpus -- data
//! hogscan train --pos data/pos --neg data/neg --out model.txt
//! hogscan eval --model model.txt --annotations data/test.txt --images-root data/test --out report.json
//! ```

use std::fs;
use std::path::PathBuf;

use hogscan::eval::{format_annotations, ImageSource};
use hogscan::raster::encode_pgm;
use hogscan::synth::{generate_corpus, CorpusSpec};

fn main() -> hogscan::Result<()> {
    let root = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "data".into()));
    let corpus = generate_corpus(&CorpusSpec::default());
    for dir in ["pos", "neg", "test"] {
        fs::create_dir_all(root.join(dir))?;
    }
    for (i, img) in corpus.training.positives.iter().enumerate() {
        fs::write(root.join("pos").join(format!("pos_{i:04}.pgm")), encode_pgm(img))?;
    }
    for (i, img) in corpus.training.negative_images.iter().enumerate() {
        fs::write(root.join("neg").join(format!("neg_{i:04}.pgm")), encode_pgm(img))?;
    }
    for ann in &corpus.test {
        let img = corpus.images.load(&ann.image_path)?;
        fs::write(root.join("test").join(&ann.image_path), encode_pgm(&img))?;
    }
    fs::write(root.join("test.txt"), format_annotations(&corpus.test))?;
    println!(
        "wrote {} positives, {} negative scenes and {} test scenes under {}",
        corpus.training.positives.len(),
        corpus.training.negative_images.len(),
        corpus.test.len(),
        root.display()
    );
    Ok(())
}
