use crate::detect::BBox;
use crate::error::{Error, Result};

/// Ground-truth targets of one image.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Annotation {
    pub image_path: String,
    pub targets: Vec<BBox>,
}

/// Parses `<image_path> <n> <x y w h> × n` lines; blank lines and `#` comments are skipped.
pub fn parse_annotations(bytes: &[u8]) -> Result<Vec<Annotation>> {
    let text = std::str::from_utf8(bytes).map_err(|_| Error::Parse {
        line: 0,
        message: "annotation file is not UTF-8".into(),
    })?;
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |message: String| Error::Parse { line: line_no, message };
        let mut tokens = line.split_whitespace();
        let image_path = tokens.next().unwrap().to_string();
        let count: usize = tokens
            .next()
            .ok_or_else(|| err("missing target count".into()))?
            .parse()
            .map_err(|_| err("target count is not a nonnegative integer".into()))?;
        let numbers = tokens
            .map(|t| t.parse::<i64>().map_err(|_| err(format!("invalid coordinate `{t}`"))))
            .collect::<Result<Vec<_>>>()?;
        if numbers.len() != count * 4 {
            return Err(err(format!(
                "declared {count} targets but found {} coordinates (expected {})",
                numbers.len(),
                count * 4
            )));
        }
        let targets = numbers
            .chunks_exact(4)
            .map(|c| {
                if c[2] <= 0 || c[3] <= 0 {
                    Err(err(format!("target {}x{} has non-positive size", c[2], c[3])))
                } else {
                    Ok(BBox::new(c[0], c[1], c[2], c[3]))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        out.push(Annotation { image_path, targets });
    }
    Ok(out)
}

/// Inverse of [`parse_annotations`].
pub fn format_annotations(annotations: &[Annotation]) -> String {
    let mut out = String::new();
    for a in annotations {
        out.push_str(&a.image_path);
        out.push_str(&format!(" {}", a.targets.len()));
        for t in &a.targets {
            out.push_str(&format!(" {} {} {} {}", t.x, t.y, t.width, t.height));
        }
        out.push('\n');
    }
    out
}
