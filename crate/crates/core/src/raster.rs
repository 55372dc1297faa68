//! Raster types, netpbm I/O, and the pixel-level preprocessing that runs
//! before gradient computation: luma conversion, gamma compression, and the
//! bilinear resampler used by the scale pyramid.

use crate::error::{Error, Result};

/// 8-bit single-channel image, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    pixels: Vec<u8>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, pixels: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::Dimension(format!(
                "image dimensions must be positive, got {width}x{height}"
            )));
        }
        if pixels.len() != width * height {
            return Err(Error::Dimension(format!(
                "expected {} pixels for {width}x{height}, got {}",
                width * height,
                pixels.len()
            )));
        }
        Ok(Self { width, height, pixels })
    }

    /// Image filled with one intensity.
    pub fn filled(width: usize, height: usize, value: u8) -> Result<Self> {
        Self::new(width, height, vec![value; width * height])
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> u8) -> Result<Self> {
        let mut pixels = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                pixels.push(f(x, y));
            }
        }
        Self::new(width, height, pixels)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.pixels[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, value: u8) {
        self.pixels[y * self.width + x] = value;
    }

    /// Copies the rectangle `[x, x+width) × [y, y+height)`.
    pub fn crop(&self, x: usize, y: usize, width: usize, height: usize) -> Result<Self> {
        if x + width > self.width || y + height > self.height {
            return Err(Error::Dimension(format!(
                "crop {width}x{height} at ({x},{y}) exceeds {}x{}",
                self.width, self.height
            )));
        }
        Self::from_fn(width, height, |cx, cy| self.get(x + cx, y + cy))
    }

    /// Pastes `patch` with its top-left corner at `(x, y)`, dropping pixels that fall outside.
    pub fn blit(&mut self, patch: &GrayImage, x: usize, y: usize) {
        for py in 0..patch.height {
            let ty = y + py;
            if ty >= self.height {
                break;
            }
            for px in 0..patch.width {
                let tx = x + px;
                if tx >= self.width {
                    break;
                }
                self.set(tx, ty, patch.get(px, py));
            }
        }
    }
}

/// 8-bit RGB image, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RgbImage {
    width: usize,
    height: usize,
    pixels: Vec<[u8; 3]>,
}

impl RgbImage {
    pub fn new(width: usize, height: usize, pixels: Vec<[u8; 3]>) -> Result<Self> {
        if width == 0 || height == 0 || pixels.len() != width * height {
            return Err(Error::Dimension(format!(
                "{} pixels do not form a {width}x{height} image",
                pixels.len()
            )));
        }
        Ok(Self { width, height, pixels })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[[u8; 3]] {
        &self.pixels
    }
}

/// Result of [`decode_image`]: PGM decodes to gray, PPM to RGB.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DecodedImage {
    Gray(GrayImage),
    Rgb(RgbImage),
}

impl DecodedImage {
    /// Collapses either variant to grayscale.
    pub fn into_gray(self) -> GrayImage {
        match self {
            DecodedImage::Gray(g) => g,
            DecodedImage::Rgb(rgb) => to_grayscale(&rgb),
        }
    }
}

struct HeaderReader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl HeaderReader<'_> {
    fn skip_whitespace_and_comments(&mut self) {
        while self.pos < self.bytes.len() {
            let b = self.bytes[self.pos];
            if b == b'#' {
                while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                    self.pos += 1;
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn number(&mut self, field: &'static str) -> Result<usize> {
        self.skip_whitespace_and_comments();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(Error::decode(field, "expected a decimal number"));
        }
        // Digits only, so the slice is valid UTF-8.
        std::str::from_utf8(&self.bytes[start..self.pos])
            .unwrap()
            .parse()
            .map_err(|_| Error::decode(field, "number out of range"))
    }
}

/// Decodes a binary PGM (`P5`) or PPM (`P6`) stream with maxval 255.
pub fn decode_image(bytes: &[u8]) -> Result<DecodedImage> {
    if bytes.len() < 2 || bytes[0] != b'P' {
        return Err(Error::decode("magic", "missing P5/P6 magic number"));
    }
    let channels = match bytes[1] {
        b'5' => 1,
        b'6' => 3,
        other => {
            return Err(Error::decode(
                "magic",
                format!("unsupported netpbm type P{}", other as char),
            ))
        }
    };
    let mut header = HeaderReader { bytes, pos: 2 };
    let width = header.number("width")?;
    let height = header.number("height")?;
    let maxval = header.number("maxval")?;
    if width == 0 {
        return Err(Error::decode("width", "must be positive"));
    }
    if height == 0 {
        return Err(Error::decode("height", "must be positive"));
    }
    if maxval != 255 {
        return Err(Error::decode("maxval", format!("expected 255, got {maxval}")));
    }
    // Exactly one whitespace byte separates the header from the raster.
    match bytes.get(header.pos) {
        Some(b) if b.is_ascii_whitespace() => header.pos += 1,
        _ => return Err(Error::decode("maxval", "missing whitespace after maxval")),
    }
    let expected = width
        .checked_mul(height)
        .and_then(|n| n.checked_mul(channels))
        .ok_or_else(|| Error::decode("width", "image dimensions overflow"))?;
    let payload = &bytes[header.pos..];
    if payload.len() < expected {
        return Err(Error::decode(
            "payload",
            format!("truncated: expected {expected} bytes, got {}", payload.len()),
        ));
    }
    let payload = &payload[..expected];
    if channels == 1 {
        Ok(DecodedImage::Gray(GrayImage::new(width, height, payload.to_vec())?))
    } else {
        let pixels = payload.chunks_exact(3).map(|c| [c[0], c[1], c[2]]).collect();
        Ok(DecodedImage::Rgb(RgbImage::new(width, height, pixels)?))
    }
}

/// Encodes a binary PGM (`P5`) stream.
pub fn encode_pgm(img: &GrayImage) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", img.width, img.height).into_bytes();
    out.extend_from_slice(&img.pixels);
    out
}

/// Encodes a binary PPM (`P6`) stream.
pub fn encode_ppm(img: &RgbImage) -> Vec<u8> {
    let mut out = format!("P6\n{} {}\n255\n", img.width, img.height).into_bytes();
    out.extend(img.pixels.iter().flatten());
    out
}

/// Reads and decodes a netpbm file, converting color input to grayscale.
pub fn read_gray(path: impl AsRef<std::path::Path>) -> Result<GrayImage> {
    let bytes = std::fs::read(path)?;
    Ok(decode_image(&bytes)?.into_gray())
}

/// Luma conversion with 0.299/0.587/0.114 weights, rounded half-up.
pub fn to_grayscale(img: &RgbImage) -> GrayImage {
    let pixels = img
        .pixels
        .iter()
        .map(|&[r, g, b]| {
            // Integer arithmetic in thousandths keeps r == g == b exact.
            let luma = 299 * r as u32 + 587 * g as u32 + 114 * b as u32;
            ((luma + 500) / 1000).min(255) as u8
        })
        .collect();
    GrayImage {
        width: img.width,
        height: img.height,
        pixels,
    }
}

#[inline]
pub(crate) fn round_half_up(v: f64) -> f64 {
    (v + 0.5).floor()
}

fn clamp_u8(v: f64) -> u8 {
    round_half_up(v).clamp(0.0, 255.0) as u8
}

/// Applies `out = 255 · (in/255)^gamma` through a lookup table.
pub fn gamma_correct(img: &GrayImage, gamma: f64) -> Result<GrayImage> {
    if !(gamma.is_finite() && gamma > 0.0) {
        return Err(Error::Parameter(format!("gamma must be positive, got {gamma}")));
    }
    let mut lut = [0u8; 256];
    for (i, slot) in lut.iter_mut().enumerate() {
        *slot = clamp_u8(255.0 * (i as f64 / 255.0).powf(gamma));
    }
    Ok(GrayImage {
        width: img.width,
        height: img.height,
        pixels: img.pixels.iter().map(|&p| lut[p as usize]).collect(),
    })
}

const WEIGHT_BITS: u32 = 11;
const WEIGHT_ONE: i64 = 1 << WEIGHT_BITS;

/// Source index pair and fixed-point weight of the second sample for each output coordinate.
fn axis_taps(src_len: usize, dst_len: usize) -> Vec<(usize, usize, i64)> {
    let scale = src_len as f64 / dst_len as f64;
    (0..dst_len)
        .map(|d| {
            let s = ((d as f64 + 0.5) * scale - 0.5).clamp(0.0, (src_len - 1) as f64);
            let i0 = s.floor() as usize;
            let i1 = (i0 + 1).min(src_len - 1);
            let w1 = round_half_up((s - i0 as f64) * WEIGHT_ONE as f64) as i64;
            (i0, i1, w1)
        })
        .collect()
}

/// Bilinear resampling with half-pixel-center mapping.
///
/// Weights are quantized to 11 bits per axis and accumulated in integers, so
/// the result is deterministic and shifts exactly with a constant intensity
/// offset of the input.
pub fn resize_bilinear(img: &GrayImage, out_width: usize, out_height: usize) -> Result<GrayImage> {
    if out_width == 0 || out_height == 0 {
        return Err(Error::Parameter(format!(
            "output dimensions must be positive, got {out_width}x{out_height}"
        )));
    }
    if out_width == img.width && out_height == img.height {
        return Ok(img.clone());
    }
    let xs = axis_taps(img.width, out_width);
    let ys = axis_taps(img.height, out_height);
    let half = 1i64 << (2 * WEIGHT_BITS - 1);
    let mut pixels = Vec::with_capacity(out_width * out_height);
    for &(y0, y1, wy1) in &ys {
        let wy0 = WEIGHT_ONE - wy1;
        let row0 = &img.pixels[y0 * img.width..(y0 + 1) * img.width];
        let row1 = &img.pixels[y1 * img.width..(y1 + 1) * img.width];
        for &(x0, x1, wx1) in &xs {
            let wx0 = WEIGHT_ONE - wx1;
            let top = wx0 * row0[x0] as i64 + wx1 * row0[x1] as i64;
            let bottom = wx0 * row1[x0] as i64 + wx1 * row1[x1] as i64;
            let acc = wy0 * top + wy1 * bottom;
            pixels.push(((acc + half) >> (2 * WEIGHT_BITS)).clamp(0, 255) as u8);
        }
    }
    Ok(GrayImage {
        width: out_width,
        height: out_height,
        pixels,
    })
}
