//! Image ingestion and egress: binary PPM, planar/interleaved conversion,
//! and baseline-codec size probes for ratio comparisons.
//!
//! PPM (P6, maxval 255) is the mandatory interchange format; PNG support is
//! compiled in behind the `png` feature and used only for baseline
//! measurements and ingesting user-supplied datasets.

use std::path::Path;

use crate::codec::PixelPlane;
use crate::container::{Channel, RawImage};
use crate::error::{Error, Result};

/// An RGB image with interleaved samples, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InterleavedImage {
    width: usize,
    height: usize,
    data: Vec<u8>,
}

impl InterleavedImage {
    pub fn new(width: usize, height: usize, data: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidArgument(format!(
                "image dimensions must be at least 1x1, got {width}x{height}"
            )));
        }
        if data.len() != width * height * 3 {
            return Err(Error::InvalidArgument(format!(
                "interleaved data length {} does not match {width}x{height}x3",
                data.len()
            )));
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }
}

struct PpmHeaderParser<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> PpmHeaderParser<'a> {
    /// Advance past whitespace and `#` comments (which run to end of line).
    fn skip_separators(&mut self) {
        while let Some(&b) = self.bytes.get(self.pos) {
            if b.is_ascii_whitespace() {
                self.pos += 1;
            } else if b == b'#' {
                while let Some(&c) = self.bytes.get(self.pos) {
                    self.pos += 1;
                    if c == b'\n' {
                        break;
                    }
                }
            } else {
                break;
            }
        }
    }

    fn read_number(&mut self, what: &str) -> Result<usize> {
        self.skip_separators();
        let start = self.pos;
        while self.bytes.get(self.pos).is_some_and(|b| b.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(Error::UnsupportedInput(format!(
                "expected {what} in PPM header"
            )));
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .unwrap()
            .parse()
            .map_err(|_| Error::UnsupportedInput(format!("{what} out of range")))
    }
}

/// Parse a binary PPM (`P6`, maxval 255).
pub fn read_ppm(bytes: &[u8]) -> Result<InterleavedImage> {
    if bytes.len() < 2 || &bytes[..2] != b"P6" {
        return Err(Error::UnsupportedInput("not a binary PPM (P6) file".into()));
    }
    let mut parser = PpmHeaderParser { bytes, pos: 2 };
    let width = parser.read_number("width")?;
    let height = parser.read_number("height")?;
    let maxval = parser.read_number("maxval")?;
    if maxval != 255 {
        return Err(Error::UnsupportedInput(format!(
            "only maxval 255 is supported, found {maxval}"
        )));
    }
    // Exactly one whitespace byte separates the header from the samples.
    match bytes.get(parser.pos) {
        Some(b) if b.is_ascii_whitespace() => parser.pos += 1,
        _ => {
            return Err(Error::UnsupportedInput(
                "missing separator after PPM maxval".into(),
            ))
        }
    }
    if width == 0 || height == 0 {
        return Err(Error::UnsupportedInput(format!(
            "degenerate PPM dimensions {width}x{height}"
        )));
    }
    let expected = width
        .checked_mul(height)
        .and_then(|n| n.checked_mul(3))
        .ok_or_else(|| Error::UnsupportedInput("PPM dimensions overflow".into()))?;
    let payload = &bytes[parser.pos..];
    if payload.len() < expected {
        return Err(Error::UnsupportedInput(format!(
            "PPM payload truncated: expected {expected} bytes, found {}",
            payload.len()
        )));
    }
    InterleavedImage::new(width, height, payload[..expected].to_vec())
}

/// Serialize to binary PPM: `P6\n<w> <h>\n255\n` then raw RGB triplets.
pub fn write_ppm(image: &InterleavedImage) -> Vec<u8> {
    let mut out = format!("P6\n{} {}\n255\n", image.width, image.height).into_bytes();
    out.extend_from_slice(&image.data);
    out
}

/// Split interleaved RGB into the three channel planes.
pub fn planarize(image: &InterleavedImage) -> RawImage {
    let pixels = image.width * image.height;
    let mut planes = [
        Vec::with_capacity(pixels),
        Vec::with_capacity(pixels),
        Vec::with_capacity(pixels),
    ];
    for triplet in image.data.chunks_exact(3) {
        planes[0].push(triplet[0]);
        planes[1].push(triplet[1]);
        planes[2].push(triplet[2]);
    }
    let planes = planes.map(|data| {
        PixelPlane::new(image.width, image.height, data).expect("lengths derived from image")
    });
    RawImage::new(planes).expect("planes share dimensions")
}

/// Merge channel planes back into interleaved RGB. Inverse of [`planarize`].
pub fn interleave(image: &RawImage) -> InterleavedImage {
    let pixels = image.width() * image.height();
    let mut data = Vec::with_capacity(pixels * 3);
    let r = image.plane(Channel::R).data();
    let g = image.plane(Channel::G).data();
    let b = image.plane(Channel::B).data();
    for i in 0..pixels {
        data.push(r[i]);
        data.push(g[i]);
        data.push(b[i]);
    }
    InterleavedImage::new(image.width(), image.height(), data).expect("length derived")
}

/// Baseline codecs available for size comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BaselineFormat {
    Png,
}

/// Encode with an external baseline codec at default effort and return the
/// byte count. Used only for ratio tables, never in the L3 path.
pub fn baseline_compressed_size(image: &RawImage, format: BaselineFormat) -> Result<usize> {
    match format {
        BaselineFormat::Png => Ok(write_png(image)?.len()),
    }
}

/// Encode a PNG at the codec's default effort.
#[cfg(feature = "png")]
pub fn write_png(image: &RawImage) -> Result<Vec<u8>> {
    use image::ImageEncoder;
    let interleaved = interleave(image);
    let mut out = Vec::new();
    image::codecs::png::PngEncoder::new(&mut out)
        .write_image(
            interleaved.data(),
            interleaved.width() as u32,
            interleaved.height() as u32,
            image::ExtendedColorType::Rgb8,
        )
        .map_err(|e| Error::UnsupportedInput(format!("png encode failed: {e}")))?;
    Ok(out)
}

#[cfg(not(feature = "png"))]
pub fn write_png(_image: &RawImage) -> Result<Vec<u8>> {
    Err(Error::FeatureDisabled(
        "png support requires the `png` feature".into(),
    ))
}

/// Decode a PNG file into an interleaved image.
#[cfg(feature = "png")]
pub fn read_png(bytes: &[u8]) -> Result<InterleavedImage> {
    let decoded = image::load_from_memory_with_format(bytes, image::ImageFormat::Png)
        .map_err(|e| Error::UnsupportedInput(format!("png decode failed: {e}")))?
        .to_rgb8();
    InterleavedImage::new(
        decoded.width() as usize,
        decoded.height() as usize,
        decoded.into_raw(),
    )
}

#[cfg(not(feature = "png"))]
pub fn read_png(_bytes: &[u8]) -> Result<InterleavedImage> {
    Err(Error::FeatureDisabled(
        "png ingestion requires the `png` feature".into(),
    ))
}

/// Read an image file by extension: `.ppm` always, `.png` when compiled in.
pub fn read_image_file(path: &Path) -> Result<InterleavedImage> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    match path
        .extension()
        .and_then(|e| e.to_str())
        .map(|e| e.to_ascii_lowercase())
        .as_deref()
    {
        Some("ppm") => read_ppm(&bytes),
        Some("png") => read_png(&bytes),
        other => Err(Error::UnsupportedInput(format!(
            "unsupported image extension {other:?} for {}",
            path.display()
        ))),
    }
}
