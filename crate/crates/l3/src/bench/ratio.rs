//! Compression-ratio measurement: encoded size divided by raw size, lower is
//! better. Sizes are measured from actual encoder output, never estimated.

use std::path::{Path, PathBuf};

use crate::adapters::{baseline_compressed_size, planarize, read_image_file, BaselineFormat};
use crate::container::{encode_image, RawImage};
use crate::error::{Error, Result};

/// Formats the ratio harness can measure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RatioFormat {
    L3,
    PngBaseline,
}

impl std::fmt::Display for RatioFormat {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            RatioFormat::L3 => "l3",
            RatioFormat::PngBaseline => "png",
        })
    }
}

impl std::str::FromStr for RatioFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "l3" => Ok(RatioFormat::L3),
            "png" | "png-baseline" => Ok(RatioFormat::PngBaseline),
            other => Err(Error::InvalidArgument(format!(
                "unknown ratio format {other:?} (expected l3 or png)"
            ))),
        }
    }
}

/// Measured sizes for one input across the requested formats.
#[derive(Debug, Clone, PartialEq)]
pub struct RatioRow {
    pub name: String,
    pub raw_bytes: u64,
    pub encoded: Vec<(RatioFormat, u64)>,
}

impl RatioRow {
    /// Encoded size divided by raw size for one format.
    pub fn ratio(&self, format: RatioFormat) -> Option<f64> {
        self.encoded
            .iter()
            .find(|(f, _)| *f == format)
            .map(|(_, bytes)| *bytes as f64 / self.raw_bytes as f64)
    }
}

/// Ratio table plus the inputs that had to be skipped.
#[derive(Debug)]
pub struct RatioReport {
    pub rows: Vec<RatioRow>,
    pub skipped: Vec<(PathBuf, Error)>,
}

fn measure_image(name: &str, image: &RawImage, formats: &[RatioFormat]) -> Result<RatioRow> {
    let mut encoded = Vec::with_capacity(formats.len());
    for &format in formats {
        let measured = match format {
            RatioFormat::L3 => encode_image(image, None).map(|b| b.len()),
            RatioFormat::PngBaseline => baseline_compressed_size(image, BaselineFormat::Png),
        };
        match measured {
            Ok(bytes) => encoded.push((format, bytes as u64)),
            // Codec not compiled in: omit the column, keep the row.
            Err(Error::FeatureDisabled(_)) => {}
            Err(err) => return Err(err),
        }
    }
    Ok(RatioRow {
        name: name.to_string(),
        raw_bytes: image.raw_byte_size() as u64,
        encoded,
    })
}

/// Measure in-memory images; errors abort because the caller built the inputs.
pub fn ratio_rows_for_images(
    images: &[(String, RawImage)],
    formats: &[RatioFormat],
) -> Result<Vec<RatioRow>> {
    images
        .iter()
        .map(|(name, image)| measure_image(name, image, formats))
        .collect()
}

/// Measure image files. Unreadable inputs are skipped and reported; a
/// baseline codec that is not compiled in drops its column while the rows
/// stay.
pub fn ratio_report(inputs: &[PathBuf], formats: &[RatioFormat]) -> RatioReport {
    let mut rows = Vec::new();
    let mut skipped = Vec::new();
    for path in inputs {
        match measure_file(path, formats) {
            Ok(row) => rows.push(row),
            Err(err) => skipped.push((path.clone(), err)),
        }
    }
    RatioReport { rows, skipped }
}

fn measure_file(path: &Path, formats: &[RatioFormat]) -> Result<RatioRow> {
    let interleaved = read_image_file(path)?;
    let image = planarize(&interleaved);
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string());
    measure_image(&name, &image, formats)
}

/// Render rows as CSV, one line per (input, format):
/// `name,raw_bytes,encoded_bytes,ratio`, where name is `<input>:<format>`.
pub fn ratio_rows_to_csv(rows: &[RatioRow]) -> String {
    let mut out = String::from("name,raw_bytes,encoded_bytes,ratio\n");
    for row in rows {
        for &(format, bytes) in &row.encoded {
            let ratio = bytes as f64 / row.raw_bytes as f64;
            out.push_str(&format!(
                "{}:{format},{},{bytes},{ratio:.6}\n",
                row.name, row.raw_bytes
            ));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::{synth_image, SynthKind, SynthSpec};

    fn synth(kind: SynthKind, width: usize, height: usize) -> RawImage {
        synth_image(&SynthSpec {
            kind,
            width,
            height,
            seed: 11,
        })
        .unwrap()
    }

    #[test]
    fn black_fhd_ratio_matches_closed_form() {
        let rows = ratio_rows_for_images(
            &[("black".into(), synth(SynthKind::Black, 1920, 1080))],
            &[RatioFormat::L3],
        )
        .unwrap();
        let ratio = rows[0].ratio(RatioFormat::L3).unwrap();
        assert_eq!(rows[0].raw_bytes, 6_220_800);
        assert!((ratio - 0.137).abs() <= 0.005, "ratio {ratio}");
    }

    #[test]
    fn random_fhd_ratio_is_slightly_above_one() {
        let rows = ratio_rows_for_images(
            &[("random".into(), synth(SynthKind::Random, 1920, 1080))],
            &[RatioFormat::L3],
        )
        .unwrap();
        let ratio = rows[0].ratio(RatioFormat::L3).unwrap();
        assert!((1.005..=1.03).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn csv_parses_back_to_row_values() {
        let rows = ratio_rows_for_images(
            &[("tiny".into(), synth(SynthKind::Black, 8, 8))],
            &[RatioFormat::L3],
        )
        .unwrap();
        let csv = ratio_rows_to_csv(&rows);
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("name,raw_bytes,encoded_bytes,ratio"));
        let fields: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(fields[0], "tiny:l3");
        assert_eq!(fields[1].parse::<u64>().unwrap(), rows[0].raw_bytes);
        assert_eq!(fields[2].parse::<u64>().unwrap(), rows[0].encoded[0].1);
        let ratio: f64 = fields[3].parse().unwrap();
        assert!((ratio - rows[0].ratio(RatioFormat::L3).unwrap()).abs() < 1e-6);
    }

    #[test]
    fn unreadable_inputs_are_skipped() {
        let report = ratio_report(
            &[PathBuf::from("/nonexistent/image.ppm")],
            &[RatioFormat::L3],
        );
        assert!(report.rows.is_empty());
        assert_eq!(report.skipped.len(), 1);
    }

    #[cfg(feature = "png")]
    #[test]
    fn png_baseline_on_random_noise_is_near_one() {
        let rows = ratio_rows_for_images(
            &[("random".into(), synth(SynthKind::Random, 1920, 1080))],
            &[RatioFormat::PngBaseline],
        )
        .unwrap();
        let ratio = rows[0].ratio(RatioFormat::PngBaseline).unwrap();
        assert!((0.99..=1.03).contains(&ratio), "png ratio {ratio}");
    }
}
