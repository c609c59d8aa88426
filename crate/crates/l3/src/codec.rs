//! Single-patch codec: neighbor-predictive filtering over the previous row,
//! followed by per-row base-delta bit packing.
//!
//! Encoded patch layout (MSB-first, rows bit-contiguous):
//!
//! ```text
//! per row:  [4-bit delta width k][8-bit base][width deltas of k bits each]
//! ```
//!
//! Rows are concatenated top to bottom and the patch is zero-padded to a
//! byte boundary, so every patch starts byte-aligned in the container.
//!
//! The filter predicts each pixel from the three neighbors directly above it
//! (top-left, top, top-right), never from the current row. Within a row every
//! residual is therefore independent of its siblings, which is what lets the
//! decoder reconstruct a whole row at once.

use crate::bitio::{extract_bits, BitReader, BitWriter};
use crate::error::{Error, Result};

/// Largest patch edge representable by the container's 1-byte patch-size field.
pub const MAX_PATCH_DIM: usize = 255;

/// One 8-bit channel of an image, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PixelPlane {
    width: usize,
    height: usize,
    data: Vec<u8>,
}

impl PixelPlane {
    pub fn new(width: usize, height: usize, data: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidArgument(format!(
                "plane dimensions must be at least 1x1, got {width}x{height}"
            )));
        }
        if data.len() != width * height {
            return Err(Error::InvalidArgument(format!(
                "plane data length {} does not match {width}x{height}",
                data.len()
            )));
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn zeroed(width: usize, height: usize) -> Result<Self> {
        Self::new(width, height, vec![0; width * height])
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

    pub fn row(&self, y: usize) -> &[u8] {
        &self.data[y * self.width..(y + 1) * self.width]
    }

    pub fn into_data(self) -> Vec<u8> {
        self.data
    }
}

/// Filter-stage output: row 0 verbatim, every later row as wrapped residuals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResidualPatch {
    width: usize,
    height: usize,
    data: Vec<u8>,
}

impl ResidualPatch {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn row(&self, y: usize) -> &[u8] {
        &self.data[y * self.width..(y + 1) * self.width]
    }
}

/// Base-delta encoding of one row: delta bit width, row minimum, offsets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RowRecord {
    /// Bits per delta, 1..=8. Never 0: a uniform row still spends one bit
    /// per pixel.
    pub delta_bits: u8,
    /// Minimum byte of the row.
    pub base: u8,
    /// Per-pixel offsets from the base, each < 2^delta_bits.
    pub deltas: Vec<u8>,
}

/// Inner-loop selection for patch decoding.
///
/// Both variants of each stage produce identical bytes; the flags only choose
/// between a scalar sequential loop and the data-parallel formulation
/// (independent per-pixel work items).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DecodeModes {
    /// Reconstruct each row of the filter stage as a batch of independent
    /// per-pixel operations instead of a left-to-right scalar loop.
    pub paeth_rowwise: bool,
    /// Extract base-delta fields by absolute bit offset per pixel instead of
    /// advancing a sequential cursor.
    pub bd_pixelwise: bool,
}

impl Default for DecodeModes {
    fn default() -> Self {
        Self {
            paeth_rowwise: true,
            bd_pixelwise: true,
        }
    }
}

impl DecodeModes {
    pub const SCALAR: Self = Self {
        paeth_rowwise: false,
        bd_pixelwise: false,
    };
}

/// Predict a pixel from the three neighbors above it.
///
/// The reference value is `top_left + top_right - top` over unbounded
/// integers; the prediction is the candidate closest to it, ties broken in
/// the order top-left, top, top-right. A missing neighbor at a patch edge is
/// substituted with `top` before anything else.
pub fn predict_pixel(top_left: Option<u8>, top: u8, top_right: Option<u8>) -> u8 {
    let tl = top_left.unwrap_or(top);
    let tr = top_right.unwrap_or(top);
    let reference = i32::from(tl) + i32::from(tr) - i32::from(top);
    let dist_tl = (i32::from(tl) - reference).abs();
    let dist_t = (i32::from(top) - reference).abs();
    let dist_tr = (i32::from(tr) - reference).abs();
    if dist_tl <= dist_t && dist_tl <= dist_tr {
        tl
    } else if dist_t <= dist_tr {
        top
    } else {
        tr
    }
}

#[inline]
fn predict_from_prev(prev: &[u8], column: usize) -> u8 {
    let top_left = column.checked_sub(1).map(|c| prev[c]);
    let top_right = prev.get(column + 1).copied();
    predict_pixel(top_left, prev[column], top_right)
}

/// Apply the filter stage to a whole patch.
///
/// Row 0 is copied verbatim; each later pixel becomes
/// `(pixel - prediction) mod 256`, predicted from the original previous row.
pub fn paeth_filter(patch: &PixelPlane) -> ResidualPatch {
    let (width, height) = (patch.width(), patch.height());
    let mut data = Vec::with_capacity(width * height);
    data.extend_from_slice(patch.row(0));
    for y in 1..height {
        let prev = patch.row(y - 1);
        let cur = patch.row(y);
        for (column, &pixel) in cur.iter().enumerate() {
            data.push(pixel.wrapping_sub(predict_from_prev(prev, column)));
        }
    }
    ResidualPatch {
        width,
        height,
        data,
    }
}

/// Invert the filter stage for one row given the already-decoded row above.
///
/// Every output pixel depends only on `prev_decoded[c-1..=c+1]` and
/// `residual[c]`, never on other pixels of its own row.
pub fn paeth_unfilter_row(prev_decoded: &[u8], residual: &[u8]) -> Result<Vec<u8>> {
    if prev_decoded.len() != residual.len() {
        return Err(Error::InvalidArgument(format!(
            "row length mismatch: previous {} vs residual {}",
            prev_decoded.len(),
            residual.len()
        )));
    }
    let mut out = residual.to_vec();
    unfilter_row_scalar_inplace(prev_decoded, &mut out);
    Ok(out)
}

/// In-place scalar unfilter: `row` holds residuals on entry, pixels on exit.
fn unfilter_row_scalar_inplace(prev: &[u8], row: &mut [u8]) {
    for (column, r) in row.iter_mut().enumerate() {
        *r = r.wrapping_add(predict_from_prev(prev, column));
    }
}

/// In-place row-wise unfilter: boundary pixels handled separately, interior
/// pixels as one dependency-free pass over 3-wide windows of the previous
/// row. Order of the interior writes is immaterial.
fn unfilter_row_rowwise_inplace(prev: &[u8], row: &mut [u8]) {
    let width = row.len();
    if width == 1 {
        row[0] = row[0].wrapping_add(prev[0]);
        return;
    }
    row[0] = row[0].wrapping_add(predict_pixel(None, prev[0], Some(prev[1])));
    let last = width - 1;
    for (r, window) in row[1..last].iter_mut().zip(prev.windows(3)) {
        *r = r.wrapping_add(predict_pixel(Some(window[0]), window[1], Some(window[2])));
    }
    row[last] = row[last].wrapping_add(predict_pixel(Some(prev[last - 1]), prev[last], None));
}

fn delta_bits_for_range(range: u8) -> u8 {
    if range == 0 {
        1
    } else {
        8 - range.leading_zeros() as u8
    }
}

/// Base-delta encode one row: base is the row minimum, the delta width is the
/// smallest k in 1..=8 covering `max - min`.
pub fn bd_encode_row(row: &[u8]) -> Result<RowRecord> {
    if row.is_empty() {
        return Err(Error::InvalidArgument("cannot encode an empty row".into()));
    }
    let base = *row.iter().min().unwrap();
    let max = *row.iter().max().unwrap();
    let delta_bits = delta_bits_for_range(max - base);
    let deltas = row.iter().map(|&b| b - base).collect();
    Ok(RowRecord {
        delta_bits,
        base,
        deltas,
    })
}

/// Append one row record to the bitstream: 4-bit width, 8-bit base, then the
/// deltas, bit-contiguous with whatever precedes.
pub fn bd_write_row(writer: &mut BitWriter, record: &RowRecord) {
    writer.write_bits(u32::from(record.delta_bits), 4);
    writer.write_bits(u32::from(record.base), 8);
    for &delta in &record.deltas {
        writer.write_bits(u32::from(delta), u32::from(record.delta_bits));
    }
}

fn validate_delta_bits(k: u32) -> Result<u8> {
    if (1..=8).contains(&k) {
        Ok(k as u8)
    } else {
        Err(Error::CorruptStream(format!(
            "delta bit width {k} outside 1..=8"
        )))
    }
}

/// Decode one base-delta row through the cursor, returning `row_width` bytes.
pub fn bd_decode_row(reader: &mut BitReader<'_>, row_width: usize) -> Result<Vec<u8>> {
    let delta_bits = validate_delta_bits(reader.read_bits(4)?)?;
    let base = reader.read_bits(8)? as u8;
    let mut row = Vec::with_capacity(row_width);
    for _ in 0..row_width {
        row.push(base.wrapping_add(reader.read_bits(u32::from(delta_bits))? as u8));
    }
    Ok(row)
}

/// Read one row's (delta_bits, base) header at an absolute bit position.
fn bd_row_header(data: &[u8], bit_pos: usize) -> Result<(u8, u8, usize)> {
    let total_bits = data.len() * 8;
    if total_bits < bit_pos + 12 {
        return Err(Error::TruncatedStream(format!(
            "row header needs 12 bits at bit {bit_pos}, stream has {total_bits}"
        )));
    }
    let delta_bits = validate_delta_bits(extract_bits(data, bit_pos, 4))?;
    let base = extract_bits(data, bit_pos + 4, 8) as u8;
    Ok((delta_bits, base, bit_pos + 12))
}

/// Sequential cursor decode of one row into `out`; returns the next bit position.
fn bd_decode_row_scalar_into(data: &[u8], bit_pos: usize, out: &mut [u8]) -> Result<usize> {
    let (delta_bits, base, deltas_start) = bd_row_header(data, bit_pos)?;
    let k = u32::from(delta_bits);
    let end = deltas_start + delta_bits as usize * out.len();
    if end > data.len() * 8 {
        return Err(Error::TruncatedStream(format!(
            "row of {} deltas x {delta_bits} bits overruns the stream",
            out.len()
        )));
    }
    let mut pos = deltas_start;
    for slot in out.iter_mut() {
        *slot = base.wrapping_add(extract_bits(data, pos, k) as u8);
        pos += delta_bits as usize;
    }
    Ok(end)
}

/// Pixel-wise decode of one row into `out`: each output byte is produced by
/// an independent absolute-offset extraction, so the per-pixel work items
/// carry no ordering constraint. Returns the next bit position.
fn bd_decode_row_pixelwise_into(data: &[u8], bit_pos: usize, out: &mut [u8]) -> Result<usize> {
    let (delta_bits, base, deltas_start) = bd_row_header(data, bit_pos)?;
    let k = u32::from(delta_bits);
    let stride = delta_bits as usize;
    let end = deltas_start + stride * out.len();
    if end > data.len() * 8 {
        return Err(Error::TruncatedStream(format!(
            "row of {} deltas x {delta_bits} bits overruns the stream",
            out.len()
        )));
    }
    for (i, slot) in out.iter_mut().enumerate() {
        *slot = base.wrapping_add(extract_bits(data, deltas_start + i * stride, k) as u8);
    }
    Ok(end)
}

fn validate_patch_dims(width: usize, height: usize) -> Result<()> {
    if width == 0 || height == 0 || width > MAX_PATCH_DIM || height > MAX_PATCH_DIM {
        return Err(Error::InvalidArgument(format!(
            "patch dimensions must be within 1..={MAX_PATCH_DIM}, got {width}x{height}"
        )));
    }
    Ok(())
}

/// Encode one patch: filter stage, then base-delta pack every row (including
/// row 0) into a single bit-contiguous stream, zero-padded to a byte.
///
/// Deterministic: identical input yields identical bytes.
pub fn encode_patch(patch: &PixelPlane) -> Result<Vec<u8>> {
    validate_patch_dims(patch.width(), patch.height())?;
    let residual = paeth_filter(patch);
    // 12 header bits + up to 8 bits per delta, rounded up.
    let worst_case = (patch.height() * (12 + 8 * patch.width())).div_ceil(8);
    let mut writer = BitWriter::with_capacity(worst_case);
    for y in 0..residual.height() {
        bd_write_row(&mut writer, &bd_encode_row(residual.row(y))?);
    }
    Ok(writer.finish())
}

/// Sequential reference decode of one patch. Trailing padding bits are
/// ignored; the exact inverse of [`encode_patch`].
pub fn decode_patch(bytes: &[u8], width: usize, height: usize) -> Result<PixelPlane> {
    validate_patch_dims(width, height)?;
    let mut reader = BitReader::new(bytes);
    let mut data = Vec::with_capacity(width * height);
    let mut prev = bd_decode_row(&mut reader, width)?;
    data.extend_from_slice(&prev);
    for _ in 1..height {
        let residual = bd_decode_row(&mut reader, width)?;
        let row = paeth_unfilter_row(&prev, &residual)?;
        data.extend_from_slice(&row);
        prev = row;
    }
    PixelPlane::new(width, height, data)
}

/// Decode one patch directly into caller-provided row slices.
///
/// `rows` must hold exactly `height` slices of length `width`; they may be
/// disjoint views into a larger plane. The inner loops are selected by
/// `modes`; every combination produces bytes identical to [`decode_patch`].
pub fn decode_patch_into(
    bytes: &[u8],
    width: usize,
    height: usize,
    modes: DecodeModes,
    rows: &mut [&mut [u8]],
) -> Result<()> {
    validate_patch_dims(width, height)?;
    debug_assert_eq!(rows.len(), height);
    debug_assert!(rows.iter().all(|r| r.len() == width));
    let mut bit_pos = 0;
    for y in 0..height {
        bit_pos = if modes.bd_pixelwise {
            bd_decode_row_pixelwise_into(bytes, bit_pos, rows[y])?
        } else {
            bd_decode_row_scalar_into(bytes, bit_pos, rows[y])?
        };
        if y > 0 {
            let (before, current) = rows.split_at_mut(y);
            let prev = &*before[y - 1];
            if modes.paeth_rowwise {
                unfilter_row_rowwise_inplace(prev, current[0]);
            } else {
                unfilter_row_scalar_inplace(prev, current[0]);
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plane(width: usize, height: usize, data: &[u8]) -> PixelPlane {
        PixelPlane::new(width, height, data.to_vec()).unwrap()
    }

    #[test]
    fn predictor_all_equal() {
        assert_eq!(predict_pixel(Some(10), 10, Some(10)), 10);
    }

    #[test]
    fn predictor_prefers_closest_to_reference() {
        // reference = 50 + 62 - 60 = 52; distances 2, 8, 10.
        assert_eq!(predict_pixel(Some(50), 60, Some(62)), 50);
    }

    #[test]
    fn predictor_missing_left_substitutes_top() {
        // tl := 7, reference = 7 + 9 - 7 = 9; distances 2, 2, 0.
        assert_eq!(predict_pixel(None, 7, Some(9)), 9);
    }

    #[test]
    fn predictor_tie_break_order_is_tl_t_tr() {
        // reference = 10 + 13 - 12 = 11: distances 1, 1, 2 -> tl beats t.
        assert_eq!(predict_pixel(Some(10), 12, Some(13)), 10);
        // reference = 98 + 104 - 100 = 102: distances 4, 2, 2 -> t beats tr.
        assert_eq!(predict_pixel(Some(98), 100, Some(104)), 100);
        // reference = 4 + 8 - 6 = 6: distances 2, 0, 2 -> top alone.
        assert_eq!(predict_pixel(Some(4), 6, Some(8)), 6);
    }

    #[test]
    fn filter_stores_difference_to_selected_neighbor() {
        // Second-row pixel 74 over a flat 65 row: prediction 65, residual 9.
        let p = plane(3, 2, &[65, 65, 65, 74, 74, 74]);
        let r = paeth_filter(&p);
        assert_eq!(r.row(0), &[65, 65, 65]);
        assert_eq!(r.row(1), &[9, 9, 9]);
    }

    #[test]
    fn filter_all_zero_patch() {
        let p = plane(2, 2, &[0, 0, 0, 0]);
        let r = paeth_filter(&p);
        assert_eq!(r.row(0), &[0, 0]);
        assert_eq!(r.row(1), &[0, 0]);
    }

    #[test]
    fn filter_single_row_is_verbatim() {
        let p = plane(1, 1, &[42]);
        let r = paeth_filter(&p);
        assert_eq!(r.row(0), &[42]);
    }

    #[test]
    fn unfilter_recovers_fig_example() {
        assert_eq!(
            paeth_unfilter_row(&[65, 65, 65], &[9, 9, 9]).unwrap(),
            vec![74, 74, 74]
        );
        assert_eq!(
            paeth_unfilter_row(&[0, 0, 0], &[0, 0, 0]).unwrap(),
            vec![0, 0, 0]
        );
    }

    #[test]
    fn unfilter_rejects_length_mismatch() {
        let err = paeth_unfilter_row(&[1, 2], &[1, 2, 3]).unwrap_err();
        assert!(matches!(err, Error::InvalidArgument(_)));
    }

    #[test]
    fn unfilter_variants_agree() {
        let prev = [9u8, 200, 3, 255, 0, 17, 17, 80];
        let residual = [1u8, 2, 250, 0, 9, 128, 64, 255];
        let reference = paeth_unfilter_row(&prev, &residual).unwrap();
        for width in 1..=prev.len() {
            let mut scalar = residual[..width].to_vec();
            unfilter_row_scalar_inplace(&prev[..width], &mut scalar);
            let mut rowwise = residual[..width].to_vec();
            unfilter_row_rowwise_inplace(&prev[..width], &mut rowwise);
            assert_eq!(scalar, rowwise);
            if width == prev.len() {
                assert_eq!(scalar, reference);
            }
        }
    }

    #[test]
    fn bd_encode_examples() {
        let rec = bd_encode_row(&[12, 15, 12, 13]).unwrap();
        assert_eq!(
            rec,
            RowRecord {
                delta_bits: 2,
                base: 12,
                deltas: vec![0, 3, 0, 1]
            }
        );

        let uniform = bd_encode_row(&[0, 0, 0, 0]).unwrap();
        assert_eq!(uniform.delta_bits, 1);
        assert_eq!(uniform.base, 0);
        assert_eq!(uniform.deltas, vec![0, 0, 0, 0]);

        let full = bd_encode_row(&[0, 255]).unwrap();
        assert_eq!(full.delta_bits, 8);
        assert_eq!(full.deltas, vec![0, 255]);
    }

    #[test]
    fn bd_encode_rejects_empty_row() {
        assert!(matches!(
            bd_encode_row(&[]).unwrap_err(),
            Error::InvalidArgument(_)
        ));
    }

    #[test]
    fn bd_write_row_bit_layout() {
        let mut w = BitWriter::new();
        bd_write_row(
            &mut w,
            &RowRecord {
                delta_bits: 2,
                base: 12,
                deltas: vec![0, 3, 0, 1],
            },
        );
        // 0010 00001100 00 11 00 01, 20 bits total.
        assert_eq!(w.bit_len(), 20);
        assert_eq!(w.finish(), vec![0x20, 0xC3, 0x10]);
    }

    #[test]
    fn bd_write_row_minimal_width() {
        let mut w = BitWriter::new();
        bd_write_row(
            &mut w,
            &RowRecord {
                delta_bits: 1,
                base: 0,
                deltas: vec![0, 0],
            },
        );
        assert_eq!(w.bit_len(), 14);
    }

    #[test]
    fn rows_are_bit_contiguous() {
        let mut w = BitWriter::new();
        let rec = bd_encode_row(&[5, 6, 7]).unwrap();
        bd_write_row(&mut w, &rec);
        let first_end = w.bit_len();
        assert_eq!(first_end, 12 + 3 * 2);
        bd_write_row(&mut w, &rec);
        assert_eq!(w.bit_len(), 2 * first_end);
    }

    #[test]
    fn bd_decode_inverts_write() {
        let mut w = BitWriter::new();
        bd_write_row(&mut w, &bd_encode_row(&[12, 15, 12, 13]).unwrap());
        let bytes = w.finish();
        let mut r = BitReader::new(&bytes);
        assert_eq!(bd_decode_row(&mut r, 4).unwrap(), vec![12, 15, 12, 13]);
        assert_eq!(r.bit_pos(), 20);
    }

    #[test]
    fn bd_decode_uniform_row() {
        let mut w = BitWriter::new();
        bd_write_row(
            &mut w,
            &RowRecord {
                delta_bits: 1,
                base: 7,
                deltas: vec![0, 0, 0],
            },
        );
        let bytes = w.finish();
        assert_eq!(
            bd_decode_row(&mut BitReader::new(&bytes), 3).unwrap(),
            vec![7, 7, 7]
        );
    }

    #[test]
    fn bd_decode_rejects_bad_delta_width() {
        // k = 0.
        let zero = [0x00u8, 0x00];
        assert!(matches!(
            bd_decode_row(&mut BitReader::new(&zero), 1).unwrap_err(),
            Error::CorruptStream(_)
        ));
        // k = 9.
        let nine = [0b1001_0000u8, 0x00, 0x00];
        assert!(matches!(
            bd_decode_row(&mut BitReader::new(&nine), 1).unwrap_err(),
            Error::CorruptStream(_)
        ));
    }

    #[test]
    fn bd_decode_detects_truncation() {
        let mut w = BitWriter::new();
        bd_write_row(&mut w, &bd_encode_row(&[0, 255, 3, 9]).unwrap());
        let bytes = w.finish();
        let cut = &bytes[..bytes.len() - 2];
        assert!(matches!(
            bd_decode_row(&mut BitReader::new(cut), 4).unwrap_err(),
            Error::TruncatedStream(_)
        ));
    }

    #[test]
    fn pixelwise_row_decode_matches_scalar() {
        let mut w = BitWriter::new();
        let rows: [&[u8]; 3] = [&[0, 255, 128, 1], &[9, 9, 9, 9], &[200, 201, 203, 202]];
        for row in rows {
            bd_write_row(&mut w, &bd_encode_row(row).unwrap());
        }
        let bytes = w.finish();
        let mut pos_a = 0;
        let mut pos_b = 0;
        for row in rows {
            let mut a = vec![0u8; 4];
            let mut b = vec![0u8; 4];
            pos_a = bd_decode_row_scalar_into(&bytes, pos_a, &mut a).unwrap();
            pos_b = bd_decode_row_pixelwise_into(&bytes, pos_b, &mut b).unwrap();
            assert_eq!(a, row);
            assert_eq!(b, row);
            assert_eq!(pos_a, pos_b);
        }
    }

    #[test]
    fn encode_patch_size_examples() {
        // Two rows x (4 + 8 + 2x1) bits = 28 bits -> 4 bytes.
        let zero = plane(2, 2, &[0, 0, 0, 0]);
        assert_eq!(encode_patch(&zero).unwrap().len(), 4);

        // 13 bits -> 2 bytes: k=1, base=200, one zero delta.
        let single = plane(1, 1, &[200]);
        assert_eq!(encode_patch(&single).unwrap(), vec![0x1C, 0x80]);
    }

    #[test]
    fn encode_patch_rejects_oversize() {
        let p = PixelPlane::zeroed(256, 1).unwrap();
        assert!(matches!(
            encode_patch(&p).unwrap_err(),
            Error::InvalidArgument(_)
        ));
        assert!(matches!(
            decode_patch(&[0, 0], 0, 1).unwrap_err(),
            Error::InvalidArgument(_)
        ));
    }

    #[test]
    fn decode_recovers_filter_narrative() {
        let p = plane(3, 2, &[65, 65, 65, 74, 74, 74]);
        let bytes = encode_patch(&p).unwrap();
        assert_eq!(decode_patch(&bytes, 3, 2).unwrap(), p);
    }

    #[test]
    fn decode_all_zero_patch() {
        let p = PixelPlane::zeroed(5, 4).unwrap();
        let bytes = encode_patch(&p).unwrap();
        assert_eq!(decode_patch(&bytes, 5, 4).unwrap(), p);
    }

    #[test]
    fn full_size_random_patch_roundtrips() {
        use rand_chacha::rand_core::{RngCore, SeedableRng};
        let mut data = vec![0u8; 128 * 128];
        rand_chacha::ChaCha8Rng::seed_from_u64(17).fill_bytes(&mut data);
        let p = plane(128, 128, &data);
        let bytes = encode_patch(&p).unwrap();
        assert_eq!(decode_patch(&bytes, 128, 128).unwrap(), p);
    }

    #[test]
    fn encoded_length_matches_row_record_sum() {
        let data: Vec<u8> = (0..64u32).map(|i| (i * 37 % 256) as u8).collect();
        let p = plane(8, 8, &data);
        let residual = paeth_filter(&p);
        let bits: usize = (0..8)
            .map(|y| {
                let rec = bd_encode_row(residual.row(y)).unwrap();
                12 + rec.delta_bits as usize * 8
            })
            .sum();
        assert_eq!(encode_patch(&p).unwrap().len(), bits.div_ceil(8));
    }
}
