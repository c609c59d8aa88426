//! L3 container: header layout, patch grid, and the sequential whole-image
//! encode/decode reference paths.
//!
//! File layout (multi-byte integers little-endian):
//!
//! ```text
//! magic       4 bytes   "L3IF"
//! width       u32
//! height      u32
//! patch_size  u8        N
//! offsets     3 x P x u32   byte offsets into the data section, channels in
//!                           R,G,B order, patches row-major; P = ceil(w/N) * ceil(h/N)
//! data        encoded patches, each byte-aligned, channel R then G then B
//! ```
//!
//! Offsets are relative to the start of the data section, which immediately
//! follows the third offset array. A patch's length is implied by the next
//! offset (crossing into the next channel's first offset at a channel
//! boundary) or by the end of the data section for the very last patch.

use crate::codec::{decode_patch, encode_patch, PixelPlane};
use crate::error::{Error, Result};

/// File type signature.
pub const MAGIC: [u8; 4] = *b"L3IF";

/// Fixed header bytes before the offset arrays: magic + width + height + N.
pub const FIXED_HEADER_LEN: usize = 13;

const HD_PIXELS: usize = 1080 * 720;
const FHD_PIXELS: usize = 1920 * 1080;

/// Color channel, in file order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Channel {
    R,
    G,
    B,
}

impl Channel {
    pub const ALL: [Channel; 3] = [Channel::R, Channel::G, Channel::B];

    pub fn index(self) -> usize {
        match self {
            Channel::R => 0,
            Channel::G => 1,
            Channel::B => 2,
        }
    }
}

impl std::fmt::Display for Channel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Channel::R => "R",
            Channel::G => "G",
            Channel::B => "B",
        })
    }
}

/// Rectangle addressing one decode unit within a channel plane.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PatchRect {
    pub x0: usize,
    pub y0: usize,
    pub width: usize,
    pub height: usize,
}

/// A planar 3-channel 8-bit image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawImage {
    width: usize,
    height: usize,
    planes: [PixelPlane; 3],
}

impl RawImage {
    pub fn new(planes: [PixelPlane; 3]) -> Result<Self> {
        let width = planes[0].width();
        let height = planes[0].height();
        if planes
            .iter()
            .any(|p| p.width() != width || p.height() != height)
        {
            return Err(Error::InvalidArgument(
                "channel planes disagree on dimensions".into(),
            ));
        }
        if width > u32::MAX as usize || height > u32::MAX as usize {
            return Err(Error::InvalidArgument(
                "image dimensions exceed 32 bits".into(),
            ));
        }
        Ok(Self {
            width,
            height,
            planes,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn plane(&self, channel: Channel) -> &PixelPlane {
        &self.planes[channel.index()]
    }

    /// Uncompressed size: width x height x 3 channels.
    pub fn raw_byte_size(&self) -> usize {
        self.width * self.height * 3
    }
}

/// Parsed L3 header.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct L3Header {
    pub width: u32,
    pub height: u32,
    pub patch_size: u8,
    /// Per-channel data-section offsets, R,G,B, one entry per patch.
    pub offsets: [Vec<u32>; 3],
}

impl L3Header {
    /// Patch grid as (columns, rows).
    pub fn grid(&self) -> (usize, usize) {
        let n = self.patch_size as usize;
        (
            (self.width as usize).div_ceil(n),
            (self.height as usize).div_ceil(n),
        )
    }

    pub fn patches_per_channel(&self) -> usize {
        let (cols, rows) = self.grid();
        cols * rows
    }

    /// Serialized header length in bytes: 13 + 12P.
    pub fn byte_len(&self) -> usize {
        FIXED_HEADER_LEN + 12 * self.patches_per_channel()
    }

    /// Byte range of one patch within the data section.
    pub fn patch_range(&self, channel: Channel, index: usize, data_len: usize) -> (usize, usize) {
        let start = self.offsets[channel.index()][index] as usize;
        let per_channel = self.patches_per_channel();
        let end = if index + 1 < per_channel {
            self.offsets[channel.index()][index + 1] as usize
        } else {
            match channel {
                Channel::R => self.offsets[1][0] as usize,
                Channel::G => self.offsets[2][0] as usize,
                Channel::B => data_len,
            }
        };
        (start, end)
    }
}

/// Pick the patch size from the image area: 32 below HD, 64 from HD up to
/// FHD, 128 from FHD upward.
pub fn choose_patch_size(width: usize, height: usize) -> u8 {
    let area = width * height;
    if area < HD_PIXELS {
        32
    } else if area < FHD_PIXELS {
        64
    } else {
        128
    }
}

/// Split a plane into the row-major patch grid; interior patches are NxN,
/// right/bottom edges truncated to the remainder.
pub fn partition(width: usize, height: usize, patch_size: usize) -> Vec<PatchRect> {
    assert!(patch_size >= 1, "patch size must be at least 1");
    let mut rects = Vec::with_capacity(width.div_ceil(patch_size) * height.div_ceil(patch_size));
    for y0 in (0..height).step_by(patch_size) {
        for x0 in (0..width).step_by(patch_size) {
            rects.push(PatchRect {
                x0,
                y0,
                width: patch_size.min(width - x0),
                height: patch_size.min(height - y0),
            });
        }
    }
    rects
}

fn extract_patch(plane: &PixelPlane, rect: &PatchRect) -> PixelPlane {
    let mut data = Vec::with_capacity(rect.width * rect.height);
    for y in rect.y0..rect.y0 + rect.height {
        data.extend_from_slice(&plane.row(y)[rect.x0..rect.x0 + rect.width]);
    }
    PixelPlane::new(rect.width, rect.height, data).expect("rect within plane")
}

/// Serialize a header to bytes. The inverse of [`parse_header`].
pub fn serialize_header(header: &L3Header) -> Vec<u8> {
    let mut out = Vec::with_capacity(header.byte_len());
    out.extend_from_slice(&MAGIC);
    out.extend_from_slice(&header.width.to_le_bytes());
    out.extend_from_slice(&header.height.to_le_bytes());
    out.push(header.patch_size);
    for channel in &header.offsets {
        for &offset in channel {
            out.extend_from_slice(&offset.to_le_bytes());
        }
    }
    out
}

fn read_u32_le(bytes: &[u8], at: usize) -> u32 {
    u32::from_le_bytes(bytes[at..at + 4].try_into().unwrap())
}

/// Parse and validate the header of a complete L3 file.
///
/// Validates the magic, nonzero dimensions and patch size, header length,
/// and the offset tables: the flattened R,G,B offset sequence must be
/// strictly increasing, start at 0, and stay inside the data section.
pub fn parse_header(bytes: &[u8]) -> Result<L3Header> {
    if bytes.len() < 4 || bytes[..4] != MAGIC {
        let found = bytes.get(..4).unwrap_or(bytes);
        return Err(Error::UnrecognizedFormat(format!(
            "expected magic {MAGIC:?}, found {found:?}"
        )));
    }
    if bytes.len() < FIXED_HEADER_LEN {
        return Err(Error::CorruptHeader(format!(
            "fixed header needs {FIXED_HEADER_LEN} bytes, file has {}",
            bytes.len()
        )));
    }
    let width = read_u32_le(bytes, 4);
    let height = read_u32_le(bytes, 8);
    let patch_size = bytes[12];
    if width == 0 || height == 0 {
        return Err(Error::CorruptHeader(format!(
            "zero dimension: {width}x{height}"
        )));
    }
    if patch_size == 0 {
        return Err(Error::CorruptHeader("patch size 0".into()));
    }

    let n = u64::from(patch_size);
    let cols = (u64::from(width)).div_ceil(n);
    let rows = (u64::from(height)).div_ceil(n);
    let per_channel = cols
        .checked_mul(rows)
        .ok_or_else(|| Error::CorruptHeader("patch count overflows".into()))?;
    let header_len = (FIXED_HEADER_LEN as u64)
        .checked_add(12 * per_channel)
        .filter(|&len| len <= bytes.len() as u64)
        .ok_or_else(|| {
            Error::CorruptHeader(format!(
                "offset tables need {} entries but the file holds {} bytes",
                3 * per_channel,
                bytes.len()
            ))
        })?;
    let per_channel = per_channel as usize;
    let data_len = bytes.len() - header_len as usize;

    let mut offsets: [Vec<u32>; 3] = [Vec::new(), Vec::new(), Vec::new()];
    let mut cursor = FIXED_HEADER_LEN;
    let mut prev: Option<u32> = None;
    for (ci, table) in offsets.iter_mut().enumerate() {
        table.reserve_exact(per_channel);
        for pi in 0..per_channel {
            let offset = read_u32_le(bytes, cursor);
            cursor += 4;
            if ci == 0 && pi == 0 && offset != 0 {
                return Err(Error::CorruptHeader(format!(
                    "first patch offset must be 0, found {offset}"
                )));
            }
            if let Some(p) = prev {
                if offset <= p {
                    return Err(Error::CorruptHeader(format!(
                        "offsets not strictly increasing: {offset} after {p} (channel {}, patch {pi})",
                        Channel::ALL[ci]
                    )));
                }
            }
            if offset as u64 >= data_len as u64 {
                return Err(Error::CorruptHeader(format!(
                    "offset {offset} beyond data section of {data_len} bytes (channel {}, patch {pi})",
                    Channel::ALL[ci]
                )));
            }
            prev = Some(offset);
            table.push(offset);
        }
    }

    Ok(L3Header {
        width,
        height,
        patch_size,
        offsets,
    })
}

/// Encode a planar image into a complete L3 file.
///
/// `patch_size` overrides the resolution policy when given. Deterministic:
/// identical input and patch size yield identical bytes.
pub fn encode_image(image: &RawImage, patch_size: Option<u8>) -> Result<Vec<u8>> {
    let n = match patch_size {
        Some(0) => return Err(Error::InvalidArgument("patch size must be nonzero".into())),
        Some(n) => n,
        None => choose_patch_size(image.width(), image.height()),
    };
    let rects = partition(image.width(), image.height(), n as usize);

    let mut data = Vec::new();
    let mut offsets: [Vec<u32>; 3] = [Vec::new(), Vec::new(), Vec::new()];
    for channel in Channel::ALL {
        let plane = image.plane(channel);
        let table = &mut offsets[channel.index()];
        table.reserve_exact(rects.len());
        for rect in &rects {
            let offset = u32::try_from(data.len()).map_err(|_| {
                Error::InvalidArgument("image too large for 32-bit patch offsets".into())
            })?;
            table.push(offset);
            data.extend_from_slice(&encode_patch(&extract_patch(plane, rect))?);
        }
    }

    let header = L3Header {
        width: image.width() as u32,
        height: image.height() as u32,
        patch_size: n,
        offsets,
    };
    let mut out = serialize_header(&header);
    out.extend_from_slice(&data);
    Ok(out)
}

/// Sequential reference decode of a complete L3 file. Exact inverse of
/// [`encode_image`].
pub fn decode_image(bytes: &[u8]) -> Result<RawImage> {
    let header = parse_header(bytes)?;
    let data = &bytes[header.byte_len()..];
    let width = header.width as usize;
    let height = header.height as usize;
    let rects = partition(width, height, header.patch_size as usize);

    let mut planes = Vec::with_capacity(3);
    for channel in Channel::ALL {
        let mut plane = vec![0u8; width * height];
        for (index, rect) in rects.iter().enumerate() {
            let (start, end) = header.patch_range(channel, index, data.len());
            let patch =
                decode_patch(&data[start..end], rect.width, rect.height).map_err(|source| {
                    Error::PatchDecode {
                        channel,
                        index,
                        source: Box::new(source),
                    }
                })?;
            for y in 0..rect.height {
                let dst = (rect.y0 + y) * width + rect.x0;
                plane[dst..dst + rect.width].copy_from_slice(patch.row(y));
            }
        }
        planes.push(PixelPlane::new(width, height, plane)?);
    }
    let planes: [PixelPlane; 3] = planes.try_into().expect("three channels");
    RawImage::new(planes)
}
