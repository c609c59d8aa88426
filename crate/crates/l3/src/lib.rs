//! L3 is a lossless 8-bit RGB image format built for data-parallel decoding:
//! each channel plane is tiled into independent patches, every patch is
//! filtered against its previous row only, and each row is bit-packed with a
//! base-delta scheme whose fields sit at computable offsets.
//!
//! The crate provides the patch codec, the container format, a sequential
//! reference decoder, a patch-parallel decoder, PPM adapters, and a
//! benchmark harness for compression ratios and Load/Decode/Compute
//! pipeline analysis.

pub mod adapters;
pub mod bench;
pub mod bitio;
pub mod codec;
pub mod container;
mod error;
pub mod parallel;

pub use codec::{DecodeModes, PixelPlane};
pub use container::{decode_image, encode_image, Channel, RawImage};
pub use error::{Error, Result};
pub use parallel::{decode_batch, decode_image_parallel, DecodeOptions};
