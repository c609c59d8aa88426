//! Deterministic synthetic test images.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::codec::PixelPlane;
use crate::container::RawImage;
use crate::error::Result;

/// Kind of synthetic image.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SynthKind {
    /// Every sample drawn uniformly from 0..=255.
    Random,
    /// Every sample zero.
    Black,
}

impl std::fmt::Display for SynthKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SynthKind::Random => "random",
            SynthKind::Black => "black",
        })
    }
}

/// Recipe for a synthetic image; generation is deterministic in all fields.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SynthSpec {
    pub kind: SynthKind,
    pub width: usize,
    pub height: usize,
    /// Stream seed; ignored for the black kind.
    pub seed: u64,
}

/// Generate the image described by `spec`. Random planes are filled in
/// channel order R, G, B from one seeded stream, so a given spec always
/// produces identical bytes on every platform.
pub fn synth_image(spec: &SynthSpec) -> Result<RawImage> {
    let pixels = spec.width * spec.height;
    let planes: [Vec<u8>; 3] = match spec.kind {
        SynthKind::Black => [vec![0; pixels], vec![0; pixels], vec![0; pixels]],
        SynthKind::Random => {
            let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
            [(), (), ()].map(|()| {
                let mut plane = vec![0u8; pixels];
                rng.fill_bytes(&mut plane);
                plane
            })
        }
    };
    let [r, g, b] = planes;
    RawImage::new([
        PixelPlane::new(spec.width, spec.height, r)?,
        PixelPlane::new(spec.width, spec.height, g)?,
        PixelPlane::new(spec.width, spec.height, b)?,
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::container::Channel;

    #[test]
    fn black_is_all_zero() {
        let image = synth_image(&SynthSpec {
            kind: SynthKind::Black,
            width: 2,
            height: 2,
            seed: 0,
        })
        .unwrap();
        let zeros: usize = Channel::ALL
            .into_iter()
            .map(|ch| image.plane(ch).data().iter().filter(|&&b| b == 0).count())
            .sum();
        assert_eq!(zeros, 12);
    }

    #[test]
    fn same_seed_same_image() {
        let spec = SynthSpec {
            kind: SynthKind::Random,
            width: 17,
            height: 9,
            seed: 42,
        };
        assert_eq!(synth_image(&spec).unwrap(), synth_image(&spec).unwrap());
        let other = SynthSpec { seed: 43, ..spec };
        assert_ne!(synth_image(&spec).unwrap(), synth_image(&other).unwrap());
    }

    #[test]
    fn random_fhd_mean_is_near_center() {
        let image = synth_image(&SynthSpec {
            kind: SynthKind::Random,
            width: 1920,
            height: 1080,
            seed: 7,
        })
        .unwrap();
        let (sum, count) = Channel::ALL.into_iter().fold((0u64, 0u64), |acc, ch| {
            let data = image.plane(ch).data();
            (
                acc.0 + data.iter().map(|&b| u64::from(b)).sum::<u64>(),
                acc.1 + data.len() as u64,
            )
        });
        let mean = sum as f64 / count as f64;
        assert!((126.0..=129.0).contains(&mean), "mean {mean}");
    }
}
