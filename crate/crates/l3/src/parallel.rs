//! Patch-parallel decoding over a bounded worker pool.
//!
//! Every patch of every channel becomes one job. Workers claim jobs from a
//! shared queue; each job writes only its own disjoint rows of the output
//! plane, so completion order never affects the result. Jobs from a whole
//! batch of files share one pool.

use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::Mutex;

use crate::codec::{decode_patch_into, DecodeModes, PixelPlane};
use crate::container::{parse_header, partition, Channel, L3Header, PatchRect, RawImage};
use crate::error::{Error, Result};

/// Worker-pool size and inner-loop selection for the parallel decoder.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DecodeOptions {
    /// Pool size; at least 1.
    pub workers: usize,
    /// Inner-loop selection, forwarded to the patch decoder.
    pub modes: DecodeModes,
}

impl Default for DecodeOptions {
    fn default() -> Self {
        Self {
            workers: default_workers(),
            modes: DecodeModes::default(),
        }
    }
}

impl DecodeOptions {
    pub fn with_workers(workers: usize) -> Self {
        Self {
            workers,
            ..Self::default()
        }
    }
}

/// Available hardware parallelism, falling back to 1.
pub fn default_workers() -> usize {
    std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
}

struct FilePlan<'f> {
    header: L3Header,
    rects: Vec<PatchRect>,
    data: &'f [u8],
    planes: [Vec<u8>; 3],
}

struct Job<'a> {
    file: usize,
    /// Channel-major position within the file, for deterministic error picking.
    seq: usize,
    channel: Channel,
    index: usize,
    input: &'a [u8],
    width: usize,
    height: usize,
    rows: Vec<&'a mut [u8]>,
}

struct FileState {
    aborted: AtomicBool,
    error: Mutex<Option<(usize, Error)>>,
}

impl FileState {
    fn new() -> Self {
        Self {
            aborted: AtomicBool::new(false),
            error: Mutex::new(None),
        }
    }
}

/// Hand out each patch's rows of a plane as disjoint mutable slices.
///
/// `rects` must be the row-major partition of a `width`-wide plane with
/// patch size `patch_size`; the returned vector is indexed like `rects`.
fn split_plane_rows<'a>(
    plane: &'a mut [u8],
    width: usize,
    patch_size: usize,
    rects: &[PatchRect],
) -> Vec<Vec<&'a mut [u8]>> {
    let cols = width.div_ceil(patch_size);
    let mut regions: Vec<Vec<&'a mut [u8]>> =
        rects.iter().map(|r| Vec::with_capacity(r.height)).collect();
    for (y, row) in plane.chunks_mut(width).enumerate() {
        let band = y / patch_size;
        let mut rest = row;
        for column in 0..cols {
            let rect_index = band * cols + column;
            let (segment, tail) = rest.split_at_mut(rects[rect_index].width);
            regions[rect_index].push(segment);
            rest = tail;
        }
    }
    regions
}

fn run_worker(
    jobs: &[Mutex<Option<Job<'_>>>],
    next: &AtomicUsize,
    states: &[FileState],
    modes: DecodeModes,
) {
    loop {
        let claim = next.fetch_add(1, Ordering::Relaxed);
        if claim >= jobs.len() {
            break;
        }
        let Some(mut job) = jobs[claim].lock().unwrap().take() else {
            continue;
        };
        let state = &states[job.file];
        if state.aborted.load(Ordering::Relaxed) {
            continue;
        }
        if let Err(source) =
            decode_patch_into(job.input, job.width, job.height, modes, &mut job.rows)
        {
            let error = Error::PatchDecode {
                channel: job.channel,
                index: job.index,
                source: Box::new(source),
            };
            let mut slot = state.error.lock().unwrap();
            // Keep the error of the earliest patch in file order.
            if slot.as_ref().is_none_or(|(seq, _)| job.seq < *seq) {
                *slot = Some((job.seq, error));
            }
            state.aborted.store(true, Ordering::Relaxed);
        }
    }
}

/// Decode a batch of L3 files with one shared worker pool.
///
/// Results come back in input order. A failure in one file cancels that
/// file's outstanding patches only; other files still complete.
pub fn decode_batch(files: &[&[u8]], options: &DecodeOptions) -> Vec<Result<RawImage>> {
    let mut plans: Vec<Result<FilePlan<'_>>> = files
        .iter()
        .map(|bytes| {
            let header = parse_header(bytes)?;
            let width = header.width as usize;
            let height = header.height as usize;
            let rects = partition(width, height, header.patch_size as usize);
            let data = &bytes[header.byte_len()..];
            Ok(FilePlan {
                header,
                rects,
                data,
                planes: [
                    vec![0u8; width * height],
                    vec![0u8; width * height],
                    vec![0u8; width * height],
                ],
            })
        })
        .collect();

    let states: Vec<FileState> = (0..files.len()).map(|_| FileState::new()).collect();

    {
        let mut jobs: Vec<Mutex<Option<Job<'_>>>> = Vec::new();
        for (file, plan) in plans.iter_mut().enumerate() {
            let Ok(plan) = plan else { continue };
            let width = plan.header.width as usize;
            let patch_size = plan.header.patch_size as usize;
            let per_channel = plan.rects.len();
            for (ci, plane) in plan.planes.iter_mut().enumerate() {
                let channel = Channel::ALL[ci];
                let regions = split_plane_rows(plane, width, patch_size, &plan.rects);
                for (index, rows) in regions.into_iter().enumerate() {
                    let (start, end) = plan.header.patch_range(channel, index, plan.data.len());
                    let rect = plan.rects[index];
                    jobs.push(Mutex::new(Some(Job {
                        file,
                        seq: ci * per_channel + index,
                        channel,
                        index,
                        input: &plan.data[start..end],
                        width: rect.width,
                        height: rect.height,
                        rows,
                    })));
                }
            }
        }

        if !jobs.is_empty() {
            let workers = options.workers.max(1).min(jobs.len());
            let next = AtomicUsize::new(0);
            let modes = options.modes;
            std::thread::scope(|scope| {
                let jobs = &jobs;
                let next = &next;
                let states = &states;
                for _ in 0..workers {
                    scope.spawn(move || run_worker(jobs, next, states, modes));
                }
            });
        }
    }

    plans
        .into_iter()
        .zip(states)
        .map(|(plan, state)| {
            let plan = plan?;
            if let Some((_, error)) = state.error.into_inner().unwrap() {
                return Err(error);
            }
            let width = plan.header.width as usize;
            let height = plan.header.height as usize;
            let [r, g, b] = plan.planes;
            RawImage::new([
                PixelPlane::new(width, height, r)?,
                PixelPlane::new(width, height, g)?,
                PixelPlane::new(width, height, b)?,
            ])
        })
        .collect()
}

/// Decode one L3 file with patch-level parallelism.
///
/// Bit-identical to the sequential [`crate::container::decode_image`] for
/// every worker count and mode combination.
pub fn decode_image_parallel(bytes: &[u8], options: &DecodeOptions) -> Result<RawImage> {
    decode_batch(&[bytes], options)
        .pop()
        .expect("one result per input")
}
