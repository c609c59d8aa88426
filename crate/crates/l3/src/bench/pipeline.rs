//! Three-stage Load/Decode/Compute pipeline with per-stage timing and
//! bottleneck attribution.
//!
//! The stages run concurrently, linked by bounded hand-off buffers of depth
//! `prefetch`; a full buffer blocks the producer. Compute is a calibrated
//! busy loop standing in for gradient work, so the pipeline math is
//! reproducible on any host. Steady-state measurement starts after one
//! warm-up batch (pipeline fill).

use std::path::PathBuf;
use std::sync::mpsc;
use std::time::{Duration, Instant};

use crate::adapters::{planarize, read_png};
use crate::container::RawImage;
use crate::error::{Error, Result};
use crate::parallel::{decode_batch, DecodeOptions};

const WARMUP_BATCHES: usize = 1;

/// On-disk format consumed by the Decode stage.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PipelineFormat {
    L3,
    PngBaseline,
}

impl std::str::FromStr for PipelineFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "l3" => Ok(PipelineFormat::L3),
            "png" | "png-baseline" => Ok(PipelineFormat::PngBaseline),
            other => Err(Error::InvalidArgument(format!(
                "unknown pipeline format {other:?} (expected l3 or png-baseline)"
            ))),
        }
    }
}

/// Pipeline run parameters. All counts must be at least 1.
#[derive(Debug, Clone)]
pub struct PipelineConfig {
    /// Pre-encoded input files; batches cycle through them in order.
    pub inputs: Vec<PathBuf>,
    /// Images per batch.
    pub batch_size: usize,
    pub format: PipelineFormat,
    /// Worker-pool size for the Decode stage.
    pub decode_workers: usize,
    /// Busy-work per batch in the Compute stage, in milliseconds.
    pub compute_ms: f64,
    /// Depth of the bounded buffers between stages, in batches.
    pub prefetch: usize,
    /// Steady-state batches to measure (the warm-up batch is extra).
    pub iterations: usize,
}

/// Pipeline stages in execution order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Load,
    Decode,
    Compute,
}

impl std::fmt::Display for Stage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Stage::Load => "Load",
            Stage::Decode => "Decode",
            Stage::Compute => "Compute",
        })
    }
}

/// Per-batch timing summary of one stage, in milliseconds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StageStats {
    pub mean_ms: f64,
    pub median_ms: f64,
    pub max_ms: f64,
}

impl StageStats {
    fn from_durations(times: &[Duration]) -> Self {
        let mut ms: Vec<f64> = times.iter().map(|d| d.as_secs_f64() * 1e3).collect();
        ms.sort_by(|a, b| a.total_cmp(b));
        let mean_ms = ms.iter().sum::<f64>() / ms.len() as f64;
        let median_ms = ms[ms.len() / 2];
        let max_ms = *ms.last().unwrap();
        Self {
            mean_ms,
            median_ms,
            max_ms,
        }
    }
}

/// Result of a pipeline run over the steady-state window.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineReport {
    pub load: StageStats,
    pub decode: StageStats,
    pub compute: StageStats,
    /// Batches per second, measured at the Compute stage.
    pub iterations_per_sec: f64,
    /// Stage with the largest mean batch time.
    pub bottleneck: Stage,
    /// Steady-state batches behind the statistics.
    pub batches_measured: usize,
}

impl PipelineReport {
    pub fn stage(&self, stage: Stage) -> &StageStats {
        match stage {
            Stage::Load => &self.load,
            Stage::Decode => &self.decode,
            Stage::Compute => &self.compute,
        }
    }

    /// Mean stage times divided by the mean Compute time.
    pub fn normalized_to_compute(&self) -> [(Stage, f64); 3] {
        [Stage::Load, Stage::Decode, Stage::Compute]
            .map(|s| (s, self.stage(s).mean_ms / self.compute.mean_ms))
    }
}

fn busy_spin(duration: Duration) {
    let deadline = Instant::now() + duration;
    while Instant::now() < deadline {
        std::hint::spin_loop();
    }
}

fn decode_stage(
    files: &[Vec<u8>],
    format: PipelineFormat,
    options: &DecodeOptions,
) -> Result<Vec<RawImage>> {
    match format {
        PipelineFormat::L3 => {
            let refs: Vec<&[u8]> = files.iter().map(|f| f.as_slice()).collect();
            decode_batch(&refs, options).into_iter().collect()
        }
        PipelineFormat::PngBaseline => files
            .iter()
            .map(|bytes| Ok(planarize(&read_png(bytes)?)))
            .collect(),
    }
}

fn validate(config: &PipelineConfig) -> Result<()> {
    if config.inputs.is_empty() {
        return Err(Error::InvalidArgument("no pipeline inputs".into()));
    }
    for (name, value) in [
        ("batch_size", config.batch_size),
        ("decode_workers", config.decode_workers),
        ("prefetch", config.prefetch),
        ("iterations", config.iterations),
    ] {
        if value == 0 {
            return Err(Error::InvalidArgument(format!("{name} must be at least 1")));
        }
    }
    if !config.compute_ms.is_finite() || config.compute_ms < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "compute_ms must be a non-negative number, got {}",
            config.compute_ms
        )));
    }
    Ok(())
}

/// Run the pipeline: Load reads files into memory, Decode turns bytes into
/// images, Compute spins for the configured time. Stage times are captured
/// around the work itself, excluding time blocked on the hand-off buffers.
pub fn pipeline_run(config: &PipelineConfig) -> Result<PipelineReport> {
    validate(config)?;
    let total_batches = config.iterations + WARMUP_BATCHES;
    let compute_duration = Duration::from_secs_f64(config.compute_ms / 1e3);
    let options = DecodeOptions {
        workers: config.decode_workers,
        ..DecodeOptions::default()
    };

    let (loaded_tx, loaded_rx) = mpsc::sync_channel::<Vec<Vec<u8>>>(config.prefetch);
    let (decoded_tx, decoded_rx) = mpsc::sync_channel::<Vec<RawImage>>(config.prefetch);

    std::thread::scope(|scope| {
        let load_handle = scope.spawn(move || -> Result<Vec<Duration>> {
            let mut times = Vec::with_capacity(total_batches);
            for batch in 0..total_batches {
                let started = Instant::now();
                let mut files = Vec::with_capacity(config.batch_size);
                for slot in 0..config.batch_size {
                    let path =
                        &config.inputs[(batch * config.batch_size + slot) % config.inputs.len()];
                    files.push(std::fs::read(path).map_err(|e| Error::io(path, e))?);
                }
                times.push(started.elapsed());
                if loaded_tx.send(files).is_err() {
                    break; // downstream aborted
                }
            }
            Ok(times)
        });

        let decode_handle = scope.spawn(move || -> Result<Vec<Duration>> {
            let mut times = Vec::with_capacity(total_batches);
            while let Ok(files) = loaded_rx.recv() {
                let started = Instant::now();
                let images = decode_stage(&files, config.format, &options)?;
                times.push(started.elapsed());
                if decoded_tx.send(images).is_err() {
                    break;
                }
            }
            Ok(times)
        });

        let mut compute_times = Vec::with_capacity(total_batches);
        let mut completions = Vec::with_capacity(total_batches);
        while let Ok(images) = decoded_rx.recv() {
            let started = Instant::now();
            busy_spin(compute_duration);
            drop(images);
            compute_times.push(started.elapsed());
            completions.push(Instant::now());
        }

        let load_times = load_handle.join().expect("load stage panicked")?;
        let decode_times = decode_handle.join().expect("decode stage panicked")?;

        debug_assert_eq!(load_times.len(), total_batches);
        debug_assert_eq!(decode_times.len(), total_batches);
        debug_assert_eq!(compute_times.len(), total_batches);

        let load = StageStats::from_durations(&load_times[WARMUP_BATCHES..]);
        let decode = StageStats::from_durations(&decode_times[WARMUP_BATCHES..]);
        let compute = StageStats::from_durations(&compute_times[WARMUP_BATCHES..]);

        let window = completions[completions.len() - 1] - completions[WARMUP_BATCHES - 1];
        let window = window.max(Duration::from_nanos(1));
        let iterations_per_sec = config.iterations as f64 / window.as_secs_f64();

        let bottleneck = [Stage::Load, Stage::Decode, Stage::Compute]
            .into_iter()
            .zip([load.mean_ms, decode.mean_ms, compute.mean_ms])
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .map(|(stage, _)| stage)
            .unwrap();

        Ok(PipelineReport {
            load,
            decode,
            compute,
            iterations_per_sec,
            bottleneck,
            batches_measured: config.iterations,
        })
    })
}
