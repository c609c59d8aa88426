//! Benchmark harness: synthetic image generation, compression-ratio tables,
//! and the three-stage Load/Decode/Compute pipeline with bottleneck
//! attribution.

mod pipeline;
mod ratio;
mod synth;

pub use pipeline::{
    pipeline_run, PipelineConfig, PipelineFormat, PipelineReport, Stage, StageStats,
};
pub use ratio::{
    ratio_report, ratio_rows_for_images, ratio_rows_to_csv, RatioFormat, RatioReport, RatioRow,
};
pub use synth::{synth_image, SynthKind, SynthSpec};
