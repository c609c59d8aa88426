//! `l3` command line: encode/decode/inspect L3 files, generate synthetic
//! images, and run the compression-ratio and pipeline benchmarks.
//!
//! Exit codes: 0 success, 2 usage error, 3 unsupported or unrecognized
//! input, 4 corrupt or truncated stream, 1 anything else.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use l3::adapters::{interleave, planarize, read_ppm, write_png, write_ppm};
use l3::bench::{
    pipeline_run, ratio_report, ratio_rows_to_csv, synth_image, PipelineConfig, PipelineFormat,
    PipelineReport, RatioFormat, RatioReport, SynthKind, SynthSpec,
};
use l3::container::{parse_header, Channel, FIXED_HEADER_LEN, MAGIC};
use l3::parallel::{decode_image_parallel, default_workers, DecodeOptions};
use l3::{encode_image, DecodeModes, Error};

/// Environment variable overriding the default decode worker count.
const WORKERS_ENV: &str = "L3_WORKERS";

#[derive(Parser)]
#[command(name = "l3", version, about = "L3 lossless image format tools")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Encode a PPM image into an L3 file.
    Encode(EncodeArgs),
    /// Decode an L3 file into a PPM image.
    Decode(DecodeArgs),
    /// Print header fields and patch statistics of an L3 file.
    Inspect { input: PathBuf },
    /// Generate a synthetic PPM image.
    Synth(SynthArgs),
    /// Measure compression ratios over a set of images.
    BenchRatio(BenchRatioArgs),
    /// Run the Load/Decode/Compute pipeline benchmark.
    BenchPipeline(BenchPipelineArgs),
}

#[derive(Args)]
struct EncodeArgs {
    /// Input image (.ppm).
    input: PathBuf,
    /// Output L3 file.
    #[arg(long)]
    out: PathBuf,
    /// Patch size 1-255, overriding the resolution policy.
    #[arg(long)]
    patch_size: Option<u8>,
}

#[derive(Clone, Copy, ValueEnum)]
enum PaethMode {
    /// Reconstruct each row as independent per-pixel operations.
    Rowwise,
    /// Plain left-to-right loop.
    Scalar,
}

#[derive(Clone, Copy, ValueEnum)]
enum BdMode {
    /// Extract every delta by absolute bit offset.
    Pixelwise,
    /// Advance a sequential bit cursor.
    Scalar,
}

#[derive(Args)]
struct DecodeArgs {
    /// Input L3 file.
    input: PathBuf,
    /// Output image (.ppm).
    #[arg(long)]
    out: PathBuf,
    /// Worker pool size; defaults to L3_WORKERS or the available cores.
    #[arg(long)]
    workers: Option<usize>,
    /// Inner-loop variant for the filter stage.
    #[arg(long, value_enum, default_value_t = PaethMode::Rowwise)]
    paeth_mode: PaethMode,
    /// Inner-loop variant for the base-delta stage.
    #[arg(long, value_enum, default_value_t = BdMode::Pixelwise)]
    bd_mode: BdMode,
}

#[derive(Args)]
struct SynthArgs {
    /// Image kind.
    #[arg(long, value_enum)]
    kind: SynthKindArg,
    /// Dimensions as WIDTHxHEIGHT, e.g. 1920x1080.
    #[arg(long)]
    size: String,
    /// Seed for the random kind.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output image (.ppm).
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum SynthKindArg {
    Random,
    Black,
}

#[derive(Args)]
struct BenchRatioArgs {
    /// Image files or directories to scan (.ppm, and .png when enabled).
    inputs: Vec<PathBuf>,
    /// Comma-separated formats to measure: l3, png.
    #[arg(long, default_value = "l3")]
    formats: String,
    /// Also write the table as CSV to this path.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct BenchPipelineArgs {
    /// Directory of pre-encoded inputs for the chosen format.
    #[arg(long)]
    input_dir: Option<PathBuf>,
    /// Synthetic input as kind:WxH[:seed] (e.g. random:1920x1080:7),
    /// repeatable; generated and encoded into a temporary directory.
    #[arg(long)]
    synth: Vec<String>,
    /// Plain key = value config file; explicit flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Decode format: l3 or png-baseline. [default: l3]
    #[arg(long)]
    format: Option<String>,
    /// Images per batch. [default: 4]
    #[arg(long)]
    batch_size: Option<usize>,
    /// Compute busy-time per batch in milliseconds. [default: 100]
    #[arg(long)]
    compute_ms: Option<f64>,
    /// Bounded buffer depth between stages, in batches. [default: 2]
    #[arg(long)]
    prefetch: Option<usize>,
    /// Steady-state batches to measure (one warm-up batch is extra). [default: 10]
    #[arg(long)]
    iterations: Option<usize>,
    /// Decode worker pool size; defaults to L3_WORKERS or available cores.
    #[arg(long)]
    workers: Option<usize>,
}

fn main() {
    let cli = Cli::parse();
    if let Err(error) = run(cli.command) {
        eprintln!("error: {error}");
        std::process::exit(exit_code(&error));
    }
}

fn exit_code(error: &Error) -> i32 {
    match error {
        Error::UnsupportedInput(_) | Error::UnrecognizedFormat(_) | Error::FeatureDisabled(_) => 3,
        Error::CorruptHeader(_)
        | Error::CorruptStream(_)
        | Error::TruncatedStream(_)
        | Error::PatchDecode { .. } => 4,
        _ => 1,
    }
}

fn run(command: Command) -> l3::Result<()> {
    match command {
        Command::Encode(args) => encode(args),
        Command::Decode(args) => decode(args),
        Command::Inspect { input } => inspect(&input),
        Command::Synth(args) => synth(args),
        Command::BenchRatio(args) => bench_ratio(args),
        Command::BenchPipeline(args) => bench_pipeline(args),
    }
}

fn read_file(path: &Path) -> l3::Result<Vec<u8>> {
    std::fs::read(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, bytes: &[u8]) -> l3::Result<()> {
    std::fs::write(path, bytes).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

/// Worker count: CLI flag, then L3_WORKERS, then available parallelism.
fn resolve_workers(flag: Option<usize>) -> l3::Result<usize> {
    if let Some(workers) = flag {
        if workers == 0 {
            return Err(Error::InvalidArgument(
                "--workers must be at least 1".into(),
            ));
        }
        return Ok(workers);
    }
    if let Ok(value) = std::env::var(WORKERS_ENV) {
        return value
            .parse::<usize>()
            .ok()
            .filter(|&w| w >= 1)
            .ok_or_else(|| {
                Error::InvalidArgument(format!(
                    "{WORKERS_ENV}={value:?} is not a positive worker count"
                ))
            });
    }
    Ok(default_workers())
}

fn encode(args: EncodeArgs) -> l3::Result<()> {
    if args.patch_size == Some(0) {
        return Err(Error::InvalidArgument("--patch-size must be 1-255".into()));
    }
    let interleaved = read_ppm(&read_file(&args.input)?)?;
    let image = planarize(&interleaved);
    let encoded = encode_image(&image, args.patch_size)?;
    write_file(&args.out, &encoded)?;
    let raw = image.raw_byte_size();
    println!(
        "{} -> {}: {}x{}, {} bytes (ratio {:.4} of {} raw)",
        args.input.display(),
        args.out.display(),
        image.width(),
        image.height(),
        encoded.len(),
        encoded.len() as f64 / raw as f64,
        raw
    );
    Ok(())
}

fn decode(args: DecodeArgs) -> l3::Result<()> {
    let bytes = read_file(&args.input)?;
    let options = DecodeOptions {
        workers: resolve_workers(args.workers)?,
        modes: DecodeModes {
            paeth_rowwise: matches!(args.paeth_mode, PaethMode::Rowwise),
            bd_pixelwise: matches!(args.bd_mode, BdMode::Pixelwise),
        },
    };
    let image = decode_image_parallel(&bytes, &options)?;
    write_file(&args.out, &write_ppm(&interleave(&image)))?;
    println!(
        "{} -> {}: {}x{} ({} workers)",
        args.input.display(),
        args.out.display(),
        image.width(),
        image.height(),
        options.workers
    );
    Ok(())
}

/// Field-by-field header report; returns the first structural error after
/// printing everything that could be checked.
fn inspect(input: &Path) -> l3::Result<()> {
    let bytes = read_file(input)?;

    let magic_ok = bytes.len() >= 4 && bytes[..4] == MAGIC;
    println!(
        "magic: {}",
        if magic_ok {
            "OK (L3IF)".to_string()
        } else {
            format!("BAD (found {:?})", bytes.get(..4).unwrap_or(&bytes))
        }
    );
    if bytes.len() >= FIXED_HEADER_LEN {
        let width = u32::from_le_bytes(bytes[4..8].try_into().unwrap());
        let height = u32::from_le_bytes(bytes[8..12].try_into().unwrap());
        let patch_size = bytes[12];
        println!("dimensions: {width}x{height}");
        println!("patch size: {patch_size}");
        if patch_size > 0 {
            let cols = width.div_ceil(u32::from(patch_size));
            let rows = height.div_ceil(u32::from(patch_size));
            println!(
                "grid: {cols}x{rows} ({} patches/channel)",
                cols as u64 * rows as u64
            );
        }
    } else {
        println!("dimensions: UNREADABLE (file is {} bytes)", bytes.len());
    }

    let header = parse_header(&bytes)?;
    let data_len = bytes.len() - header.byte_len();
    println!(
        "header: {} bytes, data section: {data_len} bytes",
        header.byte_len()
    );

    let per_channel = header.patches_per_channel();
    let mut sizes = Vec::with_capacity(3 * per_channel);
    for channel in Channel::ALL {
        let mut channel_bytes = 0usize;
        for index in 0..per_channel {
            let (start, end) = header.patch_range(channel, index, data_len);
            channel_bytes += end - start;
            sizes.push(end - start);
        }
        println!("channel {channel}: {channel_bytes} bytes");
    }

    let min = *sizes.iter().min().unwrap();
    let max = *sizes.iter().max().unwrap();
    println!(
        "patch size histogram ({} patches, {min}..={max} bytes):",
        sizes.len()
    );
    let buckets = 8usize.min(max - min + 1);
    let bucket_width = (max - min + 1).div_ceil(buckets);
    let mut counts = vec![0usize; buckets];
    for &size in &sizes {
        counts[(size - min) / bucket_width] += 1;
    }
    for (i, count) in counts.iter().enumerate() {
        let lo = min + i * bucket_width;
        let hi = (lo + bucket_width - 1).min(max);
        println!("  {lo:>8}..={hi:<8} {count}");
    }
    println!("sum of patch sizes: {} bytes", sizes.iter().sum::<usize>());
    Ok(())
}

fn parse_size(size: &str) -> l3::Result<(usize, usize)> {
    let err = || Error::InvalidArgument(format!("--size must be WIDTHxHEIGHT, got {size:?}"));
    let (w, h) = size.split_once(['x', 'X']).ok_or_else(err)?;
    let width = w.parse().map_err(|_| err())?;
    let height = h.parse().map_err(|_| err())?;
    if width == 0 || height == 0 {
        return Err(err());
    }
    Ok((width, height))
}

fn synth(args: SynthArgs) -> l3::Result<()> {
    let (width, height) = parse_size(&args.size)?;
    let image = synth_image(&SynthSpec {
        kind: match args.kind {
            SynthKindArg::Random => SynthKind::Random,
            SynthKindArg::Black => SynthKind::Black,
        },
        width,
        height,
        seed: args.seed,
    })?;
    write_file(&args.out, &write_ppm(&interleave(&image)))?;
    println!("wrote {} ({width}x{height})", args.out.display());
    Ok(())
}

/// Expand files and directories into a sorted list of image paths.
fn collect_inputs(inputs: &[PathBuf]) -> l3::Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    for input in inputs {
        if input.is_dir() {
            let entries = std::fs::read_dir(input)
                .map_err(|e| Error::Io(format!("{}: {e}", input.display())))?;
            for entry in entries {
                let path = entry
                    .map_err(|e| Error::Io(format!("{}: {e}", input.display())))?
                    .path();
                if matches!(
                    path.extension().and_then(|e| e.to_str()),
                    Some("ppm") | Some("png") | Some("l3")
                ) {
                    files.push(path);
                }
            }
        } else {
            files.push(input.clone());
        }
    }
    files.sort();
    if files.is_empty() {
        return Err(Error::InvalidArgument("no input files".into()));
    }
    Ok(files)
}

fn bench_ratio(args: BenchRatioArgs) -> l3::Result<()> {
    let formats: Vec<RatioFormat> = args
        .formats
        .split(',')
        .map(|f| f.trim().parse())
        .collect::<l3::Result<_>>()?;
    let inputs: Vec<PathBuf> = collect_inputs(&args.inputs)?
        .into_iter()
        .filter(|p| p.extension().and_then(|e| e.to_str()) != Some("l3"))
        .collect();
    if inputs.is_empty() {
        return Err(Error::InvalidArgument("no image inputs".into()));
    }

    let RatioReport { rows, skipped } = ratio_report(&inputs, &formats);
    for (path, error) in &skipped {
        eprintln!("warning: skipped {}: {error}", path.display());
    }
    if rows.is_empty() {
        return Err(Error::InvalidArgument("no measurable inputs".into()));
    }

    println!(
        "{:<20} {:>12} {:>6} {:>14} {:>8}",
        "name", "raw_bytes", "fmt", "encoded_bytes", "ratio"
    );
    for row in &rows {
        for &(format, encoded) in &row.encoded {
            println!(
                "{:<20} {:>12} {:>6} {:>14} {:>8.4}",
                row.name,
                row.raw_bytes,
                format.to_string(),
                encoded,
                encoded as f64 / row.raw_bytes as f64
            );
        }
        if row.encoded.is_empty() {
            eprintln!("warning: no format measured for {}", row.name);
        }
    }

    if let Some(csv_path) = &args.csv {
        write_file(csv_path, ratio_rows_to_csv(&rows).as_bytes())?;
        println!("csv written to {}", csv_path.display());
    }
    Ok(())
}

fn print_pipeline_report(report: &PipelineReport) {
    println!(
        "pipeline report over {} steady-state batches:",
        report.batches_measured
    );
    println!(
        "  {:<8} {:>10} {:>10} {:>10} {:>10}",
        "stage", "mean ms", "median ms", "max ms", "x compute"
    );
    for (stage, normalized) in report.normalized_to_compute() {
        let stats = report.stage(stage);
        println!(
            "  {:<8} {:>10.3} {:>10.3} {:>10.3} {:>10.3}",
            stage.to_string(),
            stats.mean_ms,
            stats.median_ms,
            stats.max_ms,
            normalized
        );
    }
    println!("throughput: {:.2} iterations/s", report.iterations_per_sec);
    println!("bottleneck: {}", report.bottleneck);
}

const PIPELINE_CONFIG_KEYS: [&str; 8] = [
    "input_dir",
    "synth",
    "format",
    "batch_size",
    "compute_ms",
    "prefetch",
    "iterations",
    "workers",
];

/// Parse `key = value` lines; `#` starts a comment, blank lines are skipped.
fn parse_config_file(path: &Path) -> l3::Result<std::collections::HashMap<String, String>> {
    let text =
        std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let mut values = std::collections::HashMap::new();
    for (number, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::InvalidArgument(format!(
                "{}:{}: expected key = value, got {line:?}",
                path.display(),
                number + 1
            ))
        })?;
        let key = key.trim().to_string();
        if !PIPELINE_CONFIG_KEYS.contains(&key.as_str()) {
            return Err(Error::InvalidArgument(format!(
                "{}:{}: unknown key {key:?}",
                path.display(),
                number + 1
            )));
        }
        values.insert(key, value.trim().to_string());
    }
    Ok(values)
}

/// `kind:WxH[:seed]`, e.g. `random:1920x1080:7` or `black:640x480`.
fn parse_synth_spec(spec: &str) -> l3::Result<SynthSpec> {
    let err =
        || Error::InvalidArgument(format!("synth spec must be kind:WxH[:seed], got {spec:?}"));
    let mut parts = spec.split(':');
    let kind = match parts.next() {
        Some("random") => SynthKind::Random,
        Some("black") => SynthKind::Black,
        _ => return Err(err()),
    };
    let (width, height) = parse_size(parts.next().ok_or_else(err)?)?;
    let seed = match parts.next() {
        Some(s) => s.parse().map_err(|_| err())?,
        None => 0,
    };
    if parts.next().is_some() {
        return Err(err());
    }
    Ok(SynthSpec {
        kind,
        width,
        height,
        seed,
    })
}

fn bench_pipeline(args: BenchPipelineArgs) -> l3::Result<()> {
    let file = match &args.config {
        Some(path) => parse_config_file(path)?,
        None => std::collections::HashMap::new(),
    };
    fn from_file<T: std::str::FromStr>(
        file: &std::collections::HashMap<String, String>,
        key: &str,
    ) -> l3::Result<Option<T>> {
        file.get(key)
            .map(|v| {
                v.parse().map_err(|_| {
                    Error::InvalidArgument(format!("config key {key} has invalid value {v:?}"))
                })
            })
            .transpose()
    }

    let format: PipelineFormat = match args.format.or_else(|| file.get("format").cloned()) {
        Some(value) => value.parse()?,
        None => PipelineFormat::L3,
    };
    let batch_size = args
        .batch_size
        .or(from_file(&file, "batch_size")?)
        .unwrap_or(4);
    let compute_ms = args
        .compute_ms
        .or(from_file(&file, "compute_ms")?)
        .unwrap_or(100.0);
    let prefetch = args.prefetch.or(from_file(&file, "prefetch")?).unwrap_or(2);
    let iterations = args
        .iterations
        .or(from_file(&file, "iterations")?)
        .unwrap_or(10);
    let workers = resolve_workers(args.workers.or(from_file(&file, "workers")?))?;
    let input_dir = args
        .input_dir
        .or_else(|| file.get("input_dir").map(PathBuf::from));
    let synth_specs: Vec<SynthSpec> = if args.synth.is_empty() {
        file.get("synth")
            .map(|list| {
                list.split(',')
                    .map(|s| parse_synth_spec(s.trim()))
                    .collect()
            })
            .transpose()?
            .unwrap_or_default()
    } else {
        args.synth
            .iter()
            .map(|s| parse_synth_spec(s))
            .collect::<l3::Result<_>>()?
    };

    let extension = match format {
        PipelineFormat::L3 => "l3",
        PipelineFormat::PngBaseline => "png",
    };
    // Keeps generated synthetic inputs alive for the duration of the run.
    let mut synth_dir = None;
    let inputs: Vec<PathBuf> = match (input_dir, synth_specs.is_empty()) {
        (Some(_), false) | (None, true) => {
            return Err(Error::InvalidArgument(
                "give exactly one input source: --input-dir or --synth".into(),
            ))
        }
        (Some(dir), true) => {
            let files: Vec<PathBuf> = collect_inputs(std::slice::from_ref(&dir))?
                .into_iter()
                .filter(|p| p.extension().and_then(|e| e.to_str()) == Some(extension))
                .collect();
            if files.is_empty() {
                return Err(Error::InvalidArgument(format!(
                    "no .{extension} files in {}",
                    dir.display()
                )));
            }
            files
        }
        (None, false) => {
            let dir =
                tempfile::tempdir().map_err(|e| Error::Io(format!("creating synth dir: {e}")))?;
            let mut files = Vec::with_capacity(synth_specs.len());
            for (i, spec) in synth_specs.iter().enumerate() {
                let image = synth_image(spec)?;
                let encoded = match format {
                    PipelineFormat::L3 => encode_image(&image, None)?,
                    PipelineFormat::PngBaseline => write_png(&image)?,
                };
                let path = dir.path().join(format!("synth{i}.{extension}"));
                write_file(&path, &encoded)?;
                files.push(path);
            }
            synth_dir = Some(dir);
            files
        }
    };

    let report = pipeline_run(&PipelineConfig {
        inputs,
        batch_size,
        format,
        decode_workers: workers,
        compute_ms,
        prefetch,
        iterations,
    })?;
    drop(synth_dir);
    print_pipeline_report(&report);
    Ok(())
}
