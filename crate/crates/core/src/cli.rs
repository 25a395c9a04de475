//! Command-line front end.
//!
//! Exit codes: 0 success, 2 capacity exceeded, 3 unmappable character (strict
//! normalization), 4 decode failure, 5 I/O or format error, 64 usage error.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use crate::analysis::{emit_report, AnalysisBundle, AnalysisError};
use crate::baseline::{self, BaselineError};
use crate::codebook::{detokenize, normalize_text, tokenize, Codebook, CodebookError};
use crate::codec::{self, CodecError};
use crate::imaging::{load_image, save_image, ImagingError, RasterImage};
use crate::metrics::{MetricsError, MetricsReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CAPACITY: i32 = 2;
pub const EXIT_UNMAPPABLE: i32 = 3;
pub const EXIT_DECODE: i32 = 4;
pub const EXIT_IO: i32 = 5;
pub const EXIT_USAGE: i32 = 64;

#[derive(Debug, Parser)]
#[command(name = "quinstego", version, about = "Hide text in images with quinary RGB perturbations")]
struct Cli {
    /// Emit machine-readable JSON on stdout
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Embed a UTF-8 text file into a cover image
    Encode(EncodeArgs),
    /// Recover the embedded text using the original cover
    Decode(DecodeArgs),
    /// Distortion metrics between cover and stego, optionally with text rates
    Metrics(MetricsArgs),
    /// Write histograms, heatmap and report.json for a cover/stego pair
    Analyze(AnalyzeArgs),
    /// Print how many symbols a cover can hold
    Capacity(CapacityArgs),
    /// Dump the symbol/triplet table as CSV
    Codebook(CodebookArgs),
    /// LSB reference embedding and the pixels-per-character table
    #[command(subcommand)]
    Baseline(BaselineCommand),
}

#[derive(Debug, Args)]
struct GrayFlag {
    /// Convert an RGB cover to 8-bit luma and use the grayscale codec
    #[arg(long)]
    force_gray: bool,
}

#[derive(Debug, Args)]
struct EncodeArgs {
    #[arg(long)]
    cover: PathBuf,
    #[arg(long)]
    text: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Also write the embed report as JSON
    #[arg(long)]
    report: Option<PathBuf>,
    /// Replace unmappable characters with '?' instead of failing
    #[arg(long)]
    lossy: bool,
    #[command(flatten)]
    gray: GrayFlag,
}

#[derive(Debug, Args)]
struct DecodeArgs {
    #[arg(long)]
    cover: PathBuf,
    #[arg(long)]
    stego: PathBuf,
    /// Output text file; stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    gray: GrayFlag,
}

#[derive(Debug, Args)]
struct MetricsArgs {
    #[arg(long)]
    cover: PathBuf,
    #[arg(long)]
    stego: PathBuf,
    /// Original text; enables CER/WER against the decoded payload
    #[arg(long)]
    reference_text: Option<PathBuf>,
    #[command(flatten)]
    gray: GrayFlag,
}

#[derive(Debug, Args)]
struct AnalyzeArgs {
    #[arg(long)]
    cover: PathBuf,
    #[arg(long)]
    stego: PathBuf,
    #[arg(long)]
    outdir: PathBuf,
    #[arg(long)]
    reference_text: Option<PathBuf>,
    #[command(flatten)]
    gray: GrayFlag,
}

#[derive(Debug, Args)]
struct CapacityArgs {
    #[arg(long)]
    cover: PathBuf,
    #[command(flatten)]
    gray: GrayFlag,
}

#[derive(Debug, Args)]
struct CodebookArgs {
    /// Output CSV file; stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum BaselineCommand {
    /// Embed raw bytes with 1-bit LSB substitution
    LsbEncode {
        #[arg(long)]
        cover: PathBuf,
        #[arg(long)]
        text: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Blind LSB extraction up to the first NUL byte
    LsbDecode {
        #[arg(long)]
        stego: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Pixels needed per character for each method
    Table3,
}

/// A failed command: exit code, stable error identifier and detail message.
#[derive(Debug)]
pub struct CliError {
    pub exit_code: i32,
    pub kind: &'static str,
    pub detail: String,
}

impl CliError {
    fn new(exit_code: i32, kind: &'static str, detail: impl ToString) -> Self {
        CliError { exit_code, kind, detail: detail.to_string() }
    }

    fn io(path: &Path, err: std::io::Error) -> Self {
        CliError::new(EXIT_IO, "io", format!("{}: {err}", path.display()))
    }
}

impl From<CodecError> for CliError {
    fn from(e: CodecError) -> Self {
        let (code, kind) = match &e {
            CodecError::CapacityExceeded { .. } => (EXIT_CAPACITY, "capacity_exceeded"),
            CodecError::MissingTerminator => (EXIT_DECODE, "missing_terminator"),
            CodecError::DeltaOutOfRange { .. } => (EXIT_DECODE, "delta_out_of_range"),
            CodecError::UnassignedCombination { .. } => (EXIT_DECODE, "unassigned_combination"),
            CodecError::DimensionMismatch { .. } => (EXIT_DECODE, "dimension_mismatch"),
            CodecError::IncompleteGroup { .. } => (EXIT_DECODE, "incomplete_group"),
            CodecError::ChannelMismatch { .. } => (EXIT_IO, "channel_mismatch"),
            CodecError::TerminatorInPayload(_) => (EXIT_USAGE, "terminator_in_payload"),
        };
        CliError::new(code, kind, e)
    }
}

impl From<CodebookError> for CliError {
    fn from(e: CodebookError) -> Self {
        match e {
            CodebookError::UnmappableCharacter { .. } => CliError::new(EXIT_UNMAPPABLE, "unmappable_character", e),
            CodebookError::UnassignedCombination(_) => CliError::new(EXIT_DECODE, "unassigned_combination", e),
            CodebookError::InvalidDelta(_) => CliError::new(EXIT_DECODE, "delta_out_of_range", e),
        }
    }
}

impl From<ImagingError> for CliError {
    fn from(e: ImagingError) -> Self {
        let kind = match e {
            ImagingError::Io { .. } => "io",
            ImagingError::UnsupportedFormat(_) => "unsupported_format",
            ImagingError::BitDepthUnsupported(_) => "bit_depth_unsupported",
            ImagingError::InvalidRaster(_) => "invalid_raster",
        };
        CliError::new(EXIT_IO, kind, e)
    }
}

impl From<MetricsError> for CliError {
    fn from(e: MetricsError) -> Self {
        match e {
            MetricsError::DimensionMismatch(..) => CliError::new(EXIT_DECODE, "dimension_mismatch", e),
            MetricsError::ImageTooSmall(..) => CliError::new(EXIT_IO, "image_too_small", e),
            MetricsError::EmptyReference => CliError::new(EXIT_USAGE, "empty_reference", e),
        }
    }
}

impl From<AnalysisError> for CliError {
    fn from(e: AnalysisError) -> Self {
        match e {
            AnalysisError::DimensionMismatch(..) => CliError::new(EXIT_DECODE, "dimension_mismatch", e),
            AnalysisError::Imaging(inner) => inner.into(),
            other => CliError::new(EXIT_IO, "io", other),
        }
    }
}

impl From<BaselineError> for CliError {
    fn from(e: BaselineError) -> Self {
        let (code, kind) = match e {
            BaselineError::CapacityExceeded { .. } => (EXIT_CAPACITY, "capacity_exceeded"),
            BaselineError::MissingTerminator => (EXIT_DECODE, "missing_terminator"),
            BaselineError::EmbeddedNul(_) => (EXIT_UNMAPPABLE, "embedded_nul"),
            BaselineError::UnknownMethod(_) | BaselineError::InvalidChannels(_) => (EXIT_USAGE, "usage"),
        };
        CliError::new(code, kind, e)
    }
}

type CmdResult = Result<(), CliError>;

struct Ctx<'a> {
    json: bool,
    out: &'a mut dyn Write,
}

impl Ctx<'_> {
    fn emit(&mut self, value: serde_json::Value, human: impl FnOnce() -> String) -> CmdResult {
        let text = if self.json {
            serde_json::to_string_pretty(&value).expect("json value serializes")
        } else {
            human()
        };
        writeln!(self.out, "{text}").map_err(|e| CliError::io(Path::new("<stdout>"), e))
    }
}

fn read_text(path: &Path) -> Result<String, CliError> {
    let bytes = fs::read(path).map_err(|e| CliError::io(path, e))?;
    String::from_utf8(bytes).map_err(|e| CliError::new(EXIT_IO, "invalid_utf8", format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, contents: &[u8]) -> CmdResult {
    fs::write(path, contents).map_err(|e| CliError::io(path, e))
}

fn load_cover(path: &Path, gray: &GrayFlag) -> Result<RasterImage, CliError> {
    let img = load_image(path)?;
    Ok(if gray.force_gray { img.to_luma() } else { img })
}

fn mode(img: &RasterImage) -> &'static str {
    if img.channels() == 1 {
        "gray"
    } else {
        "rgb"
    }
}

fn encode(ctx: &mut Ctx, args: &EncodeArgs) -> CmdResult {
    let raw = read_text(&args.text)?;
    let (normalized, log) = normalize_text(&raw, !args.lossy)?;
    let symbols = tokenize(&normalized)?;
    let cover = load_cover(&args.cover, &args.gray)?;
    let (stego, report) = codec::encode_auto(&cover, &symbols, Codebook::standard())?;
    save_image(&stego, &args.out)?;
    if let Some(path) = &args.report {
        let text = serde_json::to_string_pretty(&report).expect("report serializes");
        write_file(path, text.as_bytes())?;
    }
    let value = json!({
        "mode": mode(&cover),
        "report": report,
        "normalization": {
            "substitutions": log.substitutions.len(),
            "rejected": log.rejected.len(),
        },
        "stego": args.out,
    });
    ctx.emit(value, || {
        format!(
            "embedded {} symbols (+ terminator) into {} ({} mode)\n\
             pixels used {} / skipped {} / unused {} of {}; utilization {:.4}%\n\
             normalization: {} substitutions, {} rejected",
            report.payload_count - 1,
            args.out.display(),
            mode(&cover),
            report.pixels_used,
            report.pixels_skipped,
            report.pixels_unused,
            report.total_pixels,
            report.utilization_pct,
            log.substitutions.len(),
            log.rejected.len(),
        )
    })
}

fn decode_text(cover: &RasterImage, stego_path: &Path) -> Result<(String, usize), CliError> {
    let stego = load_image(stego_path)?;
    let symbols = codec::decode_auto(cover, &stego, Codebook::standard())?;
    Ok((detokenize(&symbols), symbols.len()))
}

fn decode(ctx: &mut Ctx, args: &DecodeArgs) -> CmdResult {
    let cover = load_cover(&args.cover, &args.gray)?;
    let (text, count) = decode_text(&cover, &args.stego)?;
    match &args.out {
        Some(path) => {
            write_file(path, text.as_bytes())?;
            ctx.emit(json!({ "symbols": count, "out": path }), || {
                format!("decoded {count} symbols into {}", path.display())
            })
        }
        None if ctx.json => ctx.emit(json!({ "symbols": count, "text": text }), String::new),
        None => ctx.out.write_all(text.as_bytes()).map_err(|e| CliError::io(Path::new("<stdout>"), e)),
    }
}

fn metrics_for(cover: &RasterImage, stego_path: &Path, reference: Option<&PathBuf>) -> Result<(MetricsReport, RasterImage), CliError> {
    let stego = load_image(stego_path)?;
    let report = match reference {
        Some(path) => {
            let reference = read_text(path)?;
            let symbols = codec::decode_auto(cover, &stego, Codebook::standard())?;
            let decoded = detokenize(&symbols);
            MetricsReport::compute(cover, &stego, Some((&reference, &decoded)))?
        }
        None => MetricsReport::compute(cover, &stego, None)?,
    };
    Ok((report, stego))
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "n/a".to_string(), |v| format!("{v:.6}"))
}

fn human_metrics(m: &MetricsReport) -> String {
    format!(
        "MAE   {:.6}\nMSE   {:.6}\nSNR   {:.3} dB\nPSNR  {:.3} dB\nSSIM  {}\nCER   {}\nWER   {}",
        m.mae,
        m.mse,
        m.snr,
        m.psnr,
        fmt_opt(m.ssim),
        fmt_opt(m.cer),
        fmt_opt(m.wer)
    )
}

fn metrics(ctx: &mut Ctx, args: &MetricsArgs) -> CmdResult {
    let cover = load_cover(&args.cover, &args.gray)?;
    let (report, _) = metrics_for(&cover, &args.stego, args.reference_text.as_ref())?;
    ctx.emit(serde_json::to_value(&report).expect("metrics serialize"), || human_metrics(&report))
}

fn analyze(ctx: &mut Ctx, args: &AnalyzeArgs) -> CmdResult {
    let cover = load_cover(&args.cover, &args.gray)?;
    let (metrics, stego) = metrics_for(&cover, &args.stego, args.reference_text.as_ref())?;
    let symbols = codec::decode_auto(&cover, &stego, Codebook::standard())?;
    let embed = codec::plan_report(&cover, symbols.len())?;
    let bundle = AnalysisBundle::build(&cover, &stego, metrics, embed)?;
    let files = emit_report(&bundle, &args.outdir)?;
    ctx.emit(json!({ "files": files, "report": bundle.embed, "metrics": bundle.metrics }), || {
        let mut s = format!("wrote {} files to {}", files.len(), args.outdir.display());
        for f in &files {
            s.push_str(&format!("\n  {}", f.display()));
        }
        s
    })
}

fn capacity(ctx: &mut Ctx, args: &CapacityArgs) -> CmdResult {
    let cover = load_cover(&args.cover, &args.gray)?;
    let capacity = codec::capacity_auto(&cover)?;
    let usable = codec::usable_mask_any(&cover).usable_count();
    ctx.emit(
        json!({ "capacity": capacity, "usable_pixels": usable, "total_pixels": cover.pixel_count(), "mode": mode(&cover) }),
        || capacity.to_string(),
    )
}

fn codebook(ctx: &mut Ctx, args: &CodebookArgs) -> CmdResult {
    let cb = Codebook::standard();
    let mut csv = Vec::new();
    cb.write_csv(&mut csv).map_err(|e| CliError::new(EXIT_IO, "io", e))?;
    if let Some(path) = &args.out {
        write_file(path, &csv)?;
    }
    let rows: Vec<_> = cb
        .entries()
        .map(|(s, t)| {
            let [dr, dg, db] = t.components();
            json!({ "symbol": s.label(), "dr": dr, "dg": dg, "db": db, "index": t.index() })
        })
        .collect();
    match (&args.out, ctx.json) {
        (_, true) => ctx.emit(serde_json::Value::Array(rows), String::new),
        (Some(path), false) => ctx.emit(json!(null), || format!("wrote {} entries to {}", rows.len(), path.display())),
        (None, false) => ctx.out.write_all(&csv).map_err(|e| CliError::io(Path::new("<stdout>"), e)),
    }
}

fn run_baseline(ctx: &mut Ctx, cmd: &BaselineCommand) -> CmdResult {
    match cmd {
        BaselineCommand::LsbEncode { cover, text, out } => {
            let cover = load_image(cover)?;
            let bytes = fs::read(text).map_err(|e| CliError::io(text, e))?;
            let stego = baseline::lsb_encode(&cover, &bytes)?;
            save_image(&stego, out)?;
            let slots = baseline::lsb_slots_required(bytes.len());
            let pixels = slots.div_ceil(cover.channels());
            ctx.emit(json!({ "bytes": bytes.len(), "channel_slots": slots, "pixels_touched": pixels }), || {
                format!("embedded {} bytes using {slots} channel slots ({pixels} pixels)", bytes.len())
            })
        }
        BaselineCommand::LsbDecode { stego, out } => {
            let bytes = baseline::lsb_decode(&load_image(stego)?)?;
            match out {
                Some(path) => {
                    write_file(path, &bytes)?;
                    ctx.emit(json!({ "bytes": bytes.len(), "out": path }), || {
                        format!("recovered {} bytes into {}", bytes.len(), path.display())
                    })
                }
                None if ctx.json => {
                    ctx.emit(json!({ "bytes": bytes.len(), "text": String::from_utf8_lossy(&bytes) }), String::new)
                }
                None => ctx.out.write_all(&bytes).map_err(|e| CliError::io(Path::new("<stdout>"), e)),
            }
        }
        BaselineCommand::Table3 => {
            let table = baseline::comparison_table();
            ctx.emit(serde_json::to_value(&table).expect("table serializes"), || {
                let mut s = String::from("method    gray  rgb");
                for p in &table {
                    s.push_str(&format!("\n{:<9} {:>4} {:>4}", p.method.to_string(), p.pixels_per_char_gray, p.pixels_per_char_rgb));
                }
                s
            })
        }
    }
}

fn dispatch(ctx: &mut Ctx, command: &Command) -> CmdResult {
    match command {
        Command::Encode(a) => encode(ctx, a),
        Command::Decode(a) => decode(ctx, a),
        Command::Metrics(a) => metrics(ctx, a),
        Command::Analyze(a) => analyze(ctx, a),
        Command::Capacity(a) => capacity(ctx, a),
        Command::Codebook(a) => codebook(ctx, a),
        Command::Baseline(c) => run_baseline(ctx, c),
    }
}

/// Runs one invocation (`args` includes the program name) and returns the
/// process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let json = args.iter().skip(1).any(|a| a == "--json");
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(stdout, "{e}");
                return EXIT_OK;
            }
            let err = CliError::new(EXIT_USAGE, "usage", e.to_string().trim_end());
            report_error(&err, json, stdout, stderr);
            return err.exit_code;
        }
    };
    let mut ctx = Ctx { json: cli.json, out: stdout };
    match dispatch(&mut ctx, &cli.command) {
        Ok(()) => EXIT_OK,
        Err(err) => {
            report_error(&err, cli.json, ctx.out, stderr);
            err.exit_code
        }
    }
}

fn report_error(err: &CliError, json: bool, stdout: &mut dyn Write, stderr: &mut dyn Write) {
    if json {
        let value = json!({ "error": err.kind, "exit_code": err.exit_code, "detail": err.detail });
        let _ = writeln!(stdout, "{value}");
    } else {
        let _ = writeln!(stderr, "error: {}", err.detail);
    }
}
