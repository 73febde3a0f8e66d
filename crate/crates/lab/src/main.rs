//! `lfx`: encode, decode, and run the codec experiments.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error.

use std::fs;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use lfx_codec::decoder::{decode_sequence, parse_bitstream};
use lfx_codec::encoder::{encode_sequence, EncoderConfig};
use lfx_codec::frame::{SequenceHeader, VideoFrame};
use lfx_codec::metrics::{bd_psnr, bd_rate, RdCurve};
use lfx_codec::raw::read_raw_yuv;
use lfx_codec::y4m::{read_y4m, write_y4m};

use lfx_lab::config::{parse_config, parse_profile};
use lfx_lab::error::{LabError, Result};
use lfx_lab::experiment::{
    compare_adaptive, k_grid, lambda_opts, per_qp_opt_points, read_fit_points_csv,
    read_rd_csv, sweep, sweep_from_csv, sweep_to_csv, write_stats_csv, COMPARE_QPS, SWEEP_QPS,
};
use lfx_lab::fit::fit_power;
use lfx_lab::synth::{synth_sequence, ContentClass, SynthSpec};

#[derive(Parser)]
#[command(name = "lfx", version, about = "Toy hybrid video codec and its lambda experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Encode a y4m or raw 4:2:0 yuv file.
    Encode {
        /// Input video; .y4m carries its own geometry, raw yuv needs
        /// --width and --height.
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        width: Option<u32>,
        #[arg(long)]
        height: Option<u32>,
        #[arg(long)]
        qp: u8,
        /// Lambda family: h264 or hevc.
        #[arg(long, default_value = "h264")]
        profile: String,
        /// Enable the adaptive B-frame lambda controller.
        #[arg(long)]
        adaptive: bool,
        /// Fixed scale on the B-frame lambda; incompatible with --adaptive.
        #[arg(long, default_value_t = 1.0)]
        k: f64,
        /// Output bitstream path.
        #[arg(long)]
        out: PathBuf,
        /// Per-frame stats CSV path.
        #[arg(long)]
        stats: PathBuf,
    },
    /// Decode a bitstream back to y4m.
    Decode {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the fixed-k lambda sweep over a synthetic corpus.
    Sweep {
        /// key = value experiment config.
        #[arg(long)]
        config: PathBuf,
        /// Sweep records CSV path.
        #[arg(long)]
        out: PathBuf,
    },
    /// Fit the power law r_lambda = a * r_pb^b + c.
    Fit {
        /// CSV of r_pb,r_lambda points.
        #[arg(long = "in", conflicts_with = "sweep")]
        input: Option<PathBuf>,
        /// Derive the points from a sweep CSV instead.
        #[arg(long)]
        sweep: Option<PathBuf>,
        /// With --sweep: one point per (sequence, qp) instead of one
        /// per sequence.
        #[arg(long, requires = "sweep")]
        per_qp: bool,
        /// Fit result CSV path.
        #[arg(long)]
        out: PathBuf,
    },
    /// Bjontegaard deltas between two RD curves.
    Bd {
        /// Anchor curve CSV (bitrate/psnr columns).
        #[arg(long)]
        anchor: PathBuf,
        /// Test curve CSV.
        #[arg(long)]
        test: PathBuf,
    },
    /// Adaptive-vs-anchor comparison over a synthetic corpus.
    Compare {
        #[arg(long)]
        config: PathBuf,
        /// Report CSV path; the aligned table goes to stdout.
        #[arg(long)]
        out: PathBuf,
    },
    /// Generate a synthetic sequence as y4m.
    Synth {
        /// static, dyntex, or mixed.
        #[arg(long = "class")]
        class: String,
        #[arg(long)]
        seed: u64,
        /// WxH, e.g. 64x64.
        #[arg(long)]
        size: String,
        #[arg(long)]
        frames: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // Help and version requests land here too; only real parse
            // failures are usage errors.
            let code = if err.use_stderr() { 1 } else { 0 };
            let _ = err.print();
            std::process::exit(code);
        }
    };
    if let Err(err) = run(cli.command) {
        eprintln!("error: {err}");
        std::process::exit(err.exit_code());
    }
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Encode { input, width, height, qp, profile, adaptive, k, out, stats } => {
            cmd_encode(&input, width, height, qp, &profile, adaptive, k, &out, &stats)
        }
        Command::Decode { input, out } => cmd_decode(&input, &out),
        Command::Sweep { config, out } => cmd_sweep(&config, &out),
        Command::Fit { input, sweep, per_qp, out } => {
            cmd_fit(input.as_deref(), sweep.as_deref(), per_qp, &out)
        }
        Command::Bd { anchor, test } => cmd_bd(&anchor, &test),
        Command::Compare { config, out } => cmd_compare(&config, &out),
        Command::Synth { class, seed, size, frames, out } => {
            cmd_synth(&class, seed, &size, frames, &out)
        }
    }
}

fn read_input_video(
    input: &Path,
    width: Option<u32>,
    height: Option<u32>,
) -> Result<(Vec<VideoFrame>, SequenceHeader)> {
    let is_y4m = input
        .extension()
        .is_some_and(|ext| ext.eq_ignore_ascii_case("y4m"));
    if is_y4m {
        let file = fs::File::open(input)?;
        let (header, frames) = read_y4m(BufReader::new(file))?;
        Ok((frames, header))
    } else {
        let (Some(width), Some(height)) = (width, height) else {
            return Err(LabError::Usage(
                "raw yuv input needs --width and --height".into(),
            ));
        };
        let data = fs::read(input)?;
        let frames = read_raw_yuv(&data, width, height)?;
        let mut header = SequenceHeader::new(width, height, EncoderConfig::default().frame_rate);
        header.frame_count = frames.len() as u32;
        Ok((frames, header))
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_encode(
    input: &Path,
    width: Option<u32>,
    height: Option<u32>,
    qp: u8,
    profile: &str,
    adaptive: bool,
    k: f64,
    out: &Path,
    stats_path: &Path,
) -> Result<()> {
    if adaptive && k != 1.0 {
        return Err(LabError::Usage(
            "--adaptive and --k are mutually exclusive".into(),
        ));
    }
    let profile = parse_profile(profile)?;
    let (frames, header) = read_input_video(input, width, height)?;
    let config = EncoderConfig {
        qp,
        profile,
        adaptive,
        lambda_scale_k: k,
        frame_rate: header.frame_rate,
        ..EncoderConfig::default()
    };
    let (stream, stats) = encode_sequence(&frames, &config)?;
    fs::write(out, stream.write_bytes())?;
    let mut csv = Vec::new();
    write_stats_csv(&mut csv, &stats)?;
    fs::write(stats_path, csv)?;
    println!(
        "encoded {} frames, {} bits ({} bytes)",
        frames.len(),
        stream.total_bits,
        stream.write_bytes().len()
    );
    Ok(())
}

fn cmd_decode(input: &Path, out: &Path) -> Result<()> {
    let bytes = fs::read(input)?;
    let stream = parse_bitstream(&bytes)?;
    let frames = decode_sequence(&stream)?;
    let mut header = SequenceHeader::new(
        stream.header.width,
        stream.header.height,
        stream.header.frame_rate,
    );
    header.frame_count = frames.len() as u32;
    let file = fs::File::create(out)?;
    write_y4m(file, &header, &frames)?;
    println!("decoded {} frames", frames.len());
    Ok(())
}

fn cmd_sweep(config_path: &Path, out: &Path) -> Result<()> {
    let config = parse_config(&fs::read_to_string(config_path)?)?;
    let seqs = config.sequences()?;
    let qps = config.qps.clone().unwrap_or_else(|| SWEEP_QPS.to_vec());
    let records = sweep(&seqs, &qps, &k_grid(), config.profile)?;
    fs::write(out, sweep_to_csv(&records))?;
    println!("wrote {} sweep records", records.len());
    Ok(())
}

fn cmd_fit(
    input: Option<&Path>,
    sweep_path: Option<&Path>,
    per_qp: bool,
    out: &Path,
) -> Result<()> {
    let points: Vec<(f64, f64)> = match (input, sweep_path) {
        (Some(path), None) => read_fit_points_csv(&fs::read_to_string(path)?)?,
        (None, Some(path)) => {
            let records = sweep_from_csv(&fs::read_to_string(path)?)?;
            if per_qp {
                let opts = per_qp_opt_points(&records)?;
                println!("{:<16} {:>4} {:>10} {:>8}", "seq", "qp", "r_pb", "k_opt");
                for (seq, qp, r_pb, k_star) in &opts {
                    println!("{seq:<16} {qp:>4} {r_pb:>10.4} {k_star:>8.3}");
                }
                opts.into_iter()
                    .map(|(_, _, r_pb, k_star)| (r_pb, k_star))
                    .collect()
            } else {
                let opts = lambda_opts(&records)?;
                println!(
                    "{:<16} {:>10} {:>8} {:>12}",
                    "seq", "mean_r_pb", "k_opt", "bd_rate_pct"
                );
                for opt in &opts {
                    println!(
                        "{:<16} {:>10.4} {:>8.3} {:>12.3}",
                        opt.seq, opt.mean_r_pb, opt.k_star, opt.bd_rate
                    );
                }
                opts.into_iter()
                    .map(|opt| (opt.mean_r_pb, opt.k_star))
                    .collect()
            }
        }
        _ => {
            return Err(LabError::Usage(
                "fit needs exactly one of --in or --sweep".into(),
            ))
        }
    };
    let fit = fit_power(&points)?;
    fs::write(
        out,
        format!(
            "a,b,c,residual,points\n{},{},{},{},{}\n",
            fit.a, fit.b, fit.c, fit.residual, fit.points
        ),
    )?;
    println!(
        "fit: a = {:.6}, b = {:.6}, c = {:.6}, residual = {:.3e} over {} points",
        fit.a, fit.b, fit.c, fit.residual, fit.points
    );
    Ok(())
}

fn cmd_bd(anchor: &Path, test: &Path) -> Result<()> {
    let anchor_curve = RdCurve::new(read_rd_csv(&fs::read_to_string(anchor)?)?)
        .map_err(LabError::from)?;
    let test_curve =
        RdCurve::new(read_rd_csv(&fs::read_to_string(test)?)?).map_err(LabError::from)?;
    let dp = bd_psnr(&anchor_curve, &test_curve).map_err(LabError::from)?;
    let dr = bd_rate(&anchor_curve, &test_curve).map_err(LabError::from)?;
    println!("bd_psnr_db,bd_rate_pct");
    println!("{dp},{dr}");
    Ok(())
}

fn cmd_compare(config_path: &Path, out: &Path) -> Result<()> {
    let config = parse_config(&fs::read_to_string(config_path)?)?;
    let seqs = config.sequences()?;
    let qps = config.qps.clone().unwrap_or_else(|| COMPARE_QPS.to_vec());
    let report = compare_adaptive(&seqs, &qps, config.profile)?;
    fs::write(out, report.to_csv())?;
    print!("{}", report.to_table());
    Ok(())
}

fn cmd_synth(class: &str, seed: u64, size: &str, frames: usize, out: &Path) -> Result<()> {
    let class: ContentClass = class.parse()?;
    let (width, height) = parse_size(size)?;
    let spec = SynthSpec { class, seed, width, height, frames };
    let sequence = synth_sequence(&spec)?;
    let mut header =
        SequenceHeader::new(width, height, EncoderConfig::default().frame_rate);
    header.frame_count = sequence.len() as u32;
    let file = fs::File::create(out)?;
    write_y4m(file, &header, &sequence)?;
    println!("wrote {} as {} frames of {}x{}", spec.sequence_id(), frames, width, height);
    Ok(())
}

fn parse_size(size: &str) -> Result<(u32, u32)> {
    let err = || LabError::Usage(format!("bad --size {size:?} (expected WxH, e.g. 64x64)"));
    let (w, h) = size.split_once('x').ok_or_else(err)?;
    Ok((w.parse().map_err(|_| err())?, h.parse().map_err(|_| err())?))
}
