//! The lambda-sweep and adaptive-vs-anchor experiments, plus the CSV
//! formats that carry their results.
//!
//! Every experiment cell (sequence, qp, k, adaptive) is an independent
//! deterministic encode; record ordering is canonical (sorted by key),
//! so results never depend on execution order.

use std::io::Write;

use lfx_codec::encoder::{encode_sequence, EncoderConfig, FrameStats, Profile};
use lfx_codec::frame::VideoFrame;
use lfx_codec::gop::FrameType;
use lfx_codec::metrics::{bd_psnr, bd_rate, bitrate_kbps, psnr_from_mse, RdCurve, RdPoint};

use crate::error::{LabError, Result};
use crate::synth::ContentClass;

/// QP ladder for the lambda sweep.
pub const SWEEP_QPS: [u8; 4] = [27, 32, 37, 42];

/// QP ladder for the adaptive-vs-anchor comparison.
pub const COMPARE_QPS: [u8; 5] = [22, 27, 32, 37, 42];

/// Fifteen multiplicatively spaced B-lambda scales covering [0.2, 5.0].
/// The endpoints and the anchor value 1.0 are pinned exactly so anchor
/// rows can be located by equality.
pub fn k_grid() -> Vec<f64> {
    let mut ks: Vec<f64> = (0..15)
        .map(|i| 5.0f64.powf((i as f64 - 7.0) / 7.0))
        .collect();
    ks[0] = 0.2;
    ks[7] = 1.0;
    ks[14] = 5.0;
    ks
}

/// One row of the sweep CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRecord {
    pub seq: String,
    pub qp: u8,
    pub k: f64,
    pub adaptive: bool,
    pub bits: u64,
    pub frames: usize,
    pub bitrate_kbps: f64,
    pub psnr_y: f64,
    /// Mean luma MSE over P frames.
    pub mean_dp: f64,
    /// Mean luma MSE over B frames.
    pub mean_db: f64,
    /// mean_dp / mean_db, NaN when either side is unpopulated.
    pub r_pb: f64,
}

pub const SWEEP_HEADER: &str =
    "seq,qp,k,adaptive,bits,frames,bitrate_kbps,psnr_y,mean_dp,mean_db,r_pb";

impl SweepRecord {
    fn to_row(&self) -> String {
        debug_assert!(!self.seq.contains([',', '\n']));
        format!(
            "{},{},{},{},{},{},{},{},{},{},{}",
            self.seq,
            self.qp,
            self.k,
            self.adaptive,
            self.bits,
            self.frames,
            self.bitrate_kbps,
            self.psnr_y,
            self.mean_dp,
            self.mean_db,
            self.r_pb
        )
    }

    fn parse_row(line: &str, lineno: usize) -> Result<Self> {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 11 {
            return Err(LabError::Data(format!(
                "sweep CSV line {lineno}: expected 11 fields, got {}",
                fields.len()
            )));
        }
        let field = |i: usize| fields[i].trim();
        fn num<T: std::str::FromStr>(s: &str, what: &str, lineno: usize) -> Result<T> {
            s.parse().map_err(|_| {
                LabError::Data(format!("sweep CSV line {lineno}: bad {what} {s:?}"))
            })
        }
        Ok(SweepRecord {
            seq: field(0).to_string(),
            qp: num(field(1), "qp", lineno)?,
            k: num(field(2), "k", lineno)?,
            adaptive: num(field(3), "adaptive flag", lineno)?,
            bits: num(field(4), "bits", lineno)?,
            frames: num(field(5), "frame count", lineno)?,
            bitrate_kbps: num(field(6), "bitrate", lineno)?,
            psnr_y: num(field(7), "psnr", lineno)?,
            mean_dp: num(field(8), "mean_dp", lineno)?,
            mean_db: num(field(9), "mean_db", lineno)?,
            r_pb: num(field(10), "r_pb", lineno)?,
        })
    }
}

pub fn sweep_to_csv(records: &[SweepRecord]) -> String {
    let mut out = String::from(SWEEP_HEADER);
    out.push('\n');
    for record in records {
        out.push_str(&record.to_row());
        out.push('\n');
    }
    out
}

pub fn sweep_from_csv(text: &str) -> Result<Vec<SweepRecord>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(header) if header.trim() == SWEEP_HEADER => {}
        other => {
            return Err(LabError::Data(format!(
                "sweep CSV header mismatch: expected {SWEEP_HEADER:?}, got {other:?}"
            )))
        }
    }
    lines
        .enumerate()
        .filter(|(_, line)| !line.trim().is_empty())
        .map(|(i, line)| SweepRecord::parse_row(line, i + 2))
        .collect()
}

/// Everything a single encode contributes to the experiments.
#[derive(Debug, Clone)]
pub struct RdOutcome {
    pub stats: Vec<FrameStats>,
    pub bits: u64,
    pub bitrate_kbps: f64,
    /// Mean over frames of per-frame luma PSNR.
    pub psnr_y: f64,
    pub mean_dp: f64,
    pub mean_db: f64,
    pub r_pb: f64,
}

/// Encodes one experiment cell. `k` scales the B-frame lambda only;
/// the adaptive controller replaces fixed scaling, so `adaptive` with
/// k != 1 is a usage error.
pub fn run_rd_point(
    frames: &[VideoFrame],
    seq: &str,
    qp: u8,
    k: f64,
    adaptive: bool,
    profile: Profile,
) -> Result<(RdOutcome, SweepRecord)> {
    if !(k > 0.0 && k.is_finite()) {
        return Err(LabError::Usage(format!("k must be positive and finite, got {k}")));
    }
    if adaptive && k != 1.0 {
        return Err(LabError::Usage(
            "adaptive mode and a fixed k scale are mutually exclusive".into(),
        ));
    }
    let config = EncoderConfig {
        qp,
        profile,
        adaptive,
        lambda_scale_k: k,
        ..EncoderConfig::default()
    };
    let (stream, stats) = encode_sequence(frames, &config)?;

    let mean = |ty: FrameType| {
        let mses: Vec<f64> = stats
            .iter()
            .filter(|s| s.frame_type == ty)
            .map(|s| s.mse_y)
            .collect();
        if mses.is_empty() {
            0.0
        } else {
            mses.iter().sum::<f64>() / mses.len() as f64
        }
    };
    let mean_dp = mean(FrameType::P);
    let mean_db = mean(FrameType::B);
    let r_pb = if mean_dp > 0.0 && mean_db > 0.0 {
        mean_dp / mean_db
    } else {
        f64::NAN
    };
    let psnr_y =
        stats.iter().map(|s| psnr_from_mse(s.mse_y)).sum::<f64>() / stats.len() as f64;
    let outcome = RdOutcome {
        bits: stream.total_bits,
        bitrate_kbps: bitrate_kbps(stream.total_bits, frames.len(), config.frame_rate),
        psnr_y,
        mean_dp,
        mean_db,
        r_pb,
        stats,
    };
    let record = SweepRecord {
        seq: seq.to_string(),
        qp,
        k,
        adaptive,
        bits: outcome.bits,
        frames: frames.len(),
        bitrate_kbps: outcome.bitrate_kbps,
        psnr_y: outcome.psnr_y,
        mean_dp,
        mean_db,
        r_pb,
    };
    Ok((outcome, record))
}

/// A synthetic clip with its identity, as fed to the experiments.
#[derive(Debug, Clone)]
pub struct NamedSequence {
    pub id: String,
    pub class: ContentClass,
    pub frames: Vec<VideoFrame>,
}

/// Fixed-k lambda sweep over the full (sequence, qp, k) product.
pub fn sweep(
    seqs: &[NamedSequence],
    qps: &[u8],
    ks: &[f64],
    profile: Profile,
) -> Result<Vec<SweepRecord>> {
    if let Some(&k) = ks.iter().find(|&&k| !(0.2..=5.0).contains(&k)) {
        return Err(LabError::Usage(format!("k {k} outside the sweep range [0.2, 5.0]")));
    }
    let mut records = Vec::with_capacity(seqs.len() * qps.len() * ks.len());
    for seq in seqs {
        for &qp in qps {
            for &k in ks {
                let (_, record) = run_rd_point(&seq.frames, &seq.id, qp, k, false, profile)?;
                records.push(record);
            }
        }
    }
    records.sort_by(|a, b| {
        a.seq
            .cmp(&b.seq)
            .then(a.qp.cmp(&b.qp))
            .then(a.k.total_cmp(&b.k))
    });
    Ok(records)
}

/// The sweep's verdict for one sequence: the best fixed B-lambda scale
/// under the Bjontegaard rate criterion.
#[derive(Debug, Clone, PartialEq)]
pub struct LambdaOpt {
    pub seq: String,
    pub k_star: f64,
    /// The lambda ratio the fit consumes; identical to k_star.
    pub r_lambda: f64,
    /// BD-rate of the k_star curve against the k = 1 anchor, percent.
    pub bd_rate: f64,
    /// Mean anchor-encode r_pb across the QP ladder.
    pub mean_r_pb: f64,
}

/// Per-QP variant: the k whose single RD point clears the anchor curve
/// by the largest PSNR margin at that QP.
#[derive(Debug, Clone, PartialEq)]
pub struct QpOpt {
    pub qp: u8,
    pub k_star: f64,
    /// PSNR advantage over the anchor curve at k_star's bitrate, dB.
    pub psnr_gain: f64,
}

/// Non-adaptive records for one sequence, grouped by k (ascending),
/// each group sorted by QP.
fn groups_by_k(records: &[SweepRecord], seq: &str) -> Result<Vec<(f64, Vec<SweepRecord>)>> {
    let mut groups: Vec<(f64, Vec<SweepRecord>)> = Vec::new();
    for record in records.iter().filter(|r| r.seq == seq && !r.adaptive) {
        match groups.iter_mut().find(|(k, _)| *k == record.k) {
            Some((_, group)) => group.push(record.clone()),
            None => groups.push((record.k, vec![record.clone()])),
        }
    }
    if groups.is_empty() {
        return Err(LabError::Data(format!("no sweep records for sequence {seq:?}")));
    }
    for (k, group) in &mut groups {
        group.sort_by_key(|r| r.qp);
        if group.windows(2).any(|w| w[0].qp == w[1].qp) {
            return Err(LabError::Data(format!(
                "sequence {seq:?} has duplicate rows for k = {k}"
            )));
        }
    }
    groups.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(groups)
}

fn curve_of(group: &[SweepRecord]) -> Result<RdCurve> {
    let points = group
        .iter()
        .map(|r| RdPoint { bitrate: r.bitrate_kbps, psnr: r.psnr_y })
        .collect();
    Ok(RdCurve::new(points)?)
}

/// Identifies the best fixed k for one sequence by BD-rate against the
/// k = 1 anchor curve. Ties go to the k nearest 1.0.
pub fn find_lambda_opt(records: &[SweepRecord], seq: &str) -> Result<LambdaOpt> {
    let groups = groups_by_k(records, seq)?;
    let anchor_group = groups
        .iter()
        .find(|(k, _)| *k == 1.0)
        .map(|(_, g)| g.clone())
        .ok_or_else(|| {
            LabError::Data(format!("sequence {seq:?} has no k = 1 anchor rows"))
        })?;
    let anchor_curve = curve_of(&anchor_group)?;
    let mean_r_pb = anchor_group.iter().map(|r| r.r_pb).sum::<f64>() / anchor_group.len() as f64;

    let mut best: Option<(f64, f64)> = None; // (k, bd_rate)
    for (k, group) in &groups {
        let bd = bd_rate(&anchor_curve, &curve_of(group)?)?;
        let better = match best {
            None => true,
            Some((bk, bbd)) => {
                bd < bbd || (bd == bbd && (k - 1.0).abs() < (bk - 1.0).abs())
            }
        };
        if better {
            best = Some((*k, bd));
        }
    }
    let (k_star, bd) = best.expect("groups_by_k guarantees at least one group");
    Ok(LambdaOpt { seq: seq.to_string(), k_star, r_lambda: k_star, bd_rate: bd, mean_r_pb })
}

/// Per-QP optima: at each QP, the k whose RD point sits highest above
/// the anchor curve. Exposed behind a CLI flag; the per-sequence BD
/// criterion is the default.
pub fn per_qp_lambda_opt(records: &[SweepRecord], seq: &str) -> Result<Vec<QpOpt>> {
    let groups = groups_by_k(records, seq)?;
    let anchor_group = groups
        .iter()
        .find(|(k, _)| *k == 1.0)
        .map(|(_, g)| g.clone())
        .ok_or_else(|| {
            LabError::Data(format!("sequence {seq:?} has no k = 1 anchor rows"))
        })?;
    let anchor_curve = curve_of(&anchor_group)?;

    let mut qps: Vec<u8> = anchor_group.iter().map(|r| r.qp).collect();
    qps.sort_unstable();
    let mut optima = Vec::with_capacity(qps.len());
    for qp in qps {
        let mut best: Option<(f64, f64)> = None; // (k, gain)
        for (k, group) in &groups {
            let Some(record) = group.iter().find(|r| r.qp == qp) else {
                return Err(LabError::Data(format!(
                    "sequence {seq:?} is missing a qp {qp} row for k = {k}"
                )));
            };
            let gain = record.psnr_y - anchor_curve.psnr_at(record.bitrate_kbps)?;
            let better = match best {
                None => true,
                Some((bk, bg)) => {
                    gain > bg || (gain == bg && (k - 1.0).abs() < (bk - 1.0).abs())
                }
            };
            if better {
                best = Some((*k, gain));
            }
        }
        let (k_star, psnr_gain) = best.expect("every k group covers this qp");
        optima.push(QpOpt { qp, k_star, psnr_gain });
    }
    Ok(optima)
}

/// [`find_lambda_opt`] for every sequence in the records, sorted by
/// sequence id.
pub fn lambda_opts(records: &[SweepRecord]) -> Result<Vec<LambdaOpt>> {
    let mut seqs: Vec<&str> = records.iter().map(|r| r.seq.as_str()).collect();
    seqs.sort_unstable();
    seqs.dedup();
    seqs.iter().map(|seq| find_lambda_opt(records, seq)).collect()
}

/// (sequence, mean anchor r_pb, k_star) for every sequence in the
/// records, sorted by sequence id; the input to the power fit.
pub fn lambda_opt_points(records: &[SweepRecord]) -> Result<Vec<(String, f64, f64)>> {
    Ok(lambda_opts(records)?
        .into_iter()
        .map(|opt| (opt.seq, opt.mean_r_pb, opt.k_star))
        .collect())
}

/// Per-(sequence, qp) variant of [`lambda_opt_points`]: pairs each QP's
/// anchor r_pb with that QP's own optimum.
pub fn per_qp_opt_points(records: &[SweepRecord]) -> Result<Vec<(String, u8, f64, f64)>> {
    let mut seqs: Vec<&str> = records.iter().map(|r| r.seq.as_str()).collect();
    seqs.sort_unstable();
    seqs.dedup();
    let mut points = Vec::new();
    for seq in seqs {
        for opt in per_qp_lambda_opt(records, seq)? {
            let anchor = records
                .iter()
                .find(|r| r.seq == seq && !r.adaptive && r.k == 1.0 && r.qp == opt.qp)
                .expect("per_qp_lambda_opt requires the anchor rows");
            points.push((seq.to_string(), opt.qp, anchor.r_pb, opt.k_star));
        }
    }
    Ok(points)
}

/// One line of the comparison report. Aggregate rows use `seq` "mean";
/// the closing row uses class "overall".
#[derive(Debug, Clone, PartialEq)]
pub struct CompareRow {
    pub class: String,
    pub seq: String,
    pub bd_psnr: f64,
    pub bd_rate: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompareReport {
    pub rows: Vec<CompareRow>,
}

impl CompareReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("class,seq,bd_psnr,bd_rate\n");
        for row in &self.rows {
            out.push_str(&format!(
                "{},{},{},{}\n",
                row.class, row.seq, row.bd_psnr, row.bd_rate
            ));
        }
        out
    }

    /// Fixed-width text table with the same rows as the CSV.
    pub fn to_table(&self) -> String {
        let mut out = format!(
            "{:<10} {:<14} {:>12} {:>12}\n",
            "class", "sequence", "BD-PSNR(dB)", "BD-Rate(%)"
        );
        for row in &self.rows {
            out.push_str(&format!(
                "{:<10} {:<14} {:>12.4} {:>12.3}\n",
                row.class, row.seq, row.bd_psnr, row.bd_rate
            ));
        }
        out
    }

    /// Mean BD-rate row for a class, when present.
    pub fn class_mean_bd_rate(&self, class: &str) -> Option<f64> {
        self.rows
            .iter()
            .find(|r| r.class == class && r.seq == "mean")
            .map(|r| r.bd_rate)
    }

    pub fn overall_bd_rate(&self) -> Option<f64> {
        self.class_mean_bd_rate("overall")
    }
}

/// Encodes every sequence twice per QP (anchor: fixed lambdas; test:
/// adaptive controller) and reports per-sequence, per-class, and
/// overall Bjontegaard deltas.
pub fn compare_adaptive(
    seqs: &[NamedSequence],
    qps: &[u8],
    profile: Profile,
) -> Result<CompareReport> {
    if qps.len() < 4 {
        return Err(LabError::Usage(format!(
            "the comparison needs at least 4 QPs for its RD curves, got {}",
            qps.len()
        )));
    }
    if seqs.is_empty() {
        return Err(LabError::Usage("no sequences to compare".into()));
    }

    let mut per_seq: Vec<(ContentClass, CompareRow)> = Vec::new();
    for seq in seqs {
        let mut anchor_points = Vec::with_capacity(qps.len());
        let mut test_points = Vec::with_capacity(qps.len());
        for &qp in qps {
            let (anchor, _) = run_rd_point(&seq.frames, &seq.id, qp, 1.0, false, profile)?;
            let (test, _) = run_rd_point(&seq.frames, &seq.id, qp, 1.0, true, profile)?;
            anchor_points.push(RdPoint { bitrate: anchor.bitrate_kbps, psnr: anchor.psnr_y });
            test_points.push(RdPoint { bitrate: test.bitrate_kbps, psnr: test.psnr_y });
        }
        let anchor_curve = RdCurve::new(anchor_points)?;
        let test_curve = RdCurve::new(test_points)?;
        per_seq.push((
            seq.class,
            CompareRow {
                class: seq.class.name().to_string(),
                seq: seq.id.clone(),
                bd_psnr: bd_psnr(&anchor_curve, &test_curve)?,
                bd_rate: bd_rate(&anchor_curve, &test_curve)?,
            },
        ));
    }

    let mut rows: Vec<CompareRow> = per_seq.iter().map(|(_, row)| row.clone()).collect();
    let mut seen_classes: Vec<ContentClass> = Vec::new();
    for (class, _) in &per_seq {
        if !seen_classes.contains(class) {
            seen_classes.push(*class);
        }
    }
    let mean_of = |rows: Vec<&CompareRow>, class: &str| CompareRow {
        class: class.to_string(),
        seq: "mean".to_string(),
        bd_psnr: rows.iter().map(|r| r.bd_psnr).sum::<f64>() / rows.len() as f64,
        bd_rate: rows.iter().map(|r| r.bd_rate).sum::<f64>() / rows.len() as f64,
    };
    for class in seen_classes {
        let members: Vec<&CompareRow> = per_seq
            .iter()
            .filter(|(c, _)| *c == class)
            .map(|(_, r)| r)
            .collect();
        rows.push(mean_of(members, class.name()));
    }
    rows.push(mean_of(per_seq.iter().map(|(_, r)| r).collect(), "overall"));
    Ok(CompareReport { rows })
}

/// Spearman rank correlation with average ranks for ties.
pub fn spearman(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(LabError::Data(format!(
            "spearman needs two equal-length samples of at least 2, got {} and {}",
            xs.len(),
            ys.len()
        )));
    }
    if xs.iter().chain(ys).any(|v| !v.is_finite()) {
        return Err(LabError::Data("spearman input contains non-finite values".into()));
    }
    let rx = ranks(xs);
    let ry = ranks(ys);
    let n = rx.len() as f64;
    let mean = (n + 1.0) / 2.0;
    let mut cov = 0.0;
    let mut var_x = 0.0;
    let mut var_y = 0.0;
    for (a, b) in rx.iter().zip(&ry) {
        cov += (a - mean) * (b - mean);
        var_x += (a - mean) * (a - mean);
        var_y += (b - mean) * (b - mean);
    }
    if var_x == 0.0 || var_y == 0.0 {
        return Err(LabError::Data(
            "spearman is undefined when a sample has no rank variation".into(),
        ));
    }
    Ok(cov / (var_x * var_y).sqrt())
}

fn ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut out = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        // 1-based rank averaged over the tied run.
        let rank = (i + j) as f64 / 2.0 + 1.0;
        for &idx in &order[i..=j] {
            out[idx] = rank;
        }
        i = j + 1;
    }
    out
}

/// Per-frame stats CSV, one row per frame in coding order.
pub fn write_stats_csv<W: Write>(mut w: W, stats: &[FrameStats]) -> std::io::Result<()> {
    writeln!(w, "idx,coding_order,type,lambda,bits,mse_y")?;
    for (coding_order, s) in stats.iter().enumerate() {
        writeln!(
            w,
            "{},{},{},{},{},{}",
            s.index, coding_order, s.frame_type, s.lambda_used, s.bits, s.mse_y
        )?;
    }
    Ok(())
}

/// Reads (bitrate, psnr) rows from a CSV whose header names the two
/// columns; sweep CSVs and minimal `bitrate,psnr` files both work.
pub fn read_rd_csv(text: &str) -> Result<Vec<RdPoint>> {
    let (header, rows) = split_header(text)?;
    let bitrate = find_column(&header, &["bitrate_kbps", "bitrate"])?;
    let psnr = find_column(&header, &["psnr_y", "psnr"])?;
    rows.iter()
        .map(|(lineno, fields)| {
            Ok(RdPoint {
                bitrate: parse_f64(fields, bitrate, *lineno)?,
                psnr: parse_f64(fields, psnr, *lineno)?,
            })
        })
        .collect()
}

/// Reads (r_pb, r_lambda) rows for the power fit.
pub fn read_fit_points_csv(text: &str) -> Result<Vec<(f64, f64)>> {
    let (header, rows) = split_header(text)?;
    let x = find_column(&header, &["r_pb"])?;
    let y = find_column(&header, &["r_lambda"])?;
    rows.iter()
        .map(|(lineno, fields)| {
            Ok((parse_f64(fields, x, *lineno)?, parse_f64(fields, y, *lineno)?))
        })
        .collect()
}

type CsvRows = Vec<(usize, Vec<String>)>;

fn split_header(text: &str) -> Result<(Vec<String>, CsvRows)> {
    let mut lines = text.lines().enumerate();
    let header = loop {
        match lines.next() {
            Some((_, line)) if line.trim().is_empty() => continue,
            Some((_, line)) => {
                break line.split(',').map(|f| f.trim().to_string()).collect::<Vec<_>>()
            }
            None => return Err(LabError::Data("CSV input is empty".into())),
        }
    };
    let mut rows = Vec::new();
    for (i, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<String> = line.split(',').map(|f| f.trim().to_string()).collect();
        if fields.len() != header.len() {
            return Err(LabError::Data(format!(
                "CSV line {}: expected {} fields, got {}",
                i + 1,
                header.len(),
                fields.len()
            )));
        }
        rows.push((i + 1, fields));
    }
    if rows.is_empty() {
        return Err(LabError::Data("CSV input has a header but no rows".into()));
    }
    Ok((header, rows))
}

fn find_column(header: &[String], names: &[&str]) -> Result<usize> {
    header
        .iter()
        .position(|h| names.contains(&h.as_str()))
        .ok_or_else(|| {
            LabError::Data(format!(
                "CSV header {header:?} has no column named any of {names:?}"
            ))
        })
}

fn parse_f64(fields: &[String], idx: usize, lineno: usize) -> Result<f64> {
    fields[idx].parse().map_err(|_| {
        LabError::Data(format!("CSV line {lineno}: bad number {:?}", fields[idx]))
    })
}
