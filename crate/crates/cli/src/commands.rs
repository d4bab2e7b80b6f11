use std::fs::{self, File};
use std::hint::black_box;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::time::Instant;

use nda_snr::{
    compute_moments, estimate, make_frame, run_m4_curve, run_sweep, Channel, Estimate, EstimatorKind, Moments, Policy,
    Sample, SweepRecord, ThresholdMode,
};

use crate::args::{EstimateArgs, SweepArgs};
use crate::csv;
use crate::error::{usage, CliError, Result};
use crate::manifest::{apply_estimator_args, parse_k_list, FigureTag, RunManifest};

/// Reads whitespace-separated `re im` pairs, one per line. Blank lines and
/// lines starting with `#` are skipped.
pub fn read_iq_file(path: &Path) -> Result<Vec<Sample>> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_iq(path, &text)
}

pub fn parse_iq(path: &Path, text: &str) -> Result<Vec<Sample>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |msg: String| CliError::Parse {
            path: path.to_owned(),
            line: i + 1,
            msg,
        };
        let fields: Vec<&str> = line.split_whitespace().collect();
        let [re, im] = fields.as_slice() else {
            return Err(err(format!(
                "expected two numbers `re im`, got {} fields",
                fields.len()
            )));
        };
        let num = |s: &str| {
            s.parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| err(format!("not a finite number: {s:?}")))
        };
        out.push(Sample::new(num(re)?, num(im)?));
    }
    Ok(out)
}

pub struct EstimateReport {
    pub source: String,
    pub moments: Moments,
    pub results: Vec<(EstimatorKind, Estimate)>,
}

pub fn estimate_frame(args: &EstimateArgs) -> Result<EstimateReport> {
    let mut kinds = EstimatorKind::ALL.to_vec();
    let mut policy = Policy::default();
    let mut signal_power = 1.0;
    apply_estimator_args(&args.estimators, &mut kinds, &mut policy, &mut signal_power)?;
    kinds.sort();
    kinds.dedup();

    let (source, samples) = match (&args.input, args.snr_db) {
        (Some(path), _) => (format!("file {}", path.display()), read_iq_file(path)?),
        (None, Some(snr)) => {
            let channel = Channel::new(signal_power, snr, args.seed)?;
            let frame = make_frame(&channel, args.k, 0)?;
            (
                format!(
                    "generated QPSK, snr_db={snr}, k={}, seed={}, signal_power={signal_power}",
                    args.k, args.seed
                ),
                frame.into_samples(),
            )
        }
        (None, None) => return Err(usage("estimate needs --input or --snr-db")),
    };
    if policy.mode == ThresholdMode::OracleSnr && args.snr_db.is_none() {
        return Err(usage("oracle threshold mode needs --snr-db"));
    }
    let moments = Moments::from_samples(&samples)?;
    let results = kinds
        .into_iter()
        .map(|kind| Ok((kind, estimate(kind, &moments, &policy, args.snr_db)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(EstimateReport {
        source,
        moments,
        results,
    })
}

pub fn cmd_estimate(args: &EstimateArgs, out: &mut dyn Write) -> Result<()> {
    let report = estimate_frame(args)?;
    let m = &report.moments;
    let w = |e: std::io::Error| CliError::io("<stdout>", e);
    writeln!(out, "source: {}", report.source).map_err(w)?;
    writeln!(
        out,
        "moments: k={} m2={:.6e} m4_sum={:.6e} m4_diff={:.6e} lag1={:.6e}",
        m.k, m.m2, m.m4_sum, m.m4_diff, m.lag1
    )
    .map_err(w)?;
    writeln!(
        out,
        "{:<10} {:>16} {:>12} {:<18} status",
        "estimator", "rho_linear", "rho_db", "branch"
    )
    .map_err(w)?;
    let mut undefined = Vec::new();
    for (kind, r) in &report.results {
        let lin = r.rho_linear.map_or_else(|| "NA".to_owned(), |x| format!("{x:.6e}"));
        let db = r.rho_db().map_or_else(|| "NA".to_owned(), |x| format!("{x:.3}"));
        writeln!(
            out,
            "{:<10} {:>16} {:>12} {:<18} {}",
            kind.name(),
            lin,
            db,
            r.branch.name(),
            r.status.name()
        )
        .map_err(w)?;
        if !r.is_defined() {
            undefined.push(kind.name());
        }
    }
    if undefined.is_empty() {
        Ok(())
    } else {
        Err(CliError::Undefined(undefined.join(", ")))
    }
}

fn thread_pool(threads: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| usage(format!("cannot start {threads} worker threads: {e}")))
}

fn open_output<'a>(path: Option<&Path>, stdout: &'a mut dyn Write) -> Result<Box<dyn Write + 'a>> {
    match path {
        Some(p) => {
            let f = File::create(p).map_err(|e| CliError::io(p, e))?;
            Ok(Box::new(BufWriter::new(f)))
        }
        None => Ok(Box::new(stdout)),
    }
}

/// Runs the sweep described by `args` and writes its CSV.
pub fn cmd_sweep(args: &SweepArgs, forced: Option<FigureTag>, stdout: &mut dyn Write) -> Result<RunManifest> {
    let manifest = RunManifest::from_args(args, forced)?;
    let pool = thread_pool(args.threads)?;
    let out_name = args.out.as_deref().unwrap_or(Path::new("<stdout>")).to_owned();
    // Open the destination first so an unwritable path fails before the work.
    let mut sink = open_output(args.out.as_deref(), stdout)?;
    let io_err = |e| CliError::io(&out_name, e);
    if manifest.figure_tag == Some(FigureTag::M4curve) {
        let records = pool.install(|| run_m4_curve::<f64>(&manifest.config))?;
        csv::write_m4_curve(&mut sink, &manifest, &records).map_err(io_err)?;
    } else {
        let records: Vec<SweepRecord> = pool.install(|| run_sweep::<f64>(&manifest.config))?;
        csv::write_sweep(&mut sink, &manifest, &records).map_err(io_err)?;
    }
    Ok(manifest)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub k: usize,
    /// Median nanoseconds for the moments alone.
    pub moments_ns: f64,
    /// Median nanoseconds for moments plus one estimator, in
    /// [`EstimatorKind::ALL`] order.
    pub per_estimate_ns: [f64; 3],
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        0.5 * (xs[n / 2 - 1] + xs[n / 2])
    }
}

/// Median wall time per estimate. Each repetition times a batch of about
/// 2¹⁸ samples so short frames are not dominated by timer resolution, and
/// repetitions are interleaved across frame lengths and estimators so that
/// machine-wide slowdowns hit every series alike.
pub fn bench(k_grid: &[usize], repetitions: usize, snr_db: f64, seed: u64) -> Result<Vec<BenchRow>> {
    if repetitions == 0 {
        return Err(usage("repetitions must be at least 1"));
    }
    if let Some(k) = k_grid.iter().find(|&&k| k < 2) {
        return Err(usage(format!("frame lengths must be at least 2, got {k}")));
    }
    let channel = Channel::unit_power(snr_db, seed)?;
    let policy = Policy::default();
    let frames = k_grid
        .iter()
        .map(|&k| make_frame(&channel, k, 0))
        .collect::<nda_snr::Result<Vec<_>>>()?;

    // Series 0 is moments alone, series 1.. are moments plus each estimator.
    let run = |frame: &nda_snr::Frame, series: usize| {
        let m = compute_moments(black_box(frame));
        if let Some(&kind) = series.checked_sub(1).and_then(|i| EstimatorKind::ALL.get(i)) {
            black_box(estimate(kind, &m, &policy, None).expect("m4 threshold mode"));
        } else {
            black_box(m);
        }
    };
    let series = 1 + EstimatorKind::ALL.len();
    let mut samples = vec![vec![Vec::with_capacity(repetitions); series]; frames.len()];
    // The first round is an untimed warm-up.
    for round in 0..=repetitions {
        for (frame, per_series) in frames.iter().zip(&mut samples) {
            let batch = ((1usize << 18) / frame.k()).max(1);
            for (s, out) in per_series.iter_mut().enumerate() {
                let t = Instant::now();
                for _ in 0..batch {
                    run(frame, s);
                }
                if round > 0 {
                    out.push(t.elapsed().as_nanos() as f64 / batch as f64);
                }
            }
        }
    }
    Ok(frames
        .iter()
        .zip(samples)
        .map(|(frame, per_series)| {
            let mut medians = per_series.into_iter().map(median);
            let moments_ns = medians.next().expect("moments series");
            let mut per_estimate_ns = [0.0; 3];
            for (slot, m) in per_estimate_ns.iter_mut().zip(medians) {
                *slot = m;
            }
            BenchRow {
                k: frame.k(),
                moments_ns,
                per_estimate_ns,
            }
        })
        .collect())
}

pub fn cmd_bench(
    k_grid: &str,
    repetitions: usize,
    snr_db: f64,
    seed: u64,
    out: &mut dyn Write,
) -> Result<Vec<BenchRow>> {
    let ks = parse_k_list(k_grid)?;
    let rows = bench(&ks, repetitions, snr_db, seed)?;
    let w = |e: std::io::Error| CliError::io("<stdout>", e);
    writeln!(
        out,
        "{:>8} {:>14} {:>14} {:>14} {:>14}",
        "k", "moments_ns", "svr_ns", "modified_ns", "m2m4_ns"
    )
    .map_err(w)?;
    for r in &rows {
        writeln!(
            out,
            "{:>8} {:>14.1} {:>14.1} {:>14.1} {:>14.1}",
            r.k, r.moments_ns, r.per_estimate_ns[0], r.per_estimate_ns[1], r.per_estimate_ns[2]
        )
        .map_err(w)?;
    }
    Ok(rows)
}
