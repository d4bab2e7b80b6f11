//! CSV emission. Floats carry 9 significant digits; non-finite or
//! non-convertible values are written as `NA`.

use std::io::{self, Write};

use nda_snr::{M4CurveRecord, SweepRecord};

use crate::manifest::RunManifest;

pub const SWEEP_COLUMNS: &str =
    "snr_db_true,k,estimator,trials_used,excluded_trials,mean_rho_linear,mean_rho_db,bias_db,nmse";

pub const M4_COLUMNS: &str =
    "snr_db_true,k,trials,analytic_m4_diff,empirical_m4_diff,m4_threshold,frac_below_threshold";

pub fn float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.8e}")
    } else {
        "NA".to_owned()
    }
}

fn opt(x: Option<f64>) -> String {
    x.map_or_else(|| "NA".to_owned(), float)
}

pub fn write_sweep<W: Write>(mut w: W, manifest: &RunManifest, records: &[SweepRecord]) -> io::Result<()> {
    for line in manifest.header_lines("sweep") {
        writeln!(w, "{line}")?;
    }
    writeln!(w, "{SWEEP_COLUMNS}")?;
    for r in records {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{}",
            float(r.snr_db_true),
            r.k,
            r.estimator,
            r.trials_used,
            r.excluded_trials,
            float(r.mean_rho_linear),
            opt(r.mean_rho_db),
            opt(r.bias_db),
            float(r.nmse),
        )?;
    }
    w.flush()
}

pub fn write_m4_curve<W: Write>(mut w: W, manifest: &RunManifest, records: &[M4CurveRecord]) -> io::Result<()> {
    for line in manifest.header_lines("m4curve") {
        writeln!(w, "{line}")?;
    }
    writeln!(w, "{M4_COLUMNS}")?;
    for r in records {
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            float(r.snr_db_true),
            r.k,
            r.trials,
            float(r.analytic_m4_diff),
            float(r.empirical_m4_diff),
            float(r.m4_threshold),
            float(r.frac_below_threshold),
        )?;
    }
    w.flush()
}
