//! Seeded Monte Carlo evaluation of the estimators over SNR × K grids.
//!
//! Each cell `(snr_db, k)` gets its own channel seed derived from the
//! master seed, and each trial its own ChaCha stream, so trials run on the
//! rayon pool in any order. Per-trial estimates are collected in trial
//! order and reduced sequentially, which keeps every aggregate bitwise
//! identical regardless of the number of worker threads.
//!
//! All estimators in a cell see the same frames and the same moments.
//!
//! Two reductions are available, see [`Aggregation`]. The default,
//! [`Aggregation::Magnitude`], scores `|ρ|`: the modified estimator's
//! positive root is never positive, its magnitude is the SNR estimate.
//! [`Aggregation::Signed`] scores the raw signed linear estimates. In both
//! cases the mean is taken in linear scale and converted to dB afterwards.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::analytic;
use crate::error::{invalid, Error, Result};
use crate::estimators::{compute_moments, estimate, EstimatorKind, MomentSet, ThresholdPolicy};
use crate::scalar::{from_db, to_db, Real};
use crate::sigmodel::{derive_seed, make_frame, ChannelSpec, SignalFrame};

/// How per-trial linear estimates are reduced to a [`SweepRecord`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Aggregation {
    /// Score `|ρ|`: NMSE and mean over `|ρ|`.
    #[default]
    Magnitude,
    /// Score the signed estimate: NMSE and mean over `ρ`.
    Signed,
}

impl fmt::Display for Aggregation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Aggregation::Magnitude => "magnitude",
            Aggregation::Signed => "signed",
        })
    }
}

impl FromStr for Aggregation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "magnitude" | "abs" => Ok(Aggregation::Magnitude),
            "signed" | "linear" => Ok(Aggregation::Signed),
            other => Err(invalid(format!(
                "unknown aggregation {other:?} (expected magnitude or signed)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub snr_db_grid: Vec<f64>,
    pub k_grid: Vec<usize>,
    pub trials: u64,
    pub master_seed: u64,
    pub estimators: Vec<EstimatorKind>,
    pub policy: ThresholdPolicy<f64>,
    pub signal_power: f64,
    pub aggregation: Aggregation,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            snr_db_grid: (-15..=20).map(f64::from).collect(),
            k_grid: vec![1024],
            trials: 10_000,
            master_seed: 1,
            estimators: EstimatorKind::ALL.to_vec(),
            policy: ThresholdPolicy::default(),
            signal_power: 1.0,
            aggregation: Aggregation::default(),
        }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(invalid("trials must be at least 1"));
        }
        if self.snr_db_grid.is_empty() {
            return Err(invalid("SNR grid is empty"));
        }
        if let Some(bad) = self.snr_db_grid.iter().find(|x| !x.is_finite()) {
            return Err(invalid(format!("SNR grid holds a non-finite value {bad}")));
        }
        if self.k_grid.is_empty() {
            return Err(invalid("K grid is empty"));
        }
        if let Some(k) = self.k_grid.iter().find(|&&k| k < 2) {
            return Err(invalid(format!("every k must be at least 2, got {k}")));
        }
        if self.estimators.is_empty() {
            return Err(invalid("no estimators selected"));
        }
        ThresholdPolicy::new(self.policy.mode, self.policy.m4_threshold, self.policy.oracle_cutoff_db)?;
        for &snr in &self.snr_db_grid {
            ChannelSpec::new(self.signal_power, snr, 0)?;
        }
        Ok(())
    }

    /// Channel for one cell, with the seed mixed from the master seed and
    /// the cell coordinates.
    pub fn cell_channel<T: Real>(&self, snr_db: f64, k: usize) -> Result<ChannelSpec<T>> {
        let seed = derive_seed(self.master_seed, &[snr_db.to_bits(), k as u64]);
        ChannelSpec::new(T::lit(self.signal_power), T::lit(snr_db), seed)
    }

    /// Selected estimators in reporting order, without duplicates.
    pub fn ordered_estimators(&self) -> Vec<EstimatorKind> {
        let mut kinds = self.estimators.clone();
        kinds.sort();
        kinds.dedup();
        kinds
    }

    fn ordered_grid(&self) -> (Vec<f64>, Vec<usize>) {
        let mut snrs = self.snr_db_grid.clone();
        snrs.sort_by(f64::total_cmp);
        snrs.dedup();
        let mut ks = self.k_grid.clone();
        ks.sort_unstable();
        ks.dedup();
        (snrs, ks)
    }
}

/// Aggregate statistics of one estimator in one cell.
///
/// `mean_rho_linear` is the mean of the scored values (`|ρ|` or `ρ`, see
/// [`Aggregation`]). `mean_rho_db` is `10·log10(mean_rho_linear)` and
/// `bias_db` its offset from the true SNR; both are `None` unless the mean
/// is positive. With no usable trials the mean and NMSE are NaN.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRecord {
    pub snr_db_true: f64,
    pub k: usize,
    pub estimator: EstimatorKind,
    pub mean_rho_linear: f64,
    pub mean_rho_db: Option<f64>,
    pub bias_db: Option<f64>,
    pub nmse: f64,
    pub excluded_trials: u64,
    pub trials_used: u64,
}

/// Reduces per-trial linear estimates, in the given order, to a record.
/// `None` entries are undefined estimates and are excluded.
pub fn aggregate(
    snr_db_true: f64,
    k: usize,
    estimator: EstimatorKind,
    estimates: &[Option<f64>],
    aggregation: Aggregation,
) -> SweepRecord {
    let truth = from_db(snr_db_true);
    let (mut sum, mut sq_err, mut used) = (0.0f64, 0.0f64, 0u64);
    for &rho in estimates.iter().flatten() {
        let v = match aggregation {
            Aggregation::Magnitude => rho.abs(),
            Aggregation::Signed => rho,
        };
        sum += v;
        sq_err += (truth - v).powi(2);
        used += 1;
    }
    let n = used as f64;
    let mean = if used > 0 { sum / n } else { f64::NAN };
    let nmse = if used > 0 {
        sq_err / n / (truth * truth)
    } else {
        f64::NAN
    };
    let mean_db = (mean > 0.0).then(|| to_db(mean)).filter(|m| m.is_finite());
    SweepRecord {
        snr_db_true,
        k,
        estimator,
        mean_rho_linear: mean,
        mean_rho_db: mean_db,
        bias_db: mean_db.map(|m| m - snr_db_true),
        nmse,
        excluded_trials: estimates.len() as u64 - used,
        trials_used: used,
    }
}

/// Runs one cell, one record per selected estimator.
pub fn run_cell<T: Real>(config: &SweepConfig, snr_db: f64, k: usize) -> Result<Vec<SweepRecord>> {
    run_cell_observed::<T, _>(config, snr_db, k, |_, _, _, _| {})
}

/// [`run_cell`] with a hook called for every estimator evaluation with the
/// trial index and the frame and moments the estimator was given.
pub fn run_cell_observed<T, F>(config: &SweepConfig, snr_db: f64, k: usize, observer: F) -> Result<Vec<SweepRecord>>
where
    T: Real,
    F: Fn(u64, EstimatorKind, &SignalFrame<T>, &MomentSet<T>) + Sync,
{
    config.validate()?;
    if k < 2 {
        return Err(invalid(format!("k must be at least 2, got {k}")));
    }
    let channel = config.cell_channel::<T>(snr_db, k)?;
    let kinds = config.ordered_estimators();
    let policy = config.policy.cast::<T>();
    let oracle = Some(T::lit(snr_db));

    let per_trial: Vec<Vec<Option<f64>>> = (0..config.trials)
        .into_par_iter()
        .map(|trial| {
            let frame = make_frame(&channel, k, trial).expect("channel and k were validated");
            let moments = compute_moments(&frame);
            kinds
                .iter()
                .map(|&kind| {
                    observer(trial, kind, &frame, &moments);
                    estimate(kind, &moments, &policy, oracle)
                        .expect("oracle SNR is always supplied")
                        .rho_linear
                        .map(Real::to_f64_lossy)
                })
                .collect()
        })
        .collect();

    let mut column = Vec::with_capacity(per_trial.len());
    Ok(kinds
        .iter()
        .enumerate()
        .map(|(i, &kind)| {
            column.clear();
            column.extend(per_trial.iter().map(|row| row[i]));
            aggregate(snr_db, k, kind, &column, config.aggregation)
        })
        .collect())
}

/// Every cell of the grid: SNR ascending, then K ascending, then estimator
/// in [`EstimatorKind`] order.
pub fn run_sweep<T: Real>(config: &SweepConfig) -> Result<Vec<SweepRecord>> {
    config.validate()?;
    let (snrs, ks) = config.ordered_grid();
    let mut out = Vec::with_capacity(snrs.len() * ks.len() * config.estimators.len());
    for &snr in &snrs {
        for &k in &ks {
            out.extend(run_cell::<T>(config, snr, k)?);
        }
    }
    Ok(out)
}

/// Difference-form fourth moment against SNR: the closed form next to its
/// Monte Carlo mean, and how often frames fall below the root threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct M4CurveRecord {
    pub snr_db_true: f64,
    pub k: usize,
    pub trials: u64,
    pub analytic_m4_diff: f64,
    pub empirical_m4_diff: f64,
    pub m4_threshold: f64,
    /// Fraction of frames with `|m4_diff|` below the threshold, i.e. frames
    /// on which the modified estimator takes the negative root.
    pub frac_below_threshold: f64,
}

pub fn run_m4_curve<T: Real>(config: &SweepConfig) -> Result<Vec<M4CurveRecord>> {
    config.validate()?;
    let (snrs, ks) = config.ordered_grid();
    let threshold = config.policy.m4_threshold;
    let mut out = Vec::with_capacity(snrs.len() * ks.len());
    for &snr in &snrs {
        for &k in &ks {
            let channel = config.cell_channel::<T>(snr, k)?;
            let values: Vec<f64> = (0..config.trials)
                .into_par_iter()
                .map(|trial| {
                    let frame = make_frame(&channel, k, trial).expect("channel and k were validated");
                    compute_moments(&frame).m4_diff.to_f64_lossy()
                })
                .collect();
            let n = values.len() as f64;
            let below = values.iter().filter(|v| v.abs() < threshold).count() as f64;
            let s = config.signal_power;
            out.push(M4CurveRecord {
                snr_db_true: snr,
                k,
                trials: config.trials,
                analytic_m4_diff: analytic::m4_diff(s, s / from_db(snr)),
                empirical_m4_diff: values.iter().sum::<f64>() / n,
                m4_threshold: threshold,
                frac_below_threshold: below / n,
            });
        }
    }
    Ok(out)
}
