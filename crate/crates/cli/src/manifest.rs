//! Figure presets and the bookkeeping written at the top of every CSV.

use std::fmt;
use std::str::FromStr;

use nda_snr::{Aggregation, EstimatorKind, Policy, SweepConfig, ThresholdMode};

use crate::args::{EstimatorArgs, SweepArgs};
use crate::error::{usage, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FigureTag {
    /// Mean estimate vs SNR, K = 1024.
    Fig2,
    /// NMSE vs SNR, K = 1024.
    Fig3,
    /// NMSE at very high SNR, K = 1024.
    Fig4,
    /// Mean estimate at very high SNR, K = 1024.
    Fig5,
    /// NMSE vs K at −7 dB.
    Fig6,
    /// NMSE and mean estimate vs K at −5 dB.
    Fig7,
    /// NMSE vs SNR with K = 64.
    Fig8,
    /// Difference-form fourth moment vs SNR.
    M4curve,
}

impl FigureTag {
    pub const ALL: [FigureTag; 8] = [
        FigureTag::Fig2,
        FigureTag::Fig3,
        FigureTag::Fig4,
        FigureTag::Fig5,
        FigureTag::Fig6,
        FigureTag::Fig7,
        FigureTag::Fig8,
        FigureTag::M4curve,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FigureTag::Fig2 => "fig2",
            FigureTag::Fig3 => "fig3",
            FigureTag::Fig4 => "fig4",
            FigureTag::Fig5 => "fig5",
            FigureTag::Fig6 => "fig6",
            FigureTag::Fig7 => "fig7",
            FigureTag::Fig8 => "fig8",
            FigureTag::M4curve => "m4curve",
        }
    }

    /// Sweep defaults for this figure.
    pub fn preset(self) -> SweepConfig {
        let k_doublings: Vec<usize> = (6..=13).map(|p| 1usize << p).collect();
        let base = SweepConfig {
            trials: 10_000,
            k_grid: vec![1024],
            ..SweepConfig::default()
        };
        match self {
            FigureTag::Fig2 | FigureTag::Fig3 => SweepConfig {
                snr_db_grid: inclusive_grid(-15.0, 1.0, 20.0),
                ..base
            },
            FigureTag::Fig4 | FigureTag::Fig5 => SweepConfig {
                snr_db_grid: inclusive_grid(40.0, 2.0, 70.0),
                ..base
            },
            FigureTag::Fig6 => SweepConfig {
                snr_db_grid: vec![-7.0],
                k_grid: k_doublings,
                ..base
            },
            FigureTag::Fig7 => SweepConfig {
                snr_db_grid: vec![-5.0],
                k_grid: k_doublings,
                ..base
            },
            FigureTag::Fig8 => SweepConfig {
                snr_db_grid: inclusive_grid(-15.0, 1.0, 15.0),
                k_grid: vec![64],
                ..base
            },
            FigureTag::M4curve => SweepConfig {
                snr_db_grid: inclusive_grid(-15.0, 1.0, 20.0),
                trials: 1000,
                ..base
            },
        }
    }
}

impl fmt::Display for FigureTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FigureTag {
    type Err = crate::error::CliError;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        FigureTag::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| usage(format!("unknown figure {s:?} (expected fig2..fig8 or m4curve)")))
    }
}

/// `start, start + step, ..., stop`, computed by index so no error accumulates.
pub fn inclusive_grid(start: f64, step: f64, stop: f64) -> Vec<f64> {
    let n = ((stop - start) / step + 1e-9).floor() as usize + 1;
    (0..n).map(|i| start + step * i as f64).collect()
}

pub fn parse_snr_grid(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    let [start, step, stop] = parts.as_slice() else {
        return Err(usage(format!("--snr-grid expects start:step:stop, got {spec:?}")));
    };
    let num = |s: &str| {
        s.trim()
            .parse::<f64>()
            .ok()
            .filter(|x| x.is_finite())
            .ok_or_else(|| usage(format!("bad number {s:?} in --snr-grid")))
    };
    let (start, step, stop) = (num(start)?, num(step)?, num(stop)?);
    if step <= 0.0 || stop < start {
        return Err(usage("--snr-grid needs step > 0 and stop >= start"));
    }
    Ok(inclusive_grid(start, step, stop))
}

pub fn parse_k_list(spec: &str) -> Result<Vec<usize>> {
    spec.split(',')
        .map(|s| {
            s.trim()
                .parse::<usize>()
                .map_err(|_| usage(format!("bad frame length {s:?}")))
        })
        .collect::<Result<Vec<_>>>()
        .and_then(|ks| {
            if ks.is_empty() || ks.iter().any(|&k| k < 2) {
                Err(usage("frame lengths must be at least 2"))
            } else {
                Ok(ks)
            }
        })
}

pub fn parse_estimators(spec: &str) -> Result<Vec<EstimatorKind>> {
    let kinds = spec
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| s.parse::<EstimatorKind>().map_err(Into::into))
        .collect::<Result<Vec<_>>>()?;
    if kinds.is_empty() {
        return Err(usage("estimator set is empty"));
    }
    Ok(kinds)
}

/// Applies the estimator-related flags on top of `policy` and `signal_power`.
pub fn apply_estimator_args(
    args: &EstimatorArgs,
    estimators: &mut Vec<EstimatorKind>,
    policy: &mut Policy,
    signal_power: &mut f64,
) -> Result<()> {
    if let Some(list) = &args.estimators {
        *estimators = parse_estimators(list)?;
    }
    if let Some(mode) = &args.threshold_mode {
        policy.mode = mode.parse::<ThresholdMode>()?;
    }
    if let Some(x) = args.m4_threshold {
        policy.m4_threshold = x;
    }
    if let Some(x) = args.oracle_cutoff_db {
        policy.oracle_cutoff_db = x;
    }
    *policy = Policy::new(policy.mode, policy.m4_threshold, policy.oracle_cutoff_db)?;
    if let Some(s) = args.signal_power {
        if !(s > 0.0 && s.is_finite()) {
            return Err(usage(format!("--signal-power must be positive, got {s}")));
        }
        *signal_power = s;
    }
    Ok(())
}

/// Everything needed to regenerate a CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct RunManifest {
    pub config: SweepConfig,
    pub artifact_version: String,
    pub timestamp: Option<String>,
    pub figure_tag: Option<FigureTag>,
}

impl RunManifest {
    /// Resolves the figure preset (if any) and applies explicit flags on top.
    pub fn from_args(args: &SweepArgs, forced_figure: Option<FigureTag>) -> Result<Self> {
        let figure_tag = match (forced_figure, &args.figure) {
            (Some(f), None) => Some(f),
            (Some(f), Some(given)) => {
                let given: FigureTag = given.parse()?;
                if given != f {
                    return Err(usage(format!("this subcommand always runs {f}, not {given}")));
                }
                Some(f)
            }
            (None, Some(given)) => Some(given.parse()?),
            (None, None) => None,
        };
        let mut config = figure_tag.map(FigureTag::preset).unwrap_or_default();
        if let Some(snr) = args.snr_db {
            config.snr_db_grid = vec![snr];
        }
        if let Some(grid) = &args.snr_grid {
            config.snr_db_grid = parse_snr_grid(grid)?;
        }
        if let Some(k) = args.k {
            config.k_grid = vec![k];
        }
        if let Some(list) = &args.k_grid {
            config.k_grid = parse_k_list(list)?;
        }
        if let Some(t) = args.trials {
            config.trials = t;
        }
        if let Some(s) = args.seed {
            config.master_seed = s;
        }
        if let Some(a) = &args.aggregation {
            config.aggregation = a.parse::<Aggregation>()?;
        }
        apply_estimator_args(
            &args.estimators,
            &mut config.estimators,
            &mut config.policy,
            &mut config.signal_power,
        )?;
        config.validate()?;
        let timestamp =
            (!args.no_timestamp).then(|| chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true));
        Ok(Self {
            config,
            artifact_version: env!("CARGO_PKG_VERSION").to_owned(),
            timestamp,
            figure_tag,
        })
    }

    /// `# `-prefixed header lines; the timestamp is always the last one.
    pub fn header_lines(&self, command: &str) -> Vec<String> {
        let c = &self.config;
        let join = |v: Vec<String>| v.join(";");
        let mut lines = vec![
            format!("# nda-snr {} {command}", self.artifact_version),
            format!("# figure={}", self.figure_tag.map_or("none", FigureTag::name)),
            format!(
                "# trials={} seed={} signal_power={} aggregation={}",
                c.trials, c.master_seed, c.signal_power, c.aggregation
            ),
            format!(
                "# estimators={} threshold_mode={} m4_threshold={} oracle_cutoff_db={}",
                c.ordered_estimators()
                    .iter()
                    .map(|k| k.name())
                    .collect::<Vec<_>>()
                    .join(","),
                c.policy.mode,
                c.policy.m4_threshold,
                c.policy.oracle_cutoff_db
            ),
            format!(
                "# snr_grid={}",
                join(c.snr_db_grid.iter().map(f64::to_string).collect())
            ),
            format!("# k_grid={}", join(c.k_grid.iter().map(usize::to_string).collect())),
        ];
        if let Some(ts) = &self.timestamp {
            lines.push(format!("# timestamp={ts}"));
        }
        lines
    }
}
