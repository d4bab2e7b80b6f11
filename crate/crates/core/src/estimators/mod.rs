//! Moment-based, non-data-aided SNR estimators for QPSK in AWGN.
//!
//! All three estimators work from the same [`MomentSet`]:
//!
//! * **SVR** inverts `β = (ρ² + 2ρ + 1) / (2ρ + 1)` with
//!   `β = lag1 / (m4_sum − lag1)`, giving `ρ = β − 1 + sqrt(β(β − 1))`.
//! * **Modified SVR** swaps in the difference-form fourth moment,
//!   `β = lag1 / (m4_diff − lag1) = −(ρ + 1)² / ρ²`, which has two roots
//!   `ρ = (−1 ± sqrt(−β)) / (β + 1)`. The `−` root is exact on noiseless
//!   moments; the `+` root is selected at low SNR, detected by
//!   `|m4_diff| ≥ threshold` (or by a known SNR in oracle mode).
//! * **M2M4** uses `ρ = sqrt(2·m2² − m4_sum) / (m2 − sqrt(2·m2² − m4_sum))`.
//!
//! Estimates are linear SNR. Sampling noise regularly pushes the radicands
//! outside their domain at low SNR or small `K`; those cases are clamped
//! and flagged with [`Status::DomainClamped`]. Singular denominators give
//! [`Status::Undefined`] and no value.

mod moments;

use std::fmt;
use std::str::FromStr;

pub use moments::{compute_moments, MomentSet};

use crate::error::{invalid, Error, Result};
use crate::scalar::{to_db, Real};

/// The three estimators, in the fixed order used for reporting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EstimatorKind {
    Svr,
    Modified,
    M2m4,
}

impl EstimatorKind {
    pub const ALL: [EstimatorKind; 3] = [EstimatorKind::Svr, EstimatorKind::Modified, EstimatorKind::M2m4];

    pub fn name(self) -> &'static str {
        match self {
            EstimatorKind::Svr => "svr",
            EstimatorKind::Modified => "modified",
            EstimatorKind::M2m4 => "m2m4",
        }
    }
}

impl fmt::Display for EstimatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EstimatorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "svr" => Ok(EstimatorKind::Svr),
            "modified" | "modified_svr" | "proposed" => Ok(EstimatorKind::Modified),
            "m2m4" => Ok(EstimatorKind::M2m4),
            other => Err(invalid(format!(
                "unknown estimator {other:?} (expected svr, modified or m2m4)"
            ))),
        }
    }
}

/// Which formula produced an estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Branch {
    Svr,
    /// `(−1 − sqrt(−β)) / (β + 1)`
    ModifiedNegRoot,
    /// `(−1 + sqrt(−β)) / (β + 1)`
    ModifiedPosRoot,
    M2m4,
}

impl Branch {
    pub fn name(self) -> &'static str {
        match self {
            Branch::Svr => "svr",
            Branch::ModifiedNegRoot => "modified_neg_root",
            Branch::ModifiedPosRoot => "modified_pos_root",
            Branch::M2m4 => "m2m4",
        }
    }
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Status {
    Ok,
    /// A negative radicand was clamped to zero.
    DomainClamped,
    /// A denominator vanished; there is no estimate.
    Undefined,
}

impl Status {
    pub fn name(self) -> &'static str {
        match self {
            Status::Ok => "ok",
            Status::DomainClamped => "domain_clamped",
            Status::Undefined => "undefined",
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One estimate. `rho_linear` is `None` exactly when `status` is `Undefined`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimatorResult<T> {
    pub rho_linear: Option<T>,
    pub branch: Branch,
    pub status: Status,
}

impl<T: Real> EstimatorResult<T> {
    fn value(rho: T, branch: Branch, clamped: bool) -> Self {
        if !rho.is_finite() {
            return Self::undefined(branch);
        }
        let status = if clamped { Status::DomainClamped } else { Status::Ok };
        Self {
            rho_linear: Some(rho),
            branch,
            status,
        }
    }

    fn undefined(branch: Branch) -> Self {
        Self {
            rho_linear: None,
            branch,
            status: Status::Undefined,
        }
    }

    pub fn is_defined(&self) -> bool {
        self.status != Status::Undefined
    }

    /// Estimate in dB; `None` when undefined or not positive.
    pub fn rho_db(&self) -> Option<T> {
        self.rho_linear.filter(|r| *r > T::zero()).map(to_db)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum ThresholdMode {
    /// Practical rule: switch roots on the measured `|m4_diff|`.
    #[default]
    M4Threshold,
    /// Validation rule: switch roots on the true SNR.
    OracleSnr,
}

impl FromStr for ThresholdMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "m4" | "m4_threshold" => Ok(ThresholdMode::M4Threshold),
            "oracle" | "oracle_snr" => Ok(ThresholdMode::OracleSnr),
            other => Err(invalid(format!(
                "unknown threshold mode {other:?} (expected m4 or oracle)"
            ))),
        }
    }
}

impl fmt::Display for ThresholdMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ThresholdMode::M4Threshold => "m4",
            ThresholdMode::OracleSnr => "oracle",
        })
    }
}

/// Root selection for the modified estimator.
///
/// The default `m4_threshold` of 20 is calibrated for unit signal power:
/// `m4_diff` scales with `S²`, so it must be rescaled for other powers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdPolicy<T> {
    pub mode: ThresholdMode,
    pub m4_threshold: T,
    pub oracle_cutoff_db: T,
}

impl<T: Real> Default for ThresholdPolicy<T> {
    fn default() -> Self {
        Self {
            mode: ThresholdMode::M4Threshold,
            m4_threshold: T::lit(20.0),
            oracle_cutoff_db: T::lit(-5.0),
        }
    }
}

impl<T: Real> ThresholdPolicy<T> {
    pub fn new(mode: ThresholdMode, m4_threshold: T, oracle_cutoff_db: T) -> Result<Self> {
        if m4_threshold <= T::zero() || !m4_threshold.is_finite() {
            return Err(invalid(format!("m4 threshold must be positive, got {m4_threshold}")));
        }
        if !oracle_cutoff_db.is_finite() {
            return Err(invalid("oracle cutoff must be finite"));
        }
        Ok(Self {
            mode,
            m4_threshold,
            oracle_cutoff_db,
        })
    }

    pub fn oracle() -> Self {
        Self {
            mode: ThresholdMode::OracleSnr,
            ..Self::default()
        }
    }

    pub fn cast<U: Real>(&self) -> ThresholdPolicy<U> {
        ThresholdPolicy {
            mode: self.mode,
            m4_threshold: U::lit(self.m4_threshold.to_f64_lossy()),
            oracle_cutoff_db: U::lit(self.oracle_cutoff_db.to_f64_lossy()),
        }
    }
}

fn ratio_beta<T: Real>(lag1: T, fourth: T) -> Result<T> {
    let den = fourth - lag1;
    if den == T::zero() {
        return Err(Error::UndefinedBeta);
    }
    Ok(lag1 / den)
}

/// `lag1 / (m4_sum − lag1)`.
pub fn beta_svr<T: Real>(m: &MomentSet<T>) -> Result<T> {
    ratio_beta(m.lag1, m.m4_sum)
}

/// `lag1 / (m4_diff − lag1)`.
pub fn beta_modified<T: Real>(m: &MomentSet<T>) -> Result<T> {
    ratio_beta(m.lag1, m.m4_diff)
}

pub fn estimate_svr<T: Real>(m: &MomentSet<T>) -> EstimatorResult<T> {
    let Ok(beta) = beta_svr(m) else {
        return EstimatorResult::undefined(Branch::Svr);
    };
    let radicand = beta * (beta - T::one());
    let clamped = radicand < T::zero();
    let rho = beta - T::one() + radicand.max(T::zero()).sqrt();
    EstimatorResult::value(rho, Branch::Svr, clamped)
}

/// Both roots of the modified estimator for a given β, `(neg, pos)`, and
/// whether `sqrt(−β)` had to be clamped. `None` when `β = −1`.
pub fn modified_roots<T: Real>(beta: T) -> Option<(T, T, bool)> {
    let den = beta + T::one();
    if den == T::zero() {
        return None;
    }
    let clamped = beta > T::zero();
    let s = (-beta).max(T::zero()).sqrt();
    Some(((-T::one() - s) / den, (-T::one() + s) / den, clamped))
}

/// Modified SVR estimate. `oracle_snr_db` is the true SNR and is required
/// only when `policy.mode` is [`ThresholdMode::OracleSnr`].
pub fn estimate_modified_svr<T: Real>(
    m: &MomentSet<T>,
    policy: &ThresholdPolicy<T>,
    oracle_snr_db: Option<T>,
) -> Result<EstimatorResult<T>> {
    let use_neg_root = match policy.mode {
        ThresholdMode::M4Threshold => m.m4_diff.abs() < policy.m4_threshold,
        ThresholdMode::OracleSnr => {
            let snr = oracle_snr_db.ok_or_else(|| invalid("oracle threshold mode needs the true SNR"))?;
            snr > policy.oracle_cutoff_db
        }
    };
    let branch = if use_neg_root {
        Branch::ModifiedNegRoot
    } else {
        Branch::ModifiedPosRoot
    };
    let Ok(beta) = beta_modified(m) else {
        return Ok(EstimatorResult::undefined(branch));
    };
    let Some((neg, pos, clamped)) = modified_roots(beta) else {
        return Ok(EstimatorResult::undefined(branch));
    };
    let rho = if use_neg_root { neg } else { pos };
    Ok(EstimatorResult::value(rho, branch, clamped))
}

pub fn estimate_m2m4<T: Real>(m: &MomentSet<T>) -> EstimatorResult<T> {
    let r = T::lit(2.0) * m.m2 * m.m2 - m.m4_sum;
    let clamped = r < T::zero();
    let signal = r.max(T::zero()).sqrt();
    let noise = m.m2 - signal;
    if noise == T::zero() {
        return EstimatorResult::undefined(Branch::M2m4);
    }
    EstimatorResult::value(signal / noise, Branch::M2m4, clamped)
}

/// Dispatches to one estimator.
pub fn estimate<T: Real>(
    kind: EstimatorKind,
    m: &MomentSet<T>,
    policy: &ThresholdPolicy<T>,
    oracle_snr_db: Option<T>,
) -> Result<EstimatorResult<T>> {
    match kind {
        EstimatorKind::Svr => Ok(estimate_svr(m)),
        EstimatorKind::Modified => estimate_modified_svr(m, policy, oracle_snr_db),
        EstimatorKind::M2m4 => Ok(estimate_m2m4(m)),
    }
}
