use crate::error::{invalid, Result};
use crate::scalar::Real;
use crate::sigmodel::{ComplexSample, SignalFrame};

/// Sample moments of one frame.
///
/// * `m2` is `(1/K) Σ |y_n|²`.
/// * `m4_sum` is `(1/K) Σ |y_n|⁴`, i.e. `(y_I² + y_Q²)²`.
/// * `m4_diff` is `(1/K) Σ (y_I² − y_Q²)²`.
/// * `lag1` is `(1/(K−1)) Σ_{n≥1} |y_n|² |y_{n−1}|²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentSet<T> {
    pub m2: T,
    pub m4_sum: T,
    pub m4_diff: T,
    pub lag1: T,
    pub k: usize,
}

impl<T: Real> MomentSet<T> {
    pub fn new(m2: T, m4_sum: T, m4_diff: T, lag1: T, k: usize) -> Self {
        Self {
            m2,
            m4_sum,
            m4_diff,
            lag1,
            k,
        }
    }

    /// Single pass over `samples`.
    pub fn from_samples(samples: &[ComplexSample<T>]) -> Result<Self> {
        let k = samples.len();
        if k < 2 {
            return Err(invalid(format!("moments need at least 2 samples, got {k}")));
        }
        let zero = T::zero();
        let (mut p_sum, mut p2_sum, mut d2_sum, mut lag_sum) = (zero, zero, zero, zero);
        let mut prev: Option<T> = None;
        for y in samples {
            let (i2, q2) = (y.re * y.re, y.im * y.im);
            let p = i2 + q2;
            let d = i2 - q2;
            p_sum = p_sum + p;
            p2_sum = p2_sum + p * p;
            d2_sum = d2_sum + d * d;
            if let Some(q) = prev {
                lag_sum = lag_sum + p * q;
            }
            prev = Some(p);
        }
        let kf = T::from_usize(k).expect("sample count fits the scalar");
        let pairs = kf - T::one();
        Ok(Self {
            m2: p_sum / kf,
            m4_sum: p2_sum / kf,
            m4_diff: d2_sum / kf,
            lag1: lag_sum / pairs,
            k,
        })
    }

    /// Applies `f` to every moment, keeping `k`.
    pub fn map<U: Real>(&self, f: impl Fn(T) -> U) -> MomentSet<U> {
        MomentSet {
            m2: f(self.m2),
            m4_sum: f(self.m4_sum),
            m4_diff: f(self.m4_diff),
            lag1: f(self.lag1),
            k: self.k,
        }
    }
}

/// Moments of a frame; cannot fail because frames hold at least two samples.
pub fn compute_moments<T: Real>(frame: &SignalFrame<T>) -> MomentSet<T> {
    MomentSet::from_samples(frame.samples()).expect("frames hold at least two samples")
}
