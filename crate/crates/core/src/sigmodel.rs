//! QPSK symbol generation and the AWGN channel.
//!
//! A received sample is `y = s + n` where `s` is drawn uniformly from the
//! four points `(±a, ±a)`, `a = sqrt(S / 2)`, and `n` is circular complex
//! Gaussian noise with variance `N / 2` per component.
//!
//! Every frame is a pure function of `(seed, trial_index, k, channel)`:
//! the generator is a ChaCha8 stream keyed by the 64-bit seed with the
//! trial index selecting the stream, and Gaussian variates come from the
//! ziggurat sampler in `rand_distr`.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, Result};
use crate::scalar::{from_db, Real};

/// One complex baseband sample; `re` is the in-phase and `im` the
/// quadrature component.
pub type ComplexSample<T> = Complex<T>;

/// Ground truth for one simulated channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelSpec<T> {
    signal_power: T,
    snr_db_true: T,
    seed: u64,
}

impl<T: Real> ChannelSpec<T> {
    pub fn new(signal_power: T, snr_db_true: T, seed: u64) -> Result<Self> {
        if signal_power <= T::zero() || !signal_power.is_finite() {
            return Err(invalid(format!(
                "signal power must be positive and finite, got {signal_power}"
            )));
        }
        if !snr_db_true.is_finite() {
            return Err(invalid(format!("true SNR must be finite, got {snr_db_true} dB")));
        }
        let spec = Self {
            signal_power,
            snr_db_true,
            seed,
        };
        let n = spec.noise_power();
        if n <= T::zero() || !n.is_finite() {
            return Err(invalid(format!(
                "noise power {n} derived from S={signal_power}, SNR={snr_db_true} dB is not representable"
            )));
        }
        Ok(spec)
    }

    /// Unit signal power, which the default `|M4|` threshold assumes.
    pub fn unit_power(snr_db_true: T, seed: u64) -> Result<Self> {
        Self::new(T::one(), snr_db_true, seed)
    }

    pub fn signal_power(&self) -> T {
        self.signal_power
    }

    pub fn snr_db_true(&self) -> T {
        self.snr_db_true
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// `N = S / 10^(snr_db / 10)`.
    pub fn noise_power(&self) -> T {
        self.signal_power / from_db(self.snr_db_true)
    }

    /// True SNR as a linear ratio `S / N`.
    pub fn snr_linear(&self) -> T {
        from_db(self.snr_db_true)
    }

    pub fn with_seed(self, seed: u64) -> Self {
        Self { seed, ..self }
    }
}

/// A block of `k` received samples together with the channel that made it.
#[derive(Debug, Clone, PartialEq)]
pub struct SignalFrame<T> {
    samples: Vec<ComplexSample<T>>,
    channel: ChannelSpec<T>,
}

impl<T: Real> SignalFrame<T> {
    pub fn new(samples: Vec<ComplexSample<T>>, channel: ChannelSpec<T>) -> Result<Self> {
        if samples.len() < 2 {
            return Err(invalid(format!(
                "a frame needs at least 2 samples, got {}",
                samples.len()
            )));
        }
        Ok(Self { samples, channel })
    }

    pub fn samples(&self) -> &[ComplexSample<T>] {
        &self.samples
    }

    pub fn channel(&self) -> &ChannelSpec<T> {
        &self.channel
    }

    pub fn k(&self) -> usize {
        self.samples.len()
    }

    pub fn into_samples(self) -> Vec<ComplexSample<T>> {
        self.samples
    }
}

/// Draws `count` i.i.d. uniform QPSK symbols of power `signal_power`.
pub fn generate_qpsk_symbols<T: Real, R: Rng + ?Sized>(
    count: usize,
    signal_power: T,
    rng: &mut R,
) -> Result<Vec<ComplexSample<T>>> {
    if count == 0 {
        return Err(invalid("symbol count must be at least 1"));
    }
    if signal_power <= T::zero() || !signal_power.is_finite() {
        return Err(invalid(format!(
            "signal power must be positive and finite, got {signal_power}"
        )));
    }
    let a = (signal_power / T::lit(2.0)).sqrt();
    let mut out = Vec::with_capacity(count);
    // 32 two-bit symbol indices per 64-bit draw.
    let mut bits = 0u64;
    for i in 0..count {
        if i % 32 == 0 {
            bits = rng.random();
        }
        let re = if bits & 1 == 0 { a } else { -a };
        let im = if bits & 2 == 0 { a } else { -a };
        bits >>= 2;
        out.push(Complex::new(re, im));
    }
    Ok(out)
}

/// Adds circular Gaussian noise of total power `noise_power`.
pub fn apply_awgn<T: Real, R: Rng + ?Sized>(
    symbols: &[ComplexSample<T>],
    noise_power: T,
    rng: &mut R,
) -> Result<Vec<ComplexSample<T>>> {
    if noise_power < T::zero() || !noise_power.is_finite() {
        return Err(invalid(format!(
            "noise power must be non-negative and finite, got {noise_power}"
        )));
    }
    if noise_power == T::zero() {
        return Ok(symbols.to_vec());
    }
    let sigma = (noise_power / T::lit(2.0)).sqrt();
    Ok(symbols
        .iter()
        .map(|s| {
            let n_i = T::standard_normal(rng);
            let n_q = T::standard_normal(rng);
            Complex::new(s.re + sigma * n_i, s.im + sigma * n_q)
        })
        .collect())
}

/// Generator for one trial: the ChaCha8 key comes from `seed`, the stream
/// number is the trial index, so trials never share generator state.
pub fn trial_rng(seed: u64, trial_index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial_index);
    rng
}

/// Generates the frame for `trial_index` of `channel`.
pub fn make_frame<T: Real>(channel: &ChannelSpec<T>, k: usize, trial_index: u64) -> Result<SignalFrame<T>> {
    if k < 2 {
        return Err(invalid(format!("k must be at least 2, got {k}")));
    }
    let mut rng = trial_rng(channel.seed, trial_index);
    let symbols = generate_qpsk_symbols(k, channel.signal_power, &mut rng)?;
    let samples = apply_awgn(&symbols, channel.noise_power(), &mut rng)?;
    SignalFrame::new(samples, *channel)
}

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Folds `words` into `master` with the SplitMix64 finalizer.
pub fn derive_seed(master: u64, words: &[u64]) -> u64 {
    words
        .iter()
        .fold(splitmix64(master), |acc, &w| splitmix64(acc ^ splitmix64(w)))
}
