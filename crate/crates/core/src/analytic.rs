//! Closed-form moments of unit-rate QPSK in AWGN with signal power `s` and
//! noise power `n`, and the β curves they imply.

use crate::scalar::Real;

/// `E|y|² = S + N`.
pub fn m2<T: Real>(s: T, n: T) -> T {
    s + n
}

/// `E{(y_I² + y_Q²)²} = S² + 4SN + 2N²`.
pub fn m4_sum<T: Real>(s: T, n: T) -> T {
    s * s + T::lit(4.0) * s * n + T::lit(2.0) * n * n
}

/// `E{(y_I² − y_Q²)²} = 2SN + N²`.
pub fn m4_diff<T: Real>(s: T, n: T) -> T {
    T::lit(2.0) * s * n + n * n
}

/// `E{|y_n|² |y_{n−1}|²} = (S + N)²`.
pub fn lag1<T: Real>(s: T, n: T) -> T {
    (s + n) * (s + n)
}

/// SVR β as a function of the linear SNR: `(ρ + 1)² / (2ρ + 1)`.
pub fn beta_svr<T: Real>(rho: T) -> T {
    (rho + T::one()).powi(2) / (T::lit(2.0) * rho + T::one())
}

/// Modified β as a function of the linear SNR: `−(ρ + 1)² / ρ²`.
pub fn beta_modified<T: Real>(rho: T) -> T {
    -(rho + T::one()).powi(2) / (rho * rho)
}
