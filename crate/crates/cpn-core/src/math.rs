//! Thin wrappers over `libm` so the crate builds without `std`.

#[inline]
pub fn abs(x: f64) -> f64 {
    libm::fabs(x)
}

#[inline]
pub fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

#[inline]
pub fn exp(x: f64) -> f64 {
    libm::exp(x)
}

#[inline]
pub fn ln_1p(x: f64) -> f64 {
    libm::log1p(x)
}

#[inline]
pub fn sin(x: f64) -> f64 {
    libm::sin(x)
}

#[inline]
pub fn cos(x: f64) -> f64 {
    libm::cos(x)
}

#[inline]
pub fn atan2(y: f64, x: f64) -> f64 {
    libm::atan2(y, x)
}

#[inline]
pub fn round(x: f64) -> f64 {
    libm::round(x)
}

/// `x^k` for small non-negative integer exponents.
#[inline]
pub fn powi(x: f64, k: usize) -> f64 {
    let mut acc = 1.0;
    for _ in 0..k {
        acc *= x;
    }
    acc
}

/// Euclidean remainder into `[0, 2*pi)`.
#[inline]
pub fn wrap_angle(phi: f64) -> f64 {
    let tau = 2.0 * core::f64::consts::PI;
    let r = phi - tau * libm::floor(phi / tau);
    // floor can land exactly on tau after rounding
    if r >= tau {
        r - tau
    } else {
        r
    }
}

/// Distance between two angles modulo `2*pi`, in `[0, pi]`.
#[inline]
pub fn angle_distance(a: f64, b: f64) -> f64 {
    let d = wrap_angle(a - b);
    let tau = 2.0 * core::f64::consts::PI;
    if d > core::f64::consts::PI {
        tau - d
    } else {
        d
    }
}
