//! Float helpers routed through `libm` so results do not depend on `std`.

use core::f64::consts::PI;
use num_complex::Complex64;

pub(crate) const TAU: f64 = 2.0 * PI;

#[inline]
pub(crate) fn abs(x: f64) -> f64 {
    libm::fabs(x)
}

#[inline]
pub(crate) fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

#[inline]
pub(crate) fn exp(x: f64) -> f64 {
    libm::exp(x)
}

#[inline]
pub(crate) fn ln(x: f64) -> f64 {
    libm::log(x)
}

#[inline]
pub(crate) fn powf(x: f64, p: f64) -> f64 {
    libm::pow(x, p)
}

#[inline]
pub(crate) fn floor(x: f64) -> f64 {
    libm::floor(x)
}

/// `x mod 1` in `[0, 1)`.
#[inline]
pub(crate) fn frac(x: f64) -> f64 {
    let r = x - floor(x);
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

/// Reduces `t` modulo 1 into `[-1/2, 1/2)`.
#[inline]
pub(crate) fn wrap_half(t: f64) -> f64 {
    let r = frac(t + 0.5) - 0.5;
    if r >= 0.5 {
        r - 1.0
    } else {
        r
    }
}

/// `e^{2πi x}` with the argument reduced modulo 1 first.
#[inline]
pub(crate) fn unit_phase(x: f64) -> Complex64 {
    let theta = TAU * frac(x);
    let (s, c) = libm::sincos(theta);
    Complex64::new(c, s)
}

pub(crate) fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a
}
