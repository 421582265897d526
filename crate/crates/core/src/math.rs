//! `f64` helpers backed by `libm`, since `core` has no float intrinsics.

pub use libm::{atan, erf, exp, fabs, floor, ceil, log, sin, sqrt};

pub const LN_2PI_E: f64 = 2.837_877_066_409_345_5;

#[inline]
pub fn clamp(x: f64, lo: f64, hi: f64) -> f64 {
    if x < lo {
        lo
    } else if x > hi {
        hi
    } else {
        x
    }
}

/// Standard normal CDF.
#[inline]
pub fn normal_cdf(z: f64) -> f64 {
    0.5 * (1.0 + erf(z / core::f64::consts::SQRT_2))
}

#[inline]
pub fn powi(mut base: f64, mut exp: u32) -> f64 {
    let mut acc = 1.0;
    while exp > 0 {
        if exp & 1 == 1 {
            acc *= base;
        }
        base *= base;
        exp >>= 1;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ln_2pi_e_constant() {
        let direct = log(2.0 * core::f64::consts::PI * core::f64::consts::E);
        assert!((direct - LN_2PI_E).abs() < 1e-15);
    }

    #[test]
    fn powi_matches_repeated_product() {
        assert_eq!(powi(0.9, 0), 1.0);
        assert!((powi(0.9, 3) - 0.729).abs() < 1e-15);
    }
}
