//! Upper tail of the standard normal in the log domain.
//!
//! Below `CF_SWITCH` the tail is `libm::erfc(z/√2)/2`, which stays far above the
//! f64 underflow point. Above it the tail is `φ(z)·R(z)` where the Mills
//! ratio `R(z) = 1/(z + 1/(z + 2/(z + 3/(z + …))))` is evaluated by the
//! modified Lentz method, so the Gaussian factor is only ever taken as a log.
//! Negative arguments go through `ln(1 − Q(|z|))` with `ln_1p`.

use std::f64::consts::{LN_2, SQRT_2};

use super::LogProb;

const CF_SWITCH: f64 = 8.0;
const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// `log Q(z)` where `Q(z) = 1 − Φ(z)`, returned as a [`LogProb`].
pub fn log_normal_sf(z: f64) -> LogProb {
    LogProb::from_ln(ln_normal_sf(z))
}

/// Natural log of the standard normal survival function.
pub fn ln_normal_sf(z: f64) -> f64 {
    if z.is_nan() {
        return f64::NAN;
    }
    if z == f64::NEG_INFINITY {
        return 0.0;
    }
    if z == f64::INFINITY {
        return f64::NEG_INFINITY;
    }
    if z == 0.0 {
        return -LN_2;
    }
    if z < 0.0 {
        return (-upper_tail_linear(-z)).ln_1p();
    }
    if z < CF_SWITCH {
        (0.5 * libm::erfc(z / SQRT_2)).ln()
    } else {
        -0.5 * z * z - LN_SQRT_2PI + mills_ratio(z).ln()
    }
}

/// Natural log of the standard normal CDF.
pub fn ln_normal_cdf(z: f64) -> f64 {
    ln_normal_sf(-z)
}

fn upper_tail_linear(z: f64) -> f64 {
    0.5 * libm::erfc(z / SQRT_2)
}

/// Mills ratio `Q(z)/φ(z)` for `z` well into the tail.
fn mills_ratio(z: f64) -> f64 {
    const TINY: f64 = 1e-300;
    const EPS: f64 = 1e-16;
    // f = 0 + 1/(z + 1/(z + 2/(z + ...)))
    let mut f = TINY;
    let mut c = f;
    let mut d = 0.0;
    for k in 1..=500u32 {
        let a = if k == 1 { 1.0 } else { f64::from(k - 1) };
        d = z + a * d;
        if d == 0.0 {
            d = TINY;
        }
        c = z + a / c;
        if c == 0.0 {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < EPS {
            break;
        }
    }
    f
}
