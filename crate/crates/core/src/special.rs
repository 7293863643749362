//! Hyperbolic helpers that stay finite and accurate as their argument
//! goes to zero, plus a couple of overflow-safe variants.
//!
//! Every ρ → 0 limit in the closed forms is routed through these.

/// Below this magnitude the Taylor branch of [`sinhc`] and [`tanhc`] is used.
pub const SERIES_CUTOFF: f64 = 1e-4;

/// `sinh(x)/x`, equal to 1 at 0.
pub fn sinhc(x: f64) -> f64 {
    if x.abs() < SERIES_CUTOFF {
        let x2 = x * x;
        1.0 + x2 / 6.0 * (1.0 + x2 / 20.0)
    } else {
        x.sinh() / x
    }
}

/// `tanh(x)/x`, equal to 1 at 0.
pub fn tanhc(x: f64) -> f64 {
    if x.abs() < SERIES_CUTOFF {
        let x2 = x * x;
        1.0 - x2 / 3.0 * (1.0 - 0.4 * x2)
    } else {
        x.tanh() / x
    }
}

/// `sinh(x)cosh(x)/x = sinh(2x)/(2x)`.
pub fn sinh_cosh_c(x: f64) -> f64 {
    sinhc(2.0 * x)
}

/// `(sinh(2x)/(2x) − 1)/x²`, equal to 2/3 at 0.
///
/// Direct evaluation cancels badly for small `x`, so the series
/// `Σ_{j≥1} 4^j x^{2j−2}/(2j+1)!` is summed for `|x| < 0.5`.
pub fn sinh_cosh_excess(x: f64) -> f64 {
    if x.abs() < 0.5 {
        let x2 = x * x;
        let mut term = 4.0 / 6.0;
        let mut sum = term;
        let mut j = 1.0;
        loop {
            j += 1.0;
            term *= 4.0 * x2 / ((2.0 * j) * (2.0 * j + 1.0));
            sum += term;
            if term < 1e-18 * sum {
                break;
            }
        }
        sum
    } else {
        (sinh_cosh_c(x) - 1.0) / (x * x)
    }
}

/// `1/cosh²(x)`, underflowing to zero instead of overflowing.
pub fn sech2(x: f64) -> f64 {
    let a = x.abs();
    if a > 350.0 {
        return 0.0;
    }
    let e = (-a).exp();
    let s = 2.0 * e / (1.0 + e * e);
    s * s
}

/// `ln(1 + e^y)` without overflow.
pub fn softplus(y: f64) -> f64 {
    if y > 35.0 {
        y + (-y).exp()
    } else {
        y.exp().ln_1p()
    }
}

/// `ln(sinh(x))` for `x > 0`, valid far beyond the overflow point of `sinh`.
pub fn ln_sinh(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    if x > 20.0 {
        x - std::f64::consts::LN_2 + (-(-2.0 * x).exp()).ln_1p()
    } else {
        x.sinh().ln()
    }
}
