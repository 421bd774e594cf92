//! Fixtures shared by the benchmarks.

use sugeno_hh::{RealInterval, ScalarFunction};

/// `x^4 / 2` on `[0, 1]`, increasing.
pub fn quartic() -> ScalarFunction {
    ScalarFunction::power(0.5, 4.0, 0.0, RealInterval::unit())
}

/// `x^4 / 2` with no monotonicity hint, forcing grid level sets.
pub fn quartic_opaque() -> ScalarFunction {
    ScalarFunction::new("x^4/2", RealInterval::unit(), |x| x.powi(4) / 2.0)
}

/// `sin(pi x)` on `[0, 1]`, not monotone.
pub fn sine() -> ScalarFunction {
    ScalarFunction::new("sin(pi x)", RealInterval::unit(), |x| {
        (std::f64::consts::PI * x).sin()
    })
}
