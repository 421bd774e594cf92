//! Sugeno integral of a non-negative function over a real interval with
//! respect to Lebesgue measure.
//!
//! Two routes are provided. [`sugeno_fixed_point`] locates the crossing of
//! the distribution function with the diagonal, `F(beta) = beta`.
//! [`sugeno_supmin`] evaluates `sup_beta min(beta, F(beta))` on a threshold
//! grid and serves as the oracle for the first.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::{
    DistributionProfile, DistributionStrategy, Monotonicity, RealInterval, ScalarFunction,
    DEFAULT_GRID,
};

pub const DEFAULT_TOL: f64 = 1e-9;

/// Number of cells sampled when checking `f >= 0` or inferring monotonicity.
pub const DEFAULT_PROBE_SAMPLES: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SugenoMethod {
    FixedPoint,
    SupMinGrid,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SugenoResult {
    pub value: f64,
    pub method: SugenoMethod,
    /// `|F(value) - value|` for the fixed point, threshold spacing for sup-min.
    pub residual: f64,
    pub strategy: DistributionStrategy,
}

/// Solves `F(beta) = beta` by bisection on `[0, mu(A)]`.
///
/// The bisection tracks the predicate `F(beta) >= beta`, which holds below
/// the crossing and fails above it because `F` is non-increasing. The
/// returned point is therefore `sup { beta : F(beta) >= beta }` even when `F`
/// jumps across the diagonal; in that case the residual is the jump size.
pub fn sugeno_fixed_point(profile: &DistributionProfile, tol: f64) -> Result<SugenoResult> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter {
            name: "tol",
            value: tol,
            reason: "tolerance must be positive",
        });
    }
    let len = profile.interval().length();
    let strategy = profile.strategy();
    if len == 0.0 {
        return Ok(SugenoResult {
            value: 0.0,
            method: SugenoMethod::FixedPoint,
            residual: 0.0,
            strategy,
        });
    }

    let gap = |beta: f64| profile.distribution_at(beta).map(|fb| fb - beta);
    let at_zero = gap(0.0)?;
    let at_len = gap(len)?;
    if at_zero.is_nan() || at_len.is_nan() || at_zero < 0.0 || at_len > 0.0 {
        return Err(Error::NoSignChange { hi: len });
    }
    if at_len == 0.0 {
        return Ok(SugenoResult {
            value: len,
            method: SugenoMethod::FixedPoint,
            residual: 0.0,
            strategy,
        });
    }

    let (mut below, mut above) = (0.0_f64, len);
    while above - below > 0.5 * tol {
        let mid = 0.5 * (below + above);
        if mid <= below || mid >= above {
            break;
        }
        let g = gap(mid)?;
        if g.is_nan() {
            return Err(Error::NoSignChange { hi: len });
        }
        if g >= 0.0 {
            below = mid;
        } else {
            above = mid;
        }
    }
    let value = 0.5 * (below + above);
    let residual = gap(value)?.abs();
    Ok(SugenoResult {
        value,
        method: SugenoMethod::FixedPoint,
        residual,
        strategy,
    })
}

/// Direct evaluation of the definition, `max_k min(beta_k, F(beta_k))`, over
/// `n + 1` equally spaced thresholds in `[0, max(sup f, mu(A))]`, with `F`
/// measured on an `n`-cell grid.
pub fn sugeno_supmin(f: &ScalarFunction, a: &RealInterval, n: usize) -> Result<SugenoResult> {
    if n < 2 {
        return Err(Error::InvalidParameter {
            name: "n",
            value: n as f64,
            reason: "sup-min needs at least two thresholds",
        });
    }
    let strategy = DistributionStrategy::GridScan(n);
    let profile = DistributionProfile::new(f.clone(), *a, strategy)?;
    let top = profile.sup_estimate().max(a.length());
    let mut best = 0.0_f64;
    for k in 0..=n {
        let beta = top * (k as f64 / n as f64);
        let v = beta.min(profile.distribution_at(beta)?);
        if v > best {
            best = v;
        }
    }
    Ok(SugenoResult {
        value: best,
        method: SugenoMethod::SupMinGrid,
        residual: top / n as f64,
        strategy,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MethodChoice {
    /// Fixed point, falling back to sup-min when no crossing is bracketed.
    Auto,
    FixedPoint,
    SupMin,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SugenoOptions {
    pub method: MethodChoice,
    pub grid: usize,
    pub tol: f64,
    pub probe_samples: usize,
    /// Sample `f` to pick a closed-form strategy when it carries no hint.
    pub infer_monotonicity: bool,
}

impl Default for SugenoOptions {
    fn default() -> Self {
        Self {
            method: MethodChoice::Auto,
            grid: DEFAULT_GRID,
            tol: DEFAULT_TOL,
            probe_samples: DEFAULT_PROBE_SAMPLES,
            infer_monotonicity: false,
        }
    }
}

/// Sugeno integral of `f` over `a`.
pub fn sugeno_integral(
    f: &ScalarFunction,
    a: &RealInterval,
    opts: &SugenoOptions,
) -> Result<SugenoResult> {
    f.check_non_negative(a, opts.probe_samples)?;
    if opts.method == MethodChoice::SupMin {
        return sugeno_supmin(f, a, opts.grid);
    }
    let mut g = f.clone();
    if g.hint() == Monotonicity::Unknown && opts.infer_monotonicity {
        let hint = g.infer_monotonicity(a, opts.probe_samples);
        g = g.with_hint(hint);
    }
    let profile = DistributionProfile::best(g, *a, opts.grid)?;
    match sugeno_fixed_point(&profile, opts.tol) {
        Err(Error::NoSignChange { .. }) if opts.method == MethodChoice::Auto => {
            sugeno_supmin(f, a, opts.grid)
        }
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit() -> RealInterval {
        RealInterval::unit()
    }

    fn closed(f: ScalarFunction) -> DistributionProfile {
        DistributionProfile::new(f, unit(), DistributionStrategy::MonotoneClosedForm).unwrap()
    }

    // Roots of the fixed-point equations, computed independently by
    // substitution and high-precision polynomial root finding:
    //   x^4/2: s^4 + 2s - 2 = 0, beta = s^4/2
    //   x^3/3: s^3 + 3s - 3 = 0, beta = s^3/3
    const QUARTIC_ROOT: f64 = 0.202_376_890_205_484_15;
    const CUBIC_ROOT: f64 = 0.182_268_326_113_176_5;

    #[test]
    fn quartic_fixed_point() {
        let r = sugeno_fixed_point(&closed(ScalarFunction::power(0.5, 4.0, 0.0, unit())), 1e-9)
            .unwrap();
        assert!((r.value - 0.2023).abs() < 5e-4);
        assert!((r.value - QUARTIC_ROOT).abs() < 1e-9);
        assert!(r.residual < 1e-9);
    }

    #[test]
    fn quadratic_examples_match_exact_roots() {
        let half_sq =
            sugeno_fixed_point(&closed(ScalarFunction::power(0.5, 2.0, 0.0, unit())), 1e-9)
                .unwrap();
        assert!((half_sq.value - (2.0 - 3f64.sqrt())).abs() < 1e-9);
        let three_sq =
            sugeno_fixed_point(&closed(ScalarFunction::power(3.0, 2.0, 0.0, unit())), 1e-9)
                .unwrap();
        assert!((three_sq.value - (7.0 - 13f64.sqrt()) / 6.0).abs() < 1e-9);
    }

    #[test]
    fn identity_is_one_half() {
        let r = sugeno_fixed_point(&closed(ScalarFunction::power(1.0, 1.0, 0.0, unit())), 1e-9)
            .unwrap();
        assert!((r.value - 0.5).abs() < 1e-9);
    }

    #[test]
    fn supmin_agrees_on_quartic() {
        let r = sugeno_supmin(
            &ScalarFunction::power(0.5, 4.0, 0.0, unit()),
            &unit(),
            10_000,
        )
        .unwrap();
        assert_eq!(r.method, SugenoMethod::SupMinGrid);
        assert!((r.value - 0.2023).abs() < 1e-3);
        assert!((r.value - QUARTIC_ROOT).abs() < 1e-3);
    }

    #[test]
    fn supmin_constants() {
        let r = sugeno_supmin(&ScalarFunction::constant(0.3, unit()), &unit(), 1000).unwrap();
        assert!((r.value - 0.3).abs() < 1e-12);
        let r = sugeno_supmin(&ScalarFunction::constant(2.0, unit()), &unit(), 1000).unwrap();
        assert!((r.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn supmin_rejects_tiny_grid() {
        assert!(sugeno_supmin(&ScalarFunction::constant(1.0, unit()), &unit(), 1).is_err());
    }

    #[test]
    fn cubic_integral_is_derived_root() {
        let r = sugeno_integral(
            &ScalarFunction::power(1.0 / 3.0, 3.0, 0.0, unit()),
            &unit(),
            &SugenoOptions::default(),
        )
        .unwrap();
        assert!((r.value - CUBIC_ROOT).abs() < 1e-9);
        // the printed 0.1847 is off by about 2.4e-3
        assert!((r.value - 0.1847).abs() < 3e-3);
        assert!((r.value - 0.1847).abs() > 5e-4);
    }

    #[test]
    fn zero_function() {
        let r = sugeno_integral(
            &ScalarFunction::constant(0.0, unit()),
            &unit(),
            &SugenoOptions::default(),
        )
        .unwrap();
        assert!(r.value.abs() < 1e-9);
    }

    #[test]
    fn constant_jump_lands_on_level() {
        let r = sugeno_fixed_point(&closed(ScalarFunction::constant(0.3, unit())), 1e-9).unwrap();
        assert!((r.value - 0.3).abs() < 1e-9);
        // F jumps from 1 to 0 at 0.3, so the residual reports the jump
        assert!(r.residual > 0.2);
    }

    #[test]
    fn negative_function_rejected() {
        let f = ScalarFunction::new("x - 0.5", unit(), |x| x - 0.5);
        assert!(matches!(
            sugeno_integral(&f, &unit(), &SugenoOptions::default()),
            Err(Error::NegativeFunction { .. })
        ));
    }

    #[test]
    fn step_function_plateau_matches_definition() {
        // F has a plateau at 0.6 for beta in (0.2, 0.9]; the crossing is 0.6
        let f = ScalarFunction::new("step", unit(), |x| if x < 0.4 { 0.2 } else { 0.9 })
            .with_hint(Monotonicity::Increasing);
        let fp = sugeno_integral(&f, &unit(), &SugenoOptions::default()).unwrap();
        assert!((fp.value - 0.6).abs() < 1e-9);
        let sm = sugeno_supmin(&f, &unit(), 100_000).unwrap();
        assert!((sm.value - 0.6).abs() < 1e-4);
    }

    #[test]
    fn rejects_non_positive_tolerance() {
        let p = closed(ScalarFunction::constant(0.3, unit()));
        assert!(matches!(
            sugeno_fixed_point(&p, 0.0),
            Err(Error::InvalidParameter { name: "tol", .. })
        ));
    }

    #[test]
    fn sine_by_supmin_and_grid_fixed_point() {
        let f = ScalarFunction::new("sin", unit(), |x| (std::f64::consts::PI * x).sin());
        // root of 1 - (2/pi) asin(beta) = beta
        let expected = 0.594_611_644_056_835_6;
        let fp = sugeno_integral(&f, &unit(), &SugenoOptions::default()).unwrap();
        assert!(matches!(fp.strategy, DistributionStrategy::GridScan(_)));
        assert!((fp.value - expected).abs() < 1e-5);
        let sm = sugeno_supmin(&f, &unit(), 100_000).unwrap();
        assert!((sm.value - expected).abs() < 1e-4);
    }

    #[test]
    fn inferred_hint_uses_closed_form() {
        let f = ScalarFunction::new("x^2/2", unit(), |x| x * x / 2.0);
        let opts = SugenoOptions {
            infer_monotonicity: true,
            ..SugenoOptions::default()
        };
        let r = sugeno_integral(&f, &unit(), &opts).unwrap();
        assert_eq!(r.strategy, DistributionStrategy::MonotoneClosedForm);
        assert!((r.value - (2.0 - 3f64.sqrt())).abs() < 1e-9);
    }

    #[test]
    fn degenerate_interval() {
        let a = RealInterval::new(0.4, 0.4).unwrap();
        let r = sugeno_integral(
            &ScalarFunction::constant(1.0, a),
            &a,
            &SugenoOptions::default(),
        )
        .unwrap();
        assert_eq!(r.value, 0.0);
    }
}
