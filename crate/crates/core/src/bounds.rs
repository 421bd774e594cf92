//! Fuzzy Hermite-Hadamard upper bounds `(s)∫ f dmu <= min(beta, eta)` for
//! `r`-preinvex and `(alpha, m)`-preinvex functions on `[a, a + eta]`.
//!
//! Each bound depends on `f` only through a few endpoint values, collected in
//! [`BoundInputs`]. The case is picked from those values, the case equation
//! `G(beta) = 0` is solved by bracketed bisection, and the bound is
//! `min(beta, eta)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::{RealInterval, ScalarFunction};
use crate::sugeno::{sugeno_integral, SugenoOptions, SugenoResult, DEFAULT_TOL};

/// `|fend - fa|` at or below this routes to [`BoundCase::Degenerate`]; the
/// same width separates `m == fend / fa` from its neighbours.
pub const TIE_TOL: f64 = 1e-12;

/// Subintervals scanned for a sign change when the primary bracket fails.
pub const SCAN_CELLS: usize = 10_000;

/// Margin below zero still accepted by [`verify_fuzzy_hh`].
pub const VERIFY_TOL: f64 = 1e-6;

const MAX_BISECTIONS: usize = 400;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoundCase {
    /// `r > 0`, `f(a + eta) > f(a)`.
    RposIncreasing,
    /// `r > 0`, `f(a + eta) < f(a)`.
    RposDecreasing,
    /// `r < 0`, `f(a + eta) > f(a)`.
    RnegIncreasing,
    /// `r < 0`, `f(a + eta) < f(a)`.
    RnegDecreasing,
    /// `f(a) = f(a + eta)`: the bound is `min(f(a), eta)`.
    Degenerate,
    /// `f(a) <= f(a + eta)`.
    AMIncreasing,
    /// `f(a) > f(a + eta)` and `m < f(a + eta) / f(a)`.
    AMDecreasingSmallM,
    /// `f(a) > f(a + eta)` and `m = f(a + eta) / f(a)`.
    AMDecreasingRatioM,
    /// `f(a) > f(a + eta)` and `m > f(a + eta) / f(a)`.
    AMDecreasingLargeM,
}

impl BoundCase {
    pub fn as_str(&self) -> &'static str {
        match self {
            BoundCase::RposIncreasing => "r_pos_increasing",
            BoundCase::RposDecreasing => "r_pos_decreasing",
            BoundCase::RnegIncreasing => "r_neg_increasing",
            BoundCase::RnegDecreasing => "r_neg_decreasing",
            BoundCase::Degenerate => "degenerate",
            BoundCase::AMIncreasing => "am_increasing",
            BoundCase::AMDecreasingSmallM => "am_decreasing_small_m",
            BoundCase::AMDecreasingRatioM => "am_decreasing_ratio_m",
            BoundCase::AMDecreasingLargeM => "am_decreasing_large_m",
        }
    }
}

/// The generalized-convexity hypothesis a bound is taken under.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Hypothesis {
    RPreinvex { r: f64 },
    AlphaMPreinvex { alpha: f64, m: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundInputs {
    /// `f(a)`.
    pub fa: f64,
    /// `f(a + eta)`.
    pub fend: f64,
    /// `f((a + eta) / m)`, needed by the `(alpha, m)` bounds.
    pub fscaled: Option<f64>,
    pub hypothesis: Hypothesis,
    /// `eta(b, a) > 0`, the length of the interval.
    pub eta_len: f64,
}

impl BoundInputs {
    pub fn r_preinvex(fa: f64, fend: f64, r: f64, eta_len: f64) -> Self {
        Self {
            fa,
            fend,
            fscaled: None,
            hypothesis: Hypothesis::RPreinvex { r },
            eta_len,
        }
    }

    pub fn alpha_m(fa: f64, fend: f64, fscaled: f64, alpha: f64, m: f64, eta_len: f64) -> Self {
        Self {
            fa,
            fend,
            fscaled: Some(fscaled),
            hypothesis: Hypothesis::AlphaMPreinvex { alpha, m },
            eta_len,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.eta_len > 0.0) || !self.eta_len.is_finite() {
            return Err(Error::InvalidParameter {
                name: "eta_len",
                value: self.eta_len,
                reason: "must be positive and finite",
            });
        }
        for (name, v) in [("fa", self.fa), ("fend", self.fend)] {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::InvalidParameter {
                    name,
                    value: v,
                    reason: "endpoint values must be finite and non-negative",
                });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundResult {
    pub beta: f64,
    /// `min(beta, eta_len)`.
    pub bound: f64,
    pub case: BoundCase,
    /// `|G(beta)|`.
    pub residual: f64,
    pub bracket: (f64, f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub root: f64,
    pub residual: f64,
    pub bracket: (f64, f64),
}

fn opposite(a: f64, b: f64) -> bool {
    !a.is_nan() && !b.is_nan() && (a < 0.0) != (b < 0.0)
}

fn bisect<G: Fn(f64) -> f64>(g: &G, mut lo: f64, mut hi: f64, tol: f64) -> Root {
    let bracket = (lo, hi);
    let mut g_lo = g(lo);
    let mut best = (lo, g_lo.abs());
    let g_hi = g(hi);
    if g_hi.abs() < best.1 {
        best = (hi, g_hi.abs());
    }
    for _ in 0..MAX_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let g_mid = g(mid);
        if g_mid.abs() <= best.1 || best.1.is_nan() {
            best = (mid, g_mid.abs());
        }
        if g_mid == 0.0 || (g_mid.abs() <= tol && hi - lo <= tol) {
            break;
        }
        if (g_mid < 0.0) == (g_lo < 0.0) {
            lo = mid;
            g_lo = g_mid;
        } else {
            hi = mid;
        }
    }
    Root {
        root: best.0,
        residual: best.1,
        bracket,
    }
}

/// Root of `g` by bisection.
///
/// Tries `hint` first. Without a sign change there, scans [`SCAN_CELLS`]
/// equal cells of `[0, scan_hi]` and bisects the first cell whose ends
/// differ in sign. Infinite values count by their sign; NaN never does.
pub fn solve_beta<G: Fn(f64) -> f64>(
    g: G,
    hint: (f64, f64),
    scan_hi: f64,
    tol: f64,
) -> Result<Root> {
    let (lo, hi) = hint;
    let (g_lo, g_hi) = (g(lo), g(hi));
    for (x, gx) in [(lo, g_lo), (hi, g_hi)] {
        if gx == 0.0 {
            return Ok(Root {
                root: x,
                residual: 0.0,
                bracket: hint,
            });
        }
    }
    if opposite(g_lo, g_hi) {
        return Ok(bisect(&g, lo, hi, tol));
    }

    let step = scan_hi / SCAN_CELLS as f64;
    let mut prev = (0.0, g(0.0));
    for i in 1..=SCAN_CELLS {
        let x = if i == SCAN_CELLS {
            scan_hi
        } else {
            step * i as f64
        };
        let gx = g(x);
        if gx == 0.0 {
            return Ok(Root {
                root: x,
                residual: 0.0,
                bracket: (prev.0, x),
            });
        }
        if opposite(prev.1, gx) {
            return Ok(bisect(&g, prev.0, x, tol));
        }
        prev = (x, gx);
    }
    Err(Error::NoRoot {
        lo: 0.0,
        hi: scan_hi,
    })
}

/// `c * base^p`, taken as zero when `c == 0` so that a vanishing
/// coefficient does not turn an undefined power into NaN.
fn scaled_pow(c: f64, base: f64, p: f64) -> f64 {
    if c == 0.0 {
        0.0
    } else {
        c * base.powf(p)
    }
}

/// Dispatches the `r`-preinvex case and solves its equation.
///
/// For `fend > fa` the equation is
/// `beta (fend^r - fa^r) + eta beta^r - eta fend^r = 0`,
/// for `fend < fa` it is
/// `beta (fend^r - fa^r) - eta beta^r + eta fa^r = 0`.
/// Both come from `F(beta) = beta` for the dominating power mean
/// `g(x) = ((1 - s) fa^r + s fend^r)^(1/r)`, `s = (x - a) / eta`, and hold
/// for either sign of `r`.
pub fn r_preinvex_bound(inputs: &BoundInputs, tol: f64) -> Result<BoundResult> {
    let Hypothesis::RPreinvex { r } = inputs.hypothesis else {
        return Err(Error::InvalidParameter {
            name: "r",
            value: f64::NAN,
            reason: "inputs carry an (alpha, m) hypothesis",
        });
    };
    inputs.validate()?;
    if r == 0.0 {
        return Err(Error::RZero);
    }
    if !r.is_finite() {
        return Err(Error::InvalidParameter {
            name: "r",
            value: r,
            reason: "must be finite",
        });
    }
    let (fa, fend, len) = (inputs.fa, inputs.fend, inputs.eta_len);
    if r < 0.0 {
        for (x, v) in [(0.0, fa), (len, fend)] {
            if !(v > 0.0) {
                return Err(Error::NonPositiveFunction { x, value: v });
            }
        }
    }

    if (fend - fa).abs() <= TIE_TOL {
        return Ok(BoundResult {
            beta: fa,
            bound: fa.min(len),
            case: BoundCase::Degenerate,
            residual: 0.0,
            bracket: (fa, fa),
        });
    }

    let (far, fendr) = (fa.powf(r), fend.powf(r));
    let diff = fendr - far;
    let increasing = fend > fa;
    let case = match (r > 0.0, increasing) {
        (true, true) => BoundCase::RposIncreasing,
        (true, false) => BoundCase::RposDecreasing,
        (false, true) => BoundCase::RnegIncreasing,
        (false, false) => BoundCase::RnegDecreasing,
    };
    let g = move |beta: f64| {
        if increasing {
            beta * diff + len * beta.powf(r) - len * fendr
        } else {
            beta * diff - len * beta.powf(r) + len * far
        }
    };
    let scan_hi = len.max(fa).max(fend);
    let root = solve_beta(g, (0.0, len), scan_hi, tol)?;
    Ok(BoundResult {
        beta: root.root,
        bound: root.root.min(len),
        case,
        residual: root.residual,
        bracket: root.bracket,
    })
}

/// Dispatches the `(alpha, m)`-preinvex case and solves its equation.
///
/// With `fs = f((a + eta) / m)`:
///
/// * `fa <= fend`, and `fa > fend` with `m < fend / fa`:
///   `(eta - beta)^alpha m fs - (eta - beta)^alpha fa - eta^alpha (beta - fa) = 0`
/// * `fa > fend`, `m = fend / fa`: the same equation with `m` replaced by
///   the ratio and `fs = f((a + eta) fa / fend)`
/// * `fa > fend`, `m > fend / fa`:
///   `beta^alpha m fs - beta^alpha fa - eta^alpha (beta - fa) = 0`
pub fn alpha_m_bound(inputs: &BoundInputs, tol: f64) -> Result<BoundResult> {
    let Hypothesis::AlphaMPreinvex { alpha, m } = inputs.hypothesis else {
        return Err(Error::InvalidParameter {
            name: "alpha",
            value: f64::NAN,
            reason: "inputs carry an r hypothesis",
        });
    };
    inputs.validate()?;
    for (name, v) in [("alpha", alpha), ("m", m)] {
        if !(v > 0.0 && v <= 1.0) {
            return Err(Error::InvalidParameter {
                name,
                value: v,
                reason: "must lie in (0, 1]",
            });
        }
    }
    let fs = inputs.fscaled.ok_or(Error::MissingScaledValue)?;
    if !fs.is_finite() {
        return Err(Error::InvalidParameter {
            name: "fscaled",
            value: fs,
            reason: "must be finite",
        });
    }
    let (fa, fend, len) = (inputs.fa, inputs.fend, inputs.eta_len);
    let len_a = len.powf(alpha);

    let case = if fa <= fend {
        BoundCase::AMIncreasing
    } else {
        if fa == 0.0 {
            return Err(Error::DivisionByZero);
        }
        let ratio = fend / fa;
        if (m - ratio).abs() <= TIE_TOL {
            BoundCase::AMDecreasingRatioM
        } else if m < ratio {
            BoundCase::AMDecreasingSmallM
        } else {
            BoundCase::AMDecreasingLargeM
        }
    };
    let weight = match case {
        BoundCase::AMDecreasingRatioM => fend / fa,
        _ => m,
    };
    let lead = weight * fs - fa;
    let g = move |beta: f64| match case {
        BoundCase::AMDecreasingLargeM => scaled_pow(lead, beta, alpha) - len_a * (beta - fa),
        _ => scaled_pow(lead, len - beta, alpha) - len_a * (beta - fa),
    };
    let scan_hi = len.max(fa).max(fend).max(m * fs);
    let root = solve_beta(g, (0.0, len), scan_hi, tol)?;
    Ok(BoundResult {
        beta: root.root,
        bound: root.root.min(len),
        case,
        residual: root.residual,
        bracket: root.bracket,
    })
}

/// Routes to [`r_preinvex_bound`] or [`alpha_m_bound`].
pub fn fuzzy_hh_bound(inputs: &BoundInputs, tol: f64) -> Result<BoundResult> {
    match inputs.hypothesis {
        Hypothesis::RPreinvex { .. } => r_preinvex_bound(inputs, tol),
        Hypothesis::AlphaMPreinvex { .. } => alpha_m_bound(inputs, tol),
    }
}

/// Right side of the classical `r`-preinvex Hermite-Hadamard inequality,
/// `((fa^r + fb^r) / 2)^(1/r)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerMeanRhs {
    pub value: f64,
    /// The classical inequality is only stated for `r >= 1`.
    pub outside_stated_range: bool,
}

pub fn classical_hh_r_rhs(fa: f64, fb: f64, r: f64) -> Result<PowerMeanRhs> {
    if r == 0.0 {
        return Err(Error::RZero);
    }
    Ok(PowerMeanRhs {
        value: ((fa.powf(r) + fb.powf(r)) / 2.0).powf(1.0 / r),
        outside_stated_range: r < 1.0,
    })
}

/// `[a, a + eta]` with `eta > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InvexInterval {
    a: f64,
    eta_len: f64,
}

impl InvexInterval {
    pub fn new(a: f64, eta_len: f64) -> Result<Self> {
        if !a.is_finite() || !eta_len.is_finite() || !(eta_len > 0.0) {
            return Err(Error::InvalidParameter {
                name: "eta_len",
                value: eta_len,
                reason: "need finite a and eta_len > 0",
            });
        }
        Ok(Self { a, eta_len })
    }

    pub fn unit() -> Self {
        Self {
            a: 0.0,
            eta_len: 1.0,
        }
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn eta_len(&self) -> f64 {
        self.eta_len
    }

    pub fn end(&self) -> f64 {
        self.a + self.eta_len
    }

    pub fn domain(&self) -> RealInterval {
        RealInterval::new(self.a, self.end()).expect("eta_len > 0")
    }
}

/// Both sides of the classical preinvex Hermite-Hadamard inequality that
/// bracket the mean value of `f`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassicalSides {
    /// `f(a + eta / 2)`.
    pub midpoint: f64,
    /// `(f(a) + f(a + eta)) / 2`.
    pub endpoint_mean: f64,
}

pub fn classical_hh_preinvex(f: &ScalarFunction, iv: &InvexInterval) -> Result<ClassicalSides> {
    Ok(ClassicalSides {
        midpoint: f.eval_checked(iv.a() + iv.eta_len() / 2.0)?,
        endpoint_mean: 0.5 * (f.eval_checked(iv.a())? + f.eval_checked(iv.end())?),
    })
}

/// Endpoint values of `f` needed for the bound under `hypothesis`.
pub fn bound_inputs_for(
    f: &ScalarFunction,
    iv: &InvexInterval,
    hypothesis: Hypothesis,
) -> Result<BoundInputs> {
    let fa = f.eval_checked(iv.a())?;
    let fend = f.eval_checked(iv.end())?;
    Ok(match hypothesis {
        Hypothesis::RPreinvex { r } => BoundInputs::r_preinvex(fa, fend, r, iv.eta_len()),
        Hypothesis::AlphaMPreinvex { alpha, m } => {
            let at_ratio = fa > fend && fa > 0.0 && (m - fend / fa).abs() <= TIE_TOL;
            let x = if at_ratio {
                iv.end() * fa / fend
            } else {
                iv.end() / m
            };
            let fs = f.eval_checked(x)?;
            BoundInputs::alpha_m(fa, fend, fs, alpha, m, iv.eta_len())
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyOptions {
    pub sugeno: SugenoOptions,
    pub root_tol: f64,
    pub margin_tol: f64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            sugeno: SugenoOptions::default(),
            root_tol: DEFAULT_TOL,
            margin_tol: VERIFY_TOL,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub inputs: BoundInputs,
    pub integral: SugenoResult,
    pub bound: BoundResult,
    /// `bound - integral`.
    pub margin: f64,
    pub pass: bool,
}

/// Computes the Sugeno integral of `f` on `iv` and the matching bound, and
/// checks `integral <= bound` up to `margin_tol`.
///
/// The generalized-convexity hypothesis itself is not checked here.
pub fn verify_fuzzy_hh(
    f: &ScalarFunction,
    iv: &InvexInterval,
    hypothesis: Hypothesis,
    opts: &VerifyOptions,
) -> Result<VerifyReport> {
    let inputs = bound_inputs_for(f, iv, hypothesis)?;
    let bound = fuzzy_hh_bound(&inputs, opts.root_tol)?;
    let integral = sugeno_integral(f, &iv.domain(), &opts.sugeno)?;
    let margin = bound.bound - integral.value;
    Ok(VerifyReport {
        inputs,
        integral,
        bound,
        margin,
        pass: margin >= -opts.margin_tol,
    })
}
