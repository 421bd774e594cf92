//! Intervals, Lebesgue measure on the real line, and the distribution
//! function `F(beta) = mu(A ∩ {f >= beta})` of a non-negative function.
//!
//! Level sets are never represented explicitly; only their measure is
//! computed. For a monotone `f` the level set is an interval whose inner
//! endpoint is found by bisection, otherwise it is counted on a midpoint grid.

use std::fmt;
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Slack below zero tolerated when checking non-negativity by sampling.
pub const NEGATIVITY_SLACK: f64 = 1e-12;

/// Width at which closed-form level-set inversion stops bisecting.
pub const INVERSION_TOL: f64 = 1e-12;

/// Default number of cells for [`DistributionStrategy::GridScan`].
pub const DEFAULT_GRID: usize = 1_000_000;

/// Relative slack used when testing membership of evaluation points in a
/// function's declared domain.
pub const DOMAIN_REL_SLACK: f64 = 1e-6;

/// Closed interval `[lo, hi]` of reals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RealInterval {
    lo: f64,
    hi: f64,
}

impl RealInterval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !lo.is_finite() || !hi.is_finite() || lo > hi {
            return Err(Error::InvalidInterval { lo, hi });
        }
        Ok(Self { lo, hi })
    }

    /// `[0, 1]`.
    pub fn unit() -> Self {
        Self { lo: 0.0, hi: 1.0 }
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn length(&self) -> f64 {
        self.hi - self.lo
    }

    /// Membership with an absolute boundary slack.
    pub fn contains(&self, x: f64, slack: f64) -> bool {
        x >= self.lo - slack && x <= self.hi + slack
    }

    /// Membership with a slack relative to the endpoint magnitudes.
    pub fn contains_rel(&self, x: f64, rel: f64) -> bool {
        let scale = 1.0_f64.max(self.lo.abs()).max(self.hi.abs());
        self.contains(x, rel * scale)
    }

    pub fn clamp(&self, x: f64) -> f64 {
        x.clamp(self.lo, self.hi)
    }

    /// Whether `other` lies inside `self`.
    pub fn covers(&self, other: &RealInterval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    /// Distance from `x` to the interval (zero inside).
    pub fn distance(&self, x: f64) -> f64 {
        if x < self.lo {
            self.lo - x
        } else if x > self.hi {
            x - self.hi
        } else {
            0.0
        }
    }

    /// `n + 1` equally spaced points from `lo` to `hi`.
    pub fn linspace(&self, n: usize) -> impl Iterator<Item = f64> + '_ {
        let n = n.max(1);
        let step = self.length() / n as f64;
        (0..=n).map(move |i| {
            if i == n {
                self.hi
            } else {
                self.lo + step * i as f64
            }
        })
    }
}

impl fmt::Display for RealInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

/// Lebesgue measure restricted to finite unions of real intervals.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LebesgueMeasure;

impl LebesgueMeasure {
    pub fn measure_interval(&self, a: &RealInterval) -> f64 {
        a.length()
    }

    /// Measure of a finite union; overlapping pieces are merged first.
    pub fn measure_union(&self, pieces: &[RealInterval]) -> f64 {
        let mut sorted: Vec<RealInterval> = pieces.to_vec();
        sorted.sort_by(|p, q| p.lo.total_cmp(&q.lo));
        let mut total = 0.0;
        let mut current: Option<(f64, f64)> = None;
        for p in sorted {
            current = match current {
                Some((lo, hi)) if p.lo <= hi => Some((lo, hi.max(p.hi))),
                Some((lo, hi)) => {
                    total += hi - lo;
                    Some((p.lo, p.hi))
                }
                None => Some((p.lo, p.hi)),
            };
        }
        if let Some((lo, hi)) = current {
            total += hi - lo;
        }
        total
    }
}

/// Monotonicity of a function on its integration interval, in the
/// non-strict sense.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Monotonicity {
    Increasing,
    Decreasing,
    Unknown,
}

type Eval = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A real function evaluable on `domain`, with an optional monotonicity hint.
///
/// The domain may be wider than the interval being integrated over: the
/// `(alpha, m)` hypotheses evaluate `f` at `v / m`, which lies beyond `v`.
#[derive(Clone)]
pub struct ScalarFunction {
    domain: RealInterval,
    eval: Eval,
    hint: Monotonicity,
    label: String,
}

impl fmt::Debug for ScalarFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScalarFunction")
            .field("label", &self.label)
            .field("domain", &self.domain)
            .field("hint", &self.hint)
            .finish()
    }
}

impl ScalarFunction {
    pub fn new<F>(label: impl Into<String>, domain: RealInterval, f: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self {
            domain,
            eval: Arc::new(f),
            hint: Monotonicity::Unknown,
            label: label.into(),
        }
    }

    pub fn with_hint(mut self, hint: Monotonicity) -> Self {
        self.hint = hint;
        self
    }

    pub fn with_domain(mut self, domain: RealInterval) -> Self {
        self.domain = domain;
        self
    }

    /// `k` on `domain`.
    pub fn constant(k: f64, domain: RealInterval) -> Self {
        Self::new(format!("{k}"), domain, move |_| k).with_hint(Monotonicity::Increasing)
    }

    /// `c * x^p + d` on a non-negative domain, `c, d >= 0`, `p > 0`.
    pub fn power(c: f64, p: f64, d: f64, domain: RealInterval) -> Self {
        Self::new(format!("{c}*x^{p}+{d}"), domain, move |x| c * x.powf(p) + d)
            .with_hint(Monotonicity::Increasing)
    }

    /// `(c * x + d)^(1/r)`, whose `r`-th power is affine.
    pub fn affine_root(c: f64, d: f64, r: f64, domain: RealInterval) -> Self {
        let hint = if c >= 0.0 {
            Monotonicity::Increasing
        } else {
            Monotonicity::Decreasing
        };
        Self::new(format!("({c}*x+{d})^(1/{r})"), domain, move |x| {
            (c * x + d).powf(1.0 / r)
        })
        .with_hint(hint)
    }

    /// `x -> f(x)^r`, keeping domain and a hint that is valid for `r > 0`.
    pub fn powf(&self, r: f64) -> Self {
        let inner = self.eval.clone();
        let hint = if r > 0.0 {
            self.hint
        } else {
            Monotonicity::Unknown
        };
        Self {
            domain: self.domain,
            eval: Arc::new(move |x| inner(x).powf(r)),
            hint,
            label: format!("({})^{r}", self.label),
        }
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        (self.eval)(x)
    }

    pub fn domain(&self) -> RealInterval {
        self.domain
    }

    pub fn hint(&self) -> Monotonicity {
        self.hint
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Evaluates at `x` after checking `x` lies in the declared domain.
    pub fn eval_checked(&self, x: f64) -> Result<f64> {
        if !self.domain.contains_rel(x, DOMAIN_REL_SLACK) {
            return Err(Error::DomainEscape {
                point: x,
                lo: self.domain.lo,
                hi: self.domain.hi,
            });
        }
        Ok(self.eval(x))
    }

    /// Samples `samples + 1` equally spaced points of `a` and rejects
    /// non-finite values or values below `-NEGATIVITY_SLACK`.
    pub fn check_non_negative(&self, a: &RealInterval, samples: usize) -> Result<()> {
        for x in a.linspace(samples) {
            let v = self.eval(x);
            if !v.is_finite() {
                return Err(Error::NonFinite { x });
            }
            if v < -NEGATIVITY_SLACK {
                return Err(Error::NegativeFunction { x, value: v });
            }
        }
        Ok(())
    }

    /// Guesses monotonicity from `samples + 1` equally spaced values.
    ///
    /// Only a guess: a function can wiggle between sample points.
    pub fn infer_monotonicity(&self, a: &RealInterval, samples: usize) -> Monotonicity {
        let values: Vec<f64> = a.linspace(samples).map(|x| self.eval(x)).collect();
        if values.iter().any(|v| !v.is_finite()) {
            return Monotonicity::Unknown;
        }
        let up = values.windows(2).all(|w| w[1] >= w[0]);
        let down = values.windows(2).all(|w| w[1] <= w[0]);
        match (up, down) {
            (true, _) => Monotonicity::Increasing,
            (false, true) => Monotonicity::Decreasing,
            _ => Monotonicity::Unknown,
        }
    }
}

/// How the distribution function measures level sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DistributionStrategy {
    /// Level set is an interval; its inner endpoint is found by bisection.
    MonotoneClosedForm,
    /// Midpoint rule over `n` equal cells.
    GridScan(usize),
}

/// The distribution function `beta -> mu(A ∩ {f >= beta})`.
#[derive(Debug, Clone)]
pub struct DistributionProfile {
    f: ScalarFunction,
    interval: RealInterval,
    strategy: DistributionStrategy,
    grid: OnceLock<Vec<f64>>,
}

impl DistributionProfile {
    pub fn new(
        f: ScalarFunction,
        interval: RealInterval,
        strategy: DistributionStrategy,
    ) -> Result<Self> {
        match strategy {
            DistributionStrategy::MonotoneClosedForm if f.hint() == Monotonicity::Unknown => {
                return Err(Error::StrategyMismatch)
            }
            DistributionStrategy::GridScan(0) => {
                return Err(Error::InvalidParameter {
                    name: "grid",
                    value: 0.0,
                    reason: "grid size must be positive",
                })
            }
            _ => {}
        }
        Ok(Self {
            f,
            interval,
            strategy,
            grid: OnceLock::new(),
        })
    }

    /// Closed form when the hint allows it, otherwise a grid of `n` cells.
    pub fn best(f: ScalarFunction, interval: RealInterval, n: usize) -> Result<Self> {
        let strategy = match f.hint() {
            Monotonicity::Unknown => DistributionStrategy::GridScan(n),
            _ => DistributionStrategy::MonotoneClosedForm,
        };
        Self::new(f, interval, strategy)
    }

    pub fn function(&self) -> &ScalarFunction {
        &self.f
    }

    pub fn interval(&self) -> RealInterval {
        self.interval
    }

    pub fn strategy(&self) -> DistributionStrategy {
        self.strategy
    }

    /// Sorted midpoint samples, computed once.
    fn grid_values(&self, n: usize) -> &[f64] {
        self.grid.get_or_init(|| {
            let lo = self.interval.lo();
            let h = self.interval.length() / n as f64;
            let mut v: Vec<f64> = (0..n)
                .map(|i| self.f.eval(lo + (i as f64 + 0.5) * h))
                .collect();
            v.sort_by(f64::total_cmp);
            v
        })
    }

    /// `mu(A ∩ {f >= beta})`.
    pub fn distribution_at(&self, beta: f64) -> Result<f64> {
        if beta.is_nan() || beta < 0.0 {
            return Err(Error::InvalidThreshold(beta));
        }
        let len = self.interval.length();
        if beta == 0.0 {
            return Ok(len);
        }
        match self.strategy {
            DistributionStrategy::GridScan(n) => {
                let values = self.grid_values(n);
                let below = values.partition_point(|&v| v < beta);
                let count = n - below;
                Ok(len * (count as f64 / n as f64))
            }
            DistributionStrategy::MonotoneClosedForm => match self.f.hint() {
                Monotonicity::Increasing => Ok(self.increasing_level(beta)),
                Monotonicity::Decreasing => Ok(self.decreasing_level(beta)),
                Monotonicity::Unknown => Err(Error::StrategyMismatch),
            },
        }
    }

    // {f >= beta} = [x*, hi] for non-decreasing f.
    fn increasing_level(&self, beta: f64) -> f64 {
        let (lo, hi) = (self.interval.lo(), self.interval.hi());
        if self.f.eval(lo) >= beta {
            return hi - lo;
        }
        if !(self.f.eval(hi) >= beta) {
            return 0.0;
        }
        // invariant: f(left) < beta <= f(right)
        let (mut left, mut right) = (lo, hi);
        while right - left > INVERSION_TOL {
            let mid = 0.5 * (left + right);
            if mid <= left || mid >= right {
                break;
            }
            if self.f.eval(mid) >= beta {
                right = mid;
            } else {
                left = mid;
            }
        }
        hi - 0.5 * (left + right)
    }

    // {f >= beta} = [lo, x*] for non-increasing f.
    fn decreasing_level(&self, beta: f64) -> f64 {
        let (lo, hi) = (self.interval.lo(), self.interval.hi());
        if self.f.eval(hi) >= beta {
            return hi - lo;
        }
        if !(self.f.eval(lo) >= beta) {
            return 0.0;
        }
        // invariant: f(left) >= beta > f(right)
        let (mut left, mut right) = (lo, hi);
        while right - left > INVERSION_TOL {
            let mid = 0.5 * (left + right);
            if mid <= left || mid >= right {
                break;
            }
            if self.f.eval(mid) >= beta {
                left = mid;
            } else {
                right = mid;
            }
        }
        0.5 * (left + right) - lo
    }

    /// Upper estimate of `sup f` on the interval: endpoint maximum for
    /// monotone strategies, grid maximum otherwise.
    pub fn sup_estimate(&self) -> f64 {
        match self.strategy {
            DistributionStrategy::GridScan(n) => {
                let values = self.grid_values(n);
                let top = values.last().copied().unwrap_or(0.0);
                let ends = self
                    .f
                    .eval(self.interval.lo())
                    .max(self.f.eval(self.interval.hi()));
                top.max(ends)
            }
            DistributionStrategy::MonotoneClosedForm => self
                .f
                .eval(self.interval.lo())
                .max(self.f.eval(self.interval.hi())),
        }
    }
}
