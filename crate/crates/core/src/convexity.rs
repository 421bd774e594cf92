//! Sampling checkers for invexity, Condition C, and the preinvex family of
//! hypotheses (preinvex, `r`-preinvex, `m`-preinvex, `(alpha, m)`-preinvex).
//!
//! Every checker walks the same deterministic sequence of draws for a given
//! seed, so checkers that coincide for particular parameters (for example
//! `r = 1` and plain preinvexity) produce identical reports.

use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::{RealInterval, ScalarFunction};

/// Boundary slack for set membership.
pub const MEMBERSHIP_SLACK: f64 = 1e-12;
/// Slack for the defining inequalities and Condition C identities.
pub const INEQUALITY_SLACK: f64 = 1e-9;
pub const DEFAULT_SAMPLES: usize = 100_000;
pub const DEFAULT_SEED: u64 = 0x5eed_f00d;

type EtaFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// The bifunction `eta(v, u)` that bends the segment from `u` toward `v`.
#[derive(Clone)]
pub struct EtaMap {
    name: String,
    apply: EtaFn,
    domain: Option<RealInterval>,
}

impl fmt::Debug for EtaMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("EtaMap")
            .field("name", &self.name)
            .field("domain", &self.domain)
            .finish()
    }
}

impl EtaMap {
    /// `eta(v, u) = v - u`.
    pub fn affine() -> Self {
        Self::custom("affine", |v, u| v - u)
    }

    /// `eta(v, u) = k (v - u)`.
    pub fn scaled(k: f64) -> Self {
        Self::custom(format!("scaled:{k}"), move |v, u| k * (v - u))
    }

    pub fn custom<F>(name: impl Into<String>, f: F) -> Self
    where
        F: Fn(f64, f64) -> f64 + Send + Sync + 'static,
    {
        Self {
            name: name.into(),
            apply: Arc::new(f),
            domain: None,
        }
    }

    /// Restricts the arguments `eta` accepts; points outside raise
    /// [`Error::DomainEscape`] in [`check_condition_c`].
    pub fn with_domain(mut self, domain: RealInterval) -> Self {
        self.domain = Some(domain);
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn domain(&self) -> Option<RealInterval> {
        self.domain
    }

    #[inline]
    pub fn apply(&self, v: f64, u: f64) -> f64 {
        (self.apply)(v, u)
    }
}

/// Which condition a witness violates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessKind {
    /// `lhs` is the distance of `u + t eta(v, u)` from the set; `rhs` is 0.
    Membership,
    /// `lhs` is `f(u + t eta(v, u))`; `rhs` is the hypothesis' right side.
    Inequality,
    /// `lhs` is `|eta(...) - expected|` for identity 1, 2 or 3; `rhs` is 0.
    ConditionC(u8),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub u: f64,
    pub v: f64,
    pub t: f64,
    /// Second parameter `t1` of the third Condition C identity.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_aux: Option<f64>,
    pub lhs: f64,
    pub rhs: f64,
    pub kind: WitnessKind,
}

impl Witness {
    pub fn violation(&self) -> f64 {
        self.lhs - self.rhs
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypothesisReport {
    pub holds: bool,
    pub samples_checked: usize,
    /// The worst draw, present exactly when `holds` is false.
    pub witness: Option<Witness>,
    /// Largest `lhs - rhs` seen over all draws.
    pub max_violation: f64,
}

impl HypothesisReport {
    fn from_scan(scan: Scan, slack: f64) -> Self {
        let holds = scan.max_violation <= slack;
        Self {
            holds,
            samples_checked: scan.count,
            witness: if holds { None } else { scan.worst },
            max_violation: scan.max_violation,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SampleSpec {
    pub samples: usize,
    pub seed: u64,
}

impl Default for SampleSpec {
    fn default() -> Self {
        Self {
            samples: DEFAULT_SAMPLES,
            seed: DEFAULT_SEED,
        }
    }
}

impl SampleSpec {
    pub fn new(samples: usize, seed: u64) -> Self {
        Self { samples, seed }
    }
}

const CORNER_T: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 1.0];

/// Deterministic draws `(u, v, t)` from `K x K x [0, 1]`.
///
/// Starts with the corner pairs `u, v in {lo, hi}` at a few fixed `t`, then
/// draws uniformly; every fifth random draw pins `t` to 0 or 1.
fn draws(k: &RealInterval, spec: SampleSpec) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
    let corners: Vec<(f64, f64, f64)> = [
        (k.lo(), k.hi()),
        (k.hi(), k.lo()),
        (k.lo(), k.lo()),
        (k.hi(), k.hi()),
    ]
    .into_iter()
    .flat_map(|(u, v)| CORNER_T.iter().map(move |&t| (u, v, t)))
    .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let n_random = spec.samples.saturating_sub(corners.len());
    let random = (0..n_random).map(move |i| {
        let u = rng.gen_range(k.lo()..=k.hi());
        let v = rng.gen_range(k.lo()..=k.hi());
        let t = match i % 10 {
            0 => 0.0,
            5 => 1.0,
            _ => rng.gen_range(0.0..=1.0),
        };
        (u, v, t)
    });
    corners.into_iter().take(spec.samples).chain(random)
}

#[derive(Debug)]
struct Scan {
    count: usize,
    max_violation: f64,
    worst: Option<Witness>,
}

impl Scan {
    fn new() -> Self {
        Self {
            count: 0,
            max_violation: f64::NEG_INFINITY,
            worst: None,
        }
    }

    fn record(&mut self, w: Witness) {
        self.count += 1;
        if self.max_violation.is_nan() {
            return;
        }
        // a NaN comparison sticks as the worst draw so it is never hidden
        let viol = w.violation();
        if viol.is_nan() || viol > self.max_violation {
            self.max_violation = viol;
            self.worst = Some(w);
        }
    }
}

fn require_samples(spec: SampleSpec) -> Result<()> {
    if spec.samples == 0 {
        return Err(Error::InvalidParameter {
            name: "samples",
            value: 0.0,
            reason: "need at least one draw",
        });
    }
    Ok(())
}

/// `u + t eta(v, u) in K` for every draw.
pub fn check_invex(k: &RealInterval, eta: &EtaMap, spec: SampleSpec) -> Result<HypothesisReport> {
    require_samples(spec)?;
    let mut scan = Scan::new();
    for (u, v, t) in draws(k, spec) {
        let p = u + t * eta.apply(v, u);
        scan.record(Witness {
            u,
            v,
            t,
            t_aux: None,
            lhs: if p.is_nan() { f64::NAN } else { k.distance(p) },
            rhs: 0.0,
            kind: WitnessKind::Membership,
        });
    }
    Ok(HypothesisReport::from_scan(scan, MEMBERSHIP_SLACK))
}

fn eta_arg(eta: &EtaMap, p: f64) -> Result<()> {
    match eta.domain() {
        Some(d) if !d.contains(p, MEMBERSHIP_SLACK) => Err(Error::DomainEscape {
            point: p,
            lo: d.lo(),
            hi: d.hi(),
        }),
        _ => Ok(()),
    }
}

/// The three Condition C identities for every draw `(x, y, t, t1, t2)`:
///
/// * `eta(y, y + t eta(x, y)) = -t eta(x, y)`
/// * `eta(x, y + t eta(x, y)) = (1 - t) eta(x, y)`
/// * `eta(y + t2 eta(x, y), y + t1 eta(x, y)) = (t2 - t1) eta(x, y)`
pub fn check_condition_c(
    k: &RealInterval,
    eta: &EtaMap,
    spec: SampleSpec,
) -> Result<HypothesisReport> {
    require_samples(spec)?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed ^ 0xc0de_c0de);
    let mut scan = Scan::new();
    for (x, y, t) in draws(k, spec) {
        let t1: f64 = rng.gen_range(0.0..=1.0);
        let t2 = t;
        let e = eta.apply(x, y);
        let pt = y + t * e;
        let p1 = y + t1 * e;
        for p in [x, y, pt, p1] {
            eta_arg(eta, p)?;
        }
        let checks = [
            (1u8, eta.apply(y, pt), -t * e, None),
            (2u8, eta.apply(x, pt), (1.0 - t) * e, None),
            (3u8, eta.apply(pt, p1), (t2 - t1) * e, Some(t1)),
        ];
        for (id, got, expected, t_aux) in checks {
            scan.record(Witness {
                u: x,
                v: y,
                t,
                t_aux,
                lhs: (got - expected).abs(),
                rhs: 0.0,
                kind: WitnessKind::ConditionC(id),
            });
        }
    }
    Ok(HypothesisReport::from_scan(scan, INEQUALITY_SLACK))
}

/// Shared driver: `f(u + t eta(v, u)) <= rhs(u, v, t)` for every draw.
fn check_inequality<R>(
    f: &ScalarFunction,
    k: &RealInterval,
    eta: &EtaMap,
    spec: SampleSpec,
    mut rhs: R,
) -> Result<HypothesisReport>
where
    R: FnMut(f64, f64, f64) -> Result<f64>,
{
    require_samples(spec)?;
    let mut scan = Scan::new();
    for (u, v, t) in draws(k, spec) {
        let p = u + t * eta.apply(v, u);
        let lhs = f.eval_checked(p)?;
        let rhs = rhs(u, v, t)?;
        scan.record(Witness {
            u,
            v,
            t,
            t_aux: None,
            lhs,
            rhs,
            kind: WitnessKind::Inequality,
        });
    }
    Ok(HypothesisReport::from_scan(scan, INEQUALITY_SLACK))
}

/// `f(u + t eta(v, u)) <= (1 - t) f(u) + t f(v)`.
pub fn check_preinvex(
    f: &ScalarFunction,
    k: &RealInterval,
    eta: &EtaMap,
    spec: SampleSpec,
) -> Result<HypothesisReport> {
    check_inequality(f, k, eta, spec, |u, v, t| {
        Ok((1.0 - t) * f.eval_checked(u)? + t * f.eval_checked(v)?)
    })
}

/// Power mean of order `r` of `a` and `b` with weights `1 - t` and `t`;
/// the weighted geometric mean when `r = 0`.
pub fn power_mean(a: f64, b: f64, t: f64, r: f64) -> f64 {
    if r == 0.0 {
        a.powf(1.0 - t) * b.powf(t)
    } else {
        ((1.0 - t) * a.powf(r) + t * b.powf(r)).powf(1.0 / r)
    }
}

/// `f(u + t eta(v, u)) <= M_r(f(u), f(v); t)`.
pub fn check_r_preinvex(
    f: &ScalarFunction,
    k: &RealInterval,
    eta: &EtaMap,
    r: f64,
    spec: SampleSpec,
) -> Result<HypothesisReport> {
    if !r.is_finite() {
        return Err(Error::InvalidParameter {
            name: "r",
            value: r,
            reason: "r must be finite",
        });
    }
    let positive = |x: f64| -> Result<f64> {
        let y = f.eval_checked(x)?;
        if r <= 0.0 && !(y > 0.0) {
            return Err(Error::NonPositiveFunction { x, value: y });
        }
        Ok(y)
    };
    check_inequality(f, k, eta, spec, |u, v, t| {
        Ok(power_mean(positive(u)?, positive(v)?, t, r))
    })
}

fn unit_param(name: &'static str, value: f64) -> Result<()> {
    if value > 0.0 && value <= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            reason: "must lie in (0, 1]",
        })
    }
}

/// `f(u + t eta(v, u)) <= (1 - t^alpha) f(u) + m t^alpha f(v / m)`.
pub fn check_alpha_m_preinvex(
    f: &ScalarFunction,
    k: &RealInterval,
    eta: &EtaMap,
    alpha: f64,
    m: f64,
    spec: SampleSpec,
) -> Result<HypothesisReport> {
    unit_param("alpha", alpha)?;
    unit_param("m", m)?;
    check_inequality(f, k, eta, spec, |u, v, t| {
        let ta = t.powf(alpha);
        Ok((1.0 - ta) * f.eval_checked(u)? + m * ta * f.eval_checked(v / m)?)
    })
}

/// `(alpha, m)`-preinvexity with `alpha = 1`.
pub fn check_m_preinvex(
    f: &ScalarFunction,
    k: &RealInterval,
    eta: &EtaMap,
    m: f64,
    spec: SampleSpec,
) -> Result<HypothesisReport> {
    check_alpha_m_preinvex(f, k, eta, 1.0, m, spec)
}
