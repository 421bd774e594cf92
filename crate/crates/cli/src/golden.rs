//! Reference values for the worked examples reproduced by `reproduce`.

use sugeno_hh::Hypothesis;

/// One compared quantity.
#[derive(Debug, Clone, Copy)]
pub struct Golden {
    pub quantity: &'static str,
    pub expected: f64,
    pub tol: f64,
    /// Value as quoted in the literature, when it differs from `expected`.
    pub quoted: Option<f64>,
    pub note: Option<&'static str>,
}

impl Golden {
    const fn new(quantity: &'static str, expected: f64, tol: f64) -> Self {
        Self {
            quantity,
            expected,
            tol,
            quoted: None,
            note: None,
        }
    }

    pub fn matches(&self, actual: f64) -> bool {
        (actual - self.expected).abs() <= self.tol
    }
}

/// Hypothesis the example asserts for `f`. It is checked by sampling and
/// reported, but never changes the verdict.
#[derive(Debug, Clone, Copy)]
pub enum Claim {
    Preinvex,
    RPreinvex(f64),
    AlphaM(f64, f64),
}

/// What the example demonstrates.
#[derive(Debug, Clone, Copy)]
pub enum Kind {
    /// `integral / eta_len` against the classical power-mean right side.
    ClassicalR { r: f64 },
    /// Integral against `f(a + eta / 2)`.
    ClassicalLeft,
    /// Integral against `(f(a) + f(a + eta)) / 2`.
    ClassicalRight,
    /// Integral against the fuzzy bound.
    Bound(Hypothesis),
}

#[derive(Debug, Clone, Copy)]
pub struct Example {
    pub id: &'static str,
    pub expr: &'static str,
    pub a: f64,
    pub eta_len: f64,
    pub fdomain: Option<(f64, f64)>,
    pub claim: Claim,
    pub kind: Kind,
    pub verdict: &'static str,
    pub entries: &'static [Golden],
}

/// Default tolerance for four-decimal reference values.
pub const REF_TOL: f64 = 5e-4;
pub const WAIVER_TOL: f64 = 3e-3;
pub const EXACT_TOL: f64 = 1e-12;

/// Root of `1 - (3 beta)^(1/3) = beta`.
pub const CUBIC_ROOT: f64 = 0.182_268_326_113_176_5;

pub const EXAMPLES: &[Example] = &[
    Example {
        id: "s3-x4",
        expr: "x^4/2",
        a: 0.0,
        eta_len: 1.0,
        fdomain: None,
        claim: Claim::RPreinvex(0.5),
        kind: Kind::ClassicalR { r: 0.5 },
        verdict: "classical HH violated",
        entries: &[
            Golden::new("integral", 0.2023, REF_TOL),
            Golden::new("classical_rhs", 0.125, EXACT_TOL),
        ],
    },
    Example {
        id: "s3-x3",
        expr: "x^3/3",
        a: 0.0,
        eta_len: 1.0,
        fdomain: None,
        claim: Claim::RPreinvex(0.5),
        kind: Kind::Bound(Hypothesis::RPreinvex { r: 0.5 }),
        verdict: "bound holds",
        entries: &[
            Golden {
                quantity: "integral",
                expected: CUBIC_ROOT,
                tol: WAIVER_TOL,
                quoted: Some(0.1847),
                note: Some(
                    "quoted 0.1847 is not a root of 1-(3b)^(1/3)=b; compared against the root 0.182268 with a 3e-3 waiver",
                ),
            },
            Golden::new("bound", 0.2087, REF_TOL),
        ],
    },
    Example {
        id: "s4-x2",
        expr: "x^2/2",
        a: 0.0,
        eta_len: 1.0,
        fdomain: None,
        claim: Claim::Preinvex,
        kind: Kind::ClassicalRight,
        verdict: "right side violated",
        entries: &[
            Golden::new("integral", 0.2679, REF_TOL),
            Golden::new("endpoint_mean", 0.25, EXACT_TOL),
        ],
    },
    Example {
        id: "s4-3x2",
        expr: "3*x^2",
        a: 0.0,
        eta_len: 1.0,
        fdomain: None,
        claim: Claim::Preinvex,
        kind: Kind::ClassicalLeft,
        verdict: "left side violated",
        entries: &[
            Golden::new("integral", 0.5657, REF_TOL),
            Golden::new("midpoint", 0.75, EXACT_TOL),
        ],
    },
    Example {
        id: "s4-am-x2",
        expr: "x^2/2",
        a: 0.0,
        eta_len: 1.0,
        fdomain: Some((0.0, 3.0)),
        claim: Claim::AlphaM(0.5, 1.0 / 3.0),
        kind: Kind::Bound(Hypothesis::AlphaMPreinvex {
            alpha: 0.5,
            m: 1.0 / 3.0,
        }),
        verdict: "bound holds",
        entries: &[
            Golden::new("integral", 0.2679, REF_TOL),
            Golden::new("bound", 0.75, 1e-6),
        ],
    },
];

pub fn find(id: &str) -> Option<&'static Example> {
    EXAMPLES.iter().find(|e| e.id == id)
}

pub fn ids() -> Vec<&'static str> {
    EXAMPLES.iter().map(|e| e.id).collect()
}
