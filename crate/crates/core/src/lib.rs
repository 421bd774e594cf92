//! Sugeno integrals on real intervals and fuzzy Hermite-Hadamard type
//! upper bounds for `r`-preinvex and `(alpha, m)`-preinvex functions.
//!
//! * [`measure`]: intervals, Lebesgue measure, distribution functions
//! * [`sugeno`]: the integral, by fixed point and by direct sup-min
//! * [`convexity`]: sampling checkers for the generalized-convexity hypotheses
//! * [`bounds`]: case dispatch and root solving for the upper bounds

// `!(x > 0.0)` is used on purpose so NaN falls into the rejecting branch
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod convexity;
pub mod error;
pub mod measure;
pub mod sugeno;

pub use bounds::{
    alpha_m_bound, bound_inputs_for, classical_hh_preinvex, classical_hh_r_rhs, fuzzy_hh_bound,
    r_preinvex_bound, solve_beta, verify_fuzzy_hh, BoundCase, BoundInputs, BoundResult,
    ClassicalSides, Hypothesis, InvexInterval, PowerMeanRhs, VerifyOptions, VerifyReport,
};
pub use convexity::{
    check_alpha_m_preinvex, check_condition_c, check_invex, check_m_preinvex, check_preinvex,
    check_r_preinvex, EtaMap, HypothesisReport, SampleSpec, Witness, WitnessKind,
};
pub use error::{Error, Result};
pub use measure::{
    DistributionProfile, DistributionStrategy, LebesgueMeasure, Monotonicity, RealInterval,
    ScalarFunction,
};
pub use sugeno::{
    sugeno_fixed_point, sugeno_integral, sugeno_supmin, MethodChoice, SugenoMethod, SugenoOptions,
    SugenoResult,
};
