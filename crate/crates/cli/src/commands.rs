use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::Instant;

use serde_json::{json, Map, Value};
use sugeno_hh::{
    bound_inputs_for, check_alpha_m_preinvex, check_condition_c, check_invex, check_preinvex,
    check_r_preinvex, classical_hh_preinvex, classical_hh_r_rhs, fuzzy_hh_bound, sugeno_integral,
    verify_fuzzy_hh, DistributionStrategy, EtaMap, Hypothesis, HypothesisReport, InvexInterval,
    MethodChoice, RealInterval, SampleSpec, ScalarFunction, SugenoMethod, SugenoOptions,
    SugenoResult, VerifyOptions,
};
use thiserror::Error;

use crate::args::{
    parse_range, parse_values, BoundArgs, Common, Method, Param, ReproduceArgs, SweepArgs,
};
use crate::expr::{parse_expression, EvalError, Expr, SyntaxError};
use crate::golden::{self, Claim, Example, Kind};
use crate::report::{finite_or_zero, num, Provenance, ResultBlock, RunReport};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{err}\n  {src}\n  {caret}^", caret = " ".repeat(.err.offset))]
    Syntax { src: String, err: SyntaxError },
    #[error("cannot evaluate f at x = {x}: {err}")]
    Eval { x: f64, err: EvalError },
    #[error(transparent)]
    Core(#[from] sugeno_hh::Error),
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(sugeno_hh::Error::NoRoot { .. }) => 3,
            _ => 1,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug)]
pub enum Output {
    Report(Box<RunReport>),
    Reports(Vec<RunReport>),
    Csv(String),
}

/// What a command produced, and whether every requested verdict passed.
#[derive(Debug)]
pub struct Outcome {
    pub output: Output,
    pub passed: bool,
}

/// A parsed expression bound to an evaluation domain.
struct Function {
    expr: Arc<Expr>,
    src: String,
}

impl Function {
    fn parse(src: &str, allow_param: bool) -> CliResult<Self> {
        let expr = parse_expression(src).map_err(|err| CliError::Syntax {
            src: src.to_string(),
            err,
        })?;
        if expr.uses_param() && !allow_param {
            return Err(CliError::Usage(
                "expression uses p, which only `sweep --param p` binds".to_string(),
            ));
        }
        Ok(Self {
            expr: Arc::new(expr),
            src: src.to_string(),
        })
    }

    fn scalar(&self, domain: RealInterval, p: Option<f64>) -> ScalarFunction {
        let e = self.expr.clone();
        ScalarFunction::new(self.src.clone(), domain, move |x| {
            e.eval(x, p).unwrap_or(f64::NAN)
        })
    }

    /// Turns a non-finite sample into the evaluation error behind it.
    fn explain(&self, p: Option<f64>, err: sugeno_hh::Error) -> CliError {
        if let sugeno_hh::Error::NonFinite { x } = err {
            if let Err(e) = self.expr.eval(x, p) {
                return CliError::Eval { x, err: e };
            }
        }
        CliError::Core(err)
    }
}

/// Interval and evaluation domain resolved from the common flags.
#[derive(Debug, Clone, Copy)]
struct Setup {
    a: f64,
    eta_len: f64,
    interval: RealInterval,
    domain: RealInterval,
}

fn setup(c: &Common) -> CliResult<Setup> {
    let eta_len = c.eta_len.unwrap_or(c.b - c.a);
    if !(eta_len >= 0.0) || !eta_len.is_finite() || !c.a.is_finite() {
        return Err(CliError::Usage(format!(
            "interval length must be finite and non-negative, got {eta_len}"
        )));
    }
    let interval = RealInterval::new(c.a, c.a + eta_len)?;
    let domain = match c.fdomain {
        Some((lo, hi)) => RealInterval::new(lo, hi)?,
        None => interval,
    };
    Ok(Setup {
        a: c.a,
        eta_len,
        interval,
        domain,
    })
}

fn sugeno_options(c: &Common) -> SugenoOptions {
    SugenoOptions {
        method: match c.method {
            Method::Auto => MethodChoice::Auto,
            Method::Fixedpoint => MethodChoice::FixedPoint,
            Method::Supmin => MethodChoice::SupMin,
        },
        grid: c.grid,
        infer_monotonicity: true,
        ..SugenoOptions::default()
    }
}

fn parse_eta(s: &str) -> CliResult<EtaMap> {
    if s == "affine" {
        return Ok(EtaMap::affine());
    }
    if let Some(k) = s.strip_prefix("scaled:") {
        let k: f64 = k
            .parse()
            .map_err(|_| CliError::Usage(format!("bad eta scale {k:?}")))?;
        if !k.is_finite() {
            return Err(CliError::Usage(format!("bad eta scale {k}")));
        }
        return Ok(EtaMap::scaled(k));
    }
    Err(CliError::Usage(format!(
        "unknown eta {s:?}; expected affine or scaled:k"
    )))
}

fn hypothesis(c: &Common) -> Option<Hypothesis> {
    match (c.r, c.alpha, c.m) {
        (Some(r), _, _) => Some(Hypothesis::RPreinvex { r }),
        (None, None, None) => None,
        (None, alpha, m) => Some(Hypothesis::AlphaMPreinvex {
            alpha: alpha.unwrap_or(1.0),
            m: m.unwrap_or(1.0),
        }),
    }
}

fn hypothesis_name(h: Option<Hypothesis>) -> &'static str {
    match h {
        None => "preinvex",
        Some(Hypothesis::RPreinvex { .. }) => "r_preinvex",
        Some(Hypothesis::AlphaMPreinvex { alpha: 1.0, .. }) => "m_preinvex",
        Some(Hypothesis::AlphaMPreinvex { .. }) => "alpha_m_preinvex",
    }
}

fn method_name(s: &SugenoResult) -> &'static str {
    match (s.method, s.strategy) {
        (SugenoMethod::SupMinGrid, _) => "sup_min",
        (SugenoMethod::FixedPoint, DistributionStrategy::MonotoneClosedForm) => {
            "fixed_point:closed_form"
        }
        (SugenoMethod::FixedPoint, DistributionStrategy::GridScan(_)) => "fixed_point:grid",
    }
}

fn integral_provenance(s: &SugenoResult) -> Provenance {
    let grid = match (s.method, s.strategy) {
        (SugenoMethod::FixedPoint, DistributionStrategy::MonotoneClosedForm) => None,
        (_, DistributionStrategy::GridScan(n)) => Some(n as u64),
        (SugenoMethod::SupMinGrid, _) => None,
    };
    Provenance {
        grid,
        ..Provenance::new(method_name(s), s.residual)
    }
}

fn common_inputs(c: &Common, f: &Function, s: &Setup) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("expr".into(), json!(f.src));
    m.insert("normal_form".into(), json!(f.expr.to_string()));
    m.insert("a".into(), num(s.a));
    m.insert("eta_len".into(), num(s.eta_len));
    if let Some(r) = c.r {
        m.insert("r".into(), num(r));
    }
    if let Some(alpha) = c.alpha {
        m.insert("alpha".into(), num(alpha));
    }
    if let Some(mm) = c.m {
        m.insert("m".into(), num(mm));
    }
    if let Some((lo, hi)) = c.fdomain {
        m.insert("fdomain".into(), json!([num(lo), num(hi)]));
    }
    m.insert("eta".into(), json!(c.eta));
    m
}

/// Results of the sampled checks: invexity of K, Condition C, and the
/// hypothesis on f. Condition C is informational only.
struct CheckRun {
    holds: bool,
    witness: Option<Value>,
    checks: Vec<Value>,
    residual: f64,
}

fn check_entry(name: &str, rep: &HypothesisReport, counts: bool) -> Value {
    json!({
        "name": name,
        "holds": rep.holds,
        "samples": rep.samples_checked,
        "max_violation": num(rep.max_violation),
        "counts_toward_verdict": counts,
    })
}

fn run_checks(
    f: &ScalarFunction,
    k: &RealInterval,
    eta: &EtaMap,
    hyp: Option<Hypothesis>,
    spec: SampleSpec,
) -> sugeno_hh::Result<CheckRun> {
    let invex = check_invex(k, eta, spec)?;
    let cond_c = check_condition_c(k, eta, spec)?;
    let mut checks = vec![
        check_entry("invex", &invex, true),
        check_entry("condition_c", &cond_c, false),
    ];
    if !invex.holds {
        return Ok(CheckRun {
            holds: false,
            witness: invex
                .witness
                .map(|w| serde_json::to_value(w).expect("witness")),
            checks,
            residual: invex.max_violation,
        });
    }
    let rep = match hyp {
        None => check_preinvex(f, k, eta, spec)?,
        Some(Hypothesis::RPreinvex { r }) => check_r_preinvex(f, k, eta, r, spec)?,
        Some(Hypothesis::AlphaMPreinvex { alpha, m }) => {
            check_alpha_m_preinvex(f, k, eta, alpha, m, spec)?
        }
    };
    checks.push(check_entry(hypothesis_name(hyp), &rep, true));
    Ok(CheckRun {
        holds: rep.holds,
        witness: rep
            .witness
            .map(|w| serde_json::to_value(w).expect("witness")),
        checks,
        residual: rep.max_violation.max(0.0),
    })
}

pub fn integrate(c: &Common, command: String) -> CliResult<Outcome> {
    let start = Instant::now();
    let f = Function::parse(&c.expr, false)?;
    let s = setup(c)?;
    let g = f.scalar(s.domain, None);
    let res =
        sugeno_integral(&g, &s.interval, &sugeno_options(c)).map_err(|e| f.explain(None, e))?;
    let mut extra = BTreeMap::new();
    extra.insert("measure".into(), num(s.interval.length()));
    let mut provenance = integral_provenance(&res);
    provenance.elapsed_ms = elapsed_ms(start);
    let report = RunReport {
        command,
        inputs: common_inputs(c, &f, &s),
        result: ResultBlock {
            integral: Some(res.value),
            extra,
            ..Default::default()
        },
        provenance,
        verdict: "ok".into(),
    };
    Ok(Outcome {
        output: Output::Report(Box::new(report)),
        passed: true,
    })
}

pub fn check(c: &Common, command: String) -> CliResult<Outcome> {
    let start = Instant::now();
    let f = Function::parse(&c.expr, false)?;
    let s = setup(c)?;
    let eta = parse_eta(&c.eta)?;
    let g = f.scalar(s.domain, None);
    let hyp = hypothesis(c);
    let spec = SampleSpec::new(c.samples, c.seed);
    let run = run_checks(&g, &s.interval, &eta, hyp, spec).map_err(|e| f.explain(None, e))?;
    let mut inputs = common_inputs(c, &f, &s);
    inputs.insert("hypothesis".into(), json!(hypothesis_name(hyp)));
    inputs.insert("samples".into(), json!(c.samples));
    let mut extra = BTreeMap::new();
    extra.insert("checks".into(), Value::Array(run.checks));
    let report = RunReport {
        command,
        inputs,
        result: ResultBlock {
            holds: Some(run.holds),
            witness: run.witness,
            extra,
            ..Default::default()
        },
        provenance: Provenance {
            seed: Some(c.seed),
            elapsed_ms: elapsed_ms(start),
            ..Provenance::new("sampling", run.residual)
        },
        verdict: if run.holds { "holds" } else { "violated" }.into(),
    };
    Ok(Outcome {
        output: Output::Report(Box::new(report)),
        passed: run.holds,
    })
}

pub fn bound(args: &BoundArgs, command: String) -> CliResult<Outcome> {
    let start = Instant::now();
    let c = &args.common;
    let f = Function::parse(&c.expr, false)?;
    let s = setup(c)?;
    let hyp = hypothesis(c)
        .ok_or_else(|| CliError::Usage("bound needs --r or --alpha/--m".to_string()))?;
    let iv = InvexInterval::new(s.a, s.eta_len)?;
    let g = f.scalar(s.domain, None);
    let opts = VerifyOptions {
        sugeno: sugeno_options(c),
        ..VerifyOptions::default()
    };
    let rep = verify_fuzzy_hh(&g, &iv, hyp, &opts).map_err(|e| f.explain(None, e))?;

    let mut extra = BTreeMap::new();
    extra.insert("margin".into(), num(rep.margin));
    extra.insert("fa".into(), num(rep.inputs.fa));
    extra.insert("fend".into(), num(rep.inputs.fend));
    if let Some(fs) = rep.inputs.fscaled {
        extra.insert("fscaled".into(), num(fs));
    }
    extra.insert("root_residual".into(), num(rep.bound.residual));
    extra.insert(
        "bracket".into(),
        json!([num(rep.bound.bracket.0), num(rep.bound.bracket.1)]),
    );
    let mut result = ResultBlock {
        integral: Some(rep.integral.value),
        bound: Some(rep.bound.bound),
        beta: Some(rep.bound.beta),
        case: Some(rep.bound.case.as_str().to_string()),
        ..Default::default()
    };
    let mut provenance = integral_provenance(&rep.integral);
    let mut verdict = if rep.pass { "pass" } else { "bound violated" };
    let mut passed = rep.pass;
    if args.check {
        let eta = parse_eta(&c.eta)?;
        let spec = SampleSpec::new(c.samples, c.seed);
        let run =
            run_checks(&g, &s.interval, &eta, Some(hyp), spec).map_err(|e| f.explain(None, e))?;
        result.holds = Some(run.holds);
        result.witness = run.witness;
        extra.insert("checks".into(), Value::Array(run.checks));
        provenance.seed = Some(c.seed);
        if !run.holds {
            passed = false;
            if rep.pass {
                verdict = "hypothesis violated";
            }
        }
    }
    result.extra = extra;
    provenance.elapsed_ms = elapsed_ms(start);
    let mut inputs = common_inputs(c, &f, &s);
    inputs.insert("hypothesis".into(), json!(hypothesis_name(Some(hyp))));
    let report = RunReport {
        command,
        inputs,
        result,
        provenance,
        verdict: verdict.into(),
    };
    Ok(Outcome {
        output: Output::Report(Box::new(report)),
        passed,
    })
}

/// Runs one worked example; the second value is whether it matched.
pub fn reproduce_one(
    ex: &Example,
    spec: SampleSpec,
    command: String,
) -> CliResult<(RunReport, bool)> {
    let start = Instant::now();
    let f = Function::parse(ex.expr, false)?;
    let iv = InvexInterval::new(ex.a, ex.eta_len)?;
    let domain = match ex.fdomain {
        Some((lo, hi)) => RealInterval::new(lo, hi)?,
        None => iv.domain(),
    };
    let g = f.scalar(domain, None);
    let opts = SugenoOptions {
        infer_monotonicity: true,
        ..SugenoOptions::default()
    };
    let wrap = |e| f.explain(None, e);

    let mut result = ResultBlock::default();
    let mut values: BTreeMap<&str, f64> = BTreeMap::new();
    let integral;
    let shown_verdict: &str;
    match ex.kind {
        Kind::ClassicalR { r } => {
            integral = sugeno_integral(&g, &iv.domain(), &opts).map_err(wrap)?;
            let rhs = classical_hh_r_rhs(
                g.eval_checked(iv.a()).map_err(wrap)?,
                g.eval_checked(iv.end()).map_err(wrap)?,
                r,
            )?;
            values.insert("classical_rhs", rhs.value);
            result.extra.insert("classical_rhs".into(), num(rhs.value));
            result.extra.insert(
                "integral_over_eta".into(),
                num(integral.value / iv.eta_len()),
            );
            shown_verdict = if integral.value / iv.eta_len() > rhs.value {
                "classical HH violated"
            } else {
                "classical HH holds"
            };
        }
        Kind::ClassicalLeft | Kind::ClassicalRight => {
            integral = sugeno_integral(&g, &iv.domain(), &opts).map_err(wrap)?;
            let sides = classical_hh_preinvex(&g, &iv).map_err(wrap)?;
            result.extra.insert("midpoint".into(), num(sides.midpoint));
            result
                .extra
                .insert("endpoint_mean".into(), num(sides.endpoint_mean));
            if matches!(ex.kind, Kind::ClassicalLeft) {
                values.insert("midpoint", sides.midpoint);
                shown_verdict = if integral.value < sides.midpoint {
                    "left side violated"
                } else {
                    "left side holds"
                };
            } else {
                values.insert("endpoint_mean", sides.endpoint_mean);
                shown_verdict = if integral.value > sides.endpoint_mean {
                    "right side violated"
                } else {
                    "right side holds"
                };
            }
        }
        Kind::Bound(h) => {
            let rep = verify_fuzzy_hh(
                &g,
                &iv,
                h,
                &VerifyOptions {
                    sugeno: opts,
                    ..VerifyOptions::default()
                },
            )
            .map_err(wrap)?;
            integral = rep.integral;
            values.insert("bound", rep.bound.bound);
            result.bound = Some(rep.bound.bound);
            result.beta = Some(rep.bound.beta);
            result.case = Some(rep.bound.case.as_str().to_string());
            result.extra.insert("margin".into(), num(rep.margin));
            result
                .extra
                .insert("root_residual".into(), num(rep.bound.residual));
            shown_verdict = if rep.pass {
                "bound holds"
            } else {
                "bound violated"
            };
        }
    }
    values.insert("integral", integral.value);
    result.integral = Some(integral.value);

    let mut all_match = shown_verdict == ex.verdict;
    let mut rows = Vec::new();
    for entry in ex.entries {
        let actual = values.get(entry.quantity).copied().unwrap_or(f64::NAN);
        let ok = entry.matches(actual);
        all_match &= ok;
        let mut row = json!({
            "quantity": entry.quantity,
            "value": num(actual),
            "expected": num(entry.expected),
            "tol": num(entry.tol),
            "diff": num((actual - entry.expected).abs()),
            "pass": ok,
        });
        if let Some(q) = entry.quoted {
            row["quoted"] = num(q);
        }
        if let Some(n) = entry.note {
            row["note"] = json!(n);
        }
        rows.push(row);
    }
    result.extra.insert("golden".into(), Value::Array(rows));
    result
        .extra
        .insert("expected_verdict".into(), json!(ex.verdict));

    // the asserted hypothesis is reported, never part of the verdict
    let claim = match ex.claim {
        Claim::Preinvex => None,
        Claim::RPreinvex(r) => Some(Hypothesis::RPreinvex { r }),
        Claim::AlphaM(alpha, m) => Some(Hypothesis::AlphaMPreinvex { alpha, m }),
    };
    let run = run_checks(&g, &iv.domain(), &EtaMap::affine(), claim, spec).map_err(wrap)?;
    let mut asserted = json!({
        "hypothesis": hypothesis_name(claim),
        "holds": run.holds,
        "counts_toward_verdict": false,
    });
    if let Some(w) = run.witness {
        asserted["witness"] = w;
        asserted["note"] = json!("asserted hypothesis refuted by sampling");
    }
    result.extra.insert("asserted_hypothesis".into(), asserted);

    let mut inputs = Map::new();
    inputs.insert("id".into(), json!(ex.id));
    inputs.insert("expr".into(), json!(ex.expr));
    inputs.insert("a".into(), num(ex.a));
    inputs.insert("eta_len".into(), num(ex.eta_len));
    if let Some((lo, hi)) = ex.fdomain {
        inputs.insert("fdomain".into(), json!([num(lo), num(hi)]));
    }
    if let Some(h) = claim {
        inputs.insert(
            "hypothesis".into(),
            serde_json::to_value(h).expect("hypothesis"),
        );
    }

    let mut provenance = integral_provenance(&integral);
    provenance.seed = Some(spec.seed);
    provenance.elapsed_ms = elapsed_ms(start);
    let verdict = if all_match {
        shown_verdict.to_string()
    } else {
        format!("golden mismatch ({shown_verdict})")
    };
    Ok((
        RunReport {
            command,
            inputs,
            result,
            provenance,
            verdict,
        },
        all_match,
    ))
}

pub fn reproduce(args: &ReproduceArgs, command: String) -> CliResult<Outcome> {
    let spec = SampleSpec::new(args.samples, args.seed);
    if args.id == "all" {
        let mut reports = Vec::new();
        let mut passed = true;
        for ex in golden::EXAMPLES {
            let (rep, ok) = reproduce_one(ex, spec, command.clone())?;
            passed &= ok;
            reports.push(rep);
        }
        return Ok(Outcome {
            output: Output::Reports(reports),
            passed,
        });
    }
    let ex = golden::find(&args.id).ok_or_else(|| {
        CliError::Usage(format!(
            "unknown example {:?}; known: {}, all",
            args.id,
            golden::ids().join(", ")
        ))
    })?;
    let (rep, ok) = reproduce_one(ex, spec, command)?;
    Ok(Outcome {
        output: Output::Report(Box::new(rep)),
        passed: ok,
    })
}

fn with_param(c: &Common, param: Param, v: f64) -> Common {
    let mut c = c.clone();
    match param {
        Param::R => c.r = Some(v),
        Param::Alpha => c.alpha = Some(v),
        Param::M => c.m = Some(v),
        Param::EtaLen => c.eta_len = Some(v),
        Param::P => {}
    }
    c
}

fn field(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn sweep(args: &SweepArgs) -> CliResult<Outcome> {
    let values = match (&args.values, &args.range) {
        (Some(v), None) => parse_values(v),
        (None, Some(r)) => parse_range(r),
        _ => Err("sweep needs exactly one of --values or --range".to_string()),
    }
    .map_err(CliError::Usage)?;
    let p_sweep = args.param == Param::P;
    let f = Function::parse(&args.common.expr, p_sweep)?;

    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["param", "integral", "beta", "bound", "case"])?;
    for v in values {
        let c = with_param(&args.common, args.param, v);
        let p = p_sweep.then_some(v);
        let row = sweep_row(&c, &f, p);
        let (integral, beta, bound, case) = match row {
            Ok(r) => r,
            Err(e) => (None, None, None, format!("error: {e}")),
        };
        w.write_record([
            v.to_string(),
            field(integral),
            field(beta),
            field(bound),
            case,
        ])?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Io(e.into_error()))?;
    Ok(Outcome {
        output: Output::Csv(String::from_utf8(bytes).expect("csv is utf-8")),
        passed: true,
    })
}

type Row = (Option<f64>, Option<f64>, Option<f64>, String);

fn sweep_row(c: &Common, f: &Function, p: Option<f64>) -> CliResult<Row> {
    let s = setup(c)?;
    let g = f.scalar(s.domain, p);
    let integral = sugeno_integral(&g, &s.interval, &sugeno_options(c))
        .map_err(|e| f.explain(p, e))?
        .value;
    let Some(h) = hypothesis(c) else {
        return Ok((Some(integral), None, None, String::new()));
    };
    let iv = InvexInterval::new(s.a, s.eta_len)?;
    let inputs = bound_inputs_for(&g, &iv, h).map_err(|e| f.explain(p, e))?;
    let b = fuzzy_hh_bound(&inputs, VerifyOptions::default().root_tol)?;
    Ok((
        Some(integral),
        Some(b.beta),
        Some(b.bound),
        b.case.as_str().to_string(),
    ))
}

fn elapsed_ms(start: Instant) -> f64 {
    finite_or_zero(start.elapsed().as_secs_f64() * 1e3)
}
