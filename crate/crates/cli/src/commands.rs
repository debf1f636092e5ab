//! Command implementations. Each returns a JSON report and an exit code.

use num_complex::Complex64;
use pcsio_core::calculus::{
    classify_jump, essential_spectrum, fredholm_algebra, fredholm_scalar, index_scalar, SpectrumPoint, SweepConfig,
};
use pcsio_core::geometry::MEMBERSHIP_TOL;
use pcsio_core::oracles::{membership_oracle, spiral_point_oracle, winding_oracle};
use pcsio_core::spaces::{
    ap_estimate, carleson_estimate, dini_lipschitz_check, estimate_whirl, khvedelidze_check, PARAM_TOL,
    ON_CURVE_TOL,
};
use pcsio_core::symbols::{OperatorExpr, PCSymbol};
use pcsio_core::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::config::Loaded;
use crate::plot;

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 2;
pub const EXIT_PRECONDITION: i32 = 3;
pub const EXIT_MALFORMED: i32 = 64;

/// Node pairs examined by the Dini-Lipschitz check.
pub const DINI_PAIR_BUDGET: usize = 20_000;
/// Radius grid of the Carleson estimate.
pub const CARLESON_GRID: usize = 9;
/// Window of the whirl estimate.
pub const WHIRL_WINDOW: f64 = 0.1;
/// Tolerance of the oracle spiral-membership checks on computed points.
pub const VERIFY_MEMBERSHIP_TOL: f64 = 1e-6;
/// Random probes drawn per check in verification mode.
pub const VERIFY_PROBES: usize = 64;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunOptions {
    pub verify: bool,
    pub sweep_samples: Option<usize>,
    pub tol: Option<f64>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CommandOutput {
    pub report: Value,
    pub exit: i32,
    pub csv: Option<String>,
    pub svg: Option<String>,
}

impl CommandOutput {
    fn new(report: Value, exit: i32) -> Self {
        CommandOutput { report, exit, csv: None, svg: None }
    }
}

pub(crate) fn c2(z: Complex64) -> Value {
    json!([z.re, z.im])
}

/// Finite numbers as JSON numbers, infinities as strings.
fn real(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        json!(format!("{x}"))
    }
}

fn sweep_of(loaded: &Loaded, opts: &RunOptions) -> SweepConfig {
    let mut s = loaded.config.sweep;
    if let Some(k) = opts.sweep_samples {
        s.mu_samples = k;
    }
    if let Some(t) = opts.tol {
        s.det_tol = t;
    }
    s
}

fn seed_of(loaded: &Loaded, opts: &RunOptions) -> u64 {
    opts.seed.unwrap_or(loaded.config.seed)
}

fn tolerances(sweep: &SweepConfig) -> Value {
    json!({
        "det_tol": sweep.det_tol,
        "integer_tol": sweep.integer_tol,
        "membership_tol": MEMBERSHIP_TOL,
        "param_tol": PARAM_TOL,
        "on_curve_tol": ON_CURVE_TOL,
        "tail_eps": sweep.tail_eps,
        "mu_samples": sweep.mu_samples,
        "s_range": sweep.s_range,
        "continuity_samples": sweep.continuity_samples,
        "refine_depth": sweep.refine_depth,
    })
}

fn refusal(command: &str, e: &Error, sweep: &SweepConfig) -> CommandOutput {
    CommandOutput::new(
        json!({ "command": command, "status": "refused", "reason": e.to_string(), "tolerances": tolerances(sweep) }),
        EXIT_PRECONDITION,
    )
}

fn expression<'a>(loaded: &'a Loaded, command: &str) -> Result<&'a OperatorExpr, CommandOutput> {
    loaded.expression.as_ref().ok_or_else(|| {
        CommandOutput::new(
            json!({ "command": command, "status": "malformed", "reason": "config has no expression" }),
            EXIT_MALFORMED,
        )
    })
}

fn scalar_symbol(loaded: &Loaded, e: &OperatorExpr) -> Option<Result<PCSymbol, Error>> {
    if loaded.n != 1 {
        return None;
    }
    e.as_scalar_sio(1)
}

/// Boundedness of `S` on the weighted space.
pub fn cmd_check_bounded(loaded: &Loaded, opts: &RunOptions) -> CommandOutput {
    let sweep = sweep_of(loaded, opts);
    let space = &loaded.space;
    let run = || -> Result<Value, Error> {
        let khv = khvedelidze_check(&space.curve, &space.exponent, &space.weight)?;
        let dini = dini_lipschitz_check(&space.curve, &space.exponent, DINI_PAIR_BUDGET)?;
        let carleson = carleson_estimate(&space.curve, CARLESON_GRID)?;
        let whirl: Vec<Value> = space
            .curve
            .whirl_marks()
            .iter()
            .map(|m| {
                let est = estimate_whirl(&space.curve, m.u, WHIRL_WINDOW).ok();
                json!({ "t": m.u, "delta": m.delta, "estimate": est, "window": WHIRL_WINDOW })
            })
            .collect();
        let status = if !dini.pass {
            "hypotheses_unmet"
        } else if khv.bounded {
            "bounded"
        } else {
            "not_bounded"
        };
        let bounded = if dini.pass { Some(khv.bounded) } else { None };
        let violations: Vec<Value> =
            khv.violations.iter().map(|(k, v)| json!({ "weight_index": k, "value": v })).collect();
        let mut report = json!({
            "command": "check-bounded",
            "status": status,
            "bounded": bounded,
            "khvedelidze": {
                "bounded": khv.bounded,
                "values": khv.values,
                "violations": violations,
                "semantics": "0 < 1/p(tau_k) + lambda_k < 1, strict",
            },
            "dini_lipschitz": {
                "pass": dini.pass,
                "worst_constant": dini.worst_a,
                "stated_constant": space.exponent.dini_constant(),
                "pairs_checked": dini.pairs_checked,
                "pair_budget": DINI_PAIR_BUDGET,
                "vacuous": dini.vacuous,
            },
            "carleson_estimate": { "value": carleson, "grid": CARLESON_GRID },
            "whirl_points": whirl,
            "tolerances": tolerances(&sweep),
        });
        if opts.verify {
            let ap = ap_estimate(&space.curve, &space.exponent, &space.weight, 6)?;
            report["verify"] = json!({ "ap_estimate": real(ap), "ap_grid": 6, "note": "diagnostic lower estimate" });
        }
        Ok(report)
    };
    match run() {
        Ok(report) => {
            let exit = match report["status"].as_str() {
                Some("bounded") => EXIT_OK,
                Some("not_bounded") => EXIT_NEGATIVE,
                _ => EXIT_PRECONDITION,
            };
            CommandOutput::new(report, exit)
        }
        Err(e) => refusal("check-bounded", &e, &sweep),
    }
}

/// Fredholm verdict: closed form for scalar `aP + Q`, bundle sweep otherwise.
pub fn cmd_fredholm(loaded: &Loaded, opts: &RunOptions) -> CommandOutput {
    let sweep = sweep_of(loaded, opts);
    let e = match expression(loaded, "fredholm") {
        Ok(e) => e,
        Err(out) => return out,
    };
    let space = &loaded.space;
    let run = || -> Result<Value, Error> {
        let mut report = match scalar_symbol(loaded, e) {
            Some(a) => {
                let a = a?;
                let rep = fredholm_scalar(&a, space, &sweep)?;
                let quantities: Vec<Value> =
                    rep.quantities.iter().map(|(t, q)| json!({ "t": t, "quantity": q })).collect();
                let witnesses: Vec<Value> =
                    rep.witnesses.iter().map(|w| json!({ "t": w.t, "kind": w.kind, "value": w.value })).collect();
                let classes: Vec<Value> = if rep.fredholm {
                    a.jump_points()
                        .iter()
                        .map(|&t| classify_jump(&a, t, space).map(|k| json!({ "t": t, "gamma": c2(k.gamma), "m": k.m })))
                        .collect::<Result<_, _>>()?
                } else {
                    Vec::new()
                };
                let mut r = json!({
                    "engine": "scalar",
                    "fredholm": rep.fredholm,
                    "margin": real(rep.margin),
                    "min_abs_value": real(rep.min_abs_value),
                    "quantities": quantities,
                    "witnesses": witnesses,
                    "jumps": classes,
                });
                if opts.verify {
                    r["verify"] = verify_scalar(&a, loaded, &sweep, rep.fredholm)?;
                }
                r
            }
            None => {
                let rep = fredholm_algebra(e, space, &sweep)?;
                let mut r = json!({
                    "engine": "sweep",
                    "fredholm": rep.fredholm,
                    "min_abs_det": rep.min_abs_det,
                    "argmin": { "t": rep.argmin.t, "mu": c2(rep.argmin.mu), "delta": rep.argmin.delta, "r": rep.argmin.r },
                    "evaluations": rep.evaluations,
                    "special_points": rep.special_points,
                    "certified": "sampled sweep with local refinement",
                });
                if opts.verify {
                    let fine = SweepConfig {
                        mu_samples: 2 * sweep.mu_samples,
                        continuity_samples: 2 * sweep.continuity_samples,
                        ..sweep
                    };
                    let again = fredholm_algebra(e, space, &fine)?;
                    r["verify"] = json!({
                        "checks": [{
                            "name": "refined_sweep",
                            "pass": again.fredholm == rep.fredholm,
                            "min_abs_det": again.min_abs_det,
                            "mu_samples": fine.mu_samples,
                        }],
                    });
                }
                r
            }
        };
        report["command"] = json!("fredholm");
        report["expression"] = json!(expression_text(loaded));
        report["tolerances"] = tolerances(&sweep);
        Ok(report)
    };
    match run() {
        Ok(report) => {
            let exit = if report["fredholm"] == json!(true) { EXIT_OK } else { EXIT_NEGATIVE };
            CommandOutput::new(report, exit)
        }
        Err(e) => refusal("fredholm", &e, &sweep),
    }
}

/// Cross-checks of the scalar verdict: the bundle sweep, and oracle
/// membership of the zero of `a11` in each jump fibre.
fn verify_scalar(a: &PCSymbol, loaded: &Loaded, sweep: &SweepConfig, verdict: bool) -> Result<Value, Error> {
    let space = &loaded.space;
    let e = OperatorExpr::scalar_sio("a", a.clone());
    let alg = fredholm_algebra(&e, space, sweep)?;
    let mut checks = vec![json!({
        "name": "bundle_sweep",
        "pass": alg.fredholm == verdict,
        "min_abs_det": alg.min_abs_det,
        "det_tol": sweep.det_tol,
    })];
    let zero = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    for j in a.jumps() {
        let (l, r) = (j.left[(0, 0)], j.right[(0, 0)]);
        let (delta, rr) = (space.delta_at(j.t), space.r_at(j.t));
        // a11(mu) = r mu + l (1 - mu) vanishes at mu0 = l / (l - r).
        let mu0 = l / (l - r);
        let on = membership_oracle(mu0, zero, one, delta, rr, VERIFY_MEMBERSHIP_TOL);
        checks.push(json!({
            "name": "zero_of_a11_on_fibre",
            "t": j.t,
            "mu0": c2(mu0),
            "on_fibre": on,
            "pass": !(on && verdict),
            "tol": VERIFY_MEMBERSHIP_TOL,
        }));
    }
    let all = checks.iter().all(|c| c["pass"] == json!(true));
    Ok(json!({ "checks": checks, "all_pass": all }))
}

fn spectrum_csv(points: &[SpectrumPoint]) -> String {
    let mut out = String::from("re,im,t,s\n");
    for p in points {
        let s = match p.s {
            None => String::new(),
            Some(s) => format!("{s}"),
        };
        out.push_str(&format!("{},{},{},{}\n", p.lambda.re, p.lambda.im, p.t, s));
    }
    out
}

/// Essential spectrum cloud as CSV, with summary report and optional SVG.
pub fn cmd_spectrum(loaded: &Loaded, opts: &RunOptions, want_svg: bool) -> CommandOutput {
    let sweep = sweep_of(loaded, opts);
    let e = match expression(loaded, "spectrum") {
        Ok(e) => e,
        Err(out) => return out,
    };
    let space = &loaded.space;
    let cloud = match essential_spectrum(e, space, &sweep) {
        Ok(c) => c,
        Err(err) => return refusal("spectrum", &err, &sweep),
    };
    let mut distinct: Vec<Complex64> = Vec::new();
    for p in &cloud {
        if distinct.len() > 16 {
            break;
        }
        if !distinct.iter().any(|z| (z - p.lambda).norm() <= 1e-9) {
            distinct.push(p.lambda);
        }
    }
    let (lo, hi) = bounds(&cloud);
    let scalar = scalar_symbol(loaded, e).and_then(|r| r.ok());
    let mut report = json!({
        "command": "spectrum",
        "expression": expression_text(loaded),
        "n": loaded.n,
        "points": cloud.len(),
        "distinct": if distinct.len() <= 16 { Value::Array(distinct.iter().map(|z| c2(*z)).collect()) } else { Value::Null },
        "bounding_box": { "min": c2(lo), "max": c2(hi) },
        "csv_columns": ["re", "im", "t", "s"],
        "tolerances": tolerances(&sweep),
    });
    if opts.verify {
        if let Some(a) = &scalar {
            report["verify"] = verify_spectrum(a, loaded, &sweep, &cloud, seed_of(loaded, opts));
        }
    }
    let svg = want_svg.then(|| plot::spectrum_svg(&cloud, scalar.as_ref(), space, &sweep));
    let exit = EXIT_OK;
    CommandOutput { report, exit, csv: Some(spectrum_csv(&cloud)), svg }
}

/// Every fibre sample of `aP + Q` has an eigenvalue on the affine spiral,
/// and random points away from the cloud are regular values.
fn verify_spectrum(a: &PCSymbol, loaded: &Loaded, sweep: &SweepConfig, cloud: &[SpectrumPoint], seed: u64) -> Value {
    let space = &loaded.space;
    let mut failures = 0usize;
    let mut checked = 0usize;
    for pair in cloud.chunks(2) {
        let p = pair[0];
        let Some(s) = p.s else { continue };
        if !s.is_finite() {
            continue;
        }
        let Ok((l, r)) = a.one_sided_limits(p.t) else { continue };
        let (l, r) = (l[(0, 0)], r[(0, 0)]);
        if l == r {
            continue;
        }
        checked += 1;
        let (delta, rr) = (space.delta_at(p.t), space.r_at(p.t));
        if !pair.iter().any(|q| membership_oracle(q.lambda, l, r, delta, rr, VERIFY_MEMBERSHIP_TOL)) {
            failures += 1;
        }
    }
    let (lo, hi) = bounds(cloud);
    let diam = (hi - lo).norm().max(1.0);
    let margin = 0.05 * diam;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let one = Complex64::new(1.0, 0.0);
    let (mut probes, mut probe_failures) = (0usize, 0usize);
    for _ in 0..VERIFY_PROBES {
        let lam = Complex64::new(
            rng.gen_range(lo.re - margin * 4.0..hi.re + margin * 4.0),
            rng.gen_range(lo.im - margin * 4.0..hi.im + margin * 4.0),
        );
        if cloud.iter().any(|q| (q.lambda - lam).norm() < margin) {
            continue;
        }
        probes += 1;
        // A - lam = (1 - lam) [((a - lam) / (1 - lam)) P + Q].
        let shifted = a.map(|m| m.map(|x| (x - lam) / (one - lam)));
        let regular = shifted.and_then(|b| fredholm_scalar(&b, space, sweep)).map(|r| r.fredholm);
        if regular.ok() != Some(true) {
            probe_failures += 1;
        }
    }
    let all = failures == 0 && probe_failures == 0;
    json!({
        "checks": [
            { "name": "fibre_eigenvalue_on_affine_spiral", "checked": checked, "failures": failures, "pass": failures == 0, "tol": VERIFY_MEMBERSHIP_TOL },
            { "name": "off_cloud_regular", "probes": probes, "failures": probe_failures, "pass": probe_failures == 0, "margin": margin },
        ],
        "all_pass": all,
        "seed": seed,
    })
}

fn bounds(cloud: &[SpectrumPoint]) -> (Complex64, Complex64) {
    let mut lo = Complex64::new(f64::INFINITY, f64::INFINITY);
    let mut hi = Complex64::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
    for p in cloud {
        lo = Complex64::new(lo.re.min(p.lambda.re), lo.im.min(p.lambda.im));
        hi = Complex64::new(hi.re.max(p.lambda.re), hi.im.max(p.lambda.im));
    }
    (lo, hi)
}

/// Index of scalar `aP + Q`.
pub fn cmd_index(loaded: &Loaded, opts: &RunOptions) -> CommandOutput {
    let sweep = sweep_of(loaded, opts);
    let e = match expression(loaded, "index") {
        Ok(e) => e,
        Err(out) => return out,
    };
    let a = match scalar_symbol(loaded, e) {
        Some(Ok(a)) => a,
        Some(Err(err)) => return refusal("index", &err, &sweep),
        None => {
            return refusal("index", &Error::InvalidArgument("index needs a scalar expression of the form a*P + Q".into()), &sweep)
        }
    };
    let space = &loaded.space;
    let rep = match index_scalar(&a, space, &sweep) {
        Ok(r) => r,
        Err(err) => return refusal("index", &err, &sweep),
    };
    let mut report = json!({
        "command": "index",
        "expression": expression_text(loaded),
        "index": rep.index,
        "winding": rep.winding,
        "residue": rep.residue,
        "residue_limit": 1e-6 * std::f64::consts::TAU,
        "increments": rep.increments,
        "tolerances": tolerances(&sweep),
    });
    if opts.verify {
        report["verify"] = verify_index(&a, loaded, rep.index);
    }
    CommandOutput::new(report, EXIT_OK)
}

/// Dense samples of the completed symbol curve for the winding oracle.
pub fn completed_curve_samples(a: &PCSymbol, loaded: &Loaded, s_max: f64, ds: f64) -> Vec<Complex64> {
    let space = &loaded.space;
    let jumps = a.jumps();
    let mut out = Vec::new();
    for (i, arc) in a.arcs().iter().enumerate() {
        for k in arc {
            out.push(k.value[(0, 0)]);
        }
        if !jumps.is_empty() {
            let j = &jumps[(i + 1) % jumps.len()];
            let (l, r) = (j.left[(0, 0)], j.right[(0, 0)]);
            let steps = (2.0 * s_max / ds).ceil() as usize;
            for k in 0..=steps {
                let s = -s_max + 2.0 * s_max * k as f64 / steps as f64;
                out.push(spiral_point_oracle(l, r, space.delta_at(j.t), space.r_at(j.t), s));
            }
        }
    }
    out
}

fn verify_index(a: &PCSymbol, loaded: &Loaded, index: i64) -> Value {
    let samples = completed_curve_samples(a, loaded, 40.0, 0.005);
    let oracle = winding_oracle(&samples).map(|(w, res)| (-w, res));
    let mut checks = vec![match oracle {
        Ok((idx, res)) => json!({ "name": "winding_oracle", "index": idx, "residue": res, "pass": idx == index }),
        Err(e) => json!({ "name": "winding_oracle", "error": e.to_string(), "pass": false }),
    }];
    // index = -(W_c + sum m_t), W_c the winding with principal closing at jumps.
    let space = &loaded.space;
    let mut total = 0.0;
    let mut sum_m = 0i64;
    let mut ok = true;
    for arc in a.arcs() {
        for w in arc.windows(2) {
            total += (w[1].value[(0, 0)] / w[0].value[(0, 0)]).arg();
        }
    }
    for j in a.jumps() {
        total += (j.right[(0, 0)] / j.left[(0, 0)]).arg();
        match classify_jump(a, j.t, space) {
            Ok(k) => sum_m += k.m,
            Err(_) => ok = false,
        }
    }
    let wc = (total / std::f64::consts::TAU).round() as i64;
    checks.push(json!({ "name": "jump_relation", "continuous_winding": wc, "sum_m": sum_m, "pass": ok && -(wc + sum_m) == index }));
    let all = checks.iter().all(|c| c["pass"] == json!(true));
    json!({ "checks": checks, "all_pass": all })
}

fn expression_text(loaded: &Loaded) -> &str {
    loaded.config.expression.as_deref().unwrap_or("")
}
