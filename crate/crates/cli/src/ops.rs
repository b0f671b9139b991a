//! Implementations of the subcommands: input loading, report assembly,
//! and the recheck verifier that re-evaluates witnesses from a report.

use crate::report::RunReport;
use preserver_core::free_algebra::{classify, parse_poly, MultilinearPoly};
use preserver_core::group_lab::theta_breaks_zero_set;
use preserver_core::pi_lab::{
    central_solutions, evaluate, find_nonvanishing_unit_tuple, is_identity_sharded,
    nonidentity_witness, MatrixTuple,
};
use preserver_core::preserver_lab::{
    check_preserves_zeros, decompose_standard, standard_map, MatrixLinearMap, PreserverError,
    StandardFormParams,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use std::path::Path;

/// Input or usage problem; mapped to exit code 2 by `main`.
#[derive(Debug)]
pub struct InputError(pub String);

impl std::fmt::Display for InputError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for InputError {}

fn input_err(msg: impl Into<String>) -> InputError {
    InputError(msg.into())
}

/// `--poly` accepts either a literal expression or a path to a file
/// containing one.
fn load_poly_source(arg: &str) -> Result<String, InputError> {
    if Path::new(arg).is_file() {
        std::fs::read_to_string(arg)
            .map(|s| s.trim().to_string())
            .map_err(|e| input_err(format!("cannot read polynomial file `{arg}`: {e}")))
    } else {
        Ok(arg.to_string())
    }
}

fn load_multilinear(arg: &str) -> Result<MultilinearPoly, InputError> {
    let text = load_poly_source(arg)?;
    let poly = parse_poly(&text).map_err(|e| input_err(e.to_string()))?;
    MultilinearPoly::try_from(&poly).map_err(|e| input_err(e.to_string()))
}

/// Map files hold either a linear-map matrix (`{"n": …, "entries": …}`,
/// side n²) or standard-form parameters (`{"alpha": …, …}`), which are
/// assembled on load.
fn load_map(path: &Path) -> Result<MatrixLinearMap, InputError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| input_err(format!("cannot read map file `{}`: {e}", path.display())))?;
    let raw: Value = serde_json::from_str(&text)
        .map_err(|e| input_err(format!("map file is not valid JSON: {e}")))?;
    if raw.get("alpha").is_some() {
        let params: StandardFormParams = serde_json::from_value(raw)
            .map_err(|e| input_err(format!("invalid standard-form parameters: {e}")))?;
        Ok(standard_map(&params))
    } else {
        serde_json::from_value::<MatrixLinearMap>(raw)
            .map_err(|e| input_err(format!("invalid map matrix: {e}")))
    }
}

fn threads_from_env() -> usize {
    let setting = std::env::var("PRESERVER_LAB_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .unwrap_or(0);
    if setting == 0 {
        std::thread::available_parallelism()
            .map(|p| p.get())
            .unwrap_or(1)
    } else {
        setting
    }
}

fn report(
    command: &str,
    inputs: Value,
    verdict: &str,
    value: Option<Value>,
    witness: Option<Value>,
    seed: u64,
) -> RunReport {
    RunReport {
        command: command.to_string(),
        inputs,
        verdict: verdict.to_string(),
        value,
        witness,
        seed,
        elapsed_ms: 0,
    }
}

pub fn cmd_classify(poly: &str, seed: u64) -> Result<RunReport, InputError> {
    let f = load_multilinear(poly)?;
    let canonical = f.to_string();
    let class = classify(&f).map_err(|e| input_err(e.to_string()))?;
    Ok(report(
        "classify",
        json!({ "poly": canonical }),
        "value",
        Some(serde_json::to_value(&class).expect("report serializes")),
        None,
        seed,
    ))
}

pub fn cmd_identity_test(poly: &str, n: usize, seed: u64) -> Result<RunReport, InputError> {
    if n == 0 {
        return Err(input_err("n must be positive"));
    }
    let f = load_multilinear(poly)?;
    let canonical = f.to_string();
    let inputs = json!({ "poly": canonical, "n": n });
    let identity = is_identity_sharded(&f, n, threads_from_env());
    if identity {
        return Ok(report(
            "identity-test",
            inputs,
            "pass",
            Some(json!({ "is_identity": true })),
            None,
            seed,
        ));
    }
    // prefer the staircase witness; fall back to the first violating unit
    // tuple when the degree leaves the staircase range
    let witness_tuple = match nonidentity_witness(&f, n) {
        Ok(t) => Some(t),
        Err(_) => find_nonvanishing_unit_tuple(&f, n),
    };
    let witness = witness_tuple.map(|t| {
        let value = evaluate(&f, &t).expect("witness evaluates");
        assert!(!value.is_zero());
        json!({ "tuple": t, "value": value })
    });
    Ok(report(
        "identity-test",
        inputs,
        "fail",
        Some(json!({ "is_identity": false })),
        witness,
        seed,
    ))
}

pub fn cmd_preserve_check(
    poly: &str,
    map_path: &Path,
    trials: usize,
    seed: u64,
) -> Result<RunReport, InputError> {
    let f = load_multilinear(poly)?;
    let canonical = f.to_string();
    let map = load_map(map_path)?;
    let inputs = json!({
        "poly": canonical,
        "map": serde_json::to_value(&map).expect("map serializes"),
        "trials": trials,
    });
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let verdict = check_preserves_zeros(&f, &map, trials, &mut rng).map_err(|e| match e {
        PreserverError::SamplingExhausted { retries } => {
            input_err(format!("zero sampling exhausted after {retries} attempts"))
        }
        other => input_err(other.to_string()),
    })?;
    if verdict.passed {
        Ok(report(
            "preserve-check",
            inputs,
            "pass",
            Some(json!({ "trials_run": verdict.trials_run })),
            None,
            seed,
        ))
    } else {
        let (tuple, value) = verdict.counterexample.expect("failed verdicts carry one");
        Ok(report(
            "preserve-check",
            inputs,
            "fail",
            Some(json!({ "trials_run": verdict.trials_run })),
            Some(json!({ "tuple": tuple, "image_value": value })),
            seed,
        ))
    }
}

pub fn cmd_decompose(map_path: &Path, seed: u64) -> Result<RunReport, InputError> {
    let map = load_map(map_path)?;
    let inputs = json!({ "map": serde_json::to_value(&map).expect("map serializes") });
    match decompose_standard(&map) {
        Ok(Some(params)) => {
            let reassembles = params.assemble().rep() == map.rep();
            assert!(reassembles, "decomposition must reassemble exactly");
            Ok(report(
                "decompose",
                inputs,
                "value",
                Some(json!({
                    "params": serde_json::to_value(&params).expect("params serialize"),
                    "reassembles_exactly": reassembles,
                })),
                None,
                seed,
            ))
        }
        Ok(None) => Ok(report(
            "decompose",
            inputs,
            "fail",
            Some(json!({ "reason": "map is not of the standard form" })),
            None,
            seed,
        )),
        Err(e) => Err(input_err(e.to_string())),
    }
}

pub fn cmd_witness_theta(poly: &str, n: usize, seed: u64) -> Result<RunReport, InputError> {
    let f = load_multilinear(poly)?;
    let canonical = f.to_string();
    let (t, tt) = theta_breaks_zero_set(&f, n).map_err(|e| input_err(e.to_string()))?;
    let value = evaluate(&f, &t).expect("verified by construction");
    let theta_value = evaluate(&f, &tt).expect("verified by construction");
    Ok(report(
        "witness-theta",
        json!({ "poly": canonical, "n": n }),
        "value",
        Some(json!({
            "tuple": t,
            "theta_tuple": tt,
            "value": value,
            "theta_value": theta_value,
        })),
        None,
        seed,
    ))
}

fn lemma23_value(basis: &[preserver_core::exact_matrix::RatMatrix]) -> Value {
    let dim = basis.len();
    let verdict_text = if dim == 1 && basis[0].as_scalar().is_some() {
        "scalar-only".to_string()
    } else if dim == 0 {
        "trivial (dimension 0)".to_string()
    } else {
        format!("larger space (dimension {dim})")
    };
    json!({
        "dimension": dim,
        "verdict": verdict_text,
        "basis": basis,
    })
}

pub fn cmd_lemma23(poly: &str, n: usize, seed: u64) -> Result<RunReport, InputError> {
    if n == 0 {
        return Err(input_err("n must be positive"));
    }
    let f = load_multilinear(poly)?;
    let canonical = f.to_string();
    let basis = central_solutions(&f, n);
    Ok(report(
        "lemma23",
        json!({ "poly": canonical, "n": n }),
        "value",
        Some(lemma23_value(&basis)),
        None,
        seed,
    ))
}

// ---------------------------------------------------------------------------
// recheck
// ---------------------------------------------------------------------------

fn get_str<'a>(v: &'a Value, key: &str) -> Result<&'a str, InputError> {
    v.get(key)
        .and_then(Value::as_str)
        .ok_or_else(|| input_err(format!("report is missing string field `{key}`")))
}

fn get_usize(v: &Value, key: &str) -> Result<usize, InputError> {
    v.get(key)
        .and_then(Value::as_u64)
        .map(|x| x as usize)
        .ok_or_else(|| input_err(format!("report is missing integer field `{key}`")))
}

fn parse_inline_poly(text: &str) -> Result<MultilinearPoly, InputError> {
    let poly = parse_poly(text).map_err(|e| input_err(e.to_string()))?;
    MultilinearPoly::try_from(&poly).map_err(|e| input_err(e.to_string()))
}

fn tuple_from(v: &Value) -> Result<MatrixTuple, InputError> {
    serde_json::from_value(v.clone()).map_err(|e| input_err(format!("bad tuple in report: {e}")))
}

fn matrix_from(v: &Value) -> Result<preserver_core::exact_matrix::RatMatrix, InputError> {
    serde_json::from_value(v.clone()).map_err(|e| input_err(format!("bad matrix in report: {e}")))
}

/// Re-derives or re-evaluates everything checkable from a saved report:
/// embedded witnesses are verified by direct evaluation, value reports by
/// recomputation.
pub fn cmd_recheck(report_path: &Path, seed: u64) -> Result<RunReport, InputError> {
    let text = std::fs::read_to_string(report_path).map_err(|e| {
        input_err(format!(
            "cannot read report `{}`: {e}",
            report_path.display()
        ))
    })?;
    let original: RunReport = serde_json::from_str(&text)
        .map_err(|e| input_err(format!("report is not valid JSON: {e}")))?;
    let mut checks: Vec<String> = Vec::new();
    let mut ok = true;
    let check = |name: &str, passed: bool, checks: &mut Vec<String>, ok: &mut bool| {
        checks.push(format!(
            "{name}: {}",
            if passed { "verified" } else { "MISMATCH" }
        ));
        *ok &= passed;
    };

    match original.command.as_str() {
        "classify" => {
            let f = parse_inline_poly(get_str(&original.inputs, "poly")?)?;
            let class = classify(&f).map_err(|e| input_err(e.to_string()))?;
            let rebuilt = serde_json::to_value(&class).expect("serializes");
            check(
                "classification recomputes identically",
                Some(rebuilt) == original.value,
                &mut checks,
                &mut ok,
            );
        }
        "identity-test" => {
            let f = parse_inline_poly(get_str(&original.inputs, "poly")?)?;
            let n = get_usize(&original.inputs, "n")?;
            let identity = is_identity_sharded(&f, n, 1);
            check(
                "identity verdict recomputes identically",
                identity == (original.verdict == "pass"),
                &mut checks,
                &mut ok,
            );
            if let Some(w) = &original.witness {
                let tuple = tuple_from(w.get("tuple").unwrap_or(&Value::Null))?;
                let claimed = matrix_from(w.get("value").unwrap_or(&Value::Null))?;
                let actual = evaluate(&f, &tuple).map_err(|e| input_err(e.to_string()))?;
                check(
                    "witness evaluates to the claimed nonzero value",
                    actual == claimed && !actual.is_zero(),
                    &mut checks,
                    &mut ok,
                );
            }
        }
        "preserve-check" => {
            let f = parse_inline_poly(get_str(&original.inputs, "poly")?)?;
            let map: MatrixLinearMap = serde_json::from_value(
                original
                    .inputs
                    .get("map")
                    .cloned()
                    .ok_or_else(|| input_err("report is missing the map echo"))?,
            )
            .map_err(|e| input_err(format!("bad map in report: {e}")))?;
            match &original.witness {
                Some(w) => {
                    let tuple = tuple_from(w.get("tuple").unwrap_or(&Value::Null))?;
                    let claimed = matrix_from(w.get("image_value").unwrap_or(&Value::Null))?;
                    let at_tuple = evaluate(&f, &tuple).map_err(|e| input_err(e.to_string()))?;
                    let at_image = evaluate(&f, &map.apply_tuple(&tuple))
                        .map_err(|e| input_err(e.to_string()))?;
                    check(
                        "counterexample is a zero of f",
                        at_tuple.is_zero(),
                        &mut checks,
                        &mut ok,
                    );
                    check(
                        "image evaluates to the claimed nonzero value",
                        at_image == claimed && !at_image.is_zero(),
                        &mut checks,
                        &mut ok,
                    );
                }
                None => {
                    check(
                        "pass verdict carries no witness to re-evaluate",
                        original.verdict == "pass",
                        &mut checks,
                        &mut ok,
                    );
                }
            }
        }
        "decompose" => {
            let map: MatrixLinearMap = serde_json::from_value(
                original
                    .inputs
                    .get("map")
                    .cloned()
                    .ok_or_else(|| input_err("report is missing the map echo"))?,
            )
            .map_err(|e| input_err(format!("bad map in report: {e}")))?;
            if original.verdict == "value" {
                let params: StandardFormParams = serde_json::from_value(
                    original
                        .value
                        .as_ref()
                        .and_then(|v| v.get("params"))
                        .cloned()
                        .ok_or_else(|| input_err("report is missing the parameters"))?,
                )
                .map_err(|e| input_err(format!("bad parameters in report: {e}")))?;
                check(
                    "parameters reassemble to the map entry-exactly",
                    params.assemble().rep() == map.rep(),
                    &mut checks,
                    &mut ok,
                );
            } else {
                let again = decompose_standard(&map).map_err(|e| input_err(e.to_string()))?;
                check(
                    "failure verdict recomputes identically",
                    again.is_none(),
                    &mut checks,
                    &mut ok,
                );
            }
        }
        "witness-theta" => {
            let f = parse_inline_poly(get_str(&original.inputs, "poly")?)?;
            let value = original
                .value
                .as_ref()
                .ok_or_else(|| input_err("report has no value"))?;
            let t = tuple_from(value.get("tuple").unwrap_or(&Value::Null))?;
            let tt = tuple_from(value.get("theta_tuple").unwrap_or(&Value::Null))?;
            let claimed = matrix_from(value.get("value").unwrap_or(&Value::Null))?;
            let at_t = evaluate(&f, &t).map_err(|e| input_err(e.to_string()))?;
            let at_tt = evaluate(&f, &tt).map_err(|e| input_err(e.to_string()))?;
            check(
                "witness evaluates to the claimed nonzero value",
                at_t == claimed && !at_t.is_zero(),
                &mut checks,
                &mut ok,
            );
            check(
                "θ-image evaluates to zero",
                at_tt.is_zero(),
                &mut checks,
                &mut ok,
            );
        }
        "lemma23" => {
            let f = parse_inline_poly(get_str(&original.inputs, "poly")?)?;
            let n = get_usize(&original.inputs, "n")?;
            let basis = central_solutions(&f, n);
            check(
                "solution space recomputes identically",
                Some(lemma23_value(&basis)) == original.value,
                &mut checks,
                &mut ok,
            );
        }
        other => {
            return Err(input_err(format!("cannot recheck command `{other}`")));
        }
    }

    Ok(report(
        "recheck",
        json!({ "report": serde_json::to_value(&original).expect("serializes") }),
        if ok { "pass" } else { "fail" },
        Some(json!({ "checks": checks })),
        None,
        seed,
    ))
}
