//! Browser bindings: run a command on a description, and the hypergeometric
//! realizability sweep.

use linvar::exactalg::{parse_rat, Rat, RationalFunction, UniPoly};
use linvar::linsys::InvariantVector;
use linvar::realize::realizability_verdict;
use linvar::shell::{exit_code, run, Command, Input, Options};
use serde_json::json;
use wasm_bindgen::prelude::*;

const EXAMPLES: &[(&str, &str)] = &[
    ("final_example.desc", include_str!("../../../descriptions/final_example.desc")),
    ("ex3.desc", include_str!("../../../descriptions/ex3.desc")),
    ("hypergeometric.desc", include_str!("../../../descriptions/hypergeometric.desc")),
    ("eq_no.desc", include_str!("../../../descriptions/eq_no.desc")),
    ("driftless_hyp.desc", include_str!("../../../descriptions/driftless_hyp.desc")),
    ("oscillator.desc", include_str!("../../../descriptions/oscillator.desc")),
];

fn command(name: &str) -> Result<Command, String> {
    Ok(match name {
        "invariants" => Command::Invariants,
        "check-realizable" => Command::CheckRealizable,
        "series" => Command::Series,
        "linearizable" => Command::Linearizable,
        other => return Err(format!("unknown command `{other}`")),
    })
}

fn rationals(src: &str) -> Result<Vec<Rat>, String> {
    src.split_whitespace().map(|s| parse_rat(s).ok_or_else(|| format!("`{s}` is not an exact rational"))).collect()
}

/// Runs `cmd` on a description; `point` and `free` are blank or rationals.
pub fn run_text(cmd: &str, text: &str, order: Option<i64>, point: &str, free: &str, json: bool) -> Result<String, String> {
    let cmd = command(cmd)?;
    let point = rationals(point)?;
    if point.len() > 1 {
        return Err("one expansion point expected".into());
    }
    let free = rationals(free)?;
    let opts = Options {
        order,
        point: point.into_iter().next(),
        free: (!free.is_empty()).then_some(free),
        ..Options::default()
    };
    let report = run(cmd, &[Input { name: "input.desc", text }], &opts).map_err(|e| e.to_string())?;
    Ok(if json {
        report.to_json()
    } else {
        format!("{}exit status {}\n", report.to_text(), exit_code(&report))
    })
}

/// Verdict for `γ1 = −c/(t(1−t))`, `γ2 = −(a+bt)/(t(1−t))` on `[0, 1]`.
pub fn hypergeometric_json(a: i64, b: i64, c: i64) -> Result<String, String> {
    let den = UniPoly::from_ints(&[0, 1, -1]);
    let gamma = InvariantVector {
        gamma: vec![
            RationalFunction::new(UniPoly::from_ints(&[-c]), den.clone()),
            RationalFunction::new(UniPoly::from_ints(&[-a, -b]), den),
        ],
    };
    let v = realizability_verdict(&gamma, &(Rat::from_integer(0.into()), Rat::from_integer(1.into()))).map_err(|e| e.to_string())?;
    let poles: Vec<_> = v
        .reports
        .iter()
        .map(|r| {
            json!({
                "point": r.point.to_string(),
                "passed": r.passed,
                "roots": r.condition_ii.nonnegative_roots,
                "reason": r.condition_ii.reason,
            })
        })
        .collect();
    let gamma: Vec<String> = gamma.gamma.iter().map(|g| g.to_string()).collect();
    Ok(json!({ "gamma": gamma, "realizable": v.realizable, "poles": poles }).to_string())
}

#[wasm_bindgen]
pub fn example_names() -> Vec<String> {
    EXAMPLES.iter().map(|(n, _)| n.to_string()).collect()
}

#[wasm_bindgen]
pub fn example_text(name: &str) -> Option<String> {
    EXAMPLES.iter().find(|(n, _)| *n == name).map(|(_, t)| t.to_string())
}

#[wasm_bindgen]
pub fn run_description(cmd: &str, text: &str, order: Option<i32>, point: &str, free: &str, json: bool) -> Result<String, JsError> {
    run_text(cmd, text, order.map(i64::from), point, free, json).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn hypergeometric(a: i32, b: i32, c: i32) -> Result<String, JsError> {
    hypergeometric_json(a.into(), b.into(), c.into()).map_err(|e| JsError::new(&e))
}
