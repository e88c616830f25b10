use std::fs;

use linvar::exactalg::{int, rat, Rat};
use linvar::nlin::Outcome;
use linvar::shell::{exit_code, parse_description, run, Command, Input, Options, Report, ShellError};
use num_bigint::BigInt;

fn desc(name: &str) -> String {
    let path = format!("{}/../../descriptions/{name}", env!("CARGO_MANIFEST_DIR"));
    fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"))
}

fn run1(cmd: Command, name: &str, opts: &Options) -> Report {
    let text = desc(name);
    run(cmd, &[Input { name, text: &text }], opts).unwrap()
}

fn schema() -> jsonschema::Validator {
    let path = format!("{}/../../docs/report.schema.json", env!("CARGO_MANIFEST_DIR"));
    let schema: serde_json::Value = serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap();
    jsonschema::validator_for(&schema).unwrap()
}

fn check_machine_rendering(r: &Report) {
    let json = r.to_json();
    assert_eq!(&Report::from_json(&json).unwrap(), r);
    let value: serde_json::Value = serde_json::from_str(&json).unwrap();
    let v = schema();
    let errors: Vec<String> = v.iter_errors(&value).map(|e| format!("{e} at {}", e.instance_path())).collect();
    assert!(errors.is_empty(), "{errors:?}");
}

#[test]
fn linearizable_final_example() {
    let r = run1(Command::Linearizable, "final_example.desc", &Options::default());
    assert_eq!(exit_code(&r), 0, "{}", r.verdict.message);
    assert_eq!(r.target, Some(vec!["1".to_string(), "t^3".to_string()]));
    assert_eq!(r.invariants, Some(vec!["0".to_string(), "2/t".to_string()]));
    assert_eq!(r.bounds.roots, vec![0, 3]);
    assert!(r.warnings.is_empty());
    let lin = r.linearizability.as_ref().unwrap();
    assert_eq!(lin.pieces.len(), 2);
    assert!(r.to_text().contains("target  g = (1, t^3)"));
    check_machine_rendering(&r);
}

#[test]
fn eq_no_fails_only_on_the_closed_unit_interval() {
    let opts = Options { interval: Some((int(0), int(1))), ..Options::default() };
    let r = run1(Command::CheckRealizable, "eq_no.desc", &opts);
    assert_eq!(exit_code(&r), 1);
    assert!(r.verdict.message.contains("condition (ii) fails at t = 1"), "{}", r.verdict.message);
    assert_eq!(r.poles.iter().map(|p| p.passed).collect::<Vec<_>>(), vec![true, false]);
    check_machine_rendering(&r);

    let r = run1(Command::CheckRealizable, "eq_no.desc", &Options::default());
    assert_eq!(exit_code(&r), 0);
    assert_eq!(r.poles.len(), 1);
    check_machine_rendering(&r);
}

#[test]
fn ex3_series_is_exponential() {
    let opts = Options { free: Some(vec![int(1), rat(1, 2)]), order: Some(20), ..Options::default() };
    let r = run1(Command::Series, "ex3.desc", &opts);
    assert_eq!(exit_code(&r), 0);
    let coeffs = &r.series[0].solution.coefficients;
    assert_eq!(coeffs.len(), 21);
    let mut fact = BigInt::from(1);
    for (k, y) in coeffs.iter().enumerate() {
        if k > 0 {
            fact *= k;
        }
        assert_eq!(y, &Rat::new(BigInt::from(1), fact.clone()), "k = {k}");
    }
    assert!(r.bounds.growth[0].radius_lb >= int(1));
    assert!(r.to_text().contains("1/2432902008176640000"));
    check_machine_rendering(&r);
}

#[test]
fn series_basis_without_free_values() {
    let r = run1(Command::Series, "hypergeometric.desc", &Options { order: Some(10), ..Options::default() });
    assert_eq!(r.series.len(), 2);
    assert_eq!(r.bounds.point, Some(int(0)));
    // y = 1 − 2t and y = t² for unit values at the roots 0 and 2
    assert_eq!(r.series[0].solution.coefficients[..3], [int(1), int(-2), int(0)]);
    assert_eq!(r.series[1].solution.coefficients[..3], [int(0), int(0), int(1)]);
    assert!(r.series.iter().all(|s| s.solution.coefficients[3..].iter().all(|c| *c == int(0))));
    check_machine_rendering(&r);
}

#[test]
fn series_at_a_bad_pole_is_a_negative_verdict() {
    let r = run1(Command::Series, "eq_no.desc", &Options { point: Some(int(1)), ..Options::default() });
    assert_eq!(exit_code(&r), 1);
    check_machine_rendering(&r);
}

#[test]
fn invariants_of_driftless_realization_match_the_hypergeometric_tuple() {
    let r = run1(Command::Invariants, "driftless_hyp.desc", &Options::default());
    assert_eq!(exit_code(&r), 0);
    let expected = parse_description(&desc("hypergeometric.desc")).unwrap().gamma().unwrap();
    let got: Vec<String> = expected.gamma.iter().map(|g| g.to_string()).collect();
    assert_eq!(r.invariants, Some(got));
    let pts: Vec<Option<Rat>> = r.singular_points.iter().map(|p| p.exact.clone()).collect();
    assert_eq!(pts, vec![Some(int(0)), Some(int(1))]);
    check_machine_rendering(&r);

    let r = run1(Command::Invariants, "oscillator.desc", &Options::default());
    assert_eq!(r.invariants, Some(vec!["-2".to_string(), "3".to_string()]));
}

#[test]
fn map_to_checks_invariants() {
    let (a, b, c) = (desc("final_example.desc"), desc("final_target.desc"), desc("oscillator.desc"));
    let ok = run(
        Command::MapTo,
        &[Input { name: "final_example.desc", text: &a }, Input { name: "final_target.desc", text: &b }],
        &Options::default(),
    )
    .unwrap();
    assert_eq!(exit_code(&ok), 0);
    check_machine_rendering(&ok);
    let bad = run(
        Command::MapTo,
        &[Input { name: "final_example.desc", text: &a }, Input { name: "oscillator.desc", text: &c }],
        &Options::default(),
    )
    .unwrap();
    assert_eq!(exit_code(&bad), 1);
    assert!(!bad.mapping.as_ref().unwrap().gamma_matches);
}

// R = (1 + x1²) and γ = 0: every decidable condition holds
const X_DEPENDENT_RANK: &str = "\
kind: affine
n: 1
interval: [0, 1]
b1: 1 + x1^2
";

const FAILING_BRACKET: &str = "\
kind: affine
n: 2
interval: [0, 1]
a2: t*x1 + t*x1^3/3
b1: 1
b2: 0
";

#[test]
fn x_dependent_rank_is_indeterminate() {
    let r = run(Command::Linearizable, &[Input { name: "x.desc", text: X_DEPENDENT_RANK }], &Options::default()).unwrap();
    assert_eq!(r.verdict.status, Outcome::Indeterminate);
    assert_eq!(exit_code(&r), 2);
    check_machine_rendering(&r);
    // [b, Rb] = (0, -2 t x1) decides the question regardless of the rank
    let r = run(Command::Linearizable, &[Input { name: "y.desc", text: FAILING_BRACKET }], &Options::default()).unwrap();
    assert_eq!(exit_code(&r), 1);
    assert_eq!(r.linearizability.as_ref().unwrap().commutation, Outcome::Fail);
}

#[test]
fn linear_description_through_linearizable() {
    let r = run1(Command::Linearizable, "oscillator.desc", &Options::default());
    assert_eq!(exit_code(&r), 0);
    assert_eq!(r.invariants, Some(vec!["-2".to_string(), "3".to_string()]));
    // e^t and e^{2t} do not terminate
    assert_eq!(r.target, None);
    assert_eq!(r.series.len(), 2);
    check_machine_rendering(&r);
}

#[test]
fn kinked_input_warns_or_fails_under_strict() {
    let kinked = desc("final_example.desc").replace("b2: t^3", "b2:\n  piece [-1, 0]: -t\n  piece [0, 1]: t");
    let inputs = [Input { name: "kinked.desc", text: &kinked }];
    let r = run(Command::Linearizable, &inputs, &Options::default()).unwrap();
    assert!(r.warnings.iter().any(|w| w.starts_with("b2 is not smooth at t = 0")), "{:?}", r.warnings);
    let strict = Options { pieces_strict: true, ..Options::default() };
    assert!(matches!(run(Command::Linearizable, &inputs, &strict), Err(ShellError::Strict(_))));
}

#[test]
fn input_errors() {
    let bad = "kind: affine\nn: 2\ninterval: [0, 1]\nb1: x1/x2\nb2: 1\n";
    let err = run(Command::Linearizable, &[Input { name: "bad.desc", text: bad }], &Options::default()).unwrap_err();
    assert_eq!(err.to_string(), "bad.desc: line 4: division by an expression depending on x at column 4");
    let g = desc("ex3.desc");
    let err = run(Command::Invariants, &[Input { name: "ex3.desc", text: &g }], &Options::default()).unwrap_err();
    assert!(matches!(err, ShellError::Usage(_)));
    let err = run(Command::MapTo, &[Input { name: "ex3.desc", text: &g }], &Options::default()).unwrap_err();
    assert!(matches!(err, ShellError::Usage(_)));
    let opts = Options { free: Some(vec![int(1)]), ..Options::default() };
    assert!(run(Command::Series, &[Input { name: "ex3.desc", text: &g }], &opts).is_err());
}

#[test]
fn reports_are_deterministic() {
    let opts = Options { interval: Some((int(0), int(1))), ..Options::default() };
    let a = run1(Command::CheckRealizable, "eq_no.desc", &opts);
    let b = run1(Command::CheckRealizable, "eq_no.desc", &opts);
    assert_eq!(a, b);
    assert_eq!(a.input_digest.len(), 64);
    let edited = desc("eq_no.desc") + "\n";
    let c = run(Command::CheckRealizable, &[Input { name: "eq_no.desc", text: &edited }], &opts).unwrap();
    assert_ne!(a.input_digest, c.input_digest);
    assert_eq!(a.verdict, c.verdict);
}
