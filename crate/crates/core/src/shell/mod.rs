//! Command dispatch, description files and reports.

pub mod desc;
pub mod expr;
pub mod rat_serde;
mod report;

use num_traits::Zero;
use sha2::{Digest, Sha256};
use thiserror::Error;

pub use desc::{parse_description, DescError, Kind, SystemDescription};
pub use expr::{parse_expression, parse_rational_function, ExprError};
pub use report::{Bounds, Report, SeriesEntry, Verdict};

use crate::exactalg::{fmt_rat, Rat, RootInterval};
use crate::frobenius::{
    default_truncation, growth_bound, local_roots, residual, solution_basis, solve_recurrence,
    FrobeniusError,
};
use crate::linsys::{invariants, piecewise_invariants, singular_points, InvariantVector, LinearSystem, LinsysError};
use crate::nlin::{linearizability_verdict, mappable_to_preassigned, NlinError, Outcome};
use crate::realize::{realizability_verdict, RealizeError, Status};

#[derive(Debug, Error)]
pub enum ShellError {
    #[error("{name}: {source}")]
    Description { name: String, source: DescError },
    #[error("{0}")]
    Usage(String),
    #[error("smoothness warnings with --pieces-strict: {0}")]
    Strict(String),
    #[error(transparent)]
    Linsys(#[from] LinsysError),
    #[error(transparent)]
    Realize(#[from] RealizeError),
    #[error(transparent)]
    Frobenius(#[from] FrobeniusError),
    #[error(transparent)]
    Nlin(#[from] NlinError),
    #[error(transparent)]
    Desc(#[from] DescError),
}

/// Exit code for input and usage errors.
pub const EXIT_INPUT_ERROR: i32 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Invariants,
    CheckRealizable,
    Series,
    Linearizable,
    MapTo,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Invariants => "invariants",
            Command::CheckRealizable => "check-realizable",
            Command::Series => "series",
            Command::Linearizable => "linearizable",
            Command::MapTo => "map-to",
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Options {
    pub interval: Option<(Rat, Rat)>,
    pub order: Option<i64>,
    pub point: Option<Rat>,
    pub free: Option<Vec<Rat>>,
    pub pieces_strict: bool,
}

/// A description file: display name and contents.
#[derive(Clone, Debug)]
pub struct Input<'a> {
    pub name: &'a str,
    pub text: &'a str,
}

fn command_echo(cmd: Command, inputs: &[Input], opts: &Options) -> String {
    let mut parts = vec![cmd.name().to_string()];
    parts.extend(inputs.iter().map(|i| i.name.to_string()));
    if let Some((a, b)) = &opts.interval {
        parts.push(format!("--interval {} {}", fmt_rat(a), fmt_rat(b)));
    }
    if let Some(k) = opts.order {
        parts.push(format!("--order {k}"));
    }
    if let Some(p) = &opts.point {
        parts.push(format!("--point {}", fmt_rat(p)));
    }
    if let Some(f) = &opts.free {
        parts.push(format!("--free {}", f.iter().map(fmt_rat).collect::<Vec<_>>().join(" ")));
    }
    if opts.pieces_strict {
        parts.push("--pieces-strict".into());
    }
    parts.join(" ")
}

/// SHA-256 over the inputs in order, each prefixed by its byte length.
pub fn input_digest(inputs: &[Input]) -> String {
    let mut h = Sha256::new();
    for i in inputs {
        h.update((i.text.len() as u64).to_le_bytes());
        h.update(i.text.as_bytes());
    }
    hex::encode(h.finalize())
}

fn load(input: &Input) -> Result<SystemDescription, ShellError> {
    parse_description(input.text).map_err(|source| ShellError::Description { name: input.name.to_string(), source })
}

fn gamma_of(d: &SystemDescription) -> Result<Result<InvariantVector, LinsysError>, ShellError> {
    match d.kind {
        Kind::Invariants => Ok(Ok(d.gamma()?)),
        Kind::Linear => Ok(piecewise_invariants(&d.linear_pieces()?)),
        Kind::Affine => Err(ShellError::Usage("affine descriptions are handled by `linearizable` and `map-to`".into())),
    }
}

fn smoothness(d: &SystemDescription, report: &mut Report, strict: bool) -> Result<(), ShellError> {
    if !d.is_piecewise() || d.kind == Kind::Invariants {
        return Ok(());
    }
    let warnings = d.affine()?.continuity_warnings()?;
    let lines: Vec<String> = warnings
        .iter()
        .map(|w| {
            format!(
                "{} is not smooth at t = {}: derivative of order {} jumps",
                w.entry,
                fmt_rat(&w.warning.breakpoint),
                w.warning.derivative_order
            )
        })
        .collect();
    if strict && !lines.is_empty() {
        return Err(ShellError::Strict(lines.join("; ")));
    }
    report.warnings.extend(lines);
    Ok(())
}

/// Runs one command. `inputs` holds the description and, for `map-to`, the
/// target description.
pub fn run(cmd: Command, inputs: &[Input], opts: &Options) -> Result<Report, ShellError> {
    let expected = if cmd == Command::MapTo { 2 } else { 1 };
    if inputs.len() != expected {
        return Err(ShellError::Usage(format!("`{}` takes {expected} description file(s)", cmd.name())));
    }
    let d = load(&inputs[0])?;
    let mut report = Report::new(command_echo(cmd, inputs, opts), input_digest(inputs));
    smoothness(&d, &mut report, opts.pieces_strict)?;
    let interval = opts.interval.clone().unwrap_or_else(|| d.interval.clone());
    if interval.0 >= interval.1 {
        return Err(ShellError::Usage("--interval needs lo < hi".into()));
    }
    match cmd {
        Command::Invariants => run_invariants(&d, &mut report)?,
        Command::CheckRealizable => run_check_realizable(&d, &interval, &mut report)?,
        Command::Series => run_series(&d, &interval, opts, &mut report)?,
        Command::Linearizable => run_linearizable(&d, opts, &mut report)?,
        Command::MapTo => run_map_to(&d, &load(&inputs[1])?, &mut report)?,
    }
    Ok(report)
}

fn run_invariants(d: &SystemDescription, report: &mut Report) -> Result<(), ShellError> {
    if d.kind != Kind::Linear {
        return Err(ShellError::Usage("`invariants` needs a linear description".into()));
    }
    let pieces = d.linear_pieces()?;
    match piecewise_invariants(&pieces) {
        Ok(g) => {
            report.set_invariants(&g);
            let mut singular = Vec::new();
            for p in &pieces {
                singular.extend(singular_points(p)?.points);
            }
            singular.sort_by(|a: &RootInterval, b| a.lo.cmp(&b.lo));
            singular.dedup();
            report.singular_points = singular;
            report.verdict = Verdict::new(Outcome::Pass, "controllable; invariants computed");
        }
        Err(e @ (LinsysError::NotControllable | LinsysError::PieceMismatch { .. })) => {
            report.verdict = Verdict::new(Outcome::Fail, e.to_string());
        }
        Err(e) => return Err(e.into()),
    }
    Ok(())
}

fn not_controllable(report: &mut Report, e: LinsysError) -> Result<(), ShellError> {
    match e {
        LinsysError::NotControllable | LinsysError::PieceMismatch { .. } => {
            report.verdict = Verdict::new(Outcome::Fail, e.to_string());
            Ok(())
        }
        e => Err(e.into()),
    }
}

fn run_check_realizable(d: &SystemDescription, interval: &(Rat, Rat), report: &mut Report) -> Result<(), ShellError> {
    let g = match gamma_of(d)? {
        Ok(g) => g,
        Err(e) => return not_controllable(report, e),
    };
    report.set_invariants(&g);
    let verdict = realizability_verdict(&g, interval)?;
    report.verdict = if verdict.realizable {
        let at = if verdict.poles.is_empty() {
            "no poles in the interval".to_string()
        } else {
            format!("conditions hold at t = {}", verdict.poles.iter().map(fmt_rat).collect::<Vec<_>>().join(", "))
        };
        Verdict::new(Outcome::Pass, format!("realizable on [{}, {}]; {at}", fmt_rat(&interval.0), fmt_rat(&interval.1)))
    } else {
        let f = verdict.first_failure().expect("a failing pole");
        Verdict::new(
            Outcome::Fail,
            format!("not realizable on [{}, {}]: {}", fmt_rat(&interval.0), fmt_rat(&interval.1), failure_text(f)),
        )
    };
    report.poles = verdict.reports;
    Ok(())
}

fn failure_text(f: &crate::realize::PoleReport) -> String {
    let at = fmt_rat(&f.point);
    if f.condition_i.status == Status::Fail {
        return format!("condition (i) fails at t = {at}: pole order too high");
    }
    if f.condition_ii.status == Status::Fail {
        let why = f.condition_ii.reason.clone().unwrap_or_default();
        return format!("condition (ii) fails at t = {at}: {why}");
    }
    let iii = &f.condition_iii;
    format!(
        "condition (iii) fails at t = {at}: rank V = {}, required {}",
        iii.rank.unwrap_or(0),
        iii.target_rank.unwrap_or(0)
    )
}

fn run_series(d: &SystemDescription, interval: &(Rat, Rat), opts: &Options, report: &mut Report) -> Result<(), ShellError> {
    let g = match gamma_of(d)? {
        Ok(g) => g,
        Err(e) => return not_controllable(report, e),
    };
    report.set_invariants(&g);
    let point = match &opts.point {
        Some(p) => p.clone(),
        None => crate::realize::pole_set(&g, interval)?.first().cloned().unwrap_or_else(|| interval.0.clone()),
    };
    let (local, roots) = match local_roots(&g, &point) {
        Ok(x) => x,
        Err(e @ FrobeniusError::NoAnalyticBasis(_)) => {
            report.verdict = Verdict::new(Outcome::Fail, format!("no analytic basis at t = {}: {e}", fmt_rat(&point)));
            return Ok(());
        }
        Err(e) => return Err(e.into()),
    };
    let kn = *roots.last().unwrap();
    let k = opts.order.unwrap_or_else(|| default_truncation(kn));
    let solutions = match &opts.free {
        Some(free) => solve_recurrence(&local, &roots, free, k).map(|s| vec![s]),
        None => solution_basis(&local, &roots, k),
    };
    let solutions = match solutions {
        Ok(s) => s,
        Err(e @ FrobeniusError::InconsistentSystem { .. }) => {
            report.verdict = Verdict::new(Outcome::Fail, format!("recurrence at t = {} is inconsistent: {e}", fmt_rat(&point)));
            return Ok(());
        }
        Err(e) => return Err(e.into()),
    };
    let n = g.n() as i64;
    for s in solutions {
        let res = residual(&s, &local, k - n)?;
        let bound = growth_bound(&local, &roots, &s)?;
        if let Some((m, _)) = res.iter().find(|(_, r)| !r.is_zero()) {
            report.warnings.push(format!("residual nonzero at order {m}"));
        }
        report.bounds.growth.push(bound);
        report.series.push(SeriesEntry { residual_zero_through: k - n, solution: s });
    }
    report.bounds.point = Some(point.clone());
    report.bounds.roots = roots.clone();
    report.verdict = Verdict::new(
        Outcome::Pass,
        format!(
            "{} series at t = {} through order {k}; indicial roots {}",
            report.series.len(),
            fmt_rat(&point),
            roots.iter().map(i64::to_string).collect::<Vec<_>>().join(", ")
        ),
    );
    Ok(())
}

fn run_linearizable(d: &SystemDescription, opts: &Options, report: &mut Report) -> Result<(), ShellError> {
    let sys = d.affine()?;
    let mut v = linearizability_verdict(&sys, opts.order)?;
    if let Some(real) = v.realizability.take() {
        report.poles = real.reports;
    }
    if let Some(target) = v.target.take() {
        report.bounds.point = Some(target.point.clone());
        report.bounds.roots = target.roots.clone();
        report.bounds.growth = target.bounds;
        let k = target.basis.first().map_or(0, |s| s.truncation());
        let n = sys.n() as i64;
        report.series = target.basis.into_iter().map(|s| SeriesEntry { residual_zero_through: k - n, solution: s }).collect();
        report.target = target.polynomials;
    }
    report.invariants = v.gamma.clone();
    let message = match v.outcome {
        Outcome::Pass => match &report.target {
            Some(p) => format!("locally analytically linearizable; target driftless system g = ({})", p.join(", ")),
            None => "locally analytically linearizable; target given by the series below".to_string(),
        },
        Outcome::Fail => format!("not linearizable: {}", v.reasons.join("; ")),
        Outcome::Indeterminate => format!("undecided: {}", v.reasons.join("; ")),
    };
    report.verdict = Verdict::new(v.outcome, message);
    report.linearizability = Some(v);
    Ok(())
}

fn run_map_to(d: &SystemDescription, target: &SystemDescription, report: &mut Report) -> Result<(), ShellError> {
    let sys = d.affine()?;
    let pieces = target.linear_pieces()?;
    let [lin]: [LinearSystem; 1] = pieces
        .try_into()
        .map_err(|_| ShellError::Usage("the target of `map-to` must not be piecewise".into()))?;
    if let Err(e) = invariants(&lin) {
        return not_controllable(report, e);
    }
    let m = mappable_to_preassigned(&sys, &lin)?;
    report.invariants = m.system_gamma.clone();
    let message = match m.outcome {
        Outcome::Pass => "the system maps onto the target".to_string(),
        Outcome::Fail if !m.gamma_matches => format!("invariants differ from the target's ({})", m.target_gamma.join(", ")),
        Outcome::Fail => "the bracket or rank condition fails".to_string(),
        Outcome::Indeterminate => "rank condition undecided: det R depends on x".to_string(),
    };
    report.verdict = Verdict::new(m.outcome, message);
    report.mapping = Some(m);
    Ok(())
}

/// `0` pass, `1` negative verdict, `2` indeterminate.
pub fn exit_code(report: &Report) -> i32 {
    match report.verdict.status {
        Outcome::Pass => 0,
        Outcome::Fail => 1,
        Outcome::Indeterminate => 2,
    }
}
