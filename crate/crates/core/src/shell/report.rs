use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::exactalg::{fmt_rat, Rat, RootInterval};
use crate::frobenius::{GrowthBound, SeriesSolution};
use crate::linsys::InvariantVector;
use crate::nlin::{LinearizabilityVerdict, MappingVerdict, Outcome};
use crate::realize::{PoleReport, Status};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub status: Outcome,
    pub message: String,
}

impl Verdict {
    pub fn new(status: Outcome, message: impl Into<String>) -> Self {
        Verdict { status, message: message.into() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesEntry {
    pub solution: SeriesSolution,
    /// The residual vanishes identically through this order.
    pub residual_zero_through: i64,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bounds {
    #[serde(with = "super::rat_serde::opt")]
    pub point: Option<Rat>,
    pub roots: Vec<i64>,
    /// One bound per entry of `series`.
    pub growth: Vec<GrowthBound>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub input_digest: String,
    pub verdict: Verdict,
    pub invariants: Option<Vec<String>>,
    /// Zeros of `det K` in the interval.
    pub singular_points: Vec<RootInterval>,
    pub poles: Vec<PoleReport>,
    pub series: Vec<SeriesEntry>,
    pub bounds: Bounds,
    /// Components of the target driftless system when they are polynomials.
    pub target: Option<Vec<String>>,
    pub linearizability: Option<LinearizabilityVerdict>,
    pub mapping: Option<MappingVerdict>,
    pub warnings: Vec<String>,
}

fn table(rows: &[Vec<String>], indent: usize) -> String {
    let cols = rows.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> =
        (0..cols).map(|c| rows.iter().filter_map(|r| r.get(c)).map(|s| s.chars().count()).max().unwrap_or(0)).collect();
    let mut out = String::new();
    for r in rows {
        let mut line = " ".repeat(indent);
        for (c, cell) in r.iter().enumerate() {
            if c + 1 == r.len() {
                line.push_str(cell);
            } else {
                let _ = write!(line, "{cell:<w$}  ", w = widths[c]);
            }
        }
        out.push_str(line.trim_end());
        out.push('\n');
    }
    out
}

fn status(s: Status) -> String {
    match s {
        Status::Pass => "pass",
        Status::Fail => "fail",
        Status::Skipped => "-",
    }
    .into()
}

fn outcome(o: Outcome) -> &'static str {
    match o {
        Outcome::Pass => "pass",
        Outcome::Fail => "fail",
        Outcome::Indeterminate => "indeterminate",
    }
}

impl Report {
    pub fn new(command: String, input_digest: String) -> Self {
        Report {
            command,
            input_digest,
            verdict: Verdict::new(Outcome::Indeterminate, "not evaluated"),
            invariants: None,
            singular_points: vec![],
            poles: vec![],
            series: vec![],
            bounds: Bounds::default(),
            target: None,
            linearizability: None,
            mapping: None,
            warnings: vec![],
        }
    }

    pub(crate) fn set_invariants(&mut self, g: &InvariantVector) {
        self.invariants = Some(g.gamma.iter().map(|c| c.to_string()).collect());
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(src: &str) -> serde_json::Result<Self> {
        serde_json::from_str(src)
    }

    /// Aligned-column rendering.
    pub fn to_text(&self) -> String {
        let mut out = table(
            &[
                vec!["command".into(), self.command.clone()],
                vec!["input".into(), format!("sha256:{}", self.input_digest)],
                vec!["verdict".into(), format!("{}: {}", outcome(self.verdict.status), self.verdict.message)],
            ],
            0,
        );
        if let Some(g) = &self.invariants {
            out.push_str("\ninvariants\n");
            let rows: Vec<Vec<String>> = g.iter().enumerate().map(|(i, c)| vec![format!("gamma{}", i + 1), c.clone()]).collect();
            out.push_str(&table(&rows, 2));
        }
        if !self.singular_points.is_empty() {
            let pts: Vec<String> = self
                .singular_points
                .iter()
                .map(|r| match &r.exact {
                    Some(x) => fmt_rat(x),
                    None => format!("in ({}, {}]", fmt_rat(&r.lo), fmt_rat(&r.hi)),
                })
                .collect();
            let _ = writeln!(out, "\nsingular points  {}", pts.join(", "));
        }
        if let Some(l) = &self.linearizability {
            out.push_str("\nconditions\n");
            let mut rows = vec![
                vec!["brackets".into(), outcome(l.commutation).into()],
                vec!["rank".into(), outcome(l.rank).into()],
                vec!["gamma x-free".into(), outcome(l.x_free).into()],
                vec!["pieces agree".into(), if l.pieces_agree { "pass" } else { "fail" }.into()],
            ];
            for (i, p) in l.pieces.iter().enumerate() {
                rows.push(vec![format!("piece {i} det R"), format!("[{}, {}]", fmt_rat(&p.interval[0]), fmt_rat(&p.interval[1])), p.rank.det.clone()]);
                for (k, v) in p.chain.iter().enumerate().skip(1) {
                    rows.push(vec![format!("piece {i} R^{k} b"), String::new(), format!("({})", v.join(", "))]);
                }
            }
            out.push_str(&table(&rows, 2));
        }
        if let Some(m) = &self.mapping {
            out.push_str("\nmapping\n");
            out.push_str(&table(
                &[
                    vec!["brackets".into(), outcome(m.commutation).into()],
                    vec!["rank".into(), outcome(m.rank).into()],
                    vec!["target gamma".into(), m.target_gamma.join(", ")],
                    vec!["gamma matches".into(), if m.gamma_matches { "yes" } else { "no" }.into()],
                ],
                2,
            ));
        }
        if !self.poles.is_empty() {
            out.push_str("\npoles\n");
            let mut rows = vec![["t", "(i)", "(ii)", "(iii)", "roots", "rank V", "indicial"].map(String::from).to_vec()];
            for p in &self.poles {
                let ii = &p.condition_ii;
                let iii = &p.condition_iii;
                let poly = crate::exactalg::UniPoly::new(ii.polynomial.clone()).to_string_with("k");
                rows.push(vec![
                    fmt_rat(&p.point),
                    status(p.condition_i.status),
                    status(ii.status),
                    status(iii.status),
                    ii.nonnegative_roots.iter().map(i64::to_string).collect::<Vec<_>>().join(" "),
                    match (iii.rank, iii.target_rank) {
                        (Some(r), Some(t)) => format!("{r}/{t}"),
                        _ => "-".into(),
                    },
                    if ii.polynomial.is_empty() { "-".into() } else { poly },
                ]);
            }
            out.push_str(&table(&rows, 2));
            for p in &self.poles {
                for m in &p.condition_iii.minors {
                    let _ = writeln!(out, "  t = {}: D{},{} = {}", fmt_rat(&p.point), m.i, m.j, fmt_rat(&m.value));
                }
            }
        }
        if let Some(t) = &self.target {
            let _ = writeln!(out, "\ntarget  g = ({})", t.join(", "));
        }
        if !self.series.is_empty() {
            let at = self.bounds.point.as_ref().map(fmt_rat).unwrap_or_default();
            let _ = writeln!(out, "\nseries at t = {at}");
            let mut rows = vec![std::iter::once("k".to_string())
                .chain((1..=self.series.len()).map(|i| format!("y{i}")))
                .collect::<Vec<_>>()];
            let len = self.series.iter().map(|s| s.solution.coefficients.len()).max().unwrap_or(0);
            for k in 0..len {
                let mut row = vec![k.to_string()];
                row.extend(self.series.iter().map(|s| s.solution.coefficients.get(k).map(fmt_rat).unwrap_or_default()));
                rows.push(row);
            }
            out.push_str(&table(&rows, 2));
        }
        if !self.bounds.growth.is_empty() {
            out.push_str("\nbounds  |y_k| <= C1 C^k\n");
            let mut rows = vec![["series", "C", "C1", "k0", "radius >=", "residual 0 through"].map(String::from).to_vec()];
            for (i, (b, s)) in self.bounds.growth.iter().zip(&self.series).enumerate() {
                rows.push(vec![
                    format!("y{}", i + 1),
                    fmt_rat(&b.c),
                    fmt_rat(&b.c1),
                    b.k0.to_string(),
                    fmt_rat(&b.radius_lb),
                    s.residual_zero_through.to_string(),
                ]);
            }
            out.push_str(&table(&rows, 2));
        }
        if !self.warnings.is_empty() {
            out.push_str("\nwarnings\n");
            for w in &self.warnings {
                let _ = writeln!(out, "  {w}");
            }
        }
        out
    }
}
