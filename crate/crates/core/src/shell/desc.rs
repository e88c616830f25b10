//! System description files.
//!
//! ```text
//! # final example
//! kind: affine
//! n: 2
//! interval: [-1, 1]
//! domain: [-inf, inf] x [-inf, inf]
//! a1:
//!   piece [-1, 0]: -4*t^3/(2 - t^4)*x1
//!   piece [0, 1]: 4*t^3/(2 + t^4)*x1
//! b1: ...
//! ```
//!
//! The full grammar is in `docs/description-format.md`.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use super::expr::{parse_expression, ExprError};
use crate::exactalg::{fmt_rat, parse_rat, Matrix, Rat, RationalFunction, XPoly};
use crate::linsys::{InvariantVector, LinearSystem, LinsysError};
use crate::nlin::{AffinePiece, AffineSystem, DomainBox, NlinError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DescError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: {source}")]
    Expr { line: usize, source: ExprError },
    #[error("missing header `{0}`")]
    MissingHeader(&'static str),
    #[error("missing entry `{0}`")]
    MissingEntry(String),
    #[error("entry `{entry}`: {message}")]
    Pieces { entry: String, message: String },
    #[error("`{0}` descriptions cannot be used here")]
    WrongKind(Kind),
    #[error(transparent)]
    Linsys(#[from] LinsysError),
    #[error(transparent)]
    Nlin(#[from] NlinError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Linear,
    Affine,
    Invariants,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kind::Linear => "linear",
            Kind::Affine => "affine",
            Kind::Invariants => "invariants",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Piece {
    pub lo: Rat,
    pub hi: Rat,
    pub source: String,
    pub value: XPoly,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Entry {
    Single { source: String, value: XPoly },
    Pieces(Vec<Piece>),
}

impl Entry {
    fn value_on(&self, lo: &Rat, hi: &Rat) -> &XPoly {
        match self {
            Entry::Single { value, .. } => value,
            Entry::Pieces(ps) => &ps.iter().find(|p| &p.lo <= lo && hi <= &p.hi).expect("pieces cover the interval").value,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SystemDescription {
    pub kind: Kind,
    pub n: usize,
    pub interval: (Rat, Rat),
    pub domain: DomainBox,
    pub entries: BTreeMap<String, Entry>,
}

fn strip_comment(line: &str) -> &str {
    line.split('#').next().unwrap_or("")
}

fn syntax<T>(line: usize, message: impl Into<String>) -> Result<T, DescError> {
    Err(DescError::Syntax { line, message: message.into() })
}

/// `[lo, hi]`, with `inf` and `-inf` allowed when `unbounded` is set.
fn parse_bracket(src: &str, line: usize, unbounded: bool) -> Result<(Option<Rat>, Option<Rat>), DescError> {
    let inner = src
        .trim()
        .strip_prefix('[')
        .and_then(|s| s.strip_suffix(']'))
        .ok_or_else(|| DescError::Syntax { line, message: format!("expected `[lo, hi]`, found `{}`", src.trim()) })?;
    let parts: Vec<&str> = inner.split(',').map(str::trim).collect();
    if parts.len() != 2 {
        return syntax(line, "expected two bounds");
    }
    let bound = |s: &str, inf: &str| -> Result<Option<Rat>, DescError> {
        if unbounded && s == inf {
            return Ok(None);
        }
        parse_rat(s).map(Some).ok_or_else(|| DescError::Syntax { line, message: format!("bad bound `{s}`") })
    };
    let lo = bound(parts[0], "-inf")?;
    let hi = bound(parts[1], "inf")?;
    if let (Some(a), Some(b)) = (&lo, &hi) {
        if a > b {
            return syntax(line, "lower bound exceeds upper bound");
        }
    }
    Ok((lo, hi))
}

fn parse_interval(src: &str, line: usize) -> Result<(Rat, Rat), DescError> {
    let (lo, hi) = parse_bracket(src, line, false)?;
    let (lo, hi) = (lo.unwrap(), hi.unwrap());
    if lo >= hi {
        return syntax(line, "interval must have lo < hi");
    }
    Ok((lo, hi))
}

fn entry_names(kind: Kind, n: usize) -> Vec<(String, bool)> {
    let mut out = Vec::new();
    match kind {
        Kind::Linear => {
            for i in 1..=n {
                for j in 1..=n {
                    out.push((format!("A{i},{j}"), false));
                }
            }
            out.extend((1..=n).map(|i| (format!("b{i}"), true)));
        }
        Kind::Affine => {
            out.extend((1..=n).map(|i| (format!("a{i}"), false)));
            out.extend((1..=n).map(|i| (format!("b{i}"), true)));
        }
        Kind::Invariants => out.extend((1..=n).map(|i| (format!("gamma{i}"), true))),
    }
    out
}

/// `A12` is accepted for `A1,2` when both indices are single digits.
fn canonical_name(name: &str) -> String {
    if let Some(rest) = name.strip_prefix('A') {
        if rest.len() == 2 && rest.chars().all(|c| c.is_ascii_digit()) {
            let mut cs = rest.chars();
            return format!("A{},{}", cs.next().unwrap(), cs.next().unwrap());
        }
        return format!("A{}", rest.replace(' ', ""));
    }
    name.to_string()
}

fn parse_entry_expr(src: &str, line: usize, kind: Kind, n: usize) -> Result<XPoly, DescError> {
    let v = parse_expression(src, n).map_err(|source| DescError::Expr { line, source })?;
    if kind != Kind::Affine && !v.is_x_free() {
        return Err(DescError::Expr { line, source: ExprError::DependsOnX });
    }
    Ok(v)
}

pub fn parse_description(src: &str) -> Result<SystemDescription, DescError> {
    let mut header: BTreeMap<&str, (usize, String)> = BTreeMap::new();
    // (line, name, inline value, piece lines)
    type RawEntry<'a> = (usize, String, Option<&'a str>, Vec<(usize, &'a str)>);
    let mut raw: Vec<RawEntry> = Vec::new();
    for (idx, full) in src.lines().enumerate() {
        let line = idx + 1;
        let text = strip_comment(full);
        if text.trim().is_empty() {
            continue;
        }
        let indented = text.starts_with(' ') || text.starts_with('\t');
        let body = text.trim();
        if let Some(rest) = body.strip_prefix("piece") {
            if !indented {
                return syntax(line, "`piece` lines must be indented under an entry");
            }
            match raw.last_mut() {
                Some((_, _, None, pieces)) => pieces.push((line, rest)),
                _ => return syntax(line, "`piece` line without an open entry"),
            }
            continue;
        }
        if indented {
            return syntax(line, "unexpected indented line");
        }
        let Some((key, value)) = body.split_once(':') else {
            return syntax(line, "expected `key: value`");
        };
        let key = key.trim();
        let value = value.trim();
        match key {
            "kind" | "n" | "interval" | "domain" => {
                if header.insert(key_static(key), (line, value.to_string())).is_some() {
                    return syntax(line, format!("duplicate header `{key}`"));
                }
            }
            _ => {
                let name = canonical_name(key);
                if raw.iter().any(|(_, n, ..)| *n == name) {
                    return syntax(line, format!("duplicate entry `{key}`"));
                }
                raw.push((line, name, (!value.is_empty()).then_some(value), Vec::new()));
            }
        }
    }

    let (kline, kind) = header.get("kind").ok_or(DescError::MissingHeader("kind"))?;
    let kind = match kind.as_str() {
        "linear" => Kind::Linear,
        "affine" => Kind::Affine,
        "invariants" => Kind::Invariants,
        other => return syntax(*kline, format!("unknown kind `{other}`")),
    };
    let (nline, n) = header.get("n").ok_or(DescError::MissingHeader("n"))?;
    let n: usize = match n.parse() {
        Ok(n) if n >= 1 => n,
        _ => return syntax(*nline, format!("`n` must be a positive integer, found `{n}`")),
    };
    let (iline, interval) = header.get("interval").ok_or(DescError::MissingHeader("interval"))?;
    let interval = parse_interval(interval, *iline)?;
    let domain = match header.get("domain") {
        None => vec![(None, None); n],
        Some((line, d)) => {
            if kind != Kind::Affine {
                return syntax(*line, "`domain` applies to affine systems only");
            }
            let boxes = d.split(" x ").map(|s| parse_bracket(s, *line, true)).collect::<Result<Vec<_>, _>>()?;
            if boxes.len() != n {
                return syntax(*line, format!("domain has {} factors, n = {n}", boxes.len()));
            }
            boxes
        }
    };

    let allowed = entry_names(kind, n);
    let mut entries = BTreeMap::new();
    for (line, name, inline, pieces) in raw {
        if !allowed.iter().any(|(a, _)| *a == name) {
            return syntax(line, format!("unknown entry `{name}` for a {kind} system with n = {n}"));
        }
        let entry = match inline {
            Some(src) => {
                if !pieces.is_empty() {
                    return syntax(pieces[0].0, "entry has both an inline value and pieces");
                }
                Entry::Single { source: src.to_string(), value: parse_entry_expr(src, line, kind, n)? }
            }
            None => {
                if pieces.is_empty() {
                    return syntax(line, format!("entry `{name}` has no value"));
                }
                let mut out = Vec::new();
                for (pline, rest) in pieces {
                    let Some((range, src)) = rest.split_once("]:") else {
                        return syntax(pline, "expected `piece [lo, hi]: expr`");
                    };
                    let (lo, hi) = parse_interval(&format!("{}]", range.trim()), pline)?;
                    let src = src.trim();
                    out.push(Piece { lo, hi, source: src.to_string(), value: parse_entry_expr(src, pline, kind, n)? });
                }
                check_pieces(&name, &out, &interval)?;
                Entry::Pieces(out)
            }
        };
        entries.insert(name, entry);
    }
    for (name, required) in &allowed {
        if *required && !entries.contains_key(name) {
            return Err(DescError::MissingEntry(name.clone()));
        }
    }
    Ok(SystemDescription { kind, n, interval, domain, entries })
}

fn key_static(key: &str) -> &'static str {
    match key {
        "kind" => "kind",
        "n" => "n",
        "interval" => "interval",
        _ => "domain",
    }
}

fn check_pieces(name: &str, pieces: &[Piece], interval: &(Rat, Rat)) -> Result<(), DescError> {
    let err = |message: String| Err(DescError::Pieces { entry: name.to_string(), message });
    if pieces[0].lo != interval.0 {
        return err(format!("first piece starts at {}, interval at {}", fmt_rat(&pieces[0].lo), fmt_rat(&interval.0)));
    }
    for w in pieces.windows(2) {
        if w[0].hi != w[1].lo {
            return err(format!("pieces [{}, {}] and [{}, {}] do not abut", fmt_rat(&w[0].lo), fmt_rat(&w[0].hi), fmt_rat(&w[1].lo), fmt_rat(&w[1].hi)));
        }
    }
    let last = pieces.last().unwrap();
    if last.hi != interval.1 {
        return err(format!("last piece ends at {}, interval at {}", fmt_rat(&last.hi), fmt_rat(&interval.1)));
    }
    Ok(())
}

impl SystemDescription {
    fn zero_entry(&self) -> Entry {
        Entry::Single { source: "0".into(), value: XPoly::zero(self.n) }
    }

    fn entry(&self, name: &str) -> Entry {
        self.entries.get(name).cloned().unwrap_or_else(|| self.zero_entry())
    }

    pub fn is_piecewise(&self) -> bool {
        self.entries.values().any(|e| matches!(e, Entry::Pieces(_)))
    }

    /// The common refinement of every entry's pieces.
    pub fn piece_intervals(&self) -> Vec<(Rat, Rat)> {
        let mut cuts = vec![self.interval.0.clone(), self.interval.1.clone()];
        for e in self.entries.values() {
            if let Entry::Pieces(ps) = e {
                cuts.extend(ps.iter().map(|p| p.lo.clone()));
            }
        }
        cuts.sort();
        cuts.dedup();
        cuts.windows(2).map(|w| (w[0].clone(), w[1].clone())).collect()
    }

    fn rf_on(&self, name: &str, iv: &(Rat, Rat)) -> RationalFunction {
        self.entry(name).value_on(&iv.0, &iv.1).as_rf().expect("checked x-free at parse time")
    }

    /// One linear system per piece of the common refinement.
    pub fn linear_pieces(&self) -> Result<Vec<LinearSystem>, DescError> {
        if self.kind != Kind::Linear {
            return Err(DescError::WrongKind(self.kind));
        }
        let n = self.n;
        self.piece_intervals()
            .into_iter()
            .map(|iv| {
                let rows = (1..=n).map(|i| (1..=n).map(|j| self.rf_on(&format!("A{i},{j}"), &iv)).collect()).collect();
                let b = (1..=n).map(|i| self.rf_on(&format!("b{i}"), &iv)).collect();
                Ok(LinearSystem::new(Matrix::from_rows(rows), b, iv)?)
            })
            .collect()
    }

    /// The affine system; linear descriptions are embedded with `a = A(t) x`.
    pub fn affine(&self) -> Result<AffineSystem, DescError> {
        let n = self.n;
        let pieces = match self.kind {
            Kind::Affine => self
                .piece_intervals()
                .into_iter()
                .map(|iv| {
                    let pick = |name: String| self.entry(&name).value_on(&iv.0, &iv.1).clone();
                    AffinePiece {
                        a: (1..=n).map(|i| pick(format!("a{i}"))).collect(),
                        b: (1..=n).map(|i| pick(format!("b{i}"))).collect(),
                        interval: iv,
                    }
                })
                .collect(),
            Kind::Linear => self
                .linear_pieces()?
                .iter()
                .map(|s| AffineSystem::from_linear(s).pieces()[0].clone())
                .collect(),
            Kind::Invariants => return Err(DescError::WrongKind(self.kind)),
        };
        Ok(AffineSystem::new(n, pieces, self.domain.clone())?)
    }

    /// `γ` given directly.
    pub fn gamma(&self) -> Result<InvariantVector, DescError> {
        if self.kind != Kind::Invariants {
            return Err(DescError::WrongKind(self.kind));
        }
        Ok(InvariantVector { gamma: (1..=self.n).map(|i| self.rf_on(&format!("gamma{i}"), &self.interval)).collect() })
    }
}
