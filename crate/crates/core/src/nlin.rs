//! Affine systems `x' = a(t,x) + b(t,x) u` with entries polynomial in `x`:
//! the `ℛ`-chain, the bracket and rank conditions, `γ(t,x)`, and the
//! linearizability verdict.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactalg::{
    real_roots_in_interval, ContinuityWarning, Matrix, Piecewise, PiecewiseError, Rat, RationalFunction, RootInterval,
    XPoly,
};
use crate::frobenius::{realize_system, DriftlessRealization, FrobeniusError};
use crate::linsys::{first_pole_in, invariants, InvariantVector, LinearSystem, LinsysError};
use crate::realize::{realizability_verdict, RealizabilityVerdict, RealizeError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NlinError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("piece {piece}: entry {entry} has a pole in the piece interval near {}", crate::exactalg::fmt_rat(&.root.lo))]
    NotAnalytic { piece: usize, entry: String, root: RootInterval },
    #[error("det R vanishes identically")]
    RankDeficient,
    #[error(transparent)]
    Piecewise(#[from] PiecewiseError),
    #[error(transparent)]
    Realize(#[from] RealizeError),
    #[error(transparent)]
    Frobenius(#[from] FrobeniusError),
    #[error(transparent)]
    Linsys(#[from] LinsysError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Pass,
    Fail,
    Indeterminate,
}

impl Outcome {
    /// Fail dominates Indeterminate, which dominates Pass.
    pub fn and(self, other: Outcome) -> Outcome {
        match (self, other) {
            (Outcome::Fail, _) | (_, Outcome::Fail) => Outcome::Fail,
            (Outcome::Indeterminate, _) | (_, Outcome::Indeterminate) => Outcome::Indeterminate,
            _ => Outcome::Pass,
        }
    }

    fn from_bool(ok: bool) -> Outcome {
        if ok {
            Outcome::Pass
        } else {
            Outcome::Fail
        }
    }
}

/// Per-coordinate bounds of the state domain; `None` is unbounded.
pub type DomainBox = Vec<(Option<Rat>, Option<Rat>)>;

/// The drift and input fields on one subinterval.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffinePiece {
    pub interval: (Rat, Rat),
    pub a: Vec<XPoly>,
    pub b: Vec<XPoly>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineSystem {
    n: usize,
    pieces: Vec<AffinePiece>,
    domain: DomainBox,
}

impl AffineSystem {
    /// Pieces must cover an interval in order, sharing endpoints; every
    /// coefficient must be analytic on its closed piece.
    pub fn new(n: usize, pieces: Vec<AffinePiece>, domain: DomainBox) -> Result<Self, NlinError> {
        if pieces.is_empty() {
            return Err(NlinError::Dimension("no pieces".into()));
        }
        if domain.len() != n {
            return Err(NlinError::Dimension(format!("domain has {} coordinates, n = {n}", domain.len())));
        }
        for (idx, p) in pieces.iter().enumerate() {
            if p.a.len() != n || p.b.len() != n {
                return Err(NlinError::Dimension(format!("piece {idx}: a has {}, b has {} entries, n = {n}", p.a.len(), p.b.len())));
            }
            if let Some(bad) = p.a.iter().chain(&p.b).find(|e| e.nvars() != n) {
                return Err(NlinError::Dimension(format!("entry over {} variables, n = {n}", bad.nvars())));
            }
            if idx > 0 && pieces[idx - 1].interval.1 != p.interval.0 {
                return Err(PiecewiseError::BadBreakpoints.into());
            }
            if p.interval.0 >= p.interval.1 && pieces.len() > 1 {
                return Err(PiecewiseError::EmptyInterval.into());
            }
            let (lo, hi) = &p.interval;
            let named = p.a.iter().enumerate().map(|(i, e)| (format!("a{}", i + 1), e));
            let named = named.chain(p.b.iter().enumerate().map(|(i, e)| (format!("b{}", i + 1), e)));
            for (entry, e) in named {
                for (_, c) in e.terms() {
                    if let Some(root) = first_pole_in(c, lo, hi) {
                        return Err(NlinError::NotAnalytic { piece: idx, entry, root });
                    }
                }
            }
        }
        Ok(AffineSystem { n, pieces, domain })
    }

    pub fn single(interval: (Rat, Rat), a: Vec<XPoly>, b: Vec<XPoly>, domain: DomainBox) -> Result<Self, NlinError> {
        let n = b.len();
        Self::new(n, vec![AffinePiece { interval, a, b }], domain)
    }

    /// `a = A(t) x`, `b = b(t)` over `ℝⁿ`.
    pub fn from_linear(sys: &LinearSystem) -> Self {
        let n = sys.n();
        let a = (0..n)
            .map(|i| {
                (0..n).fold(XPoly::zero(n), |acc, j| &acc + &XPoly::var(n, j).scale(&sys.a()[(i, j)]))
            })
            .collect();
        let b = sys.b().iter().map(|c| XPoly::from_rf(n, c.clone())).collect();
        let piece = AffinePiece { interval: sys.interval().clone(), a, b };
        AffineSystem { n, pieces: vec![piece], domain: vec![(None, None); n] }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn pieces(&self) -> &[AffinePiece] {
        &self.pieces
    }

    pub fn domain(&self) -> &DomainBox {
        &self.domain
    }

    pub fn interval(&self) -> (Rat, Rat) {
        (self.pieces[0].interval.0.clone(), self.pieces.last().unwrap().interval.1.clone())
    }

    /// Breakpoint agreement of derivatives `0..=2` of `a` and `0..=1` of `b`.
    pub fn continuity_warnings(&self) -> Result<Vec<EntryWarning>, NlinError> {
        if self.pieces.len() == 1 {
            return Ok(vec![]);
        }
        let interval = self.interval();
        let breakpoints: Vec<Rat> = self.pieces[1..].iter().map(|p| p.interval.0.clone()).collect();
        let mut out = Vec::new();
        for i in 0..self.n {
            for (name, class, pick) in [("a", 2usize, 0u8), ("b", 1, 1)] {
                let values: Vec<XPoly> =
                    self.pieces.iter().map(|p| if pick == 0 { p.a[i].clone() } else { p.b[i].clone() }).collect();
                let pw = Piecewise::new(interval.clone(), breakpoints.clone(), values)?;
                for w in pw.continuity_warnings(class) {
                    out.push(EntryWarning { entry: format!("{name}{}", i + 1), warning: w });
                }
            }
        }
        Ok(out)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntryWarning {
    pub entry: String,
    #[serde(flatten)]
    pub warning: ContinuityWarning,
}

/// `n × n` Jacobian `∂v_i/∂x_j` applied to `w`.
fn jacobian_apply(v: &[XPoly], w: &[XPoly]) -> Vec<XPoly> {
    let n = v.len();
    v.iter()
        .map(|vi| (0..n).fold(XPoly::zero(n), |acc, j| &acc + &(&vi.dx(j) * &w[j])))
        .collect()
}

/// `ℛφ = φ_t + φ_x a − a_x φ`.
pub fn r_apply(phi: &[XPoly], a: &[XPoly]) -> Vec<XPoly> {
    assert_eq!(phi.len(), a.len(), "dimension mismatch");
    let phi_x_a = jacobian_apply(phi, a);
    let a_x_phi = jacobian_apply(a, phi);
    phi.iter()
        .zip(phi_x_a.iter().zip(&a_x_phi))
        .map(|(p, (u, v))| &(&p.dt() + u) - v)
        .collect()
}

/// `ℛ⁰b, …, ℛⁿb`.
pub fn r_chain(piece: &AffinePiece) -> Vec<Vec<XPoly>> {
    let n = piece.b.len();
    let mut chain = vec![piece.b.clone()];
    for _ in 0..n {
        let next = r_apply(chain.last().unwrap(), &piece.a);
        chain.push(next);
    }
    chain
}

/// `[φ, ψ] = ψ_x φ − φ_x ψ`.
pub fn lie_bracket(phi: &[XPoly], psi: &[XPoly]) -> Vec<XPoly> {
    assert_eq!(phi.len(), psi.len(), "dimension mismatch");
    let a = jacobian_apply(psi, phi);
    let b = jacobian_apply(phi, psi);
    a.iter().zip(&b).map(|(x, y)| x - y).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BracketWitness {
    pub j: usize,
    pub k: usize,
    pub bracket: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommutationResult {
    pub status: Outcome,
    pub witnesses: Vec<BracketWitness>,
}

/// `[ℛʲb, ℛᵏb] = 0` for `0 ≤ j < k ≤ n − 1`.
pub fn commutation_check(chain: &[Vec<XPoly>]) -> CommutationResult {
    let n = chain.len() - 1;
    let mut witnesses = Vec::new();
    for j in 0..n {
        for k in j + 1..n {
            let br = lie_bracket(&chain[j], &chain[k]);
            if !br.iter().all(XPoly::is_zero) {
                witnesses.push(BracketWitness { j, k, bracket: br.iter().map(|e| e.to_string()).collect() });
            }
        }
    }
    CommutationResult { status: Outcome::from_bool(witnesses.is_empty()), witnesses }
}

/// `R = (ℛ⁰b, …, ℛⁿ⁻¹b)` as a matrix of columns.
pub fn r_matrix(chain: &[Vec<XPoly>]) -> Matrix<XPoly> {
    let n = chain.len() - 1;
    Matrix::from_columns(&chain[..n])
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankCheck {
    pub status: Outcome,
    pub det: String,
    pub x_free: bool,
    /// Real zeros of `det R` in the interval when it depends on `t` only.
    pub singular: Vec<RootInterval>,
}

/// Decides `rank R = n` off finitely many `t` when `det R` is `x`-free.
pub fn generic_rank_check(chain: &[Vec<XPoly>], interval: &(Rat, Rat)) -> RankCheck {
    let det = r_matrix(chain).det_expand();
    let text = det.to_string();
    if det.is_zero() {
        return RankCheck { status: Outcome::Fail, det: text, x_free: true, singular: vec![] };
    }
    match det.as_rf() {
        Some(d) => {
            let singular = real_roots_in_interval(d.numer(), &interval.0, &interval.1);
            RankCheck { status: Outcome::Pass, det: text, x_free: true, singular }
        }
        None => RankCheck { status: Outcome::Indeterminate, det: text, x_free: false, singular: vec![] },
    }
}

/// Cramer solution `γ_i = N_i / det R` of `R γ = ℛⁿb`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GammaField {
    pub numerators: Vec<XPoly>,
    pub det: XPoly,
    /// The components as functions of `t` when none depends on `x`.
    pub gamma: Option<Vec<RationalFunction>>,
}

impl GammaField {
    pub fn x_free(&self) -> bool {
        self.gamma.is_some()
    }

    /// Human-readable components, `N_i/(det)` when not reducible to `t` alone.
    pub fn components(&self) -> Vec<String> {
        match &self.gamma {
            Some(g) => g.iter().map(|c| c.to_string()).collect(),
            None => self.numerators.iter().map(|num| format!("({num})/({})", self.det)).collect(),
        }
    }
}

/// `N / D` as a function of `t` alone, if it is one.
fn x_free_ratio(num: &XPoly, den: &XPoly) -> Option<RationalFunction> {
    if num.is_zero() {
        return Some(RationalFunction::zero());
    }
    let (mn, cn) = num.leading_term()?;
    let (md, cd) = den.leading_term()?;
    if mn != md {
        return None;
    }
    let c = cn / cd;
    (den.scale(&c) == *num).then_some(c)
}

pub fn gamma_field(chain: &[Vec<XPoly>]) -> Result<GammaField, NlinError> {
    let n = chain.len() - 1;
    let r = r_matrix(chain);
    let det = r.det_expand();
    if det.is_zero() {
        return Err(NlinError::RankDeficient);
    }
    let numerators: Vec<XPoly> = (0..n).map(|i| r.with_column(i, &chain[n]).det_expand()).collect();
    let gamma = numerators.iter().map(|num| x_free_ratio(num, &det)).collect();
    Ok(GammaField { numerators, det, gamma })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PieceReport {
    #[serde(with = "crate::shell::rat_serde::vec")]
    pub interval: Vec<Rat>,
    pub chain: Vec<Vec<String>>,
    pub commutation: CommutationResult,
    pub rank: RankCheck,
    pub gamma: Option<Vec<String>>,
    pub gamma_x_free: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinearizabilityVerdict {
    pub outcome: Outcome,
    pub pieces: Vec<PieceReport>,
    pub commutation: Outcome,
    pub rank: Outcome,
    pub x_free: Outcome,
    pub pieces_agree: bool,
    pub gamma: Option<Vec<String>>,
    pub realizability: Option<RealizabilityVerdict>,
    pub target: Option<DriftlessRealization>,
    pub warnings: Vec<EntryWarning>,
    pub reasons: Vec<String>,
}

struct PieceAnalysis {
    report: PieceReport,
    gamma: Option<Vec<RationalFunction>>,
}

fn analyze_piece(piece: &AffinePiece) -> PieceAnalysis {
    let chain = r_chain(piece);
    let commutation = commutation_check(&chain);
    let rank = generic_rank_check(&chain, &piece.interval);
    let field = gamma_field(&chain).ok();
    let gamma = field.as_ref().and_then(|f| f.gamma.clone());
    let report = PieceReport {
        interval: vec![piece.interval.0.clone(), piece.interval.1.clone()],
        chain: chain.iter().map(|v| v.iter().map(|e| e.to_string()).collect()).collect(),
        commutation,
        rank,
        gamma: field.as_ref().map(GammaField::components),
        gamma_x_free: field.as_ref().is_some_and(GammaField::x_free),
    };
    PieceAnalysis { report, gamma }
}

/// Bracket, rank and `x`-freeness per piece, agreement of `γ` across pieces,
/// then realizability of `γ(t)` on the whole interval.
pub fn linearizability_verdict(sys: &AffineSystem, truncation: Option<i64>) -> Result<LinearizabilityVerdict, NlinError> {
    let interval = sys.interval();
    let warnings = sys.continuity_warnings()?;
    let analyses: Vec<PieceAnalysis> = sys.pieces.iter().map(analyze_piece).collect();
    let mut reasons = Vec::new();

    let commutation = analyses.iter().fold(Outcome::Pass, |acc, a| acc.and(a.report.commutation.status));
    for (idx, a) in analyses.iter().enumerate() {
        for w in &a.report.commutation.witnesses {
            reasons.push(format!("piece {idx}: [R^{} b, R^{} b] does not vanish", w.j, w.k));
        }
    }
    let rank = analyses.iter().fold(Outcome::Pass, |acc, a| acc.and(a.report.rank.status));
    for (idx, a) in analyses.iter().enumerate() {
        match a.report.rank.status {
            Outcome::Fail => reasons.push(format!("piece {idx}: det R vanishes identically")),
            Outcome::Indeterminate => reasons.push(format!("piece {idx}: det R depends on x; rank condition not decided")),
            Outcome::Pass => {}
        }
    }
    let x_free = Outcome::from_bool(analyses.iter().all(|a| a.gamma.is_some()));
    if x_free == Outcome::Fail {
        reasons.push("gamma depends on x".into());
    }
    let first = analyses[0].gamma.clone();
    let pieces_agree = analyses.iter().all(|a| a.gamma == first);
    if !pieces_agree {
        reasons.push("gamma differs between pieces".into());
    }

    let mut outcome = commutation.and(rank).and(x_free).and(Outcome::from_bool(pieces_agree));
    let mut realizability = None;
    let mut target = None;
    let gamma = if outcome != Outcome::Fail && pieces_agree { first } else { None };
    if let Some(g) = &gamma {
        let gv = InvariantVector { gamma: g.clone() };
        let verdict = realizability_verdict(&gv, &interval)?;
        if !verdict.realizable {
            outcome = Outcome::Fail;
            if let Some(f) = verdict.first_failure() {
                reasons.push(format!("gamma is not realizable: conditions fail at t = {}", crate::exactalg::fmt_rat(&f.point)));
            }
        } else if outcome == Outcome::Pass {
            let point = verdict.poles.first().cloned().unwrap_or_else(|| interval.0.clone());
            target = Some(realize_system(&gv, &verdict, &point, truncation)?);
        }
        realizability = Some(verdict);
    }
    Ok(LinearizabilityVerdict {
        outcome,
        pieces: analyses.into_iter().map(|a| a.report).collect(),
        commutation,
        rank,
        x_free,
        pieces_agree,
        gamma: gamma.map(|g| g.iter().map(|c| c.to_string()).collect()),
        realizability,
        target,
        warnings,
        reasons,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MappingVerdict {
    pub outcome: Outcome,
    pub commutation: Outcome,
    pub rank: Outcome,
    pub gamma_matches: bool,
    pub system_gamma: Option<Vec<String>>,
    pub target_gamma: Vec<String>,
}

/// Whether the affine system can be mapped onto the given linear system.
pub fn mappable_to_preassigned(sys: &AffineSystem, target: &LinearSystem) -> Result<MappingVerdict, NlinError> {
    if sys.n() != target.n() {
        return Err(NlinError::Dimension(format!("system n = {}, target n = {}", sys.n(), target.n())));
    }
    let target_gamma = invariants(target)?.gamma;
    let analyses: Vec<PieceAnalysis> = sys.pieces.iter().map(analyze_piece).collect();
    let commutation = analyses.iter().fold(Outcome::Pass, |acc, a| acc.and(a.report.commutation.status));
    let rank = analyses.iter().fold(Outcome::Pass, |acc, a| acc.and(a.report.rank.status));
    let gamma_matches = analyses.iter().all(|a| a.gamma.as_ref() == Some(&target_gamma));
    Ok(MappingVerdict {
        outcome: commutation.and(rank).and(Outcome::from_bool(gamma_matches)),
        commutation,
        rank,
        gamma_matches,
        system_gamma: analyses[0].report.gamma.clone(),
        target_gamma: target_gamma.iter().map(|c| c.to_string()).collect(),
    })
}
