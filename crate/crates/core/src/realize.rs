//! Realizability of a meromorphic tuple `γ` as the invariants of an analytic
//! linear system: pole-order bounds, the indicial equation and the rank
//! condition on the `V` block, checked at every pole in the interval.

use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactalg::{
    falling_factorial, falling_factorial_poly, integer_roots, real_roots_in_interval, Matrix, Rat,
    RationalFunction, RootInterval, UniPoly,
};
use crate::laurent::{self, LaurentError, LaurentExpansion};
use crate::linsys::InvariantVector;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RealizeError {
    #[error("gamma{component} has an irrational pole in ({}, {}]", crate::exactalg::fmt_rat(&.root.lo), crate::exactalg::fmt_rat(&.root.hi))]
    IrrationalPole { component: usize, root: RootInterval },
    #[error("empty interval")]
    EmptyInterval,
    #[error(transparent)]
    Laurent(#[from] LaurentError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

impl Status {
    fn from_bool(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }
}

/// Laurent data of `γ_1..γ_n` at one point, with the derived ODE coefficients
/// `p_s = −γ_{n−s+1}` and the entries `V_{k,j}` of the coefficient recurrence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalCoefficients {
    point: Rat,
    functions: Vec<RationalFunction>,
    gamma: Vec<LaurentExpansion>,
}

impl LocalCoefficients {
    /// Expands every `γ_s` through `(t − point)^depth`.
    pub fn at(gamma: &InvariantVector, point: &Rat, depth: i64) -> Result<Self, LaurentError> {
        let functions = gamma.gamma.clone();
        let expansions = functions
            .iter()
            .map(|g| laurent::expand(g, point, depth.max(0)))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(LocalCoefficients { point: point.clone(), functions, gamma: expansions })
    }

    /// Same functions expanded to a greater depth.
    pub fn deepen(&self, depth: i64) -> Result<Self, LaurentError> {
        Self::at(&InvariantVector { gamma: self.functions.clone() }, &self.point, depth)
    }

    pub fn n(&self) -> usize {
        self.gamma.len()
    }

    pub fn point(&self) -> &Rat {
        &self.point
    }

    /// Largest index available for every component.
    pub fn depth(&self) -> i64 {
        self.gamma.iter().map(LaurentExpansion::truncation_order).min().unwrap_or(0)
    }

    pub fn functions(&self) -> &[RationalFunction] {
        &self.functions
    }

    /// Expansion of `γ_s`, 1-based `s`.
    pub fn gamma_expansion(&self, s: usize) -> &LaurentExpansion {
        &self.gamma[s - 1]
    }

    /// `γ_{s,i}`, 1-based `s`.
    pub fn gamma(&self, s: usize, i: i64) -> Result<Rat, LaurentError> {
        self.gamma[s - 1].try_coeff(i)
    }

    /// `p_{s,i} = −γ_{n−s+1,i}`, 1-based `s`.
    pub fn p(&self, s: usize, i: i64) -> Result<Rat, LaurentError> {
        Ok(-self.gamma(self.n() - s + 1, i)?)
    }

    /// `k^{n} − Σ_s k^{(n−s)} γ_{n−s+1,−s}` in falling-factorial powers.
    pub fn indicial_poly(&self) -> UniPoly {
        let n = self.n();
        let mut poly = falling_factorial_poly(n);
        for s in 1..=n {
            let g = self.gamma(n - s + 1, -(s as i64)).expect("principal part always present");
            poly = &poly - &falling_factorial_poly(n - s).scale(&g);
        }
        poly
    }

    /// Coefficient of `y_j` in the equation for the `k`-th power, assuming the
    /// pole-order bounds hold (so the entry vanishes for `j > k`).
    pub fn v(&self, k: i64, j: i64) -> Result<Rat, LaurentError> {
        assert!(k >= 0 && j >= 0, "negative recurrence index");
        if j > k {
            return Ok(Rat::zero());
        }
        if j == k {
            return Ok(self.indicial_poly().eval(&Rat::from_integer(k.into())));
        }
        let n = self.n();
        let mut acc = Rat::zero();
        for s in 1..=n {
            let ff = falling_factorial(j as u64, (n - s) as u64);
            if ff.is_zero() {
                continue;
            }
            let g = self.gamma(n - s + 1, k - j - s as i64)?;
            acc -= Rat::from_integer(ff) * g;
        }
        Ok(acc)
    }
}

/// Union of the real poles of all `γ_s` in `[lo, hi]`, sorted.
pub fn pole_set(gamma: &InvariantVector, interval: &(Rat, Rat)) -> Result<Vec<Rat>, RealizeError> {
    let (lo, hi) = interval;
    if lo > hi {
        return Err(RealizeError::EmptyInterval);
    }
    let mut out: Vec<Rat> = Vec::new();
    for (idx, g) in gamma.gamma.iter().enumerate() {
        if g.denom().is_constant() {
            continue;
        }
        for root in real_roots_in_interval(g.denom(), lo, hi) {
            match root.exact {
                Some(r) => out.push(r),
                None => return Err(RealizeError::IrrationalPole { component: idx + 1, root }),
            }
        }
    }
    out.sort();
    out.dedup();
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PoleOrderViolation {
    /// 1-based component index.
    pub component: usize,
    pub order: u32,
    pub bound: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConditionI {
    pub status: Status,
    /// Pole order of each `γ_s` at the point.
    pub orders: Vec<u32>,
    pub violations: Vec<PoleOrderViolation>,
}

/// `γ_s` may have a pole of order at most `n − s + 1`.
pub fn check_condition_i(gamma: &InvariantVector, point: &Rat) -> ConditionI {
    let n = gamma.n();
    let orders: Vec<u32> = gamma.gamma.iter().map(|g| laurent::pole_order(g, point)).collect();
    let violations: Vec<PoleOrderViolation> = orders
        .iter()
        .enumerate()
        .filter_map(|(i, &order)| {
            let bound = (n - i) as u32;
            (order > bound).then_some(PoleOrderViolation { component: i + 1, order, bound })
        })
        .collect();
    ConditionI { status: Status::from_bool(violations.is_empty()), orders, violations }
}

/// The indicial polynomial and its distinct nonnegative integer roots.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndicialData {
    pub n: usize,
    pub poly: UniPoly,
    pub nonnegative_roots: Vec<i64>,
}

impl IndicialData {
    pub fn passes(&self) -> bool {
        self.nonnegative_roots.len() == self.n
    }

    /// `k_1 < … < k_n` when the condition holds.
    pub fn roots(&self) -> Option<&[i64]> {
        self.passes().then_some(&self.nonnegative_roots[..])
    }
}

pub fn indicial(local: &LocalCoefficients) -> IndicialData {
    let poly = local.indicial_poly();
    let mut nonnegative_roots: Vec<i64> = integer_roots(&poly)
        .into_iter()
        .filter_map(|(r, _)| r.to_i64())
        .filter(|&r| r >= 0)
        .collect();
    nonnegative_roots.sort();
    IndicialData { n: local.n(), poly, nonnegative_roots }
}

/// Rows `k = k_1+1..k_n`, columns `j = k_1..k_n−1` of the recurrence matrix.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VMatrix {
    pub roots: Vec<i64>,
    pub row_indices: Vec<i64>,
    pub col_indices: Vec<i64>,
    #[serde(with = "crate::shell::rat_serde::mat")]
    pub entries: Vec<Vec<Rat>>,
    pub target_rank: usize,
}

impl VMatrix {
    pub fn k1(&self) -> i64 {
        self.roots[0]
    }

    pub fn kn(&self) -> i64 {
        *self.roots.last().unwrap()
    }

    /// `V_{k,j}` for indices inside the block.
    pub fn get(&self, k: i64, j: i64) -> Rat {
        let r = (k - self.k1() - 1) as usize;
        let c = (j - self.k1()) as usize;
        self.entries[r][c].clone()
    }

    pub fn matrix(&self) -> Matrix<Rat> {
        Matrix::from_rows(self.entries.clone())
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().flatten().all(Zero::is_zero)
    }
}

pub fn build_v(local: &LocalCoefficients, roots: &[i64]) -> Result<VMatrix, LaurentError> {
    let n = roots.len();
    let (k1, kn) = (roots[0], roots[n - 1]);
    let row_indices: Vec<i64> = (k1 + 1..=kn).collect();
    let col_indices: Vec<i64> = (k1..kn).collect();
    let entries = row_indices
        .iter()
        .map(|&k| col_indices.iter().map(|&j| local.v(k, j)).collect::<Result<Vec<_>, _>>())
        .collect::<Result<Vec<_>, _>>()?;
    Ok(VMatrix {
        roots: roots.to_vec(),
        row_indices,
        col_indices,
        entries,
        target_rank: (kn - k1) as usize + 1 - n,
    })
}

/// Exact rank of the block compared with `k_n − k_1 − n + 1`.
pub fn rank_condition(v: &VMatrix) -> (bool, usize) {
    if v.entries.is_empty() {
        return (true, 0);
    }
    let rank = v.matrix().rank();
    (rank == v.target_rank, rank)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Minor {
    /// 1-based root indices `i < j`.
    pub i: usize,
    pub j: usize,
    #[serde(with = "crate::shell::rat_serde")]
    pub value: Rat,
}

/// `D_{i,j}`: rows `k_i+1..k_j`, columns `k_i..k_j−1`, with row and column
/// `k_s` deleted for every root strictly between `k_i` and `k_j`.
pub fn minor_conditions(v: &VMatrix) -> Vec<Minor> {
    let roots = &v.roots;
    let n = roots.len();
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let interior = &roots[i + 1..j];
            let rows: Vec<usize> = (roots[i] + 1..=roots[j])
                .filter(|k| !interior.contains(k))
                .map(|k| (k - v.k1() - 1) as usize)
                .collect();
            let cols: Vec<usize> = (roots[i]..roots[j])
                .filter(|k| !interior.contains(k))
                .map(|k| (k - v.k1()) as usize)
                .collect();
            let value = v.matrix().select(&rows, &cols).det();
            out.push(Minor { i: i + 1, j: j + 1, value });
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConditionII {
    pub status: Status,
    /// Indicial polynomial coefficients, lowest degree first.
    #[serde(with = "crate::shell::rat_serde::vec")]
    pub polynomial: Vec<Rat>,
    pub nonnegative_roots: Vec<i64>,
    pub reason: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConditionIII {
    pub status: Status,
    pub rank: Option<usize>,
    pub target_rank: Option<usize>,
    pub v: Option<VMatrix>,
    pub minors: Vec<Minor>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PoleReport {
    #[serde(with = "crate::shell::rat_serde")]
    pub point: Rat,
    pub condition_i: ConditionI,
    pub condition_ii: ConditionII,
    pub condition_iii: ConditionIII,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RealizabilityVerdict {
    pub realizable: bool,
    #[serde(with = "crate::shell::rat_serde::vec")]
    pub interval: Vec<Rat>,
    #[serde(with = "crate::shell::rat_serde::vec")]
    pub poles: Vec<Rat>,
    pub reports: Vec<PoleReport>,
}

impl RealizabilityVerdict {
    /// First pole whose report fails.
    pub fn first_failure(&self) -> Option<&PoleReport> {
        self.reports.iter().find(|r| !r.passed)
    }
}

/// Runs the three conditions at one point, stopping at the first failure.
pub fn analyze_point(gamma: &InvariantVector, point: &Rat) -> Result<PoleReport, RealizeError> {
    let n = gamma.n();
    let condition_i = check_condition_i(gamma, point);
    let skipped_ii = ConditionII { status: Status::Skipped, polynomial: vec![], nonnegative_roots: vec![], reason: None };
    let skipped_iii = ConditionIII { status: Status::Skipped, rank: None, target_rank: None, v: None, minors: vec![] };
    if condition_i.status == Status::Fail {
        return Ok(PoleReport { point: point.clone(), condition_i, condition_ii: skipped_ii, condition_iii: skipped_iii, passed: false });
    }
    let local = LocalCoefficients::at(gamma, point, n as i64)?;
    let ind = indicial(&local);
    let condition_ii = ConditionII {
        status: Status::from_bool(ind.passes()),
        polynomial: ind.poly.coeffs().to_vec(),
        nonnegative_roots: ind.nonnegative_roots.clone(),
        reason: (!ind.passes()).then(|| {
            format!(
                "indicial equation has {} distinct nonnegative integer roots, {} required",
                ind.nonnegative_roots.len(),
                n
            )
        }),
    };
    let Some(roots) = ind.roots() else {
        return Ok(PoleReport { point: point.clone(), condition_i, condition_ii, condition_iii: skipped_iii, passed: false });
    };
    let (k1, kn) = (roots[0], roots[n - 1]);
    let local = local.deepen(kn - k1 + n as i64)?;
    let v = build_v(&local, roots)?;
    let (ok, rank) = rank_condition(&v);
    let minors = minor_conditions(&v);
    let condition_iii = ConditionIII {
        status: if n == 1 { Status::Skipped } else { Status::from_bool(ok) },
        rank: Some(rank),
        target_rank: Some(v.target_rank),
        v: Some(v),
        minors,
    };
    Ok(PoleReport { point: point.clone(), condition_i, condition_ii, condition_iii, passed: ok })
}

pub fn realizability_verdict(gamma: &InvariantVector, interval: &(Rat, Rat)) -> Result<RealizabilityVerdict, RealizeError> {
    let poles = pole_set(gamma, interval)?;
    let reports = poles.iter().map(|p| analyze_point(gamma, p)).collect::<Result<Vec<_>, _>>()?;
    Ok(RealizabilityVerdict {
        realizable: reports.iter().all(|r| r.passed),
        interval: vec![interval.0.clone(), interval.1.clone()],
        poles,
        reports,
    })
}
