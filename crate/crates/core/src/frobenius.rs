//! Analytic power-series solutions of `y⁽ⁿ⁾ + Σ p_s y⁽ⁿ⁻ˢ⁾ = 0` at a point,
//! with a certified lower bound on the radius of convergence.

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactalg::{
    falling_factorial, falling_factorial_poly, fmt_rat, real_roots_in_interval, root_modulus_lower_bound, Rat,
    RationalFunction, UniPoly,
};
use crate::laurent::LaurentError;
use crate::linsys::InvariantVector;
use crate::realize::{indicial, LocalCoefficients, RealizabilityVerdict};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FrobeniusError {
    #[error("equation for index {index} is inconsistent (left side {}); the rank condition fails", fmt_rat(.value))]
    InconsistentSystem { index: i64, value: Rat },
    #[error("expected {expected} free values, got {got}")]
    FreeValueCount { expected: usize, got: usize },
    #[error("truncation {truncation} is below the largest indicial root {kn}")]
    TruncationTooSmall { truncation: i64, kn: i64 },
    #[error("the indicial equation does not have {0} distinct nonnegative integer roots here")]
    NoAnalyticBasis(usize),
    #[error("gamma is not realizable on the interval")]
    NotRealizable,
    #[error(transparent)]
    Laurent(#[from] LaurentError),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FreeValue {
    pub index: i64,
    #[serde(with = "crate::shell::rat_serde")]
    pub value: Rat,
}

/// `y = Σ_{k=0}^{K} y_k (t − point)^k`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesSolution {
    #[serde(with = "crate::shell::rat_serde")]
    pub point: Rat,
    #[serde(with = "crate::shell::rat_serde::vec")]
    pub coefficients: Vec<Rat>,
    pub free_values: Vec<FreeValue>,
}

impl SeriesSolution {
    pub fn truncation(&self) -> i64 {
        self.coefficients.len() as i64 - 1
    }

    pub fn coeff(&self, k: i64) -> Rat {
        usize::try_from(k).ok().and_then(|k| self.coefficients.get(k)).cloned().unwrap_or_else(Rat::zero)
    }

    /// The stored coefficients as a polynomial in `s = t − point`.
    pub fn partial_sum(&self) -> UniPoly {
        UniPoly::new(self.coefficients.clone())
    }

    /// The same partial sum expressed in `t`.
    pub fn partial_sum_in_t(&self) -> UniPoly {
        self.partial_sum().shift(&-&self.point)
    }
}

/// Coefficients `y_k` from the recurrence, with `y_{k_i}` prescribed.
pub fn solve_recurrence(local: &LocalCoefficients, roots: &[i64], free: &[Rat], truncation: i64) -> Result<SeriesSolution, FrobeniusError> {
    if free.len() != roots.len() {
        return Err(FrobeniusError::FreeValueCount { expected: roots.len(), got: free.len() });
    }
    let kn = *roots.last().expect("at least one root");
    if truncation < kn {
        return Err(FrobeniusError::TruncationTooSmall { truncation, kn });
    }
    let deeper;
    let local = if local.depth() < truncation {
        deeper = local.deepen(truncation)?;
        &deeper
    } else {
        local
    };
    let k1 = roots[0];
    let diag = local.indicial_poly();
    let mut y = vec![Rat::zero(); truncation as usize + 1];
    for k in k1..=truncation {
        let mut acc = Rat::zero();
        for j in k1..k {
            let yj = &y[j as usize];
            if !yj.is_zero() {
                acc += local.v(k, j)? * yj;
            }
        }
        if let Some(pos) = roots.iter().position(|&r| r == k) {
            if !acc.is_zero() {
                return Err(FrobeniusError::InconsistentSystem { index: k, value: acc });
            }
            y[k as usize] = free[pos].clone();
        } else {
            let vkk = diag.eval(&Rat::from_integer(k.into()));
            y[k as usize] = -acc / vkk;
        }
    }
    Ok(SeriesSolution {
        point: local.point().clone(),
        coefficients: y,
        free_values: roots.iter().zip(free).map(|(&index, v)| FreeValue { index, value: v.clone() }).collect(),
    })
}

/// One solution per unit vector of free values.
pub fn solution_basis(local: &LocalCoefficients, roots: &[i64], truncation: i64) -> Result<Vec<SeriesSolution>, FrobeniusError> {
    (0..roots.len())
        .map(|i| {
            let free: Vec<Rat> = (0..roots.len()).map(|j| if i == j { Rat::one() } else { Rat::zero() }).collect();
            solve_recurrence(local, roots, &free, truncation)
        })
        .collect()
}

/// Coefficients of `(t − point)^m`, `m = −n..=order`, in `y⁽ⁿ⁾ + Σ p_s y⁽ⁿ⁻ˢ⁾`,
/// computed by multiplying the Laurent series of `p_s` with the derivatives of `y`.
pub fn residual(sol: &SeriesSolution, local: &LocalCoefficients, order: i64) -> Result<Vec<(i64, Rat)>, FrobeniusError> {
    let n = local.n();
    let deeper;
    let local = if local.depth() < order {
        deeper = local.deepen(order)?;
        &deeper
    } else {
        local
    };
    // coefficient of (t − point)^e in y^{(r)}
    let deriv = |r: usize, e: i64| -> Rat {
        if e < 0 {
            return Rat::zero();
        }
        let idx = e + r as i64;
        Rat::from_integer(falling_factorial(idx as u64, r as u64)) * sol.coeff(idx)
    };
    let mut out = Vec::new();
    for m in -(n as i64)..=order {
        let mut acc = deriv(n, m);
        for s in 1..=n {
            let lowest = local.gamma_expansion(n - s + 1).lowest_order().min(0);
            for i in lowest..=m {
                let p = local.p(s, i)?;
                if !p.is_zero() {
                    acc += p * deriv(n - s, m - i);
                }
            }
        }
        out.push((m, acc));
    }
    Ok(out)
}

/// `|y_k| ≤ C₁ Cᵏ` for every `k`, so the series converges for `|t − point| < 1/C`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GrowthBound {
    #[serde(with = "crate::shell::rat_serde")]
    pub c: Rat,
    #[serde(with = "crate::shell::rat_serde")]
    pub c1: Rat,
    pub k0: i64,
    #[serde(with = "crate::shell::rat_serde")]
    pub radius_lb: Rat,
    /// Lower bound on the distance to the nearest other singularity, if any.
    #[serde(with = "crate::shell::rat_serde::opt")]
    pub rho: Option<Rat>,
    /// The power of two `μ` with `C = max(1, μ/ρ)` (or `C = μ` without finite poles).
    #[serde(with = "crate::shell::rat_serde")]
    pub mu: Rat,
}

impl GrowthBound {
    /// Exact check of `|y_k| ≤ C₁ Cᵏ` over the stored coefficients.
    pub fn holds_for(&self, sol: &SeriesSolution) -> bool {
        let mut bound = self.c1.clone();
        for y in &sol.coefficients {
            if y.abs() > bound {
                return false;
            }
            bound *= &self.c;
        }
        true
    }
}

/// `t^s p_s(point + t)` split as a polynomial numerator over a denominator
/// with nonzero constant term.
fn regular_part(p: &RationalFunction, point: &Rat, s: usize) -> (UniPoly, UniPoly) {
    let num = p.numer().shift(point);
    let den = p.denom().shift(point);
    let m = den.trailing_zeros();
    debug_assert!(m <= s, "pole order bound violated");
    let den = den.shr(m);
    let num = &num * &UniPoly::monomial(Rat::one(), s - m);
    (num, den)
}

fn pow(base: &Rat, e: i64) -> Rat {
    num_traits::pow(base.clone(), e as usize)
}

/// Smallest `k₀ ≥ k_n` with `P(k) ≤ V_{k,k}` for every integer `k > k₀`.
fn find_k0(diag: &UniPoly, n: usize, kn: i64) -> i64 {
    let p_poly = (1..=n).fold(UniPoly::zero(), |acc, s| {
        let q = n - s + 1;
        &acc + &falling_factorial_poly(q).scale(&(Rat::one() / Rat::from_integer((q as i64).into())))
    });
    let gap = diag - &p_poly;
    // leading coefficient 1 − 1/n > 0, so gap > 0 beyond its largest real root
    let lead = gap.leading();
    let cauchy = gap.coeffs().iter().map(|c| (c / &lead).abs()).fold(Rat::zero(), |a, b| if b > a { b } else { a }) + Rat::one();
    let last = real_roots_in_interval(&gap, &-&cauchy, &cauchy).last().map(|r| r.hi.ceil().to_integer());
    let mut k0 = last.map_or(kn, |r| kn.max(num_traits::ToPrimitive::to_i64(&r).expect("small root")));
    let ok = |k: i64| {
        let kr = Rat::from_integer(k.into());
        let v = diag.eval(&kr);
        v.is_positive() && gap.eval(&kr) >= Rat::zero()
    };
    while k0 > kn && ok(k0) {
        k0 -= 1;
    }
    k0
}

/// Certified growth constants for `sol`; extends the series when `k₀` exceeds it.
pub fn growth_bound(local: &LocalCoefficients, roots: &[i64], sol: &SeriesSolution) -> Result<GrowthBound, FrobeniusError> {
    let n = local.n();
    let point = local.point().clone();
    let parts: Vec<(UniPoly, UniPoly)> =
        (1..=n).map(|s| regular_part(&(-&local.functions()[n - s]), &point, s)).collect();
    let rho = parts
        .iter()
        .filter_map(|(_, den)| root_modulus_lower_bound(den))
        .fold(None::<Rat>, |acc, r| Some(acc.map_or(r.clone(), |a| if r < a { r } else { a })));

    // every nonzero coefficient of a polynomial regular part must be examined
    let needed = parts
        .iter()
        .enumerate()
        .filter(|(_, (_, den))| den.is_constant())
        .map(|(i, (num, _))| num.degree().unwrap_or(0) as i64 - (i as i64 + 1))
        .max()
        .unwrap_or(0);
    let depth = local.depth().max(needed).max(sol.truncation());
    let local = if local.depth() < depth { local.deepen(depth)? } else { local.clone() };

    // Cauchy estimate on |τ| = ρ/2 for regular parts with other poles:
    // |q_m| ≤ M 2^m / ρ^m with M ≤ Σ|a_i| r^i / (|lc| (ρ − r)^d).
    let two = Rat::from_integer(2.into());
    let tail_m = rho.as_ref().map(|rho| {
        let r = rho / &two;
        parts
            .iter()
            .filter(|(_, den)| !den.is_constant())
            .map(|(num, den)| {
                let top = num.coeffs().iter().rev().fold(Rat::zero(), |acc, a| acc * &r + a.abs());
                let bottom = den.leading().abs() * pow(&(rho - &r), den.degree().unwrap() as i64);
                top / bottom
            })
            .fold(Rat::zero(), |a, b| if b > a { b } else { a })
    });

    let stored_ok = |c: &Rat| {
        (1..=n).all(|s| {
            let si = s as i64;
            (-si + 1..=depth).all(|i| local.p(s, i).map(|p| p.abs() <= pow(c, si + i)).unwrap_or(false))
        })
    };
    let mut mu = Rat::one();
    let c = loop {
        let c = match &rho {
            Some(rho) => {
                let c = &mu / rho;
                if c < Rat::one() { Rat::one() } else { c }
            }
            None => mu.clone(),
        };
        let tail_ok = match (&rho, &tail_m) {
            // with C = μ/ρ the tail needs M ≤ (μ/2)^m for m > depth, i.e. at m = depth + 1
            (Some(rho), Some(m)) => {
                let ratio = &c * rho / &two;
                ratio >= Rat::one() && m <= &pow(&ratio, depth + 1)
            }
            _ => true,
        };
        if tail_ok && stored_ok(&c) {
            break c;
        }
        mu *= &two;
    };

    let k1 = roots[0];
    let kn = *roots.last().unwrap();
    let k0 = if n == 1 { k1 } else { find_k0(&local.indicial_poly(), n, kn) };
    let sol = if k0 > sol.truncation() {
        let free: Vec<Rat> = sol.free_values.iter().map(|f| f.value.clone()).collect();
        solve_recurrence(&local, roots, &free, k0)?
    } else {
        sol.clone()
    };
    let c1 = (0..=k0).map(|k| sol.coeff(k).abs()).fold(Rat::zero(), |a, b| if b > a { b } else { a });
    Ok(GrowthBound { radius_lb: Rat::one() / &c, c, c1, k0, rho, mu })
}

/// Whether the series is a polynomial: nominated when the last `n` stored
/// coefficients past `k_n` vanish, then confirmed by exact substitution.
pub fn terminating_polynomial(sol: &SeriesSolution, gamma: &InvariantVector, kn: i64) -> Option<UniPoly> {
    let n = gamma.n() as i64;
    let last_nonzero = sol.coefficients.iter().rposition(|c| !c.is_zero()).map_or(-1, |i| i as i64);
    if sol.truncation() - last_nonzero.max(kn) < n {
        return None;
    }
    let y = sol.partial_sum_in_t();
    let p = gamma.ode_coefficients();
    let mut derivs = vec![y];
    for _ in 0..n {
        let d = derivs.last().unwrap().derivative();
        derivs.push(d);
    }
    let n = n as usize;
    let mut lhs = RationalFunction::from_poly(derivs[n].clone());
    for s in 1..=n {
        lhs = &lhs + &(&p[s - 1] * &RationalFunction::from_poly(derivs[n - s].clone()));
    }
    lhs.is_zero().then(|| derivs.swap_remove(0))
}

/// A truncated driftless system `x' = ĝ(t) u` whose invariants are `γ`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DriftlessRealization {
    #[serde(with = "crate::shell::rat_serde")]
    pub point: Rat,
    pub roots: Vec<i64>,
    pub basis: Vec<SeriesSolution>,
    pub bounds: Vec<GrowthBound>,
    /// Exact polynomial components in `t` when every series terminates.
    pub polynomials: Option<Vec<String>>,
}

pub fn default_truncation(kn: i64) -> i64 {
    kn + 24
}

/// Builds the basis of analytic solutions at `point` as the components of `ĝ`.
pub fn realize_system(
    gamma: &InvariantVector,
    verdict: &RealizabilityVerdict,
    point: &Rat,
    truncation: Option<i64>,
) -> Result<DriftlessRealization, FrobeniusError> {
    if !verdict.realizable {
        return Err(FrobeniusError::NotRealizable);
    }
    let (local, roots) = local_roots(gamma, point)?;
    let kn = *roots.last().unwrap();
    let k = truncation.unwrap_or_else(|| default_truncation(kn));
    let basis = solution_basis(&local, &roots, k)?;
    let bounds = basis.iter().map(|s| growth_bound(&local, &roots, s)).collect::<Result<Vec<_>, _>>()?;
    let polys: Option<Vec<UniPoly>> = basis.iter().map(|s| terminating_polynomial(s, gamma, kn)).collect();
    Ok(DriftlessRealization {
        point: point.clone(),
        roots,
        basis,
        bounds,
        polynomials: polys.map(|ps| ps.iter().map(|p| p.to_string()).collect()),
    })
}

/// Laurent data at `point` and the indicial roots, or an error if there are
/// not `n` distinct nonnegative integer roots.
pub fn local_roots(gamma: &InvariantVector, point: &Rat) -> Result<(LocalCoefficients, Vec<i64>), FrobeniusError> {
    let n = gamma.n();
    let local = LocalCoefficients::at(gamma, point, n as i64)?;
    let ind = indicial(&local);
    let roots = ind.roots().ok_or(FrobeniusError::NoAnalyticBasis(n))?.to_vec();
    Ok((local, roots))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::{int, rat};
    use crate::realize::realizability_verdict;

    fn q(n: &[i64], d: &[i64]) -> RationalFunction {
        RationalFunction::new(UniPoly::from_ints(n), UniPoly::from_ints(d))
    }

    fn gv(g: Vec<RationalFunction>) -> InvariantVector {
        InvariantVector { gamma: g }
    }

    fn ex3() -> InvariantVector {
        // γ1 = 1 − 1/t, γ2 = 1/t
        gv(vec![q(&[-1, 1], &[0, 1]), q(&[1], &[0, 1])])
    }

    fn factorial(k: i64) -> Rat {
        (1..=k).fold(Rat::one(), |a, i| a * int(i))
    }

    #[test]
    fn ex3_exponential() {
        let (local, roots) = local_roots(&ex3(), &int(0)).unwrap();
        assert_eq!(roots, vec![0, 2]);
        let sol = solve_recurrence(&local, &roots, &[int(1), rat(1, 2)], 20).unwrap();
        for k in 0..=20 {
            assert_eq!(sol.coeff(k), Rat::one() / factorial(k), "k={k}");
        }
        let sol = solve_recurrence(&local, &roots, &[int(1), rat(-3, 2)], 20).unwrap();
        for k in 0..=20 {
            let sign = if k % 2 == 0 { int(1) } else { int(-1) };
            assert_eq!(sol.coeff(k), sign * int(1 - 2 * k) / factorial(k), "k={k}");
        }
        let b = growth_bound(&local, &roots, &sol).unwrap();
        assert_eq!(b.c, int(1));
        assert!(b.radius_lb >= int(1));
        assert!(b.holds_for(&sol));
    }

    #[test]
    fn ex_hyp_terminates() {
        let g = gv(vec![q(&[2], &[0, 1, -1]), q(&[1, -2], &[0, 1, -1])]);
        let (local, roots) = local_roots(&g, &int(0)).unwrap();
        assert_eq!(roots, vec![0, 2]);
        let sol = solve_recurrence(&local, &roots, &[int(-1), int(0)], 12).unwrap();
        assert_eq!(sol.partial_sum(), UniPoly::from_ints(&[-1, 2]));
        let sol = solve_recurrence(&local, &roots, &[int(0), int(1)], 12).unwrap();
        assert_eq!(sol.partial_sum(), UniPoly::from_ints(&[0, 0, 1]));
        assert_eq!(terminating_polynomial(&sol, &g, 2), Some(UniPoly::from_ints(&[0, 0, 1])));
    }

    #[test]
    fn final_example_basis() {
        let g = gv(vec![RationalFunction::zero(), q(&[2], &[0, 1])]);
        let (local, roots) = local_roots(&g, &int(0)).unwrap();
        let basis = solution_basis(&local, &roots, 27).unwrap();
        assert_eq!(basis[0].partial_sum(), UniPoly::one());
        assert_eq!(basis[1].partial_sum(), UniPoly::from_ints(&[0, 0, 0, 1]));
    }

    #[test]
    fn trivial_bases() {
        let g = gv(vec![RationalFunction::zero(), RationalFunction::zero()]);
        let (local, roots) = local_roots(&g, &int(0)).unwrap();
        let b = solution_basis(&local, &roots, 6).unwrap();
        assert_eq!(b[0].partial_sum(), UniPoly::one());
        assert_eq!(b[1].partial_sum(), UniPoly::var());
        let g = gv(vec![RationalFunction::zero()]);
        let (local, roots) = local_roots(&g, &int(0)).unwrap();
        assert_eq!(solution_basis(&local, &roots, 6).unwrap()[0].partial_sum(), UniPoly::one());
    }

    #[test]
    fn residual_detects_perturbation() {
        let (local, roots) = local_roots(&ex3(), &int(0)).unwrap();
        let sol = solve_recurrence(&local, &roots, &[int(1), rat(1, 2)], 20).unwrap();
        let r = residual(&sol, &local, 18).unwrap();
        assert!(r.iter().all(|(_, v)| v.is_zero()));
        let mut bad = sol.clone();
        bad.coefficients[5] += int(1);
        let r = residual(&bad, &local, 18).unwrap();
        let first = r.iter().find(|(_, v)| !v.is_zero()).unwrap();
        assert_eq!(first.0, 5 - 2);
        let zero = SeriesSolution { point: int(0), coefficients: vec![Rat::zero(); 10], free_values: vec![] };
        assert!(residual(&zero, &local, 8).unwrap().iter().all(|(_, v)| v.is_zero()));
    }

    #[test]
    fn inconsistent_when_rank_condition_fails() {
        // p1 = −1/t, p2 = 1/t: rank condition fails (determinant 1)
        let g = gv(vec![q(&[-1], &[0, 1]), q(&[1], &[0, 1])]);
        let (local, roots) = local_roots(&g, &int(0)).unwrap();
        assert!(matches!(
            solve_recurrence(&local, &roots, &[int(1), int(0)], 6),
            Err(FrobeniusError::InconsistentSystem { index: 2, .. })
        ));
    }

    #[test]
    fn scalar_growth_uses_first_root() {
        // y' = (2/t + 1/(1 − t)) y has solution t²/(1 − t)
        let g = gv(vec![&q(&[2], &[0, 1]) + &q(&[1], &[1, -1])]);
        let (local, roots) = local_roots(&g, &int(0)).unwrap();
        assert_eq!(roots, vec![2]);
        let sol = solve_recurrence(&local, &roots, &[int(1)], 15).unwrap();
        for k in 2..=15 {
            assert_eq!(sol.coeff(k), int(1));
        }
        let b = growth_bound(&local, &roots, &sol).unwrap();
        assert_eq!(b.k0, 2);
        assert!(b.holds_for(&sol));
        assert!(b.radius_lb <= int(1));
    }

    #[test]
    fn growth_bound_with_finite_poles_is_below_true_radius() {
        let g = gv(vec![q(&[2], &[0, 1, -1]), q(&[1, -2], &[0, 1, -1])]);
        let (local, roots) = local_roots(&g, &int(0)).unwrap();
        let basis = solution_basis(&local, &roots, 20).unwrap();
        for s in &basis {
            let b = growth_bound(&local, &roots, s).unwrap();
            assert!(b.c >= int(1));
            assert!(b.radius_lb <= int(1));
            assert!(b.holds_for(s));
        }
    }

    #[test]
    fn realize_final_example() {
        let g = gv(vec![RationalFunction::zero(), q(&[2], &[0, 1])]);
        let v = realizability_verdict(&g, &(int(-1), int(1))).unwrap();
        let r = realize_system(&g, &v, &int(0), None).unwrap();
        assert_eq!(r.polynomials, Some(vec!["1".to_string(), "t^3".to_string()]));
        assert_eq!(r.basis[0].truncation(), 27);
    }

    #[test]
    fn realize_at_shifted_point() {
        // eq_no realized at its pole t = 0 and expressed back in t
        let g = gv(vec![q(&[-2], &[0, 0, 1, -1]), q(&[2], &[0, 1, -1])]);
        let v = realizability_verdict(&g, &(int(0), rat(9, 10))).unwrap();
        let r = realize_system(&g, &v, &int(0), Some(30)).unwrap();
        assert_eq!(r.roots, vec![1, 2]);
        // t and t²/(1 − t) = t/(1 − t) − t
        assert_eq!(r.basis[0].partial_sum(), UniPoly::var());
        assert_eq!(r.basis[1].coeff(1), int(0));
        assert!(r.basis[1].coefficients[2..].iter().all(|c| c == &int(1)));
        assert_eq!(r.polynomials, None);
        let poly = gv(vec![RationalFunction::zero(), RationalFunction::zero()]);
        let v = realizability_verdict(&poly, &(int(0), int(1))).unwrap();
        let r = realize_system(&poly, &v, &int(1), Some(5)).unwrap();
        assert_eq!(r.polynomials, Some(vec!["1".to_string(), "t - 1".to_string()]));
    }
}
