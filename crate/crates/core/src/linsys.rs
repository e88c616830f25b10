//! Linear non-autonomous single-input systems `x' = A(t) x + b(t) u`.

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactalg::{real_roots_in_interval, Matrix, Rat, RationalFunction, RootInterval, UniPoly};
use crate::laurent::{self, LaurentError};

type RF = RationalFunction;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinsysError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("empty interval")]
    EmptyInterval,
    #[error("entry {entry} has a pole in the interval near {}", crate::exactalg::fmt_rat(&.root.lo))]
    NotAnalytic { entry: String, root: RootInterval },
    #[error("system is not controllable: det K vanishes identically")]
    NotControllable,
    #[error("change of variables is singular in the interval near {}", crate::exactalg::fmt_rat(&.root.lo))]
    SingularChange { root: RootInterval },
    #[error("invariants of piece {piece} differ from those of piece 0")]
    PieceMismatch { piece: usize },
    #[error(transparent)]
    Laurent(#[from] LaurentError),
}

/// `x' = A(t) x + b(t) u` with entries analytic on a closed interval.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearSystem {
    a: Matrix<RF>,
    b: Vec<RF>,
    interval: (Rat, Rat),
}

/// Reports the first real pole of `f` in `[lo, hi]`.
pub(crate) fn first_pole_in(f: &RF, lo: &Rat, hi: &Rat) -> Option<RootInterval> {
    if f.denom().is_constant() {
        return None;
    }
    real_roots_in_interval(f.denom(), lo, hi).into_iter().next()
}

impl LinearSystem {
    pub fn new(a: Matrix<RF>, b: Vec<RF>, interval: (Rat, Rat)) -> Result<Self, LinsysError> {
        let n = b.len();
        if n == 0 || a.rows() != n || a.cols() != n {
            return Err(LinsysError::Dimension(format!("A is {}x{}, b has {n} entries", a.rows(), a.cols())));
        }
        if interval.0 > interval.1 {
            return Err(LinsysError::EmptyInterval);
        }
        let (lo, hi) = &interval;
        for i in 0..n {
            for j in 0..n {
                if let Some(root) = first_pole_in(&a[(i, j)], lo, hi) {
                    return Err(LinsysError::NotAnalytic { entry: format!("A{}{}", i + 1, j + 1), root });
                }
            }
            if let Some(root) = first_pole_in(&b[i], lo, hi) {
                return Err(LinsysError::NotAnalytic { entry: format!("b{}", i + 1), root });
            }
        }
        Ok(LinearSystem { a, b, interval })
    }

    /// The driftless system `x' = g(t) u`.
    pub fn driftless(g: Vec<RF>, interval: (Rat, Rat)) -> Result<Self, LinsysError> {
        let n = g.len();
        Self::new(Matrix::zeros(n, n), g, interval)
    }

    pub fn n(&self) -> usize {
        self.b.len()
    }

    pub fn a(&self) -> &Matrix<RF> {
        &self.a
    }

    pub fn b(&self) -> &[RF] {
        &self.b
    }

    pub fn interval(&self) -> &(Rat, Rat) {
        &self.interval
    }
}

/// `Δ⁰..Δᵐ` together with `K = (Δ⁰, …, Δⁿ⁻¹)` and its determinant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ControllabilityData {
    pub deltas: Vec<Vec<RF>>,
    pub k: Matrix<RF>,
    pub det_k: RF,
}

/// One step of `Δ ↦ −A Δ + dΔ/dt`.
pub fn delta_step(a: &Matrix<RF>, delta: &[RF]) -> Vec<RF> {
    let ad = a.mul_vec(delta);
    delta.iter().zip(&ad).map(|(d, x)| &d.derivative() - x).collect()
}

pub fn delta_chain(sys: &LinearSystem, m: usize) -> ControllabilityData {
    let n = sys.n();
    let mut deltas = vec![sys.b.clone()];
    for _ in 0..m.max(n - 1) {
        let next = delta_step(&sys.a, deltas.last().unwrap());
        deltas.push(next);
    }
    let k = Matrix::from_columns(&deltas[..n]);
    let det_k = k.det();
    deltas.truncate(m + 1);
    ControllabilityData { deltas, k, det_k }
}

/// The invariant vector `γ = K⁻¹ Δⁿ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvariantVector {
    pub gamma: Vec<RF>,
}

impl InvariantVector {
    pub fn n(&self) -> usize {
        self.gamma.len()
    }

    /// `p_s = −γ_{n−s+1}` for `s = 1..n`, zero-based in the returned vector.
    pub fn ode_coefficients(&self) -> Vec<RF> {
        self.gamma.iter().rev().map(|g| -g).collect()
    }
}

/// Solves `K γ = Δⁿ` by Cramer's rule.
pub fn invariants(sys: &LinearSystem) -> Result<InvariantVector, LinsysError> {
    let n = sys.n();
    let data = delta_chain(sys, n);
    if data.det_k.is_zero() {
        return Err(LinsysError::NotControllable);
    }
    let gamma = data.k.cramer(&data.deltas[n]).ok_or(LinsysError::NotControllable)?;
    Ok(InvariantVector { gamma })
}

/// Invariants of a time-invariant system from its Kalman matrix.
pub fn autonomous_invariants(a: &Matrix<Rat>, b: &[Rat]) -> Result<Vec<Rat>, LinsysError> {
    let n = b.len();
    if a.rows() != n || a.cols() != n {
        return Err(LinsysError::Dimension(format!("A is {}x{}, b has {n} entries", a.rows(), a.cols())));
    }
    let neg_a = a.neg();
    let mut cols = vec![b.to_vec()];
    for _ in 0..n {
        let next = neg_a.mul_vec(cols.last().unwrap());
        cols.push(next);
    }
    let k = Matrix::from_columns(&cols[..n]);
    k.cramer(&cols[n]).ok_or(LinsysError::NotControllable)
}

/// Real zeros of `det K` in the system's interval.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SingularSet {
    pub points: Vec<RootInterval>,
}

pub fn singular_points(sys: &LinearSystem) -> Result<SingularSet, LinsysError> {
    let data = delta_chain(sys, sys.n());
    if data.det_k.is_zero() {
        return Err(LinsysError::NotControllable);
    }
    let (lo, hi) = &sys.interval;
    Ok(SingularSet { points: real_roots_in_interval(data.det_k.numer(), lo, hi) })
}

/// Transports the system through `x̃ = F(t) x`: `Ã = (F' + F A) F⁻¹`, `b̃ = F b`.
pub fn apply_linear_change(sys: &LinearSystem, f: &Matrix<RF>) -> Result<LinearSystem, LinsysError> {
    let n = sys.n();
    if f.rows() != n || f.cols() != n {
        return Err(LinsysError::Dimension(format!("F is {}x{}, system has n = {n}", f.rows(), f.cols())));
    }
    let (lo, hi) = &sys.interval;
    for i in 0..n {
        for j in 0..n {
            if let Some(root) = first_pole_in(&f[(i, j)], lo, hi) {
                return Err(LinsysError::NotAnalytic { entry: format!("F{}{}", i + 1, j + 1), root });
            }
        }
    }
    let det = f.det();
    if det.is_zero() {
        return Err(LinsysError::SingularChange { root: RootInterval { lo: lo.clone(), hi: hi.clone(), exact: None, multiplicity: 0 } });
    }
    if let Some(root) = real_roots_in_interval(det.numer(), lo, hi).into_iter().next() {
        return Err(LinsysError::SingularChange { root });
    }
    let f_inv = f.inverse().expect("nonzero determinant");
    let f_dot = f.map(|e| e.derivative());
    let a_new = f_dot.add(&f.mul(&sys.a)).mul(&f_inv);
    let b_new = f.mul_vec(&sys.b);
    LinearSystem::new(a_new, b_new, sys.interval.clone())
}

/// Truncated power series of the fundamental matrix at a base point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FundamentalSeries {
    pub point: Rat,
    /// `Φ_k` with `Φ = Σ Φ_k (t − point)^k`, `Φ_0 = I`, `Φ' = A Φ`.
    pub phi: Vec<Matrix<Rat>>,
    /// Coefficients of `ĝ = Φ⁻¹ b`, the input field of the driftless form.
    pub g_hat: Vec<Vec<Rat>>,
}

pub fn fundamental_matrix_series(sys: &LinearSystem, point: &Rat, order: usize) -> Result<FundamentalSeries, LinsysError> {
    let n = sys.n();
    let ord = order as i64;
    let mut a_k = vec![Matrix::<Rat>::zeros(n, n); order + 1];
    for i in 0..n {
        for j in 0..n {
            let e = laurent::expand(&sys.a[(i, j)], point, ord)?;
            for (k, m) in a_k.iter_mut().enumerate() {
                m[(i, j)] = e.try_coeff(k as i64)?;
            }
        }
    }
    let mut b_k = vec![vec![Rat::zero(); n]; order + 1];
    for i in 0..n {
        let e = laurent::expand(&sys.b[i], point, ord)?;
        for (k, v) in b_k.iter_mut().enumerate() {
            v[i] = e.try_coeff(k as i64)?;
        }
    }
    let mut phi = vec![Matrix::<Rat>::identity(n)];
    let mut psi = vec![Matrix::<Rat>::identity(n)];
    for k in 0..order {
        let mut next_phi = Matrix::<Rat>::zeros(n, n);
        let mut next_psi = Matrix::<Rat>::zeros(n, n);
        for i in 0..=k {
            next_phi = next_phi.add(&a_k[i].mul(&phi[k - i]));
            next_psi = next_psi.add(&psi[k - i].mul(&a_k[i]));
        }
        let scale = Rat::one() / Rat::from_integer((k as i64 + 1).into());
        phi.push(next_phi.map(|x| x * &scale));
        psi.push(next_psi.map(|x| -(x * &scale)));
    }
    let g_hat = (0..=order)
        .map(|k| {
            let mut acc = vec![Rat::zero(); n];
            for i in 0..=k {
                for (r, v) in psi[i].mul_vec(&b_k[k - i]).into_iter().enumerate() {
                    acc[r] += v;
                }
            }
            acc
        })
        .collect();
    Ok(FundamentalSeries { point: point.clone(), phi, g_hat })
}

/// Invariants of a system given piecewise in `t`; all pieces must agree.
pub fn piecewise_invariants(pieces: &[LinearSystem]) -> Result<InvariantVector, LinsysError> {
    let mut first: Option<InvariantVector> = None;
    for (idx, sys) in pieces.iter().enumerate() {
        let g = invariants(sys)?;
        match &first {
            None => first = Some(g),
            Some(f) if *f != g => return Err(LinsysError::PieceMismatch { piece: idx }),
            Some(_) => {}
        }
    }
    first.ok_or_else(|| LinsysError::Dimension("no pieces".into()))
}

/// Polynomial `t`-matrix with constant nonzero determinant: `L U` with unit
/// triangular factors whose off-diagonal entries are the given polynomials.
pub fn unimodular(n: usize, lower: &[UniPoly], upper: &[UniPoly]) -> Matrix<RF> {
    let mut l = Matrix::<RF>::identity(n);
    let mut u = Matrix::<RF>::identity(n);
    let mut li = lower.iter();
    let mut ui = upper.iter();
    for i in 0..n {
        for j in 0..i {
            if let Some(p) = li.next() {
                l[(i, j)] = RF::from_poly(p.clone());
            }
            if let Some(p) = ui.next() {
                u[(j, i)] = RF::from_poly(p.clone());
            }
        }
    }
    l.mul(&u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::{int, rat};

    fn p(c: &[i64]) -> RF {
        RF::from_poly(UniPoly::from_ints(c))
    }

    fn q(n: &[i64], d: &[i64]) -> RF {
        RF::new(UniPoly::from_ints(n), UniPoly::from_ints(d))
    }

    fn unit() -> (Rat, Rat) {
        (int(0), int(1))
    }

    fn nilpotent() -> LinearSystem {
        let a = Matrix::from_rows(vec![vec![p(&[0]), p(&[1])], vec![p(&[0]), p(&[0])]]);
        LinearSystem::new(a, vec![p(&[0]), p(&[1])], unit()).unwrap()
    }

    #[test]
    fn nilpotent_chain() {
        let d = delta_chain(&nilpotent(), 2);
        assert_eq!(d.deltas, vec![vec![p(&[0]), p(&[1])], vec![p(&[-1]), p(&[0])], vec![p(&[0]), p(&[0])]]);
        assert_eq!(invariants(&nilpotent()).unwrap().gamma, vec![RF::zero(), RF::zero()]);
    }

    #[test]
    fn driftless_chain_is_differentiation() {
        let sys = LinearSystem::driftless(vec![p(&[-1, 2]), p(&[0, 0, 1])], unit()).unwrap();
        let d = delta_chain(&sys, 2);
        assert_eq!(d.deltas[1], vec![p(&[2]), p(&[0, 2])]);
        assert_eq!(d.deltas[2], vec![p(&[0]), p(&[2])]);
        assert_eq!(d.det_k, p(&[0, -2, 2]));
    }

    #[test]
    fn constant_input_without_drift() {
        let sys = LinearSystem::driftless(vec![p(&[3]), p(&[-1])], unit()).unwrap();
        let d = delta_chain(&sys, 3);
        assert!(d.deltas[1..].iter().flatten().all(RF::is_zero));
        assert_eq!(invariants(&sys), Err(LinsysError::NotControllable));
    }

    #[test]
    fn hypergeometric_invariants() {
        let sys = LinearSystem::driftless(vec![p(&[-1, 2]), p(&[0, 0, 1])], unit()).unwrap();
        let g = invariants(&sys).unwrap().gamma;
        assert_eq!(g[0], q(&[2], &[0, 1, -1]));
        assert_eq!(g[1], q(&[1, -2], &[0, 1, -1]));
        let s = singular_points(&sys).unwrap();
        let pts: Vec<_> = s.points.iter().map(|r| r.exact.clone().unwrap()).collect();
        assert_eq!(pts, vec![int(0), int(1)]);
    }

    #[test]
    fn final_example_invariants() {
        let sys = LinearSystem::driftless(vec![p(&[1]), p(&[0, 0, 0, 1])], (int(-1), int(1))).unwrap();
        assert_eq!(invariants(&sys).unwrap().gamma, vec![RF::zero(), q(&[2], &[0, 1])]);
        let s = singular_points(&sys).unwrap();
        assert_eq!(s.points.len(), 1);
        assert_eq!(s.points[0].exact, Some(int(0)));
    }

    #[test]
    fn autonomous_examples() {
        let a = Matrix::from_rows(vec![vec![int(0), int(1)], vec![int(-2), int(-3)]]);
        let b = vec![int(0), int(1)];
        // hand Cramer: K = [[0,-1],[1,3]], det K = 1, (-A)^2 b = (-3, 7)
        // gamma = (det[[-3,-1],[7,3]], det[[0,-3],[1,7]]) = (-2, 3)
        assert_eq!(autonomous_invariants(&a, &b).unwrap(), vec![int(-2), int(3)]);
        let scalar = Matrix::from_rows(vec![vec![int(5)]]);
        assert_eq!(autonomous_invariants(&scalar, &[int(1)]).unwrap(), vec![int(-5)]);
        let z = Matrix::from_rows(vec![vec![int(0), int(0)], vec![int(0), int(0)]]);
        assert_eq!(autonomous_invariants(&z, &[int(1), int(0)]), Err(LinsysError::NotControllable));
    }

    #[test]
    fn autonomous_agrees_with_general_invariants() {
        let a = Matrix::from_rows(vec![vec![p(&[0]), p(&[1])], vec![p(&[-2]), p(&[-3])]]);
        let sys = LinearSystem::new(a, vec![p(&[0]), p(&[1])], unit()).unwrap();
        assert_eq!(invariants(&sys).unwrap().gamma, vec![p(&[-2]), p(&[3])]);
        assert_eq!(singular_points(&sys).unwrap().points, vec![]);
    }

    #[test]
    fn rejects_poles_in_interval() {
        let err = LinearSystem::driftless(vec![q(&[1], &[-1, 2]), p(&[1])], unit()).unwrap_err();
        match err {
            LinsysError::NotAnalytic { entry, root } => {
                assert_eq!(entry, "b1");
                assert_eq!(root.exact, Some(rat(1, 2)));
            }
            e => panic!("unexpected {e:?}"),
        }
        assert!(LinearSystem::driftless(vec![q(&[1], &[1, 0, 1]), p(&[1])], unit()).is_ok());
    }

    #[test]
    fn identity_change_is_trivial() {
        let sys = nilpotent();
        assert_eq!(apply_linear_change(&sys, &Matrix::identity(2)).unwrap(), sys);
    }

    #[test]
    fn unimodular_change_preserves_invariants() {
        let sys = LinearSystem::driftless(vec![p(&[-1, 2]), p(&[0, 0, 1])], unit()).unwrap();
        let f = unimodular(2, &[UniPoly::from_ints(&[1, 0, 3])], &[UniPoly::from_ints(&[0, -1])]);
        assert_eq!(f.det(), RF::one());
        let moved = apply_linear_change(&sys, &f).unwrap();
        assert_eq!(invariants(&moved), invariants(&sys));
        let d = delta_chain(&sys, 2);
        let dm = delta_chain(&moved, 2);
        for k in 0..=2 {
            assert_eq!(dm.deltas[k], f.mul_vec(&d.deltas[k]));
        }
    }

    #[test]
    fn singular_change_rejected() {
        let sys = nilpotent();
        let f = Matrix::from_rows(vec![vec![p(&[-1, 2]), p(&[0])], vec![p(&[0]), p(&[1])]]);
        assert!(matches!(apply_linear_change(&sys, &f), Err(LinsysError::SingularChange { .. })));
    }

    #[test]
    fn fundamental_series_examples() {
        let zero = LinearSystem::driftless(vec![p(&[1]), p(&[0, 1])], unit()).unwrap();
        let s = fundamental_matrix_series(&zero, &int(0), 4).unwrap();
        assert_eq!(s.phi[0], Matrix::identity(2));
        assert!(s.phi[1..].iter().all(|m| m.is_zero()));

        let scalar = LinearSystem::new(Matrix::from_rows(vec![vec![p(&[1])]]), vec![p(&[1])], unit()).unwrap();
        let s = fundamental_matrix_series(&scalar, &int(0), 6).unwrap();
        let mut fact = Rat::one();
        for k in 0..=6usize {
            if k > 0 {
                fact *= int(k as i64);
            }
            assert_eq!(s.phi[k][(0, 0)], Rat::one() / &fact);
            // g_hat = e^{-t}
            let sign = if k % 2 == 0 { int(1) } else { int(-1) };
            assert_eq!(s.g_hat[k][0], sign / &fact);
        }

        let s = fundamental_matrix_series(&nilpotent(), &int(0), 4).unwrap();
        assert_eq!(s.phi[1], Matrix::from_rows(vec![vec![int(0), int(1)], vec![int(0), int(0)]]));
        assert!(s.phi[2..].iter().all(|m| m.is_zero()));
    }

    #[test]
    fn piecewise_pieces_must_agree() {
        let left = LinearSystem::driftless(vec![p(&[1]), p(&[0, 0, 0, 1])], (int(-1), int(0))).unwrap();
        let right = LinearSystem::driftless(vec![p(&[1]), p(&[0, 0, 0, 1])], (int(0), int(1))).unwrap();
        assert!(piecewise_invariants(&[left.clone(), right]).is_ok());
        let other = LinearSystem::driftless(vec![p(&[1]), p(&[0, 0, 0, 0, 1])], (int(0), int(1))).unwrap();
        assert_eq!(piecewise_invariants(&[left, other]), Err(LinsysError::PieceMismatch { piece: 1 }));
    }
}
