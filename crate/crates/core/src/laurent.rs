//! Truncated Laurent expansions of rational functions at rational points.

use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactalg::{Rat, RationalFunction};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LaurentError {
    #[error("truncation order {order} cuts into the principal part of a pole of order {pole_order}")]
    OrderBelowPrincipalPart { order: i64, pole_order: u32 },
    #[error("coefficient of order {index} requested from an expansion truncated at {truncation}")]
    InsufficientExpansion { index: i64, truncation: i64 },
}

/// `sum_{i = lowest_order}^{truncation_order} c_i (t - point)^i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LaurentExpansion {
    #[serde(with = "crate::shell::rat_serde")]
    point: Rat,
    lowest_order: i64,
    #[serde(with = "crate::shell::rat_serde::vec")]
    coeffs: Vec<Rat>,
    truncation_order: i64,
}

impl LaurentExpansion {
    pub fn point(&self) -> &Rat {
        &self.point
    }

    /// Order of the first nonzero coefficient (0 for the zero function).
    pub fn lowest_order(&self) -> i64 {
        self.lowest_order
    }

    pub fn truncation_order(&self) -> i64 {
        self.truncation_order
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// Pole order at the expansion point, zero when analytic there.
    pub fn pole_order(&self) -> u32 {
        if self.is_zero() {
            0
        } else {
            u32::try_from((-self.lowest_order).max(0)).unwrap()
        }
    }

    /// Coefficient of `(t - point)^i`; `None` past the truncation order.
    pub fn coeff(&self, i: i64) -> Option<Rat> {
        if i > self.truncation_order {
            return None;
        }
        if i < self.lowest_order {
            return Some(Rat::zero());
        }
        Some(self.coeffs[(i - self.lowest_order) as usize].clone())
    }

    pub fn try_coeff(&self, i: i64) -> Result<Rat, LaurentError> {
        self.coeff(i)
            .ok_or(LaurentError::InsufficientExpansion { index: i, truncation: self.truncation_order })
    }

    /// Product truncated to the orders both factors determine.
    pub fn mul(&self, other: &LaurentExpansion) -> LaurentExpansion {
        assert_eq!(self.point, other.point, "expansions at different points");
        let lowest = self.lowest_order + other.lowest_order;
        let trunc = (self.truncation_order + other.lowest_order).min(other.truncation_order + self.lowest_order);
        let mut coeffs = vec![Rat::zero(); (trunc - lowest + 1) as usize];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                if i + j < coeffs.len() {
                    coeffs[i + j] += a * b;
                }
            }
        }
        LaurentExpansion::normalized(self.point.clone(), lowest, coeffs, trunc)
    }

    /// Partial sum at displacement `s = t - point` (`s != 0` when a pole is present).
    pub fn partial_sum(&self, s: &Rat) -> Rat {
        let mut acc = Rat::zero();
        for (k, c) in self.coeffs.iter().enumerate() {
            let e = self.lowest_order + k as i64;
            acc += c * pow_i(s, e);
        }
        acc
    }

    fn normalized(point: Rat, lowest: i64, mut coeffs: Vec<Rat>, trunc: i64) -> Self {
        let lead = coeffs.iter().take_while(|c| c.is_zero()).count();
        if lead == coeffs.len() {
            let lowest_order = lowest.max(0).min(trunc.max(0));
            let len = (trunc.max(lowest_order) - lowest_order + 1) as usize;
            return LaurentExpansion { point, lowest_order, coeffs: vec![Rat::zero(); len], truncation_order: trunc.max(lowest_order) };
        }
        coeffs.drain(..lead);
        LaurentExpansion { point, lowest_order: lowest + lead as i64, coeffs, truncation_order: trunc }
    }
}

fn pow_i(s: &Rat, e: i64) -> Rat {
    let p = num_traits::pow::pow(s.clone(), e.unsigned_abs() as usize);
    if e < 0 {
        num_traits::Inv::inv(p)
    } else {
        p
    }
}

/// Exact Laurent coefficients of `f` at `point` through `(t - point)^order`.
///
/// When `f` vanishes at the point to an order above the request, the
/// truncation is raised so the leading coefficient is always present.
pub fn expand(f: &RationalFunction, point: &Rat, order: i64) -> Result<LaurentExpansion, LaurentError> {
    if f.is_zero() {
        let trunc = order.max(0);
        return Ok(LaurentExpansion {
            point: point.clone(),
            lowest_order: 0,
            coeffs: vec![Rat::zero(); trunc as usize + 1],
            truncation_order: trunc,
        });
    }
    let num = f.numer().shift(point);
    let den = f.denom().shift(point);
    let v = num.trailing_zeros();
    let m = den.trailing_zeros();
    let lowest = v as i64 - m as i64;
    if order < lowest.min(0) {
        return Err(LaurentError::OrderBelowPrincipalPart { order, pole_order: m as u32 });
    }
    let trunc = order.max(lowest);
    let num = num.shr(v);
    let den = den.shr(m);
    let d0 = den.coeff(0);
    let len = (trunc - lowest + 1) as usize;
    // power series division num/den with den(0) != 0
    let mut c: Vec<Rat> = Vec::with_capacity(len);
    for i in 0..len {
        let mut acc = num.coeff(i);
        for j in 1..=i.min(den.degree().unwrap_or(0)) {
            acc -= den.coeff(j) * &c[i - j];
        }
        c.push(acc / &d0);
    }
    Ok(LaurentExpansion { point: point.clone(), lowest_order: lowest, coeffs: c, truncation_order: trunc })
}

/// Multiplicity of `point` as a pole of `f` (0 when analytic there).
pub fn pole_order(f: &RationalFunction, point: &Rat) -> u32 {
    if f.is_zero() {
        return 0;
    }
    let m = f.denom().root_multiplicity(point);
    let v = f.numer().root_multiplicity(point);
    (m as i64 - v as i64).max(0) as u32
}
