//! Exact arithmetic kernel.
//!
//! Everything in the crate is computed over the rationals: univariate
//! polynomials in `t`, reduced rational functions, polynomials in the state
//! variables `x1..xn` with rational-function coefficients, and matrices over
//! any of these. No floating point value is ever produced here.

mod matrix;
mod piecewise;
mod poly;
mod ratfunc;
mod roots;
mod xpoly;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

pub use matrix::Matrix;
pub use piecewise::{ContinuityWarning, Piecewise, PiecewiseError, PieceValue};
pub use poly::UniPoly;
pub use ratfunc::RationalFunction;
pub use roots::{
    integer_roots, rational_roots, real_roots_in_interval, root_modulus_lower_bound,
    squarefree_decomposition, sturm_sequence, RootInterval, SturmSequence,
};
pub use xpoly::{Monomial, XPoly};

/// Arbitrary-precision rational, always in lowest terms with a positive denominator.
pub type Rat = BigRational;

/// `n/d` as a [`Rat`]. Panics when `d == 0`.
pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Canonical text form: `p` for integers, `p/q` otherwise.
pub fn fmt_rat(r: &Rat) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses `p`, `-p`, `p/q` or a finite decimal such as `-0.125` exactly.
pub fn parse_rat(src: &str) -> Option<Rat> {
    let s = src.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n = parse_rat(n)?;
        let d = parse_rat(d)?;
        if Zero::is_zero(&d) {
            return None;
        }
        return Some(n / d);
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    if body.is_empty() {
        return None;
    }
    let (whole, frac) = body.split_once('.').unwrap_or((body, ""));
    if whole.is_empty() && frac.is_empty() {
        return None;
    }
    if !whole.chars().all(|c| c.is_ascii_digit()) || !frac.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{whole}{frac}");
    let mantissa: BigInt = if digits.is_empty() { BigInt::zero() } else { digits.parse().ok()? };
    let scale = num_traits::pow(BigInt::from(10), frac.len());
    let value = Rat::new(mantissa, scale);
    Some(if neg { -value } else { value })
}

/// Falling factorial `k(k-1)...(k-q+1)`; zero when `q > k`.
pub fn falling_factorial(k: u64, q: u64) -> BigInt {
    if q > k {
        return BigInt::zero();
    }
    (0..q).fold(BigInt::one(), |acc, i| acc * BigInt::from(k - i))
}

/// Falling factorial as a polynomial in `k`, `k(k-1)...(k-q+1)`.
pub fn falling_factorial_poly(q: usize) -> UniPoly {
    (0..q).fold(UniPoly::one(), |acc, i| {
        acc * UniPoly::new(vec![int(-(i as i64)), int(1)])
    })
}

/// Commutative ring operations used by the generic matrix code.
///
/// Method names avoid clashing with `std::ops` so both can be in scope.
pub trait Ring: Clone + PartialEq + std::fmt::Debug {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn plus(&self, other: &Self) -> Self;
    fn minus(&self, other: &Self) -> Self;
    fn times(&self, other: &Self) -> Self;
    fn negated(&self) -> Self;
}

/// A [`Ring`] with exact division by nonzero elements.
pub trait Field: Ring {
    fn over(&self, other: &Self) -> Self;
}

impl Ring for Rat {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn minus(&self, other: &Self) -> Self {
        self - other
    }
    fn times(&self, other: &Self) -> Self {
        self * other
    }
    fn negated(&self) -> Self {
        -self
    }
}

impl Field for Rat {
    fn over(&self, other: &Self) -> Self {
        self / other
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn falling_factorial_basics() {
        assert_eq!(falling_factorial(5, 2), BigInt::from(20));
        assert_eq!(falling_factorial(3, 5), BigInt::zero());
        assert_eq!(falling_factorial(4, 0), BigInt::one());
        assert_eq!(falling_factorial(0, 0), BigInt::one());
    }

    #[test]
    fn falling_factorial_sum_identity() {
        // brute-force summation against k^(m+1)/(m+1)
        for k in 1..12u64 {
            for m in 0..6u64 {
                let sum: BigInt = (0..k).map(|j| falling_factorial(j, m)).sum();
                assert_eq!(sum * BigInt::from(m + 1), falling_factorial(k, m + 1));
            }
        }
        let sum: BigInt = (0..6u64).map(|j| falling_factorial(j, 2)).sum();
        assert_eq!(sum, BigInt::from(40));
    }

    #[test]
    fn falling_factorial_poly_matches_integer_version() {
        for q in 0..5usize {
            let p = falling_factorial_poly(q);
            for k in 0..8u64 {
                assert_eq!(p.eval(&int(k as i64)), Rat::from_integer(falling_factorial(k, q as u64)));
            }
        }
    }

    #[test]
    fn parses_decimals_exactly() {
        assert_eq!(parse_rat("0.5"), Some(rat(1, 2)));
        assert_eq!(parse_rat("-1.25"), Some(rat(-5, 4)));
        assert_eq!(parse_rat("3/6"), Some(rat(1, 2)));
        assert_eq!(parse_rat("-3"), Some(int(-3)));
        assert_eq!(parse_rat(".5"), Some(rat(1, 2)));
        assert_eq!(parse_rat("1/0"), None);
        assert_eq!(parse_rat("abc"), None);
        assert_eq!(parse_rat(""), None);
    }
}
