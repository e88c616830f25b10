use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::poly::forward_owned;
use super::{Rat, RationalFunction};

/// Exponent vector over `x1..xn`.
pub type Monomial = Vec<u32>;

/// Polynomial in the state variables `x1..xn` whose coefficients are
/// rational functions of `t`. Zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct XPoly {
    nvars: usize,
    terms: BTreeMap<Monomial, RationalFunction>,
}

impl XPoly {
    pub fn zero(nvars: usize) -> Self {
        XPoly { nvars, terms: BTreeMap::new() }
    }

    pub fn one(nvars: usize) -> Self {
        Self::from_rf(nvars, RationalFunction::one())
    }

    pub fn from_rf(nvars: usize, c: RationalFunction) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(vec![0; nvars], c);
        p
    }

    pub fn constant(nvars: usize, c: Rat) -> Self {
        Self::from_rf(nvars, RationalFunction::constant(c))
    }

    /// The coordinate `x_{i+1}` (zero-based `i`).
    pub fn var(nvars: usize, i: usize) -> Self {
        assert!(i < nvars, "variable index out of range");
        let mut exp = vec![0; nvars];
        exp[i] = 1;
        let mut p = Self::zero(nvars);
        p.add_term(exp, RationalFunction::one());
        p
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Monomial, RationalFunction)>) -> Self {
        let mut p = Self::zero(nvars);
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    fn add_term(&mut self, m: Monomial, c: RationalFunction) {
        debug_assert_eq!(m.len(), self.nvars);
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let s = e.get() + &c;
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &RationalFunction)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &[u32]) -> RationalFunction {
        self.terms.get(m).cloned().unwrap_or_else(RationalFunction::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// True when no term involves a state variable.
    pub fn is_x_free(&self) -> bool {
        self.terms.keys().all(|m| m.iter().all(|&e| e == 0))
    }

    /// The `t`-only value, when the polynomial does not depend on `x`.
    pub fn as_rf(&self) -> Option<RationalFunction> {
        self.is_x_free().then(|| self.coeff(&vec![0; self.nvars]))
    }

    /// Total degree in `x`; `None` for zero.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.iter().sum()).max()
    }

    /// Largest monomial in the map's (lexicographic) order with its coefficient.
    pub fn leading_term(&self) -> Option<(&Monomial, &RationalFunction)> {
        self.terms.iter().next_back()
    }

    pub fn scale(&self, c: &RationalFunction) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        XPoly { nvars: self.nvars, terms: self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect() }
    }

    /// Partial derivative in `t` (coefficientwise).
    pub fn dt(&self) -> Self {
        Self::from_terms(self.nvars, self.terms.iter().map(|(m, c)| (m.clone(), c.derivative())))
    }

    /// Partial derivative in `x_{i+1}`.
    pub fn dx(&self, i: usize) -> Self {
        Self::from_terms(
            self.nvars,
            self.terms.iter().filter(|(m, _)| m[i] > 0).map(|(m, c)| {
                let mut m2 = m.clone();
                let e = m2[i];
                m2[i] -= 1;
                (m2, c.scale(&Rat::from_integer(e.into())))
            }),
        )
    }

    pub fn pow(&self, e: u32) -> Self {
        (0..e).fold(Self::one(self.nvars), |acc, _| &acc * self)
    }

    /// Substitutes `t = t0` in every coefficient; `None` if some coefficient has a pole there.
    pub fn eval_t(&self, t0: &Rat) -> Option<BTreeMap<Monomial, Rat>> {
        let mut out = BTreeMap::new();
        for (m, c) in &self.terms {
            let v = c.eval(t0)?;
            if !num_traits::Zero::is_zero(&v) {
                out.insert(m.clone(), v);
            }
        }
        Some(out)
    }

    /// Every distinct denominator among the coefficients.
    pub fn denominators(&self) -> Vec<super::UniPoly> {
        let mut out: Vec<super::UniPoly> = Vec::new();
        for c in self.terms.values() {
            if !c.denom().is_constant() && !out.contains(c.denom()) {
                out.push(c.denom().clone());
            }
        }
        out
    }
}

impl fmt::Display for XPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let mut first = true;
        for (m, c) in self.terms.iter().rev() {
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            let vars: Vec<String> = m
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(i, &e)| if e == 1 { format!("x{}", i + 1) } else { format!("x{}^{e}", i + 1) })
                .collect();
            if vars.is_empty() {
                write!(f, "({c})")?;
            } else {
                write!(f, "({c})*{}", vars.join("*"))?;
            }
        }
        Ok(())
    }
}

impl<'a> Add<&'a XPoly> for &'a XPoly {
    type Output = XPoly;
    fn add(self, rhs: &XPoly) -> XPoly {
        assert_eq!(self.nvars, rhs.nvars);
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl<'a> Sub<&'a XPoly> for &'a XPoly {
    type Output = XPoly;
    fn sub(self, rhs: &XPoly) -> XPoly {
        self + &(-rhs)
    }
}

impl<'a> Mul<&'a XPoly> for &'a XPoly {
    type Output = XPoly;
    fn mul(self, rhs: &XPoly) -> XPoly {
        assert_eq!(self.nvars, rhs.nvars);
        let mut out = XPoly::zero(self.nvars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                let m: Monomial = ma.iter().zip(mb).map(|(a, b)| a + b).collect();
                out.add_term(m, ca * cb);
            }
        }
        out
    }
}

impl Neg for &XPoly {
    type Output = XPoly;
    fn neg(self) -> XPoly {
        XPoly { nvars: self.nvars, terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect() }
    }
}

impl Neg for XPoly {
    type Output = XPoly;
    fn neg(self) -> XPoly {
        -&self
    }
}

forward_owned!(XPoly, Add add, Sub sub, Mul mul);

/// Ring structure for a fixed number of variables. `zero()`/`one()` are only
/// used by generic code as neutral seeds; they carry `nvars = 0` and combine
/// with any operand through [`XPoly::align`].
impl super::Ring for XPoly {
    fn zero() -> Self {
        XPoly::zero(0)
    }
    fn one() -> Self {
        XPoly::one(0)
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    fn plus(&self, other: &Self) -> Self {
        let (a, b) = XPoly::align(self, other);
        &a + &b
    }
    fn minus(&self, other: &Self) -> Self {
        let (a, b) = XPoly::align(self, other);
        &a - &b
    }
    fn times(&self, other: &Self) -> Self {
        let (a, b) = XPoly::align(self, other);
        &a * &b
    }
    fn negated(&self) -> Self {
        -self
    }
}

impl XPoly {
    /// Lifts a variable-free seed (`nvars = 0`) to the other operand's arity.
    fn align(a: &XPoly, b: &XPoly) -> (XPoly, XPoly) {
        match (a.nvars, b.nvars) {
            (x, y) if x == y => (a.clone(), b.clone()),
            (0, n) => (a.with_nvars(n), b.clone()),
            (n, 0) => (a.clone(), b.with_nvars(n)),
            (x, y) => panic!("XPoly arity mismatch: {x} vs {y}"),
        }
    }

    fn with_nvars(&self, n: usize) -> XPoly {
        assert_eq!(self.nvars, 0);
        XPoly::from_terms(n, self.terms.values().map(|c| (vec![0; n], c.clone())))
    }
}
