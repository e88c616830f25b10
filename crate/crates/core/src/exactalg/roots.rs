//! Root machinery: integer and rational roots by divisor enumeration, real
//! root isolation with Sturm sequences, and safe lower bounds on the moduli of
//! complex roots.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::{Rat, UniPoly};

/// Positive divisors of `|n|` that do not exceed `bound`. `n` must be nonzero.
fn divisors_up_to(n: &BigInt, bound: &BigInt) -> Vec<BigInt> {
    let n = n.abs();
    let mut out = Vec::new();
    let mut i = BigInt::one();
    while &i * &i <= n && &i <= bound {
        if (&n % &i).is_zero() {
            out.push(i.clone());
            let other = &n / &i;
            if other != i && &other <= bound {
                out.push(other);
            }
        }
        i += 1;
    }
    out.sort();
    out
}

/// Cauchy bound `1 + max |a_i / a_n|` on the moduli of all roots, rounded up.
fn cauchy_bound(c: &[BigInt]) -> BigInt {
    let lc = c.last().expect("nonzero polynomial").abs();
    let m = c[..c.len() - 1].iter().map(|a| a.abs()).max().unwrap_or_else(BigInt::zero);
    BigInt::one() + m.div_ceil(&lc)
}

/// All integer roots with multiplicities, ascending.
///
/// Denominators are cleared, the factor `k^m` is split off, and the remaining
/// candidates are the divisors of the constant term bounded by the Cauchy bound.
pub fn integer_roots(p: &UniPoly) -> Vec<(BigInt, usize)> {
    assert!(!p.is_zero(), "integer_roots of the zero polynomial");
    let m = p.trailing_zeros();
    let q = p.shr(m);
    let mut out = Vec::new();
    if m > 0 {
        out.push((BigInt::zero(), m));
    }
    if q.degree() == Some(0) {
        return out;
    }
    let c = q.primitive_integer_coeffs();
    let bound = cauchy_bound(&c);
    for d in divisors_up_to(&c[0], &bound) {
        for cand in [d.clone(), -d] {
            let mult = q.root_multiplicity(&Rat::from_integer(cand.clone()));
            if mult > 0 {
                out.push((cand, mult));
            }
        }
    }
    out.sort();
    out
}

/// All rational roots with multiplicities, ascending (rational root theorem).
pub fn rational_roots(p: &UniPoly) -> Vec<(Rat, usize)> {
    assert!(!p.is_zero(), "rational_roots of the zero polynomial");
    let m = p.trailing_zeros();
    let q = p.shr(m);
    let mut out: Vec<(Rat, usize)> = Vec::new();
    if m > 0 {
        out.push((Rat::zero(), m));
    }
    if q.degree() == Some(0) {
        return out;
    }
    let c = q.primitive_integer_coeffs();
    let lc = c.last().unwrap().clone();
    let bound = cauchy_bound(&c);
    let big = c[0].abs().max(lc.abs());
    let dens = divisors_up_to(&lc, &lc.abs());
    for num in divisors_up_to(&c[0], &big) {
        for den in &dens {
            let r = Rat::new(num.clone(), den.clone());
            if r.numer() != &num || r.denom() != den || r > Rat::from_integer(bound.clone()) {
                // non-reduced duplicates and out-of-bound candidates
                continue;
            }
            for cand in [r.clone(), -r] {
                let mult = q.root_multiplicity(&cand);
                if mult > 0 {
                    out.push((cand, mult));
                }
            }
        }
    }
    out.sort_by(|a, b| a.0.cmp(&b.0));
    out
}

/// Yun's square-free decomposition: `p = c * prod f_i^i` with each `f_i`
/// square-free, monic, and pairwise coprime. Returns `(f_i, i)` for nonconstant factors.
pub fn squarefree_decomposition(p: &UniPoly) -> Vec<(UniPoly, usize)> {
    assert!(!p.is_zero(), "square-free decomposition of the zero polynomial");
    let mut out = Vec::new();
    let p = p.monic();
    let dp = p.derivative();
    let a0 = p.gcd(&dp);
    if a0.is_zero() {
        return out;
    }
    let mut b = p.div_exact(&a0);
    let mut c = dp.div_exact(&a0);
    let mut d = &c - &b.derivative();
    let mut i = 1;
    while !b.is_constant() {
        let a = b.gcd(&d);
        if !a.is_constant() {
            out.push((a.clone(), i));
        }
        b = b.div_exact(&a);
        c = d.div_exact(&a);
        d = &c - &b.derivative();
        i += 1;
    }
    out
}

/// Sturm chain of a polynomial (intended for square-free input).
#[derive(Clone, Debug)]
pub struct SturmSequence {
    chain: Vec<UniPoly>,
}

pub fn sturm_sequence(p: &UniPoly) -> SturmSequence {
    let mut chain = vec![p.clone(), p.derivative()];
    while !chain.last().unwrap().is_zero() {
        let n = chain.len();
        let (_, r) = chain[n - 2].div_rem(&chain[n - 1]);
        chain.push(-&r);
    }
    chain.pop();
    SturmSequence { chain }
}

impl SturmSequence {
    pub fn sign_changes(&self, x: &Rat) -> usize {
        let mut count = 0;
        let mut last: Option<bool> = None;
        for q in &self.chain {
            let v = q.eval(x);
            if v.is_zero() {
                continue;
            }
            let pos = v.is_positive();
            if last.is_some_and(|l| l != pos) {
                count += 1;
            }
            last = Some(pos);
        }
        count
    }

    /// Number of distinct roots in the half-open interval `(a, b]`.
    pub fn count_in(&self, a: &Rat, b: &Rat) -> usize {
        self.sign_changes(a) - self.sign_changes(b)
    }

    pub fn poly(&self) -> &UniPoly {
        &self.chain[0]
    }
}

/// A real root located in `(lo, hi]`, or exactly at `lo == hi` when `exact` is set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RootInterval {
    #[serde(with = "crate::shell::rat_serde")]
    pub lo: Rat,
    #[serde(with = "crate::shell::rat_serde")]
    pub hi: Rat,
    #[serde(with = "crate::shell::rat_serde::opt")]
    pub exact: Option<Rat>,
    pub multiplicity: usize,
}

impl RootInterval {
    fn exact(r: Rat, multiplicity: usize) -> Self {
        RootInterval { lo: r.clone(), hi: r.clone(), exact: Some(r), multiplicity }
    }

    pub fn width(&self) -> Rat {
        &self.hi - &self.lo
    }

    /// Whether the root is certainly contained in `[a, b]`.
    pub fn contained_in(&self, a: &Rat, b: &Rat) -> bool {
        &self.lo >= a && &self.hi <= b
    }

    /// Bisects until the width is at most `width`, using the Sturm chain of
    /// the square-free factor that owns this root.
    pub fn refine(&self, sturm: &SturmSequence, width: &Rat) -> RootInterval {
        let mut cur = self.clone();
        let two = Rat::from_integer(2.into());
        while cur.exact.is_none() && &cur.width() > width {
            let mid = (&cur.lo + &cur.hi) / &two;
            if sturm.poly().eval(&mid).is_zero() {
                return RootInterval::exact(mid, cur.multiplicity);
            }
            if sturm.count_in(&cur.lo, &mid) == 1 {
                cur.hi = mid;
            } else {
                cur.lo = mid;
            }
        }
        cur
    }
}

fn isolate(s: &SturmSequence, lo: Rat, hi: Rat, count: usize, out: &mut Vec<(Rat, Rat)>) {
    match count {
        0 => {}
        1 => out.push((lo, hi)),
        _ => {
            let mid = (&lo + &hi) / Rat::from_integer(2.into());
            let left = s.count_in(&lo, &mid);
            isolate(s, lo, mid.clone(), left, out);
            isolate(s, mid, hi, count - left, out);
        }
    }
}

/// Isolates every distinct real root of `p` in the closed interval `[lo, hi]`.
///
/// Works on the square-free factors, so each reported root carries its
/// multiplicity in `p`. Rational roots are reported exactly.
pub fn real_roots_in_interval(p: &UniPoly, lo: &Rat, hi: &Rat) -> Vec<RootInterval> {
    assert!(!p.is_zero(), "real root isolation of the zero polynomial");
    assert!(lo <= hi, "empty interval");
    let mut out = Vec::new();
    for (f, mult) in squarefree_decomposition(p) {
        let s = sturm_sequence(&f);
        let rational = rational_roots(&f);
        if f.eval(lo).is_zero() {
            out.push(RootInterval::exact(lo.clone(), mult));
        }
        let mut raw = Vec::new();
        isolate(&s, lo.clone(), hi.clone(), s.count_in(lo, hi), &mut raw);
        for (a, b) in raw {
            if f.eval(&b).is_zero() {
                out.push(RootInterval::exact(b, mult));
            } else if let Some((r, _)) = rational.iter().find(|(r, _)| r > &a && r < &b) {
                out.push(RootInterval::exact(r.clone(), mult));
            } else {
                out.push(RootInterval { lo: a, hi: b, exact: None, multiplicity: mult });
            }
        }
    }
    out.sort_by(|a, b| a.lo.cmp(&b.lo));
    out
}

/// Rational `r > 0` with every complex root `z` of `p` satisfying `|z| >= r`.
///
/// Requires `p(0) != 0`; returns `None` when `p` is constant. The bound is the
/// positive root of `|a_0| = sum_{i>=1} |a_i| r^i`, approached from below by
/// dyadic bisection.
pub fn root_modulus_lower_bound(p: &UniPoly) -> Option<Rat> {
    assert!(!p.coeff(0).is_zero(), "root modulus bound needs p(0) != 0");
    if p.is_constant() {
        return None;
    }
    let a0 = p.coeff(0).abs();
    let rest: Vec<Rat> = p.coeffs()[1..].iter().map(|c| c.abs()).collect();
    let g = |r: &Rat| {
        let mut acc = Rat::zero();
        let mut pw = r.clone();
        for a in &rest {
            acc += a * &pw;
            pw *= r;
        }
        &a0 - acc
    };
    let two = Rat::from_integer(2.into());
    let mut hi = Rat::one();
    while !g(&hi).is_negative() {
        hi *= &two;
    }
    let mut lo = &hi / &two;
    while g(&lo).is_negative() {
        hi = lo.clone();
        lo /= &two;
    }
    for _ in 0..32 {
        let mid = (&lo + &hi) / &two;
        if g(&mid).is_negative() {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(lo)
}
