//! Seeded generators of random test systems.
#![allow(dead_code)]

use linvar::exactalg::{int, Matrix, Rat, RationalFunction, UniPoly};
use linvar::linsys::{apply_linear_change, invariants, unimodular, InvariantVector, LinearSystem};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn poly(rng: &mut impl Rng, max_deg: usize, bound: i64) -> UniPoly {
    let deg = rng.gen_range(0..=max_deg);
    UniPoly::from_ints(&(0..=deg).map(|_| rng.gen_range(-bound..=bound)).collect::<Vec<_>>())
}

pub fn rf(p: UniPoly) -> RationalFunction {
    RationalFunction::from_poly(p)
}

pub fn unit_interval() -> (Rat, Rat) {
    (int(-1), int(1))
}

/// Polynomial entries of degree at most `max_deg`, redrawn until controllable.
pub fn controllable_system(rng: &mut impl Rng, n: usize, max_deg: usize) -> LinearSystem {
    loop {
        let a = Matrix::from_rows((0..n).map(|_| (0..n).map(|_| rf(poly(rng, max_deg, 3))).collect()).collect());
        let b = (0..n).map(|_| rf(poly(rng, max_deg, 3))).collect();
        let sys = LinearSystem::new(a, b, unit_interval()).unwrap();
        if invariants(&sys).is_ok() {
            return sys;
        }
    }
}

/// `L U` with random polynomial off-diagonal entries of degree at most 2.
pub fn unimodular_change(rng: &mut impl Rng, n: usize) -> Matrix<RationalFunction> {
    let count = n * (n - 1) / 2;
    let lower: Vec<UniPoly> = (0..count).map(|_| poly(rng, 2, 2)).collect();
    let upper: Vec<UniPoly> = (0..count).map(|_| poly(rng, 2, 2)).collect();
    unimodular(n, &lower, &upper)
}

/// `x' = ĝ u` with `ĝ_i = Σ_j M_ij (t − r)^{e_j}` for distinct exponents
/// `e_j`, then moved by a random unimodular change. `det K` is a constant
/// times a power of `t − r`.
pub fn system_with_rational_singularity(rng: &mut impl Rng, n: usize) -> (LinearSystem, Rat) {
    let r = Rat::new(rng.gen_range(-4..=4).into(), 4.into());
    let mut exps: Vec<usize> = Vec::new();
    while exps.len() < n {
        let e = rng.gen_range(0..=n + 2);
        if !exps.contains(&e) {
            exps.push(e);
        }
    }
    let shifted = UniPoly::new(vec![-r.clone(), int(1)]);
    let basis: Vec<UniPoly> = exps.iter().map(|&e| shifted.pow(e as u32)).collect();
    let m = loop {
        let m = Matrix::from_rows((0..n).map(|_| (0..n).map(|_| int(rng.gen_range(-2..=2))).collect()).collect());
        if m.det() != int(0) {
            break m;
        }
    };
    let g: Vec<RationalFunction> = (0..n)
        .map(|i| rf((0..n).fold(UniPoly::zero(), |acc, j| &acc + &basis[j].scale(&m[(i, j)]))))
        .collect();
    let sys = LinearSystem::driftless(g, unit_interval()).unwrap();
    let f = unimodular_change(rng, n);
    (apply_linear_change(&sys, &f).unwrap(), r)
}

/// Polynomial `γ` with integer coefficients.
pub fn polynomial_gamma(rng: &mut impl Rng, n: usize) -> InvariantVector {
    InvariantVector { gamma: (0..n).map(|_| rf(poly(rng, 3, 5))).collect() }
}
