use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{Monomial, Rat, RationalFunction, XPoly};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PiecewiseError {
    #[error("breakpoints must be strictly increasing and interior to the interval")]
    BadBreakpoints,
    #[error("expected {expected} pieces for {breakpoints} breakpoints, got {got}")]
    PieceCount { expected: usize, breakpoints: usize, got: usize },
    #[error("empty interval")]
    EmptyInterval,
}

/// A value that can be checked for agreement at a breakpoint.
pub trait PieceValue: Clone {
    type Point: PartialEq + std::fmt::Debug;
    /// Value at `t`, `None` at a pole.
    fn value_at(&self, t: &Rat) -> Option<Self::Point>;
    fn d_dt(&self) -> Self;
}

impl PieceValue for RationalFunction {
    type Point = Rat;
    fn value_at(&self, t: &Rat) -> Option<Rat> {
        self.eval(t)
    }
    fn d_dt(&self) -> Self {
        self.derivative()
    }
}

impl PieceValue for XPoly {
    type Point = BTreeMap<Monomial, Rat>;
    fn value_at(&self, t: &Rat) -> Option<Self::Point> {
        self.eval_t(t)
    }
    fn d_dt(&self) -> Self {
        self.dt()
    }
}

/// Left and right pieces disagree at a breakpoint in the given `t`-derivative.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContinuityWarning {
    #[serde(with = "crate::shell::rat_serde")]
    pub breakpoint: Rat,
    pub derivative_order: usize,
}

/// A function given by one branch per subinterval of a closed interval.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Piecewise<T> {
    interval: (Rat, Rat),
    breakpoints: Vec<Rat>,
    pieces: Vec<T>,
}

impl<T> Piecewise<T> {
    pub fn new(interval: (Rat, Rat), breakpoints: Vec<Rat>, pieces: Vec<T>) -> Result<Self, PiecewiseError> {
        if interval.0 >= interval.1 {
            return Err(PiecewiseError::EmptyInterval);
        }
        let mut prev = &interval.0;
        for b in &breakpoints {
            if b <= prev || b >= &interval.1 {
                return Err(PiecewiseError::BadBreakpoints);
            }
            prev = b;
        }
        if pieces.len() != breakpoints.len() + 1 {
            return Err(PiecewiseError::PieceCount {
                expected: breakpoints.len() + 1,
                breakpoints: breakpoints.len(),
                got: pieces.len(),
            });
        }
        Ok(Piecewise { interval, breakpoints, pieces })
    }

    pub fn single(interval: (Rat, Rat), value: T) -> Result<Self, PiecewiseError> {
        Self::new(interval, Vec::new(), vec![value])
    }

    pub fn interval(&self) -> &(Rat, Rat) {
        &self.interval
    }

    pub fn breakpoints(&self) -> &[Rat] {
        &self.breakpoints
    }

    pub fn pieces(&self) -> &[T] {
        &self.pieces
    }

    /// Closed subinterval owned by each piece.
    pub fn piece_intervals(&self) -> Vec<(Rat, Rat)> {
        let mut ends = vec![self.interval.0.clone()];
        ends.extend(self.breakpoints.iter().cloned());
        ends.push(self.interval.1.clone());
        ends.windows(2).map(|w| (w[0].clone(), w[1].clone())).collect()
    }

    /// The piece in force at `t` (the left piece at a breakpoint).
    pub fn piece_at(&self, t: &Rat) -> &T {
        let idx = self.breakpoints.iter().take_while(|b| *b < t).count();
        &self.pieces[idx]
    }
}

impl<T: PieceValue> Piecewise<T> {
    /// Checks agreement of derivatives `0..=class` at every breakpoint.
    pub fn continuity_warnings(&self, class: usize) -> Vec<ContinuityWarning> {
        let mut out = Vec::new();
        for (i, bp) in self.breakpoints.iter().enumerate() {
            let mut left = self.pieces[i].clone();
            let mut right = self.pieces[i + 1].clone();
            for order in 0..=class {
                let (l, r) = (left.value_at(bp), right.value_at(bp));
                if l.is_none() || l != r {
                    out.push(ContinuityWarning { breakpoint: bp.clone(), derivative_order: order });
                }
                left = left.d_dt();
                right = right.d_dt();
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::{int, UniPoly};

    fn rf(c: &[i64]) -> RationalFunction {
        RationalFunction::from_poly(UniPoly::from_ints(c))
    }

    #[test]
    fn validates_breakpoints() {
        let i = (int(-1), int(1));
        assert!(Piecewise::new(i.clone(), vec![int(0)], vec![rf(&[1]), rf(&[1])]).is_ok());
        assert_eq!(Piecewise::new(i.clone(), vec![int(1)], vec![rf(&[1]), rf(&[1])]), Err(PiecewiseError::BadBreakpoints));
        assert!(matches!(Piecewise::new(i, vec![int(0)], vec![rf(&[1])]), Err(PiecewiseError::PieceCount { .. })));
    }

    #[test]
    fn t_cubed_abs_t_is_c2_but_not_c4() {
        // t^3|t|: -t^4 on [-1,0], t^4 on [0,1]
        let f = Piecewise::new((int(-1), int(1)), vec![int(0)], vec![rf(&[0, 0, 0, 0, -1]), rf(&[0, 0, 0, 0, 1])]).unwrap();
        assert!(f.continuity_warnings(3).is_empty());
        let w = f.continuity_warnings(4);
        assert_eq!(w, vec![ContinuityWarning { breakpoint: int(0), derivative_order: 4 }]);
        assert_eq!(f.piece_at(&int(0)), &rf(&[0, 0, 0, 0, -1]));
        assert_eq!(f.piece_at(&crate::exactalg::rat(1, 2)), &rf(&[0, 0, 0, 0, 1]));
    }

    #[test]
    fn jump_detected() {
        let f = Piecewise::new((int(0), int(2)), vec![int(1)], vec![rf(&[0]), rf(&[1])]).unwrap();
        assert_eq!(f.continuity_warnings(0).len(), 1);
    }
}
