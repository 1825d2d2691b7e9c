//! Continuous piecewise-affine functions with rational data.
//!
//! A [`PiecewiseAffine`] is given by breakpoints `x_0 < … < x_k` and values
//! `y_0 … y_k`; it interpolates linearly in between and is constant beyond the
//! outer breakpoints. These serve both as integrands and, in [`crate::maps`],
//! as maps between interval ambients. All level-set interiors of such a
//! function are elementary sets, which is what makes the integrator exact.

use std::cmp::{max, min};

use crate::elementary::{Ambient, ElementarySet};
use crate::error::{Error, Result};
use crate::scalar::{Extended, Scalar};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PiecewiseAffine<S> {
    breakpoints: Vec<S>,
    values: Vec<S>,
}

/// One affine piece of a function restricted to a window. Infinite ends only
/// occur on the constant tails, where `y_lo == y_hi`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Segment<S> {
    pub lo: Extended<S>,
    pub hi: Extended<S>,
    pub y_lo: S,
    pub y_hi: S,
}

impl<S: Scalar> Segment<S> {
    pub fn is_constant(&self) -> bool {
        self.y_lo == self.y_hi
    }

    /// Inverse of the affine piece; only meaningful on non-constant pieces,
    /// which always have finite ends.
    fn solve(&self, y: &S) -> S {
        let (x0, x1) = (self.lo.finite().expect("finite"), self.hi.finite().expect("finite"));
        x0.clone() + (y.clone() - self.y_lo.clone()) * (x1.clone() - x0.clone()) / (self.y_hi.clone() - self.y_lo.clone())
    }

    fn min_value(&self) -> &S {
        min(&self.y_lo, &self.y_hi)
    }

    fn max_value(&self) -> &S {
        max(&self.y_lo, &self.y_hi)
    }
}

impl<S: Scalar> PiecewiseAffine<S> {
    pub fn new(breakpoints: Vec<S>, values: Vec<S>) -> Result<Self> {
        if breakpoints.is_empty() || breakpoints.len() != values.len() {
            return Err(Error::InvalidFunction(format!(
                "{} breakpoints vs {} values",
                breakpoints.len(),
                values.len()
            )));
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidFunction("breakpoints must be strictly increasing".into()));
        }
        Ok(PiecewiseAffine { breakpoints, values })
    }

    pub fn constant(c: S) -> Self {
        PiecewiseAffine { breakpoints: vec![S::zero()], values: vec![c] }
    }

    /// `x ↦ slope·x + intercept` on `[lo, hi]`, constant outside.
    pub fn affine(slope: S, intercept: S, lo: S, hi: S) -> Result<Self> {
        let ylo = slope.clone() * lo.clone() + intercept.clone();
        let yhi = slope * hi.clone() + intercept;
        Self::new(vec![lo, hi], vec![ylo, yhi])
    }

    pub fn breakpoints(&self) -> &[S] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[S] {
        &self.values
    }

    pub fn eval(&self, x: &S) -> S {
        let xs = &self.breakpoints;
        let ys = &self.values;
        match xs.binary_search(x) {
            Ok(i) => ys[i].clone(),
            Err(0) => ys[0].clone(),
            Err(i) if i == xs.len() => ys[xs.len() - 1].clone(),
            Err(i) => {
                let (x0, x1, y0, y1) = (&xs[i - 1], &xs[i], &ys[i - 1], &ys[i]);
                y0.clone() + (y1.clone() - y0.clone()) * (x.clone() - x0.clone()) / (x1.clone() - x0.clone())
            }
        }
    }

    /// Value at a finite point or the tail value at an infinite end.
    pub fn eval_ext(&self, x: &Extended<S>) -> S {
        match x {
            Extended::NegInf => self.values[0].clone(),
            Extended::PosInf => self.values[self.values.len() - 1].clone(),
            Extended::Finite(v) => self.eval(v),
        }
    }

    pub fn sup_norm(&self) -> S {
        self.values.iter().map(|v| v.abs()).max().expect("nonempty")
    }

    pub fn is_constant(&self) -> bool {
        self.values.iter().all(|v| *v == self.values[0])
    }

    /// The affine pieces of the function over the window `(lo, hi)`.
    pub fn segments(&self, lo: &Extended<S>, hi: &Extended<S>) -> Vec<Segment<S>> {
        let mut cuts: Vec<Extended<S>> = vec![lo.clone()];
        for x in &self.breakpoints {
            let ex = Extended::Finite(x.clone());
            if *lo < ex && ex < *hi {
                cuts.push(ex);
            }
        }
        cuts.push(hi.clone());
        cuts.windows(2)
            .filter(|w| w[0] < w[1])
            .map(|w| Segment {
                lo: w[0].clone(),
                hi: w[1].clone(),
                y_lo: self.eval_ext(&w[0]),
                y_hi: self.eval_ext(&w[1]),
            })
            .map(|mut seg| {
                // an infinite end lies on a constant tail
                if !seg.lo.is_finite() {
                    seg.y_lo = seg.y_hi.clone();
                }
                if !seg.hi.is_finite() {
                    seg.y_hi = seg.y_lo.clone();
                }
                seg
            })
            .collect()
    }

    /// Infimum and supremum over the window (attained at segment ends).
    pub fn range_on(&self, lo: &Extended<S>, hi: &Extended<S>) -> (S, S) {
        let segs = self.segments(lo, hi);
        let lo_v = segs.iter().map(|s| s.min_value().clone()).min().expect("nonempty window");
        let hi_v = segs.iter().map(|s| s.max_value().clone()).max().expect("nonempty window");
        (lo_v, hi_v)
    }

    /// Riemann integral over the bounded interval `(lo, hi)`, exact.
    pub fn integral(&self, lo: &S, hi: &S) -> S {
        self.segments(&lo.clone().into(), &hi.clone().into())
            .into_iter()
            .map(|s| {
                let w = s.hi.finite().expect("bounded").clone() - s.lo.finite().expect("bounded").clone();
                w * (s.y_lo + s.y_hi) / S::two()
            })
            .fold(S::zero(), |a, b| a + b)
    }

    /// Integral over every interval of a bounded elementary set.
    pub fn integral_over(&self, set: &ElementarySet<S>) -> Option<S> {
        let mut total = S::zero();
        for iv in set.intervals() {
            let (a, b) = (iv.lo.finite()?, iv.hi.finite()?);
            total = total + self.integral(a, b);
        }
        Some(total)
    }

    /// `int(g⁻¹[C])` within `ambient`, where `C` is the union of the closed
    /// value ranges `[lo_i, hi_i]` (ends may be infinite).
    pub fn interior_preimage(&self, ranges: &[(Extended<S>, Extended<S>)], ambient: &Ambient<S>) -> ElementarySet<S> {
        let segs = self.segments(ambient.lo(), ambient.hi());
        let mut pieces: Vec<(Extended<S>, Extended<S>)> = Vec::new();
        for seg in &segs {
            for (vl, vh) in ranges {
                if let Some(p) = closed_piece(seg, vl, vh) {
                    pieces.push(p);
                }
            }
        }
        // merge closed pieces (touching ones included), then drop points
        pieces.sort();
        let mut merged: Vec<(Extended<S>, Extended<S>)> = Vec::new();
        for (a, b) in pieces {
            match merged.last_mut() {
                Some(last) if a <= last.1 => {
                    if b > last.1 {
                        last.1 = b;
                    }
                }
                _ => merged.push((a, b)),
            }
        }
        ElementarySet::regularize_clipped(merged.into_iter().filter(|(a, b)| a < b), ambient)
    }

    /// `int(g⁻¹[lo, hi])` within the ambient.
    pub fn level_region(&self, lo: Extended<S>, hi: Extended<S>, ambient: &Ambient<S>) -> ElementarySet<S> {
        self.interior_preimage(&[(lo, hi)], ambient)
    }

    /// `self ∘ inner` as a piecewise-affine function.
    ///
    /// The composite's breakpoints are those of `inner` together with every
    /// point where `inner` crosses a breakpoint of `self`.
    pub fn compose(&self, inner: &PiecewiseAffine<S>) -> PiecewiseAffine<S> {
        let mut xs: Vec<S> = inner.breakpoints.clone();
        let segs = inner.segments(&Extended::NegInf, &Extended::PosInf);
        for seg in segs.iter().filter(|s| !s.is_constant()) {
            for y in &self.breakpoints {
                if seg.min_value() < y && y < seg.max_value() {
                    xs.push(seg.solve(y));
                }
            }
        }
        xs.sort();
        xs.dedup();
        let ys = xs.iter().map(|x| self.eval(&inner.eval(x))).collect();
        PiecewiseAffine { breakpoints: xs, values: ys }
    }

    pub fn scale(&self, c: &S) -> Self {
        PiecewiseAffine {
            breakpoints: self.breakpoints.clone(),
            values: self.values.iter().map(|v| v.clone() * c.clone()).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut xs: Vec<S> = self.breakpoints.iter().chain(other.breakpoints.iter()).cloned().collect();
        xs.sort();
        xs.dedup();
        let ys = xs.iter().map(|x| self.eval(x) + other.eval(x)).collect();
        PiecewiseAffine { breakpoints: xs, values: ys }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-S::one()))
    }

    /// Strictly increasing (`Some(true)`) or strictly decreasing
    /// (`Some(false)`) between the outer breakpoints.
    pub fn strict_monotonicity(&self) -> Option<bool> {
        if self.breakpoints.len() < 2 {
            return None;
        }
        let incr = self.values.windows(2).all(|w| w[0] < w[1]);
        let decr = self.values.windows(2).all(|w| w[0] > w[1]);
        if incr {
            Some(true)
        } else if decr {
            Some(false)
        } else {
            None
        }
    }
}

/// `{x ∈ seg : g(x) ∈ [vl, vh]}` as a closed (possibly degenerate) piece.
fn closed_piece<S: Scalar>(
    seg: &Segment<S>,
    vl: &Extended<S>,
    vh: &Extended<S>,
) -> Option<(Extended<S>, Extended<S>)> {
    let smin = Extended::Finite(seg.min_value().clone());
    let smax = Extended::Finite(seg.max_value().clone());
    let a = max(&smin, vl).clone();
    let b = min(&smax, vh).clone();
    if a > b {
        return None;
    }
    if seg.is_constant() {
        return Some((seg.lo.clone(), seg.hi.clone()));
    }
    let (a, b) = (a.finite().expect("bounded").clone(), b.finite().expect("bounded").clone());
    let (xa, xb) = (seg.solve(&a), seg.solve(&b));
    let (l, h) = if xa <= xb { (xa, xb) } else { (xb, xa) };
    Some((Extended::Finite(l), Extended::Finite(h)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::{q, qx};
    use num_rational::BigRational as Q;

    fn pa(xs: &[(i64, i64)], ys: &[(i64, i64)]) -> PiecewiseAffine<Q> {
        PiecewiseAffine::new(xs.iter().map(|&(a, b)| q(a, b)).collect(), ys.iter().map(|&(a, b)| q(a, b)).collect())
            .unwrap()
    }

    #[test]
    fn evaluation_and_tails() {
        let g = pa(&[(0, 1), (1, 2), (1, 1)], &[(0, 1), (1, 1), (0, 1)]);
        assert_eq!(g.eval(&q(1, 4)), q(1, 2));
        assert_eq!(g.eval(&q(-5, 1)), q(0, 1));
        assert_eq!(g.eval(&q(1, 2)), q(1, 1));
        assert_eq!(g.eval_ext(&Extended::PosInf), q(0, 1));
        assert_eq!(g.sup_norm(), q(1, 1));
    }

    #[test]
    fn rejects_bad_data() {
        assert!(PiecewiseAffine::<Q>::new(vec![], vec![]).is_err());
        assert!(PiecewiseAffine::new(vec![q(1, 1), q(1, 1)], vec![q(0, 1), q(0, 1)]).is_err());
    }

    #[test]
    fn trapezoid_integral() {
        let id = pa(&[(0, 1), (1, 1)], &[(0, 1), (1, 1)]);
        assert_eq!(id.integral(&q(0, 1), &q(1, 2)), q(1, 8));
        let tent = pa(&[(0, 1), (1, 2), (1, 1)], &[(0, 1), (1, 1), (0, 1)]);
        assert_eq!(tent.integral(&q(0, 1), &q(1, 1)), q(1, 2));
    }

    #[test]
    fn level_regions() {
        let unit = Ambient::open_unit();
        let fold = pa(&[(0, 1), (1, 2), (1, 1)], &[(1, 1), (0, 1), (1, 1)]);
        let low = fold.level_region(qx(0, 1), qx(1, 2), &unit);
        assert_eq!(low, ElementarySet::from_pairs(&[(q(1, 4), q(3, 4))], &unit).unwrap());
        let high = fold.level_region(qx(1, 2), qx(1, 1), &unit);
        assert_eq!(high, ElementarySet::from_pairs(&[(q(0, 1), q(1, 4)), (q(3, 4), q(1, 1))], &unit).unwrap());
        // a single point of the preimage has empty interior
        let top = fold.level_region(qx(1, 1), Extended::PosInf, &unit);
        assert!(top.is_empty());
    }

    #[test]
    fn closed_ambient_level_region_is_half_open() {
        let cl = Ambient::<Q>::closed_unit();
        let id = pa(&[(0, 1), (1, 1)], &[(0, 1), (1, 1)]);
        let r = id.level_region(Extended::NegInf, qx(1, 2), &cl);
        assert!(r.contains_point(&q(0, 1)));
        assert_eq!(r.boundary().points, vec![q(1, 2)]);
    }

    #[test]
    fn composition_matches_pointwise() {
        let g = pa(&[(0, 1), (1, 1), (2, 1)], &[(0, 1), (3, 1), (1, 1)]);
        let phi = pa(&[(0, 1), (1, 1)], &[(0, 1), (2, 1)]);
        let c = g.compose(&phi);
        for k in -4..=12 {
            let x = q(k, 8);
            assert_eq!(c.eval(&x), g.eval(&phi.eval(&x)));
        }
    }
}
